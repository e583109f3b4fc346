#pragma once

#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "support/fixtures.hpp"
#include "wordnorms/pipeline.hpp"

namespace wordnorms::testing {

struct ConfigOptions {
    std::string mode = "mock";
    std::vector<std::string> models;
    std::string features;
    std::string sample_size;
    std::string extra_run;
    bool glasgow = true;
    bool lancaster = false;
};

/// Writes run.ini in `dir`, pointing at glasgow.csv / lancaster.csv next to it.
inline std::filesystem::path write_config(const std::filesystem::path& dir, const ConfigOptions& o) {
    std::string ini = "[run]\noutput_dir = out\nmode = " + o.mode + "\nseed = 7\nparallelism = 2\n";
    if (!o.features.empty()) ini += "features = " + o.features + "\n";
    if (!o.sample_size.empty()) ini += "sample_size = " + o.sample_size + "\n";
    ini += o.extra_run;
    if (o.glasgow) ini += "\n[dataset:glasgow]\npath = glasgow.csv\n";
    if (o.lancaster) ini += "\n[dataset:lancaster]\npath = lancaster.csv\n";
    for (const auto& m : o.models) {
        ini += fmt::format("\n[model:{}]\nendpoint = http://127.0.0.1:9\ntop_logprobs = 20\nmax_retries = 0\n", m);
    }
    const auto path = dir / "run.ini";
    write_file(path, ini);
    return path;
}

}  // namespace wordnorms::testing
