// wordnorms: score LLM word ratings against human psycholinguistic norms.
//
//   wordnorms ingest --config run.ini
//   wordnorms run    --config run.ini --mode replay
//   wordnorms score  --config run.ini
//   wordnorms report --config run.ini

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wordnorms/error.hpp"
#include "wordnorms/pipeline.hpp"
#include "wordnorms/version.hpp"

namespace {

int run_stage(const std::string& name, const std::string& config_path, const std::optional<std::string>& mode,
              const std::function<wordnorms::StageSummary(const wordnorms::RunConfig&)>& stage) {
    try {
        auto config = wordnorms::load_run_config(config_path);
        if (mode) config.mode = wordnorms::parse_run_mode(*mode);
        const auto summary = stage(config);
        for (const auto& note : summary.notes) std::cerr << name << ": " << note << '\n';
        std::cerr << name << ": " << summary.items << " item(s), " << summary.failures << " per-item failure(s)\n";
        return EXIT_SUCCESS;
    } catch (const wordnorms::Error& e) {
        std::cerr << name << ": error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << name << ": unexpected error: " << e.what() << '\n';
    }
    return EXIT_FAILURE;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measure alignment of LLM word ratings with human psycholinguistic norms"};
    app.set_version_flag("--version", std::string(wordnorms::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> mode;
    int status = EXIT_SUCCESS;

    auto add_stage = [&](const std::string& name, const std::string& description,
                         std::function<wordnorms::StageSummary(const wordnorms::RunConfig&)> stage) {
        auto* cmd = app.add_subcommand(name, description);
        cmd->add_option("-c,--config", config_path, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
        cmd->add_option("-m,--mode", mode, "Backend mode, overrides the config")
            ->check(CLI::IsMember({"live", "replay", "mock"}));
        cmd->callback([&, name, stage] { status = run_stage(name, config_path, mode, stage); });
    };

    add_stage("ingest", "Parse norm tables into canonical dataset files", wordnorms::cmd_ingest);
    add_stage("run", "Query backends and write per-word rating estimates",
              [](const wordnorms::RunConfig& c) { return wordnorms::cmd_run(c); });
    add_stage("score", "Compute correlation coefficients into results.csv", wordnorms::cmd_score);
    add_stage("report", "Render radar charts and the divergence report", wordnorms::cmd_report);

    CLI11_PARSE(app, argc, argv);
    return status;
}
