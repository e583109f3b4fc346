#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wordnorms/client.hpp"
#include "wordnorms/ingest.hpp"
#include "wordnorms/metrics.hpp"
#include "wordnorms/norms.hpp"

namespace wordnorms {

enum class RunMode { Live, Replay, Mock };

std::string_view to_string(RunMode mode) noexcept;
RunMode parse_run_mode(std::string_view text);

struct DatasetSource {
    std::filesystem::path path;
    ColumnMapping mapping;
};

/// Everything a pipeline stage needs, read from an INI file. Sections:
///
///   [run]                 output_dir, mode, features, sample_size, seed, quotes,
///                         strip_sense, coverage_floor, divergence_threshold,
///                         rounding, estimate, parallelism, cache
///   [dataset:<id>]        path, header_rows, word_column, mean.<feature>,
///                         sd.<feature>, n.<feature>
///   [model:<name>]        endpoint, path, temperature, top_logprobs, max_retries,
///                         backoff_ms, timeout_s, api_key_env
///   [feature:<id>]        registry entries (see load_registry)
///
/// Relative paths resolve against the config file's directory.
struct RunConfig {
    std::map<Dataset, DatasetSource> datasets;
    std::vector<std::string> features;  ///< empty selects every feature of the configured datasets
    std::vector<BackendConfig> models;
    std::optional<std::size_t> sample_size;
    std::uint64_t seed = 0;
    QuoteStyle quotes = QuoteStyle::Typographic;
    bool strip_sense = false;
    double coverage_floor = 0.25;
    MetricOptions metrics;
    bool use_argmax = false;
    std::filesystem::path output_dir;
    std::filesystem::path cache_path;
    RunMode mode = RunMode::Mock;
    std::size_t parallelism = 4;
    FeatureRegistry registry{feature_registry()};
    std::string source_text;

    /// Features in registry order, restricted to configured datasets and the selection.
    [[nodiscard]] std::vector<NormFeature> selected_features() const;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct StageSummary {
    std::size_t items = 0;
    std::size_t failures = 0;
    std::vector<std::string> notes;
};

/// Builds the network backend for live mode; replaced in tests.
using LiveBackendFactory = std::function<std::shared_ptr<RatingBackend>(const BackendConfig&)>;

LiveBackendFactory default_live_factory();

/// Writes `data/<dataset>.jsonl` and `data/<dataset>_ingest.json`.
StageSummary cmd_ingest(const RunConfig& config);

/// Queries every selected (feature, word, model), writing
/// `estimates/<model>.jsonl`, `estimates/<model>.failures.jsonl` and `run_meta.json`.
StageSummary cmd_run(const RunConfig& config, const LiveBackendFactory& live = default_live_factory());

/// Pairs estimates with human means and writes `results.csv`.
StageSummary cmd_score(const RunConfig& config);

/// Writes `charts/<dataset>_<feature>.svg` and `divergence.txt` from `results.csv`.
StageSummary cmd_report(const RunConfig& config);

/// Filesystem-safe model name used for estimate file names.
std::string model_slug(std::string_view model);

/// Strips a trailing parenthetical sense marker, e.g. "toast (bread)" -> "toast".
std::string strip_sense_marker(std::string_view word);

}  // namespace wordnorms
