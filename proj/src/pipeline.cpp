#include "wordnorms/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "detail/ini.hpp"
#include "detail/text.hpp"
#include "wordnorms/error.hpp"
#include "wordnorms/estimator.hpp"
#include "wordnorms/report.hpp"
#include "wordnorms/version.hpp"

namespace wordnorms {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;

fs::path data_file(const RunConfig& c, Dataset d) { return c.output_dir / "data" / (std::string(to_string(d)) + ".jsonl"); }
fs::path estimates_file(const RunConfig& c, std::string_view model) {
    return c.output_dir / "estimates" / (model_slug(model) + ".jsonl");
}
fs::path failures_file(const RunConfig& c, std::string_view model) {
    return c.output_dir / "estimates" / (model_slug(model) + ".failures.jsonl");
}
fs::path results_file(const RunConfig& c) { return c.output_dir / "results.csv"; }

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorKind::StorageError, "cannot create directory " + dir.string() + ": " + ec.message());
    }
}

void write_text(const fs::path& path, std::string_view text) {
    ensure_directory(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::StorageError, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::StorageError, "write failed on " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileUnreadable, "missing input " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = detail::trim(text.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

bool parse_bool(const std::string& text) {
    const auto t = detail::trim(text);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw Error(ErrorKind::ConfigError, "expected a boolean, got '" + text + "'");
}

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(std::string(detail::trim(value)));
    return p.is_absolute() ? p : base / p;
}

ColumnMapping mapping_from(const pt::ptree& section, Dataset dataset) {
    ColumnMapping m = dataset == Dataset::Glasgow ? glasgow_default_mapping() : lancaster_default_mapping();
    for (const auto& [key, node] : section) {
        const auto value = std::string(detail::trim(node.data()));
        auto set_column = [&](std::map<std::string, std::string>& columns, std::string_view prefix) {
            const auto feature = key.substr(prefix.size());
            if (value.empty()) {
                columns.erase(feature);
            } else {
                columns[feature] = value;
            }
        };
        if (key == "header_rows") {
            m.header_rows = std::stoi(value);
        } else if (key == "word_column") {
            m.word_column = value;
        } else if (key.starts_with("mean.")) {
            set_column(m.mean_columns, "mean.");
        } else if (key.starts_with("sd.")) {
            set_column(m.sd_columns, "sd.");
        } else if (key.starts_with("n.")) {
            set_column(m.n_columns, "n.");
        } else if (key != "path") {
            throw Error(ErrorKind::ConfigError, "unknown dataset key '" + key + "'");
        }
    }
    return m;
}

BackendConfig backend_from(const std::string& name, const pt::ptree& section) {
    BackendConfig b;
    b.model = section.get<std::string>("name", name);
    b.endpoint = section.get<std::string>("endpoint", b.endpoint);
    b.path = section.get<std::string>("path", b.path);
    b.temperature = section.get<double>("temperature", b.temperature);
    b.top_logprobs = section.get<int>("top_logprobs", b.top_logprobs);
    b.retry.max_retries = section.get<int>("max_retries", b.retry.max_retries);
    b.retry.initial_backoff = std::chrono::milliseconds(section.get<int>("backoff_ms", 500));
    b.timeout = std::chrono::seconds(section.get<int>("timeout_s", 60));
    b.api_key_env = section.get<std::string>("api_key_env", b.api_key_env);
    if (b.top_logprobs < 1) throw Error(ErrorKind::ConfigError, "top_logprobs must be positive for " + name);
    if (b.retry.max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0 for " + name);
    return b;
}

std::map<Dataset, NormDataset> load_canonical_datasets(const RunConfig& config) {
    std::map<Dataset, NormDataset> out;
    for (const auto& [id, source] : config.datasets) {
        out.emplace(id, read_canonical(id, data_file(config, id), config.registry));
    }
    return out;
}

std::vector<WordRating> words_for(const RunConfig& config, const NormDataset& dataset, const NormFeature& feature) {
    const auto& all = dataset.feature(feature.id());
    if (!config.sample_size) return all;
    return sample_words(dataset, feature.id(), std::min(*config.sample_size, all.size()), config.seed);
}

struct Job {
    const NormFeature* feature;
    const WordRating* rating;
    std::string prompt;
};

std::string mock_answer(double human_mean, const RatingScale& scale) {
    const double r = std::clamp(std::round(human_mean), static_cast<double>(scale.min()),
                                static_cast<double>(scale.max()));
    return std::to_string(static_cast<int>(r));
}

struct FailureRecord {
    std::string word;
    std::string feature;
    std::string error;
};

std::vector<FailureRecord> read_failures(const fs::path& path) {
    std::vector<FailureRecord> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto j = json::parse(line);
        out.push_back({j.at("word").get<std::string>(), j.at("feature").get<std::string>(),
                       j.at("error").get<std::string>()});
    }
    return out;
}

}  // namespace

std::string_view to_string(RunMode mode) noexcept {
    switch (mode) {
        case RunMode::Live: return "live";
        case RunMode::Replay: return "replay";
        case RunMode::Mock: return "mock";
    }
    return "mock";
}

RunMode parse_run_mode(std::string_view text) {
    text = detail::trim(text);
    if (text == "live") return RunMode::Live;
    if (text == "replay") return RunMode::Replay;
    if (text == "mock") return RunMode::Mock;
    throw Error(ErrorKind::ConfigError, "mode must be live, replay or mock");
}

std::vector<NormFeature> RunConfig::selected_features() const {
    std::vector<NormFeature> out;
    for (const auto& f : registry.features()) {
        if (!datasets.contains(f.dataset())) continue;
        if (!features.empty() && std::find(features.begin(), features.end(), f.id()) == features.end()) continue;
        out.push_back(f);
    }
    return out;
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
    const pt::ptree tree = detail::parse_ini(text);

    RunConfig c;
    c.source_text = std::string(text);
    try {
        const auto run = tree.get_child("run", pt::ptree());
        c.output_dir = resolve(base_dir, run.get<std::string>("output_dir", "wordnorms-out"));
        c.mode = parse_run_mode(run.get<std::string>("mode", "mock"));
        c.features = split_list(run.get<std::string>("features", ""));
        if (auto n = run.get_optional<std::size_t>("sample_size")) c.sample_size = *n;
        c.seed = run.get<std::uint64_t>("seed", 0);
        const auto quotes = run.get<std::string>("quotes", "typographic");
        if (quotes != "typographic" && quotes != "straight") {
            throw Error(ErrorKind::ConfigError, "quotes must be typographic or straight");
        }
        c.quotes = quotes == "straight" ? QuoteStyle::Straight : QuoteStyle::Typographic;
        c.strip_sense = parse_bool(run.get<std::string>("strip_sense", "false"));
        c.coverage_floor = run.get<double>("coverage_floor", kDefaultCoverageFloor);
        c.metrics.divergence_threshold = run.get<double>("divergence_threshold", 0.15);
        c.metrics.rounding = parse_rounding_side(run.get<std::string>("rounding", "both"));
        const auto estimate = run.get<std::string>("estimate", "weighted");
        if (estimate != "weighted" && estimate != "argmax") {
            throw Error(ErrorKind::ConfigError, "estimate must be weighted or argmax");
        }
        c.use_argmax = estimate == "argmax";
        c.parallelism = run.get<std::size_t>("parallelism", 4);
        c.cache_path = run.get_optional<std::string>("cache") ? resolve(base_dir, run.get<std::string>("cache"))
                                                                : c.output_dir / "cache.jsonl";

        for (const auto& [section, body] : tree) {
            if (section.starts_with("dataset:")) {
                const auto id = parse_dataset(section.substr(8));
                auto mapping = mapping_from(body, id);
                c.datasets[id] = DatasetSource{resolve(base_dir, body.get<std::string>("path")), std::move(mapping)};
            } else if (section.starts_with("model:")) {
                auto b = backend_from(section.substr(6), body);
                b.cache_path = c.cache_path;
                b.parallelism = c.parallelism;
                c.models.push_back(std::move(b));
            } else if (section.starts_with("feature:")) {
                const auto id = section.substr(8);
                c.registry.upsert(NormFeature(id, parse_dataset(body.get<std::string>("dataset")),
                                              RatingScale(body.get<int>("min"), body.get<int>("max")),
                                              body.get<std::string>("template"),
                                              body.get<std::string>("display_name", id)));
            } else if (section != "run") {
                throw Error(ErrorKind::ConfigError, "unknown section [" + section + "]");
            }
        }
    } catch (const pt::ptree_error& e) {
        throw Error(ErrorKind::ConfigError, e.what());
    }

    for (const auto& id : c.features) {
        const auto& f = c.registry.at(id);
        if (!c.datasets.contains(f.dataset())) {
            throw Error(ErrorKind::ConfigError,
                        "feature '" + id + "' selected but no [dataset:" + std::string(to_string(f.dataset())) +
                            "] configured");
        }
    }
    if (c.models.empty() && c.mode == RunMode::Mock) {
        BackendConfig mock;
        mock.model = "mock";
        mock.cache_path = c.cache_path;
        c.models.push_back(mock);
    }
    std::sort(c.models.begin(), c.models.end(), [](const auto& a, const auto& b) { return a.model < b.model; });
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    const auto text = read_text(path);
    return parse_run_config(text, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

LiveBackendFactory default_live_factory() {
    return [](const BackendConfig& backend) -> std::shared_ptr<RatingBackend> {
        const char* key = std::getenv(backend.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw Error(ErrorKind::ConfigError, "live mode needs credentials in $" + backend.api_key_env);
        }
        return std::make_shared<OpenAiBackend>(backend, key);
    };
}

std::string model_slug(std::string_view model) {
    std::string out;
    for (char c : model) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                          c == '-' || c == '_';
        out += keep ? c : '_';
    }
    return out.empty() ? "model" : out;
}

std::string strip_sense_marker(std::string_view word) {
    const auto trimmed = detail::trim(word);
    if (!trimmed.ends_with(')')) return std::string(trimmed);
    const auto open = trimmed.rfind('(');
    if (open == std::string_view::npos) return std::string(trimmed);
    const auto base = detail::trim(trimmed.substr(0, open));
    return base.empty() ? std::string(trimmed) : std::string(base);
}

StageSummary cmd_ingest(const RunConfig& config) {
    if (config.datasets.empty()) throw Error(ErrorKind::ConfigError, "no [dataset:*] sections configured");
    StageSummary summary;
    for (const auto& [id, source] : config.datasets) {
        auto [dataset, report] = load_norms(id, source.path, source.mapping, config.registry);
        ensure_directory(config.output_dir / "data");
        write_canonical(dataset, data_file(config, id));
        write_text(config.output_dir / "data" / (std::string(to_string(id)) + "_ingest.json"), to_json(report));
        summary.items += report.rows_accepted;
        summary.failures += report.violations.size();
        summary.notes.push_back(fmt::format("{}: read {}, accepted {}, rejected {}", to_string(id), report.rows_read,
                                            report.rows_accepted, report.violations.size()));
    }
    return summary;
}

StageSummary cmd_run(const RunConfig& config, const LiveBackendFactory& live) {
    if (config.models.empty()) throw Error(ErrorKind::ConfigError, "no [model:*] sections configured");
    const auto datasets = load_canonical_datasets(config);
    const auto features = config.selected_features();

    std::vector<std::vector<WordRating>> word_lists;
    word_lists.reserve(features.size());
    std::vector<Job> jobs;
    for (const auto& f : features) {
        word_lists.push_back(words_for(config, datasets.at(f.dataset()), f));
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (const auto& w : word_lists[i]) {
            const auto word = config.strip_sense ? strip_sense_marker(w.word) : w.word;
            jobs.push_back({&features[i], &w, render_prompt(features[i], word, config.quotes)});
        }
    }
    std::vector<std::string> prompts;
    prompts.reserve(jobs.size());
    for (const auto& j : jobs) prompts.push_back(j.prompt);

    std::shared_ptr<RecordCache> cache;
    if (config.mode == RunMode::Replay) {
        if (!fs::exists(config.cache_path)) {
            throw Error(ErrorKind::CacheMiss, "replay mode needs an existing cache at " + config.cache_path.string());
        }
        cache = std::make_shared<RecordCache>(config.cache_path);
    } else if (config.mode == RunMode::Live) {
        cache = std::make_shared<RecordCache>(config.cache_path);
    }

    std::unordered_map<std::string, std::string> mock_answers;
    if (config.mode == RunMode::Mock) {
        for (const auto& j : jobs) mock_answers.emplace(j.prompt, mock_answer(j.rating->human_mean, j.feature->scale()));
    }

    const std::string started = config.mode == RunMode::Live ? utc_timestamp() : std::string();
    StageSummary summary;
    json model_stats = json::array();
    ensure_directory(config.output_dir / "estimates");

    for (const auto& backend_config : config.models) {
        std::shared_ptr<RatingBackend> backend;
        switch (config.mode) {
            case RunMode::Mock:
                backend = std::make_shared<MockBackend>(backend_config.model, [&](const std::string& prompt) {
                    auto it = mock_answers.find(prompt);
                    if (it == mock_answers.end()) throw Error(ErrorKind::CacheMiss, "mock has no answer");
                    return TokenDistribution{{{it->second, 1.0}}, ResponseSource::Mock};
                });
                break;
            case RunMode::Replay: backend = std::make_shared<ReplayBackend>(backend_config, cache); break;
            case RunMode::Live:
                backend = std::make_shared<CachingBackend>(backend_config, live(backend_config), cache);
                break;
        }

        const std::size_t cache_before = cache ? cache->size() : 0;
        const auto results = run_batch(*backend, prompts, backend_config.retry, config.parallelism);

        std::vector<RatingEstimate> estimates;
        std::string failures;
        std::size_t low_coverage = 0;
        double coverage_total = 0.0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const auto& job = jobs[i];
            std::optional<Error> error = results[i].error;
            if (results[i].ok()) {
                try {
                    estimates.push_back(
                        estimate(*results[i].distribution, *job.feature, job.rating->word, backend_config.model));
                    coverage_total += estimates.back().coverage_mass;
                    if (!estimates.back().compliant(config.coverage_floor)) ++low_coverage;
                    continue;
                } catch (const Error& e) {
                    error = e;
                }
            }
            failures += json{{"word", job.rating->word},
                             {"feature", job.feature->id()},
                             {"model", backend_config.model},
                             {"error", std::string(to_string(error->kind()))},
                             {"message", error->what()}}
                            .dump() +
                        "\n";
            ++summary.failures;
        }
        write_estimates(estimates, estimates_file(config, backend_config.model));
        write_text(failures_file(config, backend_config.model), failures);
        summary.items += estimates.size();

        const std::size_t failed = jobs.size() - estimates.size();
        summary.notes.push_back(fmt::format("{}: {} estimates, {} failures, {} below coverage floor",
                                            backend_config.model, estimates.size(), failed, low_coverage));
        json stats = {{"model", backend_config.model},
                      {"endpoint", config.mode == RunMode::Mock ? "mock" : backend_config.endpoint},
                      {"temperature", backend_config.temperature},
                      {"top_logprobs", backend_config.top_logprobs},
                      {"estimates", estimates.size()},
                      {"failures", failed},
                      {"low_coverage", low_coverage},
                      {"mean_coverage", estimates.empty() ? json(nullptr) : json(coverage_total / estimates.size())}};
        if (config.mode == RunMode::Live) stats["new_queries"] = cache->size() - cache_before;
        model_stats.push_back(std::move(stats));
    }

    json feature_ids = json::array();
    for (const auto& f : features) feature_ids.push_back(f.id());
    json meta = {{"tool", "wordnorms"},
                 {"version", std::string(kVersion)},
                 {"mode", std::string(to_string(config.mode))},
                 {"features", feature_ids},
                 {"prompts_per_model", jobs.size()},
                 {"sample_size", config.sample_size ? json(*config.sample_size) : json(nullptr)},
                 {"seed", config.seed},
                 {"quotes", config.quotes == QuoteStyle::Typographic ? "typographic" : "straight"},
                 {"strip_sense", config.strip_sense},
                 {"coverage_floor", config.coverage_floor},
                 {"renormalization", "digit tokens renormalized to sum 1"},
                 {"models", model_stats},
                 {"config", config.source_text}};
    if (config.mode == RunMode::Live) {
        meta["started_at"] = started;
        meta["finished_at"] = utc_timestamp();
    }
    write_text(config.output_dir / "run_meta.json", meta.dump(2) + "\n");
    return summary;
}

StageSummary cmd_score(const RunConfig& config) {
    const auto datasets = load_canonical_datasets(config);
    const auto features = config.selected_features();
    StageSummary summary;
    std::vector<AlignmentResult> results;

    for (const auto& backend_config : config.models) {
        const auto estimates = read_estimates(estimates_file(config, backend_config.model));
        const auto failures = read_failures(failures_file(config, backend_config.model));

        for (const auto& f : features) {
            std::unordered_map<std::string_view, double> human;
            for (const auto& r : datasets.at(f.dataset()).feature(f.id())) human.emplace(r.word, r.human_mean);

            PairedSeries series;
            std::size_t low_coverage = 0;
            for (const auto& e : estimates) {
                if (e.feature != f.id() || e.model != backend_config.model) continue;
                auto it = human.find(e.word);
                if (it == human.end()) continue;
                series.words.push_back(e.word);
                series.human.push_back(it->second);
                series.model.push_back(config.use_argmax ? static_cast<double>(e.argmax_value) : e.weighted_value);
                if (!e.compliant(config.coverage_floor)) ++low_coverage;
            }
            const auto dropped = static_cast<std::size_t>(std::count_if(
                failures.begin(), failures.end(), [&](const FailureRecord& r) { return r.feature == f.id(); }));

            AlignmentResult result;
            if (series.human.size() >= kMinAlignmentPairs) {
                result = alignment_matrix(series, f.scale(), config.metrics);
            } else {
                result.n_words = series.human.size();
                summary.notes.push_back(fmt::format("{}/{}: only {} pairs ({} dropped); coefficients undefined",
                                                    f.id(), backend_config.model, series.human.size(), dropped));
            }
            result.dataset = f.dataset();
            result.feature = f.id();
            result.model = backend_config.model;
            result.n_dropped = dropped;
            result.n_low_coverage = low_coverage;
            summary.failures += dropped;
            results.push_back(std::move(result));
        }
    }
    summary.items = results.size();
    write_text(results_file(config), results_table(std::move(results)));
    return summary;
}

StageSummary cmd_report(const RunConfig& config) {
    const auto results = parse_results_table(read_text(results_file(config)));
    StageSummary summary;

    std::set<std::pair<Dataset, std::string>> keys;
    for (const auto& r : results) keys.emplace(r.dataset, r.feature);
    for (const auto& [dataset, feature] : keys) {
        const auto* f = config.registry.find(feature);
        const auto title =
            fmt::format("{} ({})", f != nullptr ? f->display_name() : feature, to_string(dataset) == "glasgow"
                                                                                     ? "Glasgow norms"
                                                                                     : "Lancaster norms");
        const auto spec = radar_for_feature(results, dataset, feature, title);
        if (spec.axes.size() < kMinRadarAxes) {
            summary.notes.push_back(fmt::format("{}_{}: {} model(s), chart needs at least {}; skipped",
                                                to_string(dataset), feature, spec.axes.size(), kMinRadarAxes));
            continue;
        }
        write_text(config.output_dir / "charts" / fmt::format("{}_{}.svg", to_string(dataset), feature),
                   radar_chart(spec));
        ++summary.items;
    }
    write_text(config.output_dir / "divergence.txt", divergence_report(results, config.metrics.divergence_threshold));
    return summary;
}

}  // namespace wordnorms
