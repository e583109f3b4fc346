#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wordnorms/norms.hpp"

namespace wordnorms {

/// Which CSV columns hold the word and each feature's statistics.
///
/// With `header_rows = 2` the two header lines are joined as `<top>.<bottom>`,
/// the top label carried forward across blank cells. This matches tables
/// published as spreadsheets with a grouped header (e.g. `AROU` over `M SD N`).
struct ColumnMapping {
    int header_rows = 1;
    std::string word_column;
    std::map<std::string, std::string> mean_columns;
    std::map<std::string, std::string> sd_columns;
    std::map<std::string, std::string> n_columns;
};

ColumnMapping glasgow_default_mapping();
ColumnMapping lancaster_default_mapping();

struct Violation {
    std::size_t row = 0;  ///< 1-based data row, header lines excluded
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::vector<Violation> violations;

    friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

/// Parses RFC 4180 style comma-separated text (quoted fields, CRLF, UTF-8 BOM).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Loads every feature the registry assigns to `dataset`. Columns not named in
/// the mapping (e.g. Lancaster body-part ratings) are ignored. Malformed,
/// out-of-range and duplicate rows are recorded in the report and skipped.
std::pair<NormDataset, IngestReport> load_norms(Dataset dataset, const std::filesystem::path& path,
                                                const ColumnMapping& mapping, const FeatureRegistry& registry);

std::pair<NormDataset, IngestReport> load_glasgow(const std::filesystem::path& path,
                                                  const ColumnMapping& mapping = glasgow_default_mapping(),
                                                  const FeatureRegistry& registry = FeatureRegistry(feature_registry()));

std::pair<NormDataset, IngestReport> load_lancaster(
    const std::filesystem::path& path, const ColumnMapping& mapping = lancaster_default_mapping(),
    const FeatureRegistry& registry = FeatureRegistry(feature_registry()));

/// Uniform sample without replacement that keeps dataset order. Deterministic
/// for a given seed on every platform.
std::vector<WordRating> sample_words(const NormDataset& dataset, std::string_view feature_id, std::size_t n,
                                     std::uint64_t seed);

/// One JSON object per (word, feature) line: word, feature, mean, sd, n.
void write_canonical(const NormDataset& dataset, const std::filesystem::path& path);
NormDataset read_canonical(Dataset dataset, const std::filesystem::path& path, const FeatureRegistry& registry);

std::string to_json(const IngestReport& report);

}  // namespace wordnorms
