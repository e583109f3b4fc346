#include "wordnorms/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "detail/text.hpp"
#include "wordnorms/error.hpp"

namespace wordnorms {

namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileUnreadable, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::FileUnreadable, "read failed on " + path.string());
    return std::move(buffer).str();
}

std::optional<double> parse_real(std::string_view text) {
    text = detail::trim(text);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<int> parse_count(std::string_view text) {
    auto value = parse_real(text);
    if (!value || *value != std::floor(*value) || *value < 1 || *value > 1e9) return std::nullopt;
    return static_cast<int>(*value);
}

bool blank_row(const std::vector<std::string>& row) {
    return std::all_of(row.begin(), row.end(), [](const std::string& c) { return detail::trim(c).empty(); });
}

std::vector<std::string> header_names(const std::vector<std::vector<std::string>>& rows, int header_rows) {
    if (header_rows == 1) {
        std::vector<std::string> names;
        for (const auto& cell : rows[0]) names.emplace_back(detail::trim(cell));
        return names;
    }
    const auto& top = rows[0];
    const auto& bottom = rows[1];
    std::vector<std::string> names(std::max(top.size(), bottom.size()));
    std::string group;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto upper = i < top.size() ? std::string(detail::trim(top[i])) : std::string();
        const auto lower = i < bottom.size() ? std::string(detail::trim(bottom[i])) : std::string();
        if (!upper.empty()) group = upper;
        names[i] = lower.empty() ? upper : group + "." + lower;
    }
    return names;
}

struct FeatureColumns {
    const NormFeature* feature;
    std::size_t mean;
    std::optional<std::size_t> sd;
    std::optional<std::size_t> n;
};

std::size_t column_index(const std::unordered_map<std::string, std::size_t>& columns, const std::string& name) {
    auto it = columns.find(name);
    if (it == columns.end()) throw Error(ErrorKind::MissingColumn, name);
    return it->second;
}

}  // namespace

ColumnMapping glasgow_default_mapping() {
    ColumnMapping m;
    m.header_rows = 2;
    m.word_column = "Words";
    const std::pair<const char*, const char*> codes[] = {
        {"arousal", "AROU"},      {"valence", "VAL"},      {"dominance", "DOM"}, {"concreteness", "CNC"},
        {"imageability", "IMAG"}, {"familiarity", "FAM"}, {"gender", "GEND"},
    };
    for (const auto& [id, code] : codes) {
        m.mean_columns[id] = std::string(code) + ".M";
        m.sd_columns[id] = std::string(code) + ".SD";
        m.n_columns[id] = std::string(code) + ".N";
    }
    return m;
}

ColumnMapping lancaster_default_mapping() {
    ColumnMapping m;
    m.header_rows = 1;
    m.word_column = "Word";
    const std::pair<const char*, const char*> names[] = {
        {"interoceptive", "Interoceptive"}, {"gustatory", "Gustatory"}, {"olfactory", "Olfactory"},
        {"haptic", "Haptic"},               {"auditory", "Auditory"},   {"visual", "Visual"},
    };
    for (const auto& [id, name] : names) {
        m.mean_columns[id] = std::string(name) + ".mean";
        m.sd_columns[id] = std::string(name) + ".SD";
    }
    return m;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        row_started = true;
        switch (c) {
            case '"': quoted = true; break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                break;
            case '\n': end_row(); break;
            default: field.push_back(c);
        }
    }
    if (row_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::pair<NormDataset, IngestReport> load_norms(Dataset dataset, const std::filesystem::path& path,
                                                const ColumnMapping& mapping, const FeatureRegistry& registry) {
    if (mapping.header_rows != 1 && mapping.header_rows != 2) {
        throw Error(ErrorKind::ConfigError, "header_rows must be 1 or 2");
    }
    const auto features = registry.for_dataset(dataset);
    for (const auto& [id, column] : mapping.mean_columns) {
        const auto* f = registry.find(id);
        if (f == nullptr || f->dataset() != dataset) {
            throw Error(ErrorKind::UnknownFeature,
                        "mapping names '" + id + "', not registered for " + std::string(to_string(dataset)));
        }
    }

    const auto rows = parse_csv(read_file(path));
    if (rows.size() < static_cast<std::size_t>(mapping.header_rows)) {
        throw Error(ErrorKind::MissingColumn, mapping.word_column + " (file has no header)");
    }

    std::unordered_map<std::string, std::size_t> columns;
    const auto names = header_names(rows, mapping.header_rows);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!names[i].empty()) columns.try_emplace(names[i], i);
    }

    const std::size_t word_col = column_index(columns, mapping.word_column);
    std::vector<FeatureColumns> layout;
    for (const auto& f : features) {
        auto mean = mapping.mean_columns.find(f.id());
        if (mean == mapping.mean_columns.end()) {
            throw Error(ErrorKind::ConfigError, "no mean column mapped for feature '" + f.id() + "'");
        }
        FeatureColumns fc{registry.find(f.id()), column_index(columns, mean->second), {}, {}};
        if (auto sd = mapping.sd_columns.find(f.id()); sd != mapping.sd_columns.end()) {
            fc.sd = column_index(columns, sd->second);
        }
        if (auto n = mapping.n_columns.find(f.id()); n != mapping.n_columns.end()) {
            fc.n = column_index(columns, n->second);
        }
        layout.push_back(fc);
    }

    NormDataset out(dataset);
    for (const auto& f : features) out.add_feature(f);
    IngestReport report;
    std::unordered_set<std::string> seen;

    std::size_t data_row = 0;
    for (std::size_t r = static_cast<std::size_t>(mapping.header_rows); r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (blank_row(row)) continue;
        ++data_row;
        ++report.rows_read;

        auto reject = [&](std::string reason) { report.violations.push_back({data_row, std::move(reason)}); };
        auto cell = [&](std::size_t col) -> std::string_view {
            return col < row.size() ? detail::trim(row[col]) : std::string_view{};
        };

        const std::string word(cell(word_col));
        if (word.empty()) {
            reject("empty word");
            continue;
        }
        if (seen.contains(word)) {
            reject("duplicate word '" + word + "'");
            continue;
        }

        std::vector<std::pair<const NormFeature*, WordRating>> parsed;
        std::string problem;
        for (const auto& fc : layout) {
            WordRating rating{word, 0.0, std::nullopt, std::nullopt};
            auto mean = parse_real(cell(fc.mean));
            if (!mean) {
                problem = "unparseable " + fc.feature->id() + " mean '" + std::string(cell(fc.mean)) + "'";
                break;
            }
            if (!fc.feature->scale().contains(*mean)) {
                problem = fc.feature->id() + " mean " + std::string(cell(fc.mean)) + " outside scale " +
                          std::to_string(fc.feature->scale().min()) + "-" +
                          std::to_string(fc.feature->scale().max());
                break;
            }
            rating.human_mean = *mean;
            if (fc.sd && !cell(*fc.sd).empty()) {
                auto sd = parse_real(cell(*fc.sd));
                if (!sd || *sd < 0.0) {
                    problem = "bad " + fc.feature->id() + " sd '" + std::string(cell(*fc.sd)) + "'";
                    break;
                }
                rating.human_sd = sd;
            }
            if (fc.n && !cell(*fc.n).empty()) {
                auto n = parse_count(cell(*fc.n));
                if (!n) {
                    problem = "bad " + fc.feature->id() + " rater count '" + std::string(cell(*fc.n)) + "'";
                    break;
                }
                rating.n_raters = n;
            }
            parsed.emplace_back(fc.feature, std::move(rating));
        }
        if (!problem.empty()) {
            reject(std::move(problem));
            continue;
        }

        seen.insert(word);
        for (auto& [feature, rating] : parsed) out.add(*feature, std::move(rating));
        ++report.rows_accepted;
    }
    return {std::move(out), std::move(report)};
}

std::pair<NormDataset, IngestReport> load_glasgow(const std::filesystem::path& path, const ColumnMapping& mapping,
                                                  const FeatureRegistry& registry) {
    return load_norms(Dataset::Glasgow, path, mapping, registry);
}

std::pair<NormDataset, IngestReport> load_lancaster(const std::filesystem::path& path, const ColumnMapping& mapping,
                                                    const FeatureRegistry& registry) {
    return load_norms(Dataset::Lancaster, path, mapping, registry);
}

std::vector<WordRating> sample_words(const NormDataset& dataset, std::string_view feature_id, std::size_t n,
                                     std::uint64_t seed) {
    const auto& words = dataset.feature(feature_id);
    if (n > words.size()) {
        throw Error(ErrorKind::NotEnoughWords, "requested " + std::to_string(n) + " words, feature '" +
                                                   std::string(feature_id) + "' has " +
                                                   std::to_string(words.size()));
    }
    // Selection sampling (Knuth, Algorithm S). Uniform draws are built directly
    // from engine bits because std distributions are not portable bit-for-bit.
    std::mt19937_64 engine(seed);
    auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

    std::vector<WordRating> out;
    out.reserve(n);
    std::size_t remaining = words.size();
    for (const auto& w : words) {
        if (out.size() == n) break;
        const std::size_t needed = n - out.size();
        if (static_cast<double>(remaining) * uniform() < static_cast<double>(needed)) out.push_back(w);
        --remaining;
    }
    return out;
}

void write_canonical(const NormDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::StorageError, "cannot write " + path.string());
    for (const auto& [feature, ratings] : dataset.ratings()) {
        for (const auto& r : ratings) {
            json line = {{"word", r.word}, {"feature", feature}, {"mean", r.human_mean}};
            line["sd"] = r.human_sd ? json(*r.human_sd) : json(nullptr);
            if (r.n_raters) line["n"] = *r.n_raters;
            out << line.dump() << '\n';
        }
    }
    if (!out) throw Error(ErrorKind::StorageError, "write failed on " + path.string());
}

NormDataset read_canonical(Dataset dataset, const std::filesystem::path& path, const FeatureRegistry& registry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileUnreadable, "cannot open " + path.string());
    NormDataset out(dataset);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        try {
            const auto j = json::parse(line);
            WordRating r{j.at("word").get<std::string>(), j.at("mean").get<double>(), std::nullopt, std::nullopt};
            if (j.contains("sd") && !j["sd"].is_null()) r.human_sd = j["sd"].get<double>();
            if (j.contains("n")) r.n_raters = j["n"].get<int>();
            out.add(registry.at(j.at("feature").get<std::string>()), std::move(r));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::StorageError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string to_json(const IngestReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) violations.push_back({{"row", v.row}, {"reason", v.reason}});
    json j = {{"rows_read", report.rows_read}, {"rows_accepted", report.rows_accepted}, {"violations", violations}};
    return j.dump(2) + "\n";
}

}  // namespace wordnorms
