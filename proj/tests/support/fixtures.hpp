#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace wordnorms::testing {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "wordnorms-XXXXXX").string();
        if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Glasgow feature order in the synthetic tables: arousal, valence, dominance,
// concreteness, imageability, familiarity, gender.
struct GlasgowRow {
    std::string word;
    std::array<double, 7> means;
};

struct LancasterRow {
    std::string word;
    std::array<double, 6> means;  // interoceptive, gustatory, olfactory, haptic, auditory, visual
};

inline constexpr std::array<const char*, 7> kGlasgowCodes = {"AROU", "VAL", "DOM", "CNC", "IMAG", "FAM", "GEND"};
inline constexpr std::array<const char*, 6> kLancasterNames = {"Interoceptive", "Gustatory", "Olfactory",
                                                               "Haptic",        "Auditory",  "Visual"};

/// Two header rows (code over M/SD/N), laid out like the published spreadsheet.
inline std::string glasgow_csv(const std::vector<GlasgowRow>& rows) {
    std::string top = "Words,Length";
    std::string bottom = ",";
    for (const auto* code : kGlasgowCodes) {
        top += fmt::format(",{},,", code);
        bottom += ",M,SD,N";
    }
    std::string out = top + "\n" + bottom + "\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{}", r.word, r.word.size());
        for (double m : r.means) out += fmt::format(",{:.3f},1.000,30", m);
        out += "\n";
    }
    return out;
}

/// Includes body-part columns, which ingest must ignore.
inline std::string lancaster_csv(const std::vector<LancasterRow>& rows) {
    std::string out = "Word";
    for (const auto* name : kLancasterNames) out += fmt::format(",{}.mean", name);
    out += ",Foot_leg.mean,Hand_arm.mean,Head.mean,Mouth.mean,Torso.mean";
    for (const auto* name : kLancasterNames) out += fmt::format(",{}.SD", name);
    out += "\n";
    for (const auto& r : rows) {
        out += r.word;
        for (double m : r.means) out += fmt::format(",{:.3f}", m);
        out += ",1.0,2.0,3.0,4.0,0.5";
        for (std::size_t i = 0; i < r.means.size(); ++i) out += ",1.1";
        out += "\n";
    }
    return out;
}

inline std::vector<GlasgowRow> synthetic_glasgow(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> nine(1.0, 9.0);
    std::uniform_real_distribution<double> seven(1.0, 7.0);
    std::vector<GlasgowRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        GlasgowRow r{fmt::format("word{:04}", i), {}};
        for (std::size_t f = 0; f < 6; ++f) r.means[f] = nine(rng);
        r.means[6] = seven(rng);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<LancasterRow> synthetic_lancaster(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> five(0.0, 5.0);
    std::vector<LancasterRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        LancasterRow r{fmt::format("WORD{:04}", i), {}};
        for (auto& m : r.means) m = five(rng);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace wordnorms::testing
