#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wordnorms/client.hpp"
#include "wordnorms/norms.hpp"

namespace wordnorms {

/// Probability over scale points, renormalized to 1. `coverage_mass` keeps the
/// share of raw mass that landed on valid rating tokens.
struct ScaleDistribution {
    std::map<int, double> probabilities;
    double coverage_mass = 1.0;

    friend bool operator==(const ScaleDistribution&, const ScaleDistribution&) = default;
};

inline constexpr double kDefaultCoverageFloor = 0.25;

/// Maps first-token alternatives onto the scale. Tokens are whitespace-trimmed
/// and must parse as an in-scale integer; duplicates (`"7"`, `" 7"`) are summed.
/// Throws NoValidToken when nothing survives.
ScaleDistribution extract_scale_distribution(const TokenDistribution& raw, const RatingScale& scale);

/// Expected rating, sum of value * probability.
double weighted_estimate(const ScaleDistribution& distribution);

/// Most probable scale point; ties go to the lower value.
int argmax_estimate(const ScaleDistribution& distribution);

struct RatingEstimate {
    std::string word;
    std::string feature;
    std::string model;
    int argmax_value = 0;
    double weighted_value = 0.0;
    double coverage_mass = 0.0;

    [[nodiscard]] bool compliant(double floor = kDefaultCoverageFloor) const noexcept {
        return coverage_mass >= floor;
    }

    friend bool operator==(const RatingEstimate&, const RatingEstimate&) = default;
};

RatingEstimate estimate(const TokenDistribution& raw, const NormFeature& feature, std::string word,
                        std::string model);

/// JSONL, one estimate per line: word, feature, model, argmax, weighted, coverage_mass.
std::string to_json_line(const RatingEstimate& estimate);
RatingEstimate parse_estimate_line(std::string_view line);
void write_estimates(const std::vector<RatingEstimate>& estimates, const std::filesystem::path& path);
std::vector<RatingEstimate> read_estimates(const std::filesystem::path& path);

}  // namespace wordnorms
