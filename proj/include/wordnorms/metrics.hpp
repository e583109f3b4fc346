#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wordnorms/norms.hpp"

namespace wordnorms {

/// A correlation coefficient, or nullopt when undefined (n < 2 or a constant series).
using Coefficient = std::optional<double>;

Coefficient pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks (ties share the mean of their positions).
Coefficient spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values receive the average of the positions they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Nearest integer with halves away from zero, clamped to the scale when one is given.
std::vector<double> round_series(std::span<const double> values, const std::optional<RatingScale>& scale = {});

struct PairedSeries {
    std::vector<std::string> words;
    std::vector<double> human;
    std::vector<double> model;
};

enum class RoundingSide { Both, Human, Model };

std::string_view to_string(RoundingSide side) noexcept;
RoundingSide parse_rounding_side(std::string_view text);

struct MetricOptions {
    double divergence_threshold = 0.15;
    RoundingSide rounding = RoundingSide::Both;
};

struct AlignmentResult {
    Dataset dataset = Dataset::Glasgow;
    std::string feature;
    std::string model;
    std::size_t n_words = 0;
    std::size_t n_dropped = 0;       ///< pairs without a usable estimate
    std::size_t n_low_coverage = 0;  ///< retained pairs below the coverage floor
    Coefficient pearson_raw;
    Coefficient pearson_rounded;
    Coefficient spearman_raw;
    Coefficient spearman_rounded;
    bool divergence_flag = false;

    friend bool operator==(const AlignmentResult&, const AlignmentResult&) = default;
};

inline constexpr std::size_t kMinAlignmentPairs = 3;

/// The four coefficients (Pearson/Spearman on raw and on rounded series).
/// Flags divergence when |pearson_raw - spearman_raw| exceeds the threshold.
/// Throws TooFewPairs below three pairs and LengthMismatch on ragged input.
AlignmentResult alignment_matrix(const PairedSeries& series, const RatingScale& scale,
                                 const MetricOptions& options = {});

}  // namespace wordnorms
