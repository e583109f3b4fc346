#include "wordnorms/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/text.hpp"
#include "wordnorms/error.hpp"

namespace wordnorms {

namespace {

void require_same_length(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "series lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    }
}

// Exact test; a computed variance of a constant series is not always zero.
bool constant(std::span<const double> values) {
    return std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end();
}

double mean(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

Coefficient pearson(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    if (x.size() < 2 || constant(x) || constant(y)) return std::nullopt;

    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(values.size());
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
        // Positions start+1 .. end share their mean.
        const double rank = static_cast<double>(start + 1 + end) / 2.0;
        for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
        start = end;
    }
    return ranks;
}

Coefficient spearman(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<double> round_series(std::span<const double> values, const std::optional<RatingScale>& scale) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        double r = std::round(v);  // halves away from zero
        if (scale) r = std::clamp(r, static_cast<double>(scale->min()), static_cast<double>(scale->max()));
        out.push_back(r);
    }
    return out;
}

std::string_view to_string(RoundingSide side) noexcept {
    switch (side) {
        case RoundingSide::Both: return "both";
        case RoundingSide::Human: return "human";
        case RoundingSide::Model: return "model";
    }
    return "both";
}

RoundingSide parse_rounding_side(std::string_view text) {
    text = detail::trim(text);
    if (text == "both") return RoundingSide::Both;
    if (text == "human") return RoundingSide::Human;
    if (text == "model") return RoundingSide::Model;
    throw Error(ErrorKind::ConfigError, "rounding must be both, human or model");
}

AlignmentResult alignment_matrix(const PairedSeries& series, const RatingScale& scale,
                                 const MetricOptions& options) {
    require_same_length(series.human, series.model);
    if (!series.words.empty() && series.words.size() != series.human.size()) {
        throw Error(ErrorKind::LengthMismatch, "word list does not match series length");
    }
    if (series.human.size() < kMinAlignmentPairs) {
        throw Error(ErrorKind::TooFewPairs, std::to_string(series.human.size()) + " pairs, need at least " +
                                                std::to_string(kMinAlignmentPairs));
    }

    const bool round_human = options.rounding != RoundingSide::Model;
    const bool round_model = options.rounding != RoundingSide::Human;
    const auto human_rounded = round_human ? round_series(series.human, scale) : series.human;
    const auto model_rounded = round_model ? round_series(series.model, scale) : series.model;

    AlignmentResult r;
    r.n_words = series.human.size();
    r.pearson_raw = pearson(series.human, series.model);
    r.spearman_raw = spearman(series.human, series.model);
    r.pearson_rounded = pearson(human_rounded, model_rounded);
    r.spearman_rounded = spearman(human_rounded, model_rounded);
    r.divergence_flag = r.pearson_raw && r.spearman_raw &&
                        std::abs(*r.pearson_raw - *r.spearman_raw) > options.divergence_threshold;
    return r;
}

}  // namespace wordnorms
