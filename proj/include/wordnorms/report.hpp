#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wordnorms/metrics.hpp"

namespace wordnorms {

struct RadarSeries {
    std::string name;
    std::vector<Coefficient> values;  ///< one per axis; nullopt leaves a gap
    bool dashed = false;
};

struct RadarSpec {
    std::string title;
    std::vector<std::string> axes;
    std::vector<RadarSeries> series;
    double radial_min = -1.0;
    double radial_max = 1.0;
    double band_low = 0.8;
    double band_high = 1.0;
};

inline constexpr std::size_t kMinRadarAxes = 3;

/// Self-contained SVG document. Identical specs give byte-identical output.
/// Throws TooFewAxes below three axes.
std::string radar_chart(const RadarSpec& spec);

/// One axis per model (sorted by name) and the four coefficient series for a feature.
RadarSpec radar_for_feature(const std::vector<AlignmentResult>& results, Dataset dataset, std::string_view feature,
                            std::string_view title);

inline constexpr std::string_view kResultsHeader =
    "dataset,feature,model,n,n_dropped,n_low_coverage,pearson_raw,pearson_rounded,spearman_raw,spearman_rounded,"
    "divergence";

/// Rows sorted by (dataset, feature, model); undefined coefficients are empty cells.
std::string results_table(std::vector<AlignmentResult> results);
std::vector<AlignmentResult> parse_results_table(std::string_view text);

/// Feature ids whose human distributions pile up at the scale floor.
bool skew_prone(std::string_view feature) noexcept;

std::string divergence_report(const std::vector<AlignmentResult>& results, double threshold = 0.15);

}  // namespace wordnorms
