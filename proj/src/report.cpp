#include "wordnorms/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "detail/text.hpp"
#include "wordnorms/error.hpp"
#include "wordnorms/ingest.hpp"

namespace wordnorms {

namespace {

constexpr double kWidth = 780.0;
constexpr double kHeight = 640.0;
constexpr double kCenterX = 310.0;
constexpr double kCenterY = 340.0;
constexpr double kRadius = 230.0;
constexpr std::string_view kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Point {
    double x;
    double y;
};

class RadarGeometry {
public:
    RadarGeometry(const RadarSpec& spec) : spec_(spec), n_(spec.axes.size()) {}

    [[nodiscard]] double angle(std::size_t axis) const {
        return -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(axis) / static_cast<double>(n_);
    }

    [[nodiscard]] Point at(std::size_t axis, double value) const {
        const double clipped = std::clamp(value, spec_.radial_min, spec_.radial_max);
        const double r = kRadius * (clipped - spec_.radial_min) / (spec_.radial_max - spec_.radial_min);
        return {kCenterX + r * std::cos(angle(axis)), kCenterY + r * std::sin(angle(axis))};
    }

    [[nodiscard]] std::string ring(double value) const {
        std::string d;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto p = at(i, value);
            d += fmt::format("{}{:.2f},{:.2f} ", i == 0 ? "M" : "L", p.x, p.y);
        }
        d += "Z";
        return d;
    }

private:
    const RadarSpec& spec_;
    std::size_t n_;
};

std::string format_coefficient(const Coefficient& c) { return c ? fmt::format("{}", *c) : std::string(); }

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

Coefficient parse_coefficient(std::string_view cell) {
    cell = detail::trim(cell);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::StorageError, "bad coefficient '" + std::string(cell) + "'");
    }
    return value;
}

std::size_t parse_size(std::string_view cell) {
    cell = detail::trim(cell);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::StorageError, "bad count '" + std::string(cell) + "'");
    }
    return value;
}

auto sort_key(const AlignmentResult& r) { return std::tuple(to_string(r.dataset), r.feature, r.model); }

std::string coefficient_text(const Coefficient& c) { return c ? fmt::format("{:.3f}", *c) : "undefined"; }

std::string delta_text(const Coefficient& a, const Coefficient& b) {
    return a && b ? fmt::format("{:+.3f}", *a - *b) : "n/a";
}

}  // namespace

std::string radar_chart(const RadarSpec& spec) {
    if (spec.axes.size() < kMinRadarAxes) {
        throw Error(ErrorKind::TooFewAxes,
                    fmt::format("radar chart needs at least {} axes, got {}", kMinRadarAxes, spec.axes.size()));
    }
    if (!(spec.radial_min < spec.radial_max)) throw Error(ErrorKind::InvalidArgument, "empty radial range");
    for (const auto& s : spec.series) {
        if (s.values.size() != spec.axes.size()) {
            throw Error(ErrorKind::InvalidArgument, "series '" + s.name + "' does not have one value per axis");
        }
    }

    const RadarGeometry geo(spec);
    const std::size_t n = spec.axes.size();
    std::string svg;
    auto out = std::back_inserter(svg);

    fmt::format_to(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    fmt::format_to(out,
                   "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
                   "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"Helvetica, Arial, sans-serif\" "
                   "font-size=\"12\">\n",
                   kWidth, kHeight);
    fmt::format_to(out, "<title>{}</title>\n", xml_escape(spec.title));
    fmt::format_to(out, "<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", kWidth, kHeight);
    fmt::format_to(out, "<text x=\"{:.2f}\" y=\"40.00\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n",
                   kCenterX, xml_escape(spec.title));

    fmt::format_to(out,
                   "<path class=\"band\" d=\"{} {}\" fill=\"#c7e9c0\" fill-opacity=\"0.6\" fill-rule=\"evenodd\" "
                   "stroke=\"none\"/>\n",
                   geo.ring(spec.band_high), geo.ring(spec.band_low));

    fmt::format_to(out, "<g class=\"grid\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.8\">\n");
    const double step = (spec.radial_max - spec.radial_min) / 4.0;
    for (int k = 1; k <= 4; ++k) {
        fmt::format_to(out, "<path class=\"ring\" d=\"{}\"/>\n", geo.ring(spec.radial_min + step * k));
    }
    fmt::format_to(out, "</g>\n");

    fmt::format_to(out, "<g class=\"ring-labels\" fill=\"#777777\" font-size=\"10\">\n");
    for (int k = 0; k <= 4; ++k) {
        const double value = spec.radial_min + step * k;
        const auto p = geo.at(0, value);
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\">{:.1f}</text>\n", p.x + 4.0, p.y - 2.0,
                       value == 0.0 ? 0.0 : value);
    }
    fmt::format_to(out, "</g>\n");

    fmt::format_to(out, "<g class=\"axes\" stroke=\"#888888\" stroke-width=\"0.8\">\n");
    for (std::size_t i = 0; i < n; ++i) {
        const auto tip = geo.at(i, spec.radial_max);
        fmt::format_to(out, "<line class=\"spoke\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n",
                       kCenterX, kCenterY, tip.x, tip.y);
    }
    fmt::format_to(out, "</g>\n");

    fmt::format_to(out, "<g class=\"axis-labels\" fill=\"#222222\">\n");
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(geo.angle(i));
        const double s = std::sin(geo.angle(i));
        const double x = kCenterX + (kRadius + 16.0) * c;
        const double y = kCenterY + (kRadius + 16.0) * s + 4.0;
        const std::string_view anchor = c > 0.2 ? "start" : (c < -0.2 ? "end" : "middle");
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"{}\">{}</text>\n", x,
                       y + (s > 0.9 ? 8.0 : 0.0), anchor, xml_escape(spec.axes[i]));
    }
    fmt::format_to(out, "</g>\n");

    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& series = spec.series[si];
        const auto color = kColors[si % std::size(kColors)];
        const bool complete = std::all_of(series.values.begin(), series.values.end(),
                                          [](const Coefficient& c) { return c.has_value(); });

        std::string values;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) values += ' ';
            values += series.values[i] ? fmt::format("{:.4f}", *series.values[i]) : "NA";
        }

        std::string d;
        if (complete) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto p = geo.at(i, *series.values[i]);
                d += fmt::format("{}{:.2f},{:.2f} ", i == 0 ? "M" : "L", p.x, p.y);
            }
            d += "Z";
        } else {
            // Undefined values break the outline; only adjacent defined spokes are joined.
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = (i + 1) % n;
                if (!series.values[i] || !series.values[j]) continue;
                const auto a = geo.at(i, *series.values[i]);
                const auto b = geo.at(j, *series.values[j]);
                if (!d.empty()) d += ' ';
                d += fmt::format("M{:.2f},{:.2f} L{:.2f},{:.2f}", a.x, a.y, b.x, b.y);
            }
        }

        fmt::format_to(out, "<g class=\"series\" data-name=\"{}\" data-values=\"{}\">\n", xml_escape(series.name),
                       values);
        fmt::format_to(out,
                       "<path class=\"series-line\" d=\"{}\" fill=\"{}\" fill-opacity=\"{}\" stroke=\"{}\" "
                       "stroke-width=\"2\"{}/>\n",
                       d, complete ? color : "none", complete ? "0.08" : "0", color,
                       series.dashed ? " stroke-dasharray=\"6 4\"" : "");
        for (std::size_t i = 0; i < n; ++i) {
            if (!series.values[i]) continue;
            const auto p = geo.at(i, *series.values[i]);
            fmt::format_to(out, "<circle class=\"marker\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", p.x,
                           p.y, color);
        }
        fmt::format_to(out, "</g>\n");
    }

    fmt::format_to(out, "<g class=\"legend\">\n");
    const double legend_x = kCenterX + kRadius + 110.0;
    for (std::size_t si = 0; si < spec.series.size(); ++si) {
        const auto& series = spec.series[si];
        const double y = 90.0 + 22.0 * static_cast<double>(si);
        fmt::format_to(out,
                       "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"2\"{}/>\n",
                       legend_x, y, legend_x + 24.0, y, kColors[si % std::size(kColors)],
                       series.dashed ? " stroke-dasharray=\"6 4\"" : "");
        fmt::format_to(out, "<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", legend_x + 30.0, y + 4.0,
                       xml_escape(series.name));
    }
    const double band_y = 90.0 + 22.0 * static_cast<double>(spec.series.size());
    fmt::format_to(out,
                   "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"24\" height=\"10\" fill=\"#c7e9c0\"/>\n"
                   "<text x=\"{:.2f}\" y=\"{:.2f}\">target band {:.1f} to {:.1f}</text>\n",
                   legend_x, band_y - 5.0, legend_x + 30.0, band_y + 4.0, spec.band_low, spec.band_high);
    fmt::format_to(out, "</g>\n</svg>\n");
    return svg;
}

RadarSpec radar_for_feature(const std::vector<AlignmentResult>& results, Dataset dataset, std::string_view feature,
                            std::string_view title) {
    std::vector<const AlignmentResult*> rows;
    for (const auto& r : results) {
        if (r.dataset == dataset && r.feature == feature) rows.push_back(&r);
    }
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) { return a->model < b->model; });

    RadarSpec spec;
    spec.title = std::string(title);
    spec.series = {{"Pearson", {}, false},
                   {"Pearson (rounded)", {}, true},
                   {"Spearman", {}, false},
                   {"Spearman (rounded)", {}, true}};
    for (const auto* r : rows) {
        spec.axes.push_back(r->model);
        spec.series[0].values.push_back(r->pearson_raw);
        spec.series[1].values.push_back(r->pearson_rounded);
        spec.series[2].values.push_back(r->spearman_raw);
        spec.series[3].values.push_back(r->spearman_rounded);
    }
    return spec;
}

std::string results_table(std::vector<AlignmentResult> results) {
    std::stable_sort(results.begin(), results.end(),
                     [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });
    std::string out(kResultsHeader);
    out += '\n';
    for (const auto& r : results) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.dataset), csv_field(r.feature),
                           csv_field(r.model), r.n_words, r.n_dropped, r.n_low_coverage,
                           format_coefficient(r.pearson_raw), format_coefficient(r.pearson_rounded),
                           format_coefficient(r.spearman_raw), format_coefficient(r.spearman_rounded),
                           r.divergence_flag ? "true" : "false");
    }
    return out;
}

std::vector<AlignmentResult> parse_results_table(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorKind::StorageError, "results table has no header");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != kResultsHeader) throw Error(ErrorKind::StorageError, "unexpected results header: " + header);

    std::vector<AlignmentResult> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() == 1 && detail::trim(row[0]).empty()) continue;
        if (row.size() != 11) {
            throw Error(ErrorKind::StorageError, fmt::format("results row {} has {} cells", i, row.size()));
        }
        AlignmentResult r;
        r.dataset = parse_dataset(row[0]);
        r.feature = row[1];
        r.model = row[2];
        r.n_words = parse_size(row[3]);
        r.n_dropped = parse_size(row[4]);
        r.n_low_coverage = parse_size(row[5]);
        r.pearson_raw = parse_coefficient(row[6]);
        r.pearson_rounded = parse_coefficient(row[7]);
        r.spearman_raw = parse_coefficient(row[8]);
        r.spearman_rounded = parse_coefficient(row[9]);
        if (row[10] != "true" && row[10] != "false") {
            throw Error(ErrorKind::StorageError, "bad divergence flag '" + row[10] + "'");
        }
        r.divergence_flag = row[10] == "true";
        out.push_back(std::move(r));
    }
    return out;
}

bool skew_prone(std::string_view feature) noexcept { return feature == "gustatory" || feature == "olfactory"; }

std::string divergence_report(const std::vector<AlignmentResult>& results, double threshold) {
    std::vector<AlignmentResult> sorted = results;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return sort_key(a) < sort_key(b); });

    std::vector<const AlignmentResult*> flagged;
    std::vector<const AlignmentResult*> flagged_skewed;
    for (const auto& r : sorted) {
        if (!r.divergence_flag) continue;
        (skew_prone(r.feature) ? flagged_skewed : flagged).push_back(&r);
    }

    std::string out;
    auto it = std::back_inserter(out);
    fmt::format_to(it, "Pearson/Spearman divergence report\n");
    fmt::format_to(it, "criterion: |pearson_raw - spearman_raw| > {}\n", threshold);
    fmt::format_to(it, "pairs checked: {}, flagged: {}\n\n", sorted.size(), flagged.size() + flagged_skewed.size());

    auto line = [&](const AlignmentResult& r) {
        fmt::format_to(it,
                       "  {}/{} {}: pearson_raw={} spearman_raw={} delta={:.3f} | raw-rounded: pearson={} "
                       "spearman={} | n={}\n",
                       to_string(r.dataset), r.feature, r.model, coefficient_text(r.pearson_raw),
                       coefficient_text(r.spearman_raw), std::abs(*r.pearson_raw - *r.spearman_raw),
                       delta_text(r.pearson_raw, r.pearson_rounded), delta_text(r.spearman_raw, r.spearman_rounded),
                       r.n_words);
    };

    if (flagged.empty() && flagged_skewed.empty()) {
        fmt::format_to(it, "no divergences\n");
    } else {
        if (!flagged.empty()) {
            fmt::format_to(it, "Flagged pairs:\n");
            for (const auto* r : flagged) line(*r);
        }
        if (!flagged_skewed.empty()) {
            if (!flagged.empty()) fmt::format_to(it, "\n");
            fmt::format_to(it,
                           "Skew-prone features (gustatory, olfactory): most human ratings sit at the scale floor, "
                           "so Pearson follows the few high-rated words while Spearman follows small differences "
                           "near the mode.\n");
            for (const auto* r : flagged_skewed) line(*r);
        }
    }

    std::vector<const AlignmentResult*> notes;
    for (const auto& r : sorted) {
        if (r.n_dropped > 0 || r.n_low_coverage > 0 || !r.pearson_raw || !r.spearman_raw) notes.push_back(&r);
    }
    if (!notes.empty()) {
        fmt::format_to(it, "\nData notes:\n");
        for (const auto* r : notes) {
            fmt::format_to(it, "  {}/{} {}: n={} dropped={} low_coverage={}{}\n", to_string(r->dataset),
                           r->feature, r->model, r->n_words, r->n_dropped, r->n_low_coverage,
                           (!r->pearson_raw || !r->spearman_raw) ? " (undefined coefficients)" : "");
        }
    }
    return out;
}

}  // namespace wordnorms
