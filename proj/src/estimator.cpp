#include "wordnorms/estimator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "detail/text.hpp"
#include "wordnorms/error.hpp"

namespace wordnorms {

namespace {

using json = nlohmann::json;

std::optional<int> parse_rating_token(std::string_view token) {
    token = detail::trim(token);
    if (token.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

// Error-free transformations: the pair (sum, err) represents a + b exactly.
void two_sum(double a, double b, double& sum, double& err) {
    sum = a + b;
    const double bv = sum - a;
    err = (a - (sum - bv)) + (b - bv);
}

// Dot product evaluated as if in twice the working precision, then rounded once.
template <typename Pairs, typename Value, typename Weight>
double accurate_dot(const Pairs& pairs, Value value, Weight weight) {
    double sum = 0.0;
    double compensation = 0.0;
    for (const auto& entry : pairs) {
        const double v = value(entry);
        const double w = weight(entry);
        const double product = v * w;
        const double product_err = std::fma(v, w, -product);
        double s = 0.0;
        double sum_err = 0.0;
        two_sum(sum, product, s, sum_err);
        sum = s;
        compensation += sum_err + product_err;
    }
    return sum + compensation;
}

}  // namespace

ScaleDistribution extract_scale_distribution(const TokenDistribution& raw, const RatingScale& scale) {
    if (raw.entries.empty()) throw Error(ErrorKind::NoValidToken, "empty token distribution");

    ScaleDistribution out;
    for (const auto& [token, p] : raw.entries) {
        auto value = parse_rating_token(token);
        if (!value || *value < scale.min() || *value > scale.max()) continue;
        out.probabilities[*value] += p;
    }
    const double retained = accurate_dot(out.probabilities, [](const auto&) { return 1.0; },
                                         [](const auto& e) { return e.second; });
    if (!(retained > 0.0)) throw Error(ErrorKind::NoValidToken, "no alternative is a rating on the scale");

    if (retained != 1.0) {
        for (auto& [value, p] : out.probabilities) p /= retained;
    }
    out.coverage_mass = std::min(retained, 1.0);
    return out;
}

double weighted_estimate(const ScaleDistribution& distribution) {
    const auto& probs = distribution.probabilities;
    if (probs.empty()) throw Error(ErrorKind::InvalidDistribution, "empty scale distribution");
    const double value = accurate_dot(probs, [](const auto& e) { return static_cast<double>(e.first); },
                                      [](const auto& e) { return e.second; });
    // Keys are ordered, so the support is [front, back].
    return std::clamp(value, static_cast<double>(probs.begin()->first), static_cast<double>(probs.rbegin()->first));
}

int argmax_estimate(const ScaleDistribution& distribution) {
    const auto& probs = distribution.probabilities;
    if (probs.empty()) throw Error(ErrorKind::InvalidDistribution, "empty scale distribution");
    // max_element keeps the first maximum, and keys ascend.
    return std::max_element(probs.begin(), probs.end(),
                            [](const auto& a, const auto& b) { return a.second < b.second; })
        ->first;
}

RatingEstimate estimate(const TokenDistribution& raw, const NormFeature& feature, std::string word,
                        std::string model) {
    const auto d = extract_scale_distribution(raw, feature.scale());
    return RatingEstimate{std::move(word),      feature.id(),         std::move(model),
                          argmax_estimate(d), weighted_estimate(d), d.coverage_mass};
}

std::string to_json_line(const RatingEstimate& e) {
    const json j = {{"word", e.word},           {"feature", e.feature},
                    {"model", e.model},         {"argmax", e.argmax_value},
                    {"weighted", e.weighted_value}, {"coverage_mass", e.coverage_mass}};
    return j.dump();
}

RatingEstimate parse_estimate_line(std::string_view line) {
    try {
        const auto j = json::parse(line);
        return RatingEstimate{j.at("word").get<std::string>(),  j.at("feature").get<std::string>(),
                              j.at("model").get<std::string>(), j.at("argmax").get<int>(),
                              j.at("weighted").get<double>(),   j.at("coverage_mass").get<double>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::StorageError, std::string("malformed estimate record: ") + e.what());
    }
}

void write_estimates(const std::vector<RatingEstimate>& estimates, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::StorageError, "cannot write " + path.string());
    for (const auto& e : estimates) out << to_json_line(e) << '\n';
    if (!out) throw Error(ErrorKind::StorageError, "write failed on " + path.string());
}

std::vector<RatingEstimate> read_estimates(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileUnreadable, "cannot open " + path.string());
    std::vector<RatingEstimate> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!detail::trim(line).empty()) out.push_back(parse_estimate_line(line));
    }
    return out;
}

}  // namespace wordnorms
