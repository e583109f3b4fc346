#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wordnorms {

enum class Dataset { Glasgow, Lancaster };

std::string_view to_string(Dataset dataset) noexcept;
Dataset parse_dataset(std::string_view text);

/// Integer Likert range. Every point is a single decimal digit so that a rating
/// can be read off one generated token.
class RatingScale {
public:
    RatingScale(int min, int max);

    [[nodiscard]] int min() const noexcept { return min_; }
    [[nodiscard]] int max() const noexcept { return max_; }
    [[nodiscard]] int points() const noexcept { return max_ - min_ + 1; }
    [[nodiscard]] bool contains(double value) const noexcept { return value >= min_ && value <= max_; }

    friend bool operator==(const RatingScale&, const RatingScale&) = default;

private:
    int min_;
    int max_;
};

enum class QuoteStyle { Typographic, Straight };

inline constexpr std::string_view kWordPlaceholder = "{word}";
inline constexpr std::string_view kAnswerInstruction = "Please answer only with the number.";

/// One rated word property. Construction validates the template.
class NormFeature {
public:
    NormFeature(std::string id, Dataset dataset, RatingScale scale, std::string prompt_template,
                std::string display_name);

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] Dataset dataset() const noexcept { return dataset_; }
    [[nodiscard]] const RatingScale& scale() const noexcept { return scale_; }
    [[nodiscard]] const std::string& prompt_template() const noexcept { return template_; }
    [[nodiscard]] const std::string& display_name() const noexcept { return display_name_; }

    friend bool operator==(const NormFeature&, const NormFeature&) = default;

private:
    std::string id_;
    Dataset dataset_;
    RatingScale scale_;
    std::string template_;
    std::string display_name_;
};

struct WordRating {
    std::string word;
    double human_mean = 0.0;
    std::optional<double> human_sd;
    std::optional<int> n_raters;

    friend bool operator==(const WordRating&, const WordRating&) = default;
};

/// Human ratings for one dataset, keyed by feature id. Word lists keep file order.
class NormDataset {
public:
    explicit NormDataset(Dataset id) : id_(id) {}

    [[nodiscard]] Dataset id() const noexcept { return id_; }
    [[nodiscard]] const std::map<std::string, std::vector<WordRating>>& ratings() const noexcept {
        return ratings_;
    }
    [[nodiscard]] const std::vector<WordRating>& feature(std::string_view feature_id) const;
    [[nodiscard]] bool contains(std::string_view feature_id, std::string_view word) const;

    /// Adds an empty list for a registered feature; no-op when already present.
    void add_feature(const NormFeature& feature);
    /// Throws on duplicate word, out-of-scale mean, or a feature not registered for this dataset.
    void add(const NormFeature& feature, WordRating rating);

    friend bool operator==(const NormDataset&, const NormDataset&) = default;

private:
    Dataset id_;
    std::map<std::string, std::vector<WordRating>> ratings_;
    std::map<std::string, std::map<std::string, std::size_t, std::less<>>, std::less<>> index_;
};

/// The feature set used by a run: the built-in thirteen norms, optionally
/// extended or replaced entry-by-entry from a key-value file.
class FeatureRegistry {
public:
    FeatureRegistry() = default;
    explicit FeatureRegistry(std::vector<NormFeature> features);

    [[nodiscard]] const std::vector<NormFeature>& features() const noexcept { return features_; }
    [[nodiscard]] const NormFeature& at(std::string_view id) const;
    [[nodiscard]] const NormFeature* find(std::string_view id) const noexcept;
    [[nodiscard]] std::vector<NormFeature> for_dataset(Dataset dataset) const;

    /// Replaces a feature with the same id, otherwise appends.
    void upsert(NormFeature feature);

private:
    std::vector<NormFeature> features_;
};

/// The thirteen in-scope norms: seven Glasgow features and six Lancaster modalities.
std::vector<NormFeature> feature_registry();

/// Built-in registry with entries from an INI file applied on top. Each
/// `[feature:<id>]` section carries `dataset`, `min`, `max`, `template`
/// and optionally `display_name`.
FeatureRegistry load_registry(const std::optional<std::filesystem::path>& override_file);

std::string render_prompt(const NormFeature& feature, std::string_view word,
                          QuoteStyle quotes = QuoteStyle::Typographic);

}  // namespace wordnorms
