#include "wordnorms/norms.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>

#include "detail/ini.hpp"
#include "detail/text.hpp"
#include "wordnorms/error.hpp"

namespace wordnorms {

std::string_view to_string(Dataset dataset) noexcept {
    return dataset == Dataset::Glasgow ? "glasgow" : "lancaster";
}

Dataset parse_dataset(std::string_view text) {
    text = detail::trim(text);
    if (text == "glasgow") return Dataset::Glasgow;
    if (text == "lancaster") return Dataset::Lancaster;
    throw Error(ErrorKind::InvalidArgument, "unknown dataset '" + std::string(text) + "'");
}

RatingScale::RatingScale(int min, int max) : min_(min), max_(max) {
    if (min < 0 || max > 9 || min >= max) {
        throw Error(ErrorKind::InvalidScale,
                    "scale " + std::to_string(min) + "-" + std::to_string(max) +
                        " must satisfy 0 <= min < max <= 9");
    }
}

NormFeature::NormFeature(std::string id, Dataset dataset, RatingScale scale, std::string prompt_template,
                         std::string display_name)
    : id_(std::move(id)),
      dataset_(dataset),
      scale_(scale),
      template_(std::move(prompt_template)),
      display_name_(std::move(display_name)) {
    if (detail::trim(id_).empty() || detail::trim(id_) != id_) {
        throw Error(ErrorKind::InvalidArgument, "feature id must be non-empty and trimmed");
    }
    if (detail::count_occurrences(template_, kWordPlaceholder) != 1) {
        throw Error(ErrorKind::InvalidTemplate,
                    "template for '" + id_ + "' must contain exactly one " + std::string(kWordPlaceholder));
    }
    if (template_.find(kAnswerInstruction) == std::string::npos) {
        throw Error(ErrorKind::InvalidTemplate,
                    "template for '" + id_ + "' must contain \"" + std::string(kAnswerInstruction) + "\"");
    }
    if (display_name_.empty()) display_name_ = id_;
}

const std::vector<WordRating>& NormDataset::feature(std::string_view feature_id) const {
    auto it = ratings_.find(std::string(feature_id));
    if (it == ratings_.end()) {
        throw Error(ErrorKind::UnknownFeature, "dataset " + std::string(to_string(id_)) + " has no feature '" +
                                                   std::string(feature_id) + "'");
    }
    return it->second;
}

bool NormDataset::contains(std::string_view feature_id, std::string_view word) const {
    auto it = index_.find(feature_id);
    return it != index_.end() && it->second.find(word) != it->second.end();
}

void NormDataset::add_feature(const NormFeature& feature) {
    if (feature.dataset() != id_) {
        throw Error(ErrorKind::UnknownFeature,
                    "feature '" + feature.id() + "' is not registered for " + std::string(to_string(id_)));
    }
    ratings_.try_emplace(feature.id());
    index_.try_emplace(feature.id());
}

void NormDataset::add(const NormFeature& feature, WordRating rating) {
    add_feature(feature);
    if (rating.word.empty() || detail::trim(rating.word) != rating.word) {
        throw Error(ErrorKind::EmptyWord, "word must be non-empty and trimmed");
    }
    if (!feature.scale().contains(rating.human_mean)) {
        throw Error(ErrorKind::InvalidArgument, "mean for '" + rating.word + "' outside scale of " + feature.id());
    }
    if (rating.human_sd && !(*rating.human_sd >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "negative sd for '" + rating.word + "'");
    }
    if (rating.n_raters && *rating.n_raters <= 0) {
        throw Error(ErrorKind::InvalidArgument, "non-positive rater count for '" + rating.word + "'");
    }
    auto& list = ratings_[feature.id()];
    auto& index = index_[feature.id()];
    if (!index.emplace(rating.word, list.size()).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate word '" + rating.word + "' in " + feature.id());
    }
    list.push_back(std::move(rating));
}

FeatureRegistry::FeatureRegistry(std::vector<NormFeature> features) {
    for (auto& f : features) upsert(std::move(f));
}

const NormFeature* FeatureRegistry::find(std::string_view id) const noexcept {
    auto it = std::find_if(features_.begin(), features_.end(), [&](const NormFeature& f) { return f.id() == id; });
    return it == features_.end() ? nullptr : &*it;
}

const NormFeature& FeatureRegistry::at(std::string_view id) const {
    if (const auto* f = find(id)) return *f;
    throw Error(ErrorKind::UnknownFeature, "no registered feature '" + std::string(id) + "'");
}

std::vector<NormFeature> FeatureRegistry::for_dataset(Dataset dataset) const {
    std::vector<NormFeature> out;
    std::copy_if(features_.begin(), features_.end(), std::back_inserter(out),
                 [&](const NormFeature& f) { return f.dataset() == dataset; });
    return out;
}

void FeatureRegistry::upsert(NormFeature feature) {
    auto it = std::find_if(features_.begin(), features_.end(),
                           [&](const NormFeature& f) { return f.id() == feature.id(); });
    if (it != features_.end()) {
        *it = std::move(feature);
    } else {
        features_.push_back(std::move(feature));
    }
}

namespace {

// Lancaster instructions are shared; only the sense phrase differs.
std::string lancaster_template(std::string_view sense_phrase) {
    return "You will be asked to rate how much you experience everyday concepts using perceptual senses. "
           "There are no right or wrong answers so please use your own judgement. "
           "The rating scale runs from 0 (not experienced at all with that sense) to 5 "
           "(experienced greatly with that sense). Please answer only with the number. "
           "To what extent do you experience " +
           std::string(sense_phrase) + " word {word}";
}

}  // namespace

std::vector<NormFeature> feature_registry() {
    const RatingScale nine{1, 9};
    const RatingScale seven{1, 7};
    const RatingScale lancaster{0, 5};
    std::vector<NormFeature> features;
    features.reserve(13);

    features.emplace_back(
        "arousal", Dataset::Glasgow, nine,
        "Arousal is a measure of excitement versus calmness. A word is AROUSING if it makes you feel stimulated, "
        "excited, frenzied, jittery, or wide-awake. A word is UNAROUSING if it makes you feel relaxed, calm, "
        "sluggish, dull, or sleepy. Please indicate how arousing you think word {word} is on a scale of 1 "
        "(VERY UNAROUSING) to 9 (VERY AROUSING), with the midpoint representing moderate arousal. "
        "Please answer only with the number.",
        "Arousal");
    features.emplace_back(
        "valence", Dataset::Glasgow, nine,
        "Valence is a measure of value or worth. A word is POSITIVE if it represents something considered good, "
        "whereas a word is NEGATIVE if it represents something considered bad. Please indicate the valence of "
        "word {word} on a scale of 1 (VERY NEGATIVE) to 9 (VERY POSITIVE), with the midpoint representing "
        "NEUTRAL. Please answer only with the number.",
        "Valence");
    features.emplace_back(
        "dominance", Dataset::Glasgow, nine,
        "Dominance is a measure of the degree of control you feel. A word can make you feel DOMINANT, "
        "influential, important, autonomous, or in control. Alternatively, a word can make you feel CONTROLLED, "
        "influenced, cared-for, submissive, or guided. Please indicate how you feel about word {word} on a "
        "scale of 1 (VERY CONTROLLED) to 9 (VERY DOMINANT), with the midpoint being neither in control nor "
        "controlled. Please answer only with the number.",
        "Dominance");
    features.emplace_back(
        "concreteness", Dataset::Glasgow, nine,
        "Concreteness is a measure of how concrete or abstract something is. A word is CONCRETE if it represents "
        "something that exists in a definite physical form in the real world. In contrast, a word is ABSTRACT "
        "if it represents more of a concept or idea. Please indicate how concrete you think word {word} is on "
        "a scale of 1 (VERY ABSTRACT) to 9 (VERY CONCRETE), with the midpoint being neither especially abstract "
        "nor concrete. Please answer only with the number.",
        "Concreteness");
    features.emplace_back(
        "imageability", Dataset::Glasgow, nine,
        "Imageability is a measure of how easy or difficult something is to imagine. Some words refer to things "
        "or concepts that are very easy to imagine (HIGH IMAGEABILITY), whilst others are very difficult to "
        "imagine (LOW IMAGEABILITY). Please indicate how imageable you think word {word} is on a scale of 1 "
        "(VERY LOW IMAGEABILITY) to 9 (VERY HIGH IMAGEABILITY), with the midpoint being moderate imageability. "
        "Please answer only with the number.",
        "Imageability");
    features.emplace_back(
        "familiarity", Dataset::Glasgow, nine,
        "Familiarity is a measure of how familiar something is. A word is very FAMILIAR if you see, hear or use "
        "it often and it is easily recognisable. In contrast, a word is very UNFAMILIAR if you rarely see, hear "
        "or use it and it is relatively unrecognisable. Please indicate how familiar you think word {word} is "
        "on a scale of 1 (VERY UNFAMILIAR) to 9 (VERY FAMILIAR), with the midpoint representing moderate "
        "familiarity. Please answer only with the number.",
        "Familiarity");
    features.emplace_back(
        "gender", Dataset::Glasgow, seven,
        "The gender of a word is determined by how strongly its meaning is associated with male or female "
        "behaviour. A word can be considered MASCULINE if it is linked to male behaviour. Alternatively, a word "
        "can be considered FEMININE if it is linked to female behaviour. Please indicate the gender associated "
        "with word {word} on a scale of 1 (VERY FEMININE) to 7 (VERY MASCULINE), with the midpoint being "
        "neuter (neither feminine nor masculine). Please answer only with the number.",
        "Gender");

    features.emplace_back("interoceptive", Dataset::Lancaster, lancaster,
                          lancaster_template("by sensations inside your body"), "Interoceptive");
    features.emplace_back("gustatory", Dataset::Lancaster, lancaster, lancaster_template("by tasting"),
                          "Gustatory");
    features.emplace_back("olfactory", Dataset::Lancaster, lancaster, lancaster_template("by smelling"),
                          "Olfactory");
    features.emplace_back("haptic", Dataset::Lancaster, lancaster, lancaster_template("by feeling through touch"),
                          "Haptic");
    features.emplace_back("auditory", Dataset::Lancaster, lancaster, lancaster_template("by hearing"), "Auditory");
    features.emplace_back("visual", Dataset::Lancaster, lancaster, lancaster_template("by seeing"), "Visual");
    return features;
}

FeatureRegistry load_registry(const std::optional<std::filesystem::path>& override_file) {
    FeatureRegistry registry(feature_registry());
    if (!override_file) return registry;

    std::ifstream in(*override_file, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + override_file->string());
    std::ostringstream text;
    text << in.rdbuf();
    const auto tree = detail::parse_ini(text.str());
    constexpr std::string_view prefix = "feature:";
    for (const auto& [section, body] : tree) {
        if (!section.starts_with(prefix)) continue;
        const std::string id = section.substr(prefix.size());
        try {
            registry.upsert(NormFeature(id, parse_dataset(body.get<std::string>("dataset")),
                                        RatingScale(body.get<int>("min"), body.get<int>("max")),
                                        body.get<std::string>("template"), body.get<std::string>("display_name", id)));
        } catch (const boost::property_tree::ptree_error& e) {
            throw Error(ErrorKind::ConfigError, "section [" + section + "]: " + e.what());
        }
    }
    return registry;
}

std::string render_prompt(const NormFeature& feature, std::string_view word, QuoteStyle quotes) {
    word = detail::trim(word);
    if (word.empty()) throw Error(ErrorKind::EmptyWord, "cannot render a prompt for a blank word");

    const std::string_view open = quotes == QuoteStyle::Typographic ? "“" : "\"";
    const std::string_view close = quotes == QuoteStyle::Typographic ? "”" : "\"";
    const std::string& tmpl = feature.prompt_template();
    const auto at = tmpl.find(kWordPlaceholder);

    std::string out;
    out.reserve(tmpl.size() + word.size() + 8);
    out.append(tmpl, 0, at);
    out.append(open).append(word).append(close);
    out.append(tmpl, at + kWordPlaceholder.size());
    return out;
}

}  // namespace wordnorms
