#include "wordnorms/client.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "detail/text.hpp"

namespace wordnorms {

namespace {

using json = nlohmann::json;

ResponseSource parse_source(std::string_view text) {
    if (text == "live") return ResponseSource::Live;
    if (text == "replay") return ResponseSource::Replay;
    if (text == "mock") return ResponseSource::Mock;
    throw Error(ErrorKind::StorageError, "unknown response source '" + std::string(text) + "'");
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::StorageError, "SHA-256 digest failed");
    }
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

TokenDistribution attempt_with_retries(RatingBackend& backend, const std::string& prompt, const RetryPolicy& retry,
                                       int& attempts) {
    attempts = 0;
    for (int retry_no = 0;; ++retry_no) {
        ++attempts;
        try {
            auto distribution = backend.query_first_token(prompt);
            validate(distribution);
            return distribution;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NetworkError || retry_no >= retry.max_retries) throw;
        }
        const auto wait = retry.delay(retry_no);
        if (retry.sleep) {
            retry.sleep(wait);
        } else {
            std::this_thread::sleep_for(wait);
        }
    }
}

}  // namespace

std::string_view to_string(ResponseSource source) noexcept {
    switch (source) {
        case ResponseSource::Live: return "live";
        case ResponseSource::Replay: return "replay";
        case ResponseSource::Mock: return "mock";
    }
    return "mock";
}

void validate(const TokenDistribution& distribution) {
    double total = 0.0;
    for (const auto& [token, p] : distribution.entries) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidDistribution,
                        fmt::format("probability {} for token '{}' outside (0, 1]", p, token));
        }
        total += p;
    }
    if (total > 1.0 + kProbabilitySlack) {
        throw Error(ErrorKind::InvalidDistribution, fmt::format("probabilities sum to {} > 1", total));
    }
}

std::chrono::milliseconds RetryPolicy::delay(int retry) const {
    const double scaled = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, retry);
    const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
    return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

std::string fingerprint(std::string_view model, std::string_view prompt, double temperature, int top_logprobs) {
    // Stable encoding: changing it invalidates every existing cache.
    const json key = {"wordnorms/v1", model, prompt, temperature, top_logprobs};
    return sha256_hex(key.dump());
}

std::string fingerprint(const BackendConfig& backend, std::string_view prompt) {
    return fingerprint(backend.model, prompt, backend.temperature, backend.top_logprobs);
}

std::string to_json_line(const QueryRecord& record) {
    json entries = json::object();
    for (const auto& [token, p] : record.distribution.entries) entries[token] = p;
    const json j = {
        {"fingerprint", record.fingerprint},
        {"model", record.model},
        {"prompt", record.prompt},
        {"temperature", record.temperature},
        {"top_logprobs", record.top_logprobs},
        {"source", to_string(record.distribution.source)},
        {"entries", entries},
        {"timestamp", record.timestamp},
    };
    return j.dump();
}

QueryRecord parse_json_line(std::string_view line) {
    try {
        const auto j = json::parse(line);
        QueryRecord r;
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.prompt = j.at("prompt").get<std::string>();
        r.temperature = j.at("temperature").get<double>();
        r.top_logprobs = j.at("top_logprobs").get<int>();
        r.distribution.source = parse_source(j.at("source").get<std::string>());
        for (const auto& [token, p] : j.at("entries").items()) r.distribution.entries[token] = p.get<double>();
        r.timestamp = j.at("timestamp").get<std::string>();
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::StorageError, std::string("malformed cache record: ") + e.what());
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec);
}

RecordCache::RecordCache(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (!std::filesystem::exists(path_, ec)) return;
    std::ifstream in(path_, std::ios::binary);
    if (!in) throw Error(ErrorKind::StorageError, "cannot read cache " + path_.string());
    std::string line;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto record = parse_json_line(line);
        auto key = record.fingerprint;
        records_.insert_or_assign(std::move(key), std::move(record));
    }
}

QueryRecord RecordCache::record(const BackendConfig& backend, std::string_view prompt,
                                const TokenDistribution& distribution, std::string timestamp) {
    validate(distribution);
    QueryRecord r{fingerprint(backend, prompt), backend.model, std::string(prompt), backend.temperature,
                  backend.top_logprobs, distribution, std::move(timestamp)};

    std::unique_lock lock(mutex_);
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorKind::StorageError, "cannot append to cache " + path_.string());
    out << to_json_line(r) << '\n';
    out.flush();
    if (!out) throw Error(ErrorKind::StorageError, "write failed on cache " + path_.string());
    records_.insert_or_assign(r.fingerprint, r);
    return r;
}

std::optional<QueryRecord> RecordCache::find(std::string_view fingerprint) const {
    std::shared_lock lock(mutex_);
    auto it = records_.find(fingerprint);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

QueryRecord RecordCache::lookup(std::string_view fingerprint) const {
    if (auto r = find(fingerprint)) return *std::move(r);
    throw Error(ErrorKind::CacheMiss, "no record for fingerprint " + std::string(fingerprint));
}

std::size_t RecordCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

MockBackend::MockBackend(std::string model, Responder responder)
    : model_(std::move(model)), responder_(std::move(responder)) {}

std::shared_ptr<MockBackend> MockBackend::constant(std::string model, std::string token, double probability) {
    return std::make_shared<MockBackend>(std::move(model), [token = std::move(token), probability](const std::string&) {
        return TokenDistribution{{{token, probability}}, ResponseSource::Mock};
    });
}

TokenDistribution MockBackend::query_first_token(const std::string& prompt) {
    auto d = responder_(prompt);
    d.source = ResponseSource::Mock;
    return d;
}

ReplayBackend::ReplayBackend(BackendConfig config, std::shared_ptr<const RecordCache> cache)
    : config_(std::move(config)), cache_(std::move(cache)) {}

TokenDistribution ReplayBackend::query_first_token(const std::string& prompt) {
    auto d = cache_->lookup(fingerprint(config_, prompt)).distribution;
    d.source = ResponseSource::Replay;
    return d;
}

CachingBackend::CachingBackend(BackendConfig config, std::shared_ptr<RatingBackend> inner,
                               std::shared_ptr<RecordCache> cache)
    : config_(std::move(config)), inner_(std::move(inner)), cache_(std::move(cache)) {}

TokenDistribution CachingBackend::query_first_token(const std::string& prompt) {
    if (auto hit = cache_->find(fingerprint(config_, prompt))) {
        hit->distribution.source = ResponseSource::Replay;
        return hit->distribution;
    }
    auto d = inner_->query_first_token(prompt);
    cache_->record(config_, prompt, d);
    return d;
}

OpenAiBackend::OpenAiBackend(BackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
    if (config_.top_logprobs < 1) throw Error(ErrorKind::ConfigError, "top_logprobs must be positive");
}

std::string OpenAiBackend::request_body(const std::string& prompt) const {
    const json body = {
        {"model", config_.model},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
        {"max_tokens", 1},
        {"logprobs", true},
        {"top_logprobs", config_.top_logprobs},
    };
    return body.dump();
}

TokenDistribution OpenAiBackend::query_first_token(const std::string& prompt) {
    httplib::Client client(config_.endpoint);
    const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto response = client.Post(config_.path, headers, request_body(prompt), "application/json");
    if (!response) {
        throw Error(ErrorKind::NetworkError, config_.endpoint + ": " + httplib::to_string(response.error()));
    }
    const int status = response->status;
    if (status == 429 || status >= 500) {
        throw Error(ErrorKind::NetworkError, fmt::format("{} returned HTTP {}", config_.endpoint, status));
    }
    if (status != 200) {
        if (response->body.find("logprobs") != std::string::npos) {
            throw Error(ErrorKind::LogprobsUnsupported,
                        fmt::format("HTTP {} rejecting logprobs: {}", status, response->body));
        }
        throw Error(ErrorKind::InvalidArgument, fmt::format("HTTP {}: {}", status, response->body));
    }
    auto d = parse_chat_logprobs(response->body);
    d.source = ResponseSource::Live;
    return d;
}

TokenDistribution parse_chat_logprobs(std::string_view body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::NetworkError, std::string("unparseable response: ") + e.what());
    }
    const json& doc = j;
    const json* alternatives = nullptr;
    if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
        const auto& choice = doc["choices"][0];
        if (choice.contains("logprobs") && choice["logprobs"].is_object() && choice["logprobs"].contains("content")) {
            const auto& content = choice["logprobs"]["content"];
            if (content.is_array() && !content.empty() && content[0].contains("top_logprobs")) {
                alternatives = &content[0]["top_logprobs"];
            }
        }
    }
    if (alternatives == nullptr || !alternatives->is_array() || alternatives->empty()) {
        throw Error(ErrorKind::LogprobsUnsupported, "response carries no first-token alternatives");
    }

    TokenDistribution d;
    d.source = ResponseSource::Live;
    for (const auto& alt : *alternatives) {
        if (!alt.contains("token") || !alt.contains("logprob") || !alt["logprob"].is_number()) {
            throw Error(ErrorKind::LogprobsUnsupported, "malformed alternative: " + alt.dump());
        }
        const double p = std::exp(alt["logprob"].get<double>());
        // Distinct token ids can decode to the same text.
        if (p > 0.0) d.entries[alt["token"].get<std::string>()] += p;
    }
    for (auto& [token, p] : d.entries) p = std::min(p, 1.0);
    return d;
}

TokenDistribution query_first_token(RatingBackend& backend, const std::string& prompt, const RetryPolicy& retry) {
    int attempts = 0;
    return attempt_with_retries(backend, prompt, retry, attempts);
}

std::vector<BatchItem> run_batch(RatingBackend& backend, const std::vector<std::string>& prompts,
                                 const RetryPolicy& retry, std::size_t parallelism) {
    std::vector<BatchItem> results(prompts.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
            auto& item = results[i];
            try {
                item.distribution = attempt_with_retries(backend, prompts[i], retry, item.attempts);
            } catch (const Error& e) {
                item.error = e;
            } catch (const std::exception& e) {
                item.error = Error(ErrorKind::NetworkError, e.what());
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(prompts.size(), 1));
    if (threads == 1) {
        worker();
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    return results;
}

}  // namespace wordnorms
