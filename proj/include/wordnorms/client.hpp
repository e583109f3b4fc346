#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "wordnorms/error.hpp"

namespace wordnorms {

enum class ResponseSource { Live, Replay, Mock };

std::string_view to_string(ResponseSource source) noexcept;

/// First-token alternatives and their probabilities. Top-k truncation means
/// the total may fall short of 1 but never exceed it.
struct TokenDistribution {
    std::map<std::string, double> entries;
    ResponseSource source = ResponseSource::Mock;

    friend bool operator==(const TokenDistribution&, const TokenDistribution&) = default;
};

inline constexpr double kProbabilitySlack = 1e-9;

/// Throws InvalidDistribution unless every entry is in (0, 1] and the total is at most 1 + 1e-9.
void validate(const TokenDistribution& distribution);

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{30'000};
    std::function<void(std::chrono::milliseconds)> sleep;  ///< defaults to std::this_thread::sleep_for

    [[nodiscard]] std::chrono::milliseconds delay(int retry) const;
};

struct BackendConfig {
    std::string endpoint = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model;
    double temperature = 0.0;
    int top_logprobs = 20;
    RetryPolicy retry;
    std::chrono::seconds timeout{60};
    std::string api_key_env = "OPENAI_API_KEY";
    std::filesystem::path cache_path;
    std::size_t parallelism = 4;
};

/// Hex SHA-256 over a canonical encoding of the request parameters.
std::string fingerprint(std::string_view model, std::string_view prompt, double temperature, int top_logprobs);
std::string fingerprint(const BackendConfig& backend, std::string_view prompt);

struct QueryRecord {
    std::string fingerprint;
    std::string model;
    std::string prompt;
    double temperature = 0.0;
    int top_logprobs = 0;
    TokenDistribution distribution;
    std::string timestamp;

    friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

std::string to_json_line(const QueryRecord& record);
QueryRecord parse_json_line(std::string_view line);

std::string utc_timestamp();

/// Append-only JSONL store of query records keyed by fingerprint. Many readers,
/// one writer at a time. The last record for a fingerprint wins on reload.
class RecordCache {
public:
    /// Loads the file if it exists; it is created on the first write.
    explicit RecordCache(std::filesystem::path path);

    RecordCache(const RecordCache&) = delete;
    RecordCache& operator=(const RecordCache&) = delete;

    QueryRecord record(const BackendConfig& backend, std::string_view prompt, const TokenDistribution& distribution,
                       std::string timestamp = utc_timestamp());

    /// Throws CacheMiss.
    [[nodiscard]] QueryRecord lookup(std::string_view fingerprint) const;
    [[nodiscard]] std::optional<QueryRecord> find(std::string_view fingerprint) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, QueryRecord, std::less<>> records_;
};

class RatingBackend {
public:
    virtual ~RatingBackend() = default;

    /// One attempt; no retries. Must be safe to call concurrently.
    virtual TokenDistribution query_first_token(const std::string& prompt) = 0;
    [[nodiscard]] virtual const std::string& model() const noexcept = 0;
};

class MockBackend final : public RatingBackend {
public:
    using Responder = std::function<TokenDistribution(const std::string& prompt)>;

    MockBackend(std::string model, Responder responder);

    /// Always answers `token` with the given probability.
    static std::shared_ptr<MockBackend> constant(std::string model, std::string token, double probability = 1.0);

    TokenDistribution query_first_token(const std::string& prompt) override;
    [[nodiscard]] const std::string& model() const noexcept override { return model_; }

private:
    std::string model_;
    Responder responder_;
};

/// Serves only what a cache already holds; misses raise CacheMiss.
class ReplayBackend final : public RatingBackend {
public:
    ReplayBackend(BackendConfig config, std::shared_ptr<const RecordCache> cache);

    TokenDistribution query_first_token(const std::string& prompt) override;
    [[nodiscard]] const std::string& model() const noexcept override { return config_.model; }

private:
    BackendConfig config_;
    std::shared_ptr<const RecordCache> cache_;
};

/// Consults the cache first and records every fresh answer, so an interrupted
/// run resumes without re-issuing completed queries.
class CachingBackend final : public RatingBackend {
public:
    CachingBackend(BackendConfig config, std::shared_ptr<RatingBackend> inner, std::shared_ptr<RecordCache> cache);

    TokenDistribution query_first_token(const std::string& prompt) override;
    [[nodiscard]] const std::string& model() const noexcept override { return config_.model; }

private:
    BackendConfig config_;
    std::shared_ptr<RatingBackend> inner_;
    std::shared_ptr<RecordCache> cache_;
};

/// OpenAI-compatible chat-completions client requesting first-token logprobs
/// (temperature from config, one output token, `top_logprobs` alternatives).
class OpenAiBackend final : public RatingBackend {
public:
    OpenAiBackend(BackendConfig config, std::string api_key);

    TokenDistribution query_first_token(const std::string& prompt) override;
    [[nodiscard]] const std::string& model() const noexcept override { return config_.model; }

    [[nodiscard]] std::string request_body(const std::string& prompt) const;

private:
    BackendConfig config_;
    std::string api_key_;
};

/// Extracts the first generated token's alternatives from a chat-completions
/// response body. Throws LogprobsUnsupported when none are present.
TokenDistribution parse_chat_logprobs(std::string_view body);

/// Queries with retry on NetworkError, then validates the distribution.
TokenDistribution query_first_token(RatingBackend& backend, const std::string& prompt, const RetryPolicy& retry);

struct BatchItem {
    std::optional<TokenDistribution> distribution;
    std::optional<Error> error;
    int attempts = 0;

    [[nodiscard]] bool ok() const noexcept { return distribution.has_value(); }
};

/// Results are index-aligned with `prompts`. Per-item failures do not stop the batch.
std::vector<BatchItem> run_batch(RatingBackend& backend, const std::vector<std::string>& prompts,
                                 const RetryPolicy& retry, std::size_t parallelism);

}  // namespace wordnorms
