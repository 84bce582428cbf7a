#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
#include "json.hpp"

#include "ontorel/errors.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/hash.hpp"
#include "ontorel/label.hpp"
#include "ontorel/pair.hpp"

namespace ontorel {

/// Connection and decoding parameters for one completion provider. The
/// defaults pin temperature 0 and 512 output tokens (1024 for the CoT
/// thinking phase, which has to fit a free-form discussion).
struct BackendConfig {
    std::string provider_id = "openai";
    std::string model_id;
    std::string endpoint_url;
    double temperature = 0.0;
    int max_output_tokens = 512;
    int cot_phase1_max_output_tokens = 1024;
    std::chrono::milliseconds request_timeout{60000};
    int max_in_flight = 1;
    int retry_limit = 3;
    std::chrono::milliseconds retry_backoff{500};

    void validate() const {
        if (temperature < 0) throw UsageError("temperature must be >= 0");
        if (max_in_flight < 1) throw UsageError("max_in_flight must be >= 1");
        if (retry_limit < 0) throw UsageError("retry_limit must be >= 0");
        if (max_output_tokens < 1 || cot_phase1_max_output_tokens < 1)
            throw UsageError("max output tokens must be >= 1");
    }

    /// Credentials come only from the environment, never from config files.
    std::string api_key_env_var() const {
        std::string out = "ONTOREL_";
        for (unsigned char c : provider_id)
            out += std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_';
        return out + "_API_KEY";
    }
};

/// One persisted prompt/response record; the unit of replayability.
struct Exchange {
    std::string exchange_id;
    std::string prompt;
    std::string response;
    std::string model_id;
    std::string timestamp;  // RFC-3339 UTC
    std::int64_t latency_ms = 0;
    int attempt_count = 0;
};

/// Content address of a completion: a pure function of the model, the
/// decoding parameters and the prompt bytes. Repeating a call can therefore
/// be served from the store without any network traffic.
inline std::string exchange_id(const BackendConfig& config, const std::string& prompt,
                               int max_output_tokens) {
    char params[64];
    std::snprintf(params, sizeof(params), "temperature=%.17g;max_tokens=%d", config.temperature,
                  max_output_tokens);
    return sha256_hex(config.model_id + "\n" + params + "\n" + prompt);
}

inline std::string rfc3339_utc_now() {
    using namespace std::chrono;
    auto now = system_clock::now();
    std::time_t secs = system_clock::to_time_t(now);
    auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms));
    return buf;
}

inline nlohmann::ordered_json exchange_to_json(const Exchange& ex) {
    nlohmann::ordered_json j;
    j["exchange_id"] = ex.exchange_id;
    j["prompt"] = ex.prompt;
    j["response"] = ex.response;
    j["model_id"] = ex.model_id;
    j["timestamp"] = ex.timestamp;
    j["latency"] = ex.latency_ms;  // milliseconds
    j["attempt_count"] = ex.attempt_count;
    return j;
}

inline Exchange exchange_from_json(const nlohmann::json& j) {
    Exchange ex;
    ex.exchange_id = j.at("exchange_id").get<std::string>();
    ex.prompt = j.at("prompt").get<std::string>();
    ex.response = j.at("response").get<std::string>();
    ex.model_id = j.at("model_id").get<std::string>();
    ex.timestamp = j.at("timestamp").get<std::string>();
    ex.latency_ms = j.at("latency").get<std::int64_t>();
    ex.attempt_count = j.at("attempt_count").get<int>();
    return ex;
}

/// Append-only JSON Lines store, one Exchange per line. Loading tolerates a
/// missing file (a fresh run); appends are serialized and idempotent per
/// exchange_id, lookups take a shared lock.
class ExchangeStore {
public:
    explicit ExchangeStore(std::string path) : path_(std::move(path)) {
        std::ifstream in(path_, std::ios::binary);
        if (!in) return;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded())
                throw ParseError("exchange log " + path_ + " has a malformed JSON line", lineno);
            Exchange ex = exchange_from_json(j);
            by_id_.emplace(ex.exchange_id, std::move(ex));
        }
    }

    const std::string& path() const { return path_; }

    std::optional<Exchange> lookup(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = by_id_.find(id);
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }

    void append(const Exchange& ex) {
        std::unique_lock lock(mutex_);
        if (by_id_.count(ex.exchange_id)) return;
        std::filesystem::path p(path_);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot append to exchange log: " + path_);
        out << exchange_to_json(ex).dump() << '\n';
        out.flush();
        if (!out) throw IoError("short write to exchange log: " + path_);
        by_id_.emplace(ex.exchange_id, ex);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return by_id_.size();
    }

private:
    std::string path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Exchange> by_id_;
};

/// One completion attempt against some provider. Implementations signal
/// transient trouble with TransportError (retried) or ProviderError carrying
/// 429/5xx; CredentialError and other ProviderErrors are fatal.
class Completer {
public:
    virtual ~Completer() = default;
    virtual std::string complete_once(const std::string& prompt, int max_output_tokens) = 0;
};

namespace detail {

struct ParsedEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/chat/completions when the URL carries none
};

inline ParsedEndpoint parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw UsageError("endpoint URL must start with http:// or https://, got '" + url + "'");
    std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw UsageError("unsupported endpoint scheme '" + scheme + "'");
    auto path_start = url.find('/', scheme_end + 3);
    ParsedEndpoint out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/v1/chat/completions";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
        if (out.path == "/") out.path = "/v1/chat/completions";
    }
    return out;
}

} // namespace detail

/// OpenAI-style chat-completion client: POSTs {model, messages, temperature,
/// max_tokens} with bearer-token auth and extracts the first choice's message
/// content. Any provider speaking this shape (including local servers) works
/// unchanged; the provider id only selects the credential variable.
class HttpCompleter : public Completer {
public:
    explicit HttpCompleter(BackendConfig config)
        : config_(std::move(config)), endpoint_(detail::parse_endpoint(config_.endpoint_url)) {}

    std::string complete_once(const std::string& prompt, int max_output_tokens) override {
        httplib::Client client(endpoint_.base);
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
        auto rem = config_.request_timeout - secs;
        client.set_connection_timeout(secs.count(), rem.count() * 1000);
        client.set_read_timeout(secs.count(), rem.count() * 1000);
        client.set_write_timeout(secs.count(), rem.count() * 1000);

        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env_var().c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        nlohmann::ordered_json body;
        body["model"] = config_.model_id;
        body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = config_.temperature;
        body["max_tokens"] = max_output_tokens;

        auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
        if (!res)
            throw TransportError("request to " + endpoint_.base + " failed: " +
                                 httplib::to_string(res.error()));
        if (res->status == 401 || res->status == 403)
            throw CredentialError("authentication failed (HTTP " + std::to_string(res->status) +
                                  "); set " + config_.api_key_env_var());
        if (res->status < 200 || res->status >= 300)
            throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " +
                                    res->body.substr(0, 200),
                                res->status);

        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded() || !j.contains("choices") || j["choices"].empty() ||
            !j["choices"][0].contains("message") ||
            !j["choices"][0]["message"].contains("content"))
            throw ProviderError("completion response has no choices[0].message.content: " +
                                    res->body.substr(0, 200),
                                res->status);
        return j["choices"][0]["message"]["content"].get<std::string>();
    }

private:
    BackendConfig config_;
    detail::ParsedEndpoint endpoint_;
};

/// Seeded uniform label corruption for the scripted backend. Whether a call
/// is corrupted is a pure function of (seed, ordered pair), independent of
/// call order, so concurrent runs and replays agree:
///
///   rng = SplitMix64(seed XOR fnv1a64(topic_a + 0x1F + topic_b))
///   corrupt iff rng.unit() < rate; the replacement is the rng.below(3)-th
///   label of the canonical order broader, narrower, same-as, other with the
///   true label removed.
struct NoiseSpec {
    double rate = 0.0;
    std::uint64_t seed = 0;
};

inline RelationLabel apply_label_noise(RelationLabel truth, const TopicPair& pair,
                                       const NoiseSpec& noise) {
    SplitMix64 rng(noise.seed ^ fnv1a64(pair.topic_a + '\x1F' + pair.topic_b));
    if (rng.unit() >= noise.rate) return truth;
    std::array<RelationLabel, 3> others{};
    std::size_t n = 0;
    for (RelationLabel l : kAllLabels)
        if (l != truth) others[n++] = l;
    return others[rng.below(3)];
}

/// Deterministic offline provider used as a test oracle. It recovers the
/// ordered topic pair from the rendered prompt, looks up the scripted reply,
/// and answers with the statement number of the (optionally noise-corrupted)
/// label, a canned discussion for CoT phase-1 prompts, or verbatim free text.
class ScriptedCompleter : public Completer {
public:
    struct Reply {
        std::optional<RelationLabel> label;  // answered as its statement number
        std::optional<std::string> text;     // returned verbatim instead
    };

    explicit ScriptedCompleter(std::optional<NoiseSpec> noise = std::nullopt)
        : noise_(noise) {}

    /// Answers every gold pair correctly in both directions: the reverse
    /// order carries the inverse label, so the backend is inverse-consistent.
    static std::shared_ptr<ScriptedCompleter> from_gold(
        const GoldDataset& gold, std::optional<NoiseSpec> noise = std::nullopt) {
        auto out = std::make_shared<ScriptedCompleter>(noise);
        for (const auto& r : gold.records) {
            out->set_label(r.pair, r.label);
            out->set_label(r.pair.reversed(), inverse(r.label));
        }
        return out;
    }

    void set_label(const TopicPair& pair, RelationLabel label) {
        table_[key(pair)] = Reply{label, std::nullopt};
    }
    void set_text(const TopicPair& pair, std::string text) {
        table_[key(pair)] = Reply{std::nullopt, std::move(text)};
    }
    void set_phase1_text(const TopicPair& pair, std::string text) {
        phase1_[key(pair)] = std::move(text);
    }

    std::size_t calls() const { return calls_.load(); }

    std::string complete_once(const std::string& prompt, int) override {
        calls_.fetch_add(1);
        TopicPair pair = extract_pair(prompt);
        if (prompt.find("Think step by step by following these sequential instructions:") !=
            std::string::npos) {
            auto it = phase1_.find(key(pair));
            if (it != phase1_.end()) return it->second;
            return "1) '" + pair.topic_a + "' is a research topic. 2) '" + pair.topic_b +
                   "' is a research topic. 3) This sentence mentions '" + pair.topic_a +
                   "' and '" + pair.topic_b + "'. 4) Their relationship is discussed below.";
        }
        auto it = table_.find(key(pair));
        if (it == table_.end())
            throw Error("scripted backend has no reply for pair ('" + pair.topic_a + "', '" +
                        pair.topic_b + "')");
        const Reply& reply = it->second;
        if (reply.text) return *reply.text;
        RelationLabel answer = *reply.label;
        if (noise_) answer = apply_label_noise(answer, pair, *noise_);
        return std::to_string(label_to_statement(answer).value());
    }

private:
    static std::string key(const TopicPair& pair) {
        return pair.topic_a + '\x1F' + pair.topic_b;
    }

    /// The standard and CoT phase-1 prompts open with the classification
    /// request; phase-2 prompts embed the statement list after the previous
    /// response, so its anchor is searched from the end.
    TopicPair extract_pair(const std::string& prompt) const {
        static const std::string kClassify = "Classify the relationship between '";
        static const std::string kMid = "' and '";
        static const std::string kClassifyEnd = "' by applying the following";
        if (prompt.rfind(kClassify, 0) == 0) {
            std::size_t a_end = prompt.find(kMid, kClassify.size());
            std::size_t b_end = prompt.find(kClassifyEnd, a_end == std::string::npos ? 0 : a_end);
            if (a_end != std::string::npos && b_end != std::string::npos)
                return TopicPair(prompt.substr(kClassify.size(), a_end - kClassify.size()),
                                 prompt.substr(a_end + kMid.size(), b_end - a_end - kMid.size()));
        }
        static const std::string kStmtOne = "statements is correct:\n1. '";
        static const std::string kStmtMid = "' is-broader-than '";
        static const std::string kStmtEnd = "'\n2. '";
        std::size_t one = prompt.rfind(kStmtOne);
        if (one != std::string::npos) {
            std::size_t a_start = one + kStmtOne.size();
            std::size_t a_end = prompt.find(kStmtMid, a_start);
            std::size_t b_end = prompt.find(kStmtEnd, a_end == std::string::npos ? 0 : a_end);
            if (a_end != std::string::npos && b_end != std::string::npos)
                return TopicPair(prompt.substr(a_start, a_end - a_start),
                                 prompt.substr(a_end + kStmtMid.size(),
                                               b_end - a_end - kStmtMid.size()));
        }
        throw Error("scripted backend cannot locate the topic pair in the prompt");
    }

    std::map<std::string, Reply> table_;
    std::map<std::string, std::string> phase1_;
    std::optional<NoiseSpec> noise_;
    std::atomic<std::size_t> calls_{0};
};

/// Ties a transport, the exchange store and the config together: cache hits
/// are returned without touching the network, misses run under the
/// max_in_flight semaphore with exponential-backoff retries for transient
/// failures, and every fresh exchange is persisted before being returned.
class Backend {
public:
    Backend(BackendConfig config, std::shared_ptr<Completer> transport,
            std::shared_ptr<ExchangeStore> store = nullptr)
        : config_(std::move(config)), transport_(std::move(transport)), store_(std::move(store)),
          in_flight_(std::make_unique<std::counting_semaphore<>>(
              std::max(1, config_.max_in_flight))) {
        config_.validate();
    }

    Backend(Backend&&) = default;

    /// A backend that can only answer from the store.
    static Backend replay_only(BackendConfig config, std::shared_ptr<ExchangeStore> store) {
        return Backend(std::move(config), nullptr, std::move(store));
    }

    const BackendConfig& config() const { return config_; }

    Exchange complete(const std::string& prompt, std::optional<int> max_tokens = std::nullopt) {
        int tokens = max_tokens.value_or(config_.max_output_tokens);
        std::string id = exchange_id(config_, prompt, tokens);
        if (store_)
            if (auto hit = store_->lookup(id)) return *hit;
        if (!transport_)
            throw ReplayMissError("exchange " + id + " is not in the store and the backend has no transport");

        in_flight_->acquire();
        struct Release {
            std::counting_semaphore<>& sem;
            ~Release() { sem.release(); }
        } release{*in_flight_};

        auto start = std::chrono::steady_clock::now();
        std::string response;
        int attempts = 0;
        for (;;) {
            ++attempts;
            try {
                response = transport_->complete_once(prompt, tokens);
                break;
            } catch (const CredentialError&) {
                throw;
            } catch (const ProviderError& e) {
                bool transient = e.status() == 429 || e.status() >= 500;
                if (!transient || attempts > config_.retry_limit) throw;
            } catch (const TransportError& e) {
                if (attempts > config_.retry_limit)
                    throw TransportError(std::string(e.what()) + " (after " +
                                         std::to_string(attempts) + " attempts)");
            }
            std::this_thread::sleep_for(config_.retry_backoff * (1 << (attempts - 1)));
        }
        auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);

        Exchange ex{id, prompt, response, config_.model_id, rfc3339_utc_now(), latency.count(),
                    attempts};
        if (store_) store_->append(ex);
        return ex;
    }

    /// Returns the stored exchange for this prompt without any network
    /// activity; a miss is an error listing the absent id.
    Exchange replay(const std::string& prompt, std::optional<int> max_tokens = std::nullopt) const {
        int tokens = max_tokens.value_or(config_.max_output_tokens);
        std::string id = exchange_id(config_, prompt, tokens);
        if (store_)
            if (auto hit = store_->lookup(id)) return *hit;
        throw ReplayMissError("exchange " + id + " is not in the store");
    }

private:
    BackendConfig config_;
    std::shared_ptr<Completer> transport_;
    std::shared_ptr<ExchangeStore> store_;
    std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

} // namespace ontorel
