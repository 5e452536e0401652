#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <string>
#include <string_view>

#include "effront/domain.hpp"

namespace effront {

struct AnswerRequest {
  std::string prompt;
  /// The context block embedded in the prompt.
  std::string_view context;
  /// Gold data; only test backends look at it. May be null (compression calls).
  const QaInstance* instance = nullptr;
  std::int64_t seed = 0;
};

/// Prompt in, completion text out. Implementations must be safe to call
/// concurrently. Failures are reported as BackendError.
class AnswerBackend {
 public:
  virtual ~AnswerBackend() = default;
  virtual std::string identity() const = 0;
  /// True when (prompt, identity, seed) always produces byte-identical output.
  virtual bool deterministic() const = 0;
  virtual std::string complete(const AnswerRequest& request) = 0;
};

/// Gold answer iff every supporting-fact sentence appears verbatim in `context`,
/// else the empty string. With noise p > 0, a correct answer is replaced by ""
/// with probability p, drawn from (seed, instance id).
std::string synthetic_oracle_answer(std::string_view context, const QaInstance& instance,
                                    double noise = 0.0, std::int64_t seed = 0);

/// Test backend built on synthetic_oracle_answer.
class SyntheticOracleBackend final : public AnswerBackend {
 public:
  explicit SyntheticOracleBackend(double noise = 0.0);
  std::string identity() const override;
  bool deterministic() const override { return true; }
  std::string complete(const AnswerRequest& request) override;

 private:
  double noise_;
};

struct HttpBackendOptions {
  /// Full endpoint, e.g. "http://localhost:8080/v1/chat/completions".
  std::string url;
  std::string model;
  /// Bearer token; empty sends no Authorization header.
  std::string auth_token;
  std::size_t max_concurrent = 4;
  /// Minimum spacing between request starts.
  std::chrono::milliseconds min_interval{0};
  std::chrono::seconds timeout{60};
};

/// Chat-completion client over JSON/HTTP.
///
/// Request:  POST {"model": m, "temperature": 0, "seed": s,
///                 "messages": [{"role": "user", "content": prompt}]}
/// Response: {"choices": [{"message": {"content": "..."}}]}
///
/// Transport failures, 429 and 5xx are retryable; other non-2xx statuses and
/// malformed bodies are not.
class HttpChatBackend final : public AnswerBackend {
 public:
  explicit HttpChatBackend(HttpBackendOptions options);
  std::string identity() const override;
  bool deterministic() const override { return false; }
  std::string complete(const AnswerRequest& request) override;

 private:
  void acquire();
  void release();

  HttpBackendOptions options_;
  std::string origin_;
  std::string path_;
  std::mutex mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
  std::chrono::steady_clock::time_point next_start_{};
};

/// Environment variables read by make_backend for the http backend.
inline constexpr const char* kBackendUrlEnv = "EFFRONT_BACKEND_URL";
inline constexpr const char* kBackendTokenEnv = "EFFRONT_API_KEY";
inline constexpr const char* kBackendModelEnv = "EFFRONT_MODEL";
inline constexpr const char* kWorkersEnv = "EFFRONT_WORKERS";

/// "synthetic", "synthetic:noise=0.1", or "http". Throws ConfigError otherwise.
std::unique_ptr<AnswerBackend> make_backend(std::string_view spec);

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{200};
  std::chrono::milliseconds max_delay{5000};
};

/// Calls `fn`, retrying retryable BackendErrors with capped exponential backoff.
std::string call_with_retry(const std::function<std::string()>& fn, const RetryPolicy& policy);

}  // namespace effront
