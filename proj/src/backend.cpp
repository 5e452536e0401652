#include "effront/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "effront/errors.hpp"
#include "effront/prng.hpp"
#include "effront/text.hpp"

namespace effront {

std::string synthetic_oracle_answer(std::string_view context, const QaInstance& instance,
                                    double noise, std::int64_t seed) {
  for (const auto& fact : instance.supporting_facts) {
    const Document* doc = nullptr;
    for (const auto& d : instance.documents) {
      if (d.title == fact.title) {
        doc = &d;
        break;
      }
    }
    if (doc == nullptr || fact.sentence_index >= doc->sentences.size()) return {};
    if (context.find(doc->sentences[fact.sentence_index]) == std::string_view::npos) return {};
  }
  if (noise > 0.0) {
    SplitMix64 rng(fnv1a64(instance.id) ^ static_cast<std::uint64_t>(seed));
    if (rng.uniform() < noise) return {};
  }
  return instance.gold_answer;
}

SyntheticOracleBackend::SyntheticOracleBackend(double noise) : noise_(noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("synthetic noise must lie in [0,1]");
}

std::string SyntheticOracleBackend::identity() const {
  if (noise_ == 0.0) return "synthetic-oracle";
  char buf[64];
  std::snprintf(buf, sizeof buf, "synthetic-oracle:noise=%g", noise_);
  return buf;
}

std::string SyntheticOracleBackend::complete(const AnswerRequest& request) {
  if (request.instance == nullptr) {
    throw BackendError("synthetic oracle backend needs the instance's gold data", false);
  }
  return synthetic_oracle_answer(request.context, *request.instance, noise_, request.seed);
}

HttpChatBackend::HttpChatBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const auto scheme_end = options_.url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("backend URL must start with http:// or https://");
  }
  const auto path_start = options_.url.find('/', scheme_end + 3);
  origin_ = options_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
  if (options_.max_concurrent == 0) options_.max_concurrent = 1;
}

std::string HttpChatBackend::identity() const { return "http:" + options_.model; }

void HttpChatBackend::acquire() {
  std::unique_lock lock(mutex_);
  slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_concurrent; });
  ++in_flight_;
  const auto now = std::chrono::steady_clock::now();
  const auto start = std::max(now, next_start_);
  next_start_ = start + options_.min_interval;
  lock.unlock();
  if (start > now) std::this_thread::sleep_until(start);
}

void HttpChatBackend::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slots_cv_.notify_one();
}

std::string HttpChatBackend::complete(const AnswerRequest& request) {
  nlohmann::json body = {
      {"model", options_.model},
      {"temperature", 0},
      {"seed", request.seed},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
  };
  httplib::Headers headers;
  if (!options_.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.auth_token);
  }

  acquire();
  httplib::Result res{nullptr, httplib::Error::Unknown};
  {
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    res = client.Post(path_, headers, body.dump(), "application/json");
  }
  release();

  if (!res) {
    throw BackendError("backend request failed: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status), true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status), false);
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed backend response: ") + e.what(), false);
  }
}

std::unique_ptr<AnswerBackend> make_backend(std::string_view spec) {
  if (spec == "synthetic") return std::make_unique<SyntheticOracleBackend>();
  constexpr std::string_view noisy = "synthetic:noise=";
  if (spec.starts_with(noisy)) {
    const std::string value(spec.substr(noisy.size()));
    char* end = nullptr;
    const double p = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw ConfigError("invalid synthetic noise '" + value + "'");
    }
    return std::make_unique<SyntheticOracleBackend>(p);
  }
  if (spec == "http") {
    HttpBackendOptions options;
    const char* url = std::getenv(kBackendUrlEnv);
    if (url == nullptr || *url == '\0') {
      throw ConfigError(std::string("http backend requires ") + kBackendUrlEnv);
    }
    options.url = url;
    const char* model = std::getenv(kBackendModelEnv);
    options.model = model != nullptr ? model : "default";
    if (const char* token = std::getenv(kBackendTokenEnv)) options.auth_token = token;
    return std::make_unique<HttpChatBackend>(std::move(options));
  }
  throw ConfigError("unknown backend '" + std::string(spec) + "'");
}

std::string call_with_retry(const std::function<std::string()>& fn, const RetryPolicy& policy) {
  auto delay = policy.base_delay;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= policy.max_attempts) throw;
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, policy.max_delay);
  }
}

}  // namespace effront
