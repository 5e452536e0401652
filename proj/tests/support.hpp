#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "effront/cost_model.hpp"
#include "effront/domain.hpp"

namespace effront::testing {

inline std::filesystem::path fixture_dir() { return EFFRONT_FIXTURE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("effront-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline OperatingPoint point(double f1, double tokens, std::size_t index = 0,
                            StrategyKind kind = StrategyKind::FullContext,
                            ConfigDescriptor config = {}) {
  OperatingPoint p;
  p.record_index = index;
  p.strategy = kind;
  p.config = std::move(config);
  p.effective_tokens = tokens;
  p.log_cost = log_cost(tokens);
  p.f1 = f1;
  return p;
}

inline EvaluationRecord record(StrategyKind kind, ConfigDescriptor config, double f1, double stage1,
                               double stage2) {
  EvaluationRecord r;
  r.strategy = kind;
  r.config = std::move(config);
  r.f1 = f1;
  r.em = f1;
  r.stage1_tokens = stage1;
  r.stage2_tokens = stage2;
  r.n_instances = 5000;
  r.seed = 42;
  return r;
}

inline ConfigDescriptor k_config(std::int64_t k) {
  return ConfigDescriptor({{"k", ParamValue{k}}, {"unit", ParamValue{std::string("document")}}});
}

inline ConfigDescriptor ratio_config(double ratio) {
  return ConfigDescriptor({{"ratio", ParamValue{ratio}}, {"compressor", ParamValue{std::string("extractive")}}});
}

// Operating points of the published HotpotQA study: TF-IDF QA at 566 tokens
// and Full-Context at 1308 for N = 1, memory compression at 424 and 584 for
// N = 100, plus cheaper efficiency-range points and a peak Full-Context point.
inline std::vector<EvaluationRecord> published_fixture() {
  using K = StrategyKind;
  return {
      record(K::TfIdfQueryAware, k_config(8), 0.74, 0, 400),
      record(K::TfIdfQueryAware, k_config(16), 0.78, 0, 566),
      record(K::TfIdfVanilla, k_config(16), 0.71, 0, 450),
      record(K::EmbeddingRetrieval, k_config(16), 0.73, 0, 500),
      record(K::FullContext, ConfigDescriptor({{"variant", ParamValue{std::string("sampled")}}}), 0.80, 0,
             1308),
      record(K::FullContext, ConfigDescriptor(), 0.84, 0, 2900),
      record(K::MemoryCompression, ratio_config(2.5), 0.74, 30000, 50),
      record(K::MemoryCompression, ratio_config(2.0), 0.78, 40000, 24),
      record(K::MemoryCompression, ratio_config(1.5), 0.80, 50000, 84),
  };
}

inline std::string published_fixture_jsonl() {
  std::ostringstream out;
  const auto records = published_fixture();
  write_records_jsonl(out, records);
  return out.str();
}

}  // namespace effront::testing
