#include <gtest/gtest.h>

#include <sstream>

#include "effront/backend.hpp"
#include "effront/dataset.hpp"
#include "effront/errors.hpp"
#include "effront/harness.hpp"
#include "effront/tokenizer.hpp"

namespace effront {
namespace {

StrategySpec spec(const std::string& text) {
  auto specs = parse_strategy_list(text);
  EXPECT_EQ(specs.size(), 1u);
  return specs.front();
}

TEST(StrategyGrammar, DefaultsAndLists) {
  const auto specs = parse_strategy_list("tfidf_qa:k=8,unit=sentence,full_context,memory_compression");
  ASSERT_EQ(specs.size(), 3u);
  EXPECT_EQ(specs[0].kind, StrategyKind::TfIdfQueryAware);
  EXPECT_EQ(specs[0].config.canonical_id(), "k=8,unit=\"sentence\"");
  EXPECT_EQ(specs[1].config.canonical_id(), "");
  EXPECT_EQ(specs[2].config.canonical_id(), "compressor=\"extractive\",ratio=2.0");
  EXPECT_EQ(spec("embedding").config.canonical_id(), "embedder=\"hash-bow-256\",k=16,unit=\"document\"");
  EXPECT_EQ(spec("memory_compression:ratio=3").config.get_real("ratio"), 3.0);
}

TEST(StrategyGrammar, Errors) {
  for (const char* bad : {"bm25", "tfidf_qa:k=0", "tfidf_qa:depth=3", "tfidf_qa:k=2,k=3",
                          "memory_compression:ratio=1", "k=3", "full_context:k=2", "tfidf_qa:unit=para",
                          "embedding:embedder=bert", "tfidf_qa,,full_context", "memory_compression:compressor=x"}) {
    EXPECT_THROW(parse_strategy_list(bad), ConfigError) << bad;
  }
  EXPECT_NE(strategy_grammar_help().find("tfidf_qa"), std::string::npos);
}

// Half the instances keep both facts in one document the question points at;
// the other half split them over two documents, so k = 1 must miss one.
std::vector<QaInstance> half_miss_fixture() {
  std::vector<QaInstance> out;
  for (int i = 0; i < 4; ++i) {
    QaInstance q;
    q.id = "h" + std::to_string(i);
    q.question = "What about zephyr" + std::to_string(i) + "?";
    q.gold_answer = "ans" + std::to_string(i);
    const std::string key = "zephyr" + std::to_string(i);
    q.documents = {{"Filler", {"nothing here.", "still nothing."}},
                   {"Main", {key + " is first.", key + " is second."}},
                   {"Other", {"another sentence.", "more words here."}}};
    if (i % 2 == 0) {
      q.supporting_facts = {{"Main", 0}, {"Main", 1}};
    } else {
      q.supporting_facts = {{"Main", 0}, {"Other", 1}};
    }
    out.push_back(q);
  }
  return out;
}

const Tokenizer& ws() { return tokenizer_for("whitespace"); }

TEST(RunStrategy, QueryAwareHalfMiss) {
  SyntheticOracleBackend backend;
  const auto data = half_miss_fixture();
  const auto run = run_strategy(data, spec("tfidf_qa:k=1"), backend, ws(), {});
  EXPECT_DOUBLE_EQ(run.record.f1, 0.5);
  EXPECT_DOUBLE_EQ(run.record.em, 0.5);
  EXPECT_EQ(run.record.n_instances, 4);
}

TEST(RunStrategy, OracleAndFullContextAreExact) {
  SyntheticOracleBackend backend;
  const auto data = make_synthetic_dataset(20, 3);
  for (const char* s : {"oracle", "full_context"}) {
    const auto run = run_strategy(data, spec(s), backend, ws(), {});
    EXPECT_EQ(run.record.f1, 1.0) << s;
    EXPECT_EQ(run.record.stage1_tokens, 0.0) << s;
    EXPECT_GT(run.record.stage2_tokens, 0.0) << s;
    EXPECT_TRUE(validate_record(run.record).ok()) << s;
  }
}

TEST(RunStrategy, TokenAccountingMatchesAudit) {
  SyntheticOracleBackend backend;
  const auto data = make_synthetic_dataset(10, 4);
  const auto run = run_strategy(data, spec("memory_compression:ratio=2"), backend, ws(), {});
  double s1 = 0, s2 = 0;
  for (const auto& a : run.audit) {
    EXPECT_GT(a.stage1_tokens, 0.0);
    s1 += a.stage1_tokens;
    s2 += a.prompt_tokens + a.completion_tokens;
  }
  EXPECT_DOUBLE_EQ(run.record.stage1_tokens, s1 / 10);
  EXPECT_DOUBLE_EQ(run.record.stage2_tokens, s2 / 10);
  EXPECT_TRUE(validate_record(run.record).ok());
  EXPECT_EQ(run.record.config.get_string("backend"), "synthetic-oracle");
  EXPECT_EQ(run.record.config.get_string("tokenizer"), "whitespace");
}

TEST(RunStrategy, WorkerCountDoesNotChangeOutput) {
  SyntheticOracleBackend backend;
  const auto data = make_synthetic_dataset(40, 5);
  const auto s = spec("embedding:k=3");
  RunOptions one;
  RunOptions four;
  four.workers = 4;
  const auto a = run_strategy(data, s, backend, ws(), one);
  const auto b = run_strategy(data, s, backend, ws(), four);
  EXPECT_EQ(a.record, b.record);
  std::ostringstream ja, jb;
  write_audit_jsonl(ja, a);
  write_audit_jsonl(jb, b);
  EXPECT_EQ(ja.str(), jb.str());
}

TEST(RunStrategy, RetrievalF1GrowsWithDepth) {
  SyntheticOracleBackend backend;
  const auto data = make_synthetic_dataset(60, 6);
  for (const char* name : {"tfidf_qa", "tfidf_vanilla", "embedding"}) {
    double prev = -1;
    for (int k = 1; k <= 10; ++k) {
      const auto run = run_strategy(data, spec(std::string(name) + ":k=" + std::to_string(k)), backend, ws(), {});
      EXPECT_GE(run.record.f1, prev) << name << " k=" << k;
      prev = run.record.f1;
    }
    EXPECT_EQ(prev, 1.0) << name;
  }
}

TEST(RunStrategy, SentenceUnit) {
  SyntheticOracleBackend backend;
  const auto data = half_miss_fixture();
  const auto run = run_strategy(data, spec("tfidf_qa:k=2,unit=sentence"), backend, ws(), {});
  EXPECT_DOUBLE_EQ(run.record.f1, 0.5);
}

class FailingBackend final : public AnswerBackend {
 public:
  std::string identity() const override { return "failing"; }
  bool deterministic() const override { return true; }
  std::string complete(const AnswerRequest&) override { throw BackendError("down", true); }
};

TEST(RunStrategy, BackendFailureAbortsRun) {
  FailingBackend backend;
  RunOptions o;
  o.retry = {2, std::chrono::milliseconds(1), std::chrono::milliseconds(1)};
  o.workers = 3;
  EXPECT_THROW(run_strategy(half_miss_fixture(), spec("full_context"), backend, ws(), o), BackendError);
}

TEST(RunStrategy, Rejections) {
  SyntheticOracleBackend backend;
  EXPECT_THROW(run_strategy({}, spec("full_context"), backend, ws(), {}), ConfigError);
  EXPECT_THROW(run_strategy(half_miss_fixture(), spec("memory_compression:compressor=llm"), backend, ws(), {}),
               ConfigError);
}

}  // namespace
}  // namespace effront
