#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "effront/dataset.hpp"
#include "effront/errors.hpp"
#include "json.hpp"
#include "support.hpp"

namespace effront {
namespace {

nlohmann::json instance_json(const std::string& id, const std::string& fact_title = "A") {
  return {{"_id", id},
          {"question", "q?"},
          {"answer", "x"},
          {"context", nlohmann::json::array({nlohmann::json::array({"A", {"a0.", "a1."}}),
                                             nlohmann::json::array({"B", {"b0."}})})},
          {"supporting_facts", nlohmann::json::array({nlohmann::json::array({fact_title, 1}),
                                                      nlohmann::json::array({"B", 0})})}};
}

std::vector<QaInstance> with_ids(std::size_t n) {
  std::vector<QaInstance> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].id = "q" + std::to_string(i);
  return out;
}

std::vector<std::string> ids(const std::vector<QaInstance>& v) {
  std::vector<std::string> out;
  for (const auto& q : v) out.push_back(q.id);
  return out;
}

TEST(ParseDataset, WellFormed) {
  const nlohmann::json arr = {instance_json("a"), instance_json("b")};
  const auto d = parse_dataset(arr.dump());
  ASSERT_EQ(d.instances.size(), 2u);
  EXPECT_EQ(d.dropped, 0u);
  EXPECT_EQ(d.instances[0].documents[0].sentences[1], "a1.");
  EXPECT_EQ(d.instances[1].supporting_facts[1].title, "B");
}

TEST(ParseDataset, DropsInvalidInstanceWithinTolerance) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < 99; ++i) arr.push_back(instance_json("ok" + std::to_string(i)));
  arr.push_back(instance_json("bad", "Missing"));
  const auto d = parse_dataset(arr.dump());
  EXPECT_EQ(d.instances.size(), 99u);
  EXPECT_EQ(d.dropped, 1u);
}

TEST(ParseDataset, TooManyDroppedFails) {
  nlohmann::json arr = {instance_json("ok"), instance_json("bad", "Missing")};
  EXPECT_THROW(parse_dataset(arr.dump()), DataError);
}

TEST(ParseDataset, Errors) {
  try {
    parse_dataset("[]");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "empty dataset");
  }
  EXPECT_THROW(parse_dataset("{\"not\": \"array\"}"), DataError);
  EXPECT_THROW(parse_dataset("[{"), DataError);
  EXPECT_THROW(load_dataset("/nonexistent/file.json"), DataError);
}

TEST(SampleInstances, FullSizeIsPermutation) {
  const auto all = with_ids(25);
  auto s = ids(sample_instances(all, 25, 42));
  std::sort(s.begin(), s.end());
  auto expected = ids(all);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(s, expected);
}

TEST(SampleInstances, Deterministic) {
  const auto all = with_ids(100);
  EXPECT_EQ(ids(sample_instances(all, 10, 7)), ids(sample_instances(all, 10, 7)));
  EXPECT_NE(ids(sample_instances(all, 10, 7)), ids(sample_instances(all, 10, 8)));
}

TEST(SampleInstances, GoldenSeed42) {
  // Generated once by an independent SplitMix64 implementation.
  std::istringstream golden(testing::read_text(testing::fixture_dir() / "sample_seed42_size5.txt"));
  std::vector<std::string> expected;
  for (std::string line; std::getline(golden, line);) expected.push_back(line);
  ASSERT_EQ(expected.size(), 5u);
  EXPECT_EQ(ids(sample_instances(with_ids(10), 5, 42)), expected);
}

TEST(SampleInstances, SizeErrors) {
  const auto all = with_ids(3);
  EXPECT_THROW(sample_instances(all, 0, 1), ConfigError);
  EXPECT_THROW(sample_instances(all, 4, 1), ConfigError);
}

TEST(Synthetic, ShapeAndRoundTrip) {
  const auto data = make_synthetic_dataset(30, 42);
  ASSERT_EQ(data.size(), 30u);
  std::set<std::string> seen;
  for (const auto& q : data) {
    EXPECT_TRUE(seen.insert(q.id).second);
    EXPECT_EQ(q.documents.size(), 10u);
    EXPECT_EQ(q.supporting_facts.size(), 2u);
    EXPECT_TRUE(instance_violations(q).empty());
    EXPECT_NE(q.question.find('?'), std::string::npos);
  }
  const auto again = parse_dataset(dataset_to_json(data));
  EXPECT_EQ(again.dropped, 0u);
  ASSERT_EQ(again.instances.size(), data.size());
  EXPECT_EQ(dataset_to_json(again.instances), dataset_to_json(data));
  EXPECT_EQ(dataset_to_json(make_synthetic_dataset(30, 42)), dataset_to_json(data));
}

TEST(Synthetic, RejectsBadOptions) {
  SyntheticDatasetOptions o;
  o.supporting_documents = 11;
  EXPECT_THROW(make_synthetic_dataset(1, 1, o), ConfigError);
}

}  // namespace
}  // namespace effront
