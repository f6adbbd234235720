#include "sotm/quality.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sotm/error.hpp"
#include "sotm/training.hpp"
#include "synthetic.hpp"

namespace sotm {
namespace {

std::vector<std::vector<double>> features_of(const TimeSlice& s) {
  std::vector<std::vector<double>> xs;
  for (const auto& o : s.observations) xs.push_back(o.features);
  return xs;
}

ReferenceArray random_array(testing::Rng& rng, std::size_t m, std::size_t d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(m * d);
  for (auto& x : v) x = u(rng);
  return ReferenceArray(m, d, std::move(v));
}

TEST(Metrics, AgreeWithOraclesOnRandomInputs) {
  testing::Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng() % 8;
    const std::size_t d = 1 + rng() % 5;
    const auto a = random_array(rng, m, d);
    const auto s = testing::uniform_slice(rng, 3 + rng() % 30, d);
    const double sigma = 0.3 + 0.2 * double(rng() % 20);
    const auto units = oracle::units_of(a);
    const auto xs = features_of(s);
    ASSERT_NEAR(qe_slice(a, s), oracle::qe(units, xs), 1e-12);
    ASSERT_NEAR(dm_slice(a, s, sigma), oracle::dm(units, xs, sigma, false), 1e-12);
    ASSERT_NEAR(dm_slice(a, s, sigma, {.classical_distortion = true}), oracle::dm(units, xs, sigma, true),
                1e-12);
    ASSERT_NEAR(te_slice(a, s), oracle::te(units, xs), 1e-15);
    ASSERT_NEAR(kl_slice(a, s), oracle::kl(units, xs), 1e-12);
    const auto b = random_array(rng, m, d);
    ASSERT_NEAR(sc_slice(a, b), oracle::sc(units, oracle::units_of(b)), 1e-12);
  }
}

TEST(Metrics, HandEvaluated) {
  // Units at 0, 1, 3 on a line; points at 0.2 and 2.9.
  const ReferenceArray a(3, 1, {0.0, 1.0, 3.0});
  TimeSlice s{TimeKey::integer(1), {{"p", {0.2}, 1.0}, {"q", {2.9}, 3.0}}};
  EXPECT_NEAR(qe_slice(a, s), (0.2 + 0.1) / 2.0, 1e-15);
  // 0.2: BMU 0, second 1 (adjacent), path 1. 2.9: BMU 2, second 1, path 2.
  EXPECT_NEAR(kl_slice(a, s), ((0.2 + 1.0) + (0.1 + 2.0)) / 2.0, 1e-15);
  EXPECT_EQ(te_slice(a, s), 0.0);
  EXPECT_NEAR(qe_slice(a, s, {.weighted_metrics = true}), (0.2 + 3.0 * 0.1) / 4.0, 1e-15);
}

TEST(Metrics, TopographicErrorCountsNonAdjacentSecondBmu) {
  // Unit order 0, 10, 1: a point at 0.4 has BMU 0 and second BMU 2.
  const ReferenceArray a(3, 1, {0.0, 10.0, 1.0});
  TimeSlice s{TimeKey::integer(1), {{"p", {0.4}, 1.0}, {"q", {9.0}, 1.0}}};
  EXPECT_EQ(te_slice(a, s), 0.5);
  // Path from unit 0 to unit 2 runs through unit 1: 10 + 9.
  EXPECT_NEAR(kl_slice(a, s), ((0.4 + 19.0) + (1.0 + 9.0)) / 2.0, 1e-12);
}

TEST(Metrics, KlIsAtLeastQe) {
  testing::Rng rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_array(rng, 2 + rng() % 8, 3);
    const auto s = testing::uniform_slice(rng, 20, 3);
    EXPECT_GE(kl_slice(a, s), qe_slice(a, s));
  }
}

TEST(Metrics, DistortionLimits) {
  testing::Rng rng(71);
  const auto a = random_array(rng, 5, 2);
  const auto s = testing::uniform_slice(rng, 30, 2);
  // Very small radius: only the BMU term survives.
  EXPECT_NEAR(dm_slice(a, s, 1e-3), qe_slice(a, s) / 5.0, 1e-12);
  // Very large radius: every unit weighs 1.
  EXPECT_NEAR(dm_slice(a, s, 1e9), qe_slice(a, s), 1e-9);
  EXPECT_THROW(dm_slice(a, s, 0.0), ContractError);
}

TEST(Metrics, WeightedAveragingEqualsReplication) {
  testing::Rng rng(73);
  const auto a = random_array(rng, 4, 2);
  TimeSlice weighted{TimeKey::integer(1), {{"a", {0.1, 0.2}, 2.0}, {"b", {-0.5, 0.7}, 1.0}}};
  TimeSlice repl{TimeKey::integer(1), {{"a", {0.1, 0.2}, 1.0}, {"a", {0.1, 0.2}, 1.0}, {"b", {-0.5, 0.7}, 1.0}}};
  const MetricOptions w{.weighted_metrics = true};
  EXPECT_NEAR(qe_slice(a, weighted, w), qe_slice(a, repl), 1e-15);
  EXPECT_NEAR(kl_slice(a, weighted, w), kl_slice(a, repl), 1e-15);
  EXPECT_NEAR(te_slice(a, weighted, w), te_slice(a, repl), 1e-15);
  EXPECT_NEAR(dm_slice(a, weighted, 1.0, w), dm_slice(a, repl, 1.0), 1e-15);
}

TEST(Metrics, StructuralChange) {
  const ReferenceArray a(2, 2, {0, 0, 1, 1});
  const ReferenceArray b(2, 2, {3, 4, 1, 1});
  EXPECT_DOUBLE_EQ(sc_slice(a, b), 2.5);
  EXPECT_EQ(sc_slice(a, a), 0.0);
  EXPECT_THROW(sc_slice(a, ReferenceArray(3, 2, {0, 0, 0, 0, 0, 0})), ContractError);
}

TEST(Metrics, ShapeMismatchIsContractError) {
  const ReferenceArray a(2, 2, {0, 0, 1, 1});
  TimeSlice s{TimeKey::integer(1), {{"a", {1.0}, 1.0}}};
  EXPECT_THROW(qe_slice(a, s), ContractError);
  EXPECT_THROW(kl_slice(a, s), ContractError);
}

class AggregateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::Rng rng(79);
    cube_.emplace(testing::make_panel(rng, {.entities = 15, .features = 4, .slices = 5}));
    TrainConfig c;
    c.units = 5;
    model_ = train_sotm(*cube_, c);
  }
  std::optional<DataCube> cube_;
  SotmModel model_;
};

TEST_F(AggregateTest, PerSliceAndMeans) {
  const auto r = aggregate(model_, *cube_);
  ASSERT_EQ(r.per_slice.size(), 5u);
  double kl = 0.0;
  for (std::size_t t = 0; t < 5; ++t) {
    const auto& q = r.per_slice[t];
    EXPECT_EQ(q.n, 15u);
    EXPECT_EQ(q.sigma, model_.sigma_final[t]);
    EXPECT_EQ(q.qe, qe_slice(model_.arrays[t], cube_->slice(t)));
    EXPECT_EQ(q.dm, dm_slice(model_.arrays[t], cube_->slice(t), model_.sigma_final[t]));
    EXPECT_EQ(q.sc.has_value(), t > 0);
    kl += q.kl;
  }
  EXPECT_NEAR(r.aggregate.kl, kl / 5.0, 1e-15);
}

TEST_F(AggregateTest, MismatchesAreRejected) {
  testing::Rng rng(83);
  const auto other = testing::make_panel(rng, {.entities = 15, .features = 4, .slices = 4});
  EXPECT_THROW(aggregate(model_, other), ContractError);
  const auto wide = testing::make_panel(rng, {.entities = 15, .features = 3, .slices = 5});
  EXPECT_THROW(aggregate(model_, wide), ContractError);
  const auto shifted = testing::make_panel(rng, {.entities = 15, .features = 4, .slices = 5, .first_key = 2});
  EXPECT_THROW(aggregate(model_, shifted), ContractError);
}

TEST_F(AggregateTest, CsvLayout) {
  std::ostringstream out;
  write_metrics_csv(aggregate(model_, *cube_), out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0], "time_key,n,sigma,qe,dm,te,kl,sc");
  EXPECT_EQ(lines[1].substr(0, 5), "1,15,");
  EXPECT_EQ(lines[1].back(), ',');  // no structural change for the first slice
  EXPECT_EQ(lines[6].substr(0, 13), "aggregate,75,");
}

}  // namespace
}  // namespace sotm
