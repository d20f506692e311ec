#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "rwt/error.hpp"
#include "rwt/eval_report.hpp"
#include "rwt/rng.hpp"

namespace rwt {
namespace {

struct OracleMetrics {
  long double rmse, mae, r2;
};

OracleMetrics oracle(const std::vector<double>& t, const std::vector<double>& p) {
  long double se = 0, ae = 0, mean = 0, st = 0;
  for (double v : t) mean += v;
  mean /= t.size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const long double d = static_cast<long double>(t[i]) - p[i];
    se += d * d;
    ae += std::fabs(d);
    st += (t[i] - mean) * (t[i] - mean);
  }
  return {std::sqrt(se / t.size()), ae / t.size(), 1 - se / st};
}

std::vector<double> draw(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

TEST(Metrics, PerfectPredictionIsZeroErrorUnitR2) {
  const std::vector<double> y{1.0, 2.5, -3.0, 7.0};
  const MetricSet m = metrics(y, y);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  ASSERT_TRUE(m.r2.has_value());
  EXPECT_EQ(*m.r2, 1.0);
  EXPECT_EQ(m.n, 4u);
}

TEST(Metrics, MeanPredictionHasZeroR2) {
  const std::vector<double> y{1.0, 2.0, 3.0, 6.0};
  const std::vector<double> p(4, 3.0);
  EXPECT_NEAR(*metrics(y, p).r2, 0.0, 1e-15);
}

TEST(Metrics, ConstantTruthKeepsErrors) {
  const std::vector<double> y(4, 0.0), p(4, 1.0);
  const MetricSet m = metrics(y, p);
  EXPECT_EQ(m.rmse, 1.0);
  EXPECT_EQ(m.mae, 1.0);
  EXPECT_FALSE(m.r2.has_value());
  try {
    r2_score(y, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstantTruth);
  }
}

TEST(Metrics, RejectsEmptyAndMismatched) {
  const std::vector<double> a{1.0, 2.0}, b{1.0};
  EXPECT_THROW(metrics({}, {}), Error);
  try {
    metrics(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Metrics, MatchesLongDoubleOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(50);
    const auto t = draw(rng, n, -10, 30);
    const auto p = draw(rng, n, -10, 30);
    const MetricSet m = metrics(t, p);
    const OracleMetrics o = oracle(t, p);
    EXPECT_NEAR(m.rmse, static_cast<double>(o.rmse), 1e-12 * (1 + std::fabs(double(o.rmse))));
    EXPECT_NEAR(m.mae, static_cast<double>(o.mae), 1e-12 * (1 + std::fabs(double(o.mae))));
    EXPECT_NEAR(*m.r2, static_cast<double>(o.r2), 1e-10 * (1 + std::fabs(double(o.r2))));
  }
}

TEST(Metrics, RmseNeverBelowMaeOnFuzz) {
  Rng rng(11);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const auto t = draw(rng, n, -5, 5);
    auto p = draw(rng, n, -5, 5);
    if (trial % 7 == 0) p = t;
    const MetricSet m = metrics(t, p);
    EXPECT_GE(m.rmse, m.mae);
    EXPECT_GE(m.mae, 0.0);
    if (m.r2) EXPECT_LE(*m.r2, 1.0);
  }
}

TEST(Metrics, ShiftInvariance) {
  Rng rng(3);
  const auto t = draw(rng, 40, 0, 1);
  const auto p = draw(rng, 40, 0, 1);
  auto ts = t, ps = p;
  for (auto& v : ts) v += 12.0;
  for (auto& v : ps) v += 12.0;
  const MetricSet a = metrics(t, p), b = metrics(ts, ps);
  EXPECT_NEAR(a.rmse, b.rmse, 1e-12);
  EXPECT_NEAR(a.mae, b.mae, 1e-12);
  EXPECT_NEAR(*a.r2, *b.r2, 1e-10);
}

TEST(Quantile, LinearInterpolationRule) {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  EXPECT_EQ(empirical_quantile(s, 0.0), 1.0);
  EXPECT_EQ(empirical_quantile(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(empirical_quantile(s, 0.25), 1.75);
  const std::vector<double> one{7.0};
  EXPECT_EQ(empirical_quantile(one, 0.3), 7.0);
}

TEST(Quantile, TwoQuantilesAreMinAndMax) {
  const std::vector<double> t{3.0, -1.0, 8.0}, p{0.5, 2.0, 4.0, 1.0};
  const auto q = quantile_compare(t, p, 2);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].probability, 0.0);
  EXPECT_EQ(q[0].observed, -1.0);
  EXPECT_EQ(q[0].predicted, 0.5);
  EXPECT_EQ(q[1].probability, 1.0);
  EXPECT_EQ(q[1].observed, 8.0);
  EXPECT_EQ(q[1].predicted, 4.0);
}

TEST(Quantile, SelfComparisonOnDiagonal) {
  Rng rng(8);
  const auto t = draw(rng, 57, -3, 9);
  for (const auto& pair : quantile_compare(t, t, 25)) {
    EXPECT_EQ(pair.observed, pair.predicted);
  }
}

TEST(Quantile, ShiftByOneOffsetsPairs) {
  const std::vector<double> t{0.25, 1.5, 2.0, 9.0, 4.0};
  std::vector<double> p = t;
  for (auto& v : p) v += 1.0;
  for (const auto& pair : quantile_compare(t, p, 9)) {
    EXPECT_NEAR(pair.predicted - pair.observed, 1.0, 1e-14);
  }
}

TEST(Quantile, Guards) {
  const std::vector<double> t{1.0};
  EXPECT_THROW(quantile_compare(t, t, 1), Error);
  EXPECT_THROW(quantile_compare({}, t, 3), Error);
}

TEST(GroupMetrics, SingleGroupSingleModel) {
  const std::vector<std::string> g{"a", "a", "a"};
  const std::vector<double> y{1.0, 2.0, 4.0};
  const std::vector<ModelPredictions> models{{"rf", {1.0, 2.5, 3.0}}};
  const auto rows = per_group_metrics(g, y, models);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].group, "a");
  EXPECT_EQ(rows[0].model, "rf");
  EXPECT_TRUE(rows[0].best_r2);
  EXPECT_TRUE(rows[0].best_rmse);
  EXPECT_EQ(rows[0].metrics.n, 3u);
}

TEST(GroupMetrics, IdenticalPredictionsBothFlagged) {
  const std::vector<std::string> g{"b", "a", "b", "a", "b"};
  const std::vector<double> y{1.0, 2.0, 3.0, 4.0, 6.0};
  const std::vector<double> p{1.5, 2.0, 2.0, 5.0, 6.5};
  std::vector<double> worse = p;
  for (auto& v : worse) v += 0.5;
  const std::vector<ModelPredictions> models{{"m1", p}, {"m2", p}, {"m3", worse}};
  const auto rows = per_group_metrics(g, y, models);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].group, "a");
  EXPECT_EQ(rows[3].group, "b");
  for (std::size_t base : {0u, 3u}) {
    EXPECT_TRUE(rows[base].best_r2 && rows[base + 1].best_r2);
    EXPECT_TRUE(rows[base].best_rmse && rows[base + 1].best_rmse);
    EXPECT_FALSE(rows[base + 2].best_r2 || rows[base + 2].best_rmse);
  }
  // Group a holds rows 1 and 3 only.
  const OracleMetrics o = oracle({2.0, 4.0}, {2.0, 5.0});
  EXPECT_NEAR(rows[0].metrics.rmse, double(o.rmse), 1e-14);
}

TEST(GroupMetrics, BestIndexBreaksTiesLow) {
  std::vector<MetricSet> m(3);
  m[0] = {1.0, 0.5, 0.9, 4};
  m[1] = {0.8, 0.5, 0.95, 4};
  m[2] = {0.8, 0.4, 0.95, 4};
  const BestFlags f = flag_best(m);
  EXPECT_EQ(f.r2_index, 1u);
  EXPECT_EQ(f.rmse_index, 1u);
  EXPECT_EQ(f.r2, (std::vector<bool>{false, true, true}));
  std::vector<MetricSet> none(2);
  EXPECT_EQ(flag_best(none).r2_index, BestFlags::npos);
}

TEST(GroupMetrics, RejectsUntaggedRows) {
  const std::vector<std::string> g{"a", ""};
  const std::vector<double> y{1.0, 2.0};
  const std::vector<ModelPredictions> models{{"rf", {1.0, 2.0}}};
  EXPECT_THROW(per_group_metrics(g, y, models), Error);
}

// Flags applied to the reference table land on the cells published as best.
TEST(Reference, FlagsReproduceMarkedCells) {
  const std::map<std::string, std::string> bold{
      {"Arbuckle Reservoir", "XGBoost"}, {"Fort Cobb Reservoir", "RF"},
      {"Foss Reservoir", "RF"},          {"Hugo Lake", "RF"},
      {"Lake Texoma", "RF"},             {"Pine Creek Lake", "RF"},
      {"Sardis Lake", "XGBoost"},        {"Tom Steed Reservoir", "RF"},
      {"Waurika Lake", "XGBoost"}};
  std::map<std::string, std::vector<ReferenceMetric>> by_group;
  for (const ReferenceMetric& r : reference_metrics()) {
    by_group[std::string(r.group)].push_back(r);
  }
  ASSERT_EQ(by_group.size(), bold.size());
  for (const auto& [group, rows] : by_group) {
    ASSERT_EQ(rows.size(), 3u);
    std::vector<MetricSet> m;
    for (const auto& r : rows) m.push_back({r.rmse, 0.0, r.r2, 1});
    const BestFlags f = flag_best(m);
    EXPECT_EQ(rows[f.r2_index].model, bold.at(group)) << group;
    EXPECT_EQ(rows[f.rmse_index].model, bold.at(group)) << group;
  }
}

TEST(Reference, TexomaAnchor) {
  bool found = false;
  for (const ReferenceMetric& r : reference_metrics()) {
    if (r.group == "Lake Texoma" && r.model == "RF") {
      EXPECT_EQ(r.r2, 0.968);
      EXPECT_EQ(r.rmse, 1.283);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Csv, ScatterBounds) {
  std::ostringstream out;
  const std::vector<double> t{10.0, 20.0}, p{10.5, 23.0};
  write_scatter_csv(out, t, p);
  EXPECT_EQ(out.str(),
            "observed,predicted,lower_10pct,upper_10pct,within_10pct\n"
            "10,10.5,9,11,1\n"
            "20,23,18,22,0\n");
}

TEST(Csv, QqAndGroupHeaders) {
  std::ostringstream qq;
  const std::vector<double> t{1.0, 2.0, 3.0};
  write_qq_csv(qq, quantile_compare(t, t, 3));
  EXPECT_EQ(qq.str(), "probability,observed,predicted\n0,1,1\n0.5,2,2\n1,3,3\n");

  std::ostringstream gm;
  const std::vector<std::string> g{"a", "a"};
  const std::vector<double> y{1.0, 1.0};
  const std::vector<ModelPredictions> models{{"rf", {1.0, 3.0}}};
  write_group_metrics_csv(gm, per_group_metrics(g, y, models));
  EXPECT_EQ(gm.str(),
            "group,model,n,rmse,mae,r2,best_r2,best_rmse\n"
            "a,rf,2,1.4142135623730951,1,,0,1\n");
}

TEST(Csv, R2Curve) {
  std::vector<IncrementalRecord> recs(2);
  recs[0].n_inputs = 1;
  recs[0].seed = 7;
  recs[0].r2_train = 0.5;
  recs[0].r2_test = 0.25;
  recs[0].r2_test_symbolic = NAN;
  recs[1].n_inputs = 2;
  recs[1].seed = 7;
  recs[1].r2_train = 1;
  recs[1].r2_test = 0.75;
  recs[1].r2_test_symbolic = 0.5;
  std::ostringstream out;
  write_r2_curve_csv(out, recs);
  EXPECT_EQ(out.str(),
            "n_inputs,seed,r2_train,r2_test,r2_test_symbolic\n1,7,0.5,0.25,\n2,7,1,0.75,0.5\n");
}

TEST(Report, EndsWithLabeledReferences) {
  ReportInputs in;
  in.overall.push_back({"rf", MetricSet{1.0, 0.5, 0.9, 10}});
  in.feature_names = {"a", "b"};
  in.importance_percentage = {75.0, 25.0};
  std::ostringstream out;
  write_report_markdown(out, in);
  const std::string s = out.str();
  EXPECT_NE(s.find("| rf |"), std::string::npos);
  EXPECT_NE(s.find(std::string(kReferenceLabel)), std::string::npos);
  EXPECT_NE(s.find("Lake Texoma"), std::string::npos);
  std::ostringstream again;
  write_report_markdown(again, in);
  EXPECT_EQ(again.str(), s);
}

}  // namespace
}  // namespace rwt
