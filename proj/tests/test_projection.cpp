#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace caltrend;
using namespace testing_support;

namespace {

FeatureMatrix matrix_from(const std::vector<FeatureVector>& rows) {
  FeatureMatrix m;
  for (std::size_t i = 0; i < rows.size(); ++i) m.user_ids.push_back(static_cast<UserId>(i));
  m.rows = rows;
  return m;
}

std::vector<double> row_of(const std::vector<double>& d, std::size_t n, std::size_t i) {
  return {d.begin() + static_cast<std::ptrdiff_t>(i * n), d.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)};
}

DenseMatrix random_dense(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  DenseMatrix x(n, d);
  for (auto& v : x.data) v = nd(gen);
  return x;
}

// Three well-separated Gaussian blobs of `per` points in 11 dimensions.
DenseMatrix three_blobs(std::size_t per, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  DenseMatrix x(3 * per, kFeatureCount);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) x(c * per + i, j) = nd(gen) + (j == c ? 10.0 : 0.0);
    }
  }
  return x;
}

std::vector<std::vector<double>> to_rows(const DenseMatrix& x) {
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < x.rows; ++i) r.emplace_back(x.row(i).begin(), x.row(i).end());
  return r;
}

std::vector<std::vector<double>> to_rows(const std::vector<Point2>& y) {
  std::vector<std::vector<double>> r;
  for (const auto& p : y) r.push_back({p[0], p[1]});
  return r;
}

double diameter(const std::vector<Point2>& y) {
  double d = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) d = std::max(d, std::hypot(y[i][0] - y[j][0], y[i][1] - y[j][1]));
  }
  return d;
}

}  // namespace

TEST(Weights, OnesLeavesMatrixUnchanged) {
  FeatureMatrix m = matrix_from({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, {-1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1}});
  EXPECT_EQ(apply_weights(m, WeightVector::ones()).rows, m.rows);
}

TEST(Weights, ZeroWeightZeroesColumn) {
  FeatureMatrix m = matrix_from({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}, {-1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 5}});
  auto w = WeightVector::ones();
  w.values[3] = 0.0;
  for (const auto& r : apply_weights(m, w).rows) EXPECT_EQ(r[3], 0.0);
}

TEST(Weights, SingleFeatureDistancesAreOneDimensional) {
  FeatureMatrix m = matrix_from({{0, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9}, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, {3, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5}});
  WeightVector w{};
  w.values[0] = 1.0;
  const auto d = squared_distances(DenseMatrix::from(apply_weights(m, w)));
  const std::vector<double> expected = {0, 1, 9, 1, 0, 4, 9, 4, 0};
  EXPECT_EQ(d, expected);
}

TEST(Weights, ScaledDistanceIdentity) {
  auto x = random_dense(6, kFeatureCount, 3);
  FeatureMatrix m;
  for (std::size_t i = 0; i < 6; ++i) {
    FeatureVector r;
    std::copy(x.row(i).begin(), x.row(i).end(), r.begin());
    m.rows.push_back(r);
    m.user_ids.push_back(static_cast<UserId>(i));
  }
  WeightVector w{{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.0}};
  const auto d = squared_distances(DenseMatrix::from(apply_weights(m, w)));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t k = 0; k < 6; ++k) {
      double s = 0;
      for (std::size_t j = 0; j < kFeatureCount; ++j) s += w.values[j] * w.values[j] * std::pow(x(i, j) - x(k, j), 2);
      EXPECT_NEAR(d[i * 6 + k], s, 1e-12);
    }
  }
}

TEST(Weights, ValidationAndParsing) {
  WeightVector zero{};
  EXPECT_CALTREND_ERROR(zero.validate(), ErrorCode::kDegenerateWeights);
  auto w = WeightVector::ones();
  w.values[2] = 1.5;
  EXPECT_CALTREND_ERROR(w.validate(), ErrorCode::kInvalidArgument);
  w.values[2] = -0.1;
  EXPECT_CALTREND_ERROR(w.validate(), ErrorCode::kInvalidArgument);
  w.values[2] = std::nan("");
  EXPECT_CALTREND_ERROR(w.validate(), ErrorCode::kInvalidArgument);
  EXPECT_EQ(WeightVector::parse("1,1,1,1,1,1,1,1,1,1,1"), WeightVector::ones());
  EXPECT_EQ(WeightVector::parse("0,0.5,0,0,0,0,0,0,0,0,0").values[1], 0.5);
  EXPECT_CALTREND_ERROR(WeightVector::parse("1,1,1"), ErrorCode::kInvalidArgument);
  EXPECT_CALTREND_ERROR(WeightVector::parse("1,1,1,1,1,1,1,1,1,1,1,1"), ErrorCode::kInvalidArgument);
  EXPECT_CALTREND_ERROR(WeightVector::parse("1,1,1,1,x,1,1,1,1,1,1"), ErrorCode::kInvalidArgument);
  FeatureMatrix m = matrix_from({FeatureVector{}, FeatureVector{}});
  EXPECT_CALTREND_ERROR(apply_weights(m, zero), ErrorCode::kDegenerateWeights);
}

TEST(Weights, Presets) {
  const auto t = weight_preset("temporal");
  for (std::size_t j = 0; j < kFeatureCount; ++j) EXPECT_EQ(t.values[j], (j >= 2 && j <= 8) ? 1.0 : 0.0) << j;
  const auto x = weight_preset("text");
  EXPECT_EQ(x.values[9] + x.values[10], 2.0);
  const auto v = weight_preset("volume");
  EXPECT_EQ(v.values[0] + v.values[1], 2.0);
  EXPECT_EQ(weight_preset("all"), WeightVector::ones());
  for (const char* name : {"temporal", "text", "volume"}) EXPECT_NO_THROW(weight_preset(name).validate());
  EXPECT_CALTREND_ERROR(weight_preset("social"), ErrorCode::kNotFound);
}

TEST(Calibration, EquidistantPointsPerplexityTwo) {
  const std::vector<double> d = {0, 1, 1, 1, 0, 1, 1, 1, 0};
  const auto cal = perplexity_calibration(d, 3, 2.0);
  EXPECT_TRUE(cal.unconverged.empty());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto p = conditional_distribution(d, 3, i, cal.sigma[i]);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(p[j], j == i ? 0.0 : 0.5, 1e-15);
    EXPECT_NEAR(cal.entropy_bits[i], 1.0, 1e-12);
  }
}

TEST(Calibration, DuplicateNeighbourDominatesAndTerminates) {
  // Points 0 and 1 coincide; 2, 3, 4 are further out.
  DenseMatrix x(5, 1);
  x.data = {0.0, 0.0, 1.0, 2.0, 3.0};
  const auto d = squared_distances(x);
  const auto cal = perplexity_calibration(d, 5, 2.0);
  for (std::size_t i : cal.unconverged) EXPECT_GT(i, 1u);
  const auto p = conditional_distribution(d, 5, 0, cal.sigma[0]);
  EXPECT_GT(p[1], p[2]);
  EXPECT_GT(p[1], p[3] + p[4]);
  EXPECT_NEAR(oracle::conditional_entropy_bits(row_of(d, 5, 0), 0, cal.sigma[0]), 1.0, 1e-4);
  // Shrinking sigma sends all mass to the duplicate.
  const auto sharp = conditional_distribution(d, 5, 0, cal.sigma[0] * 1e-3);
  EXPECT_NEAR(sharp[1], 1.0, 1e-12);
}

TEST(Calibration, UnreachableTargetKeepsBestAndWarns) {
  // Every point has three exact duplicates, so entropy never drops below log2(3).
  DenseMatrix x(4, 2);
  const auto d = squared_distances(x);
  const auto cal = perplexity_calibration(d, 4, 2.0);
  EXPECT_EQ(cal.unconverged.size(), 4u);
  ASSERT_EQ(cal.warnings.size(), 1u);
  for (double h : cal.entropy_bits) EXPECT_NEAR(h, std::log2(3.0), 1e-12);
  for (double s : cal.sigma) EXPECT_TRUE(std::isfinite(s));
}

TEST(Calibration, RandomFiftyPointsOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = random_dense(50, kFeatureCount, seed);
    const auto d = squared_distances(x);
    for (double perp : {5.0, 16.0}) {
      const auto cal = perplexity_calibration(d, 50, perp);
      EXPECT_TRUE(cal.unconverged.empty());
      for (std::size_t i = 0; i < 50; ++i) {
        const double h = oracle::conditional_entropy_bits(row_of(d, 50, i), i, cal.sigma[i]);
        EXPECT_LE(std::abs(h - std::log2(perp)), 1e-4) << "seed " << seed << " point " << i;
      }
    }
  }
}

TEST(Calibration, RejectsBadPerplexity) {
  const std::vector<double> d(16, 1.0);
  EXPECT_CALTREND_ERROR(perplexity_calibration(d, 4, 1.5), ErrorCode::kInvalidParams);
  EXPECT_CALTREND_ERROR(perplexity_calibration(d, 4, 3.5), ErrorCode::kInvalidParams);
}

TEST(JointProbabilities, SymmetricAndNormalized) {
  const auto x = random_dense(40, kFeatureCount, 9);
  const auto d = squared_distances(x);
  const auto cal = perplexity_calibration(d, 40, 10.0);
  const auto p = joint_probabilities(d, 40, cal);
  double sum = 0;
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(p[i * 40 + i], 0.0);
    for (std::size_t j = 0; j < 40; ++j) {
      EXPECT_EQ(p[i * 40 + j], p[j * 40 + i]);
      sum += p[i * 40 + j];
    }
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(TsneParams, Validation) {
  TsneParams p;
  EXPECT_CALTREND_ERROR(p.validate(3), ErrorCode::kInvalidParams);
  EXPECT_CALTREND_ERROR(p.validate(30), ErrorCode::kInvalidParams);  // perplexity 30 > n-1
  EXPECT_TRUE(p.validate(1025).empty());
  EXPECT_FALSE(p.validate(60).empty());  // 30 > 59/3 warns
  p.perplexity = 1.0;
  EXPECT_CALTREND_ERROR(p.validate(100), ErrorCode::kInvalidParams);
  p = TsneParams{};
  p.iterations = 100;
  EXPECT_CALTREND_ERROR(p.validate(100), ErrorCode::kInvalidParams);
  p = TsneParams{};
  p.learning_rate = 0;
  EXPECT_CALTREND_ERROR(p.validate(100), ErrorCode::kInvalidParams);
}

TEST(TsneParams, JsonRoundTrip) {
  TsneParams p;
  p.perplexity = 12.5;
  p.seed = 99;
  p.iterations = 600;
  EXPECT_EQ(tsne_params_from_json(to_json(p)), p);
  EXPECT_EQ(tsne_params_from_json(nlohmann::json::object()), TsneParams{});
  EXPECT_CALTREND_ERROR(tsne_params_from_json({{"perplexity", "high"}}), ErrorCode::kInvalidParams);
  EXPECT_CALTREND_ERROR(tsne_params_from_json(nlohmann::json::array()), ErrorCode::kInvalidParams);
}

TEST(Tsne, ThreeBlobsTrustworthy) {
  const auto x = three_blobs(100, 5);
  TsneParams params;
  params.seed = 3;
  const auto r = tsne(x, params);
  ASSERT_EQ(r.coordinates.size(), 300u);
  EXPECT_GE(oracle::trustworthiness(to_rows(x), to_rows(r.coordinates), 10), 0.85);
}

TEST(Tsne, SeedDeterminismAndSensitivity) {
  const auto x = random_dense(60, kFeatureCount, 2);
  TsneParams params;
  params.perplexity = 10;
  params.iterations = 400;
  params.seed = 7;
  const auto a = tsne(x, params), b = tsne(x, params);
  EXPECT_EQ(a.coordinates, b.coordinates);
  EXPECT_EQ(a.kl_trace, b.kl_trace);
  params.seed = 8;
  EXPECT_NE(tsne(x, params).coordinates, a.coordinates);
}

TEST(Tsne, KlTraceShapeAndDescent) {
  const auto x = three_blobs(40, 8);
  TsneParams params;
  params.perplexity = 20;
  const auto r = tsne(x, params);
  ASSERT_EQ(r.kl_trace.size(), 20u);
  for (std::size_t i = 0; i < r.kl_trace.size(); ++i) {
    EXPECT_EQ(r.kl_trace[i].iteration, static_cast<int>(50 * (i + 1)));
    EXPECT_GE(r.kl_trace[i].kl, 0.0);
  }
  const auto* first = r.first_post_exaggeration();
  ASSERT_NE(first, nullptr);
  EXPECT_EQ(first->iteration, 300);
  EXPECT_LT(r.final_kl(), first->kl);
  for (std::size_t i = 1; i < r.kl_trace.size(); ++i) {
    if (r.kl_trace[i - 1].iteration >= 300) {
      EXPECT_LE(r.kl_trace[i].kl, r.kl_trace[i - 1].kl + 1e-3);
    }
  }
  for (const auto& p : r.coordinates) EXPECT_TRUE(std::isfinite(p[0]) && std::isfinite(p[1]));
}

TEST(Tsne, IdenticalRowsCollapse) {
  TsneParams params;
  params.perplexity = 2;
  DenseMatrix same(4, kFeatureCount);
  for (auto& v : same.data) v = 0.7;
  const auto r = tsne(same, params);
  const auto reference = tsne(random_dense(4, kFeatureCount, 1), params);
  const double ref_diameter = diameter(reference.coordinates);
  ASSERT_GT(ref_diameter, 0.0);
  EXPECT_LT(diameter(r.coordinates), 0.01 * ref_diameter);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Tsne, ObserverSeesCheckpointsAndCanCancel) {
  const auto x = random_dense(20, 3, 4);
  TsneParams params;
  params.perplexity = 5;
  std::vector<KlCheckpoint> seen;
  TsneObserver obs;
  obs.on_checkpoint = [&](const KlCheckpoint& c) { seen.push_back(c); };
  const auto r = tsne(x, params, obs);
  EXPECT_EQ(seen, r.kl_trace);
  int calls = 0;
  obs.cancelled = [&] { return ++calls > 10; };
  EXPECT_CALTREND_ERROR(tsne(x, params, obs), ErrorCode::kCancelled);
}

TEST(Tsne, OverflowIsAnErrorNotNan) {
  const auto x = random_dense(10, 3, 4);
  TsneParams params;
  params.perplexity = 3;
  params.learning_rate = 1e308;
  EXPECT_CALTREND_ERROR(tsne(x, params), ErrorCode::kNumericalOverflow);
}

TEST(WeightZeroInvariance, DifferingColumnIgnored) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  std::vector<FeatureVector> a(40), b;
  for (auto& r : a) {
    for (auto& v : r) v = nd(gen);
  }
  b = a;
  for (auto& r : b) r[6] = nd(gen) * 100.0;
  auto w = WeightVector::ones();
  w.values[6] = 0.0;
  TsneParams params;
  params.perplexity = 10;
  params.iterations = 300;
  params.exaggeration_iterations = 100;
  params.momentum_switch_iteration = 100;
  const auto ra = project(standardize(matrix_from(a)), w, params);
  const auto rb = project(standardize(matrix_from(b)), w, params);
  EXPECT_EQ(ra.coordinates, rb.coordinates);
  EXPECT_EQ(ra.weights, w);
}

TEST(Scatter, PassThroughAndTranspose) {
  FeatureMatrix m = matrix_from({FeatureVector{}, FeatureVector{}});
  m.rows[0][kWorkRate] = 0.7;
  m.rows[0][kHomeRate] = 0.2;
  const auto pts = feature_scatter(m, kWorkRate, kHomeRate);
  EXPECT_EQ(pts[0], (Point2{0.7, 0.2}));
  EXPECT_EQ(feature_scatter(m, kHomeRate, kWorkRate)[0], (Point2{0.2, 0.7}));
  EXPECT_CALTREND_ERROR(feature_scatter(m, 3, 3), ErrorCode::kInvalidArgument);
  EXPECT_CALTREND_ERROR(feature_scatter(m, 3, 11), ErrorCode::kInvalidArgument);
}

TEST(Scatter, BoundsMatchFeatureRange) {
  const auto corpus = small_corpus(20, 3);
  const auto raw = build_feature_matrix(label_store(build_store(corpus.events), ConceptLexicon::defaults()));
  for (std::size_t x = 0; x < kFeatureCount; ++x) {
    const std::size_t y = (x + 1) % kFeatureCount;
    const auto pts = feature_scatter(raw, x, y);
    double lo = 1e300, hi = -1e300;
    for (const auto& r : raw.rows) {
      lo = std::min(lo, r[x]);
      hi = std::max(hi, r[x]);
    }
    double plo = 1e300, phi = -1e300;
    for (const auto& p : pts) {
      plo = std::min(plo, p[0]);
      phi = std::max(phi, p[0]);
    }
    EXPECT_EQ(plo, lo);
    EXPECT_EQ(phi, hi);
  }
}

TEST(ProjectionExport, TableAndMetadata) {
  const auto x = random_dense(8, kFeatureCount, 1);
  TsneParams params;
  params.perplexity = 2;
  params.iterations = 250;
  const auto r = tsne(x, params);
  const std::vector<UserId> ids = {10, 11, 12, 13, 14, 15, 16, 17};
  std::ostringstream out;
  write_projection_table(out, ids, r);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("user_id\tx\ty\n10\t", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
  const auto meta = run_metadata(r);
  EXPECT_EQ(meta["seed"], 0);
  EXPECT_EQ(meta["final_kl"], r.final_kl());
  const auto j = to_json(r, ids);
  EXPECT_EQ(j["coordinates"][3]["user_id"], 13);
  EXPECT_EQ(j["coordinates"][3]["x"], r.coordinates[3][0]);
}
