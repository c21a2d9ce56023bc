#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "caltrend/error.hpp"
#include "caltrend/features.hpp"
#include "caltrend/random.hpp"

namespace caltrend {

using Point2 = std::array<double, 2>;

// Row-major dense matrix used as t-SNE input.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  static DenseMatrix from(const FeatureMatrix& m) {
    DenseMatrix d(m.size(), kFeatureCount);
    for (std::size_t i = 0; i < m.size(); ++i) {
      std::copy(m.rows[i].begin(), m.rows[i].end(), d.data.begin() + static_cast<std::ptrdiff_t>(i * kFeatureCount));
    }
    return d;
  }
};

// ---------------------------------------------------------------- weights --

struct WeightVector {
  std::array<double, kFeatureCount> values;

  static WeightVector ones() {
    WeightVector w;
    w.values.fill(1.0);
    return w;
  }

  void validate() const {
    bool any_positive = false;
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::kInvalidArgument, "weights must lie in [0,1]");
      }
      any_positive |= v > 0.0;
    }
    if (!any_positive) throw Error(ErrorCode::kDegenerateWeights, "all weights are zero");
  }

  // "1,0.5,..." with exactly 11 entries.
  static WeightVector parse(std::string_view text) {
    WeightVector w{};
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string_view::npos) comma = text.size();
      if (count == kFeatureCount) throw Error(ErrorCode::kInvalidArgument, "expected 11 weights");
      std::string cell(text.substr(pos, comma - pos));
      std::size_t used = 0;
      try {
        w.values[count] = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument, "bad weight '" + cell + "'");
      }
      if (used != cell.size()) throw Error(ErrorCode::kInvalidArgument, "bad weight '" + cell + "'");
      ++count;
      pos = comma + 1;
    }
    if (count != kFeatureCount) throw Error(ErrorCode::kInvalidArgument, "expected 11 weights");
    return w;
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

// Category presets: "all", "temporal" (weekend/weekday and the five hour
// bands), "text" (work/home rates), "volume" (modification rate and monthly
// volume).
inline WeightVector weight_preset(std::string_view name) {
  WeightVector w{};
  if (name == "all") return WeightVector::ones();
  if (name == "temporal") {
    for (std::size_t j = kWeekendRatio; j <= kNight; ++j) w.values[j] = 1.0;
  } else if (name == "text") {
    w.values[kWorkRate] = w.values[kHomeRate] = 1.0;
  } else if (name == "volume") {
    w.values[kModificationRate] = w.values[kMonthlyVolume] = 1.0;
  } else {
    throw Error(ErrorCode::kNotFound, "unknown preset '" + std::string(name) + "'");
  }
  return w;
}

// Column j scaled by w_j, so squared distances become sum_j w_j^2 (x_ij - x_kj)^2.
inline FeatureMatrix apply_weights(const FeatureMatrix& standardized, const WeightVector& w) {
  w.validate();
  FeatureMatrix out = standardized;
  for (auto& row : out.rows) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) row[j] *= w.values[j];
  }
  return out;
}

inline std::vector<double> squared_distances(const DenseMatrix& x) {
  const std::size_t n = x.rows;
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) {
        const double diff = x(i, j) - x(k, j);
        s += diff * diff;
      }
      d[i * n + k] = d[k * n + i] = s;
    }
  }
  return d;
}

// ------------------------------------------------------------ calibration --

struct CalibrationResult {
  std::vector<double> sigma;         // Gaussian bandwidth per point
  std::vector<double> entropy_bits;  // achieved entropy per point
  std::vector<std::size_t> unconverged;
  std::vector<std::string> warnings;
};

inline constexpr double kEntropyTolerance = 1e-4;  // contract
inline constexpr double kEntropySearchTolerance = 1e-7;  // search stops here
inline constexpr int kCalibrationMaxIterations = 64;

namespace detail {

// Fills p with p_{j|i} for precision beta = 1/(2 sigma^2) and returns the
// entropy in bits. Distances are shifted by the row minimum for stability.
inline double conditional_row(std::span<const double> sqdist_row, std::size_t i, double beta, std::span<double> p) {
  const std::size_t n = sqdist_row.size();
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) dmin = std::min(dmin, sqdist_row[j]);
  }
  double sum = 0.0, weighted = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) {
      p[j] = 0.0;
      continue;
    }
    const double shifted = sqdist_row[j] - dmin;
    p[j] = std::exp(-beta * shifted);
    sum += p[j];
    weighted += p[j] * shifted;
  }
  for (std::size_t j = 0; j < n; ++j) p[j] /= sum;
  const double h_nats = std::log(sum) + beta * weighted / sum;
  return h_nats / std::log(2.0);
}

}  // namespace detail

// Binary search, per point, for the bandwidth whose conditional distribution
// has entropy log2(perplexity). Points that miss the tolerance after the
// iteration budget keep the best bandwidth found and are reported.
inline CalibrationResult perplexity_calibration(std::span<const double> sqdist, std::size_t n, double perplexity) {
  if (n < 2 || sqdist.size() != n * n) throw Error(ErrorCode::kInvalidArgument, "distance matrix shape");
  if (!(perplexity >= 2.0) || perplexity > static_cast<double>(n - 1)) {
    throw Error(ErrorCode::kInvalidParams, "perplexity must lie in [2, n-1]");
  }
  const double target = std::log2(perplexity);
  CalibrationResult out;
  out.sigma.resize(n);
  out.entropy_bits.resize(n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = sqdist.subspan(i * n, n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += row[j];
    mean /= static_cast<double>(n - 1);
    double beta = mean > 0.0 ? 1.0 / mean : 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double best_beta = beta, best_gap = std::numeric_limits<double>::infinity(), best_h = 0.0;
    for (int it = 0; it < kCalibrationMaxIterations; ++it) {
      const double h = detail::conditional_row(row, i, beta, p);
      const double gap = std::abs(h - target);
      if (gap < best_gap) {
        best_gap = gap;
        best_beta = beta;
        best_h = h;
      }
      if (gap <= kEntropySearchTolerance) break;
      if (h > target) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    out.sigma[i] = std::sqrt(1.0 / (2.0 * best_beta));
    out.entropy_bits[i] = best_h;
    if (best_gap > kEntropyTolerance) out.unconverged.push_back(i);
  }
  if (!out.unconverged.empty()) {
    out.warnings.push_back(std::to_string(out.unconverged.size()) +
                           " point(s) did not reach the target entropy; best bandwidth kept");
  }
  return out;
}

// Conditional distribution p_{.|i} implied by a bandwidth.
inline std::vector<double> conditional_distribution(std::span<const double> sqdist, std::size_t n, std::size_t i,
                                                    double sigma) {
  std::vector<double> p(n);
  detail::conditional_row(sqdist.subspan(i * n, n), i, 1.0 / (2.0 * sigma * sigma), p);
  return p;
}

// Symmetrized joint affinities p_ij = (p_{j|i} + p_{i|j}) / 2n.
inline std::vector<double> joint_probabilities(std::span<const double> sqdist, std::size_t n,
                                               const CalibrationResult& cal) {
  std::vector<double> cond(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = conditional_distribution(sqdist, n, i, cal.sigma[i]);
    std::copy(row.begin(), row.end(), cond.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  std::vector<double> p(n * n, 0.0);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = (cond[i * n + j] + cond[j * n + i]) / denom;
  }
  return p;
}

// ------------------------------------------------------------------ t-SNE --

struct TsneParams {
  double perplexity = 30.0;
  double learning_rate = 200.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  std::uint64_t seed = 0;
  int checkpoint_interval = 50;

  friend bool operator==(const TsneParams&, const TsneParams&) = default;

  // Hard limits throw; perplexity above (n-1)/3 only warns, since the
  // calibration still works up to n-1.
  std::vector<std::string> validate(std::size_t n) const {
    if (n < 4) throw Error(ErrorCode::kInvalidParams, "t-SNE needs at least 4 points");
    if (!(perplexity >= 2.0)) throw Error(ErrorCode::kInvalidParams, "perplexity must be >= 2");
    if (perplexity > static_cast<double>(n - 1)) throw Error(ErrorCode::kInvalidParams, "perplexity must be <= n-1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw Error(ErrorCode::kInvalidParams, "learning_rate must be > 0");
    }
    if (exaggeration_iterations < 0 || iterations < exaggeration_iterations) {
      throw Error(ErrorCode::kInvalidParams, "iterations must be >= exaggeration duration");
    }
    if (!(early_exaggeration >= 1.0)) throw Error(ErrorCode::kInvalidParams, "exaggeration factor must be >= 1");
    if (checkpoint_interval < 1) throw Error(ErrorCode::kInvalidParams, "checkpoint_interval must be >= 1");
    std::vector<std::string> warnings;
    if (perplexity > static_cast<double>(n - 1) / 3.0) {
      warnings.push_back("perplexity exceeds (n-1)/3; neighbourhoods cover most of the data");
    }
    return warnings;
  }
};

struct KlCheckpoint {
  int iteration = 0;  // updates applied so far
  double kl = 0.0;

  friend bool operator==(const KlCheckpoint&, const KlCheckpoint&) = default;
};

struct ProjectionResult {
  std::vector<Point2> coordinates;
  std::vector<KlCheckpoint> kl_trace;
  TsneParams params;
  WeightVector weights = WeightVector::ones();
  std::vector<std::string> warnings;

  // First checkpoint taken after early exaggeration has ended.
  const KlCheckpoint* first_post_exaggeration() const {
    for (const auto& c : kl_trace) {
      if (c.iteration > params.exaggeration_iterations) return &c;
    }
    return nullptr;
  }
  double final_kl() const { return kl_trace.empty() ? 0.0 : kl_trace.back().kl; }
};

struct TsneObserver {
  std::function<void(const KlCheckpoint&)> on_checkpoint;
  std::function<bool()> cancelled;
};

namespace detail {

// KL(P || Q) with Q from the current embedding.
inline double kl_divergence(std::span<const double> p, const std::vector<Point2>& y) {
  const std::size_t n = y.size();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
      z += 2.0 / (1.0 + dx * dx + dy * dy);
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = p[i * n + j];
      if (i == j || pij <= 0.0) continue;
      const double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
      const double q = std::max(1.0 / (1.0 + dx * dx + dy * dy) / z, std::numeric_limits<double>::min());
      kl += pij * std::log(pij / q);
    }
  }
  return std::max(kl, 0.0);
}

}  // namespace detail

// Per-point step cap as a fraction of the embedding's RMS radius. Without it a
// tiny, tightly coupled input (a few identical rows under exaggeration)
// overshoots the centroid every step and blows up.
inline constexpr double kMaxStepFraction = 0.5;

// Exact O(n^2) t-SNE with early exaggeration, momentum, per-coordinate gains
// and a radius-relative step cap. Deterministic for a given seed.
inline ProjectionResult tsne(const DenseMatrix& x, const TsneParams& params, const TsneObserver& observer = {}) {
  const std::size_t n = x.rows;
  ProjectionResult result;
  result.params = params;
  result.warnings = params.validate(n);

  const auto sqdist = squared_distances(x);
  const auto cal = perplexity_calibration(sqdist, n, params.perplexity);
  result.warnings.insert(result.warnings.end(), cal.warnings.begin(), cal.warnings.end());
  const auto p = joint_probabilities(sqdist, n, cal);

  Rng rng(params.seed);
  std::vector<Point2> y(n);
  for (auto& pt : y) {
    pt[0] = rng.normal(0.0, 1e-4);
    pt[1] = rng.normal(0.0, 1e-4);
  }
  std::vector<Point2> update(n, Point2{0.0, 0.0});
  std::vector<Point2> gains(n, Point2{1.0, 1.0});
  std::vector<Point2> grad(n);
  std::vector<double> num(n * n, 0.0);

  for (int iter = 0; iter < params.iterations; ++iter) {
    if (observer.cancelled && observer.cancelled()) throw Error(ErrorCode::kCancelled, "projection cancelled");
    const double exaggeration = iter < params.exaggeration_iterations ? params.early_exaggeration : 1.0;
    const double momentum = iter < params.momentum_switch_iteration ? params.initial_momentum : params.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = q;
        z += 2.0 * q;
      }
    }
    if (!(z > 0.0) || !std::isfinite(z)) throw Error(ErrorCode::kNumericalOverflow, "degenerate normalizer");

    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double q = num[i * n + j];
        const double mult = (exaggeration * p[i * n + j] - q / z) * q;
        gx += mult * (y[i][0] - y[j][0]);
        gy += mult * (y[i][1] - y[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }

    double radius = 0.0;
    for (const auto& pt : y) radius += pt[0] * pt[0] + pt[1] * pt[1];
    const double max_step = kMaxStepFraction * std::sqrt(radius / static_cast<double>(n));
    Point2 mean{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        const bool same_sign = (grad[i][d] > 0.0) == (update[i][d] > 0.0);
        gains[i][d] = same_sign ? std::max(gains[i][d] * 0.8, 0.01) : gains[i][d] + 0.2;
        update[i][d] = momentum * update[i][d] - params.learning_rate * gains[i][d] * grad[i][d];
      }
      const double step = std::hypot(update[i][0], update[i][1]);
      if (step > max_step) {
        update[i][0] *= max_step / step;
        update[i][1] *= max_step / step;
      }
      for (int d = 0; d < 2; ++d) {
        y[i][d] += update[i][d];
        mean[d] += y[i][d];
      }
    }
    for (auto& pt : y) {
      pt[0] -= mean[0] / static_cast<double>(n);
      pt[1] -= mean[1] / static_cast<double>(n);
      if (!std::isfinite(pt[0]) || !std::isfinite(pt[1])) {
        throw Error(ErrorCode::kNumericalOverflow, "non-finite coordinates at iteration " + std::to_string(iter));
      }
    }

    const int done = iter + 1;
    if (done % params.checkpoint_interval == 0 || done == params.iterations) {
      KlCheckpoint cp{done, detail::kl_divergence(p, y)};
      result.kl_trace.push_back(cp);
      if (observer.on_checkpoint) observer.on_checkpoint(cp);
    }
  }
  result.coordinates = std::move(y);
  return result;
}

// Standardized matrix -> weighted -> t-SNE, echoing the weights.
inline ProjectionResult project(const FeatureMatrix& standardized, const WeightVector& weights,
                                const TsneParams& params, const TsneObserver& observer = {}) {
  auto weighted = apply_weights(standardized, weights);
  auto result = tsne(DenseMatrix::from(weighted), params, observer);
  result.weights = weights;
  return result;
}

// Raw (unstandardized) values of two features, so axes stay interpretable.
inline std::vector<Point2> feature_scatter(const FeatureMatrix& raw, std::size_t x_index, std::size_t y_index) {
  if (x_index >= kFeatureCount || y_index >= kFeatureCount) {
    throw Error(ErrorCode::kInvalidArgument, "feature index out of range");
  }
  if (x_index == y_index) throw Error(ErrorCode::kInvalidArgument, "scatter axes must differ");
  std::vector<Point2> pts;
  pts.reserve(raw.size());
  for (const auto& r : raw.rows) pts.push_back({r[x_index], r[y_index]});
  return pts;
}

// ----------------------------------------------------------------- export --

inline nlohmann::json to_json(const TsneParams& p) {
  return {{"perplexity", p.perplexity},
          {"learning_rate", p.learning_rate},
          {"iterations", p.iterations},
          {"early_exaggeration", p.early_exaggeration},
          {"exaggeration_iterations", p.exaggeration_iterations},
          {"initial_momentum", p.initial_momentum},
          {"final_momentum", p.final_momentum},
          {"momentum_switch_iteration", p.momentum_switch_iteration},
          {"seed", p.seed},
          {"checkpoint_interval", p.checkpoint_interval}};
}

// Missing keys keep their defaults; wrong types throw kInvalidParams.
inline TsneParams tsne_params_from_json(const nlohmann::json& j) {
  TsneParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidParams, "params must be an object");
  try {
    if (j.contains("perplexity")) p.perplexity = j.at("perplexity").get<double>();
    if (j.contains("learning_rate")) p.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("iterations")) p.iterations = j.at("iterations").get<int>();
    if (j.contains("early_exaggeration")) p.early_exaggeration = j.at("early_exaggeration").get<double>();
    if (j.contains("exaggeration_iterations")) p.exaggeration_iterations = j.at("exaggeration_iterations").get<int>();
    if (j.contains("initial_momentum")) p.initial_momentum = j.at("initial_momentum").get<double>();
    if (j.contains("final_momentum")) p.final_momentum = j.at("final_momentum").get<double>();
    if (j.contains("momentum_switch_iteration")) {
      p.momentum_switch_iteration = j.at("momentum_switch_iteration").get<int>();
    }
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("checkpoint_interval")) p.checkpoint_interval = j.at("checkpoint_interval").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, e.what());
  }
  return p;
}

inline nlohmann::json to_json(const WeightVector& w) { return nlohmann::json(w.values); }

inline nlohmann::json to_json(const ProjectionResult& r, std::span<const UserId> ids) {
  nlohmann::json coords = nlohmann::json::array();
  for (std::size_t i = 0; i < r.coordinates.size(); ++i) {
    coords.push_back({{"user_id", i < ids.size() ? ids[i] : static_cast<UserId>(i)},
                      {"x", r.coordinates[i][0]},
                      {"y", r.coordinates[i][1]}});
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& c : r.kl_trace) trace.push_back({{"iteration", c.iteration}, {"kl", c.kl}});
  return {{"coordinates", coords},
          {"kl_trace", trace},
          {"params", to_json(r.params)},
          {"weights", to_json(r.weights)},
          {"warnings", r.warnings}};
}

// "user_id\tx\ty" rows.
inline void write_projection_table(std::ostream& out, std::span<const UserId> ids, const ProjectionResult& r) {
  out << "user_id\tx\ty\n";
  for (std::size_t i = 0; i < r.coordinates.size(); ++i) {
    out << ids[i] << '\t' << format_double(r.coordinates[i][0]) << '\t' << format_double(r.coordinates[i][1]) << '\n';
  }
}

inline nlohmann::json run_metadata(const ProjectionResult& r) {
  return {{"seed", r.params.seed},
          {"params", to_json(r.params)},
          {"weights", to_json(r.weights)},
          {"final_kl", r.final_kl()},
          {"warnings", r.warnings}};
}

}  // namespace caltrend
