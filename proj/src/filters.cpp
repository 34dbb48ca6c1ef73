#include "mcroi/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "mcroi/error.hpp"
#include "mcroi/rng.hpp"

namespace mcroi {

namespace {

// Absolute slack added to the MAD-scaled threshold so that exact-fit data,
// whose residuals sit at numerical-noise level, still counts as inliers.
constexpr double kResidualEps = 1e-9;

// Regression needs at least this many positive pairs; below it the pair is
// skipped entirely (and at least one more than the feature count to fit).
constexpr int kMinRegressionPairs = 10;

std::vector<std::array<int, 4>> monomial_exponents(int degree) {
  std::vector<std::array<int, 4>> exps;
  for (int total = 0; total <= degree; ++total) {
    for (int a = total; a >= 0; --a) {
      for (int b = total - a; b >= 0; --b) {
        for (int c = total - a - b; c >= 0; --c) {
          int d = total - a - b - c;
          exps.push_back({a, b, c, d});
        }
      }
    }
  }
  return exps;
}

void fill_features(const BBox& box, const std::vector<std::array<int, 4>>& exps,
                   double* out) {
  const double v[4] = {box.left, box.top, box.width, box.height};
  for (size_t j = 0; j < exps.size(); ++j) {
    double term = 1.0;
    for (int k = 0; k < 4; ++k) {
      for (int e = 0; e < exps[j][k]; ++e) term *= v[k];
    }
    out[j] = term;
  }
}

double median_of(std::vector<double> values) {
  size_t n = values.size();
  std::sort(values.begin(), values.end());
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mad_of(const std::vector<double>& values) {
  double med = median_of(values);
  std::vector<double> dev(values.size());
  for (size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
  return median_of(std::move(dev));
}

struct PositivePairs {
  std::vector<std::pair<BBox, BBox>> pairs;
  std::vector<size_t> source_record_index;  // parallel to pairs
};

// Cross-camera positive samples for an ordered pair: each source record
// paired with the first destination record sharing its reid at the frame.
PositivePairs collect_positive_pairs(const Trace& trace, int source, int dest) {
  PositivePairs out;
  std::map<int, std::map<int64_t, const DetectionRecord*>> dest_by_frame;
  for (const auto& rec : trace.records) {
    if (rec.camera_id == dest) {
      dest_by_frame[rec.frame_index].try_emplace(rec.reid_id, &rec);
    }
  }
  for (size_t i = 0; i < trace.records.size(); ++i) {
    const DetectionRecord& rec = trace.records[i];
    if (rec.camera_id != source) continue;
    auto frame_it = dest_by_frame.find(rec.frame_index);
    if (frame_it == dest_by_frame.end()) continue;
    auto match = frame_it->second.find(rec.reid_id);
    if (match == frame_it->second.end()) continue;
    out.pairs.emplace_back(rec.box, match->second->box);
    out.source_record_index.push_back(i);
  }
  return out;
}

std::map<int, std::map<int64_t, int>> dest_reid_counts(const Trace& trace, int dest) {
  std::map<int, std::map<int64_t, int>> m;
  for (const auto& rec : trace.records) {
    if (rec.camera_id == dest) m[rec.frame_index][rec.reid_id]++;
  }
  return m;
}

}  // namespace

int polynomial_feature_count(int degree) {
  return static_cast<int>(monomial_exponents(degree).size());
}

std::array<double, 4> normalized_bbox_features(const BBox& box, const FrameSpec& frame) {
  double w = static_cast<double>(frame.width_px);
  double h = static_cast<double>(frame.height_px);
  return {box.left / w, box.top / h, box.width / w, box.height / h};
}

std::array<double, 4> RegressionModel::predict(const BBox& source) const {
  auto exps = monomial_exponents(degree);
  std::vector<double> feat(exps.size());
  fill_features(source, exps, feat.data());
  std::array<double, 4> out{};
  for (int dim = 0; dim < 4; ++dim) {
    double acc = 0.0;
    for (size_t j = 0; j < feat.size(); ++j) {
      acc += coefficients[dim][j] * (feat[j] / feature_scale[j]);
    }
    out[dim] = acc;
  }
  return out;
}

double RegressionModel::residual(const BBox& source, const BBox& dest) const {
  std::array<double, 4> pred = predict(source);
  const double obs[4] = {dest.left, dest.top, dest.width, dest.height};
  double worst = 0.0;
  for (int dim = 0; dim < 4; ++dim) {
    worst = std::max(worst, std::abs(pred[dim] - obs[dim]));
  }
  return worst;
}

double RegressionModel::inlier_ratio() const {
  if (inlier_flags.empty()) return 0.0;
  double in = 0;
  for (uint8_t f : inlier_flags) in += f ? 1 : 0;
  return in / static_cast<double>(inlier_flags.size());
}

RegressionModel fit_ransac(const std::vector<std::pair<BBox, BBox>>& pairs,
                           const FilterConfig& config, int source_camera,
                           int dest_camera) {
  if (config.theta <= 0 || config.regression_degree < 1 || config.ransac_iterations < 1) {
    throw Error(ErrorKind::InvalidInput, "invalid filter config");
  }
  const auto exps = monomial_exponents(config.regression_degree);
  const int p = static_cast<int>(exps.size());
  const int n = static_cast<int>(pairs.size());
  if (n < p) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(p) + " pairs, got " + std::to_string(n));
  }

  Eigen::MatrixXd X(n, p), Y(n, 4);
  {
    std::vector<double> feat(p);
    for (int i = 0; i < n; ++i) {
      fill_features(pairs[i].first, exps, feat.data());
      for (int j = 0; j < p; ++j) X(i, j) = feat[j];
      const BBox& d = pairs[i].second;
      Y(i, 0) = d.left;
      Y(i, 1) = d.top;
      Y(i, 2) = d.width;
      Y(i, 3) = d.height;
    }
  }

  // column equilibration keeps the polynomial design well conditioned
  std::vector<double> scale(p, 1.0);
  for (int j = 0; j < p; ++j) {
    double m = X.col(j).cwiseAbs().maxCoeff();
    scale[j] = m > 1e-12 ? m : 1.0;
    X.col(j) /= scale[j];
  }

  auto residuals_of = [&](const Eigen::MatrixXd& W) {
    Eigen::MatrixXd pred = X * W;
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) {
      r[i] = (pred.row(i) - Y.row(i)).cwiseAbs().maxCoeff();
    }
    return r;
  };

  Rng rng(config.seed);
  std::vector<int> idx(n);
  Eigen::MatrixXd best_w;
  int best_inliers = -1;

  for (int iter = 0; iter < config.ransac_iterations; ++iter) {
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < p; ++k) {
      int j = k + rng.uniform_int(n - k);
      std::swap(idx[k], idx[j]);
    }
    Eigen::MatrixXd A(p, p), B(p, 4);
    for (int k = 0; k < p; ++k) {
      A.row(k) = X.row(idx[k]);
      B.row(k) = Y.row(idx[k]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < p) continue;  // degenerate minimal sample
    Eigen::MatrixXd W = qr.solve(B);

    std::vector<double> r = residuals_of(W);
    double thr = config.theta * mad_of(r) + kResidualEps;
    int inliers = 0;
    for (double v : r) inliers += v <= thr ? 1 : 0;
    if (inliers > best_inliers) {
      best_inliers = inliers;
      best_w = W;
    }
  }
  if (best_inliers < 0) {
    throw Error(ErrorKind::Degenerate, "every RANSAC minimal sample was rank deficient");
  }

  // refit on the consensus set of the best candidate
  {
    std::vector<double> r = residuals_of(best_w);
    double thr = config.theta * mad_of(r) + kResidualEps;
    std::vector<int> consensus;
    for (int i = 0; i < n; ++i) {
      if (r[i] <= thr) consensus.push_back(i);
    }
    if (static_cast<int>(consensus.size()) >= p) {
      Eigen::MatrixXd A(consensus.size(), p), B(consensus.size(), 4);
      for (size_t k = 0; k < consensus.size(); ++k) {
        A.row(k) = X.row(consensus[k]);
        B.row(k) = Y.row(consensus[k]);
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      if (qr.rank() == p) best_w = qr.solve(B);
    }
  }

  RegressionModel model;
  model.source_camera = source_camera;
  model.dest_camera = dest_camera;
  model.degree = config.regression_degree;
  model.feature_scale = scale;
  for (int dim = 0; dim < 4; ++dim) {
    model.coefficients[dim].resize(p);
    for (int j = 0; j < p; ++j) model.coefficients[dim][j] = best_w(j, dim);
  }
  std::vector<double> r = residuals_of(best_w);
  model.residual_threshold = config.theta * mad_of(r) + kResidualEps;
  model.inlier_flags.resize(n);
  for (int i = 0; i < n; ++i) model.inlier_flags[i] = r[i] <= model.residual_threshold;
  return model;
}

double SvmModel::decision_value(const std::array<double, 4>& x) const {
  double acc = bias;
  for (size_t i = 0; i < support_vectors.size(); ++i) {
    const auto& sv = support_vectors[i];
    double d2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      double diff = sv[k] - x[k];
      d2 += diff * diff;
    }
    acc += dual_coefficients[i] * std::exp(-gamma * d2);
  }
  return acc;
}

namespace {

// Sequential minimal optimization (Platt's simplified variant) for the RBF
// soft-margin dual. Deterministic: scan order is fixed and the fallback
// starting offsets come from the seeded generator.
class SmoTrainer {
 public:
  SmoTrainer(const std::vector<SvmSample>& samples, const FilterConfig& config)
      : n_(static_cast<int>(samples.size())),
        c_(config.svm_cost),
        gamma_(config.gamma),
        rng_(Rng::mix(config.seed, 0x5f3759df)) {
    x_.reserve(n_);
    y_.reserve(n_);
    for (const auto& s : samples) {
      x_.push_back(s.features);
      y_.push_back(s.label > 0 ? 1.0 : -1.0);
    }
    alpha_.assign(n_, 0.0);
    error_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) error_[i] = -y_[i];  // f == 0 initially
    if (n_ <= kGramCacheLimit) {
      gram_.resize(static_cast<size_t>(n_) * n_);
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j <= i; ++j) {
          float k = static_cast<float>(kernel_direct(i, j));
          gram_[static_cast<size_t>(i) * n_ + j] = k;
          gram_[static_cast<size_t>(j) * n_ + i] = k;
        }
      }
    }
  }

  void train() {
    bool examine_all = true;
    int changed = 0;
    int64_t rounds = 0;
    const int64_t round_cap = 200LL * n_ + 20000;
    while ((changed > 0 || examine_all) && rounds++ < round_cap) {
      changed = 0;
      if (examine_all) {
        for (int i = 0; i < n_; ++i) changed += examine(i);
      } else {
        for (int i = 0; i < n_; ++i) {
          if (alpha_[i] > kAlphaEps && alpha_[i] < c_ - kAlphaEps) changed += examine(i);
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
  }

  SvmModel model() const {
    SvmModel m;
    m.gamma = gamma_;
    m.bias = -b_;  // trainer convention is f = sum(alpha*y*K) - b
    for (int i = 0; i < n_; ++i) {
      if (alpha_[i] > kAlphaEps) {
        m.support_vectors.push_back(x_[i]);
        m.dual_coefficients.push_back(alpha_[i] * y_[i]);
      }
    }
    return m;
  }

 private:
  static constexpr double kTol = 1e-3;  // KKT tolerance
  static constexpr double kAlphaEps = 1e-12;
  static constexpr int kGramCacheLimit = 4096;

  double kernel_direct(int i, int j) const {
    double d2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      double diff = x_[i][k] - x_[j][k];
      d2 += diff * diff;
    }
    return std::exp(-gamma_ * d2);
  }

  double kernel(int i, int j) const {
    if (!gram_.empty()) return gram_[static_cast<size_t>(i) * n_ + j];
    return kernel_direct(i, j);
  }

  int examine(int i2) {
    double y2 = y_[i2];
    double a2 = alpha_[i2];
    double e2 = error_[i2];
    double r2 = e2 * y2;
    if (!((r2 < -kTol && a2 < c_ - kAlphaEps) || (r2 > kTol && a2 > kAlphaEps))) {
      return 0;
    }

    // heuristic 1: maximize |e1 - e2| over non-bound multipliers
    int best = -1;
    double best_gap = -1.0;
    for (int i = 0; i < n_; ++i) {
      if (alpha_[i] > kAlphaEps && alpha_[i] < c_ - kAlphaEps) {
        double gap = std::abs(error_[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // heuristic 2: non-bound multipliers from a rotating start
    int start = rng_.uniform_int(n_);
    for (int k = 0; k < n_; ++k) {
      int i = (start + k) % n_;
      if (alpha_[i] > kAlphaEps && alpha_[i] < c_ - kAlphaEps && take_step(i, i2)) return 1;
    }
    // heuristic 3: everything
    start = rng_.uniform_int(n_);
    for (int k = 0; k < n_; ++k) {
      int i = (start + k) % n_;
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }

  bool take_step(int i1, int i2) {
    if (i1 == i2) return false;
    double a1 = alpha_[i1], a2 = alpha_[i2];
    double y1 = y_[i1], y2 = y_[i2];
    double e1 = error_[i1], e2 = error_[i2];
    double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (hi - lo < kAlphaEps) return false;

    double k11 = kernel(i1, i1), k12 = kernel(i1, i2), k22 = kernel(i2, i2);
    double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > 1e-12) {
      a2_new = a2 + y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_new, lo, hi);
    } else {
      // evaluate the dual objective at both clip ends
      double f1 = y1 * (e1 + b_) - a1 * k11 - s * a2 * k12;
      double f2 = y2 * (e2 + b_) - s * a1 * k12 - a2 * k22;
      double l1 = a1 + s * (a2 - lo);
      double h1 = a1 + s * (a2 - hi);
      double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                      s * lo * l1 * k12;
      double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                      s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12) {
        a2_new = lo;
      } else if (obj_lo > obj_hi + 1e-12) {
        a2_new = hi;
      } else {
        return false;
      }
    }
    if (std::abs(a2_new - a2) < kAlphaEps * (a2_new + a2 + kAlphaEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < 0) {
      a2_new += s * a1_new;
      a1_new = 0;
    } else if (a1_new > c_) {
      a2_new += s * (a1_new - c_);
      a1_new = c_;
    }

    double b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + b_;
    double b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + b_;
    double b_new;
    if (a1_new > kAlphaEps && a1_new < c_ - kAlphaEps) {
      b_new = b1;
    } else if (a2_new > kAlphaEps && a2_new < c_ - kAlphaEps) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }

    double d1 = y1 * (a1_new - a1);
    double d2 = y2 * (a2_new - a2);
    for (int i = 0; i < n_; ++i) {
      error_[i] += d1 * kernel(i1, i) + d2 * kernel(i2, i) + (b_ - b_new);
    }
    b_ = b_new;
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    error_[i1] = decision(i1) - y1;
    error_[i2] = decision(i2) - y2;
    return true;
  }

  double decision(int i) const {
    double acc = -b_;
    for (int j = 0; j < n_; ++j) {
      if (alpha_[j] > kAlphaEps) acc += alpha_[j] * y_[j] * kernel(j, i);
    }
    return acc;
  }

  int n_;
  double c_;
  double gamma_;
  double b_ = 0.0;
  Rng rng_;
  std::vector<std::array<double, 4>> x_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  std::vector<float> gram_;
};

}  // namespace

SvmModel train_svm(const std::vector<SvmSample>& samples, const FilterConfig& config) {
  if (config.gamma <= 0 || config.svm_cost <= 0) {
    throw Error(ErrorKind::InvalidInput, "invalid filter config");
  }
  bool has_pos = false, has_neg = false;
  for (const auto& s : samples) {
    (s.label > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorKind::Degenerate, "SVM training requires both classes");
  }
  SmoTrainer trainer(samples, config);
  trainer.train();
  return trainer.model();
}

namespace {

// per-pair indices of source records flagged outlier by the pair's model
std::map<PairKey, std::vector<size_t>> regression_outliers(
    const Trace& trace, const std::map<PairKey, RegressionModel>& models) {
  std::map<PairKey, std::vector<size_t>> flagged;
  for (const auto& [key, model] : models) {
    PositivePairs pp = collect_positive_pairs(trace, key.first, key.second);
    std::vector<size_t>& out = flagged[key];
    for (size_t k = 0; k < pp.pairs.size(); ++k) {
      double r = model.residual(pp.pairs[k].first, pp.pairs[k].second);
      if (r > model.residual_threshold) out.push_back(pp.source_record_index[k]);
    }
  }
  return flagged;
}

std::map<PairKey, std::vector<size_t>> svm_negative_outliers(
    const Trace& trace, const std::map<PairKey, SvmModel>& models) {
  std::map<PairKey, std::vector<size_t>> flagged;
  for (const auto& [key, model] : models) {
    const FrameSpec* src_frame = trace.find_camera(key.first);
    if (!src_frame) {
      throw Error(ErrorKind::InvalidInput,
                  "no frame spec for camera " + std::to_string(key.first));
    }
    auto dest_ids = dest_reid_counts(trace, key.second);
    std::vector<size_t>& out = flagged[key];
    for (size_t i = 0; i < trace.records.size(); ++i) {
      const DetectionRecord& rec = trace.records[i];
      if (rec.camera_id != key.first) continue;
      auto frame_it = dest_ids.find(rec.frame_index);
      bool positive = frame_it != dest_ids.end() && frame_it->second.count(rec.reid_id);
      if (positive) continue;
      if (model.decision_value(normalized_bbox_features(rec.box, *src_frame)) > 0) {
        out.push_back(i);
      }
    }
  }
  return flagged;
}

}  // namespace

Trace apply_regression_filter(const Trace& trace,
                              const std::map<PairKey, RegressionModel>& models) {
  auto flagged = regression_outliers(trace, models);
  std::set<size_t> to_rectify;
  for (const auto& [key, indices] : flagged) {
    (void)key;
    to_rectify.insert(indices.begin(), indices.end());
  }
  Trace out = trace;
  int64_t fresh = out.max_reid_id() + 1;
  for (size_t idx : to_rectify) {
    out.records[idx].reid_id = fresh++;
  }
  out.normalize();
  return out;
}

Trace apply_svm_filter(const Trace& trace, const std::map<PairKey, SvmModel>& models) {
  auto flagged = svm_negative_outliers(trace, models);
  std::set<size_t> to_remove;
  for (const auto& [key, indices] : flagged) {
    (void)key;
    to_remove.insert(indices.begin(), indices.end());
  }
  Trace out = trace;
  out.records.clear();
  for (size_t i = 0; i < trace.records.size(); ++i) {
    if (!to_remove.count(i)) out.records.push_back(trace.records[i]);
  }
  out.normalize();
  return out;
}

std::pair<Trace, FilterReport> run_filter_pipeline(const Trace& trace,
                                                   const FilterConfig& config) {
  FilterReport report;
  if (trace.records.empty()) {
    return {trace, report};
  }

  std::vector<int> cameras;
  for (const auto& cam : trace.cameras) cameras.push_back(cam.camera_id);
  std::sort(cameras.begin(), cameras.end());

  std::map<PairKey, PairFilterStats> stats;
  for (int s : cameras) {
    for (int d : cameras) {
      if (s == d) continue;
      PairFilterStats& st = stats[{s, d}];
      st.source_camera = s;
      st.dest_camera = d;
    }
  }

  // stage 1: per-pair robust regression on positive pairs
  std::map<PairKey, RegressionModel> regression_models;
  const int min_pairs = std::max(kMinRegressionPairs,
                                 polynomial_feature_count(config.regression_degree));
  for (int s : cameras) {
    for (int d : cameras) {
      if (s == d) continue;
      PositivePairs pp = collect_positive_pairs(trace, s, d);
      PairFilterStats& st = stats[{s, d}];
      st.positives = static_cast<int64_t>(pp.pairs.size());
      if (static_cast<int>(pp.pairs.size()) < min_pairs) {
        st.regression_skipped = true;
        continue;
      }
      FilterConfig pair_cfg = config;
      pair_cfg.seed = Rng::mix(config.seed, static_cast<uint64_t>(s),
                               static_cast<uint64_t>(d));
      try {
        RegressionModel model = fit_ransac(pp.pairs, pair_cfg, s, d);
        st.ransac_inlier_ratio = model.inlier_ratio();
        regression_models.emplace(PairKey{s, d}, std::move(model));
      } catch (const Error&) {
        st.regression_skipped = true;  // degenerate geometry; leave pair untouched
      }
    }
  }

  auto rectify_flags = regression_outliers(trace, regression_models);
  std::set<size_t> rectified;
  for (const auto& [key, indices] : rectify_flags) {
    stats[key].outliers_rectified = static_cast<int64_t>(indices.size());
    rectified.insert(indices.begin(), indices.end());
  }
  Trace rectified_trace = apply_regression_filter(trace, regression_models);
  report.records_rectified = static_cast<int64_t>(rectified.size());

  // stage 2: per-pair SVM on the rectified trace
  std::map<PairKey, SvmModel> svm_models;
  for (int s : cameras) {
    for (int d : cameras) {
      if (s == d) continue;
      const FrameSpec* src_frame = rectified_trace.find_camera(s);
      auto dest_ids = dest_reid_counts(rectified_trace, d);
      std::vector<SvmSample> samples;
      for (const auto& rec : rectified_trace.records) {
        if (rec.camera_id != s) continue;
        auto frame_it = dest_ids.find(rec.frame_index);
        bool positive =
            frame_it != dest_ids.end() && frame_it->second.count(rec.reid_id);
        samples.push_back({normalized_bbox_features(rec.box, *src_frame),
                           positive ? 1 : 0});
      }
      PairFilterStats& st = stats[{s, d}];
      bool has_pos = false, has_neg = false;
      for (const auto& smp : samples) (smp.label ? has_pos : has_neg) = true;
      if (!has_pos || !has_neg) {
        st.svm_skipped = true;
        continue;
      }
      FilterConfig pair_cfg = config;
      pair_cfg.seed = Rng::mix(config.seed, static_cast<uint64_t>(s),
                               static_cast<uint64_t>(d) + 0x10000);
      svm_models.emplace(PairKey{s, d}, train_svm(samples, pair_cfg));
    }
  }

  auto removal_flags = svm_negative_outliers(rectified_trace, svm_models);
  std::set<size_t> removed;
  for (const auto& [key, indices] : removal_flags) {
    stats[key].negatives_removed = static_cast<int64_t>(indices.size());
    removed.insert(indices.begin(), indices.end());
  }
  Trace filtered = apply_svm_filter(rectified_trace, svm_models);
  report.records_removed = static_cast<int64_t>(removed.size());

  for (auto& [key, st] : stats) {
    (void)key;
    report.pairs.push_back(st);
  }
  return {std::move(filtered), std::move(report)};
}

}  // namespace mcroi
