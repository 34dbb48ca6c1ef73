#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mcroi/trace.hpp"

namespace mcroi {

struct FilterConfig {
  double theta = 0.01;        // RANSAC threshold multiplier on residual MAD
  double gamma = 1e-4;        // RBF kernel width
  double svm_cost = 1.0;      // soft-margin penalty C
  int regression_degree = 2;  // polynomial feature degree over the 4-D bbox
  int ransac_iterations = 1000;
  uint64_t seed = 0;
};

// Polynomial regression of dest bbox from source bbox, fit by RANSAC.
// Residual of a pair is the max absolute error over the four predicted
// components, in pixels.
struct RegressionModel {
  int source_camera = 0;
  int dest_camera = 0;
  int degree = 2;
  std::vector<double> feature_scale;  // per-column equilibration divisors
  std::array<std::vector<double>, 4> coefficients;  // dest left/top/width/height
  double residual_threshold = 0.0;    // theta * MAD of final-model residuals
  std::vector<uint8_t> inlier_flags;  // per training pair

  std::array<double, 4> predict(const BBox& source) const;
  double residual(const BBox& source, const BBox& dest) const;
  double inlier_ratio() const;
};

// Soft-margin RBF SVM over normalized bbox features.
struct SvmModel {
  std::vector<std::array<double, 4>> support_vectors;
  std::vector<double> dual_coefficients;  // alpha_i * y_i, |.| <= svm_cost
  double bias = 0.0;
  double gamma = 0.0;

  double decision_value(const std::array<double, 4>& x) const;
};

struct SvmSample {
  std::array<double, 4> features;
  int label = 0;  // 1 = has a same-id counterpart in the destination camera
};

// number of polynomial features (including intercept) for a degree
int polynomial_feature_count(int degree);

// normalized position-and-shape feature of a box: left/width over frame
// width, top/height over frame height
std::array<double, 4> normalized_bbox_features(const BBox& box, const FrameSpec& frame);

RegressionModel fit_ransac(const std::vector<std::pair<BBox, BBox>>& pairs,
                           const FilterConfig& config, int source_camera = 0,
                           int dest_camera = 0);

SvmModel train_svm(const std::vector<SvmSample>& samples, const FilterConfig& config);

using PairKey = std::pair<int, int>;  // (source camera, dest camera)

// Every cross-camera positive pair flagged outlier gets a fresh reid_id on
// the source side; record count is unchanged.
Trace apply_regression_filter(const Trace& trace,
                              const std::map<PairKey, RegressionModel>& models);

// Source records labeled negative for a pair but classified positive by that
// pair's model are removed. Positive outliers are kept.
Trace apply_svm_filter(const Trace& trace, const std::map<PairKey, SvmModel>& models);

struct PairFilterStats {
  int source_camera = 0;
  int dest_camera = 0;
  int64_t positives = 0;           // positive samples seen by the regression stage
  int64_t outliers_rectified = 0;  // source records re-idd due to this pair
  int64_t negatives_removed = 0;   // source records removed due to this pair
  double ransac_inlier_ratio = 0.0;
  bool regression_skipped = false;
  bool svm_skipped = false;
};

struct FilterReport {
  std::vector<PairFilterStats> pairs;
  int64_t records_rectified = 0;  // distinct records that received a fresh id
  int64_t records_removed = 0;
};

// Regression filter, then SVM filter, each fit per ordered camera pair.
// Pairs with too little data skip the corresponding stage and are noted in
// the report.
std::pair<Trace, FilterReport> run_filter_pipeline(const Trace& trace,
                                                   const FilterConfig& config);

}  // namespace mcroi
