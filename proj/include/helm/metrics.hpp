#pragma once

// One-pass-evaluation tracking metrics (success/AUC, OP50/OP75, center
// precision, normalized precision) and the integrated tracking cost.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helm/core.hpp"
#include "helm/runlog.hpp"

namespace helm {

inline constexpr int kSuccessPoints = 101;   // IoU thresholds k / 100
inline constexpr int kPrecisionPoints = 51;  // 0..50 px
inline constexpr int kNormPrecisionPoints = 51; // 0..0.5 in steps of 0.01
inline constexpr double kPrecisionThresholdPx = 20.0;
inline constexpr double kNormPrecisionThreshold = 0.2;

double iou(const BoundingBox& a, const BoundingBox& b);

struct SuccessCurve {
  std::array<double, kSuccessPoints> values{};
  double auc = 0.0; // mean of the curve, percent
};

/// Throws EvaluationError on an empty sequence.
SuccessCurve success_auc(std::span<const double> ious);
double op_at(std::span<const double> ious, double tau);
double precision_at(std::span<const double> center_errors_px, double tau_px = kPrecisionThresholdPx);

/// Missing predictions are nullopt. Throws EvaluationError for a gt box
/// with zero width or height, or mismatched lengths.
std::vector<double> normalized_center_errors(std::span<const BoundingBox> gt,
                                             std::span<const std::optional<BoundingBox>> pred);
double norm_precision_at(std::span<const BoundingBox> gt,
                         std::span<const std::optional<BoundingBox>> pred,
                         double tau = kNormPrecisionThreshold);

struct SequenceEval {
  std::vector<double> ious;
  std::vector<double> center_errors_px;   // +inf for missing predictions
  std::vector<double> norm_center_errors; // +inf for missing predictions
  int n_frames = 0;
};

SequenceEval evaluate_boxes(std::span<const BoundingBox> gt,
                            std::span<const std::optional<BoundingBox>> pred);

struct MetricReport {
  std::string sequence;
  double auc = 0.0;
  double op50 = 0.0;
  double op75 = 0.0;
  double precision = 0.0;
  double norm_precision = 0.0;
  int n_frames = 0;
  std::array<double, kSuccessPoints> success_curve{};
  std::array<double, kPrecisionPoints> precision_curve{};
  std::array<double, kNormPrecisionPoints> norm_precision_curve{};
};

MetricReport report_from(const SequenceEval& eval, std::string sequence);

/// Reads both OTB files and evaluates them frame by frame.
MetricReport evaluate_sequence(const std::filesystem::path& gt_path,
                               const std::filesystem::path& pred_path);

/// Unweighted mean over sequences (curves averaged pointwise).
MetricReport aggregate(std::span<const MetricReport> reports, std::string name = "mean");

/// Weights of the integrated tracking cost
///   J = int e_body' Q_pixel e_body + Q_distance e_d^2 + u' R_effort u dt
/// with e_body = (e_psi, e_y / fx) and u = (T1, T2) as applied.
struct CostWeights {
  Eigen::Matrix2d q_pixel = Eigen::Matrix2d::Identity();
  double q_distance = 0.04;
  Eigen::Matrix2d r_effort = 1e-4 * Eigen::Matrix2d::Identity();

  void validate() const;
};

/// Trapezoidal integral over the log. Throws EvaluationError for fewer than
/// two records or non-uniform timestamps.
double tracking_cost(const RunLog& log, const CostWeights& w);

} // namespace helm
