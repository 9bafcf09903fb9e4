#include "helm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "helm/otb_io.hpp"

namespace helm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_non_empty(std::size_t n, const char* what) {
  if (n == 0) {
    throw EvaluationError(std::string(what) + ": empty sequence");
  }
}

double percent(std::size_t count, std::size_t n) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(n);
}

/// Number of values >= tau in a sorted range.
std::size_t count_at_least(const std::vector<double>& sorted, double tau) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::lower_bound(sorted.begin(), sorted.end(), tau));
}

/// Number of values <= tau in a sorted range.
std::size_t count_at_most(const std::vector<double>& sorted, double tau) {
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), tau) -
                                  sorted.begin());
}

} // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

SuccessCurve success_auc(std::span<const double> ious) {
  require_non_empty(ious.size(), "success_auc");
  std::vector<double> sorted(ious.begin(), ious.end());
  std::sort(sorted.begin(), sorted.end());
  SuccessCurve c;
  double sum = 0.0;
  for (int k = 0; k < kSuccessPoints; ++k) {
    c.values[k] = percent(count_at_least(sorted, k / 100.0), sorted.size());
    sum += c.values[k];
  }
  c.auc = sum / kSuccessPoints;
  return c;
}

double op_at(std::span<const double> ious, double tau) {
  require_non_empty(ious.size(), "op_at");
  const auto n = std::count_if(ious.begin(), ious.end(), [tau](double v) { return v >= tau; });
  return percent(static_cast<std::size_t>(n), ious.size());
}

double precision_at(std::span<const double> center_errors_px, double tau_px) {
  require_non_empty(center_errors_px.size(), "precision_at");
  const auto n = std::count_if(center_errors_px.begin(), center_errors_px.end(),
                               [tau_px](double e) { return e <= tau_px; });
  return percent(static_cast<std::size_t>(n), center_errors_px.size());
}

std::vector<double> normalized_center_errors(std::span<const BoundingBox> gt,
                                             std::span<const std::optional<BoundingBox>> pred) {
  if (gt.size() != pred.size()) {
    throw EvaluationError("normalized precision: gt and prediction lengths differ");
  }
  std::vector<double> out;
  out.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!(gt[i].w > 0.0) || !(gt[i].h > 0.0)) {
      std::ostringstream os;
      os << "normalized precision: ground-truth box " << i + 1 << " has zero width or height";
      throw EvaluationError(os.str());
    }
    if (!pred[i]) {
      out.push_back(kInf);
      continue;
    }
    const double dx = (pred[i]->center_x() - gt[i].center_x()) / gt[i].w;
    const double dy = (pred[i]->center_y() - gt[i].center_y()) / gt[i].h;
    out.push_back(std::hypot(dx, dy));
  }
  return out;
}

double norm_precision_at(std::span<const BoundingBox> gt,
                         std::span<const std::optional<BoundingBox>> pred, double tau) {
  require_non_empty(gt.size(), "norm_precision_at");
  return precision_at(normalized_center_errors(gt, pred), tau);
}

SequenceEval evaluate_boxes(std::span<const BoundingBox> gt,
                            std::span<const std::optional<BoundingBox>> pred) {
  if (gt.size() != pred.size()) {
    std::ostringstream os;
    os << "frame count mismatch: " << gt.size() << " ground-truth vs " << pred.size()
       << " predicted";
    throw EvaluationError(os.str());
  }
  require_non_empty(gt.size(), "evaluate");
  SequenceEval ev;
  ev.n_frames = static_cast<int>(gt.size());
  ev.norm_center_errors = normalized_center_errors(gt, pred);
  ev.ious.reserve(gt.size());
  ev.center_errors_px.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!pred[i]) {
      ev.ious.push_back(0.0);
      ev.center_errors_px.push_back(kInf);
      continue;
    }
    ev.ious.push_back(iou(gt[i], *pred[i]));
    ev.center_errors_px.push_back(std::hypot(pred[i]->center_x() - gt[i].center_x(),
                                             pred[i]->center_y() - gt[i].center_y()));
  }
  return ev;
}

MetricReport report_from(const SequenceEval& ev, std::string sequence) {
  MetricReport r;
  r.sequence = std::move(sequence);
  r.n_frames = ev.n_frames;
  const SuccessCurve sc = success_auc(ev.ious);
  r.success_curve = sc.values;
  r.auc = sc.auc;
  r.op50 = op_at(ev.ious, 0.5);
  r.op75 = op_at(ev.ious, 0.75);
  r.precision = precision_at(ev.center_errors_px);
  r.norm_precision = precision_at(ev.norm_center_errors, kNormPrecisionThreshold);

  std::vector<double> ce(ev.center_errors_px);
  std::sort(ce.begin(), ce.end());
  for (int k = 0; k < kPrecisionPoints; ++k) {
    r.precision_curve[k] = percent(count_at_most(ce, static_cast<double>(k)), ce.size());
  }
  std::vector<double> ne(ev.norm_center_errors);
  std::sort(ne.begin(), ne.end());
  for (int k = 0; k < kNormPrecisionPoints; ++k) {
    r.norm_precision_curve[k] = percent(count_at_most(ne, k / 100.0), ne.size());
  }
  return r;
}

MetricReport evaluate_sequence(const std::filesystem::path& gt_path,
                               const std::filesystem::path& pred_path) {
  const BoxTrack gt_raw = read_otb(gt_path);
  const BoxTrack pred = read_otb(pred_path);
  std::vector<BoundingBox> gt;
  gt.reserve(gt_raw.size());
  for (std::size_t i = 0; i < gt_raw.size(); ++i) {
    if (!gt_raw[i]) {
      std::ostringstream os;
      os << gt_path.string() << ":" << i + 1 << ": ground truth cannot be missing";
      throw IoError(os.str());
    }
    gt.push_back(*gt_raw[i]);
  }
  if (gt.size() != pred.size()) {
    std::ostringstream os;
    os << "frame count mismatch: " << gt_path.string() << " has " << gt.size() << " lines, "
       << pred_path.string() << " has " << pred.size();
    throw IoError(os.str());
  }
  return report_from(evaluate_boxes(gt, pred), gt_path.stem().string());
}

MetricReport aggregate(std::span<const MetricReport> reports, std::string name) {
  if (reports.empty()) {
    throw EvaluationError("aggregate: no sequences");
  }
  MetricReport m;
  m.sequence = std::move(name);
  const double n = static_cast<double>(reports.size());
  for (const MetricReport& r : reports) {
    m.auc += r.auc / n;
    m.op50 += r.op50 / n;
    m.op75 += r.op75 / n;
    m.precision += r.precision / n;
    m.norm_precision += r.norm_precision / n;
    m.n_frames += r.n_frames;
    for (int k = 0; k < kSuccessPoints; ++k) {
      m.success_curve[k] += r.success_curve[k] / n;
    }
    for (int k = 0; k < kPrecisionPoints; ++k) {
      m.precision_curve[k] += r.precision_curve[k] / n;
    }
    for (int k = 0; k < kNormPrecisionPoints; ++k) {
      m.norm_precision_curve[k] += r.norm_precision_curve[k] / n;
    }
  }
  return m;
}

void CostWeights::validate() const {
  if ((q_pixel - q_pixel.transpose()).norm() > 1e-12 ||
      (r_effort - r_effort.transpose()).norm() > 1e-12) {
    throw ConfigError("cost: weight matrices must be symmetric");
  }
  if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(q_pixel).eigenvalues().minCoeff() < -1e-12) {
    throw ConfigError("cost: q_pixel must be positive semi-definite");
  }
  if (!(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(r_effort).eigenvalues().minCoeff() > 0.0)) {
    throw ConfigError("cost: r_effort must be positive definite");
  }
  if (!(q_distance >= 0.0)) {
    throw ConfigError("cost: q_distance must be non-negative");
  }
}

double tracking_cost(const RunLog& log, const CostWeights& w) {
  const auto& recs = log.records;
  if (recs.size() < 2) {
    throw EvaluationError("tracking_cost: need at least two samples");
  }
  const double t0 = recs.front().t;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const double expected = t0 + static_cast<double>(k) * log.dt;
    if (std::abs(recs[k].t - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      std::ostringstream os;
      os << "tracking_cost: non-uniform timestamp at sample " << k;
      throw EvaluationError(os.str());
    }
  }
  auto integrand = [&w](const StepRecord& r) {
    const Eigen::Vector2d e(r.command.e_psi, r.command.e_y);
    const GeneralizedThrust g = unmix(r.applied);
    const Eigen::Vector2d u(g.total, g.differential);
    return e.dot(w.q_pixel * e) + w.q_distance * r.command.e_d * r.command.e_d +
           u.dot(w.r_effort * u);
  };
  double j = 0.0;
  double prev = integrand(recs.front());
  for (std::size_t k = 1; k < recs.size(); ++k) {
    const double cur = integrand(recs[k]);
    j += 0.5 * (prev + cur) * log.dt;
    prev = cur;
  }
  return j;
}

} // namespace helm
