#pragma once

#include <string>
#include <vector>

#include "helm/runlog.hpp"
#include "helm/scenario.hpp"

namespace helm {

/// Target pose at time t. A triangle is traversed at constant speed from
/// vertex 0; at a vertex the heading is that of the outgoing edge.
Pose2D target_pose(const TrajectorySpec& spec, double t);

/// Closed loop at the scenario rate: perception, guidance, controller,
/// mixing and saturation, plant step. Deterministic in (scenario, seed).
/// A non-finite state stops the run; the log then holds every valid record
/// and `error` describes the failure.
RunLog run_scenario(const Scenario& s);

/// Yaw error within which a response counts as settled.
inline constexpr double kSettleBand = 0.05; // rad

struct RunSummary {
  double settling_time = 0.0; // s; +inf when never settled
  double overshoot_pct = 0.0;
  double ss_rms_e_psi = 0.0;  // over the second half of the run
  double tv_left = 0.0;
  double tv_right = 0.0;
  double tv_total = 0.0;
  double cost = 0.0;
  bool aborted = false;
};

RunSummary summarize(const RunLog& log, const CostWeights& w);

/// Settling time of a sampled signal into +-band (last exit from the band).
double settling_time(const std::vector<double>& t, const std::vector<double>& e, double band);
/// Percent overshoot past zero relative to the initial value.
double overshoot_percent(const std::vector<double>& e);
/// Sum of absolute sample-to-sample changes.
double total_variation(const std::vector<double>& x);

struct SweepRow {
  std::string value;
  RunSummary summary;
};

/// Runs the base scenario once per value of `axis` ("section.key"), each
/// with a seed derived from the base seed and the value's index. Results
/// are in input order regardless of the worker count.
std::vector<SweepRow> sweep(const ConfigDocument& base, const std::string& axis,
                            const std::vector<std::string>& values, int threads);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

} // namespace helm
