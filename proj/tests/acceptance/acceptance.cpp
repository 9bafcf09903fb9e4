// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli.hpp"
#include "helm/control.hpp"
#include "helm/dynamics.hpp"
#include "helm/metrics.hpp"
#include "helm/otb_io.hpp"
#include "helm/rng.hpp"
#include "helm/runlog_io.hpp"
#include "helm/scenario.hpp"
#include "helm/sensors.hpp"
#include "helm/sim.hpp"

using namespace helm;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = HELM_SCENARIO_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failed;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed += " [failed: " + what + "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "helm-bench");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// Golden run-log checksums (FNV-1a 64 of the CSV) for the shipped scenarios
// at their default seeds.
const std::map<std::string, std::string>& golden() {
  static const std::map<std::string, std::string> g{
      {"line_calm/pid", "51f7233eddb894ce"},
      {"line_calm/smc", "8b0d18bbbafb8a2e"},
      {"line_calm/lqr", "f61ac419e5372b67"},
      {"line_rough/pid", "004bda1d6075a148"},
      {"line_rough/smc", "65506b2efd0fb9fa"},
      {"line_rough/lqr", "dbe4360b00f7273e"},
      {"triangle_rough/pid", "1510b9e90049e8cb"},
      {"triangle_rough/smc", "dbb64454ecf7e0e6"},
      {"triangle_rough/lqr", "4330dcf6076fa51a"},
  };
  return g;
}

struct ControllerRun {
  RunLog log;
  RunSummary summary;
};

ControllerRun run_with(const std::string& scenario, const std::string& type, Outcome& o,
                       const std::map<std::string, std::string>& overrides = {}) {
  ConfigDocument doc = ConfigDocument::load(kScenarios / (scenario + ".ini"));
  doc.set("controller.type", type);
  for (const auto& [k, v] : overrides) {
    doc.set(k, v);
  }
  const Scenario s = scenario_from(doc);
  ControllerRun r{run_scenario(s), {}};
  r.summary = summarize(r.log, s.cost);
  o.require(!r.log.error, scenario + "/" + type + " aborted");
  if (overrides.empty()) {
    const std::string key = scenario + "/" + type;
    const std::string sum = hex(fnv1a(format_runlog_csv(r.log)));
    const auto it = golden().find(key);
    o.require(it != golden().end() && it->second == sum, "golden " + key + " = " + sum);
  }
  return r;
}

void criterion_riccati(Outcome& o) {
  const auto t0 = Clock::now();
  const UsvParams p;
  Rng rng(20240601);
  double worst_residual = 0.0;
  double worst_asym = 0.0;
  double min_p_eig = 0.0;
  double max_re = -1e300;
  for (int trial = 0; trial < 100; ++trial) {
    LqrWeights w;
    Eigen::Matrix3d G;
    for (int i = 0; i < 9; ++i) {
      G(i / 3, i % 3) = 2.0 * rng.uniform() - 1.0;
    }
    w.Q = G * G.transpose() + 1e-2 * Mat3::Identity();
    Eigen::Matrix2d H;
    for (int i = 0; i < 4; ++i) {
      H(i / 2, i % 2) = rng.uniform() - 0.5;
    }
    w.R = H * H.transpose() + 5e-2 * Mat2::Identity();
    const LqrGain g = lqr_gain(p, w);
    worst_residual = std::max(worst_residual, care_residual(plant_a(), plant_b(p), w, g.P));
    worst_asym = std::max(worst_asym, (g.P - g.P.transpose()).cwiseAbs().maxCoeff());
    min_p_eig = std::min(min_p_eig, Eigen::SelfAdjointEigenSolver<Mat3>(g.P).eigenvalues().minCoeff());
    const Eigen::Vector3cd eig = closed_loop_eigenvalues(plant_a(), plant_b(p), g.K);
    for (int i = 0; i < 3; ++i) {
      max_re = std::max(max_re, eig[i].real());
    }
  }
  LqrWeights unit;
  unit.Q = Mat3::Identity();
  unit.R = Mat2::Identity();
  const double k_u = lqr_gain(p, unit).K(0, 0);
  const double elapsed = seconds_since(t0);

  o.require(worst_residual < 1e-9, "residual");
  o.require(worst_asym <= 1e-12, "symmetry");
  o.require(min_p_eig >= -1e-9, "P positive semi-definite");
  o.require(max_re < -1e-6, "closed-loop stability");
  o.require(std::abs(k_u - 1.0) <= 1e-12, "scalar surge gain");
  o.require(elapsed < 1.0, "runtime");
  o.detail << "100 draws: max residual " << worst_residual << ", max |P-P'| " << worst_asym
           << ", max Re(eig) " << max_re << ", K_u(Q=R=I) " << format_double(k_u) << ", "
           << elapsed << " s";
}

void criterion_dynamics(Outcome& o) {
  const auto t0 = Clock::now();
  BodyState s;
  s.u = 1.2;
  s.r = 0.3;
  const double radius = s.u / s.r;
  const double dt = 0.02;
  const int steps = static_cast<int>(std::ceil(kTwoPi / s.r / dt));
  double worst = 0.0;
  for (int k = 0; k < steps; ++k) {
    s = step(s, {0, 0}, SeaState::calm(), k * dt, dt, {});
    worst = std::max(worst, std::abs(std::hypot(s.pose.x, s.pose.y - radius) - radius));
  }

  // Constant total thrust 20 N on 20 kg from rest: u(t) = t.
  BodyState ramp;
  for (int k = 0; k < 50; ++k) {
    ramp = step(ramp, {10, 10}, SeaState::calm(), k * dt, dt, {});
  }
  const double ramp_err = std::abs(ramp.u - 1.0);
  const double elapsed = seconds_since(t0);

  o.require(worst < 1e-6 * radius, "circle");
  o.require(ramp_err < 1e-6, "ramp");
  o.require(elapsed < 1.0, "runtime");
  o.detail << "circle radius " << radius << " m, max radial error " << worst
           << " m; ramp |u(1)-1| " << ramp_err << ", " << elapsed << " s";
}

double brute_fraction(const std::vector<double>& v, const std::function<bool(double)>& in) {
  int n = 0;
  for (double x : v) {
    n += in(x) ? 1 : 0;
  }
  return 100.0 * n / static_cast<double>(v.size());
}

void criterion_metrics(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(31337);
  const auto lattice = [&rng](double span) { return std::floor(rng.uniform() * span * 8.0) / 8.0; };
  int mismatches = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    const int n = 1 + static_cast<int>(rng.uniform() * 80.0);
    std::vector<BoundingBox> gt;
    std::vector<std::optional<BoundingBox>> pred;
    for (int i = 0; i < n; ++i) {
      gt.push_back({lattice(300), lattice(300), 2.0 + lattice(60), 2.0 + lattice(60)});
      if (rng.uniform() < 0.1) {
        pred.emplace_back(std::nullopt);
      } else {
        pred.emplace_back(BoundingBox{gt.back().x + lattice(30) - 15, gt.back().y + lattice(30) - 15,
                                      gt.back().w + lattice(8) - 4, gt.back().h + lattice(8) - 4});
      }
    }
    std::vector<double> ious;
    std::vector<double> ce;
    std::vector<double> ne;
    for (int i = 0; i < n; ++i) {
      if (!pred[i]) {
        ious.push_back(0.0);
        ce.push_back(INFINITY);
        ne.push_back(INFINITY);
        continue;
      }
      ious.push_back(iou(gt[i], *pred[i]));
      const double dx = pred[i]->center_x() - gt[i].center_x();
      const double dy = pred[i]->center_y() - gt[i].center_y();
      ce.push_back(std::hypot(dx, dy));
      ne.push_back(std::hypot(dx / gt[i].w, dy / gt[i].h));
    }
    const SuccessCurve sc = success_auc(ious);
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double v = brute_fraction(ious, [k](double x) { return x >= k / 100.0; });
      mismatches += sc.values[k] != v;
      sum += v;
    }
    mismatches += sc.auc != sum / 101.0;
    mismatches += op_at(ious, 0.5) != brute_fraction(ious, [](double x) { return x >= 0.5; });
    mismatches += op_at(ious, 0.75) != brute_fraction(ious, [](double x) { return x >= 0.75; });
    mismatches += precision_at(ce) != brute_fraction(ce, [](double x) { return x <= 20.0; });
    mismatches += norm_precision_at(gt, pred) != brute_fraction(ne, [](double x) { return x <= 0.2; });
  }

  // Identity evaluation through the CLI on a shipped scenario's boxes.
  const fs::path dir = fs::temp_directory_path() / "helm_acceptance_metrics";
  fs::remove_all(dir);
  bool all_100 = cli({"simulate", "--scenario", (kScenarios / "triangle_calm.ini").string(), "--out",
                      (dir / "run").string()}) == 0;
  all_100 = all_100 && cli({"evaluate", "--gt", (dir / "run" / "gt").string(), "--pred",
                            (dir / "run" / "gt").string(), "--out", (dir / "report.csv").string()}) == 0;
  if (all_100) {
    std::istringstream rows(slurp(dir / "report.csv"));
    std::string line;
    std::getline(rows, line);
    int count = 0;
    while (std::getline(rows, line)) {
      ++count;
      const auto comma = line.find(',');
      all_100 = all_100 && line.substr(comma + 1).rfind("100,100,100,100,100,", 0) == 0;
    }
    all_100 = all_100 && count == 2;
  }
  fs::remove_all(dir);

  // 1/7 case against unit-cell counting.
  const BoundingBox a{0, 0, 2, 2};
  const BoundingBox b{1, 1, 2, 2};
  int inter = 0;
  int uni = 0;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const bool ia = i < 2 && j < 2;
      const bool ib = i >= 1 && j >= 1;
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  const double counted = static_cast<double>(inter) / uni;
  const double seventh_err = std::abs(iou(a, b) - counted);
  const double elapsed = seconds_since(t0);

  o.require(mismatches == 0, "brute-force equality");
  o.require(all_100, "identity evaluation");
  o.require(seventh_err < 1e-12 && std::abs(counted - 1.0 / 7.0) < 1e-12, "1/7 IoU");
  o.require(elapsed < 10.0, "runtime");
  o.detail << "1000 sequences, " << mismatches << " mismatches; pred=gt rows all 100: "
           << (all_100 ? "yes" : "no") << "; |iou - 1/7 by counting| " << seventh_err << ", "
           << elapsed << " s";
}

void criterion_ordering(Outcome& o) {
  const auto t0 = Clock::now();
  const ControllerRun pid = run_with("line_calm", "pid", o);
  const ControllerRun smc = run_with("line_calm", "smc", o);
  const ControllerRun lqr = run_with("line_calm", "lqr", o);
  const ControllerRun smc0 = run_with("line_calm", "smc", o, {{"controller.smc_boundary_layer", "0"}});
  const double elapsed = seconds_since(t0);

  o.require(pid.summary.overshoot_pct > lqr.summary.overshoot_pct, "(a) overshoot PID > LQR");
  o.require(lqr.summary.tv_total < pid.summary.tv_total, "(b) TV LQR < PID");
  o.require(lqr.summary.tv_total < smc0.summary.tv_total, "(b) TV LQR < SMC(phi=0)");
  for (const ControllerRun* r : {&pid, &smc, &lqr}) {
    o.require(r->summary.settling_time <= 15.0, "(c) settle within 15 s");
  }
  o.require(elapsed < 30.0, "runtime");
  o.detail << "overshoot % PID " << pid.summary.overshoot_pct << " LQR " << lqr.summary.overshoot_pct
           << "; TV LQR " << lqr.summary.tv_total << " PID " << pid.summary.tv_total
           << " SMC(phi=0) " << smc0.summary.tv_total << "; settling s PID "
           << pid.summary.settling_time << " SMC " << smc.summary.settling_time << " LQR "
           << lqr.summary.settling_time << "; " << elapsed << " s";
}

void criterion_disturbance(Outcome& o) {
  const auto t0 = Clock::now();
  for (const char* scenario : {"line_rough", "triangle_rough"}) {
    const ControllerRun pid = run_with(scenario, "pid", o);
    const ControllerRun smc = run_with(scenario, "smc", o);
    const ControllerRun lqr = run_with(scenario, "lqr", o);
    const std::string tag = scenario;
    o.require(lqr.summary.ss_rms_e_psi <= pid.summary.ss_rms_e_psi, tag + " RMS LQR <= PID");
    o.require(lqr.summary.ss_rms_e_psi <= smc.summary.ss_rms_e_psi, tag + " RMS LQR <= SMC");
    o.require(lqr.summary.cost < pid.summary.cost && lqr.summary.cost < smc.summary.cost,
              tag + " J lowest for LQR");
    o.detail << tag << ": RMS e_psi PID " << pid.summary.ss_rms_e_psi << " SMC "
             << smc.summary.ss_rms_e_psi << " LQR " << lqr.summary.ss_rms_e_psi << ", J PID "
             << pid.summary.cost << " SMC " << smc.summary.cost << " LQR " << lqr.summary.cost
             << "; ";
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime");
  o.detail << elapsed << " s";
}

void criterion_degradation(Outcome& o) {
  const auto t0 = Clock::now();
  const RunLog clear = run_scenario(load_scenario(kScenarios / "ncc_clear.ini"));
  const BoxExport ex = export_boxes(clear);
  std::vector<BoundingBox> gt;
  for (const auto& b : ex.gt) {
    gt.push_back(*b);
  }
  const MetricReport clear_rep = report_from(evaluate_boxes(gt, ex.pred), "ncc_clear");

  const RunLog dust = run_scenario(load_scenario(kScenarios / "ncc_dust.ini"));
  int invalid = 0;
  for (const StepRecord& r : dust.records) {
    invalid += !r.detection.valid;
  }
  const double invalid_pct = 100.0 * invalid / static_cast<double>(dust.records.size());

  EmulatorNoise noise{4.0, 0.05, 0.02};
  Rng rng = Rng::stream(99, "acceptance-dropout");
  const BoundingBox truth{100, 100, 40, 40};
  double worst_abs = 0.0;
  for (double vis : {1.0, 0.5, 0.2}) {
    int drops = 0;
    for (int i = 0; i < 10000; ++i) {
      drops += !emulate_tracker(truth, vis, noise, rng).valid;
    }
    const double expected = emulator_drop_probability(vis, noise);
    worst_abs = std::max(worst_abs, std::abs(drops / 1e4 - expected));
  }
  const double elapsed = seconds_since(t0);

  o.require(!clear.error && !dust.error, "runs completed");
  o.require(clear_rep.auc >= 95.0, "AUC at visibility 1.0");
  o.require(invalid_pct >= 50.0, "track lost at visibility 0.1");
  o.require(worst_abs <= 0.01, "emulator dropout rate within 1 percentage point");
  o.require(elapsed < 60.0, "runtime");
  o.detail << "NCC AUC " << clear_rep.auc << " at visibility 1.0; " << invalid_pct
           << "% invalid frames at visibility 0.1; max |dropout rate - closed form| " << worst_abs
           << " over 1e4 draws; " << elapsed << " s";
}

void criterion_determinism(Outcome& o) {
  const fs::path dir = fs::temp_directory_path() / "helm_acceptance_determinism";
  fs::remove_all(dir);
  const std::string scen = (kScenarios / "ncc_clear.ini").string();
  o.require(cli({"simulate", "--scenario", scen, "--out", (dir / "a").string()}) == 0, "simulate a");
  o.require(cli({"simulate", "--scenario", scen, "--out", (dir / "b").string()}) == 0, "simulate b");
  int files = 0;
  bool same = true;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (e.is_regular_file()) {
      ++files;
      same = same && slurp(e.path()) == slurp(dir / "b" / fs::relative(e.path(), dir / "a"));
    }
  }
  o.require(files == 3 && same, "simulate outputs byte-identical");

  const std::string base = (kScenarios / "line_rough.ini").string();
  std::vector<std::string> sweeps;
  for (const char* threads : {"1", "4"}) {
    ::setenv("HELM_BENCH_THREADS", threads, 1);
    const fs::path out = dir / (std::string("sweep_") + threads + ".csv");
    o.require(cli({"sweep", "--scenario", base, "--axis", "controller.type", "--values",
                   "pid,smc,lqr,pid", "--out", out.string()}) == 0,
              "sweep");
    sweeps.push_back(slurp(out));
  }
  ::unsetenv("HELM_BENCH_THREADS");
  o.require(sweeps[0] == sweeps[1] && !sweeps[0].empty(), "sweep independent of threads");
  fs::remove_all(dir);
  o.detail << "simulate x2: " << files << " files identical; sweep CSV checksum "
           << hex(fnv1a(sweeps[0])) << " with HELM_BENCH_THREADS=1 and 4";
}

void criterion_non_reproduction(Outcome& o) {
  o.detail << "not reproduced: absolute per-tracker benchmark values (e.g. SeqTrack AUC 90.10) "
              "need the six deep trackers and the original dataset, neither of which is shipped; the "
              "deliverable is the evaluate pipeline with the same columns and metric "
              "definitions (success AUC over 101 IoU thresholds, OP50/OP75, 20 px precision, "
              "0.2 normalized precision)";
  // The pipeline shape itself is checked: header columns are fixed.
  const fs::path dir = fs::temp_directory_path() / "helm_acceptance_shape";
  fs::remove_all(dir);
  fs::create_directories(dir / "gt");
  std::ofstream(dir / "gt" / "seq.txt") << "1,2,3,4\n";
  o.require(cli({"evaluate", "--gt", (dir / "gt").string(), "--pred", (dir / "gt").string(), "--out",
                 (dir / "r.csv").string()}) == 0,
            "evaluate");
  o.require(slurp(dir / "r.csv").rfind("sequence,auc,op50,op75,precision,norm_precision,n_frames\n", 0) == 0,
            "report columns");
  fs::remove_all(dir);
}

} // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, criterion_riccati},      {2, criterion_dynamics},    {3, criterion_metrics},
      {4, criterion_ordering},     {5, criterion_disturbance}, {6, criterion_degradation},
      {7, criterion_determinism},  {8, criterion_non_reproduction},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome o;
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.failed += std::string(" [exception: ") + e.what() + "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail.str() << o.failed << "\n";
  }
  return failures == 0 ? 0 : 1;
}
