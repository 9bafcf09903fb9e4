#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helm/atomic_file.hpp"
#include "helm/control.hpp"
#include "helm/metrics.hpp"
#include "helm/otb_io.hpp"
#include "helm/parallel.hpp"
#include "helm/runlog_io.hpp"
#include "helm/scenario.hpp"
#include "helm/sim.hpp"
#include "helm/svg.hpp"

namespace helm {

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw ConfigError(std::string(flag) + ": invalid number '" + item + "'");
    }
  }
  if (out.size() != expected) {
    throw ConfigError(std::string(flag) + ": expected " + std::to_string(expected) +
                      " comma-separated values");
  }
  return out;
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(item);
  }
  if (out.empty()) {
    throw ConfigError("--values: empty list");
  }
  return out;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

std::string f(double v) { return format_double(v); }

// ------------------------------------------------------------ simulate

struct SimulateArgs {
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  ConfigDocument doc = ConfigDocument::load(a.scenario);
  if (a.seed) {
    doc.set("seed", std::to_string(*a.seed));
  }
  const Scenario s = scenario_from(doc);
  const RunLog log = run_scenario(s);
  const BoxExport boxes = export_boxes(log);

  const fs::path dir(a.out_dir);
  AtomicWriteSet files;
  files.stage(dir / "runlog.csv", format_runlog_csv(log));
  files.stage(dir / "gt" / (s.name + ".txt"), format_otb(boxes.gt));
  files.stage(dir / "pred" / (s.name + ".txt"), format_otb(boxes.pred));
  files.commit();

  const RunSummary sum = summarize(log, s.cost);
  out << "scenario=" << s.name << " seed=" << s.seed << " records=" << log.records.size()
      << " settling_time=" << f(sum.settling_time) << " overshoot_pct=" << f(sum.overshoot_pct)
      << " ss_rms_e_psi=" << f(sum.ss_rms_e_psi) << " tv_total=" << f(sum.tv_total)
      << " cost=" << f(sum.cost);
  if (!boxes.gt.empty()) {
    std::vector<BoundingBox> gt;
    for (const auto& b : boxes.gt) {
      gt.push_back(*b);
    }
    const MetricReport rep = report_from(evaluate_boxes(gt, boxes.pred), s.name);
    out << " auc=" << f(rep.auc) << " precision=" << f(rep.precision);
  }
  out << " aborted=" << (log.error ? 1 : 0) << "\n";
  if (log.error) {
    err << "error: run aborted: " << *log.error << "\n";
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------ evaluate

struct EvaluateArgs {
  std::string gt_dir;
  std::string pred_dir;
  std::string out;
  std::string curves;
  bool relative_to_best = false;
};

std::string report_row(const MetricReport& r) {
  return r.sequence + "," + f(r.auc) + "," + f(r.op50) + "," + f(r.op75) + "," +
         f(r.precision) + "," + f(r.norm_precision) + "," + std::to_string(r.n_frames);
}

std::string curves_csv(const std::vector<MetricReport>& reports) {
  std::string out = "sequence,curve,threshold,value\n";
  for (const MetricReport& r : reports) {
    for (int k = 0; k < kSuccessPoints; ++k) {
      out += r.sequence + ",success," + f(k / 100.0) + "," + f(r.success_curve[k]) + "\n";
    }
    for (int k = 0; k < kPrecisionPoints; ++k) {
      out += r.sequence + ",precision," + std::to_string(k) + "," + f(r.precision_curve[k]) + "\n";
    }
    for (int k = 0; k < kNormPrecisionPoints; ++k) {
      out += r.sequence + ",norm_precision," + f(k / 100.0) + "," +
             f(r.norm_precision_curve[k]) + "\n";
    }
  }
  return out;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(a.gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) {
    throw ConfigError("evaluate: no .txt sequences in " + a.gt_dir);
  }
  for (const std::string& n : names) {
    if (!fs::is_regular_file(fs::path(a.pred_dir) / (n + ".txt"))) {
      throw ConfigError("evaluate: missing prediction file for sequence '" + n + "'");
    }
  }

  std::vector<MetricReport> reports(names.size());
  parallel_for(names.size(), worker_count(), [&](std::size_t i) {
    reports[i] = evaluate_sequence(fs::path(a.gt_dir) / (names[i] + ".txt"),
                                   fs::path(a.pred_dir) / (names[i] + ".txt"));
    reports[i].sequence = names[i];
  });
  const MetricReport mean = aggregate(reports, "mean");

  double best = 0.0;
  for (const MetricReport& r : reports) {
    best = std::max(best, r.norm_precision);
  }
  const auto rel = [&](double v) { return best > 0.0 ? 100.0 * v / best : 0.0; };

  std::string csv = "sequence,auc,op50,op75,precision,norm_precision,n_frames";
  csv += a.relative_to_best ? ",norm_precision_rel\n" : "\n";
  double rel_sum = 0.0;
  for (const MetricReport& r : reports) {
    csv += report_row(r);
    if (a.relative_to_best) {
      csv += "," + f(rel(r.norm_precision));
      rel_sum += rel(r.norm_precision);
    }
    csv += "\n";
  }
  csv += report_row(mean);
  if (a.relative_to_best) {
    csv += "," + f(rel_sum / static_cast<double>(reports.size()));
  }
  csv += "\n";

  if (!a.curves.empty()) {
    std::vector<MetricReport> all = reports;
    all.push_back(mean);
    write_file_atomic(a.curves, curves_csv(all));
  }
  emit(a.out, csv, out);
  return 0;
}

// ------------------------------------------------------------ gains

struct GainsArgs {
  std::string scenario;
  std::string q;
  std::string r;
};

template <class M>
void print_matrix(std::ostream& out, const char* name, const M& m) {
  out << name << " =\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << " " << f(m(i, j));
    }
    out << "\n";
  }
}

int cmd_gains(const GainsArgs& a, std::ostream& out) {
  UsvParams params;
  LqrWeights w;
  if (!a.scenario.empty()) {
    const Scenario s = load_scenario(a.scenario);
    params = s.usv;
    w = s.controller.lqr;
  }
  if (!a.q.empty()) {
    const auto q = parse_list(a.q, 3, "--q");
    w.Q = Eigen::Vector3d(q[0], q[1], q[2]).asDiagonal();
  }
  if (!a.r.empty()) {
    const auto r = parse_list(a.r, 2, "--r");
    w.R = Eigen::Vector2d(r[0], r[1]).asDiagonal();
  }
  w.validate();
  const LqrGain g = lqr_gain(params, w);
  print_matrix(out, "K", g.K);
  print_matrix(out, "P", g.P);
  const Eigen::Vector3cd eig = closed_loop_eigenvalues(plant_a(), plant_b(params), g.K);
  out << "eigenvalues =\n";
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double im = eig[i].imag();
    out << "  " << f(eig[i].real()) << (im < 0 ? " - " : " + ") << f(std::abs(im)) << "i\n";
  }
  return 0;
}

// ------------------------------------------------------------ sweep

struct SweepArgs {
  std::string scenario;
  std::string axis;
  std::string values;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const ConfigDocument doc = ConfigDocument::load(a.scenario);
  const auto rows = sweep(doc, a.axis, split_values(a.values), worker_count());
  emit(a.out, format_sweep_csv(rows), out);
  return 0;
}

// ------------------------------------------------------------ plot

struct PlotArgs {
  std::string log;
  std::string kind;
  std::string out;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  const PlotKind kind = parse_plot_kind(a.kind);
  emit(a.out, plot_runlog(read_csv_table(a.log), kind), out);
  return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Visual-servoing USV benchmark: simulation, tracker evaluation, LQR gains"};
  app.name("helm-bench");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run a scenario and write its logs");
  c_sim->add_option("--scenario", sim.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out_dir, "Output directory")->required();
  c_sim->add_option("--seed", sim.seed, "Override the scenario seed");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score predicted boxes against ground truth");
  c_ev->add_option("--gt", ev.gt_dir, "Ground-truth directory")->required()->check(CLI::ExistingDirectory);
  c_ev->add_option("--pred", ev.pred_dir, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  c_ev->add_option("--out", ev.out, "Report CSV (default stdout)");
  c_ev->add_option("--curves", ev.curves, "Write success/precision curves to this CSV");
  c_ev->add_flag("--relative-to-best", ev.relative_to_best,
                 "Append norm precision relative to the best sequence");

  GainsArgs gn;
  auto* c_gn = app.add_subcommand("gains", "Print the LQR gain, Riccati solution and closed-loop poles");
  c_gn->add_option("--scenario", gn.scenario, "Scenario file for vehicle params and weights")
      ->check(CLI::ExistingFile);
  c_gn->add_option("--q", gn.q, "Diagonal of Q as q_u,q_psi,q_r");
  c_gn->add_option("--r", gn.r, "Diagonal of R as r_t1,r_t2");
  c_gn->add_flag("--lqr", "Accepted for compatibility; LQR is the only gain-based controller");

  SweepArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Run a scenario over a list of parameter values");
  c_sw->add_option("--scenario", sw.scenario, "Base scenario file")->required()->check(CLI::ExistingFile);
  c_sw->add_option("--axis", sw.axis, "Parameter path, e.g. controller.type")->required();
  c_sw->add_option("--values", sw.values, "Comma-separated values")->required();
  c_sw->add_option("--out", sw.out, "Sweep CSV (default stdout)");

  PlotArgs pl;
  auto* c_pl = app.add_subcommand("plot", "Render an SVG line plot from a run log");
  c_pl->add_option("--log", pl.log, "Run log CSV")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--kind", pl.kind, "yaw_error, thrust or trajectory")
      ->required()
      ->check(CLI::IsMember({"yaw_error", "thrust", "trajectory"}));
  c_pl->add_option("--out", pl.out, "SVG file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (*c_sim) {
      return cmd_simulate(sim, out, err);
    }
    if (*c_ev) {
      return cmd_evaluate(ev, out);
    }
    if (*c_gn) {
      return cmd_gains(gn, out);
    }
    if (*c_sw) {
      return cmd_sweep(sw, out);
    }
    return cmd_plot(pl, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace helm
