#include "helm/otb_io.hpp"
#include "helm/parallel.hpp"
#include "helm/sim.hpp"

namespace helm {

std::vector<SweepRow> sweep(const ConfigDocument& base, const std::string& axis,
                            const std::vector<std::string>& values, int threads) {
  const Scenario base_scenario = scenario_from(base);

  // Resolve every variant up front so a bad path or value fails before any
  // run starts.
  std::vector<Scenario> variants;
  variants.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ConfigDocument doc = base;
    doc.set(axis, values[i]);
    if (axis != "seed") {
      doc.set("seed", std::to_string(derive_seed(base_scenario.seed, i)));
    }
    variants.push_back(scenario_from(doc));
  }

  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    rows[i].value = values[i];
    rows[i].summary = summarize(run_scenario(variants[i]), variants[i].cost);
  });
  return rows;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "value,settling_time,overshoot_pct,ss_rms_e_psi,tv_left,tv_right,tv_total,cost,aborted\n";
  for (const SweepRow& r : rows) {
    const RunSummary& s = r.summary;
    out += r.value + "," + format_double(s.settling_time) + "," + format_double(s.overshoot_pct) +
           "," + format_double(s.ss_rms_e_psi) + "," + format_double(s.tv_left) + "," +
           format_double(s.tv_right) + "," + format_double(s.tv_total) + "," +
           format_double(s.cost) + "," + (s.aborted ? "1" : "0") + "\n";
  }
  return out;
}

} // namespace helm
