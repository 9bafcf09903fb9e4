#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "helm/parallel.hpp"
#include "helm/runlog_io.hpp"
#include "helm/sim.hpp"

using namespace helm;

namespace {

const std::filesystem::path kScenarios = HELM_SCENARIO_DIR;

ConfigDocument scenario_doc(const std::string& name) {
  return ConfigDocument::load(kScenarios / (name + ".ini"));
}

TrajectorySpec triangle_345() {
  TrajectorySpec t;
  t.kind = TrajectoryKind::Triangle;
  t.speed = 1.0;
  t.vertices = {{0, 0}, {4, 0}, {4, 3}}; // perimeter 12
  return t;
}

} // namespace

TEST_CASE("target pose on a line") {
  TrajectorySpec line;
  line.kind = TrajectoryKind::Line;
  line.speed = 1.0;
  const Pose2D p = target_pose(line, 5.0);
  CHECK(p.x == 5.0);
  CHECK(p.y == 0.0);
  CHECK(p.psi == 0.0);

  line.origin = Pose2D(1.0, 2.0, kPi / 2.0);
  line.speed = 2.0;
  const Pose2D q = target_pose(line, 3.0);
  CHECK(q.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.y == doctest::Approx(8.0).epsilon(1e-12));

  TrajectorySpec still;
  still.kind = TrajectoryKind::Stationary;
  still.origin = Pose2D(3.0, 4.0, 1.0);
  still.speed = 5.0;
  CHECK(target_pose(still, 100.0).x == 3.0);
  CHECK_THROWS_AS(target_pose(line, -1.0), DomainError);
}

TEST_CASE("target pose on a triangle") {
  const TrajectorySpec tri = triangle_345();
  const Pose2D start = target_pose(tri, 0.0);
  CHECK(start.x == 0.0);
  CHECK(start.y == 0.0);
  CHECK(start.psi == 0.0);

  const Pose2D lap = target_pose(tri, 12.0);
  CHECK(lap.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lap.y == doctest::Approx(0.0).epsilon(1e-12));

  // Exactly at vertex 1: position is the vertex, heading is the next edge's.
  const Pose2D v1 = target_pose(tri, 4.0);
  CHECK(v1.x == 4.0);
  CHECK(v1.y == 0.0);
  CHECK(v1.psi == doctest::Approx(kPi / 2.0).epsilon(1e-15));

  const Pose2D v2 = target_pose(tri, 7.0);
  CHECK(v2.x == 4.0);
  CHECK(v2.y == 3.0);
  CHECK(v2.psi == doctest::Approx(std::atan2(-3.0, -4.0)).epsilon(1e-15));

  const Pose2D mid = target_pose(tri, 9.5);
  CHECK(mid.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mid.y == doctest::Approx(1.5).epsilon(1e-12));

  for (double t = 0.0; t < 12.0; t += 0.37) {
    const Pose2D a = target_pose(tri, t);
    const Pose2D b = target_pose(tri, t + 36.0);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-9));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-9));
  }
}

TEST_CASE("run produces one record per step at exact timestamps") {
  ConfigDocument doc = scenario_doc("line_calm");
  doc.set("duration", "3.01");
  const Scenario s = scenario_from(doc);
  const RunLog log = run_scenario(s);
  CHECK(!log.error);
  REQUIRE(log.records.size() == s.record_count());
  CHECK(log.records.size() == 151);
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    REQUIRE(log.records[k].t == static_cast<double>(k) * s.dt);
  }
}

TEST_CASE("logged ground truth equals the camera projection") {
  ConfigDocument doc = scenario_doc("triangle_rough");
  doc.set("duration", "10");
  const Scenario s = scenario_from(doc);
  const RunLog log = run_scenario(s);
  for (const StepRecord& r : log.records) {
    const auto box = project_target(r.state.pose, r.target, s.tracker.render.target_extent, s.camera);
    REQUIRE(box.has_value() == r.gt_box.has_value());
    if (box) {
      CHECK(box->x == r.gt_box->x);
      CHECK(box->y == r.gt_box->y);
      CHECK(box->w == r.gt_box->w);
      CHECK(box->h == r.gt_box->h);
    }
  }
  const BoxExport ex = export_boxes(log);
  CHECK(ex.gt.size() == ex.pred.size());
}

TEST_CASE("runs are deterministic") {
  for (const char* name : {"line_rough", "ncc_clear"}) {
    ConfigDocument doc = scenario_doc(name);
    doc.set("duration", "4");
    const Scenario s = scenario_from(doc);
    CHECK(format_runlog_csv(run_scenario(s)) == format_runlog_csv(run_scenario(s)));
  }
  ConfigDocument doc = scenario_doc("line_rough");
  doc.set("duration", "4");
  const Scenario a = scenario_from(doc);
  doc.set("seed", "8");
  const Scenario b = scenario_from(doc);
  CHECK(format_runlog_csv(run_scenario(a)) != format_runlog_csv(run_scenario(b)));
}

TEST_CASE("zero visibility ends in SEARCHING with zero speed reference") {
  ConfigDocument doc = scenario_doc("line_calm");
  doc.set("duration", "5");
  doc.set("sea.visibility", "0");
  const RunLog log = run_scenario(scenario_from(doc));
  CHECK(std::none_of(log.records.begin(), log.records.end(),
                     [](const StepRecord& r) { return r.detection.valid; }));
  CHECK(log.records.back().command.mode == GuidanceMode::Searching);
  bool searched = false;
  for (const StepRecord& r : log.records) {
    if (r.command.mode == GuidanceMode::Searching) {
      searched = true;
      CHECK(r.command.u_ref == 0.0);
    }
  }
  CHECK(searched);
}

TEST_CASE("stationary target is held on the bow") {
  const RunLog log = run_scenario(load_scenario(kScenarios / "stationary.ini"));
  REQUIRE(!log.error);
  const std::size_t tail = static_cast<std::size_t>(2.0 / log.dt);
  double sum = 0.0;
  for (std::size_t k = log.records.size() - tail; k < log.records.size(); ++k) {
    sum += std::abs(log.records[k].command.e_psi);
  }
  CHECK(sum / static_cast<double>(tail) < 0.02);
  // The ramped law closes on the standoff from outside and slows as it does.
  const StepRecord& first = log.records.front();
  const StepRecord& last = log.records.back();
  CHECK(std::abs(last.command.e_d) < 0.5 * std::abs(first.command.e_d));
  CHECK(last.command.u_ref < first.command.u_ref);
  for (const StepRecord& r : log.records) {
    REQUIRE(r.command.e_d < 0.1);
    REQUIRE(r.command.u_ref >= 0.0);
  }
}

TEST_CASE("default controllers stay bounded after the first crossing on the calm line") {
  for (const char* type : {"pid", "smc", "lqr"}) {
    CAPTURE(type);
    ConfigDocument doc = scenario_doc("line_calm");
    doc.set("controller.type", type);
    const RunLog log = run_scenario(scenario_from(doc));
    REQUIRE(!log.error);
    std::vector<double> e;
    for (const StepRecord& r : log.records) {
      if (!e.empty() || r.command.mode == GuidanceMode::Tracking) {
        e.push_back(r.command.e_psi);
      }
    }
    REQUIRE(!e.empty());
    const double e0 = std::abs(e.front());
    std::size_t k = 1;
    while (k < e.size() && e[k] * e.front() > 0.0) {
      ++k;
    }
    for (; k < e.size(); ++k) {
      REQUIRE(std::abs(e[k]) <= e0);
    }
  }
}

TEST_CASE("summary helpers") {
  CHECK(overshoot_percent({1.0, 0.5, 0.2, 0.0}) == 0.0);
  CHECK(overshoot_percent({1.0, 0.0, -0.25, 0.0}) == 25.0);
  CHECK(overshoot_percent({-2.0, 0.0, 0.5}) == 25.0);
  CHECK(overshoot_percent({}) == 0.0);
  CHECK(total_variation({3.0, 3.0, 3.0}) == 0.0);
  CHECK(total_variation({0.0, 1.0, -1.0}) == 3.0);
  CHECK(settling_time({0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.01, 0.0}, 0.05) == 2.0);
  CHECK(settling_time({0.0, 1.0}, {0.0, 0.0}, 0.05) == 0.0);
  CHECK(std::isinf(settling_time({0.0, 1.0}, {1.0, 1.0}, 0.05)));
  CHECK(std::isinf(settling_time({}, {}, 0.05)));
}

TEST_CASE("sweep keeps input order and is independent of worker count") {
  ConfigDocument doc = scenario_doc("line_calm");
  doc.set("duration", "6");
  const std::vector<std::string> values{"pid", "smc", "lqr"};
  const auto one = sweep(doc, "controller.type", values, 1);
  const auto four = sweep(doc, "controller.type", values, 4);
  REQUIRE(one.size() == 3);
  CHECK(one[0].value == "pid");
  CHECK(one[2].value == "lqr");
  CHECK(format_sweep_csv(one) == format_sweep_csv(four));
  CHECK(format_sweep_csv(one).rfind("value,settling_time,", 0) == 0);
  CHECK_THROWS_AS(sweep(doc, "controller.nothing", values, 2), ConfigError);
  CHECK_THROWS_AS(sweep(doc, "controller.type", {"mpc"}, 2), ConfigError);
}

TEST_CASE("parallel_for visits every index and rethrows the lowest failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) {
        throw std::runtime_error(std::to_string(i));
      }
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "17");
  }
  CHECK(worker_count() >= 1);
}
