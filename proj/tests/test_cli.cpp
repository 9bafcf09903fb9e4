#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = HELM_SCENARIO_DIR;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "helm-bench");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = helm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("helm_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A short copy of a shipped scenario so CLI tests stay fast.
fs::path short_scenario(const fs::path& dir, const std::string& name, double duration) {
  std::string text = slurp(kScenarios / (name + ".ini"));
  const auto pos = text.find("duration = ");
  const auto eol = text.find('\n', pos);
  text.replace(pos, eol - pos, "duration = " + std::to_string(duration));
  const fs::path p = dir / (name + ".ini");
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

bool no_temp_files(const fs::path& dir) {
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().filename().string().find(".tmp.") != std::string::npos) {
      return false;
    }
  }
  return true;
}

} // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  const Result none = run({});
  CHECK(none.code == 1);
  const Result bogus = run({"launch"});
  CHECK(bogus.code == 1);
  CHECK(!bogus.err.empty());
  CHECK(run({"simulate", "--scenario", "/nonexistent.ini", "--out", "/tmp/x"}).code == 1);
  CHECK(run({"simulate", "--out", "/tmp/x"}).code == 1);
  CHECK(run({"plot", "--log", (kScenarios / "line_calm.ini").string(), "--kind", "pie"}).code == 1);
}

TEST_CASE("gains for unit weights") {
  const Result r = run({"gains", "--q", "1,1,1", "--r", "1,1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "K =");
  std::getline(in, line);
  std::istringstream row(line);
  double k0 = 0, k1 = 1, k2 = 1;
  row >> k0 >> k1 >> k2;
  CHECK(k0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k1 == 0.0);
  CHECK(k2 == 0.0);
  CHECK(r.out.find("P =") != std::string::npos);
  CHECK(r.out.find("eigenvalues =") != std::string::npos);

  CHECK(run({"gains", "--scenario", (kScenarios / "line_calm.ini").string()}).code == 0);
  CHECK(run({"gains", "--q", "1,1"}).code == 1);
  CHECK(run({"gains", "--q", "1,x,1"}).code == 1);
  CHECK(run({"gains", "--r", "0,1"}).code == 1);
  // An unobservable heading weight has no stabilizing solution.
  CHECK(run({"gains", "--q", "1,0,0"}).code == 2);
}

TEST_CASE("simulate writes logs atomically and deterministically") {
  const fs::path dir = fresh_dir("simulate");
  const fs::path scen = short_scenario(dir, "line_rough", 5.0);
  const Result a = run({"simulate", "--scenario", scen.string(), "--out", (dir / "a").string()});
  REQUIRE(a.code == 0);
  CHECK(a.out.rfind("scenario=line_rough seed=7 records=251 ", 0) == 0);
  CHECK(a.out.find(" aborted=0") != std::string::npos);
  const Result b = run({"simulate", "--scenario", scen.string(), "--out", (dir / "b").string()});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  for (const char* f : {"runlog.csv", "gt/line_rough.txt", "pred/line_rough.txt"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(no_temp_files(dir));

  const Result c =
      run({"simulate", "--scenario", scen.string(), "--out", (dir / "c").string(), "--seed", "99"});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("seed=99") != std::string::npos);
  CHECK(slurp(dir / "a" / "runlog.csv") != slurp(dir / "c" / "runlog.csv"));

  // A bad key fails validation before anything is written.
  std::ofstream(dir / "bad.ini") << "[usv]\nbogus = 1\n";
  const Result bad = run({"simulate", "--scenario", (dir / "bad.ini").string(), "--out",
                          (dir / "bad").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bogus") != std::string::npos);
  CHECK(!fs::exists(dir / "bad" / "runlog.csv"));
  fs::remove_all(dir);
}

TEST_CASE("evaluate with predictions equal to ground truth") {
  const fs::path dir = fresh_dir("evaluate");
  const fs::path scen = short_scenario(dir, "line_calm", 4.0);
  REQUIRE(run({"simulate", "--scenario", scen.string(), "--out", (dir / "run").string()}).code == 0);
  const fs::path gt = dir / "run" / "gt";

  const Result r = run({"evaluate", "--gt", gt.string(), "--pred", gt.string()});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row, mean;
  std::getline(in, header);
  std::getline(in, row);
  std::getline(in, mean);
  CHECK(header == "sequence,auc,op50,op75,precision,norm_precision,n_frames");
  CHECK(row.rfind("line_calm,100,100,100,100,100,", 0) == 0);
  CHECK(mean.rfind("mean,100,100,100,100,100,", 0) == 0);

  const Result rel = run({"evaluate", "--gt", gt.string(), "--pred", (dir / "run" / "pred").string(),
                          "--out", (dir / "report.csv").string(), "--curves",
                          (dir / "curves.csv").string(), "--relative-to-best"});
  REQUIRE(rel.code == 0);
  const std::string report = slurp(dir / "report.csv");
  CHECK(report.rfind("sequence,auc,op50,op75,precision,norm_precision,n_frames,norm_precision_rel\n", 0) == 0);
  const std::string curves = slurp(dir / "curves.csv");
  CHECK(curves.rfind("sequence,curve,threshold,value\n", 0) == 0);
  CHECK(curves.find("line_calm,success,") != std::string::npos);

  fs::create_directories(dir / "empty");
  CHECK(run({"evaluate", "--gt", gt.string(), "--pred", (dir / "empty").string()}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("sweep and plot") {
  const fs::path dir = fresh_dir("sweep");
  const fs::path scen = short_scenario(dir, "line_calm", 4.0);
  const Result sw = run({"sweep", "--scenario", scen.string(), "--axis", "controller.type",
                         "--values", "pid,smc,lqr", "--out", (dir / "sweep.csv").string()});
  REQUIRE(sw.code == 0);
  const std::string csv = slurp(dir / "sweep.csv");
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> firsts;
  while (std::getline(in, line)) {
    firsts.push_back(line.substr(0, line.find(',')));
  }
  CHECK(firsts == std::vector<std::string>{"value", "pid", "smc", "lqr"});
  CHECK(run({"sweep", "--scenario", scen.string(), "--axis", "usv.bogus", "--values", "1"}).code == 1);

  REQUIRE(run({"simulate", "--scenario", scen.string(), "--out", (dir / "run").string()}).code == 0);
  for (const char* kind : {"yaw_error", "thrust", "trajectory"}) {
    CAPTURE(kind);
    const fs::path svg = dir / (std::string(kind) + ".svg");
    const Result p = run({"plot", "--log", (dir / "run" / "runlog.csv").string(), "--kind", kind,
                          "--out", svg.string()});
    REQUIRE(p.code == 0);
    const std::string body = slurp(svg);
    CHECK(body.find("<svg") != std::string::npos);
    CHECK(body.find("<path d=\"M") != std::string::npos);
    CHECK(body.find("</svg>") != std::string::npos);
  }
  CHECK(no_temp_files(dir));
  fs::remove_all(dir);
}
