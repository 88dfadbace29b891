#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "metromap/cli.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace metromap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("metromap-cli-" + std::to_string(std::rand()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig exact_config(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.input = input;
  c.solver_command = kExactSolverCommand;
  c.out_dir = out;
  return c;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("instance names") {
    RunConfig c;
    c.input = "data/vienna.json";
    c.k = 3;
    c.system_kind = SystemKind::kIrregular;
    c.weights = {10, 5, 1};
    CHECK(c.instance_name() == "vienna_k3_I_10-5-1");
    c.weights = {1.5, 2, 1};
    c.system_kind = SystemKind::kRegular;
    CHECK(c.instance_name() == "vienna_k3_R_1.5-2-1");
  }

  TEST_CASE("config validation") {
    RunConfig c;
    c.input = fixture_path("path3");
    c.k = 1;
    CHECK_THROWS_AS_CODE(c.validate(), ErrorCode::kInvalidParams);
    c.k = 4;
    c.system_kind = SystemKind::kCustom;
    CHECK_THROWS_AS_CODE(c.validate(), ErrorCode::kInvalidOrientation);
  }

  TEST_CASE("orient on an all-horizontal network") {
    TempDir tmp;
    const fs::path input = tmp.path / "flat.json";
    std::ofstream(input) << oracle::network_json({{"a", 0, 0}, {"b", 1, 0}, {"c", 2, 0}}, {{"a", "b", "c"}});
    RunConfig c;
    c.input = input;
    c.k = 2;
    c.out_dir = tmp.path;
    std::ostringstream out, err;
    // a single distinct slope cannot seed two irregular directions
    CHECK(cmd_orient(c, true, out, err) == 1);
    CHECK(out.str().find("network,k,system,distortion_rad") == 0);
    CHECK(out.str().find("flat,2,aligned,0.000000,") != std::string::npos);
    CHECK(out.str().find("flat,2,regular,0.000000,") != std::string::npos);
    CHECK_FALSE(err.str().empty());
    CHECK(fs::exists(tmp.path / "flat_k2_systems.json"));
  }

  TEST_CASE("orient on a fixture") {
    TempDir tmp;
    RunConfig c;
    c.input = fixture_path("vienna");
    c.k = 3;
    c.out_dir = tmp.path;
    std::ostringstream out, err;
    REQUIRE(cmd_orient(c, false, out, err) == 0);
    const auto doc = nlohmann::json::parse(slurp(tmp.path / "vienna_k3_systems.json"));
    CHECK(doc.dump().find("irregular") != std::string::npos);
  }

  TEST_CASE("layout with the exact solver") {
    TempDir tmp;
    const RunConfig c = exact_config(fixture_path("path3"), tmp.path);
    std::ostringstream out, err;
    REQUIRE(cmd_layout(c, out, err) == 0);
    CHECK(out.str().find("status optimal") != std::string::npos);
    for (const char* ext : {".lp", ".layout.json", ".csv"}) {
      CHECK(fs::exists(tmp.path / ("path3_k4_A_3-2-1" + std::string(ext))));
    }
    const Layout l = layout_from_json(nlohmann::json::parse(slurp(tmp.path / "path3_k4_A_3-2-1.layout.json")));
    CHECK(l.coords.size() == 3);
    CHECK(verify_hard_constraints(l, prepare_graph(load_fixture("path3"))).ok());

    std::ostringstream rout, rerr;
    REQUIRE(cmd_render(fixture_path("path3"), tmp.path / "path3_k4_A_3-2-1.layout.json", tmp.path, RenderStyle{},
                       rout, rerr) == 0);
    CHECK(slurp(tmp.path / "path3_k4_A_3-2-1.svg").find("<path ") != std::string::npos);
    CHECK(fs::exists(tmp.path / "path3_k4_A_3-2-1.input.svg"));
  }

  TEST_CASE("failures map to exit codes") {
    TempDir tmp;
    std::ostringstream out, err;
    CHECK(cmd_layout(exact_config(tmp.path / "missing.json", tmp.path), out, err) == 2);
    CHECK(cmd_render(fixture_path("path3"), tmp.path / "missing.layout.json", tmp.path, RenderStyle{}, out, err) == 2);
    RunConfig broken = exact_config(fixture_path("path3"), tmp.path);
    broken.solver_command = "/nonexistent/solver {lp} {sol}";
    const LayoutRun run = run_layout(broken);
    CHECK_FALSE(run.ok());
    CHECK_FALSE(run.error.empty());
    CHECK(run.csv_row.find("error") != std::string::npos);
  }

  TEST_CASE("batch expansion order") {
    BatchPlan plan;
    plan.inputs = {fixture_path("vienna"), fixture_path("cross")};
    const auto runs = expand_batch(plan, RunConfig{});
    REQUIRE(runs.size() == 36);
    CHECK(runs.front().instance_name() == "cross_k3_A_3-2-1");
    CHECK(runs[1].instance_name() == "cross_k3_A_10-5-1");
    CHECK(runs[2].instance_name() == "cross_k3_R_3-2-1");
    CHECK(runs[17].instance_name() == "cross_k5_I_10-5-1");
    CHECK(runs[18].instance_name() == "vienna_k3_A_3-2-1");
    std::set<std::string> names;
    for (const auto& r : runs) names.insert(r.instance_name());
    CHECK(names.size() == 36);
  }

  TEST_CASE("batch run writes one row per instance") {
    TempDir tmp;
    BatchPlan plan;
    plan.inputs = {fixture_path("path3")};
    plan.ks = {3, 4};
    plan.kinds = {SystemKind::kAligned};
    plan.weights = {{3, 2, 1}};
    plan.jobs = 2;
    std::ostringstream out, err;
    REQUIRE(cmd_batch(plan, exact_config({}, tmp.path), out, err) == 0);
    const std::string csv = slurp(tmp.path / "batch.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("path3") < csv.rfind("path3"));
  }

  TEST_CASE("command line binary") {
    const std::string bin = METROMAP_CLI_PATH;
    CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
    CHECK(std::system((bin + " layout > /dev/null 2>&1").c_str()) != 0);
    TempDir tmp;
    const std::string cmd = bin + " layout " + fixture_path("path3").string() + " --k 3 --solver-cmd exact --out " +
                            tmp.path.string() + " > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(tmp.path / "path3_k3_A_3-2-1.layout.json"));
  }
}
