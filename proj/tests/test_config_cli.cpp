#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "emdec/config.hpp"
#include "emdec/driver.hpp"
#include "emdec/error.hpp"
#include "emdec/mesh_io.hpp"
#include "support.hpp"

using namespace emdec;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return "no error";
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("emdec_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

int run_cli(const std::string& args) {
  const int status = std::system((std::string(EMDEC_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults and a full config") {
  std::istringstream empty("");
  const RunConfig d = parse_config(empty);
  CHECK(d.mesh_type == "rect");
  CHECK(d.integrator == "uniform");
  CHECK(d.cells == std::vector<Index>{16, 16});

  std::istringstream in(R"(# comment
[mesh]
type = rect
cells = 4 5 6
size = 1 2 3
; another comment
[materials]
epsilon = 2
mu = 3
region = 0 0 0 0.5 0.5 0.5 4 5
[integrator]
type = uniform
cfl_fraction = 0.25
[scenario]
name = cavity-mode
modes = 1 2 1
[run]
steps = 7
cadence = 2
probe = 0.5 0.5 0.5
probe = 0.1 0.2 0.3
[output]
dir = somewhere
[tolerances]
continuity = 1e-9
)");
  const RunConfig c = parse_config(in);
  CHECK(c.dimension == 3);
  CHECK(c.cells == std::vector<Index>{4, 5, 6});
  CHECK(c.epsilon == 2.0);
  REQUIRE(c.regions.size() == 1);
  CHECK(c.regions[0].mu == 5.0);
  CHECK(c.cfl_fraction == 0.25);
  CHECK(c.modes == std::vector<int>{1, 2, 1});
  CHECK(c.probes.size() == 2);
  CHECK(c.out_dir == "somewhere");
  CHECK(c.continuity_tolerance == 1e-9);

  std::ostringstream os;
  write_config(os, c);
  std::istringstream back(os.str());
  const RunConfig r = parse_config(back);
  std::ostringstream os2;
  write_config(os2, r);
  CHECK(os.str() == os2.str());
}

TEST_CASE("strict parsing names the line and key") {
  CHECK(parse_error("[mesh]\ncels = 4 4\n").find("line 2") != std::string::npos);
  CHECK(parse_error("[mesh]\ncels = 4 4\n").find("mesh.cels") != std::string::npos);
  CHECK(parse_error("[meshes]\n").find("line 1") != std::string::npos);
  CHECK(parse_error("[mesh]\ncells = 4 4\ncells = 4 4\n").find("line 3") != std::string::npos);
  CHECK(parse_error("[mesh]\ncells = 4 x\n").find("mesh.cells") != std::string::npos);
  CHECK(parse_error("[integrator]\ndt = -1\n").find("integrator.dt") != std::string::npos);
  CHECK(parse_error("[integrator]\ntype = leapfrog\n").find("integrator.type") != std::string::npos);
  CHECK(parse_error("[integrator]\ntype = avi\n").find("duration") != std::string::npos);
  CHECK(parse_error("[mesh]\ntype = file\nfile = /nonexistent/mesh.txt\n").find("mesh.file") != std::string::npos);
  CHECK(parse_error("no section = 1\n").find("line 1") != std::string::npos);
  CHECK(parse_error("[mesh]\njitter\n").find("line 2") != std::string::npos);
}

TEST_CASE("run writes outputs and maps failures to exit codes") {
  TempDir tmp;
  const std::string out = (tmp.path / "out").string();
  std::ostringstream log, stdout_;

  const std::string ok = tmp.write("ok.ini", "[mesh]\ncells = 6 6\n[run]\nsteps = 20\ncadence = 5\nprobe = 0.4 0.4\n");
  CHECK(cmd_run_file(ok, out, "", false, stdout_, log) == kExitOk);
  CHECK(fs::exists(fs::path(out) / "trace.csv"));
  CHECK(fs::exists(fs::path(out) / "fields.txt"));
  CHECK(fs::exists(fs::path(out) / "run-manifest"));
  std::ifstream trace(fs::path(out) / "trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header.rfind("t,energy,gauss_max,divb_max,E_edge", 0) == 0);

  std::ostringstream printed;
  CHECK(cmd_run_file(ok, "", "11", true, printed, log) == kExitOk);
  CHECK(printed.str().find("seed = 11") != std::string::npos);
  CHECK(cmd_run_file(ok, "", "abc", false, printed, log) == kExitConfig);

  CHECK(cmd_run_file(tmp.write("typo.ini", "[run]\nstep = 5\n"), out, "", false, stdout_, log) == kExitConfig);
  CHECK(cmd_run_file((tmp.path / "missing.ini").string(), out, "", false, stdout_, log) != kExitOk);

  const std::string guard = tmp.write("guard.ini", "[mesh]\ncells = 8 8\n[integrator]\ndt = 0.2\n");
  std::ostringstream guard_log;
  CHECK(cmd_run_file(guard, out, "", false, stdout_, guard_log) == kExitConfig);
  CHECK(guard_log.str().find("stability bound") != std::string::npos);

  const std::string blow = tmp.write(
      "blow.ini", "[mesh]\ncells = 8 8\n[integrator]\ndt = 0.13\nstability_guard = false\n[run]\nsteps = 5000\n");
  CHECK(cmd_run_file(blow, out, "", false, stdout_, log) == kExitBlowup);
  CHECK(fs::exists(fs::path(out) / "run-manifest"));

  const std::string bad_source = tmp.write(
      "src.ini", "[mesh]\ncells = 8 8\n[scenario]\nname = dipole-current\ncharge_scale = 1.5\n[run]\nsteps = 50\n");
  std::ostringstream src_log;
  CHECK(cmd_run_file(bad_source, out, "", false, stdout_, src_log) == kExitValidation);
  CHECK(src_log.str().find("continuity") != std::string::npos);

  const std::string avi = tmp.write("avi.ini",
                                    "[mesh]\ntype = jittered\ncells = 6 6\n[integrator]\ntype = avi\npolicy = "
                                    "per-face-cfl\n[run]\nduration = 0.5\nsample_interval = 0.1\n");
  CHECK(cmd_run_file(avi, out, "", false, stdout_, log) == kExitOk);
  const std::string avi_dipole = tmp.write("avid.ini",
                                           "[mesh]\ntype = jittered\ncells = 6 6\n[integrator]\ntype = avi\npolicy = "
                                           "per-face-cfl\n[scenario]\nname = dipole-current\n[run]\nduration = 0.7\n");
  CHECK(cmd_run_file(avi_dipole, out, "", false, stdout_, log) == kExitOk);
}

TEST_CASE("validate-mesh and list-scenarios") {
  TempDir tmp;
  std::ostringstream out, log;
  const std::string good = (tmp.path / "good.mesh").string();
  write_mesh_file(good, generate_jittered_triangulation({4, 4}, {0.25, 0.25}, 0.1, 1));
  CHECK(cmd_validate_mesh(good, out, log) == kExitOk);
  CHECK(out.str().find("mesh is valid") != std::string::npos);

  const std::string sliver = tmp.write("sliver.mesh", "dec-mesh 2\nvertices 4\n0 0\n1 0\n0.5 0.05\n0.5 -0.05\ncells 2\n0 1 2\n0 3 1\n");
  CHECK(cmd_validate_mesh(sliver, out, log) == kExitValidation);
  const std::string garbage = tmp.write("garbage.mesh", "hello\n");
  CHECK(cmd_validate_mesh(garbage, out, log) == kExitValidation);
  CHECK(cmd_validate_mesh((tmp.path / "none.mesh").string(), out, log) == kExitOther);

  std::ostringstream names;
  CHECK(cmd_list_scenarios(names) == kExitOk);
  CHECK(names.str() == "cavity-mode\ndipole-current\nrandom-noise\nvacuum-zero\n");
}

TEST_CASE("command-line binary") {
  TempDir tmp;
  CHECK(run_cli("list-scenarios") == 0);
  CHECK(run_cli("") == kExitConfig);
  CHECK(run_cli("run") == kExitConfig);
  CHECK(run_cli("run --config " + tmp.write("t.ini", "[run]\nstepz = 1\n")) == kExitConfig);
  const std::string ok = tmp.write("ok.ini", "[mesh]\ncells = 4 4\n[run]\nsteps = 4\n");
  CHECK(run_cli("run --config " + ok + " --out " + (tmp.path / "o").string()) == 0);
  CHECK(run_cli("validate-mesh " + (tmp.path / "none").string()) == kExitOther);
}
