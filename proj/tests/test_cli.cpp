#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#ifndef VOXBAND_CLI_PATH
#error "VOXBAND_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(VOXBAND_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TmpDir {
  fs::path path;
  TmpDir() : path(fs::temp_directory_path() / "voxband_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli: flag and input errors map to the documented exit codes") {
  CHECK(run("definitely-not-a-command") != 0);
  CHECK(run("make-mesh --no-such-flag") != 0);
  // missing capture directory: I/O failure
  CHECK(run("reconstruct --capture /nonexistent/capture --out /tmp/out.obj") == 3);
  // unreadable mesh path: I/O failure
  CHECK(run("gt-tsdf --mesh /nonexistent/mesh.obj --out /tmp/out.svf") == 3);
  // malformed config JSON: config failure
  TmpDir tmp;
  const std::string cfg = tmp / "broken.json";
  {
    std::ofstream out(cfg);
    out << "{broken";
  }
  CHECK(run("reconstruct --config " + cfg + " --capture /tmp --out /tmp/out.obj") == 2);
}

TEST_CASE("cli: make-mesh, eval identity, gt-tsdf determinism") {
  TmpDir tmp;
  const std::string mesh = tmp / "sphere.obj";
  REQUIRE(run("make-mesh --shape sphere --out " + mesh) == 0);
  REQUIRE(fs::exists(mesh));

  const std::string report = tmp / "eval.json";
  REQUIRE(run("eval --pred " + mesh + " --gt " + mesh + " --out " + report) == 0);
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["p2s_precision_cm"].get<double>() == doctest::Approx(0.0));
  CHECK(doc["p2s_recall_cm"].get<double>() == doctest::Approx(0.0));
  CHECK(doc["chamfer_precision_cm"].get<double>() == doctest::Approx(0.0));

  const std::string svf_a = tmp / "a.svf", svf_b = tmp / "b.svf";
  REQUIRE(run("gt-tsdf --mesh " + mesh + " --resolution 32 --out " + svf_a) == 0);
  REQUIRE(run("gt-tsdf --mesh " + mesh + " --resolution 32 --out " + svf_b) == 0);
  const std::string a = slurp(svf_a), b = slurp(svf_b);
  REQUIRE(!a.empty());
  CHECK(a == b);
}
