#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliFixture {
  fs::path dir;

  CliFixture() {
    dir = fs::temp_directory_path() / "sectorcert_cli_test";
    fs::create_directories(dir);
    write("gain_half.json", R"({"A": [], "B": [], "C": [], "D": [[0.5]]})");
    write("gain_two.json", R"({"A": [], "B": [], "C": [], "D": [[2.0]]})");
    write("unit_sector.json",
          R"({"preset": "small_gain", "params": {"gamma1": 1.0, "gamma2": 1.0}})");
    write("sg_half.json",
          R"({"preset": "small_gain", "params": {"gamma1": 0.5, "gamma2": 0.5}})");
    write("unit_gain_phi.json", R"({"kind": "static_map", "map": "gain", "gain": 1.0})");
    write("small_gain_phi.json", R"({"kind": "static_map", "map": "gain", "gain": 0.3})");
    write("broken.json", "{ not json");
  }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream out(dir / name);
    out << content;
  }

  [[nodiscard]] std::string path(const std::string& name) const {
    return (dir / name).string();
  }

  [[nodiscard]] int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd =
        env + (env.empty() ? "" : " ") + std::string(SECTORCERT_CLI_PATH) + " " + args +
        " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  [[nodiscard]] std::string slurp(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

}  // namespace

TEST_CASE("exit code contract") {
  const CliFixture fx;

  SUBCASE("certified loop exits 0") {
    CHECK(fx.run("certify --system " + fx.path("gain_half.json") + " --sector " +
                 fx.path("unit_sector.json") + " --horizon 8") == 0);
  }
  SUBCASE("uncertifiable loop exits 1") {
    CHECK(fx.run("certify --system " + fx.path("gain_two.json") + " --sector " +
                 fx.path("unit_sector.json") + " --horizon 8") == 1);
  }
  SUBCASE("violation found exits 1 and writes the witness file") {
    const std::string witness = fx.path("w.json");
    CHECK(fx.run("violate --system " + fx.path("gain_two.json") + " --sector " +
                 fx.path("unit_sector.json") + " --gamma 10 --horizon 4 --witness " +
                 witness) == 1);
    CHECK(std::filesystem::exists(witness));
    CHECK(fx.slurp("w.json").find("\"operator_realizable\"") != std::string::npos);
  }
  SUBCASE("no violation below the certified gain exits 0") {
    CHECK(fx.run("violate --system " + fx.path("gain_half.json") + " --sector " +
                 fx.path("unit_sector.json") + " --gamma 10 --horizon 4") == 0);
  }
  SUBCASE("usage errors exit 2") {
    CHECK(fx.run("certify --sector " + fx.path("unit_sector.json")) == 2);
    CHECK(fx.run("no_such_command") == 2);
    CHECK(fx.run("certify --system " + fx.path("gain_half.json") + " --sector " +
                 fx.path("unit_sector.json") + " --rho 1.5") == 2);
  }
  SUBCASE("malformed input files exit 2") {
    CHECK(fx.run("certify --system " + fx.path("broken.json") + " --sector " +
                 fx.path("unit_sector.json")) == 2);
    fx.write("asym.json", R"({"M": [[1.0, 0.5], [0.4, -1.0]], "side": "phi"})");
    CHECK(fx.run("certify --system " + fx.path("gain_half.json") + " --sector " +
                 fx.path("asym.json")) == 2);
  }
  SUBCASE("ill-posed simulation exits 3") {
    fx.write("pulse.csv", "k,v0\n0,1.0\n1,0.0\n2,0.0\n3,0.0\n4,0.0\n");
    CHECK(fx.run("simulate --system " + fx.path("gain_two.json") + " --nonlinearity " +
                 fx.path("unit_gain_phi.json") + " --u1 " + fx.path("pulse.csv") +
                 " --horizon 4") == 3);
  }
  SUBCASE("decay pass/fail exit codes") {
    fx.write("gd.json", R"({"A": [[1.0]], "B": [[-0.18181818]], "C": [[1.0]], "D": [[0.0]]})");
    fx.write("phi10.json", R"({"kind": "static_map", "map": "gain", "gain": 10.0})");
    CHECK(fx.run("decay --system " + fx.path("gd.json") + " --nonlinearity " +
                 fx.path("phi10.json") + " --rho 0.83 --steps 200 --x0 1.0") == 0);
    CHECK(fx.run("decay --system " + fx.path("gd.json") + " --nonlinearity " +
                 fx.path("phi10.json") + " --rho 0.7 --steps 200 --x0 1.0") == 1);
  }
}

TEST_CASE("reports are byte-identical across runs") {
  const CliFixture fx;
  const std::string base = "certify --system " + fx.path("gain_half.json") + " --sector " +
                           fx.path("unit_sector.json") + " --horizon 16 --out ";
  REQUIRE(fx.run(base + fx.path("r1.json")) == 0);
  REQUIRE(fx.run(base + fx.path("r2.json")) == 0);
  const std::string r1 = fx.slurp("r1.json");
  CHECK(!r1.empty());
  CHECK(r1 == fx.slurp("r2.json"));

  const std::string gamma_cmd = "gamma --sector " + fx.path("sg_half.json") + " --system " +
                                fx.path("gain_half.json") +
                                " --samples 5 --seed 7 --horizon 16 --out ";
  REQUIRE(fx.run(gamma_cmd + fx.path("g1.json")) == 0);
  REQUIRE(fx.run(gamma_cmd + fx.path("g2.json")) == 0);
  CHECK(fx.slurp("g1.json") == fx.slurp("g2.json"));
  CHECK(fx.slurp("g1.json").find("\"within_bound\": true") != std::string::npos);

  // The frequency screen fans out across workers; the report must not depend
  // on the thread count.
  const std::string screen_cmd = "certify --system " + fx.path("gain_half.json") +
                                 " --sector " + fx.path("unit_sector.json") +
                                 " --horizon 16 --grid 256 --out ";
  REQUIRE(fx.run(screen_cmd + fx.path("s1.json")) == 0);
  REQUIRE(fx.run(screen_cmd + fx.path("s2.json"), "SECTOR_CERTIFY_THREADS=1") == 0);
  CHECK(fx.slurp("s1.json") == fx.slurp("s2.json"));
  CHECK(fx.slurp("s1.json").find("\"frequency_screen\"") != std::string::npos);
}

TEST_CASE("simulate writes the trajectory CSV") {
  const CliFixture fx;
  fx.write("u1.csv", "k,v0\n0,1.0\n1,0.0\n2,0.0\n");
  CHECK(fx.run("simulate --system " + fx.path("gain_half.json") + " --nonlinearity " +
               fx.path("small_gain_phi.json") + " --u1 " + fx.path("u1.csv") +
               " --horizon 2 --traj " + fx.path("traj.csv")) == 0);
  const std::string traj = fx.slurp("traj.csv");
  CHECK(traj.rfind("k,e1_0,e2_0,y1_0,y2_0", 0) == 0);
}

TEST_CASE("rate command reports rho_star for the gradient loop") {
  const CliFixture fx;
  fx.write("gd.json",
           R"({"A": [[1.0]], "B": [[-0.18181818181818182]], "C": [[1.0]], "D": [[0.0]]})");
  fx.write("sec.json", R"({"M": [[-10.0, 5.5], [5.5, -1.0]], "side": "phi"})");
  CHECK(fx.run("rate --system " + fx.path("gd.json") + " --sector " + fx.path("sec.json") +
               " --rho-lo 0.7 --rho-hi 1.0 --tol 0.01 --horizon 32 --out " +
               fx.path("rate.json")) == 0);
  const std::string report = fx.slurp("rate.json");
  CHECK(report.find("\"certified\": true") != std::string::npos);
  CHECK(report.find("\"rho_star\"") != std::string::npos);
}
