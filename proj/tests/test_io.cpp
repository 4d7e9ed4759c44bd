#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "meevc/io.hpp"
#include "meevc/io_format.hpp"

using namespace meevc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("meevc_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("shortest round-trip float formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-11) == "-2.5e-11");
  for (double v : {1.0 / 3.0, 2.0 * M_PI, 1e-300, 123456.789, -0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("diagnostics csv: fixed columns, empty list, round trip") {
  CHECK(io::diagnostics_csv({}) == "k,t,K,E,Pal,W,divL2,energy_res,enstrophy_res,vorticity_res\n");

  DiagnosticsRecord r;
  r.k = 3;
  r.t = 0.06;
  r.kinetic_energy = 1.0 / 3.0;
  r.enstrophy = 2.0;
  r.palinstrophy = 5.5;
  r.total_vorticity = -1e-13;
  r.div_l2 = 3e-14;
  r.energy_residual = 1e-12;
  r.enstrophy_residual = -2e-12;
  r.vorticity_residual = 0.0;
  std::string csv = io::diagnostics_csv({r});
  std::istringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  int commas = 0;
  for (char ch : row)
    if (ch == ',') ++commas;
  CHECK(commas == 9);  // 10 columns
  // Round trip the energy column.
  std::istringstream rs(row);
  std::string tok;
  std::getline(rs, tok, ',');
  CHECK(tok == "3");
  std::getline(rs, tok, ',');
  CHECK(std::stod(tok) == 0.06);
  std::getline(rs, tok, ',');
  CHECK(std::stod(tok) == 1.0 / 3.0);
}

TEST_CASE("field and wall trace csv") {
  bench::FieldSnapshot snap;
  snap.t = 0.5;
  snap.x = {0.0, 1.0};
  snap.y = {0.25, 0.75};
  snap.value = {1.5, -2.0};
  CHECK(io::field_csv(snap) == "x,y,value\n0,0.25,1.5\n1,0.75,-2\n");

  bench::WallTrace tr;
  tr.t = 0.4;
  tr.y = {-0.6, -0.3};
  tr.omega = {10.0, -20.0};
  CHECK(io::wall_trace_csv(tr) == "y,omega\n-0.6,10\n-0.3,-20\n");
}

TEST_CASE("metadata json carries the config echo and iteration counts") {
  io::RunConfig cfg;
  cfg.benchmark = "shear-layer";
  cfg.elements = 12;
  cfg.degree = 2;
  cfg.dt = 0.02;
  cfg.reynolds = std::numeric_limits<double>::infinity();
  cfg.seed = 777;
  std::string js = io::metadata_json(cfg, {4, 4, 3}, true, "");
  auto j = nlohmann::json::parse(js);
  CHECK(j["benchmark"] == "shear-layer");
  CHECK(j["kk"] == 12);
  CHECK(j["re"] == "inf");
  CHECK(j["seed"] == 777);
  CHECK(j["newton_iterations"] == nlohmann::json({4, 4, 3}));
  CHECK(j["completed"] == true);
  CHECK(j.contains("versions"));
}

TEST_CASE("config validation") {
  io::RunConfig cfg;
  cfg.benchmark = "tgv";
  auto full = io::finalize_config(cfg);
  CHECK(full.elements == 12);
  CHECK(full.degree == 2);
  CHECK(*full.dt == doctest::Approx(0.04));
  CHECK(*full.reynolds == 100.0);
  CHECK(full.t_end == 1.0);
  CHECK(full.quad_degree == 5);

  io::RunConfig bad = cfg;
  bad.deformation = 0.5;
  CHECK_THROWS_AS(io::finalize_config(bad), io::ConfigError);

  io::RunConfig custom;
  custom.benchmark = "custom";
  custom.initial = "tgv";
  CHECK_THROWS_AS(io::finalize_config(custom), io::ConfigError);  // missing re
  custom.reynolds = 100.0;
  CHECK(io::finalize_config(custom).benchmark == "custom");

  io::RunConfig unknown;
  unknown.benchmark = "magic";
  CHECK_THROWS_AS(io::finalize_config(unknown), io::ConfigError);
}

TEST_CASE("config file: unknown keys rejected, valid keys applied") {
  TempDir tmp;
  const std::string good = (tmp.path / "good.json").string();
  io::write_file(good, R"({"kk": 6, "nn": 3, "re": "inf", "dt": 0.025})");
  io::RunConfig cfg;
  cfg.benchmark = "shear-layer";
  io::apply_config_file(cfg, good);
  cfg = io::finalize_config(cfg);
  CHECK(cfg.elements == 6);
  CHECK(cfg.degree == 3);
  CHECK(std::isinf(*cfg.reynolds));
  CHECK(*cfg.dt == 0.025);

  const std::string bad = (tmp.path / "bad.json").string();
  io::write_file(bad, R"({"kk": 6, "wibble": 1})");
  io::RunConfig cfg2;
  CHECK_THROWS_AS(io::apply_config_file(cfg2, bad), io::ConfigError);
  CHECK_THROWS_AS(io::apply_config_file(cfg2, (tmp.path / "missing.json").string()),
                  io::ConfigError);
}

TEST_CASE("run: smoke shear layer, determinism, artifacts") {
  TempDir tmp;
  io::RunConfig cfg;
  cfg.benchmark = "shear-layer";
  cfg.elements = 4;
  cfg.degree = 2;
  cfg.dt = 0.02;
  cfg.t_end = 0.1;
  cfg.snapshot_grid = 11;
  cfg.out_dir = (tmp.path / "a").string();
  cfg = io::finalize_config(cfg);
  CHECK(io::run(cfg) == 0);
  CHECK(fs::exists(tmp.path / "a" / "diagnostics.csv"));
  CHECK(fs::exists(tmp.path / "a" / "metadata.json"));

  io::RunConfig cfg2 = cfg;
  cfg2.out_dir = (tmp.path / "b").string();
  CHECK(io::run(cfg2) == 0);
  CHECK(slurp((tmp.path / "a" / "diagnostics.csv").string()) ==
        slurp((tmp.path / "b" / "diagnostics.csv").string()));
}

TEST_CASE("run: trilinear table artifact") {
  TempDir tmp;
  io::RunConfig cfg;
  cfg.benchmark = "trilinear-table";
  cfg.elements = 4;
  cfg.out_dir = (tmp.path / "t").string();
  cfg = io::finalize_config(cfg);
  CHECK(io::run(cfg) == 0);
  std::string csv = slurp((tmp.path / "t" / "trilinear_table.csv").string());
  CHECK(csv.find("NQ,c=0;N=2") == 0);
  // Re-running with the same seed reproduces the bytes.
  io::RunConfig cfg2 = cfg;
  cfg2.out_dir = (tmp.path / "t2").string();
  CHECK(io::run(cfg2) == 0);
  CHECK(slurp((tmp.path / "t2" / "trilinear_table.csv").string()) == csv);
}

TEST_CASE("run: solver failure exits 3 and preserves partial artifacts") {
  TempDir tmp;
  io::RunConfig cfg;
  cfg.benchmark = "shear-layer";
  cfg.elements = 4;
  cfg.degree = 2;
  cfg.dt = 40.0;  // hopeless step
  cfg.t_end = 120.0;
  cfg.newton_max_iter = 1;
  cfg.out_dir = (tmp.path / "f").string();
  cfg = io::finalize_config(cfg);
  CHECK(io::run(cfg) == 3);
  CHECK(fs::exists(tmp.path / "f" / "diagnostics.csv"));
  auto meta = nlohmann::json::parse(slurp((tmp.path / "f" / "metadata.json").string()));
  CHECK(meta["completed"] == false);
}

TEST_CASE("run: unwritable output directory exits 4") {
  io::RunConfig cfg;
  cfg.benchmark = "trilinear-table";
  cfg.elements = 4;
  cfg.out_dir = "/proc/meevc-cannot-write-here";
  cfg = io::finalize_config(cfg);
  CHECK(io::run(cfg) == 4);
}
