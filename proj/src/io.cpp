#include "meevc/io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "meevc/io_format.hpp"

namespace meevc::io {

namespace {

using nlohmann::json;

double parse_reynolds(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError("re: expected a number or \"inf\"");
  }
  return v.get<double>();
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse failure: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  for (auto& [key, value] : j.items()) {
    try {
      if (key == "benchmark") cfg.benchmark = value.get<std::string>();
      else if (key == "out") cfg.out_dir = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "kk") cfg.elements = value.get<int>();
      else if (key == "nn") cfg.degree = value.get<int>();
      else if (key == "cc") cfg.deformation = value.get<double>();
      else if (key == "dt") cfg.dt = value.get<double>();
      else if (key == "re") cfg.reynolds = parse_reynolds(value);
      else if (key == "t_end") cfg.t_end = value.get<double>();
      else if (key == "nq") cfg.quad_degree = value.get<int>();
      else if (key == "newton_tol") cfg.newton_tol = value.get<double>();
      else if (key == "newton_max_iter") cfg.newton_max_iter = value.get<int>();
      else if (key == "snapshot_grid") cfg.snapshot_grid = value.get<int>();
      else if (key == "gauge") cfg.gauge = value.get<std::string>();
      else if (key == "grading_beta") cfg.grading_beta = value.get<double>();
      else if (key == "initial") cfg.initial = value.get<std::string>();
      else throw ConfigError("unknown config key: " + key);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + std::string(e.what()));
    }
  }
}

RunConfig finalize_config(RunConfig cfg) {
  const std::string& b = cfg.benchmark;
  if (b != "tgv" && b != "shear-layer" && b != "dipole" && b != "trilinear-table" && b != "custom")
    throw ConfigError("unknown benchmark: " + b);
  if (cfg.degree == 0) cfg.degree = 2;
  if (cfg.elements == 0) cfg.elements = (b == "dipole") ? 24 : 12;
  if (cfg.quad_degree == 0) cfg.quad_degree = cfg.degree + 3;
  if (!cfg.dt) cfg.dt = (b == "tgv") ? 1.0 / 25.0 : (b == "dipole") ? 1.0 / 100.0 : 1.0 / 50.0;
  if (!cfg.reynolds) {
    if (b == "tgv") cfg.reynolds = 100.0;
    else if (b == "dipole") cfg.reynolds = 625.0;
    else if (b == "shear-layer" || b == "trilinear-table")
      cfg.reynolds = std::numeric_limits<double>::infinity();
    else throw ConfigError("custom: 're' is required (number or \"inf\")");
  }
  if (cfg.t_end == 0.0) cfg.t_end = (b == "tgv") ? 1.0 : (b == "dipole") ? 0.5 : 8.0;

  if (cfg.deformation < 0.0 || cfg.deformation > 0.3)
    throw ConfigError("cc: deformation factor must be in [0, 0.3]");
  if (cfg.elements < 1) throw ConfigError("kk: element count must be >= 1");
  if (cfg.degree < 1) throw ConfigError("nn: degree must be >= 1");
  if (!(*cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(*cfg.reynolds > 0.0)) throw ConfigError("re must be positive or \"inf\"");
  if (cfg.gauge != "mean-zero" && cfg.gauge != "pin")
    throw ConfigError("gauge: expected mean-zero or pin");
  if (b == "custom" && cfg.initial.empty())
    throw ConfigError("custom: 'initial' is required (tgv | shear-layer | dipole | zero)");
  return cfg;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::ostringstream os;
  os << "k,t,K,E,Pal,W,divL2,energy_res,enstrophy_res,vorticity_res\n";
  for (const auto& r : records) {
    os << r.k << ',' << format_double(r.t) << ',' << format_double(r.kinetic_energy) << ','
       << format_double(r.enstrophy) << ',' << format_double(r.palinstrophy) << ','
       << format_double(r.total_vorticity) << ',' << format_double(r.div_l2) << ','
       << format_double(r.energy_residual) << ',' << format_double(r.enstrophy_residual) << ','
       << format_double(r.vorticity_residual) << '\n';
  }
  return os.str();
}

std::string field_csv(const bench::FieldSnapshot& snap) {
  std::ostringstream os;
  os << "x,y,value\n";
  for (size_t i = 0; i < snap.x.size(); ++i)
    os << format_double(snap.x[i]) << ',' << format_double(snap.y[i]) << ','
       << format_double(snap.value[i]) << '\n';
  return os.str();
}

std::string wall_trace_csv(const bench::WallTrace& trace) {
  std::ostringstream os;
  os << "y,omega\n";
  for (size_t i = 0; i < trace.y.size(); ++i)
    os << format_double(trace.y[i]) << ',' << format_double(trace.omega[i]) << '\n';
  return os.str();
}

std::string error_table_csv(const bench::ErrorReport& report) {
  std::ostringstream os;
  os << "c,N,K,hdiv_u,hcurl_omega,l2_P,rate_u,rate_omega,rate_P\n";
  for (const auto& r : report.rows) {
    os << format_double(r.deformation) << ',' << r.degree << ',' << r.elements << ','
       << format_double(r.errors.hdiv_u) << ',' << format_double(r.errors.hcurl_omega) << ','
       << format_double(r.errors.l2_p) << ',' << format_double(r.rate_u) << ','
       << format_double(r.rate_omega) << ',' << format_double(r.rate_p) << '\n';
  }
  return os.str();
}

std::string trilinear_csv(const std::vector<bench::TrilinearEntry>& entries) {
  // Mirror the study's layout: one row per quadrature degree, one column
  // per (c, N) pair.
  std::vector<std::pair<double, int>> cols;
  std::vector<int> nqs;
  for (const auto& e : entries) {
    if (std::find(cols.begin(), cols.end(), std::make_pair(e.deformation, e.degree)) == cols.end())
      cols.emplace_back(e.deformation, e.degree);
    if (std::find(nqs.begin(), nqs.end(), e.quad_degree) == nqs.end()) nqs.push_back(e.quad_degree);
  }
  std::ostringstream os;
  os << "NQ";
  for (auto& [c, n] : cols) os << ",c=" << format_double(c) << ";N=" << n;
  os << '\n';
  for (int nq : nqs) {
    os << nq;
    for (auto& [c, n] : cols) {
      for (const auto& e : entries) {
        if (e.quad_degree == nq && e.degree == n && e.deformation == c) {
          os << ',' << format_double(e.value);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string metadata_json(const RunConfig& cfg, const std::vector<int>& newton_iterations,
                          bool completed, const std::string& error) {
  json j;
  j["benchmark"] = cfg.benchmark;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["kk"] = cfg.elements;
  j["nn"] = cfg.degree;
  j["cc"] = cfg.deformation;
  j["dt"] = cfg.dt ? *cfg.dt : 0.0;
  if (cfg.reynolds && std::isinf(*cfg.reynolds)) j["re"] = "inf";
  else j["re"] = cfg.reynolds ? *cfg.reynolds : 0.0;
  j["t_end"] = cfg.t_end;
  j["nq"] = cfg.quad_degree;
  j["newton_tol"] = cfg.newton_tol;
  j["newton_max_iter"] = cfg.newton_max_iter;
  j["snapshot_grid"] = cfg.snapshot_grid;
  j["gauge"] = cfg.gauge;
  j["grading_beta"] = cfg.grading_beta;
  if (!cfg.initial.empty()) j["initial"] = cfg.initial;
  j["newton_iterations"] = newton_iterations;
  j["completed"] = completed;
  if (!error.empty()) j["error"] = error;
  j["versions"] = {{"compiler", __VERSION__},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::string time_tag(double t) {
  std::string s = format_double(t);
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

int run_impl(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);
  const std::string dir = cfg.out_dir + "/";
  const bool verbose = []() {
    const char* v = std::getenv("MEEVC_LOG");
    return v && std::string(v) != "quiet";
  }();

  auto finish = [&](const std::vector<int>& iters, bool completed, const std::string& err) {
    write_file(dir + "metadata.json", metadata_json(cfg, iters, completed, err));
    if (!completed) {
      std::cerr << "solver failure: " << err << "\n";
      return 3;
    }
    return 0;
  };

  if (cfg.benchmark == "trilinear-table") {
    bench::TrilinearTableConfig tc;
    tc.seed = cfg.seed;
    tc.elements = cfg.elements;
    auto entries = bench::trilinear_table(tc);
    write_file(dir + "trilinear_table.csv", trilinear_csv(entries));
    return finish({}, true, "");
  }

  if (cfg.benchmark == "tgv") {
    bench::TgvStudyConfig tc;
    tc.degrees = {cfg.degree};
    tc.element_counts = {cfg.elements};
    tc.deformations = {cfg.deformation};
    tc.dt = *cfg.dt;
    tc.reynolds = *cfg.reynolds;
    tc.t_end = cfg.t_end;
    // Single-cell study; the convergence sweep lives in the acceptance suite.
    auto report = bench::tgv_error_study(tc);
    write_file(dir + "errors.csv", error_table_csv(report));

    MeshConfig mc;
    mc.elements_per_side = cfg.elements;
    mc.deformation = cfg.deformation;
    mc.scale = 2.0;
    mc.periodic = {true, true};
    Mesh mesh(mc);
    FunctionSpace d(mesh, cfg.degree, SpaceKind::D), c(mesh, cfg.degree, SpaceKind::C),
        s(mesh, cfg.degree, SpaceKind::S);
    SolverConfig sc;
    sc.dt = *cfg.dt;
    sc.reynolds = *cfg.reynolds;
    sc.quad = {cfg.quad_degree};
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max_iter = cfg.newton_max_iter;
    MidpointStepper stepper(d, c, s, sc);
    bench::TGVExact exact{*cfg.reynolds};
    auto tr = stepper.run_transient(
        [&](double x, double y) { return exact.velocity(x, y, 0.0); }, 0.0, cfg.t_end);
    write_file(dir + "diagnostics.csv", diagnostics_csv(tr.records));
    if (verbose) std::cerr << "tgv: " << tr.records.size() - 1 << " steps\n";
    return finish(tr.newton_iterations, tr.completed, tr.error);
  }

  if (cfg.benchmark == "shear-layer" ||
      (cfg.benchmark == "custom" && cfg.initial == "shear-layer")) {
    bench::ShearLayerConfig scfg;
    scfg.elements = cfg.elements;
    scfg.degree = cfg.degree;
    scfg.deformation = cfg.deformation;
    scfg.dt = *cfg.dt;
    scfg.reynolds = *cfg.reynolds;
    scfg.t_end = cfg.t_end;
    scfg.snapshot_grid = cfg.snapshot_grid;
    scfg.quad_degree = cfg.quad_degree;
    scfg.newton_tol = cfg.newton_tol;
    scfg.newton_max_iter = cfg.newton_max_iter;
    auto res = bench::shear_layer_run(scfg);
    write_file(dir + "diagnostics.csv", diagnostics_csv(res.transient.records));
    for (const auto& snap : res.snapshots)
      write_file(dir + "field_t" + time_tag(snap.t) + ".csv", field_csv(snap));
    return finish(res.transient.newton_iterations, res.transient.completed, res.transient.error);
  }

  if (cfg.benchmark == "dipole") {
    bench::DipoleConfig dcfg;
    dcfg.elements = cfg.elements;
    dcfg.degree = cfg.degree;
    dcfg.grading_beta = cfg.grading_beta;
    dcfg.dt = *cfg.dt;
    dcfg.reynolds = *cfg.reynolds;
    dcfg.t_end = cfg.t_end;
    dcfg.snapshot_grid = cfg.snapshot_grid;
    dcfg.quad_degree = cfg.quad_degree;
    dcfg.newton_tol = cfg.newton_tol;
    dcfg.newton_max_iter = cfg.newton_max_iter;
    for (double t = 0.0; t <= cfg.t_end + 1e-12; t += 0.2) dcfg.snapshot_times.push_back(t);
    auto res = bench::dipole_run(dcfg);
    write_file(dir + "diagnostics.csv", diagnostics_csv(res.transient.records));
    write_file(dir + "scaling.json",
               std::string("{\"f\":") + format_double(res.scaling) + "}\n");
    for (const auto& snap : res.snapshots)
      write_file(dir + "field_t" + time_tag(snap.t) + ".csv", field_csv(snap));
    for (const auto& tr : res.wall_traces)
      write_file(dir + "wall_trace_t" + time_tag(tr.t) + ".csv", wall_trace_csv(tr));
    return finish(res.transient.newton_iterations, res.transient.completed, res.transient.error);
  }

  if (cfg.benchmark == "custom") {
    // Generic transient on the square with a named initial condition.
    const bool periodic = (cfg.initial == "tgv" || cfg.initial == "zero");
    MeshConfig mc;
    mc.elements_per_side = cfg.elements;
    mc.deformation = cfg.deformation;
    mc.scale = (cfg.initial == "tgv") ? 2.0 : 2.0;
    if (cfg.initial == "dipole") mc.offset = {-1.0, -1.0};
    mc.periodic = {periodic, periodic};
    Mesh mesh(mc);
    FunctionSpace d(mesh, cfg.degree, SpaceKind::D), c(mesh, cfg.degree, SpaceKind::C),
        s(mesh, cfg.degree, SpaceKind::S);
    SolverConfig sc;
    sc.dt = *cfg.dt;
    sc.reynolds = *cfg.reynolds;
    sc.quad = {cfg.quad_degree};
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max_iter = cfg.newton_max_iter;
    sc.gauge = (cfg.gauge == "pin") ? PressureGauge::Pin : PressureGauge::MeanZero;
    if (!periodic) {
      sc.bc.normal = WallSet::all();
      sc.bc.tangential = WallSet::all();
      sc.bc.normal_velocity = [](double, double, double) { return 0.0; };
      sc.bc.tangential_velocity = [](double, double, double) { return 0.0; };
    }
    MidpointStepper stepper(d, c, s, sc);
    VectorFn u0;
    if (cfg.initial == "tgv") {
      bench::TGVExact exact{*cfg.reynolds};
      u0 = [exact](double x, double y) { return exact.velocity(x, y, 0.0); };
    } else if (cfg.initial == "dipole") {
      bench::DipoleSetup setup;
      u0 = [setup](double x, double y) { return setup.velocity(x, y); };
    } else if (cfg.initial == "zero") {
      u0 = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
    } else {
      throw ConfigError("custom: unknown initial condition: " + cfg.initial);
    }
    auto tr = stepper.run_transient(u0, 0.0, cfg.t_end);
    write_file(dir + "diagnostics.csv", diagnostics_csv(tr.records));
    return finish(tr.newton_iterations, tr.completed, tr.error);
  }

  throw ConfigError("unknown benchmark: " + cfg.benchmark);
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    return run_impl(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NewtonFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const SingularSystem& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace meevc::io
