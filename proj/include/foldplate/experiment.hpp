// Experiment runner: declarative configs (builtin presets or key-value
// files), the level loop refine -> assemble -> solve -> analyze, and the
// run artifacts (convergence CSV, per-level VTK, manifest).

#ifndef FOLDPLATE_EXPERIMENT_HPP
#define FOLDPLATE_EXPERIMENT_HPP

#include "foldplate/analysis.hpp"
#include "foldplate/assembly.hpp"
#include "foldplate/manufactured.hpp"
#include "foldplate/mesh.hpp"
#include "foldplate/solver.hpp"
#include "foldplate/space.hpp"
#include "foldplate/vtk.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace foldplate {

enum class BcCase {
  ClampedAll,           // u = 0, grad u = 0 on the whole boundary
  ClampedTwoSidesGrad,  // u = 0, prescribed outward slope on x=0 and x=1
  ClampedTwoSidesLift,  // u = 0.3 on x=0, u = 0 on x=1, grad u = 0
  ClampedRightPoint     // clamped on {x >= 2/3}, u(0, 0.5) = 0.3 fixed
};

enum class LoadKind { Zero, Constant, Manufactured };

struct ExperimentConfig {
  std::string name = "run";
  int degree = 2;
  double gamma0 = 10.0;
  double gamma1 = 10.0;
  InterfaceSpec interface;
  BcCase bc_case = BcCase::ClampedAll;
  LoadKind load_kind = LoadKind::Constant;
  double load_constant = 100.0;
  int levels = 6;
  SolverKind solver = SolverKind::Auto;
  bool out_csv = true;
  bool out_vtk = false;
  bool out_energy = false;
  std::string output_dir = ".";
};

namespace detail {

inline std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline const char* to_string(BcCase bc) {
  switch (bc) {
    case BcCase::ClampedAll: return "clamped_all";
    case BcCase::ClampedTwoSidesGrad: return "clamped_two_sides_grad";
    case BcCase::ClampedTwoSidesLift: return "clamped_two_sides_lift";
    default: return "clamped_right_point";
  }
}

inline const char* to_string(InterfaceKind k) {
  switch (k) {
    case InterfaceKind::None: return "none";
    case InterfaceKind::StraightX05: return "straight";
    case InterfaceKind::Quadratic: return "quadratic";
    default: return "sine";
  }
}

inline const char* to_string(LoadKind k) {
  switch (k) {
    case LoadKind::Zero: return "zero";
    case LoadKind::Manufactured: return "manufactured";
    default: return "constant";
  }
}

inline const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Cg: return "cg";
    case SolverKind::Direct: return "direct";
    default: return "auto";
  }
}

/// Apply one "key=value" setting to a config.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key,
                          const std::string& raw_value) {
  using detail::to_lower;
  const std::string value = detail::trim(raw_value);
  const std::string lv = to_lower(value);
  try {
    if (key == "name") {
      cfg.name = value;
    } else if (key == "k" || key == "degree") {
      cfg.degree = std::stoi(value);
    } else if (key == "gamma0") {
      cfg.gamma0 = std::stod(value);
    } else if (key == "gamma1") {
      cfg.gamma1 = std::stod(value);
    } else if (key == "interface") {
      if (lv == "none") cfg.interface.kind = InterfaceKind::None;
      else if (lv == "straight" || lv == "straight_x05")
        cfg.interface.kind = InterfaceKind::StraightX05;
      else if (lv == "quadratic") cfg.interface.kind = InterfaceKind::Quadratic;
      else if (lv == "sine") cfg.interface.kind = InterfaceKind::Sine;
      else throw ConfigError("unknown interface kind: " + value);
    } else if (key == "fit_order") {
      cfg.interface.fit_order = std::stoi(value);
    } else if (key == "bc_case") {
      if (lv == "clamped_all") cfg.bc_case = BcCase::ClampedAll;
      else if (lv == "clamped_two_sides_grad")
        cfg.bc_case = BcCase::ClampedTwoSidesGrad;
      else if (lv == "clamped_two_sides_lift")
        cfg.bc_case = BcCase::ClampedTwoSidesLift;
      else if (lv == "clamped_right_point")
        cfg.bc_case = BcCase::ClampedRightPoint;
      else throw ConfigError("unknown bc_case: " + value);
    } else if (key == "f") {
      if (lv == "zero") cfg.load_kind = LoadKind::Zero;
      else if (lv == "manufactured") cfg.load_kind = LoadKind::Manufactured;
      else {
        cfg.load_kind = LoadKind::Constant;
        cfg.load_constant = std::stod(value);
      }
    } else if (key == "levels") {
      cfg.levels = std::stoi(value);
    } else if (key == "solver") {
      if (lv == "auto") cfg.solver = SolverKind::Auto;
      else if (lv == "cg") cfg.solver = SolverKind::Cg;
      else if (lv == "direct") cfg.solver = SolverKind::Direct;
      else throw ConfigError("unknown solver: " + value);
    } else if (key == "outputs") {
      cfg.out_csv = cfg.out_vtk = cfg.out_energy = false;
      std::stringstream ss(lv);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        tok = detail::trim(tok);
        if (tok == "csv") cfg.out_csv = true;
        else if (tok == "vtk") cfg.out_vtk = true;
        else if (tok == "energy") cfg.out_energy = true;
        else if (!tok.empty()) throw ConfigError("unknown output: " + tok);
      }
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("invalid value for " + key + ": " + value);
  } catch (const std::out_of_range&) {
    throw ConfigError("invalid value for " + key + ": " + value);
  }
}

/// Parse a plain-text config: one "key = value" per line, '#' comments.
inline ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    detail::require(eq != std::string::npos,
                    path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, detail::to_lower(detail::trim(line.substr(0, eq))),
                  line.substr(eq + 1));
  }
  return cfg;
}

/// Builtin presets covering the convergence table and figure experiments.
inline std::map<std::string, ExperimentConfig> builtin_presets() {
  std::map<std::string, ExperimentConfig> presets;
  auto table1 = [](const std::string& name, InterfaceKind kind, int fit) {
    ExperimentConfig c;
    c.name = name;
    c.interface = {kind, fit};
    c.bc_case = BcCase::ClampedAll;
    c.load_kind = LoadKind::Constant;
    c.load_constant = 100.0;
    c.levels = 6;
    return c;
  };
  presets["table1-nofold"] = table1("table1-nofold", InterfaceKind::None, 2);
  presets["table1-straight"] =
      table1("table1-straight", InterfaceKind::StraightX05, 2);
  presets["table1-sine-m1"] = table1("table1-sine-m1", InterfaceKind::Sine, 1);
  presets["table1-sine-m2"] = table1("table1-sine-m2", InterfaceKind::Sine, 2);

  auto figure = [](const std::string& name, BcCase bc, InterfaceKind kind) {
    ExperimentConfig c;
    c.name = name;
    c.interface = {kind, 2};
    c.bc_case = bc;
    c.load_kind = LoadKind::Zero;
    c.levels = 4;
    c.out_vtk = c.out_energy = true;
    return c;
  };
  presets["fig3-nofold"] =
      figure("fig3-nofold", BcCase::ClampedTwoSidesGrad, InterfaceKind::None);
  presets["fig3-fold"] =
      figure("fig3-fold", BcCase::ClampedTwoSidesGrad, InterfaceKind::Quadratic);
  presets["fig4-nofold"] =
      figure("fig4-nofold", BcCase::ClampedTwoSidesLift, InterfaceKind::None);
  presets["fig4-fold"] =
      figure("fig4-fold", BcCase::ClampedTwoSidesLift, InterfaceKind::Quadratic);
  presets["fig5-fold"] =
      figure("fig5-fold", BcCase::ClampedRightPoint, InterfaceKind::Quadratic);

  ExperimentConfig mk2;
  mk2.name = "manufactured-k2";
  mk2.load_kind = LoadKind::Manufactured;
  mk2.levels = 6;
  presets["manufactured-k2"] = mk2;
  ExperimentConfig mk3 = mk2;
  mk3.name = "manufactured-k3";
  mk3.degree = 3;
  mk3.levels = 5;
  presets["manufactured-k3"] = mk3;
  return presets;
}

/// Boundary data / constraint realization of a bc_case. The magnitudes of
/// the inhomogeneous data (unit outward slope, 0.3 lift) are declared
/// choices and are recorded in the run manifest.
struct BoundaryRealization {
  BoundarySpec dirichlet;
  std::function<double(const Vec2&)> g;
  std::function<Vec2(const Vec2&)> phi;
  std::optional<PointConstraint> point_constraint;
  bool homogeneous = true;
  std::string note;
};

inline BoundaryRealization realize_bc(const ExperimentConfig& cfg) {
  BoundaryRealization bc;
  switch (cfg.bc_case) {
    case BcCase::ClampedAll:
      bc.dirichlet = BoundarySpec::all_boundary();
      break;
    case BcCase::ClampedTwoSidesGrad:
      bc.dirichlet = BoundarySpec::vertical_sides();
      bc.g = [](const Vec2&) { return 0.0; };
      bc.phi = [](const Vec2& p) {
        return p.x() < 0.5 ? Vec2(-1.0, 0.0) : Vec2(1.0, 0.0);
      };
      bc.homogeneous = false;
      bc.note = "u=0 with outward slope 1 on x=0 and x=1";
      break;
    case BcCase::ClampedTwoSidesLift:
      bc.dirichlet = BoundarySpec::vertical_sides();
      bc.g = [](const Vec2& p) { return p.x() < 0.5 ? 0.3 : 0.0; };
      bc.phi = [](const Vec2&) { return Vec2::Zero(); };
      bc.homogeneous = false;
      bc.note = "u=0.3 on x=0, u=0 on x=1, grad u=0";
      break;
    case BcCase::ClampedRightPoint:
      detail::require(cfg.interface.kind != InterfaceKind::None,
                      "clamped_right_point requires an interface");
      bc.dirichlet = BoundarySpec::right_of(2.0 / 3.0);
      bc.point_constraint = PointConstraint{Vec2(0.0, 0.5), 0.3};
      bc.note = "clamped on {x>=2/3}, fixed u(0,0.5)=0.3";
      break;
  }
  return bc;
}

inline std::function<double(const Vec2&)> realize_load(
    const ExperimentConfig& cfg) {
  switch (cfg.load_kind) {
    case LoadKind::Zero:
      return nullptr;
    case LoadKind::Manufactured:
      return [](const Vec2& p) { return manufactured::load(p); };
    default: {
      const double c = cfg.load_constant;
      return [c](const Vec2&) { return c; };
    }
  }
}

struct LevelResult {
  int level = 0;
  int n_dofs = 0;
  double h_max = 0.0;
  double s = 0.0;
  double assemble_seconds = 0.0;
  SolveReport solve;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<LevelResult> levels;
  std::vector<ConvergenceRow> rows;  // empty unless error estimates computed
  bool error_estimates = false;
  std::vector<std::string> warnings;
  Mesh final_mesh;
  Eigen::VectorXd final_coeffs;

  SolutionField final_field() const {
    return SolutionField{&final_mesh, config.degree, final_coeffs};
  }
};

namespace detail {

inline nlohmann::json manifest_json(const RunResult& res) {
  const auto& cfg = res.config;
  nlohmann::json j;
  j["name"] = cfg.name;
  j["k"] = cfg.degree;
  j["gamma0"] = cfg.gamma0;
  j["gamma1"] = cfg.gamma1;
  j["interface"] = {{"kind", to_string(cfg.interface.kind)},
                    {"fit_order", cfg.interface.fit_order}};
  j["bc_case"] = to_string(cfg.bc_case);
  j["f"] = {{"kind", to_string(cfg.load_kind)}};
  if (cfg.load_kind == LoadKind::Constant) j["f"]["constant"] = cfg.load_constant;
  j["levels"] = cfg.levels;
  j["solver"] = to_string(cfg.solver);
  j["base_n"] = 4;
  std::vector<std::string> outs;
  if (cfg.out_csv) outs.push_back("csv");
  if (cfg.out_vtk) outs.push_back("vtk");
  if (cfg.out_energy) outs.push_back("energy");
  j["outputs"] = outs;
  const auto bc = realize_bc(cfg);
  if (!bc.note.empty()) j["boundary_data_decision"] = bc.note;
  if (bc.point_constraint)
    j["point_constraint"] = {
        {"x0", {bc.point_constraint->location.x(), bc.point_constraint->location.y()}},
        {"value", bc.point_constraint->value}};
  j["warnings"] = res.warnings;
  j["error_estimates"] = res.error_estimates;
  nlohmann::json jl = nlohmann::json::array();
  for (const auto& lv : res.levels) {
    nlohmann::json e;
    e["level"] = lv.level;
    e["ndofs"] = lv.n_dofs;
    e["hmax"] = lv.h_max;
    e["s"] = lv.s;
    e["assemble_seconds"] = lv.assemble_seconds;
    e["solve"] = {{"method", lv.solve.method},
                  {"iterations", lv.solve.iterations},
                  {"rel_residual", lv.solve.rel_residual},
                  {"seconds", lv.solve.seconds}};
    jl.push_back(e);
  }
  j["level_results"] = jl;
  if (!res.rows.empty()) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& r : res.rows) {
      nlohmann::json e;
      e["level"] = r.level;
      e["s"] = r.s;
      e["stilde"] = std::isnan(r.s_tilde) ? nlohmann::json() : nlohmann::json(r.s_tilde);
      e["err"] = r.err;
      e["rate"] = std::isnan(r.rate) ? nlohmann::json() : nlohmann::json(r.rate);
      jr.push_back(e);
    }
    j["convergence"] = jr;
  }
  return j;
}

inline void write_manifest(const std::filesystem::path& dir,
                           nlohmann::json manifest) {
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

}  // namespace detail

/// Run a configured experiment; writes artifacts under
/// <output_dir>/<name>/ and returns the in-memory results. On any failure
/// the manifest still records a machine-readable error before the exception
/// propagates.
inline RunResult run(const ExperimentConfig& cfg) {
  detail::require(cfg.levels >= 3, "run: levels must be >= 3");
  detail::require(cfg.degree == 2 || cfg.degree == 3, "run: k must be 2 or 3");
  const auto bc = realize_bc(cfg);
  const auto load = realize_load(cfg);

  RunResult res;
  res.config = cfg;
  const std::filesystem::path dir =
      std::filesystem::path(cfg.output_dir) / cfg.name;
  std::filesystem::create_directories(dir);

  std::string stage = "setup";
  try {
    stage = "mesh";
    Mesh mesh = build_structured_mesh(4, cfg.interface, cfg.degree);
    classify_edges(mesh, bc.dirichlet);
    const auto [left_d, right_d] = subdomains_have_dirichlet(mesh);
    if (!left_d || !right_d)
      res.warnings.push_back(
          "subdomain without Dirichlet boundary edge; the dG norm may fail "
          "to be a norm unless a point constraint is active");

    ProblemSpec spec;
    spec.degree = cfg.degree;
    spec.gamma0 = cfg.gamma0;
    spec.gamma1 = cfg.gamma1;
    spec.load = load;
    spec.dirichlet = bc.dirichlet;
    spec.boundary_value = bc.g;
    spec.boundary_gradient = bc.phi;
    spec.point_constraint = bc.point_constraint;

    for (int level = 0; level < cfg.levels; ++level) {
      stage = "assemble (level " + std::to_string(level) + ")";
      const auto t0 = std::chrono::steady_clock::now();
      SparseSystem sys = assemble(mesh, spec);
      if (spec.point_constraint)
        apply_point_constraint(sys, mesh, cfg.degree,
                               spec.point_constraint->location,
                               spec.point_constraint->value);
      const double asm_sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();

      stage = "solve (level " + std::to_string(level) + ")";
      auto [coeffs, report] = solve(sys, polynomial_space_dim(cfg.degree),
                                    cfg.solver);

      stage = "analyze (level " + std::to_string(level) + ")";
      const SolutionField field{&mesh, cfg.degree, coeffs};
      LevelResult lr;
      lr.level = level;
      lr.n_dofs = sys.n;
      lr.h_max = max_element_diameter(mesh);
      lr.s = dg_norm(field, cfg.gamma0, cfg.gamma1);
      lr.assemble_seconds = asm_sec;
      lr.solve = report;
      res.levels.push_back(lr);

      if (cfg.out_vtk || cfg.out_energy) {
        std::vector<double> density;
        if (cfg.out_energy) density = energy_density(field);
        write_solution_vtk(
            (dir / ("level" + std::to_string(level) + ".vtk")).string(), field,
            cfg.out_energy ? &density : nullptr);
      }

      if (level + 1 == cfg.levels) {
        res.final_mesh = std::move(mesh);
        res.final_coeffs = std::move(coeffs);
        break;
      }
      stage = "refine (level " + std::to_string(level) + ")";
      mesh = refine_uniform(mesh);
    }

    stage = "extrapolate";
    res.error_estimates = bc.homogeneous;
    std::vector<double> s;
    for (const auto& lv : res.levels) s.push_back(lv.s);
    if (res.error_estimates) {
      res.rows = error_series(s);
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        ConvergenceRow r;
        r.level = static_cast<int>(i);
        r.s = s[i];
        r.s_tilde = r.err = r.rate = detail::nan_value();
        res.rows.push_back(r);
      }
    }
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      res.rows[i].n_dofs = res.levels[i].n_dofs;
      res.rows[i].h_max = res.levels[i].h_max;
    }

    stage = "write outputs";
    if (cfg.out_csv)
      write_convergence_csv((dir / "convergence.csv").string(), res.rows,
                            res.error_estimates);
    detail::write_manifest(dir, detail::manifest_json(res));
  } catch (const std::exception& err) {
    auto manifest = detail::manifest_json(res);
    manifest["error"] = {{"stage", stage}, {"message", err.what()}};
    detail::write_manifest(dir, manifest);
    throw;
  }
  return res;
}

}  // namespace foldplate

#endif
