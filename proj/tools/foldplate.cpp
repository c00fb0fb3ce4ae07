// foldplate command line: run experiments from configs or builtin presets,
// list presets, export meshes.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include "foldplate/foldplate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

namespace {

void apply_thread_cap() {
  if (const char* env = std::getenv("FOLDPLATE_THREADS")) {
    try {
      const int t = std::max(1, std::stoi(env));
      Eigen::setNbThreads(t);
    } catch (const std::exception&) {
      throw foldplate::ConfigError("FOLDPLATE_THREADS must be an integer");
    }
  }
}

foldplate::ExperimentConfig resolve_config(const std::string& config_path,
                                           const std::string& preset,
                                           const std::vector<std::string>& sets) {
  foldplate::ExperimentConfig cfg;
  if (!preset.empty()) {
    const auto presets = foldplate::builtin_presets();
    const auto it = presets.find(preset);
    if (it == presets.end())
      throw foldplate::ConfigError("unknown preset: " + preset);
    cfg = it->second;
  } else if (!config_path.empty()) {
    cfg = foldplate::load_config_file(config_path);
  } else {
    throw foldplate::ConfigError("run needs --config FILE or --preset NAME");
  }
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw foldplate::ConfigError("--set expects key=value, got: " + kv);
    foldplate::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int run_command(const std::string& config_path, const std::string& preset,
                const std::vector<std::string>& sets) {
  const auto cfg = resolve_config(config_path, preset, sets);
  std::cout << "running '" << cfg.name << "' (k=" << cfg.degree
            << ", interface=" << foldplate::to_string(cfg.interface.kind)
            << ", levels=" << cfg.levels << ")\n";
  const auto res = foldplate::run(cfg);
  for (const auto& w : res.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "level   ndofs        s            err        rate\n";
  for (const auto& r : res.rows) {
    std::cout << r.level << "  " << r.n_dofs << "  "
              << foldplate::format_significant(r.s);
    if (res.error_estimates)
      std::cout << "  " << foldplate::format_significant(r.err) << "  "
                << foldplate::format_significant(r.rate);
    std::cout << "\n";
  }
  std::cout << "artifacts in " << cfg.output_dir << "/" << cfg.name << "/\n";
  return 0;
}

int presets_command() {
  for (const auto& [name, cfg] : foldplate::builtin_presets()) {
    std::cout << name << ": k=" << cfg.degree
              << " interface=" << foldplate::to_string(cfg.interface.kind)
              << " fit_order=" << cfg.interface.fit_order
              << " bc=" << foldplate::to_string(cfg.bc_case)
              << " f=" << foldplate::to_string(cfg.load_kind)
              << " levels=" << cfg.levels << "\n";
  }
  return 0;
}

int export_mesh_command(int level, const std::string& interface_name,
                        int fit_order, int k, const std::string& out) {
  foldplate::ExperimentConfig tmp;
  foldplate::apply_setting(tmp, "interface", interface_name);
  foldplate::apply_setting(tmp, "fit_order", std::to_string(fit_order));
  auto mesh = foldplate::build_structured_mesh(4, tmp.interface, k);
  foldplate::classify_edges(mesh, foldplate::BoundarySpec::all_boundary());
  for (int j = 0; j < level; ++j) mesh = foldplate::refine_uniform(mesh);
  foldplate::write_mesh_vtk(out, mesh);
  std::cout << "wrote " << out << " (" << mesh.n_elements() << " elements)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"foldplate: folding plate bending experiments"};
  app.require_subcommand(1);

  std::string config_path, preset;
  std::vector<std::string> sets;
  auto* run_cmd = app.add_subcommand("run", "run an experiment");
  run_cmd->add_option("--config", config_path, "config file (key = value lines)");
  run_cmd->add_option("--preset", preset, "builtin preset name");
  run_cmd->add_option("--set", sets, "override config entries (key=value)");

  app.add_subcommand("presets", "list builtin presets");

  int level = 0, fit_order = 2, k = 2;
  std::string interface_name = "none", out = "mesh.vtk";
  auto* export_cmd = app.add_subcommand("export-mesh", "write a mesh VTK file");
  export_cmd->add_option("--level", level, "refinement level")->required();
  export_cmd->add_option("--interface", interface_name,
                         "none|straight|quadratic|sine");
  export_cmd->add_option("--fit-order", fit_order, "interface fit order (1|2)");
  export_cmd->add_option("--k", k, "geometry degree (2|3)");
  export_cmd->add_option("--out", out, "output file");

  try {
    app.parse(argc, argv);
    apply_thread_cap();
    if (run_cmd->parsed()) return run_command(config_path, preset, sets);
    if (app.get_subcommand("presets")->parsed()) return presets_command();
    if (export_cmd->parsed())
      return export_mesh_command(level, interface_name, fit_order, k, out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const foldplate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
