// Batch driver for the shallow water DG solver.
//
//   swdg_cli run <config> [--override key=value ...]
//   swdg_cli mesh build <scenario> <out> [--level L]
//   swdg_cli mesh check <file>
//   swdg_cli exact <scenario> <t> <out.csv> [--level L]
//
// Exit codes: 0 success, 2 configuration error, 3 solver abort.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

#include "swdg/swdg.hpp"

namespace {

constexpr int kExitConfig = 2;

int cmd_mesh_build(const std::string& scenario, const std::string& out, std::optional<int> level) {
  const auto spec = swdg::make_scenario(scenario);
  const auto mesh = swdg::build_mesh(spec, level);
  swdg::save_mesh(mesh, out);
  std::cout << "wrote " << out << ": " << mesh.num_vertices() << " vertices, " << mesh.num_cells() << " cells, "
            << mesh.num_edges() << " edges\n";
  return 0;
}

int cmd_mesh_check(const std::string& file) {
  const auto mesh = swdg::load_mesh(file);
  const auto radius = swdg::cfl_radius(mesh);
  const auto [lo, hi] = std::minmax_element(radius.begin(), radius.end());
  std::size_t boundary = 0, periodic = 0;
  for (const auto& e : mesh.edges()) {
    if (!e.has_neighbor()) ++boundary;
    if (e.is_periodic()) ++periodic;
  }
  std::cout << "vertices " << mesh.num_vertices() << "\ncells " << mesh.num_cells() << "\nedges " << mesh.num_edges()
            << "\nboundary_edges " << boundary << "\nperiodic_edges " << periodic << "\ncfl_radius_min " << *lo
            << "\ncfl_radius_max " << *hi << '\n';
  return 0;
}

int cmd_exact(const std::string& scenario, double t, const std::string& out, std::optional<int> level) {
  const auto spec = swdg::make_scenario(scenario);
  const auto mesh = swdg::build_mesh(spec, level);
  std::ofstream os(out);
  if (!os) throw swdg::InputError("cannot write '" + out + "'");
  swdg::write_exact_csv(os, spec, mesh, t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RKDG2 shallow water solver with limiter-based wetting and drying"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run a scenario from a key=value configuration file");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--override,-o", overrides, "Override a configuration key (key=value)");

  auto* mesh = app.add_subcommand("mesh", "Build or check mesh files");
  mesh->require_subcommand(1);
  std::string build_scenario, build_out;
  std::optional<int> build_level;
  auto* build = mesh->add_subcommand("build", "Write the default mesh of a scenario");
  build->add_option("scenario", build_scenario)->required();
  build->add_option("out", build_out)->required();
  build->add_option("--level", build_level, "Refinement level");
  std::string check_file;
  auto* check = mesh->add_subcommand("check", "Validate a mesh file and print statistics");
  check->add_option("file", check_file)->required()->check(CLI::ExistingFile);

  std::string exact_scenario, exact_out;
  double exact_t = 0.0;
  std::optional<int> exact_level;
  auto* exact = app.add_subcommand("exact", "Dump the exact solution at mesh vertices");
  exact->add_option("scenario", exact_scenario)->required();
  exact->add_option("t", exact_t)->required();
  exact->add_option("out", exact_out)->required();
  exact->add_option("--level", exact_level, "Refinement level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = swdg::parse_config_file(config_path, overrides);
      return swdg::run(cfg, &std::cout).exit_code;
    }
    if (*build) return cmd_mesh_build(build_scenario, build_out, build_level);
    if (*check) return cmd_mesh_check(check_file);
    if (*exact) return cmd_exact(exact_scenario, exact_t, exact_out, exact_level);
  } catch (const swdg::InputError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const swdg::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
