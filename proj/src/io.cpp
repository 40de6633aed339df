#include "tve/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace tve {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line) + ": expected a number, got '" + s + "'");
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct ConfigEntry {
  std::string section, key, value;
  int line;
};

std::vector<ConfigEntry> tokenize_config(const std::string& text) {
  std::vector<ConfigEntry> entries;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": unterminated section");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ParseError, "line " + std::to_string(line) + ", col " +
                                      std::to_string(raw.find(s[0]) + 1) + ": expected key = value");
    if (section.empty())
      fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": key outside any section");
    entries.push_back({section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line});
  }
  return entries;
}

const std::map<std::string, ExperimentKind> kPresetNames = {
    {"rigid-rotation", ExperimentKind::RigidRotation},
    {"creep", ExperimentKind::Creep},
    {"sma-cycle", ExperimentKind::SmaCycle},
};

ExperimentConfig make_preset(const std::string& name, DissipationVariant variant,
                             double nu_over_mu, int line) {
  const auto it = kPresetNames.find(name);
  if (it == kPresetNames.end())
    fail(ErrorCode::ParseError,
         "line " + std::to_string(line) + ": unknown preset '" + name + "'");
  switch (it->second) {
    case ExperimentKind::RigidRotation: return preset_rigid_rotation(variant);
    case ExperimentKind::Creep: return preset_creep(nu_over_mu);
    case ExperimentKind::SmaCycle: return preset_sma_cycle(nu_over_mu);
  }
  fail(ErrorCode::ParseError, "unreachable");
}

// All recognized override keys.
void apply_entry(ExperimentConfig& c, const ConfigEntry& e) {
  const std::string id = e.section + "." + e.key;
  const int ln = e.line;
  auto bad_enum = [&](const char* what) {
    fail(ErrorCode::ParseError,
         "line " + std::to_string(ln) + ": invalid " + std::string(what) + " '" + e.value + "'");
  };
  if (id == "experiment.preset" || id == "experiment.variant" || id == "experiment.nu_over_mu")
    return;  // consumed during preset construction
  if (id == "mesh.nx") c.nx = parse_int(e.value, ln);
  else if (id == "mesh.ny") c.ny = parse_int(e.value, ln);
  else if (id == "mesh.length") c.length = parse_double(e.value, ln);
  else if (id == "mesh.height") c.height = parse_double(e.value, ln);
  else if (id == "mesh.r_in") c.r_in = parse_double(e.value, ln);
  else if (id == "mesh.r_out") c.r_out = parse_double(e.value, ln);
  else if (id == "mesh.n_radial") c.n_radial = parse_int(e.value, ln);
  else if (id == "mesh.n_circum") c.n_circum = parse_int(e.value, ln);
  else if (id == "material.kind") {
    if (e.value == "neo-hookean") c.model.kind = MaterialKind::SimpleNeoHookean;
    else if (e.value == "sma") c.model.kind = MaterialKind::Sma;
    else bad_enum("material kind");
  } else if (id == "material.mu") c.model.mu = parse_double(e.value, ln);
  else if (id == "material.lambda") c.model.lambda = parse_double(e.value, ln);
  else if (id == "material.c1") c.model.c1 = parse_double(e.value, ln);
  else if (id == "material.eps") c.model.eps = parse_double(e.value, ln);
  else if (id == "material.nu_visc") c.model.nu_visc = parse_double(e.value, ln);
  else if (id == "material.k_cond") c.model.k_cond = parse_double(e.value, ln);
  else if (id == "material.kappa") c.model.kappa = parse_double(e.value, ln);
  else if (id == "material.dissipation_variant") {
    if (e.value == "V1") c.model.dissipation_variant = DissipationVariant::V1;
    else if (e.value == "V2") c.model.dissipation_variant = DissipationVariant::V2;
    else bad_enum("dissipation variant");
  } else if (id == "material.heat_source_variant") {
    if (e.value == "Vh1") c.model.heat_source_variant = HeatSourceVariant::Vh1;
    else if (e.value == "Vh2") c.model.heat_source_variant = HeatSourceVariant::Vh2;
    else bad_enum("heat source variant");
  } else if (id == "loads.theta_boundary") c.theta_boundary = parse_double(e.value, ln);
  else if (id == "loads.rotation_rate") c.rotation_rate = parse_double(e.value, ln);
  else if (id == "loads.traction_amplitude") c.traction_amplitude = parse_double(e.value, ln);
  else if (id == "time.tau") c.tau = parse_double(e.value, ln);
  else if (id == "time.steps") c.steps = parse_int(e.value, ln);
  else if (id == "probes.node") c.probe_node_override = parse_int(e.value, ln);
  else if (id == "output.snapshot_stride") c.snapshot_stride = parse_int(e.value, ln);
  else
    fail(ErrorCode::ParseError,
         "line " + std::to_string(ln) + ": unknown key '" + id + "'");
}

void validate_config(const ExperimentConfig& c) {
  std::vector<std::string> v = c.model.validate();
  if (!(c.tau > 0)) v.push_back("time.tau must be > 0");
  if (c.steps < 1) v.push_back("time.steps must be >= 1");
  if (c.snapshot_stride < 1) v.push_back("output.snapshot_stride must be >= 1");
  if (c.which == ExperimentKind::RigidRotation) {
    if (!(c.r_in > 0 && c.r_out > c.r_in)) v.push_back("mesh radii must satisfy 0 < r_in < r_out");
    if (c.n_circum < 8) v.push_back("mesh.n_circum must be >= 8");
    if (c.n_radial < 1) v.push_back("mesh.n_radial must be >= 1");
  } else {
    if (!(c.length > 0 && c.height > 0)) v.push_back("mesh size must be positive");
    if (c.nx < 1 || c.ny < 1) v.push_back("mesh.nx and mesh.ny must be >= 1");
  }
  if (!v.empty()) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& s : v) os << " [" << s << "]";
    fail(ErrorCode::ValidationError, os.str());
  }
}

const char* preset_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::RigidRotation: return "rigid-rotation";
    case ExperimentKind::Creep: return "creep";
    case ExperimentKind::SmaCycle: return "sma-cycle";
  }
  return "?";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const auto entries = tokenize_config(text);
  std::string preset;
  DissipationVariant variant = DissipationVariant::V1;
  double nu_over_mu = 0.5;
  int preset_line = 0;
  for (const auto& e : entries) {
    const std::string id = e.section + "." + e.key;
    if (id == "experiment.preset") {
      preset = e.value;
      preset_line = e.line;
    } else if (id == "experiment.variant") {
      if (e.value == "V1") variant = DissipationVariant::V1;
      else if (e.value == "V2") variant = DissipationVariant::V2;
      else fail(ErrorCode::ParseError, "line " + std::to_string(e.line) + ": invalid variant");
    } else if (id == "experiment.nu_over_mu") {
      nu_over_mu = parse_double(e.value, e.line);
    }
  }
  if (preset.empty()) fail(ErrorCode::ParseError, "missing experiment.preset");
  ExperimentConfig cfg = make_preset(preset, variant, nu_over_mu, preset_line);
  for (const auto& e : entries) apply_entry(cfg, e);
  validate_config(cfg);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[experiment]\npreset = " << preset_name(c.which) << "\n";
  os << "[mesh]\n";
  if (c.which == ExperimentKind::RigidRotation) {
    os << "r_in = " << fmt17(c.r_in) << "\nr_out = " << fmt17(c.r_out)
       << "\nn_radial = " << c.n_radial << "\nn_circum = " << c.n_circum << "\n";
  } else {
    os << "length = " << fmt17(c.length) << "\nheight = " << fmt17(c.height) << "\nnx = " << c.nx
       << "\nny = " << c.ny << "\n";
  }
  os << "[material]\n";
  os << "kind = " << (c.model.kind == MaterialKind::Sma ? "sma" : "neo-hookean") << "\n";
  os << "mu = " << fmt17(c.model.mu) << "\nlambda = " << fmt17(c.model.lambda)
     << "\nc1 = " << fmt17(c.model.c1) << "\neps = " << fmt17(c.model.eps)
     << "\nnu_visc = " << fmt17(c.model.nu_visc) << "\nk_cond = " << fmt17(c.model.k_cond)
     << "\nkappa = " << fmt17(c.model.kappa) << "\n";
  os << "dissipation_variant = "
     << (c.model.dissipation_variant == DissipationVariant::V1 ? "V1" : "V2") << "\n";
  os << "heat_source_variant = "
     << (c.model.heat_source_variant == HeatSourceVariant::Vh1 ? "Vh1" : "Vh2") << "\n";
  os << "[loads]\ntheta_boundary = " << fmt17(c.theta_boundary)
     << "\nrotation_rate = " << fmt17(c.rotation_rate)
     << "\ntraction_amplitude = " << fmt17(c.traction_amplitude) << "\n";
  os << "[time]\ntau = " << fmt17(c.tau) << "\nsteps = " << c.steps << "\n";
  os << "[probes]\nnode = " << c.probe_node_override << "\n";
  os << "[output]\nsnapshot_stride = " << c.snapshot_stride << "\n";
  return os.str();
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    fail(ErrorCode::ParseError, "override '" + assignment + "': expected key=value");
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos) {
    // Resolve a bare key against the known sections.
    static const std::map<std::string, std::string> kSections = {
        {"preset", "experiment"}, {"variant", "experiment"}, {"nu_over_mu", "experiment"},
        {"nx", "mesh"}, {"ny", "mesh"}, {"length", "mesh"}, {"height", "mesh"},
        {"r_in", "mesh"}, {"r_out", "mesh"}, {"n_radial", "mesh"}, {"n_circum", "mesh"},
        {"kind", "material"}, {"mu", "material"}, {"lambda", "material"}, {"c1", "material"},
        {"eps", "material"}, {"nu_visc", "material"}, {"k_cond", "material"},
        {"kappa", "material"}, {"dissipation_variant", "material"},
        {"heat_source_variant", "material"}, {"theta_boundary", "loads"},
        {"rotation_rate", "loads"}, {"traction_amplitude", "loads"}, {"tau", "time"},
        {"steps", "time"}, {"node", "probes"}, {"snapshot_stride", "output"}};
    const auto it = kSections.find(key);
    if (it == kSections.end())
      fail(ErrorCode::ParseError, "override: unknown key '" + key + "'");
    key = it->second + "." + key;
  }
  const auto dot = key.find('.');
  ConfigEntry e{key.substr(0, dot), key.substr(dot + 1), value, 0};
  if (e.section == "experiment") {
    if (e.key == "variant") {
      // Variant overrides re-pair both discrete choices, as the presets do.
      if (value == "V1") {
        config.model.dissipation_variant = DissipationVariant::V1;
        config.model.heat_source_variant = HeatSourceVariant::Vh1;
      } else if (value == "V2") {
        config.model.dissipation_variant = DissipationVariant::V2;
        config.model.heat_source_variant = HeatSourceVariant::Vh2;
      } else {
        fail(ErrorCode::ParseError, "override: invalid variant '" + value + "'");
      }
      return;
    }
    if (e.key == "nu_over_mu") {
      config.model.nu_visc = parse_double(value, 0) * config.model.mu;
      return;
    }
    fail(ErrorCode::ParseError, "override: cannot change '" + key + "' after preset selection");
  }
  apply_entry(config, e);
  validate_config(config);
}

void write_csv_series(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      fail(ErrorCode::IoError, "csv row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt17(row[i]);
    out << "\n";
  }
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path + "'");
}

void write_vtk_snapshot(const Mesh& mesh, const State& state,
                        const std::vector<std::pair<std::string, std::vector<double>>>& cell_fields,
                        const std::string& path) {
  if (state.y.size() != mesh.dof_count() || state.theta.size() != mesh.node_count())
    fail(ErrorCode::IoError, "vtk: state size does not match the mesh");
  for (const auto& [name, values] : cell_fields)
    if (int(values.size()) != mesh.element_count())
      fail(ErrorCode::IoError, "vtk: cell field '" + name + "' has wrong length");

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << "# vtk DataFile Version 3.0\n";
  out << "snapshot t=" << fmt17(state.time) << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& x : mesh.nodes)
    out << fmt17(x.x()) << " " << fmt17(x.y()) << " 0\n";
  out << "CELLS " << mesh.element_count() << " " << 5 * mesh.element_count() << "\n";
  for (const auto& el : mesh.elements)
    out << "4 " << el[0] << " " << el[1] << " " << el[2] << " " << el[3] << "\n";
  out << "CELL_TYPES " << mesh.element_count() << "\n";
  for (int e = 0; e < mesh.element_count(); ++e) out << "9\n";

  out << "POINT_DATA " << mesh.node_count() << "\n";
  out << "VECTORS displacement double\n";
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2 u = Vec2(state.y.segment<2>(2 * n)) - mesh.nodes[n];
    out << fmt17(u.x()) << " " << fmt17(u.y()) << " 0\n";
  }
  out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
  for (int n = 0; n < mesh.node_count(); ++n) out << fmt17(state.theta[n]) << "\n";
  std::vector<char> marker(mesh.node_count(), 0);
  for (int n : mesh.marker_nodes) marker[n] = 1;
  out << "SCALARS marker double 1\nLOOKUP_TABLE default\n";
  for (int n = 0; n < mesh.node_count(); ++n) out << int(marker[n]) << "\n";

  if (!cell_fields.empty()) {
    out << "CELL_DATA " << mesh.element_count() << "\n";
    for (const auto& [name, values] : cell_fields) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) out << fmt17(v) << "\n";
    }
  }
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path + "'");
}

namespace {

int run_command(const std::string& target, const std::vector<std::string>& overrides,
                const std::string& out_dir, int stride_override, bool quiet) {
  ExperimentConfig cfg;
  if (kPresetNames.count(target)) {
    cfg = make_preset(target, DissipationVariant::V1, 0.5, 0);
  } else {
    std::ifstream in(target);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config file '%s'\n", target.c_str());
      return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str());
  }
  for (const auto& ov : overrides) apply_override(cfg, ov);
  if (stride_override > 0) cfg.snapshot_stride = stride_override;
  validate_config(cfg);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream cfg_out(out_dir + "/config.cfg", std::ios::binary);
    cfg_out << serialize_config(cfg);
  }

  std::vector<std::pair<int, State>> snapshots;
  auto callback = [&](int k, const State& s, const StepReport& mrep, const StepReport& trep) {
    if (k % cfg.snapshot_stride == 0 || k == cfg.steps) snapshots.emplace_back(k, s);
    if (!quiet)
      std::printf("step %4d  mech_iters=%2d  thermal_iters=%2d  D=%.6e  Win=%.9e\n", k,
                  mrep.newton_iters, trep.newton_iters, mrep.dissipation, trep.energy_after);
  };

  RunResult result = run_experiment(cfg, callback);
  write_csv_series(result.columns, result.rows, out_dir + "/series.csv");
  for (const auto& [k, s] : snapshots) {
    char name[64];
    std::snprintf(name, sizeof(name), "/snapshot_%04d.vtk", k);
    std::vector<std::pair<std::string, std::vector<double>>> cell_fields;
    cell_fields.emplace_back("det_f", element_det_field(result.mesh, result.cache, s.y));
    if (cfg.model.kind == MaterialKind::Sma)
      cell_fields.emplace_back(
          "phase", element_phase_field(result.mesh, result.cache, s.y, cfg.model.eps));
    write_vtk_snapshot(result.mesh, s, cell_fields, out_dir + name);
  }
  const double total_dissipation = [&] {
    double acc = 0.0;
    for (const auto& r : result.trajectory.mech_reports) acc += r.dissipation / (2.0 * cfg.tau);
    return acc;
  }();
  std::printf("done: %d steps, accumulated dissipation %.6e, output in %s\n", cfg.steps,
              total_dissipation, out_dir.c_str());
  return 0;
}

int verify_command() {
  const auto reports = run_all_oracles();
  bool all_pass = true;
  for (const auto& r : reports) {
    std::printf("%s %s samples=%ld max_violation=%.3e tol=%.3e\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.samples, r.max_violation, r.tolerance);
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"staggered finite-element solver for Kelvin-Voigt thermoviscoelasticity"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment preset or config file");
  std::string target;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  int stride = 0;
  bool quiet = false;
  run->add_option("target", target, "preset name or config path")->required();
  run->add_option("--set", overrides, "override key=value (repeatable)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--stride", stride, "snapshot stride override");
  run->add_flag("--quiet", quiet, "suppress per-step progress lines");

  auto* verify = app.add_subcommand("verify", "run the oracle verification suite");
  auto* list = app.add_subcommand("list-presets", "list available experiment presets");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return run_command(target, overrides, out_dir, stride, quiet);
    if (verify->parsed()) return verify_command();
    if (list->parsed()) {
      std::printf("rigid-rotation  annulus under a prescribed rigid rotation (variant=V1|V2)\n");
      std::printf("creep           rectangle under constant axial traction (nu_over_mu=...)\n");
      std::printf("sma-cycle       clamped strip under cyclic transverse load (nu_over_mu=...)\n");
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace tve
