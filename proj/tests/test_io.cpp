#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tve/io.hpp"

using namespace tve;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal independent reader for legacy ASCII unstructured grids.
struct VtkData {
  int n_points = 0;
  int n_cells = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> scalars;
  bool scalars_in_cell_section = false;
};

VtkData parse_vtk(const std::string& text) {
  VtkData data;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("# vtk DataFile Version", 0) == 0);
  std::getline(in, line);  // title
  std::getline(in, line);
  REQUIRE(line == "ASCII");
  std::getline(in, line);
  REQUIRE(line == "DATASET UNSTRUCTURED_GRID");
  std::string tok;
  while (in >> tok) {
    if (tok == "POINTS") {
      std::string type;
      in >> data.n_points >> type;
      data.points.resize(data.n_points);
      for (auto& p : data.points) in >> p[0] >> p[1] >> p[2];
    } else if (tok == "CELLS") {
      int total;
      in >> data.n_cells >> total;
      data.cells.resize(data.n_cells);
      for (auto& c : data.cells) {
        int n;
        in >> n;
        c.resize(n);
        for (int& v : c) in >> v;
      }
    } else if (tok == "CELL_TYPES") {
      int n;
      in >> n;
      data.cell_types.resize(n);
      for (int& v : data.cell_types) in >> v;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps;
      in >> name >> type >> comps;
      std::string lut, lut_name;
      in >> lut >> lut_name;
      auto& vals = data.scalars[name];
      vals.resize(data.scalars_in_cell_section ? data.n_cells : data.n_points);
      for (double& v : vals) in >> v;
    } else if (tok == "VECTORS") {
      std::string name, type;
      in >> name >> type;
      auto& vals = data.scalars[name];
      vals.resize(3 * data.n_points);
      for (double& v : vals) in >> v;
    } else if (tok == "POINT_DATA") {
      int n;
      in >> n;
      REQUIRE(n == data.n_points);
      data.scalars_in_cell_section = false;
    } else if (tok == "CELL_DATA") {
      int n;
      in >> n;
      REQUIRE(n == data.n_cells);
      data.scalars_in_cell_section = true;
    }
  }
  return data;
}

}  // namespace

TEST_CASE("config round trip for every preset") {
  for (const char* name : {"rigid-rotation", "creep", "sma-cycle"}) {
    const std::string text = "[experiment]\npreset = " + std::string(name) + "\n";
    const ExperimentConfig cfg = parse_config(text);
    const std::string ser = serialize_config(cfg);
    const ExperimentConfig cfg2 = parse_config(ser);
    CHECK(serialize_config(cfg2) == ser);
  }
}

TEST_CASE("strict parsing") {
  CHECK_THROWS_WITH_AS(parse_config("[experiment]\nfoo = 1\n"), doctest::Contains("unknown key"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_config("[experiment]\npreset = creep\n[material]\nbogus = 2\n"),
                       doctest::Contains("line 4"), Error);
  CHECK_THROWS_AS(parse_config("preset = creep\n"), Error);          // key outside section
  CHECK_THROWS_AS(parse_config("[mesh]\nnx = 4\n"), Error);          // missing preset
  CHECK_THROWS_AS(parse_config("[experiment]\npreset = creep\n[time]\ntau = abc\n"), Error);

  // Invariant violations are collected, naming the offending field.
  try {
    parse_config("[experiment]\npreset = creep\n[material]\nnu_visc = -1\nmu = 0\n");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("nu_visc") != std::string::npos);
    CHECK(std::string(e.what()).find("mu") != std::string::npos);
  }
}

TEST_CASE("overrides resolve bare keys") {
  ExperimentConfig cfg = parse_config("[experiment]\npreset = rigid-rotation\n");
  apply_override(cfg, "variant=V2");
  CHECK(cfg.model.dissipation_variant == DissipationVariant::V2);
  CHECK(cfg.model.heat_source_variant == HeatSourceVariant::Vh2);
  apply_override(cfg, "time.steps=40");
  CHECK(cfg.steps == 40);
  apply_override(cfg, "nu_over_mu=0.25");
  CHECK(cfg.model.nu_visc == doctest::Approx(0.25));
  CHECK_THROWS_AS(apply_override(cfg, "nonsense=1"), Error);
  CHECK_THROWS_AS(apply_override(cfg, "steps"), Error);
}

TEST_CASE("csv writer") {
  const std::string path = "/tmp/tve_test_series.csv";
  write_csv_series({"time", "value"}, {{0.0, 1.5}, {0.5, 2.25}, {1.0, 1.0 / 3.0}}, path);
  const std::string text = slurp(path);
  CHECK(text == "time,value\n0,1.5\n0.5,2.25\n1,0.33333333333333331\n");

  // Deterministic: a second write is byte-identical.
  write_csv_series({"time", "value"}, {{0.0, 1.5}, {0.5, 2.25}, {1.0, 1.0 / 3.0}},
                   "/tmp/tve_test_series2.csv");
  CHECK(slurp("/tmp/tve_test_series2.csv") == text);

  // Header-only file for an empty row list.
  write_csv_series({"a", "b"}, {}, "/tmp/tve_test_empty.csv");
  CHECK(slurp("/tmp/tve_test_empty.csv") == "a,b\n");

  CHECK_THROWS_AS(write_csv_series({"a"}, {{1.0, 2.0}}, "/tmp/tve_bad.csv"), Error);
  CHECK_THROWS_AS(write_csv_series({"a"}, {{1.0}}, "/definitely/not/a/dir/x.csv"), Error);
}

TEST_CASE("vtk snapshot round trip through an independent parser") {
  const Mesh mesh = gen_rectangle(1.0, 1.0, 1, 1);
  State state = reference_state(mesh, 293.0);
  state.y[0] += 0.125;  // visible displacement on node 0

  const std::string path = "/tmp/tve_test_snapshot.vtk";
  write_vtk_snapshot(mesh, state, {{"det_f", {1.0}}}, path);
  const std::string text = slurp(path);
  const VtkData data = parse_vtk(text);

  CHECK(data.n_points == 4);
  CHECK(data.n_cells == 1);
  REQUIRE(data.cell_types.size() == 1);
  CHECK(data.cell_types[0] == 9);
  REQUIRE(data.cells[0].size() == 4);
  CHECK(data.cells[0] == std::vector<int>({0, 1, 3, 2}));

  REQUIRE(data.scalars.count("temperature") == 1);
  for (double v : data.scalars.at("temperature")) CHECK(v == 293.0);
  REQUIRE(data.scalars.count("displacement") == 1);
  CHECK(data.scalars.at("displacement")[0] == 0.125);
  REQUIRE(data.scalars.count("det_f") == 1);
  CHECK(data.scalars.at("det_f").size() == 1);

  // Mismatched field length is rejected.
  CHECK_THROWS_AS(write_vtk_snapshot(mesh, state, {{"bad", {1.0, 2.0}}}, path), Error);
}

TEST_CASE("cli entry points") {
  const char* missing[] = {"tve", "run", "/tmp/definitely_missing_config.cfg"};
  CHECK(cli_main(3, missing) == 2);
  const char* list[] = {"tve", "list-presets"};
  CHECK(cli_main(2, list) == 0);

  // A tiny run end to end through the CLI, twice, with byte-identical output.
  std::filesystem::remove_all("/tmp/tve_cli_a");
  std::filesystem::remove_all("/tmp/tve_cli_b");
  const char* run_a[] = {"tve",   "run",   "creep",          "--set", "nx=2",
                         "--set", "ny=1",  "--set",          "steps=3",
                         "--out", "/tmp/tve_cli_a", "--quiet"};
  const char* run_b[] = {"tve",   "run",   "creep",          "--set", "nx=2",
                         "--set", "ny=1",  "--set",          "steps=3",
                         "--out", "/tmp/tve_cli_b", "--quiet"};
  CHECK(cli_main(12, run_a) == 0);
  CHECK(cli_main(12, run_b) == 0);
  CHECK(slurp("/tmp/tve_cli_a/series.csv") == slurp("/tmp/tve_cli_b/series.csv"));
  CHECK(std::filesystem::exists("/tmp/tve_cli_a/config.cfg"));
}
