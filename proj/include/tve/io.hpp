#pragma once

#include <string>

#include "tve/oracles.hpp"

namespace tve {

// Strict section/key configuration text. Unknown sections or keys are parse
// errors; invariant violations are collected and reported together.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

// Applies one "key=value" or "section.key=value" override.
void apply_override(ExperimentConfig& config, const std::string& assignment);

void write_csv_series(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows, const std::string& path);

void write_vtk_snapshot(const Mesh& mesh, const State& state,
                        const std::vector<std::pair<std::string, std::vector<double>>>& cell_fields,
                        const std::string& path);

int cli_main(int argc, const char* const* argv);

}  // namespace tve
