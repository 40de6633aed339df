#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tve/io.hpp"

namespace py = pybind11;
using namespace tve;

namespace {

py::dict report_to_dict(const StepReport& r) {
  py::dict d;
  d["newton_iters"] = r.newton_iters;
  d["final_residual"] = r.final_residual;
  d["energy_before"] = r.energy_before;
  d["energy_after"] = r.energy_after;
  d["dissipation"] = r.dissipation;
  d["energy_decrease_ok"] = r.energy_decrease_ok;
  d["clamped_nodes"] = r.clamped_nodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(pytve, m) {
  m.doc() = "staggered finite-element solver for Kelvin-Voigt thermoviscoelasticity";

  py::register_exception<Error>(m, "TveError");

  py::enum_<MaterialKind>(m, "MaterialKind")
      .value("SimpleNeoHookean", MaterialKind::SimpleNeoHookean)
      .value("Sma", MaterialKind::Sma);
  py::enum_<DissipationVariant>(m, "DissipationVariant")
      .value("V1", DissipationVariant::V1)
      .value("V2", DissipationVariant::V2);
  py::enum_<HeatSourceVariant>(m, "HeatSourceVariant")
      .value("Vh1", HeatSourceVariant::Vh1)
      .value("Vh2", HeatSourceVariant::Vh2);

  py::class_<MaterialModel>(m, "MaterialModel")
      .def(py::init<>())
      .def_readwrite("kind", &MaterialModel::kind)
      .def_readwrite("mu", &MaterialModel::mu)
      .def_readwrite("lambda_", &MaterialModel::lambda)
      .def_readwrite("c1", &MaterialModel::c1)
      .def_readwrite("eps", &MaterialModel::eps)
      .def_readwrite("nu_visc", &MaterialModel::nu_visc)
      .def_readwrite("k_cond", &MaterialModel::k_cond)
      .def_readwrite("kappa", &MaterialModel::kappa)
      .def_readwrite("dissipation_variant", &MaterialModel::dissipation_variant)
      .def_readwrite("heat_source_variant", &MaterialModel::heat_source_variant)
      .def("validate", &MaterialModel::validate);

  // Pointwise densities on lifted 3x3 gradients.
  m.def("lift_plane_strain", &lift_plane_strain, py::arg("f2"));
  m.def("simple_shear", &simple_shear, py::arg("gamma"));
  m.def("well_energy", &well_energy, py::arg("f"), py::arg("gamma"), py::arg("mu"),
        py::arg("lambda_"));
  m.def("elastic_energy", &elastic_energy);
  m.def("elastic_stress", &elastic_stress);
  m.def("coupling_energy", &coupling_energy);
  m.def("internal_energy", &internal_energy);
  m.def("heat_capacity", &heat_capacity);
  m.def("dissipation_density", &dissipation_density);
  m.def("xi_rate", &xi_rate);
  m.def("heat_source_h_tau", &heat_source_h_tau);
  m.def("conductivity_pullback", &conductivity_pullback);
  m.def("phase_indicator", &phase_indicator, py::arg("f"), py::arg("eps"));
  m.def("cyclic_traction", &cyclic_traction, py::arg("t_steps"), py::arg("amplitude"),
        py::arg("period_steps") = 80.0);
  m.def("polar_decompose", [](const Mat3& f) {
    const auto p = polar_decompose(f);
    return py::make_tuple(p.rotation, p.stretch);
  });
  m.def("spd_sqrt", [](const Mat3& c) { return spd_sqrt(c); });

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("node_count", &Mesh::node_count)
      .def_property_readonly("element_count", &Mesh::element_count)
      .def_property_readonly("nodes",
                             [](const Mesh& mesh) {
                               Eigen::MatrixXd out(mesh.node_count(), 2);
                               for (int n = 0; n < mesh.node_count(); ++n)
                                 out.row(n) = mesh.nodes[n].transpose();
                               return out;
                             })
      .def_property_readonly("elements", [](const Mesh& mesh) {
        Eigen::MatrixXi out(mesh.element_count(), 4);
        for (int e = 0; e < mesh.element_count(); ++e)
          for (int i = 0; i < 4; ++i) out(e, i) = mesh.elements[e][i];
        return out;
      });
  m.def("gen_rectangle", &gen_rectangle);
  m.def("gen_annulus", &gen_annulus);

  py::enum_<ExperimentKind>(m, "ExperimentKind")
      .value("RigidRotation", ExperimentKind::RigidRotation)
      .value("Creep", ExperimentKind::Creep)
      .value("SmaCycle", ExperimentKind::SmaCycle);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("which", &ExperimentConfig::which)
      .def_readwrite("model", &ExperimentConfig::model)
      .def_readwrite("tau", &ExperimentConfig::tau)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("nx", &ExperimentConfig::nx)
      .def_readwrite("ny", &ExperimentConfig::ny)
      .def_readwrite("n_radial", &ExperimentConfig::n_radial)
      .def_readwrite("n_circum", &ExperimentConfig::n_circum)
      .def_readwrite("traction_amplitude", &ExperimentConfig::traction_amplitude)
      .def_readwrite("theta_boundary", &ExperimentConfig::theta_boundary)
      .def_readwrite("rotation_rate", &ExperimentConfig::rotation_rate)
      .def_readwrite("snapshot_stride", &ExperimentConfig::snapshot_stride);

  m.def("preset_rigid_rotation", &preset_rigid_rotation);
  m.def("preset_creep", &preset_creep);
  m.def("preset_sma_cycle", &preset_sma_cycle);
  m.def("parse_config", &parse_config);
  m.def("serialize_config", &serialize_config);

  m.def("run_experiment", [](const ExperimentConfig& cfg) {
    const RunResult r = run_experiment(cfg);
    py::dict out;
    out["columns"] = r.columns;
    Eigen::MatrixXd rows(r.rows.size(), r.columns.size());
    for (size_t i = 0; i < r.rows.size(); ++i)
      for (size_t j = 0; j < r.rows[i].size(); ++j) rows(i, j) = r.rows[i][j];
    out["rows"] = rows;
    const int n_nodes = r.mesh.node_count();
    Eigen::MatrixXd y(r.trajectory.states.size(), 2 * n_nodes);
    Eigen::MatrixXd theta(r.trajectory.states.size(), n_nodes);
    for (size_t k = 0; k < r.trajectory.states.size(); ++k) {
      y.row(k) = r.trajectory.states[k].y.transpose();
      theta.row(k) = r.trajectory.states[k].theta.transpose();
    }
    out["y"] = y;
    out["theta"] = theta;
    py::list mech, thermal;
    for (const auto& rep : r.trajectory.mech_reports) mech.append(report_to_dict(rep));
    for (const auto& rep : r.trajectory.thermal_reports) thermal.append(report_to_dict(rep));
    out["mech_reports"] = mech;
    out["thermal_reports"] = thermal;
    return out;
  });
}
