// Copyright 2026 The asciprep Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/iostream.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <sstream>

#include "asciprep/analysis.hpp"
#include "asciprep/cli.hpp"
#include "asciprep/errors.hpp"
#include "asciprep/fcidump.hpp"
#include "asciprep/hamiltonian.hpp"
#include "asciprep/solver.hpp"
#include "asciprep/stateprep.hpp"

namespace py = pybind11;
using namespace asciprep;

namespace {

py::array_t<double> to_array(std::vector<double> v) {
  auto* heap = new std::vector<double>(std::move(v));
  py::capsule owner(heap, [](void* p) { delete static_cast<std::vector<double>*>(p); });
  return py::array_t<double>(static_cast<py::ssize_t>(heap->size()), heap->data(), owner);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selected CI ground states and multi-determinant state preparation";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_MemoryError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<Determinant>(m, "Determinant")
      .def(py::init<>())
      .def_static("from_orbitals", &Determinant::from_orbitals, py::arg("alpha"), py::arg("beta"))
      .def_static("parse", [](const std::string& s) { return parse_determinant(s); })
      .def_property_readonly("alpha", [](const Determinant& d) { return d.alpha.orbitals(); })
      .def_property_readonly("beta", [](const Determinant& d) { return d.beta.orbitals(); })
      .def_property_readonly("n_alpha", &Determinant::n_alpha)
      .def_property_readonly("n_beta", &Determinant::n_beta)
      .def("__str__", [](const Determinant& d) { return to_string(d); })
      .def("__repr__", [](const Determinant& d) { return "Determinant('" + to_string(d) + "')"; })
      .def("__eq__", [](const Determinant& a, const Determinant& b) { return a == b; })
      .def("__lt__", [](const Determinant& a, const Determinant& b) { return a < b; })
      .def("__hash__", [](const Determinant& d) { return DeterminantHash{}(d); });

  m.def("excitation_degree", &excitation_degree);
  m.def("spin_orbital_hamming", &spin_orbital_hamming);

  py::class_<MomentumLabel>(m, "MomentumLabel")
      .def(py::init<int, int>(), py::arg("kx") = 0, py::arg("ky") = 0)
      .def_readwrite("kx", &MomentumLabel::kx)
      .def_readwrite("ky", &MomentumLabel::ky)
      .def("__eq__", [](const MomentumLabel& a, const MomentumLabel& b) { return a == b; })
      .def("__repr__", [](const MomentumLabel& k) {
        return "MomentumLabel(" + std::to_string(k.kx) + ", " + std::to_string(k.ky) + ")";
      });

  py::class_<LatticeSpec>(m, "LatticeSpec")
      .def(py::init([](int lx, int ly, double t, double u, int na, int nb) {
             return LatticeSpec{lx, ly, t, u, na, nb};
           }),
           py::arg("lx"), py::arg("ly"), py::arg("t") = 1.0, py::arg("u") = 0.0,
           py::arg("n_alpha") = 0, py::arg("n_beta") = 0)
      .def_readwrite("lx", &LatticeSpec::lx)
      .def_readwrite("ly", &LatticeSpec::ly)
      .def_readwrite("t", &LatticeSpec::t)
      .def_readwrite("u", &LatticeSpec::u)
      .def_readwrite("n_alpha", &LatticeSpec::n_alpha)
      .def_readwrite("n_beta", &LatticeSpec::n_beta);

  py::class_<IntegralModel>(m, "IntegralModel")
      .def_property_readonly("norb", &IntegralModel::norb)
      .def_property_readonly("n_alpha", &IntegralModel::n_alpha)
      .def_property_readonly("n_beta", &IntegralModel::n_beta)
      .def_property_readonly("e_core", &IntegralModel::e_core)
      .def_property_readonly("dense_capable", &IntegralModel::dense_capable)
      .def("diagonal", &IntegralModel::diagonal)
      .def("one_body_matrix", &IntegralModel::one_body_matrix);

  m.def("build_hubbard_spatial", &build_hubbard_spatial);
  m.def("build_hubbard_planewave", &build_hubbard_planewave);
  m.def("read_fcidump", &read_fcidump);
  m.def("parse_fcidump", [](const std::string& text) {
    std::istringstream in(text);
    return parse_fcidump(in);
  });
  m.def("write_fcidump", [](const IntegralModel& model) {
    std::ostringstream out;
    write_fcidump(out, model);
    return out.str();
  });
  m.def("matrix_element", &matrix_element);
  m.def("total_momentum", &total_momentum);
  m.def(
      "pattern_determinant",
      [](const std::string& kind, const IntegralModel& model, int na, int nb,
         std::optional<MomentumLabel> sector, const std::string& text) {
        return pattern_determinant(parse_pattern_kind(kind), model, na, nb, sector, text);
      },
      py::arg("kind"), py::arg("model"), py::arg("n_alpha"), py::arg("n_beta"),
      py::arg("sector") = py::none(), py::arg("text") = "");

  py::class_<SectorSpec>(m, "SectorSpec")
      .def(py::init([](int na, int nb, std::optional<MomentumLabel> k) {
             return SectorSpec{na, nb, k};
           }),
           py::arg("n_alpha"), py::arg("n_beta"), py::arg("momentum") = py::none())
      .def_readwrite("n_alpha", &SectorSpec::n_alpha)
      .def_readwrite("n_beta", &SectorSpec::n_beta)
      .def_readwrite("momentum", &SectorSpec::momentum);

  m.def("sector_size", &sector_size, py::arg("model"), py::arg("sector"),
        py::arg("cap") = kDefaultSpaceCap);
  m.def("enumerate_space", &enumerate_space, py::arg("model"), py::arg("sector"),
        py::arg("cap") = kDefaultSpaceCap);

  py::class_<Wavefunction>(m, "Wavefunction")
      .def(py::init<>())
      .def(py::init([](std::vector<Determinant> dets, std::vector<double> coeffs, double energy) {
             if (dets.size() != coeffs.size()) throw DomainError("dets and coeffs differ in length");
             Wavefunction wf{std::move(dets), std::move(coeffs), energy};
             wf.canonicalize();
             return wf;
           }),
           py::arg("dets"), py::arg("coeffs"), py::arg("energy") = 0.0)
      .def_readonly("dets", &Wavefunction::dets)
      .def_property_readonly("coeffs", [](const Wavefunction& w) { return to_array(w.coeffs); })
      .def_readwrite("energy", &Wavefunction::energy)
      .def("__len__", &Wavefunction::size)
      .def("top_weight", &Wavefunction::top_weight)
      .def("truncated", &Wavefunction::truncated);

  py::class_<ExactResult>(m, "ExactResult")
      .def_readonly("energy", &ExactResult::energy)
      .def_readonly("wavefunction", &ExactResult::wavefunction)
      .def_readonly("space_size", &ExactResult::space_size);
  m.def("exact_diagonalize", &exact_diagonalize, py::arg("model"), py::arg("sector"),
        py::arg("tol") = 1e-10, py::arg("cap") = kDefaultSpaceCap,
        py::call_guard<py::gil_scoped_release>());

  py::class_<AsciConfig>(m, "AsciConfig")
      .def(py::init<>())
      .def_readwrite("tdets", &AsciConfig::tdets)
      .def_readwrite("cdets", &AsciConfig::cdets)
      .def_readwrite("energy_tol", &AsciConfig::energy_tol)
      .def_readwrite("max_iter", &AsciConfig::max_iter)
      .def_readwrite("davidson_tol", &AsciConfig::davidson_tol)
      .def_readwrite("sector", &AsciConfig::sector)
      .def_readwrite("pt2_each_iteration", &AsciConfig::pt2_each_iteration);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("space_size", &IterationRecord::space_size)
      .def_readonly("e_var", &IterationRecord::e_var)
      .def_readonly("e_pt2", &IterationRecord::e_pt2)
      .def_readonly("top_weight", &IterationRecord::top_weight);

  py::class_<AsciResult>(m, "AsciResult")
      .def_readonly("final", &AsciResult::final)
      .def_readonly("e_var", &AsciResult::e_var)
      .def_readonly("e_pt2", &AsciResult::e_pt2)
      .def_readonly("iterations", &AsciResult::iterations)
      .def_readonly("converged", &AsciResult::converged);

  m.def("asci_run", &asci_run, py::arg("model"), py::arg("initial"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("pt2_correction", &pt2_correction);

  m.def("overlap_squared",
        py::overload_cast<const Wavefunction&, const Determinant&>(&overlap_squared));
  m.def("overlap_squared",
        py::overload_cast<const Wavefunction&, const Wavefunction&>(&overlap_squared));
  m.def("cumulative_weights", [](const Wavefunction& wf, std::size_t n) {
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& p : cumulative_weights(wf, n)) out.emplace_back(p.n, p.weight);
    return out;
  });
  m.def("one_rdm", [](const Wavefunction& wf, int norb) { return one_rdm(wf, norb).matrix; });
  m.def("natural_orbitals", [](const Eigen::MatrixXd& gamma) {
    const auto no = natural_orbital_rotation(OneRdm{gamma});
    return std::make_pair(no.rotation, no.occupations);
  });
  m.def("rotate_integrals", &rotate_integrals);
  m.def("extrapolate_overlap", [](const std::vector<std::pair<double, double>>& pts) {
    const auto f = extrapolate_overlap(pts);
    return py::make_tuple(f.intercept, f.slope, f.residual);
  });

  py::enum_<GateKind>(m, "GateKind")
      .value("X", GateKind::X)
      .value("MCX", GateKind::MCX)
      .value("CRY", GateKind::CRY);

  py::class_<Gate>(m, "Gate")
      .def_readonly("kind", &Gate::kind)
      .def_readonly("target", &Gate::target)
      .def_readonly("angle", &Gate::angle)
      .def_property_readonly("controls", [](const Gate& g) {
        std::vector<std::pair<int, bool>> out;
        for (const auto& c : g.controls) out.emplace_back(c.qubit, c.on_one);
        return out;
      });

  py::class_<Circuit>(m, "Circuit")
      .def_readonly("n_system", &Circuit::n_system)
      .def_readonly("uses_aux", &Circuit::uses_aux)
      .def_readonly("gates", &Circuit::gates)
      .def_property_readonly("n_qubits", &Circuit::n_qubits)
      .def("to_text", [](const Circuit& c) { return to_text(c); })
      .def_static("parse", [](const std::string& text) {
        std::istringstream in(text);
        return parse_circuit(in);
      });

  py::class_<PrepPlan>(m, "PrepPlan")
      .def_readonly("n_system", &PrepPlan::n_system)
      .def_readonly("amplitudes", &PrepPlan::amplitudes)
      .def_readonly("pivots", &PrepPlan::pivots)
      .def_readonly("angles", &PrepPlan::angles);

  m.def("plan_from_wavefunction", &plan_from_wavefunction, py::arg("wf"), py::arg("norb"),
        py::arg("hamming_order") = true);
  m.def("synthesize", &synthesize);

  py::class_<GateCounts>(m, "GateCounts")
      .def_readonly("x", &GateCounts::x)
      .def_readonly("mcx", &GateCounts::mcx)
      .def_readonly("cry", &GateCounts::cry)
      .def_readonly("total", &GateCounts::total)
      .def_readonly("erasures", &GateCounts::erasures)
      .def_readonly("fanout", &GateCounts::fanout)
      .def_readonly("control_histogram", &GateCounts::control_histogram);
  m.def("gate_counts", &gate_counts);

  m.def("simulate", [](const Circuit& c) { return to_array(simulate(c)); });
  m.def("fidelity", [](const Circuit& c, const Wavefunction& target, int norb) {
    if (c.n_qubits() <= kMaxDenseQubits) return fidelity(simulate(c), target, norb);
    return fidelity(simulate_sparse(c), target, norb);
  });
  m.def("aux_leakage", [](py::array_t<double, py::array::c_style> state, const Circuit& c) {
    return aux_leakage(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())),
                       c);
  });

  m.def(
      "run_command",
      [](const std::string& command, const std::string& config, std::optional<std::string> out,
         std::optional<std::uint64_t> seed) {
        std::ostringstream log;
        std::ostringstream err;
        const int code = cli::run_command(command, config, out, seed, log, err);
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(),
      py::arg("seed") = py::none(),
      "Runs a CLI command; returns (exit_code, written_files, errors).");
}
