#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tbsim/config.hpp"
#include "tbsim/designer.hpp"
#include "tbsim/dynamics.hpp"
#include "tbsim/franson.hpp"
#include "tbsim/params.hpp"
#include "tbsim/pulses.hpp"

namespace py = pybind11;
using namespace tbsim;

PYBIND11_MODULE(_tbsim, m) {
    m.doc() = "Raman time-bin single-photon source: rate-equation dynamics, "
              "read-pulse design and Franson fringe simulation";

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init<>())
        .def_readwrite("gamma", &PhysicalParams::gamma)
        .def_readwrite("gamma32", &PhysicalParams::gamma32)
        .def_readwrite("gamma41", &PhysicalParams::gamma41)
        .def_readwrite("gamma_c", &PhysicalParams::gamma_c)
        .def_readwrite("delta_w", &PhysicalParams::delta_w)
        .def_readwrite("delta_r", &PhysicalParams::delta_r)
        .def_readwrite("n_atoms", &PhysicalParams::n_atoms)
        .def_readwrite("chi", &PhysicalParams::chi)
        .def_readwrite("g_s", &PhysicalParams::g_s)
        .def_readwrite("g_as", &PhysicalParams::g_as)
        .def("validate", &PhysicalParams::validate);

    py::enum_<ShapeKind>(m, "ShapeKind")
        .value("gaussian", ShapeKind::gaussian)
        .value("squared_cosine", ShapeKind::squared_cosine)
        .value("square", ShapeKind::square);

    py::class_<PulseShape>(m, "PulseShape")
        .def(py::init<>())
        .def_readwrite("kind", &PulseShape::kind)
        .def_readwrite("center", &PulseShape::center)
        .def_readwrite("duration", &PulseShape::duration)
        .def_readwrite("peak", &PulseShape::peak)
        .def_readwrite("phase", &PulseShape::phase)
        .def("eval", &PulseShape::eval)
        .def("support_halfwidth", &PulseShape::support_halfwidth)
        .def("shape_sq_integral", &PulseShape::shape_sq_integral)
        .def("validate", &PulseShape::validate);

    py::class_<PulseTrain>(m, "PulseTrain")
        .def(py::init<>())
        .def_readwrite("write", &PulseTrain::write)
        .def_readwrite("reads", &PulseTrain::reads)
        .def_readwrite("separation_factor", &PulseTrain::separation_factor)
        .def("write_end", &PulseTrain::write_end)
        .def("delay", &PulseTrain::delay)
        .def("t_begin", &PulseTrain::t_begin)
        .def("t_end", &PulseTrain::t_end)
        .def("validate", &PulseTrain::validate);

    m.def("coupling_g", &coupling_g);
    m.def("coupling_f", &coupling_f);
    m.def("gain_alpha", &gain_alpha);
    m.def("gain_beta", &gain_beta);
    m.def("relaxation_rates", [](const PhysicalParams& p, const PulseTrain& t, double time) {
        const RelaxationRates r = relaxation_rates(p, t, time);
        return py::make_tuple(r.gamma_w, r.gamma_r, r.total);
    });
    m.def("alpha_integral", &alpha_integral);
    m.def("beta_integral", &beta_integral);
    m.def("write_peak_for_alpha_integral", &write_peak_for_alpha_integral);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("t_start", &GridSpec::t_start)
        .def_readwrite("t_end", &GridSpec::t_end)
        .def_readwrite("samples", &GridSpec::samples)
        .def_readwrite("abs_tol", &GridSpec::abs_tol)
        .def_readwrite("rel_tol", &GridSpec::rel_tol)
        .def_readwrite("fixed_dt", &GridSpec::fixed_dt);

    py::class_<DynamicsTrace>(m, "DynamicsTrace")
        .def_readonly("grid", &DynamicsTrace::grid)
        .def_readonly("n_sp", &DynamicsTrace::n_sp)
        .def_readonly("flux_s", &DynamicsTrace::flux_s)
        .def_readonly("flux_as", &DynamicsTrace::flux_as)
        .def_readonly("cum_s", &DynamicsTrace::cum_s)
        .def_readonly("cum_as", &DynamicsTrace::cum_as)
        .def("n_s_final", &DynamicsTrace::n_s_final)
        .def("n_as_final", &DynamicsTrace::n_as_final)
        .def("cum_as_at", &DynamicsTrace::cum_as_at)
        .def("n_sp_at", &DynamicsTrace::n_sp_at);

    py::class_<BinBreakdown>(m, "BinBreakdown")
        .def_readonly("windows", &BinBreakdown::windows)
        .def_readonly("areas", &BinBreakdown::areas)
        .def_readonly("total", &BinBreakdown::total);

    m.def("integrate", &integrate, py::arg("params"), py::arg("train"),
          py::arg("grid") = GridSpec{});
    m.def("integrate_retrieval", &integrate_retrieval, py::arg("params"),
          py::arg("train"), py::arg("n0"), py::arg("grid") = GridSpec{});
    m.def("closed_form_stokes", &closed_form_stokes);
    m.def("closed_form_antistokes", &closed_form_antistokes);
    m.def("bin_areas", &bin_areas);

    py::class_<DesignTarget>(m, "DesignTarget")
        .def(py::init<>())
        .def_readwrite("weights", &DesignTarget::weights)
        .def_readwrite("total_retrieval", &DesignTarget::total_retrieval)
        .def_readwrite("slots", &DesignTarget::slots)
        .def_readwrite("refine", &DesignTarget::refine)
        .def("validate", &DesignTarget::validate);

    py::class_<RefineResult>(m, "RefineResult")
        .def_readonly("peaks", &RefineResult::peaks)
        .def_readonly("exposures", &RefineResult::exposures)
        .def_readonly("achieved", &RefineResult::achieved)
        .def_readonly("residuals", &RefineResult::residuals)
        .def_readonly("iterations", &RefineResult::iterations)
        .def_readonly("converged", &RefineResult::converged);

    m.def("design_exposures", &design_exposures);
    m.def("exposures_to_peaks", &exposures_to_peaks);
    m.def("refine_design", &refine_design, py::arg("seed_peaks"), py::arg("params"),
          py::arg("target"), py::arg("rel_tol") = 1e-4, py::arg("max_iter") = 50,
          py::arg("damping") = 0.7);
    m.def("achieved_bin_fractions", &achieved_bin_fractions, py::arg("params"),
          py::arg("reads"), py::arg("grid") = GridSpec{});

    py::enum_<NoiseKind>(m, "NoiseKind")
        .value("none", NoiseKind::none)
        .value("shared_gaussian", NoiseKind::shared_gaussian)
        .value("iid_gaussian", NoiseKind::iid_gaussian);

    py::class_<PhaseNoiseModel>(m, "PhaseNoiseModel")
        .def(py::init<>())
        .def_readwrite("kind", &PhaseNoiseModel::kind)
        .def_readwrite("variance", &PhaseNoiseModel::variance)
        .def_readwrite("sample_count", &PhaseNoiseModel::sample_count)
        .def_readwrite("seed", &PhaseNoiseModel::seed);

    py::class_<TimeBinState>(m, "TimeBinState")
        .def_readonly("amplitudes", &TimeBinState::amplitudes)
        .def_readonly("centers", &TimeBinState::centers)
        .def_readonly("tau", &TimeBinState::tau)
        .def_readonly("equally_spaced", &TimeBinState::equally_spaced)
        .def("bins", &TimeBinState::bins)
        .def("validate", &TimeBinState::validate);

    py::class_<FransonResult>(m, "FransonResult")
        .def_readonly("theta_grid", &FransonResult::theta_grid)
        .def_readonly("counts1", &FransonResult::counts1)
        .def_readonly("counts2", &FransonResult::counts2)
        .def_readonly("stderr1", &FransonResult::stderr1)
        .def_readonly("stderr2", &FransonResult::stderr2)
        .def_readonly("visibility", &FransonResult::visibility);

    m.def("state_from_trace", &state_from_trace);
    m.def("ideal_equal_state", &ideal_equal_state, py::arg("j_bins"), py::arg("tau"),
          py::arg("mode_width"));
    m.def("mode_overlaps",
          py::overload_cast<const TimeBinState&>(&mode_overlaps));
    m.def("mode_overlaps",
          py::overload_cast<const TimeBinState&, double>(&mode_overlaps));
    m.def("interferometer_counts", &interferometer_counts, py::arg("state"),
          py::arg("theta"), py::arg("pair_phases") = std::vector<double>{});
    m.def("averaged_counts", &averaged_counts);
    m.def("analytic_averaged_counts", &analytic_averaged_counts);
    m.def("default_theta_grid", &default_theta_grid);
    m.def("fringe_visibility", &fringe_visibility);
}
