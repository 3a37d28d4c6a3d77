#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "krsim/config.hpp"
#include "krsim/errors.hpp"
#include "krsim/experiment.hpp"
#include "krsim/measurement.hpp"
#include "krsim/observables.hpp"
#include "krsim/qstate.hpp"
#include "krsim/rng.hpp"
#include "krsim/rotator_map.hpp"

namespace py = pybind11;
using namespace krsim;

namespace {

py::array_t<std::complex<double>> amps_array(const QuantumState& s) {
    return py::array_t<std::complex<double>>(static_cast<py::ssize_t>(s.amps.size()),
                                             s.amps.data());
}

template <typename T>
py::array_t<T> vec_array(const std::vector<T>& v) {
    return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<std::uint64_t> times_vec(py::array_t<std::uint64_t, py::array::c_style> t) {
    return {t.data(), t.data() + t.size()};
}

std::vector<double> dbl_vec(py::array_t<double, py::array::c_style> v) {
    return {v.data(), v.data() + v.size()};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Quantum kicked rotator with repeated single-qubit projective measurements";
#ifdef KRSIM_VERSION
    mod.attr("__version__") = KRSIM_VERSION;
#else
    mod.attr("__version__") = "dev";
#endif

    py::register_exception<RepresentationError>(mod, "RepresentationError");
    py::register_exception<DegenerateBranchError>(mod, "DegenerateBranchError");
    py::register_exception<CapacityError>(mod, "CapacityError");
    py::register_exception<ConfigError>(mod, "ConfigError");
    py::register_exception<CheckpointError>(mod, "CheckpointError");

    py::enum_<Representation>(mod, "Representation")
        .value("Momentum", Representation::Momentum)
        .value("Phase", Representation::Phase);

    py::enum_<EvolutionBackend>(mod, "EvolutionBackend")
        .value("DirectDFT", EvolutionBackend::DirectDFT)
        .value("GateCircuit", EvolutionBackend::GateCircuit);

    py::enum_<MeasurementBackend>(mod, "MeasurementBackend")
        .value("Trajectories", MeasurementBackend::Trajectories)
        .value("RandomPhase", MeasurementBackend::RandomPhase)
        .value("DensityMatrix", MeasurementBackend::DensityMatrix)
        .value("NoMeasurement", MeasurementBackend::NoMeasurement);

    py::class_<MapParams>(mod, "MapParams")
        .def(py::init([](double k, double T, int n_q) {
                 MapParams p{k, T, n_q};
                 p.validate();
                 return p;
             }),
             py::arg("k"), py::arg("T"), py::arg("n_q"))
        .def_readwrite("k", &MapParams::k)
        .def_readwrite("T", &MapParams::T)
        .def_readwrite("n_q", &MapParams::n_q)
        .def_property_readonly("dim", &MapParams::dim)
        .def_property_readonly("chaos_parameter", &MapParams::chaos_parameter)
        .def_property_readonly("localization_length", &MapParams::localization_length);

    py::class_<MeasurementSpec>(mod, "MeasurementSpec")
        .def(py::init([](int m, MeasurementBackend backend) {
                 return MeasurementSpec{m, backend};
             }),
             py::arg("m"), py::arg("backend"))
        .def_readwrite("m", &MeasurementSpec::m)
        .def_readwrite("backend", &MeasurementSpec::backend);

    py::class_<QuantumState>(mod, "QuantumState")
        .def_property_readonly("amplitudes", &amps_array)
        .def_readonly("representation", &QuantumState::rep)
        .def_readonly("n_q", &QuantumState::n_q)
        .def("__len__", [](const QuantumState& s) { return s.amps.size(); });

    py::class_<ProjectedState>(mod, "ProjectedState")
        .def_property_readonly("amplitudes",
                               [](const ProjectedState& p) {
                                   return py::array_t<std::complex<double>>(
                                       static_cast<py::ssize_t>(p.amps.size()), p.amps.data());
                               })
        .def_readonly("weight", &ProjectedState::weight);

    py::class_<GateCounts>(mod, "GateCounts")
        .def_readonly("controlled_phase", &GateCounts::controlled_phase)
        .def_readonly("single_qubit", &GateCounts::single_qubit)
        .def_readonly("swap", &GateCounts::swap)
        .def_readonly("diagonal_oracle", &GateCounts::diagonal_oracle)
        .def_property_readonly("total", &GateCounts::total);

    py::class_<RngStream>(mod, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"), py::arg("stream_id"))
        .def("begin_step", &RngStream::begin_step)
        .def("next_u64", &RngStream::next_u64)
        .def("next_double", &RngStream::next_double);

    mod.def("dim_of", &dim_of);
    mod.def("index_to_momentum", &index_to_momentum, py::arg("j"), py::arg("n_q"));
    mod.def("momentum_to_index", &momentum_to_index, py::arg("n"), py::arg("n_q"));
    mod.def("qubit_bit", &qubit_bit, py::arg("j"), py::arg("m"), py::arg("n_q"));
    mod.def("initial_state", &initial_state, py::arg("n_q"), py::arg("n0") = 0);
    mod.def("norm_squared", &norm_squared);
    mod.def("renormalize", &renormalize);

    mod.def("apply_rotation", &apply_rotation, py::arg("state"), py::arg("T"));
    mod.def("apply_kick", &apply_kick, py::arg("state"), py::arg("k"));
    mod.def("to_phase_representation", &to_phase_representation);
    mod.def("to_momentum_representation", &to_momentum_representation);
    mod.def(
        "step",
        [](QuantumState& s, const MapParams& p, EvolutionBackend backend) {
            GateCounts counts;
            step(s, p, backend, &counts);
            return counts;
        },
        py::arg("state"), py::arg("params"), py::arg("backend") = EvolutionBackend::DirectDFT);
    mod.def("qft_gate_circuit", &qft_gate_circuit, py::arg("state"), py::arg("inverse") = false);
    mod.def("rotation_gate_circuit", &rotation_gate_circuit, py::arg("state"), py::arg("T"));

    mod.def("project", &project, py::arg("state"), py::arg("m"), py::arg("outcome"));
    mod.def("measure_trajectory", &measure_trajectory, py::arg("state"), py::arg("m"),
            py::arg("rng"));
    mod.def("apply_random_phase", &apply_random_phase, py::arg("state"), py::arg("m"),
            py::arg("rng"));
    mod.def(
        "measured_step",
        [](QuantumState& s, const MapParams& p, const MeasurementSpec& spec, RngStream& rng,
           EvolutionBackend backend) { measured_step(s, p, spec, rng, backend); },
        py::arg("state"), py::arg("params"), py::arg("spec"), py::arg("rng"),
        py::arg("backend") = EvolutionBackend::DirectDFT);

    py::class_<DensityMatrix>(mod, "DensityMatrix")
        .def_property_readonly("rho",
                               [](const DensityMatrix& d) {
                                   const auto n = static_cast<py::ssize_t>(d.dim());
                                   return py::array_t<std::complex<double>>({n, n}, d.rho.data());
                               })
        .def_readonly("n_q", &DensityMatrix::n_q)
        .def_property_readonly("diagonal", &density_diagonal)
        .def_property_readonly("trace", &trace_real);

    mod.def("density_from_pure", &density_from_pure);
    mod.def(
        "evolve_density_matrix",
        [](DensityMatrix& rho, const MapParams& p, int m) { evolve_density_matrix(rho, p, m); },
        py::arg("rho"), py::arg("params"), py::arg("m"));

    py::class_<ProbabilityDistribution>(mod, "ProbabilityDistribution")
        .def_property_readonly("p",
                               [](const ProbabilityDistribution& d) { return vec_array(d.p); })
        .def_readonly("n_q", &ProbabilityDistribution::n_q);

    mod.def("second_moment", py::overload_cast<const ProbabilityDistribution&>(&second_moment));
    mod.def("ipr", py::overload_cast<const ProbabilityDistribution&>(&ipr));
    mod.def("accumulate_distribution", [](const std::vector<QuantumState>& states) {
        return accumulate_distribution(states);
    });

    py::class_<PowerLawFit>(mod, "PowerLawFit")
        .def_readonly("exponent", &PowerLawFit::exponent)
        .def_readonly("exponent_stderr", &PowerLawFit::exponent_stderr)
        .def_readonly("points", &PowerLawFit::points);

    mod.def(
        "fit_power_law",
        [](py::array_t<std::uint64_t, py::array::c_style> t,
           py::array_t<double, py::array::c_style> y, std::uint64_t t_lo, std::uint64_t t_hi) {
            const auto tv = times_vec(t);
            const auto yv = dbl_vec(y);
            return fit_power_law(tv, yv, t_lo, t_hi);
        },
        py::arg("times"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

    py::class_<ObservableSeries>(mod, "ObservableSeries")
        .def_property_readonly("times", [](const ObservableSeries& s) { return vec_array(s.times); })
        .def_property_readonly("n2_mean",
                               [](const ObservableSeries& s) { return vec_array(s.n2_mean); })
        .def_property_readonly("n2_stderr",
                               [](const ObservableSeries& s) { return vec_array(s.n2_stderr); })
        .def_property_readonly("ipr", [](const ObservableSeries& s) { return vec_array(s.ipr); })
        .def_property_readonly("norm_check",
                               [](const ObservableSeries& s) { return vec_array(s.norm_check); })
        .def_property_readonly("traj_ipr_mean",
                               [](const ObservableSeries& s) { return vec_array(s.traj_ipr_mean); })
        .def_readonly("M", &ObservableSeries::M)
        .def_readonly("master_seed", &ObservableSeries::master_seed)
        .def_readonly("gates_per_step", &ObservableSeries::gates_per_step)
        .def_readonly("wall_seconds", &ObservableSeries::wall_seconds)
        .def("__len__", &ObservableSeries::size);

    mod.def("time_averaged_ipr", &time_averaged_ipr, py::arg("series"), py::arg("t_lo"),
            py::arg("t_hi"));

    py::class_<ScheduleSpec>(mod, "ScheduleSpec")
        .def_static("parse", &ScheduleSpec::parse)
        .def("__str__", &ScheduleSpec::to_string);

    mod.def("make_schedule", &make_schedule, py::arg("spec"), py::arg("t_max"));

    py::class_<EnsembleConfig>(mod, "EnsembleConfig")
        .def(py::init([](const MapParams& params, const MeasurementSpec& spec, int M,
                         std::uint64_t t_max, std::uint64_t seed, EvolutionBackend evolution,
                         const std::string& schedule, int workers) {
                 EnsembleConfig c;
                 c.params = params;
                 c.spec = spec;
                 c.M = M;
                 c.t_max = t_max;
                 c.master_seed = seed;
                 c.evolution = evolution;
                 c.schedule = ScheduleSpec::parse(schedule);
                 c.workers = workers;
                 c.validate();
                 return c;
             }),
             py::arg("params"), py::arg("spec"), py::arg("M") = 50, py::arg("t_max") = 20000,
             py::arg("seed") = 1, py::arg("evolution") = EvolutionBackend::DirectDFT,
             py::arg("schedule") = "geom:30", py::arg("workers") = 0)
        .def_readwrite("M", &EnsembleConfig::M)
        .def_readwrite("t_max", &EnsembleConfig::t_max)
        .def_readwrite("master_seed", &EnsembleConfig::master_seed)
        .def_readwrite("workers", &EnsembleConfig::workers)
        .def_property_readonly("config_hash", &EnsembleConfig::config_hash)
        .def("canonical_text", &EnsembleConfig::canonical_text);

    py::class_<EnsembleResult>(mod, "EnsembleResult")
        .def_readonly("series", &EnsembleResult::series)
        .def_readonly("final_distribution", &EnsembleResult::final_distribution)
        .def_readonly("single_trajectory_distribution",
                      &EnsembleResult::single_trajectory_distribution)
        .def_readonly("t_done", &EnsembleResult::t_done);

    mod.def("run_ensemble", &run_ensemble, py::arg("config"),
            py::call_guard<py::gil_scoped_release>());
}
