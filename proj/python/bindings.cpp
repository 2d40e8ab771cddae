#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cavnet/config.hpp"
#include "cavnet/estimator.hpp"
#include "cavnet/fisher.hpp"
#include "cavnet/network.hpp"
#include "cavnet/trajectory.hpp"

namespace py = pybind11;
using namespace cavnet;

namespace {

std::vector<DetectionEvent> to_events(const std::vector<int>& xs) {
  std::vector<DetectionEvent> events;
  events.reserve(xs.size());
  for (int x : xs) {
    if (x < 0 || x > 3)
      throw py::value_error("events must be integers in 0..3");
    events.push_back(static_cast<DetectionEvent>(x));
  }
  return events;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "two-cavity feedback network simulator";

  py::enum_<Basis>(m, "Basis")
      .value("Cavity", Basis::Cavity)
      .value("Detector", Basis::Detector)
      .value("Feedback", Basis::Feedback);

  py::enum_<Observable>(m, "Observable")
      .value("P_d1", Observable::P_d1)
      .value("P_d2", Observable::P_d2)
      .value("P_d1_minus_P_d2", Observable::P_d1_minus_P_d2);

  py::class_<ModeAmplitudes>(m, "ModeAmplitudes")
      .def(py::init([](complex a1, complex a2, Basis basis) {
             return ModeAmplitudes{a1, a2, basis};
           }),
           py::arg("a1"), py::arg("a2"), py::arg("basis") = Basis::Cavity)
      .def_readwrite("a1", &ModeAmplitudes::a1)
      .def_readwrite("a2", &ModeAmplitudes::a2)
      .def_readwrite("basis", &ModeAmplitudes::basis);

  py::class_<NetworkParams>(m, "NetworkParams")
      .def(py::init<>())
      .def_readwrite("phi1", &NetworkParams::phi1)
      .def_readwrite("phi2", &NetworkParams::phi2)
      .def_readwrite("kappa1", &NetworkParams::kappa1)
      .def_readwrite("kappa2", &NetworkParams::kappa2)
      .def_readwrite("dt", &NetworkParams::dt)
      .def_readwrite("eps_jump", &NetworkParams::eps_jump);

  py::class_<FeedbackConfig>(m, "FeedbackConfig")
      .def(py::init<>())
      .def_readwrite("on_d1_b1", &FeedbackConfig::on_d1_b1)
      .def_readwrite("on_d1_b2", &FeedbackConfig::on_d1_b2)
      .def_readwrite("on_d2_b1", &FeedbackConfig::on_d2_b1)
      .def_readwrite("on_d2_b2", &FeedbackConfig::on_d2_b2);

  py::class_<RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("record_every", &RunOptions::record_every)
      .def_readwrite("abort_threshold", &RunOptions::abort_threshold)
      .def_readwrite("keep_population", &RunOptions::keep_population);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("seed", &TrajectoryRecord::seed)
      .def_readonly("grid", &TrajectoryRecord::grid)
      .def_readonly("counts_d1", &TrajectoryRecord::counts_d1)
      .def_readonly("counts_d2", &TrajectoryRecord::counts_d2)
      .def_readonly("population_d2", &TrajectoryRecord::population_d2)
      .def_readonly("aborted", &TrajectoryRecord::aborted)
      .def_readonly("jump_warning", &TrajectoryRecord::jump_warning);

  py::class_<SignalSample>(m, "SignalSample")
      .def_readonly("phi_tilde", &SignalSample::phi_tilde)
      .def_readonly("value", &SignalSample::value)
      .def_readonly("stderr", &SignalSample::stderr_)
      .def_readonly("time", &SignalSample::time)
      .def_readonly("observable", &SignalSample::observable);

  py::class_<SignalCurve>(m, "SignalCurve")
      .def_readonly("points", &SignalCurve::points)
      .def_readonly("threshold", &SignalCurve::threshold)
      .def_readonly("n_traj", &SignalCurve::n_traj)
      .def_readonly("master_seed", &SignalCurve::master_seed);

  py::class_<UncertaintyPoint>(m, "UncertaintyPoint")
      .def_readonly("time", &UncertaintyPoint::time)
      .def_readonly("observable", &UncertaintyPoint::observable)
      .def_readonly("mean", &UncertaintyPoint::mean)
      .def_readonly("variance", &UncertaintyPoint::variance)
      .def_readonly("gradient", &UncertaintyPoint::gradient)
      .def_readonly("gradient_stderr", &UncertaintyPoint::gradient_stderr)
      .def_readonly("delta_phi_sq", &UncertaintyPoint::delta_phi_sq)
      .def_readonly("zero_gradient", &UncertaintyPoint::zero_gradient);

  py::class_<UncertaintyResult>(m, "UncertaintyResult")
      .def_readonly("phi_star", &UncertaintyResult::phi_star)
      .def_readonly("delta_phi", &UncertaintyResult::delta_phi)
      .def_readonly("points", &UncertaintyResult::points);

  py::class_<ScalingFit>(m, "ScalingFit")
      .def_readonly("a", &ScalingFit::a)
      .def_readonly("b", &ScalingFit::b)
      .def_readonly("r_squared", &ScalingFit::r_squared)
      .def_readonly("has_information", &ScalingFit::has_information);

  py::class_<FisherResult>(m, "FisherResult")
      .def_readonly("dt", &FisherResult::dt)
      .def_readonly("phi1", &FisherResult::phi1)
      .def_readonly("phi2", &FisherResult::phi2)
      .def_readonly("n_values", &FisherResult::n_values)
      .def_readonly("fisher", &FisherResult::fisher)
      .def_readonly("fit", &FisherResult::fit);

  m.def("simulate_trajectory", &simulate_trajectory, py::arg("initial"),
        py::arg("params"), py::arg("feedback"), py::arg("horizon"),
        py::arg("seed"), py::arg("options") = RunOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def("signal_scan", &signal_scan, py::arg("initial"), py::arg("params"),
        py::arg("feedback"), py::arg("phi_grid"), py::arg("times"),
        py::arg("observables"), py::arg("threshold"), py::arg("n_traj"),
        py::arg("master_seed"), py::arg("workers") = 0,
        py::arg("options") = RunOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def("phase_uncertainty", &phase_uncertainty, py::arg("initial"),
        py::arg("params"), py::arg("feedback"), py::arg("phi_star"),
        py::arg("delta_phi"), py::arg("times"), py::arg("n_subensembles"),
        py::arg("n_traj_per_sub"), py::arg("threshold"),
        py::arg("master_seed"), py::arg("workers") = 0,
        py::arg("options") = RunOptions{},
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "string_probability_with_derivative",
      [](const std::vector<int>& events, const ModeAmplitudes& initial,
         const NetworkParams& params, const FeedbackConfig& feedback) {
        return string_probability_with_derivative(to_events(events), initial,
                                                  params, feedback);
      },
      py::arg("events"), py::arg("initial"), py::arg("params"),
      py::arg("feedback"));

  m.def(
      "fisher_information",
      [](const ModeAmplitudes& initial, const NetworkParams& params,
         const FeedbackConfig& feedback, int n_steps, int workers) {
        EnumerationOptions opts;
        opts.workers = workers;
        return fisher_information(initial, params, feedback, n_steps, opts);
      },
      py::arg("initial"), py::arg("params"), py::arg("feedback"),
      py::arg("n_steps"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "fisher_scaling",
      [](const ModeAmplitudes& initial, const NetworkParams& params,
         const FeedbackConfig& feedback, int n_max, int workers) {
        EnumerationOptions opts;
        opts.workers = workers;
        return fisher_scaling(initial, params, feedback, n_max, opts);
      },
      py::arg("initial"), py::arg("params"), py::arg("feedback"),
      py::arg("n_max"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "markov_gap",
      [](const ModeAmplitudes& initial, const NetworkParams& params,
         const FeedbackConfig& feedback, int n_steps, int workers) {
        EnumerationOptions opts;
        opts.workers = workers;
        return markov_gap(initial, params, feedback, n_steps, opts);
      },
      py::arg("initial"), py::arg("params"), py::arg("feedback"),
      py::arg("n_steps"), py::arg("workers") = 0,
      py::call_guard<py::gil_scoped_release>());
}
