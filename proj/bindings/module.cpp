#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rramprog/config.hpp"
#include "rramprog/output.hpp"

namespace py = pybind11;
using namespace rramprog;

namespace {

py::dict trace_to_dict(const ProgramTrace &t) {
  py::list records;
  for (const auto &r : t.records)
    records.append(py::dict(py::arg("iteration") = r.iteration, py::arg("op") = std::string(to_string(r.op)),
                            py::arg("pulse_width_ns") = r.pulse_width_ns, py::arg("cp") = r.cp_after,
                            py::arg("g_read_uS") = r.g_read_us, py::arg("waited") = r.waited));
  return py::dict(py::arg("row") = t.cell.row, py::arg("col") = t.cell.col, py::arg("state") = t.target.n,
                  py::arg("converged") = t.converged(), py::arg("final_g_uS") = t.outcome.final_g_us,
                  py::arg("final_erase_width_ns") = t.outcome.final_erase_width_ns,
                  py::arg("iterations") = t.outcome.n_iterations,
                  py::arg("wait_branches") = t.outcome.n_wait_branches, py::arg("records") = records);
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-loop RRAM crossbar programming simulator";

  py::register_exception<Error>(m, "RramprogError", PyExc_RuntimeError);

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("g_floor", &DeviceParams::g_floor)
      .def_readwrite("g_on_median", &DeviceParams::g_on_median)
      .def_readwrite("g_on_dispersion", &DeviceParams::g_on_dispersion)
      .def_readwrite("g_on_d2d_sigma", &DeviceParams::g_on_d2d_sigma)
      .def_readwrite("forming_factor", &DeviceParams::forming_factor)
      .def_readwrite("tau_erase_median", &DeviceParams::tau_erase_median)
      .def_readwrite("tau_erase_d2d_sigma", &DeviceParams::tau_erase_d2d_sigma)
      .def_readwrite("erase_noise_frac", &DeviceParams::erase_noise_frac)
      .def_readwrite("relax_tau_short", &DeviceParams::relax_tau_short)
      .def_readwrite("relax_sigma_short", &DeviceParams::relax_sigma_short)
      .def_readwrite("relax_sigma_long", &DeviceParams::relax_sigma_long)
      .def_readwrite("relax_tau_long", &DeviceParams::relax_tau_long)
      .def_readwrite("read_noise_frac", &DeviceParams::read_noise_frac)
      .def_readwrite("g_pristine", &DeviceParams::g_pristine)
      .def_readwrite("master_seed", &DeviceParams::master_seed)
      .def("validate", &DeviceParams::validate);

  py::class_<SensePath>(m, "SensePath")
      .def(py::init<>())
      .def_readwrite("r_sense_ohm", &SensePath::r_sense_ohm)
      .def_readwrite("adc_bits", &SensePath::adc_bits)
      .def_readwrite("adc_vref", &SensePath::adc_vref)
      .def_readwrite("quantize", &SensePath::quantize)
      .def("conductance_lsb_us", &SensePath::conductance_lsb_us, py::arg("read_bias"));

  py::class_<CrossbarConfig>(m, "CrossbarConfig")
      .def(py::init<>())
      .def_readwrite("device", &CrossbarConfig::device)
      .def_readwrite("sense", &CrossbarConfig::sense)
      .def_readwrite("rows", &CrossbarConfig::rows)
      .def_readwrite("cols", &CrossbarConfig::cols);

  py::class_<Crossbar>(m, "Crossbar")
      .def(py::init<CrossbarConfig>(), py::arg("config") = CrossbarConfig{})
      .def_property_readonly("rows", &Crossbar::rows)
      .def_property_readonly("cols", &Crossbar::cols)
      .def_property_readonly("clock_s", [](const Crossbar &cb) { return cb.clock().seconds(); })
      .def("form_all", &Crossbar::form_all)
      .def("write", [](Crossbar &cb, int r, int c) { cb.apply(ArrayOp::write(), {r, c}); }, py::arg("row"), py::arg("col"))
      .def("erase", [](Crossbar &cb, int r, int c, int cp) { cb.apply(ArrayOp::erase(cp), {r, c}); },
           py::arg("row"), py::arg("col"), py::arg("cp"))
      .def("read", [](Crossbar &cb, int r, int c) { return cb.read({r, c}).g_us; }, py::arg("row"), py::arg("col"))
      .def("true_conductance", [](const Crossbar &cb, int r, int c) { return cb.true_conductance({r, c}); },
           py::arg("row"), py::arg("col"))
      .def("advance_time", [](Crossbar &cb, double s) { cb.advance_time(SimTime::from_seconds(s)); }, py::arg("seconds"));

  py::class_<TargetInterval>(m, "TargetInterval")
      .def(py::init([](int n, double lo, double hi) { return TargetInterval{n, lo, hi}; }), py::arg("n"),
           py::arg("g_low"), py::arg("g_high"))
      .def_readonly("n", &TargetInterval::n)
      .def_readonly("g_low", &TargetInterval::g_low)
      .def_readonly("g_high", &TargetInterval::g_high)
      .def("__repr__", [](const TargetInterval &t) {
        return "TargetInterval(" + std::to_string(t.n) + ", " + std::to_string(t.g_low) + ", " + std::to_string(t.g_high) + ")";
      });

  m.def(
      "assign_intervals",
      [](const std::string &scheme, int n_states, double g_min, double g_max, double gap_frac, const DeviceParams &device) {
        IntervalPlan plan;
        plan.scheme = scheme == "linear" ? IntervalScheme::Linear
                      : scheme == "sigma" ? IntervalScheme::Sigma
                                          : IntervalScheme::Mixed;
        if (scheme != "linear" && scheme != "sigma" && scheme != "mixed")
          throw Error(ErrorCode::InvalidConfig, "scheme must be linear, sigma or mixed");
        plan.n_states = n_states;
        plan.g_min = g_min;
        plan.g_max = g_max;
        plan.gap_frac = gap_frac;
        return assign_intervals(plan, relaxation_sigma_model(device));
      },
      py::arg("scheme") = "mixed", py::arg("n_states") = 8, py::arg("g_min") = 22.0, py::arg("g_max") = 94.0,
      py::arg("gap_frac") = 0.1, py::arg("device") = DeviceParams{});

  m.def(
      "program_device",
      [](Crossbar &cb, int row, int col, const TargetInterval &target, const std::string &policy, double delta_t_s,
         int max_iterations) {
        ProgramPolicy p;
        p.variant = parse_policy_variant(policy);
        p.delta_t = SimTime::from_seconds(delta_t_s);
        p.max_iterations = max_iterations;
        return trace_to_dict(program_device(cb, {row, col}, target, p));
      },
      py::arg("crossbar"), py::arg("row"), py::arg("col"), py::arg("target"), py::arg("policy") = "relax-aware",
      py::arg("delta_t_s") = 5.0, py::arg("max_iterations") = 200);

  m.def(
      "separability",
      [](const std::vector<std::vector<double>> &samples, const std::string &criterion, double k) {
        SeparabilityCriterion c;
        if (criterion == "ksigma") c.kind = CriterionKind::KSigma;
        else if (criterion == "hardgap") c.kind = CriterionKind::HardGap;
        else throw Error(ErrorCode::InvalidConfig, "criterion must be ksigma or hardgap");
        c.k = k;
        return separability(samples, c);
      },
      py::arg("samples"), py::arg("criterion") = "ksigma", py::arg("k") = 1.0);

  m.def("default_config_text", [] { return emit_config(parse_config_text("")); });
  m.def("normalize_config", [](const std::string &text) { return emit_config(parse_config_text(text)); },
        py::arg("text"));

  m.def(
      "run_experiment_json",
      [](const std::string &config_text) {
        const RunConfig cfg = parse_config_text(config_text);
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(cfg.experiment());
        }
        return report_json(report, cfg);
      },
      py::arg("config_text") = "");
}
