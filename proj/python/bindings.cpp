#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tariffsim/billing.hpp"
#include "tariffsim/errors.hpp"
#include "tariffsim/redistribution.hpp"
#include "tariffsim/report.hpp"
#include "tariffsim/sweep.hpp"
#include "tariffsim/tariff.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace tariffsim;

namespace {

Fraction fraction_of(const py::object& v) {
  if (py::isinstance<Fraction>(v)) return v.cast<Fraction>();
  if (py::isinstance<py::bool_>(v)) throw py::type_error("expected a number or decimal string");
  if (py::isinstance<py::int_>(v)) return Fraction(v.cast<std::int64_t>(), 1);
  if (py::isinstance<py::str>(v)) return Fraction::parse(v.cast<std::string>());
  if (py::isinstance<py::float_>(v)) return Fraction::parse(py::str(v).cast<std::string>());
  throw py::type_error("expected a number or decimal string");
}

std::string decimal_text(const py::object& v) {
  if (py::isinstance<py::str>(v)) return v.cast<std::string>();
  if (py::isinstance<py::int_>(v) || py::isinstance<py::float_>(v)) return py::str(v).cast<std::string>();
  throw py::type_error("expected a number or decimal string");
}

StatusTechGroup group_of(const std::string& label) {
  const auto slash = label.find('/');
  if (slash == std::string::npos) throw ConfigError("group must look like 'Low/NoTech'");
  return StatusTechGroup{parse_status(label.substr(0, slash)), parse_tech(label.substr(slash + 1))};
}

py::dict bill_dict(const BillBreakdown& b) {
  return py::dict("subscription"_a = b.subscription.to_dkk_string(4), "offpeak"_a = b.offpeak.to_dkk_string(4),
                  "peak"_a = b.peak.to_dkk_string(4), "total"_a = b.total.to_dkk_string(4));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Revenue-neutral network tariff and redistribution simulator";

  static py::exception<Error> base_error(m, "TariffsimError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  py::class_<Money>(m, "Money")
      .def(py::init([](const py::object& dkk) { return Money::parse_dkk(decimal_text(dkk)); }), "dkk"_a)
      .def_static("from_quanta", [](std::int64_t q) { return Money{q}; })
      .def_readonly("quanta", &Money::quanta)
      .def_property_readonly("dkk", &Money::dkk)
      .def("to_dkk_string", &Money::to_dkk_string, "decimals"_a = 2)
      .def("__eq__", [](const Money& a, const Money& b) { return a == b; })
      .def("__str__", [](const Money& x) { return x.to_dkk_string(4); })
      .def("__repr__", [](const Money& x) { return "Money('" + x.to_dkk_string(4) + "')"; });

  py::class_<Rate>(m, "Rate")
      .def(py::init([](const py::object& ore) { return Rate::parse_ore_per_kwh(decimal_text(ore)); }),
           "ore_per_kwh"_a)
      .def_readonly("nano_ore_per_kwh", &Rate::nano_ore_per_kwh)
      .def_property_readonly("ore_per_kwh", &Rate::ore_per_kwh)
      .def("to_ore_string", &Rate::to_ore_string, "decimals"_a = 4)
      .def("__repr__", [](const Rate& r) { return "Rate('" + r.to_ore_string(9) + "')"; });

  py::class_<Fraction>(m, "Fraction")
      .def(py::init([](const py::object& v) { return fraction_of(v); }), "value"_a)
      .def(py::init<std::int64_t, std::int64_t>(), "num"_a, "den"_a)
      .def_readonly("num", &Fraction::num)
      .def_readonly("den", &Fraction::den)
      .def("__float__", &Fraction::to_double)
      .def("__eq__", [](const Fraction& a, const Fraction& b) { return a == b; })
      .def("__str__", [](const Fraction& f) { return f.to_decimal_string(); })
      .def("__repr__", [](const Fraction& f) { return "Fraction('" + f.to_string() + "')"; });
  py::implicitly_convertible<py::str, Fraction>();
  py::implicitly_convertible<py::int_, Fraction>();
  py::implicitly_convertible<py::float_, Fraction>();
  py::implicitly_convertible<py::str, Money>();
  py::implicitly_convertible<py::str, Rate>();

  py::enum_<CalibrationMode>(m, "CalibrationMode")
      .value("OffpeakScaled", CalibrationMode::OffpeakScaled)
      .value("PeakShare", CalibrationMode::PeakShare);

  py::class_<BaseCaseInputs>(m, "BaseCaseInputs")
      .def(py::init([](const Rate& flat_rate, const Money& subscription, std::int64_t households,
                       Wh total_consumption_wh) {
             BaseCaseInputs b{flat_rate, subscription, households, total_consumption_wh};
             b.validate();
             return b;
           }),
           "flat_rate"_a, "subscription"_a, "households"_a, "total_consumption_wh"_a)
      .def_readonly("flat_rate", &BaseCaseInputs::flat_rate)
      .def_readonly("subscription", &BaseCaseInputs::subscription)
      .def_readonly("households", &BaseCaseInputs::households)
      .def_readonly("total_consumption_wh", &BaseCaseInputs::total_consumption)
      .def_property_readonly("volumetric_revenue", &BaseCaseInputs::volumetric_revenue)
      .def_property_readonly("subscription_revenue", &BaseCaseInputs::subscription_revenue)
      .def_property_readonly("total_cost", &BaseCaseInputs::total_cost)
      .def_property_readonly("base_share", &BaseCaseInputs::base_share);

  py::class_<TariffScenario>(m, "TariffScenario")
      .def(py::init([](std::string id, const py::object& share, const Fraction& recovery_factor,
                       const Fraction& peak_fraction, CalibrationMode mode) {
             TariffScenario s;
             s.id = std::move(id);
             if (py::isinstance<py::str>(share) && share.cast<std::string>() == "base") s.share_from_base = true;
             else s.volumetric_share = fraction_of(share);
             s.recovery_factor = recovery_factor;
             s.peak_fraction = peak_fraction;
             s.mode = mode;
             return s;
           }),
           "id"_a, "volumetric_share"_a, "recovery_factor"_a = Fraction(4, 5),
           "peak_fraction"_a = Fraction(1, 20), "mode"_a = CalibrationMode::OffpeakScaled)
      .def_readonly("id", &TariffScenario::id)
      .def_readonly("volumetric_share", &TariffScenario::volumetric_share)
      .def_readonly("share_from_base", &TariffScenario::share_from_base)
      .def_readonly("recovery_factor", &TariffScenario::recovery_factor)
      .def_readonly("peak_fraction", &TariffScenario::peak_fraction)
      .def_readonly("mode", &TariffScenario::mode);

  py::class_<TouCalibration>(m, "TouCalibration")
      .def_readonly("base", &TouCalibration::base)
      .def_readonly("peak", &TouCalibration::peak)
      .def_readonly("q_peak_wh", &TouCalibration::q_peak)
      .def_readonly("q_base_wh", &TouCalibration::q_base)
      .def_readonly("mode", &TouCalibration::mode);

  py::class_<TariffRates>(m, "TariffRates")
      .def_readonly("scenario_id", &TariffRates::scenario_id)
      .def_readonly("share", &TariffRates::share)
      .def_readonly("scale", &TariffRates::scale)
      .def_readonly("fee", &TariffRates::fee)
      .def_readonly("base_eff", &TariffRates::base_eff)
      .def_readonly("peak_eff", &TariffRates::peak_eff)
      .def_readonly("calibration", &TariffRates::calibration);

  m.def("canonical_scenarios", &canonical_scenarios);
  m.def("default_factor_grid", &default_factor_grid);
  m.def("calibrate_tou", &calibrate_tou, "inputs"_a, "recovery_factor"_a, "q_peak_wh"_a, "q_base_wh"_a,
        "mode"_a = CalibrationMode::OffpeakScaled);
  m.def("solve_scenario", &solve_scenario, "inputs"_a, "scenario"_a, "calibration"_a);
  m.def("revenue_identity_residual", &revenue_identity_residual, "inputs"_a, "rates"_a);
  m.def("peak_hours",
        [](std::vector<Wh> load, const Fraction& fraction) {
          return detect_peak_hours(SystemLoad{std::move(load)}, fraction).hours;
        },
        "hourly_load_wh"_a, "fraction"_a);

  m.def("redistribution_multiplier", &redistribution_multiplier, "factor"_a, "n_low"_a, "n_other"_a);

  m.def("compute_bill",
        [](Wh q_peak, Wh q_base, const TariffRates& rates, const Fraction& multiplier) {
          return bill_dict(compute_bill(q_peak, q_base, rates, multiplier));
        },
        "q_peak_wh"_a, "q_base_wh"_a, "rates"_a, "multiplier"_a = Fraction(1, 1));
  m.def("bill_base_case", [](Wh q_total, const BaseCaseInputs& in) { return bill_dict(bill_base_case(q_total, in)); },
        "q_total_wh"_a, "inputs"_a);
  m.def("equity_delta",
        [](const Money& bill, const Money& base, int decimals) { return equity_delta(bill, base).percent_string(decimals); },
        "bill"_a, "base"_a, "decimals"_a = 2);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("load", &load_run_config, "path"_a)
      .def_static("parse", &parse_run_config, "json_text"_a, "base_dir"_a = ".")
      .def("set_synthetic",
           [](RunConfig& c, std::int64_t households, std::uint64_t seed, double fault_fraction) {
             PopulationSpec spec = default_population_spec();
             spec.households = households;
             spec.seed = seed;
             spec.fault_fraction = fault_fraction;
             c.synthetic = spec;
           },
           "households"_a, "seed"_a = 2017, "fault_fraction"_a = 0.0)
      .def_readwrite("threads", &RunConfig::threads)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def_readwrite("scenarios", &RunConfig::scenarios)
      .def_readwrite("factors", &RunConfig::factors)
      .def("to_json", &run_config_to_json);

  py::class_<AuditResult>(m, "AuditResult")
      .def_readonly("residual", &AuditResult::residual)
      .def_readonly("households", &AuditResult::households)
      .def_readonly("groups", &AuditResult::groups)
      .def_readonly("passed", &AuditResult::passed);

  py::class_<SweepResult>(m, "SweepResult")
      .def_property_readonly("households", [](const SweepResult& r) { return r.inputs.households; })
      .def_readonly("inputs", &SweepResult::inputs)
      .def_readonly("passed", &SweepResult::passed)
      .def_readonly("base_audit", &SweepResult::base_audit)
      .def_property_readonly("scenario_ids",
                             [](const SweepResult& r) {
                               std::vector<std::string> ids;
                               for (const auto& s : r.scenarios) ids.push_back(s.id);
                               return ids;
                             })
      .def_readonly("factors", &SweepResult::factors)
      .def("rates", [](const SweepResult& r, std::size_t s) { return r.cell(s, 0).rates; }, "scenario"_a)
      .def("audit", [](const SweepResult& r, std::size_t s, std::size_t f) { return r.cell(s, f).audit; },
           "scenario"_a, "factor"_a)
      .def("average_bill",
           [](const SweepResult& r, const std::string& group, std::size_t s, std::size_t f) {
             return bill_dict(r.cell(s, f).of(group_of(group)).average());
           },
           "group"_a, "scenario"_a, "factor"_a)
      .def("base_average_bill",
           [](const SweepResult& r, const std::string& group) { return bill_dict(r.base_of(group_of(group)).average()); },
           "group"_a)
      .def("delta",
           [](const SweepResult& r, const std::string& group, std::size_t s, std::size_t f) -> py::object {
             const auto d = r.delta(r.cell(s, f), group_of(group));
             if (!d) return py::none();
             return py::str(d->percent_string(2));
           },
           "group"_a, "scenario"_a, "factor"_a)
      .def("avg_bill_table_csv", &avg_bill_table_csv)
      .def("component_share_table_csv", &component_share_table_csv)
      .def("delta_table_csv", &delta_table_csv)
      .def("aggregate_table_csv", &aggregate_table_csv)
      .def("bill_export_csv", &bill_export_csv)
      .def("summary_json", &summary_json)
      .def("write_reports", &write_reports, "dir"_a);

  m.def("run_sweep", &run_sweep, "config"_a, py::call_guard<py::gil_scoped_release>());
  m.def("solve_pinned", &solve_pinned, "config"_a);
}
