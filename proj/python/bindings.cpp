#include "corrnet/diagnostics.hpp"
#include "corrnet/error.hpp"
#include "corrnet/f_distribution.hpp"
#include "corrnet/granger.hpp"
#include "corrnet/io.hpp"
#include "corrnet/panel.hpp"
#include "corrnet/synthgen.hpp"
#include "corrnet/varx.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace corrnet;

namespace {

std::vector<std::string> quarter_strings(const Panel& panel) {
  std::vector<std::string> out;
  for (const auto& q : panel.quarters) out.push_back(q.str());
  return out;
}

Panel make_panel(std::vector<std::string> labels, const std::vector<std::string>& quarters,
                 Eigen::MatrixXd x, Eigen::MatrixXd y) {
  Panel panel;
  panel.labels = std::move(labels);
  for (const auto& q : quarters) panel.quarters.push_back(Quarter::parse(q));
  panel.x = std::move(x);
  panel.y = std::move(y);
  panel.validate();
  return panel;
}

InformationCriterion parse_criterion(const std::string& s) {
  if (s == "aic") return InformationCriterion::Aic;
  if (s == "bic") return InformationCriterion::Bic;
  throw UsageError("criterion must be 'aic' or 'bic'");
}

}  // namespace

PYBIND11_MODULE(_corrnet, m) {
  m.doc() = "Coupled GDP/CPI VARX estimation and Granger-causality networks";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<Panel>(m, "Panel")
      .def(py::init(&make_panel), py::arg("labels"), py::arg("quarters"), py::arg("x"),
           py::arg("y"))
      .def_readonly("labels", &Panel::labels)
      .def_property_readonly("quarters", &quarter_strings)
      .def_readonly("x", &Panel::x)
      .def_readonly("y", &Panel::y)
      .def_property_readonly("T", &Panel::periods)
      .def_property_readonly("n", &Panel::countries);

  m.def("load_panel_csv", &load_panel_csv, py::arg("path"));
  m.def("save_panel_csv", &save_panel_csv, py::arg("path"), py::arg("panel"));
  m.def(
      "ingest",
      [](const std::filesystem::path& gdp, const std::filesystem::path& cpi, bool cpi_annual,
         int anchor) {
        auto g = load_series_csv(gdp, VariableKind::Gdp, Frequency::Quarterly);
        auto c = load_series_csv(cpi, VariableKind::Cpi,
                                 cpi_annual ? Frequency::Annual : Frequency::Quarterly);
        if (cpi_annual) c = interpolate_annual_to_quarterly(c, anchor);
        return align_panel(g, c);
      },
      py::arg("gdp_csv"), py::arg("cpi_csv"), py::arg("cpi_annual") = true, py::arg("anchor") = 4,
      "Load GDP and CPI CSVs, interpolate annual CPI and align into a panel.");

  py::class_<VarxFit>(m, "VarxFit")
      .def_property_readonly("role", [](const VarxFit& f) { return std::string(to_string(f.role)); })
      .def_readonly("p", &VarxFit::p)
      .def_readonly("intercept", &VarxFit::intercept)
      .def_readonly("endog_coefs", &VarxFit::endog_coefs)
      .def_readonly("exog_coefs", &VarxFit::exog_coefs)
      .def_readonly("residuals", &VarxFit::residuals)
      .def_readonly("resid_cov", &VarxFit::resid_cov)
      .def_readonly("rss_per_equation", &VarxFit::rss_per_equation)
      .def_readonly("regressor_count", &VarxFit::regressor_count)
      .def_readonly("rank", &VarxFit::rank)
      .def("standard_errors", &VarxFit::standard_errors);

  py::class_<CoupledFit>(m, "CoupledFit")
      .def_readonly("gdp", &CoupledFit::gdp)
      .def_readonly("cpi", &CoupledFit::cpi)
      .def_readonly("labels", &CoupledFit::labels)
      .def_property_readonly("p", &CoupledFit::p);

  m.def(
      "fit_coupled",
      [](const Panel& panel, int p, const std::string& rank_policy) {
        return fit_coupled(panel, p, parse_rank_policy(rank_policy));
      },
      py::arg("panel"), py::arg("p"), py::arg("rank_policy") = "strict");
  m.def("log_likelihood", &log_likelihood, py::arg("fit"));
  m.def(
      "select_lag",
      [](const Panel& panel, int p_max, const std::string& criterion) {
        const auto sel = select_lag(panel, p_max, parse_criterion(criterion));
        py::dict scores;
        for (const auto& [p, s] : sel.scores) scores[py::int_(p)] = py::make_tuple(s.first, s.second);
        return py::make_tuple(sel.chosen_p, scores);
      },
      py::arg("panel"), py::arg("p_max"), py::arg("criterion") = "bic",
      "Returns (chosen_p, {p: (gdp_score, cpi_score)}).");

  py::class_<CausalityNetwork>(m, "CausalityNetwork")
      .def_readonly("labels", &CausalityNetwork::labels)
      .def_readonly("alpha", &CausalityNetwork::alpha)
      .def_property_readonly("phi", [](const CausalityNetwork& n) { return n.phi.matrix; })
      .def_property_readonly("pi", [](const CausalityNetwork& n) { return n.pi.matrix; })
      .def_property_readonly("psi", [](const CausalityNetwork& n) { return n.psi.matrix; })
      .def_property_readonly("gamma", [](const CausalityNetwork& n) { return n.gamma.matrix; })
      .def_property_readonly("untestable", [](const CausalityNetwork& n) {
        py::dict d;
        for (auto role : kAllRoles) d[py::str(std::string(to_string(role)))] = n.get(role).untestable;
        return d;
      });

  m.def(
      "assemble_network",
      [](const Panel& panel, const CoupledFit& fit, double alpha, const std::string& correction) {
        return assemble_network(panel, fit, alpha, parse_correction(correction));
      },
      py::arg("panel"), py::arg("fit"), py::arg("alpha") = 0.05, py::arg("correction") = "none");

  m.def(
      "companion_stability",
      [](const VarxFit& fit) {
        const auto r = companion_stability(fit);
        py::dict d;
        d["eigen_moduli"] = r.eigen_moduli;
        d["max_modulus"] = r.max_modulus;
        d["stable"] = r.stable;
        return d;
      },
      py::arg("fit"));
  m.def(
      "ols_cusum",
      [](const VarxFit& fit, double alpha) {
        const auto r = ols_cusum(fit, alpha);
        py::list eqs;
        for (const auto& e : r.equations) {
          py::dict d;
          d["path"] = e.path;
          d["sup_stat"] = e.sup_stat;
          d["rejected"] = e.rejected;
          eqs.append(d);
        }
        return py::make_tuple(r.critical_value, eqs);
      },
      py::arg("fit"), py::arg("alpha") = 0.05, "Returns (critical_value, [per-equation dict]).");

  py::class_<GeneratorSpec>(m, "GeneratorSpec")
      .def_readonly("n", &GeneratorSpec::n)
      .def_readonly("p", &GeneratorSpec::p)
      .def_readwrite("seed", &GeneratorSpec::seed)
      .def_readwrite("burn_in", &GeneratorSpec::burn_in)
      .def_readonly("phi", &GeneratorSpec::phi)
      .def_readonly("pi", &GeneratorSpec::pi)
      .def_readonly("psi", &GeneratorSpec::psi)
      .def_readonly("gamma", &GeneratorSpec::gamma)
      .def("to_json", [](const GeneratorSpec& s) { return to_json(s).dump(2); })
      .def_static("from_json",
                  [](const std::string& text) { return spec_from_json(Json::parse(text)); });

  m.def("random_stable_spec", &random_stable_spec, py::arg("n"), py::arg("p"), py::arg("seed"),
        py::arg("target_radius"));
  m.def("joint_spectral_radius", &joint_spectral_radius, py::arg("spec"));
  m.def("simulate", &simulate, py::arg("spec"), py::arg("T"));
  m.def("f_cdf", &f_cdf, py::arg("x"), py::arg("d1"), py::arg("d2"));
}
