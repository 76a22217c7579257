#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mvp/cli.hpp"
#include "mvp/error.hpp"
#include "mvp/frontier.hpp"
#include "mvp/market_io.hpp"
#include "mvp/region.hpp"
#include "mvp/simulate.hpp"
#include "mvp/verify.hpp"

namespace py = pybind11;
using namespace mvp;

namespace {

SimConfig make_config(std::size_t paths, std::size_t steps, std::uint64_t seed,
                      const std::string& scheme, std::uint32_t stream, unsigned workers) {
  SimConfig c;
  c.n_paths = paths;
  c.n_steps = steps;
  c.seed = seed;
  c.scheme = parse_scheme(scheme);
  c.stream = stream;
  c.workers = workers;
  return c;
}

py::dict stats_dict(const TerminalStats& s) {
  py::dict d;
  d["n"] = s.n;
  d["mean_return"] = s.mean_return;
  d["std_return"] = s.std_return;
  d["sharpe"] = s.sharpe ? py::cast(*s.sharpe) : py::none();
  d["se_mean"] = s.se_mean;
  d["se_std"] = s.se_std;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continuous-time mean-variance frontier, simulation and verification";

  // Messages start with the error code name, e.g. "Degenerate: ...".
  py::register_exception<Error>(m, "MvpError", PyExc_ValueError);

  py::class_<ValidatedMarket>(m, "Market")
      .def_property_readonly("assets", &ValidatedMarket::assets)
      .def_property_readonly("horizon", &ValidatedMarket::horizon)
      .def_property_readonly("breakpoints", &ValidatedMarket::breakpoints)
      .def("risk_premium", &ValidatedMarket::risk_premium, py::arg("t"))
      .def("integrate_rate",
           [](const ValidatedMarket& v, double t0, double t1) {
             return v.integrate(IntegralKind::Rate, t0, t1);
           })
      .def("integrate_theta2",
           [](const ValidatedMarket& v, double t0, double t1) {
             return v.integrate(IntegralKind::Theta2, t0, t1);
           })
      .def("risk_free_return", &ValidatedMarket::risk_free_return)
      .def("to_json", [](const ValidatedMarket& v) { return dump_market(v.model()); });

  m.def("black_scholes_market",
        [](double r, double mu, double sigma, double T) {
          return validate_market(black_scholes_market(r, mu, sigma, T));
        },
        py::arg("r"), py::arg("mu"), py::arg("sigma"), py::arg("horizon"));
  m.def("constant_market",
        [](double T, double r, const Vector& mu, const Matrix& sigma) {
          return validate_market(constant_market(T, r, mu, sigma));
        },
        py::arg("horizon"), py::arg("r"), py::arg("mu"), py::arg("sigma"));
  m.def("parse_market", [](const std::string& text) { return validate_market(parse_market(text)); });
  m.def("load_market", [](const std::string& path) { return validate_market(load_market(path)); });

  m.def("frontier_slope", &frontier_slope);
  m.def("gamma", &mvp::gamma, py::arg("market"), py::arg("x0"), py::arg("z"));
  m.def("min_variance", &min_variance, py::arg("market"), py::arg("x0"), py::arg("z"));
  m.def("risk_free_payoff", &risk_free_payoff, py::arg("market"), py::arg("x0"));
  m.def("efficient_allocation",
        [](const ValidatedMarket& mk, double x0, double z, double t, double x) {
          const AllocationVector a = efficient_allocation(mk, x0, z, t, x);
          return py::make_tuple(a.risky, a.bond);
        },
        py::arg("market"), py::arg("x0"), py::arg("z"), py::arg("t"), py::arg("x"));
  m.def("frontier_points",
        [](const ValidatedMarket& mk, double x0, double z_min, double z_max, int count) {
          py::list out;
          for (const auto& p : frontier_points(mk, x0, z_min, z_max, count)) {
            out.append(py::make_tuple(p.std_return, p.mean_return));
          }
          return out;
        });
  m.def("stock_stats_bs", [](double mu, double sigma, double r, double T) {
    const StockStats s = stock_stats_bs(mu, sigma, r, T);
    return py::make_tuple(s.mean_return, s.std_return, s.sharpe);
  });
  m.def("premium", &premium);
  m.def("lemma_margin", &lemma_margin, py::arg("b"), py::arg("x"));

  m.def("simulate_efficient",
        [](const ValidatedMarket& mk, double x0, double z, std::size_t paths, std::size_t steps,
           std::uint64_t seed, const std::string& scheme, unsigned workers) {
          const SimConfig c = make_config(paths, steps, seed, scheme, 0, workers);
          PathEnsemble e;
          {
            py::gil_scoped_release release;
            e = simulate_wealth(mk, x0, Strategy::efficient(z), c);
          }
          return py::make_tuple(py::array_t<double>(e.terminal_wealth.size(), e.terminal_wealth.data()),
                                stats_dict(estimate_terminal_stats(e, x0)));
        },
        py::arg("market"), py::arg("x0"), py::arg("z"), py::arg("paths") = 10000,
        py::arg("steps") = 250, py::arg("seed") = 0, py::arg("scheme") = "exact",
        py::arg("workers") = 1);
  m.def("simulate_constant_mix",
        [](const ValidatedMarket& mk, double x0, const Vector& w, std::size_t paths,
           std::size_t steps, std::uint64_t seed, unsigned workers) {
          const SimConfig c = make_config(paths, steps, seed, "euler", 0, workers);
          PathEnsemble e;
          {
            py::gil_scoped_release release;
            e = simulate_wealth(mk, x0, Strategy::constant_mix(w), c);
          }
          return py::make_tuple(py::array_t<double>(e.terminal_wealth.size(), e.terminal_wealth.data()),
                                stats_dict(estimate_terminal_stats(e, x0)));
        },
        py::arg("market"), py::arg("x0"), py::arg("weights"), py::arg("paths") = 10000,
        py::arg("steps") = 250, py::arg("seed") = 0, py::arg("workers") = 1);
  m.def("constant_mix_point", [](const ValidatedMarket& mk, const Vector& w) {
    const DiagramPoint p = constant_mix_point(mk, w, "");
    return py::make_tuple(p.std_return, p.mean_return);
  });

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<std::string> full{"mvp"};
          full.insert(full.end(), args.begin(), args.end());
          std::vector<const char*> argv;
          for (const auto& a : full) argv.push_back(a.c_str());
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
