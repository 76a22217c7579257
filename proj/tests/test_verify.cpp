#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mvp/frontier.hpp"
#include "mvp/verify.hpp"

using namespace mvp;

namespace {

MarketModel bs_model() { return black_scholes_market(0.06, 0.12, 0.15, 1.0); }

VerifyConfig small_config(std::uint64_t seed) {
  VerifyConfig c;
  c.sim.n_paths = 2000;
  c.sim.n_steps = 50;
  c.sim.seed = seed;
  c.check_times = 8;
  c.euler_steps = {25, 50, 100};
  c.euler_paths = 500;
  c.region_strategies = 6;
  c.region_paths = 20000;
  c.region_steps = 10;
  c.lemma.n_b = 20;
  c.lemma.n_x = 21;
  c.lemma.n_draws = 500;
  c.lemma.seed = seed;
  return c;
}

const CheckRecord& find(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("check times cover (0, T] and every breakpoint") {
  MarketModel m;
  m.horizon = 2.0;
  m.rate = ParameterCurve<double>({0.0, 0.3, 2.0}, {0.03, 0.05});
  m.appreciation = ParameterCurve<Vector>::constant(2.0, Vector::Constant(1, 0.1));
  m.volatility = ParameterCurve<Matrix>::constant(2.0, Matrix::Constant(1, 1, 0.2));
  const ValidatedMarket v = validate_market(m);
  const auto t = check_times(v, 4, false);
  CHECK(t == std::vector<double>{0.3, 0.5, 1.0, 1.5, 2.0});
  CHECK(check_times(v, 4, true).front() == 0.0);
}

TEST_CASE("lemma grid and dominance draws") {
  LemmaGrid g;
  g.seed = 3;
  const CheckRecord r = verify_lemma_and_bs(g);
  CHECK(r.pass);
  CHECK(r.statistic == 0.0);
}

TEST_CASE("run_all on the one-stock market passes and is deterministic") {
  const double zf = std::exp(0.06);
  const VerifyConfig cfg = small_config(5);
  const VerificationReport a = run_all(bs_model(), 1.0, {zf, 1.2}, cfg);
  CHECK(a.pass);
  for (const auto& c : a.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  CHECK(find(a, "risky_exposure[z=" + std::string("1.2") + "]").statistic == 1.0);
  CHECK(find(a, "wealth_cap_strict[z=1.2]").pass);

  const VerificationReport b = run_all(bs_model(), 1.0, {zf, 1.2}, cfg);
  CHECK(dump_report(a) == dump_report(b));

  VerifyConfig threaded = cfg;
  threaded.sim.workers = 3;
  CHECK(dump_report(run_all(bs_model(), 1.0, {zf, 1.2}, threaded)) == dump_report(a));
}

TEST_CASE("risk-free target: equality on the cap, exposure skipped, bond held") {
  const ValidatedMarket m = validate_market(bs_model());
  const VerifyConfig cfg = small_config(2);
  const double zf = risk_free_payoff(m, 1.0);
  const auto cap = verify_wealth_cap(m, 1.0, zf, cfg);
  REQUIRE(cap.size() == 3);
  for (const auto& c : cap) CHECK(c.pass);
  CHECK(cap[1].name.rfind("wealth_cap_equality", 0) == 0);
  const CheckRecord exp = verify_risky_exposure(m, 1.0, zf, cfg);
  CHECK(exp.skipped);
  CHECK(verify_bond_allocation(m, 1.0, zf, cfg).statistic == 1.0);
}

TEST_CASE("exposure is only required where B(t) != 0") {
  MarketModel model;
  model.horizon = 1.0;
  model.rate = ParameterCurve<double>::constant(1.0, 0.05);
  model.appreciation = ParameterCurve<Vector>({0.0, 0.5, 1.0}, {Vector::Constant(1, 0.05),
                                                                 Vector::Constant(1, 0.12)});
  model.volatility = ParameterCurve<Matrix>::constant(1.0, Matrix::Constant(1, 1, 0.2));
  const ValidatedMarket m = validate_market(model);
  const CheckRecord r = verify_risky_exposure(m, 1.0, 1.1, small_config(4));
  CHECK(r.pass);
  CHECK(r.statistic == 1.0);
  CHECK(r.detail.find("minimum over") != std::string::npos);
  const CheckRecord bond = verify_bond_allocation(m, 1.0, 1.1, small_config(4));
  CHECK(bond.pass);
  CHECK(bond.detail.find("jumps") != std::string::npos);
}

TEST_CASE("bond allocation in the two-asset market") {
  Vector mu(2);
  mu << 0.08, 0.12;
  Matrix s(2, 2);
  s << 0.2, 0.0, 0.05, 0.25;
  const ValidatedMarket m = validate_market(constant_market(1.0, 0.02, mu, s));
  const CheckRecord r = verify_bond_allocation(m, 1.0, 1.15, small_config(6));
  CHECK(r.pass);
  CHECK(r.statistic > 0.0);
}

TEST_CASE("an infeasible market yields a single failed validation record") {
  const VerificationReport r =
      run_all(black_scholes_market(0.06, 0.06, 0.15, 1.0), 1.0, {1.1}, small_config(1));
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].name == "market_validation");
  CHECK_FALSE(r.checks[0].pass);
  CHECK_FALSE(r.pass);
}

TEST_CASE("a target below the risk-free payoff is recorded, not thrown") {
  const VerificationReport r = run_all(bs_model(), 1.0, {1.0}, small_config(1));
  CHECK_FALSE(r.pass);
  bool any_failed = false;
  for (const auto& c : r.checks) any_failed = any_failed || !c.pass;
  CHECK(any_failed);
}

TEST_CASE("report JSON round-trips losslessly") {
  VerificationReport r;
  r.seed = 77;
  r.pass = false;
  r.config = {{"x0", 1.0}, {"targets", {1.1, 1.0 / 3.0}}};
  CheckRecord c;
  c.name = "demo";
  c.statistic = 0.1 + 0.2;
  c.threshold = 1e-300;
  c.comparison = "<=";
  c.detail = "text with \"quotes\"";
  c.seed = 77;
  c.config = {{"paths", 10}};
  r.checks.push_back(c);
  const std::string text = dump_report(r);
  const VerificationReport back = report_from_json(nlohmann::json::parse(text));
  CHECK(dump_report(back) == text);
  CHECK(back.checks[0].statistic == c.statistic);
  CHECK(text.back() == '\n');
}
