#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "randcub/experiment.hpp"
#include "oracles.hpp"

using namespace randcub;
using Catch::Approx;

namespace {

ExperimentConfig tiny_config() {
  const auto j = nlohmann::json::parse(R"({
    "basis": {"family": "legendre"},
    "index_set": {"type": "total_degree", "dim": 2, "order": 1},
    "estimators": ["conditioned", "monte_carlo"],
    "m": {"policy": "explicit", "values": [40]},
    "delta": 0.5,
    "r": 1.0,
    "trials": 6,
    "seed": 99,
    "integrand": {"name": "product_exponential"},
    "reference": {"type": "analytic", "value": 1.3810978455418155}
  })");
  return config_from_json(j);
}

}  // namespace

TEST_CASE("integrand registry evaluates the documented formulas") {
  const TensorBasis basis(PolynomialFamily::legendre(), total_degree_set(2, 1));
  const IntegrandParams none;

  const Integrand pe = make_integrand("product_exponential", none, basis);
  const std::vector<double> y{0.5, -0.25};
  REQUIRE(pe(y) == Approx(std::exp(0.25)).margin(1e-15));

  IntegrandParams rp;
  rp.c = 2.0;
  const Integrand rg = make_integrand("runge", rp, basis);
  REQUIRE(rg(y) == Approx(1.0 / (1.0 + 2.0 * 0.3125)).margin(1e-15));

  const Integrand cp = make_integrand("cosine_product", none, basis);
  const std::vector<double> edge{0.0, 1.0};
  REQUIRE(cp(edge) == Approx(0.0).margin(1e-15));
  REQUIRE(cp(y) == Approx(std::cos(0.25 * M_PI) * std::cos(-0.125 * M_PI)).margin(1e-15));

  IntegrandParams pp;
  pp.coefficients = {0.5, -1.0, 2.0};
  const Integrand poly = make_integrand("polynomial", pp, basis);
  const std::vector<double> psi = basis.eval(y);
  REQUIRE(poly(y) == Approx(0.5 * psi[0] - psi[1] + 2.0 * psi[2]).margin(1e-14));

  IntegrandParams wrong;
  wrong.coefficients = {1.0};
  REQUIRE_THROWS_AS(make_integrand("polynomial", wrong, basis), std::invalid_argument);
  REQUIRE_THROWS_AS(make_integrand("no_such_integrand", none, basis), std::invalid_argument);
  IntegrandParams bad_c;
  bad_c.c = -1.0;
  REQUIRE_THROWS_AS(make_integrand("runge", bad_c, basis), std::invalid_argument);
}

TEST_CASE("quadrature reference values for the registry integrands") {
  ExperimentConfig cfg;  // reference_analytic defaults to false
  const TensorBasis d1(PolynomialFamily::legendre(), total_degree_set(1, 1));
  const Integrand cp1 = make_integrand("cosine_product", {}, d1);
  REQUIRE(reference_integral(cfg, d1, cp1) == Approx(2.0 / M_PI).margin(1e-12));

  const TensorBasis d2(PolynomialFamily::legendre(), total_degree_set(2, 1));
  const Integrand pe = make_integrand("product_exponential", {}, d2);
  const double sinh1 = std::sinh(1.0);
  REQUIRE(reference_integral(cfg, d2, pe) == Approx(sinh1 * sinh1).margin(1e-12));

  cfg.reference_analytic = true;
  cfg.reference_value = 42.0;
  REQUIRE(reference_integral(cfg, d2, pe) == 42.0);
}

TEST_CASE("budget table rows carry the frozen budgets") {
  const auto table = budget_table({5, 10}, {1.0}, {0.5}, PolynomialFamily::legendre());
  REQUIRE(table.at("rows").size() == 2);
  REQUIRE(table.at("rows")[0].at("min_samples").get<std::size_t>() == 590);
  REQUIRE(table.at("rows")[1].at("min_samples").get<std::size_t>() == 1330);
  for (const auto& row : table.at("rows")) {
    REQUIRE_FALSE(row.at("min_samples_positive_analytic").is_null());
    REQUIRE(row.at("min_samples_positive_analytic").get<std::size_t>() >
            row.at("min_samples").get<std::size_t>());
  }
  const auto htable = budget_table({5}, {1.0}, {0.5}, PolynomialFamily::hermite());
  REQUIRE(htable.at("rows")[0].at("min_samples_positive_analytic").is_null());
}

TEST_CASE("config parsing covers sweeps, explicit sets and failure modes") {
  const ExperimentConfig cfg = tiny_config();
  REQUIRE(cfg.family.kind() == FamilyKind::legendre);
  REQUIRE(cfg.index_sets.size() == 1);
  REQUIRE(cfg.index_sets.front().size() == 3);
  REQUIRE(cfg.estimators.size() == 2);
  REQUIRE(cfg.m_values == std::vector<std::size_t>{40});
  REQUIRE(cfg.trials == 6);
  REQUIRE(cfg.seed == 99);
  REQUIRE(cfg.reference_analytic);
  REQUIRE(cfg.reference_value == Approx(1.3810978455418155));

  const auto sweep = nlohmann::json::parse(R"({
    "basis": {"family": "chebyshev"},
    "index_set": {"type": "total_degree", "dim": 2, "orders": [1, 2]}
  })");
  const ExperimentConfig scfg = config_from_json(sweep);
  REQUIRE(scfg.index_sets.size() == 2);
  REQUIRE(scfg.index_sets[0].size() == 3);
  REQUIRE(scfg.index_sets[1].size() == 6);
  REQUIRE(scfg.estimators.size() == 1);  // defaults to the conditioned estimator

  const auto expl = nlohmann::json::parse(R"({
    "basis": {"family": "jacobi", "theta1": 1, "theta2": 0},
    "index_set": {"type": "explicit", "dim": 2, "indices": [[0, 0], [1, 0]]}
  })");
  const ExperimentConfig ecfg = config_from_json(expl);
  REQUIRE(ecfg.index_sets.front().size() == 2);
  REQUIRE(ecfg.family.theta1() == 1.0);

  const auto bad_family = nlohmann::json::parse(
      R"({"basis": {"family": "laguerre"}, "index_set": {"type": "total_degree", "dim": 1, "order": 1}})");
  REQUIRE_THROWS_AS(config_from_json(bad_family), std::invalid_argument);
  const auto bad_policy = nlohmann::json::parse(
      R"({"basis": {"family": "legendre"}, "index_set": {"type": "total_degree", "dim": 1, "order": 1},
          "m": {"policy": "adaptive"}})");
  REQUIRE_THROWS_AS(config_from_json(bad_policy), std::invalid_argument);
  const auto empty_m = nlohmann::json::parse(
      R"({"basis": {"family": "legendre"}, "index_set": {"type": "total_degree", "dim": 1, "order": 1},
          "m": {"policy": "explicit", "values": []}})");
  REQUIRE_THROWS_AS(config_from_json(empty_m), std::invalid_argument);
  const auto bad_ref = nlohmann::json::parse(
      R"({"basis": {"family": "legendre"}, "index_set": {"type": "total_degree", "dim": 1, "order": 1},
          "reference": {"type": "exact"}})");
  REQUIRE_THROWS_AS(config_from_json(bad_ref), std::invalid_argument);
  const auto no_trials = nlohmann::json::parse(
      R"({"basis": {"family": "legendre"}, "index_set": {"type": "total_degree", "dim": 1, "order": 1},
          "trials": 0})");
  REQUIRE_THROWS_AS(config_from_json(no_trials), std::invalid_argument);
  REQUIRE_THROWS_AS(load_config("/no/such/config.json"), std::invalid_argument);
}

TEST_CASE("float formatting round trips bitwise and rejects junk") {
  for (double x : {1.0 / 3.0, 0.1, -2.5e300, 1e-17, 0.0, 1330.0}) {
    REQUIRE(parse_double(format_double(x)) == x);
  }
  REQUIRE_THROWS_AS(parse_double("abc"), std::invalid_argument);
}

TEST_CASE("thread budget obeys the environment override") {
  setenv("RANDCUB_THREADS", "3", 1);
  REQUIRE(thread_budget() == 3u);
  unsetenv("RANDCUB_THREADS");
  REQUIRE(thread_budget() >= 1u);
}

TEST_CASE("parallel loop visits every index once and propagates exceptions") {
  setenv("RANDCUB_THREADS", "4", 1);
  std::atomic<long> sum{0};
  parallel_for(100, [&](std::size_t i) { sum += static_cast<long>(i); });
  REQUIRE(sum.load() == 4950);
  REQUIRE_THROWS_AS(parallel_for(20, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  }), std::runtime_error);
  unsetenv("RANDCUB_THREADS");
}

TEST_CASE("convergence artifacts are byte identical across reruns and worker counts") {
  const ExperimentConfig cfg = tiny_config();

  setenv("RANDCUB_THREADS", "1", 1);
  const ConvergenceResult serial = run_convergence(cfg);
  const std::string serial_csv = trial_rows_csv(serial.rows);
  const std::string serial_summary = serial.summary.dump(2);

  const ConvergenceResult again = run_convergence(cfg);
  REQUIRE(trial_rows_csv(again.rows) == serial_csv);
  REQUIRE(again.summary.dump(2) == serial_summary);

  setenv("RANDCUB_THREADS", "4", 1);
  const ConvergenceResult parallel = run_convergence(cfg);
  REQUIRE(trial_rows_csv(parallel.rows) == serial_csv);
  REQUIRE(parallel.summary.dump(2) == serial_summary);
  unsetenv("RANDCUB_THREADS");
}

TEST_CASE("trial rows survive a CSV round trip and match the summary") {
  const ExperimentConfig cfg = tiny_config();
  const ConvergenceResult result = run_convergence(cfg);
  REQUIRE(result.rows.size() == 12);  // 2 estimators x 6 trials

  const std::string csv = trial_rows_csv(result.rows);
  std::istringstream in(csv);
  const std::vector<TrialRow> parsed = parse_trial_rows_csv(in);
  REQUIRE(parsed.size() == result.rows.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    REQUIRE(parsed[i].trial == result.rows[i].trial);
    REQUIRE(parsed[i].estimator == result.rows[i].estimator);
    REQUIRE(parsed[i].estimate == result.rows[i].estimate);
    REQUIRE(parsed[i].abs_error == result.rows[i].abs_error);
    if (std::isnan(result.rows[i].gram_deviation))
      REQUIRE(std::isnan(parsed[i].gram_deviation));
    else
      REQUIRE(parsed[i].gram_deviation == result.rows[i].gram_deviation);
    REQUIRE(parsed[i].good_event == result.rows[i].good_event);
    REQUIRE(parsed[i].seed == result.rows[i].seed);
  }

  // recompute the first summary group (conditioned) from its rows
  double sum_abs = 0.0;
  std::size_t good = 0;
  for (const TrialRow& row : result.rows)
    if (row.estimator == EstimatorKind::conditioned) {
      sum_abs += row.abs_error;
      good += row.good_event ? 1 : 0;
    }
  const auto& g0 = result.summary.at("groups")[0];
  REQUIRE(g0.at("estimator").get<std::string>() == "conditioned");
  REQUIRE(g0.at("mean_abs_error").get<double>() == Approx(sum_abs / 6.0).epsilon(1e-14));
  REQUIRE(g0.at("good_event_rate").get<double>() ==
          Approx(static_cast<double>(good) / 6.0).epsilon(1e-14));
  REQUIRE(g0.at("reference").get<double>() == Approx(1.3810978455418155));
}

TEST_CASE("convergence outputs land in the named files") {
  const ExperimentConfig cfg = tiny_config();
  const ConvergenceResult result = run_convergence(cfg);
  const auto [csv_path, json_path] = write_convergence_outputs(cfg, result, "harness_unit_tmp");
  std::ifstream csv_in(csv_path, std::ios::binary);
  std::stringstream csv_buf;
  csv_buf << csv_in.rdbuf();
  REQUIRE(csv_buf.str() == trial_rows_csv(result.rows));
  std::ifstream json_in(json_path);
  const nlohmann::json round = nlohmann::json::parse(json_in);
  REQUIRE(round.at("schema").get<std::string>() == "randcub-summary-v1");
  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());
}

TEST_CASE("positivity runner reports both sample sizes with high positive rates") {
  const auto j = nlohmann::json::parse(R"({
    "basis": {"family": "chebyshev"},
    "index_set": {"type": "total_degree", "dim": 1, "order": 1},
    "trials": 20,
    "seed": 7
  })");
  const ExperimentConfig cfg = config_from_json(j);
  const ordered_json report = run_positivity(cfg);
  REQUIRE(report.at("schema").get<std::string>() == "randcub-positivity-v1");

  const TensorBasis basis(cfg.family, cfg.index_sets.front());
  const double w_min = w_min_numeric(basis);
  REQUIRE(report.at("w_min_numeric").get<double>() == Approx(w_min).margin(1e-12));
  REQUIRE(report.at("entries").size() == 2);
  const auto& budget = report.at("entries")[0];
  REQUIRE(budget.at("role").get<std::string>() == "budget");
  REQUIRE(budget.at("m").get<std::size_t>() == min_samples_positive(basis, cfg.r, w_min));
  REQUIRE(budget.at("all_positive_rate").get<double>() >= 0.9);
  REQUIRE(budget.at("probability_bound").get<double>() > 0.99);
  const auto& small = report.at("entries")[1];
  REQUIRE(small.at("role").get<std::string>() == "insufficient");
  REQUIRE(small.at("m").get<std::size_t>() == 3);

  const auto hj = nlohmann::json::parse(R"({
    "basis": {"family": "hermite"},
    "index_set": {"type": "total_degree", "dim": 1, "order": 1},
    "trials": 5
  })");
  REQUIRE_THROWS_AS(run_positivity(config_from_json(hj)), std::invalid_argument);
}
