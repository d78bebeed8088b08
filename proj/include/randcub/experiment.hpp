#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "randcub/cubature.hpp"
#include "randcub/integrands.hpp"
#include "randcub/quadrature.hpp"

namespace randcub {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// deterministic float formatting and parsing (locale independent)

/// 17 significant digits, '.' decimal separator, enough to round-trip any
/// double.  Part of the artifact byte contract.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc())
    throw std::invalid_argument("parse_double: bad float field '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// bounded parallel loop

/// Worker cap: RANDCUB_THREADS if set (>= 1), else hardware concurrency.
/// Re-read at every call so tests can toggle it.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("RANDCUB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Runs fn(i) for i in [0,count) on up to thread_budget() threads.  Work is
/// indexed, not ordered: callers own any ordering of results, which keeps
/// artifact bytes independent of the worker count.
template <class F>
void parallel_for(std::size_t count, F&& fn) {
  if (count == 0) return;
  const unsigned workers0 = thread_budget();
  const std::size_t workers = std::min<std::size_t>(workers0 ? workers0 : 1, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// configuration

struct ExperimentConfig {
  PolynomialFamily family = PolynomialFamily::legendre();
  std::vector<MultiIndexSet> index_sets;
  std::vector<EstimatorKind> estimators{EstimatorKind::conditioned};
  std::vector<std::size_t> m_values;  // empty => derive from the budget rule
  double delta = kDefaultDelta;
  double r = kDefaultR;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string integrand_name = "product_exponential";
  IntegrandParams integrand_params;
  bool reference_analytic = false;
  double reference_value = 0.0;
  std::string output_stem = "randcub_out";
};

inline PolynomialFamily family_from_json(const nlohmann::json& j) {
  const std::string name = j.at("family").get<std::string>();
  if (name == "legendre") return PolynomialFamily::legendre();
  if (name == "chebyshev") return PolynomialFamily::chebyshev();
  if (name == "hermite") return PolynomialFamily::hermite();
  if (name == "jacobi")
    return PolynomialFamily::jacobi(j.at("theta1").get<int>(), j.at("theta2").get<int>());
  throw std::invalid_argument("unknown family: " + name);
}

inline MultiIndexSet index_set_from_json_one(const nlohmann::json& j, int order) {
  const std::string type = j.at("type").get<std::string>();
  const int dim = j.at("dim").get<int>();
  if (type == "total_degree") return total_degree_set(dim, order);
  if (type == "hyperbolic_cross") return hyperbolic_cross_set(dim, order);
  throw std::invalid_argument("unknown index set type: " + type);
}

/// Index-set description: {"type": "total_degree"|"hyperbolic_cross", "dim": d,
/// "order": k} with "orders": [k1,k2,...] allowed for sweeps, or
/// {"type": "explicit", "dim": d, "indices": [[...], ...]}.
inline std::vector<MultiIndexSet> index_sets_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "explicit") {
    const int dim = j.at("dim").get<int>();
    std::vector<MultiIndex> indices;
    for (const auto& row : j.at("indices")) indices.push_back(row.get<MultiIndex>());
    std::vector<MultiIndexSet> out;
    out.emplace_back(dim, std::move(indices));
    return out;
  }
  std::vector<MultiIndexSet> out;
  if (j.contains("orders"))
    for (const auto& k : j.at("orders")) out.push_back(index_set_from_json_one(j, k.get<int>()));
  else
    out.push_back(index_set_from_json_one(j, j.at("order").get<int>()));
  return out;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.family = family_from_json(j.at("basis"));
  cfg.index_sets = index_sets_from_json(j.at("index_set"));
  if (j.contains("estimators")) {
    cfg.estimators.clear();
    for (const auto& e : j.at("estimators"))
      cfg.estimators.push_back(estimator_from_name(e.get<std::string>()));
  }
  if (j.contains("m")) {
    const auto& jm = j.at("m");
    const std::string policy = jm.at("policy").get<std::string>();
    if (policy == "explicit") {
      for (const auto& v : jm.at("values")) cfg.m_values.push_back(v.get<std::size_t>());
      if (cfg.m_values.empty()) throw std::invalid_argument("config: empty m value list");
    } else if (policy != "from_budget") {
      throw std::invalid_argument("config: unknown m policy '" + policy + "'");
    }
  }
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("r")) cfg.r = j.at("r").get<double>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("integrand")) {
    const auto& ji = j.at("integrand");
    cfg.integrand_name = ji.at("name").get<std::string>();
    if (ji.contains("c")) cfg.integrand_params.c = ji.at("c").get<double>();
    if (ji.contains("coefficients"))
      cfg.integrand_params.coefficients =
          ji.at("coefficients").get<std::vector<double>>();
  }
  if (j.contains("reference")) {
    const auto& jr = j.at("reference");
    const std::string type = jr.at("type").get<std::string>();
    if (type == "analytic") {
      cfg.reference_analytic = true;
      cfg.reference_value = jr.at("value").get<double>();
    } else if (type != "quadrature") {
      throw std::invalid_argument("config: unknown reference type '" + type + "'");
    }
  }
  if (j.contains("output")) cfg.output_stem = j.at("output").get<std::string>();
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

inline ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["family"] = cfg.family.name();
  if (cfg.family.kind() == FamilyKind::jacobi) {
    j["theta1"] = static_cast<int>(cfg.family.theta1());
    j["theta2"] = static_cast<int>(cfg.family.theta2());
  }
  j["dim"] = cfg.index_sets.empty() ? 0 : cfg.index_sets.front().dim();
  std::vector<std::size_t> sizes;
  for (const auto& s : cfg.index_sets) sizes.push_back(s.size());
  j["n"] = sizes;
  std::vector<std::string> est;
  for (auto e : cfg.estimators) est.push_back(estimator_name(e));
  j["estimators"] = est;
  j["delta"] = cfg.delta;
  j["r"] = cfg.r;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["integrand"] = cfg.integrand_name;
  return j;
}

// ---------------------------------------------------------------------------
// trial rows

inline constexpr const char* kTrialSchema = "randcub-trialrow-v1";

struct TrialRow {
  std::size_t trial = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  EstimatorKind estimator = EstimatorKind::conditioned;
  double estimate = 0.0;
  double abs_error = 0.0;
  double gram_deviation = 0.0;
  bool good_event = false;
  bool all_weights_positive = false;
  bool sandwich_ok = false;
  std::uint64_t seed = 0;
};

inline std::string trial_rows_csv(const std::vector<TrialRow>& rows) {
  std::string out;
  out += "# schema: ";
  out += kTrialSchema;
  out += '\n';
  out += "trial,n,m,estimator,estimate,abs_error,gram_deviation,good_event,"
         "all_weights_positive,sandwich_ok,seed\n";
  for (const TrialRow& r : rows) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += estimator_name(r.estimator);
    out += ',';
    out += format_double(r.estimate);
    out += ',';
    out += format_double(r.abs_error);
    out += ',';
    out += format_double(r.gram_deviation);
    out += ',';
    out += r.good_event ? '1' : '0';
    out += ',';
    out += r.all_weights_positive ? '1' : '0';
    out += ',';
    out += r.sandwich_ok ? '1' : '0';
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

inline std::vector<TrialRow> parse_trial_rows_csv(std::istream& in) {
  std::vector<TrialRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column header line
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11)
      throw std::invalid_argument("trial row with wrong field count: " + line);
    TrialRow r;
    r.trial = std::stoull(fields[0]);
    r.n = std::stoull(fields[1]);
    r.m = std::stoull(fields[2]);
    r.estimator = estimator_from_name(fields[3]);
    r.estimate = parse_double(fields[4]);
    r.abs_error = parse_double(fields[5]);
    r.gram_deviation = fields[6] == "nan" ? std::nan("") : parse_double(fields[6]);
    r.good_event = fields[7] == "1";
    r.all_weights_positive = fields[8] == "1";
    r.sandwich_ok = fields[9] == "1";
    r.seed = std::stoull(fields[10]);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// reference values

/// Reference integral for a config's integrand: the configured analytic
/// value if present, else a 64-point-per-coordinate tensor Gauss quadrature
/// (supported for d <= 3).
inline double reference_integral(const ExperimentConfig& cfg, const TensorBasis& basis,
                                 const Integrand& f) {
  if (cfg.reference_analytic) return cfg.reference_value;
  return tensor_integral(basis.family(), basis.dim(), 64, f);
}

// ---------------------------------------------------------------------------
// convergence runner

struct ConvergenceResult {
  std::vector<TrialRow> rows;
  ordered_json summary;
};

namespace detail {

struct TrialOutcome {
  EstimateRecord record;
  bool all_positive = false;
  bool sandwich = false;
};

inline TrialOutcome run_single_trial(EstimatorKind kind, const SigmaSampler& sampler,
                                     std::size_t m, double delta, std::uint64_t seed,
                                     const Integrand& f, double w_min) {
  TrialOutcome out;
  switch (kind) {
    case EstimatorKind::ls:
    case EstimatorKind::conditioned: {
      const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
      const std::vector<double> evals = evaluate_at(f, nodes);
      const DesignSystem sys = build_design(sampler.basis(), nodes, evals);
      const CubatureRule rule = cubature_weights(sys, nodes, delta);
      out.record = EstimateRecord{kind, apply_rule(rule, evals), m, rule.good_event,
                                  seed, rule.gram_deviation};
      const SandwichReport rep = weight_sandwich_check(rule, w_min);
      out.all_positive = rep.all_positive;
      out.sandwich = rep.sandwich;
      return out;
    }
    case EstimatorKind::control_variate: {
      out.record = integrate_control_variate(sampler, m, delta, seed, f);
      // positivity diagnostics refer to the sigma-part cubature weights
      const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
      const std::vector<double> evals = evaluate_at(f, nodes);
      const DesignSystem sys = build_design(sampler.basis(), nodes, evals);
      const CubatureRule rule = cubature_weights(sys, nodes, delta);
      const SandwichReport rep = weight_sandwich_check(rule, w_min);
      out.all_positive = rep.all_positive;
      out.sandwich = rep.sandwich;
      return out;
    }
    case EstimatorKind::monte_carlo:
      out.record = monte_carlo(sampler, m, seed, f);
      out.all_positive = true;
      out.sandwich = true;
      return out;
    case EstimatorKind::importance_sampling:
      out.record = importance_sampling(sampler, m, seed, f);
      out.all_positive = true;
      out.sandwich = true;
      return out;
  }
  throw std::logic_error("run_single_trial: unhandled estimator");
}

inline double binomial_stderr(double rate, std::size_t trials) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

}  // namespace detail

/// Runs the full (index set) x (m) x (estimator) x (trial) grid.  Trials run
/// in parallel over derived streams mix(mix(master, combo), trial) with
/// combo counting (index set, m, estimator) groups in declared order; rows
/// are emitted sorted by trial index inside each group, so output bytes do
/// not depend on the worker count.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  if (cfg.index_sets.empty()) throw std::invalid_argument("run_convergence: no index set");
  ConvergenceResult result;
  result.summary["schema"] = "randcub-summary-v1";
  result.summary["config"] = config_echo(cfg);
  ordered_json groups = ordered_json::array();

  std::uint64_t combo = 0;
  for (const MultiIndexSet& set : cfg.index_sets) {
    const TensorBasis basis(cfg.family, set);
    const SigmaSampler sampler(basis);
    const Integrand f = make_integrand(cfg.integrand_name, cfg.integrand_params, basis);
    const double reference = reference_integral(cfg, basis, f);
    const double w_min =
        basis.family().bounded() && basis.dim() <= 3 ? w_min_numeric(basis) : 0.0;
    std::vector<std::size_t> m_list = cfg.m_values;
    if (m_list.empty()) m_list.push_back(min_samples({basis.size(), cfg.r, cfg.delta}));

    for (std::size_t m : m_list) {
      for (EstimatorKind kind : cfg.estimators) {
        std::vector<TrialRow> local(cfg.trials);
        parallel_for(cfg.trials, [&](std::size_t t) {
          const std::uint64_t stream = mix_seed(mix_seed(cfg.seed, combo), t);
          const detail::TrialOutcome outcome =
              detail::run_single_trial(kind, sampler, m, cfg.delta, stream, f, w_min);
          TrialRow row;
          row.trial = t;
          row.n = basis.size();
          row.m = m;
          row.estimator = kind;
          row.estimate = outcome.record.value;
          row.abs_error = std::abs(outcome.record.value - reference);
          row.gram_deviation = outcome.record.gram_deviation;
          row.good_event = outcome.record.good_event;
          row.all_weights_positive = outcome.all_positive;
          row.sandwich_ok = outcome.sandwich;
          row.seed = stream;
          local[t] = row;
        });

        double sum_abs = 0.0, sum_sq = 0.0;
        std::size_t good = 0, positive = 0, sandwich = 0;
        for (const TrialRow& row : local) {
          sum_abs += row.abs_error;
          sum_sq += row.abs_error * row.abs_error;
          good += row.good_event ? 1 : 0;
          positive += row.all_weights_positive ? 1 : 0;
          sandwich += row.sandwich_ok ? 1 : 0;
        }
        const double trials_d = static_cast<double>(cfg.trials);
        ordered_json g;
        g["n"] = basis.size();
        g["m"] = m;
        g["m_used"] = kind == EstimatorKind::control_variate ? 2 * m : m;
        g["estimator"] = estimator_name(kind);
        g["trials"] = cfg.trials;
        g["reference"] = reference;
        g["mean_abs_error"] = sum_abs / trials_d;
        g["rmse"] = std::sqrt(sum_sq / trials_d);
        g["good_event_rate"] = static_cast<double>(good) / trials_d;
        g["good_event_stderr"] =
            detail::binomial_stderr(static_cast<double>(good) / trials_d, cfg.trials);
        g["all_positive_rate"] = static_cast<double>(positive) / trials_d;
        g["all_positive_stderr"] =
            detail::binomial_stderr(static_cast<double>(positive) / trials_d, cfg.trials);
        g["sandwich_rate"] = static_cast<double>(sandwich) / trials_d;
        g["sandwich_stderr"] =
            detail::binomial_stderr(static_cast<double>(sandwich) / trials_d, cfg.trials);
        groups.push_back(g);

        result.rows.insert(result.rows.end(), local.begin(), local.end());
        ++combo;
      }
    }
  }
  result.summary["groups"] = groups;
  return result;
}

// ---------------------------------------------------------------------------
// positivity runner

/// Positive-weight experiment: at the positivity budget and at a deliberately
/// insufficient contrast size, report the fraction of trials whose weights
/// are all positive / sandwiched.  The rule is gated only by nonsingularity
/// (deviation < 1), matching the unconditioned weight statement.
inline ordered_json run_positivity(const ExperimentConfig& cfg) {
  if (cfg.index_sets.empty()) throw std::invalid_argument("run_positivity: no index set");
  const TensorBasis basis(cfg.family, cfg.index_sets.front());
  if (!basis.family().bounded())
    throw std::invalid_argument("run_positivity: requires a bounded (Jacobi-type) family");
  const SigmaSampler sampler(basis);
  const double w_min = w_min_numeric(basis);
  const std::size_t m_budget = min_samples_positive(basis, cfg.r, w_min);
  const std::size_t m_small = std::max<std::size_t>(3, basis.size());

  ordered_json out;
  out["schema"] = "randcub-positivity-v1";
  out["config"] = config_echo(cfg);
  out["w_min_numeric"] = w_min;
  out["w_min_analytic_bound"] = w_min_analytic_bound(basis);
  ordered_json entries = ordered_json::array();

  std::uint64_t combo = 0;
  for (const auto& [role, m] : {std::pair<const char*, std::size_t>{"budget", m_budget},
                                {"insufficient", m_small}}) {
    std::vector<char> positive(cfg.trials, 0), sandwich(cfg.trials, 0);
    parallel_for(cfg.trials, [&](std::size_t t) {
      const std::uint64_t stream = mix_seed(mix_seed(cfg.seed, combo), t);
      const NodeSample nodes = sampler.sample_sigma(m, mix_seed(stream, 0));
      const DesignSystem sys = build_design(basis, nodes);
      const CubatureRule rule = cubature_weights(sys, nodes, 1.0);
      const SandwichReport rep = weight_sandwich_check(rule, w_min);
      positive[t] = rep.all_positive ? 1 : 0;
      sandwich[t] = rep.sandwich ? 1 : 0;
    });
    std::size_t pos = 0, sand = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      pos += positive[t];
      sand += sandwich[t];
    }
    ordered_json e;
    e["role"] = role;
    e["m"] = m;
    e["trials"] = cfg.trials;
    e["all_positive_rate"] = static_cast<double>(pos) / static_cast<double>(cfg.trials);
    e["sandwich_rate"] = static_cast<double>(sand) / static_cast<double>(cfg.trials);
    e["probability_bound"] = 1.0 - 2.0 * std::pow(static_cast<double>(m), -cfg.r);
    entries.push_back(e);
    ++combo;
  }
  out["entries"] = entries;
  return out;
}

// ---------------------------------------------------------------------------
// budget table

/// Exactness and positive-weight budgets over a parameter grid.  The
/// positive-weight column uses the analytic n^(2B+1) scaling of the given
/// family (w_min-free), so it depends only on (n, r).
inline ordered_json budget_table(const std::vector<std::size_t>& n_list,
                                 const std::vector<double>& r_list,
                                 const std::vector<double>& delta_list,
                                 const PolynomialFamily& family) {
  ordered_json rows = ordered_json::array();
  for (std::size_t n : n_list)
    for (double r : r_list)
      for (double delta : delta_list) {
        ordered_json row;
        row["n"] = n;
        row["r"] = r;
        row["delta"] = delta;
        row["min_samples"] = min_samples({n, r, delta});
        if (family.bounded())
          row["min_samples_positive_analytic"] = min_samples_positive_analytic(family, n, r);
        else
          row["min_samples_positive_analytic"] = nullptr;
        rows.push_back(row);
      }
  ordered_json out;
  out["schema"] = "randcub-budget-v1";
  out["family"] = family.name();
  out["rows"] = rows;
  return out;
}

// ---------------------------------------------------------------------------
// file output

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

/// Writes <stem>.csv and <stem>_summary.json; returns the two paths.
inline std::pair<std::string, std::string> write_convergence_outputs(
    const ExperimentConfig& cfg, const ConvergenceResult& result, std::string stem = "") {
  if (stem.empty()) stem = cfg.output_stem;
  const std::string csv_path = stem + ".csv";
  const std::string json_path = stem + "_summary.json";
  write_text_file(csv_path, trial_rows_csv(result.rows));
  write_text_file(json_path, result.summary.dump(2) + "\n");
  return {csv_path, json_path};
}

}  // namespace randcub
