// Command line front end: sampling, weight inspection, single-shot
// integration, and the convergence/positivity/budget experiment drivers.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randcub/randcub.hpp"

namespace {

using namespace randcub;

std::string nodes_csv(const NodeSample& sample) {
  std::string out = "# schema: randcub-nodes-v1\nindex";
  for (int q = 1; q <= sample.dim; ++q) out += ",y_" + std::to_string(q);
  out += ",w\n";
  for (std::size_t i = 0; i < sample.m; ++i) {
    out += std::to_string(i);
    for (int q = 0; q < sample.dim; ++q) {
      out += ',';
      out += format_double(sample.nodes[i * static_cast<std::size_t>(sample.dim) +
                                        static_cast<std::size_t>(q)]);
    }
    out += ',';
    out += format_double(sample.w_values[i]);
    out += '\n';
  }
  return out;
}

std::string weights_csv(const CubatureRule& rule) {
  const NodeSample& sample = rule.sample;
  std::string out = "# schema: randcub-weights-v1\nindex";
  for (int q = 1; q <= sample.dim; ++q) out += ",y_" + std::to_string(q);
  out += ",w,alpha\n";
  for (std::size_t i = 0; i < sample.m; ++i) {
    out += std::to_string(i);
    for (int q = 0; q < sample.dim; ++q) {
      out += ',';
      out += format_double(sample.nodes[i * static_cast<std::size_t>(sample.dim) +
                                        static_cast<std::size_t>(q)]);
    }
    out += ',';
    out += format_double(sample.w_values[i]);
    out += ',';
    out += format_double(rule.weights[i]);
    out += '\n';
  }
  return out;
}

ordered_json gram_json(const DesignSystem& sys) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < sys.n; ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < sys.n; ++j) row.push_back(sys.gram(i, j));
    rows.push_back(row);
  }
  ordered_json out;
  out["gram"] = rows;
  out["gram_deviation"] = gram_deviation(sys);
  return out;
}

ordered_json record_json(const EstimateRecord& rec) {
  ordered_json out;
  out["estimator"] = estimator_name(rec.kind);
  out["value"] = rec.value;
  out["m_used"] = rec.m_used;
  out["good_event"] = rec.good_event;
  out["seed"] = rec.seed;
  if (std::isfinite(rec.gram_deviation)) out["gram_deviation"] = rec.gram_deviation;
  return out;
}

std::vector<std::size_t> parse_size_list(const std::vector<std::string>& raw) {
  std::vector<std::size_t> out;
  for (const std::string& s : raw) out.push_back(std::stoull(s));
  return out;
}

std::vector<double> parse_double_list(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const std::string& s : raw) out.push_back(parse_double(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomized least-squares cubature toolbox"};
  app.require_subcommand(1);

  std::string config_path, out_path, estimator = "conditioned", source = "sigma";
  std::string family_name = "legendre";
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double delta_flag = -1.0;
  bool dump_gram = false;
  std::vector<std::string> n_raw{"10"}, r_raw{"1"}, delta_raw{"0.5"};

  auto* cmd_sample = app.add_subcommand("sample", "draw nodes from sigma or mu");
  cmd_sample->add_option("--config", config_path)->required();
  cmd_sample->add_option("--m", m)->required();
  cmd_sample->add_option("--seed", seed);
  cmd_sample->add_option("--source", source)->check(CLI::IsMember({"sigma", "mu"}));
  cmd_sample->add_option("--out", out_path)->required();

  auto* cmd_weights = app.add_subcommand("weights", "compute cubature weights at a sample");
  cmd_weights->add_option("--config", config_path)->required();
  cmd_weights->add_option("--m", m)->required();
  cmd_weights->add_option("--seed", seed);
  cmd_weights->add_option("--delta", delta_flag);
  cmd_weights->add_option("--out", out_path)->required();
  cmd_weights->add_flag("--dump-gram", dump_gram);

  auto* cmd_integrate = app.add_subcommand("integrate", "run one estimator once");
  cmd_integrate->add_option("--config", config_path)->required();
  cmd_integrate->add_option("--estimator", estimator);
  cmd_integrate->add_option("--m", m);
  cmd_integrate->add_option("--seed", seed);
  cmd_integrate->add_option("--delta", delta_flag);
  cmd_integrate->add_flag("--dump-gram", dump_gram);

  auto* cmd_convergence = app.add_subcommand("convergence", "trial grid -> CSV + summary");
  cmd_convergence->add_option("--config", config_path)->required();
  cmd_convergence->add_option("--out", out_path);

  auto* cmd_positivity = app.add_subcommand("positivity", "positive-weight experiment");
  cmd_positivity->add_option("--config", config_path)->required();
  cmd_positivity->add_option("--out", out_path);

  auto* cmd_budget = app.add_subcommand("budget", "sample-size budget table");
  cmd_budget->add_option("--n", n_raw)->delimiter(',');
  cmd_budget->add_option("--r", r_raw)->delimiter(',');
  cmd_budget->add_option("--delta", delta_raw)->delimiter(',');
  cmd_budget->add_option("--family", family_name)
      ->check(CLI::IsMember({"legendre", "chebyshev", "hermite"}));
  cmd_budget->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sample->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const TensorBasis basis(cfg.family, cfg.index_sets.front());
      const SigmaSampler sampler(basis);
      const NodeSample nodes = source == "sigma" ? sampler.sample_sigma(m, mix_seed(seed, 0))
                                                 : sampler.sample_mu(m, mix_seed(seed, 0));
      write_text_file(out_path, nodes_csv(nodes));
      std::cout << "wrote " << out_path << "\n";
    } else if (cmd_weights->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const TensorBasis basis(cfg.family, cfg.index_sets.front());
      const SigmaSampler sampler(basis);
      const double delta = delta_flag > 0.0 ? delta_flag : cfg.delta;
      const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
      const DesignSystem sys = build_design(basis, nodes);
      const CubatureRule rule = cubature_weights(sys, nodes, delta);
      write_text_file(out_path, weights_csv(rule));
      ordered_json info;
      info["good_event"] = rule.good_event;
      info["gram_deviation"] = rule.gram_deviation;
      double total = 0.0;
      for (double a : rule.weights) total += a;
      info["weight_sum"] = total;
      if (dump_gram) info.update(gram_json(sys));
      std::cout << info.dump(2) << "\n";
    } else if (cmd_integrate->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const TensorBasis basis(cfg.family, cfg.index_sets.front());
      const SigmaSampler sampler(basis);
      const Integrand f = make_integrand(cfg.integrand_name, cfg.integrand_params, basis);
      const double delta = delta_flag > 0.0 ? delta_flag : cfg.delta;
      if (m == 0) m = min_samples({basis.size(), cfg.r, delta});
      EstimateRecord rec;
      switch (estimator_from_name(estimator)) {
        case EstimatorKind::ls: rec = integrate_ls(sampler, m, delta, seed, f); break;
        case EstimatorKind::conditioned:
          rec = integrate_conditioned(sampler, m, delta, seed, f);
          break;
        case EstimatorKind::control_variate:
          rec = integrate_control_variate(sampler, m, delta, seed, f);
          break;
        case EstimatorKind::monte_carlo: rec = monte_carlo(sampler, m, seed, f); break;
        case EstimatorKind::importance_sampling:
          rec = importance_sampling(sampler, m, seed, f);
          break;
      }
      ordered_json out = record_json(rec);
      if (dump_gram) {
        const NodeSample nodes = sampler.sample_sigma(m, mix_seed(seed, 0));
        out.update(gram_json(build_design(basis, nodes)));
      }
      std::cout << out.dump(2) << "\n";
    } else if (cmd_convergence->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const ConvergenceResult result = run_convergence(cfg);
      const auto paths = write_convergence_outputs(cfg, result, out_path);
      std::cout << "wrote " << paths.first << " and " << paths.second << "\n";
    } else if (cmd_positivity->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      const ordered_json report = run_positivity(cfg);
      if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        write_text_file(out_path, report.dump(2) + "\n");
        std::cout << "wrote " << out_path << "\n";
      }
    } else if (cmd_budget->parsed()) {
      PolynomialFamily family = PolynomialFamily::legendre();
      if (family_name == "chebyshev") family = PolynomialFamily::chebyshev();
      if (family_name == "hermite") family = PolynomialFamily::hermite();
      const ordered_json table = budget_table(parse_size_list(n_raw), parse_double_list(r_raw),
                                              parse_double_list(delta_raw), family);
      if (out_path.empty()) {
        std::cout << table.dump(2) << "\n";
      } else {
        write_text_file(out_path, table.dump(2) + "\n");
        std::cout << "wrote " << out_path << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
