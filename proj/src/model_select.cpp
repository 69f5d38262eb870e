#include "cliquemat/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cliquemat/errors.hpp"
#include "cliquemat/rng.hpp"

namespace cliquemat {

namespace {

double log_beta_fn(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double beta_bernoulli_log_prior(double n_active, std::size_t c_max, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("Beta hyperparameters must be positive");
  const double cm = static_cast<double>(c_max);
  // Tolerate rounding from sums of fractional indicator means.
  constexpr double slack = 1e-9;
  if (!(n_active >= -slack) || !(n_active <= cm + slack))
    throw ConfigError("active count " + std::to_string(n_active) + " outside [0, " +
                      std::to_string(c_max) + "]");
  n_active = std::clamp(n_active, 0.0, cm);
  return log_beta_fn(a + n_active, b + cm - n_active) - log_beta_fn(a, b);
}

double alpha_posterior(std::size_t c, std::span<const double> alpha_mean, double a, double b,
                       double loglik_gain) {
  double others = 0.0;
  for (std::size_t d = 0; d < alpha_mean.size(); ++d)
    if (d != c) others += alpha_mean[d];
  const std::size_t c_max = alpha_mean.size();
  const double log_w1 = beta_bernoulli_log_prior(others + 1.0, c_max, a, b) + loglik_gain;
  const double log_w0 = beta_bernoulli_log_prior(others, c_max, a, b);
  return logistic(log_w1 - log_w0);
}

double update_alpha(std::size_t c, const Eigen::MatrixXd& z_mean, const IndicatorState& ind,
                    const AdjacencyMatrix& a, double beta) {
  const Eigen::Index v = z_mean.rows();
  const Eigen::Index cols = z_mean.cols();
  if (static_cast<std::size_t>(v) != a.vertex_count() ||
      static_cast<std::size_t>(cols) != ind.alpha_mean.size())
    throw DimensionError("z_mean, indicators and graph disagree in size");
  const Eigen::Index cc = static_cast<Eigen::Index>(c);
  double ll[2] = {0.0, 0.0};
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = i + 1; j < v; ++j) {
      double off = 0.0;
      for (Eigen::Index d = 0; d < cols; ++d) {
        if (d == cc) continue;
        const double s = ind.alpha_mean[static_cast<std::size_t>(d)];
        off += (s * z_mean(i, d)) * (s * z_mean(j, d));
      }
      const bool linked = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      for (int state = 0; state < 2; ++state) {
        const double mu = off + state * z_mean(i, cc) * z_mean(j, cc);
        ll[state] += linked ? log_sigma(mu, beta) : log_one_minus_sigma(mu, beta);
      }
    }
  return alpha_posterior(c, ind.alpha_mean, ind.a, ind.b, ll[1] - ll[0]);
}

AutoSelectResult solve_auto_c(const AdjacencyMatrix& a, std::size_t c_max, double beta,
                              const SolverConfig& config, double prior_a, double prior_b) {
  config.validate();
  if (c_max == 0) throw ConfigError("c_max must be at least 1");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(prior_a > 0.0) || !(prior_b > 0.0))
    throw ConfigError("Beta hyperparameters must be positive");

  const std::size_t v = a.vertex_count();
  std::vector<AutoSelectResult> runs(config.restarts);
  detail::parallel_for(config.restarts, config.threads, [&](std::size_t r) {
    const std::uint64_t seed = split_seed(config.seed, r);
    VariationalState init = initial_state(v, c_max, seed);
    CoordinateSolver solver(a, beta, std::move(init.theta),
                            std::vector<double>(c_max, initial_alpha), config.field_mode,
                            config.quadrature_points);
    std::vector<double> alpha(c_max, initial_alpha);
    VariationalState state;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
      if (epoch) solver.refresh();
      const double d_theta = run_epoch(solver, seed, epoch);
      double d_alpha = 0.0;
      for (std::size_t c = 0; c < c_max; ++c) {
        const double fresh =
            alpha_posterior(c, alpha, prior_a, prior_b, solver.column_switch_gain(c));
        d_alpha = std::max(d_alpha, std::abs(fresh - alpha[c]));
        alpha[c] = fresh;
        solver.set_scale(c, fresh);
      }
      state.epoch = epoch + 1;
      if (d_theta < config.tol && d_alpha < config.tol) {
        state.converged = true;
        break;
      }
    }
    state.theta = solver.theta();

    AutoSelectResult& out = runs[r];
    std::vector<std::vector<std::size_t>> cols;
    for (std::size_t c = 0; c < c_max; ++c) {
      if (!(alpha[c] > 0.5)) continue;
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < v; ++i)
        if (state.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) > 0.5)
          members.push_back(i);
      if (members.empty()) continue;
      cols.push_back(std::move(members));
      out.retained_columns.push_back(c);
    }
    out.z = CliqueMatrix::from_columns(v, cols);
    out.indicators = IndicatorState{std::move(alpha), prior_a, prior_b};
    out.log_likelihood = log_likelihood(a, out.z, beta);
    out.score = out.log_likelihood +
                beta_bernoulli_log_prior(static_cast<double>(out.retained_columns.size()), c_max,
                                         prior_a, prior_b);
    out.state = std::move(state);
    out.best_restart = r;
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].score > runs[best].score) best = r;
  return std::move(runs[best]);
}

}  // namespace cliquemat
