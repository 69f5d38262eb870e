#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cliquemat/graph.hpp"
#include "cliquemat/mean_field.hpp"

namespace cliquemat {

/// Column indicators: alpha_mean[c] = q(alpha_c = 1), with the Beta(a, b)
/// hyperparameters of their shared activation probability.
struct IndicatorState {
  std::vector<double> alpha_mean;
  double a = 1.0;
  double b = 3.0;
};

/// log p(alpha) for a configuration with `n_active` of `c_max` indicators on,
/// B(a + N, b + C_max - N) / B(a, b). N may be fractional.
/// Throws ConfigError when n_active is outside [0, c_max] or a, b <= 0.
double beta_bernoulli_log_prior(double n_active, std::size_t c_max, double a, double b);

/// q(alpha_c = 1) given the other indicators' means and the log-likelihood
/// difference between alpha_c = 1 and alpha_c = 0.
double alpha_posterior(std::size_t c, std::span<const double> alpha_mean, double a, double b,
                       double loglik_gain);

/// Reference O(V^2 C) update of <alpha_c>: the likelihood is evaluated at the
/// mean field with effective entries <alpha_d> * z_mean(i, d) and alpha_c
/// clamped to each state.
double update_alpha(std::size_t c, const Eigen::MatrixXd& z_mean, const IndicatorState& ind,
                    const AdjacencyMatrix& a, double beta);

struct AutoSelectResult {
  CliqueMatrix z;
  IndicatorState indicators;
  VariationalState state;
  /// Indices (into 0..c_max) of the columns kept in z, in order.
  std::vector<std::size_t> retained_columns;
  double log_likelihood = 0.0;
  /// log_likelihood plus the log prior of the retained count; ranks restarts.
  double score = 0.0;
  std::size_t best_restart = 0;
};

/// Alternates one q(Z) epoch with one sweep of alpha updates until both
/// max |delta| fall below config.tol or config.max_epochs is reached. Keeps
/// column c iff <alpha_c> > 0.5 and it rounds to a non-empty column.
AutoSelectResult solve_auto_c(const AdjacencyMatrix& a, std::size_t c_max, double beta,
                              const SolverConfig& config, double prior_a = 1.0,
                              double prior_b = 3.0);

/// Initial indicator mean.
inline constexpr double initial_alpha = 0.9;

}  // namespace cliquemat
