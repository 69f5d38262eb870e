#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cliquemat/graph.hpp"

namespace cliquemat {

/// Likelihood steepness and column count of the fixed-C problem.
struct ModelParams {
  double beta = 10.0;
  std::size_t columns = 1;
};

enum class FieldMode {
  /// Evaluate the link log-likelihoods at the field mean.
  zero_variance,
  /// Average them over a Gaussian field by Gauss-Hermite quadrature.
  gaussian,
};

struct SolverConfig {
  std::size_t max_epochs = 100;
  /// Convergence threshold on max |delta theta| over one epoch.
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  FieldMode field_mode = FieldMode::zero_variance;
  std::size_t quadrature_points = 20;
  /// Worker threads for independent restarts; 0 picks hardware concurrency.
  std::size_t threads = 0;

  /// Throws ConfigError on an out-of-range field.
  void validate() const;
};

/// Factorised posterior: theta(i, c) = q(z_ic = 1).
struct VariationalState {
  Eigen::MatrixXd theta;
  std::size_t epoch = 0;
  bool converged = false;
};

struct FieldStats {
  double mu = 0.0;
  double var = 0.0;
};

/// Shifted logistic 1 / (1 + exp(beta (0.5 - x))).
double sigma(double x, double beta);
/// log sigma(x), stable for large |beta x|.
double log_sigma(double x, double beta);
/// log(1 - sigma(x)), stable for large |beta x|.
double log_one_minus_sigma(double x, double beta);

/// Sum over pairs i < j of log sigma(z_i . z_j) for links and
/// log(1 - sigma(z_i . z_j)) for non-links. The diagonal is ignored.
double log_likelihood(const AdjacencyMatrix& a, const CliqueMatrix& z, double beta);

/// Mean and variance of sum_d z_kd z_jd under q with z_kc clamped.
FieldStats field_stats(const VariationalState& state, std::size_t k, std::size_t j,
                       std::size_t c, bool z_kc);

/// New theta(k, c) from a full O(VC) evaluation of the two clamped states.
/// The solver uses a cached equivalent; this is the reference form.
double update_theta(const VariationalState& state, const AdjacencyMatrix& a,
                    const ModelParams& params, std::size_t k, std::size_t c,
                    FieldMode mode, std::size_t quadrature_points = 20);

/// Gauss-Hermite nodes and weights for the weight exp(-x^2).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussHermite(std::size_t n);
  /// E[g(x)] for x ~ N(mu, var).
  template <class F>
  double expect(F&& g, double mu, double var) const {
    const double scale = std::sqrt(2.0 * var);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * g(mu + scale * nodes[i]);
    return s * 0.5641895835477562869;  // 1 / sqrt(pi)
  }
};

/// Incremental coordinate-ascent engine over theta.
///
/// Column d carries a scale s_d that multiplies every entry of that column
/// (s_d = 1 for the fixed-C problem, <alpha_d> for automatic selection), so
/// the field between rows k and j is sum_d s_d^2 z_kd z_jd. Pairwise sums of
/// the field mean (and variance, in gaussian mode) are cached so a single
/// coordinate update costs O(V).
class CoordinateSolver {
 public:
  CoordinateSolver(const AdjacencyMatrix& a, double beta, Eigen::MatrixXd theta,
                   std::vector<double> scales, FieldMode mode,
                   std::size_t quadrature_points = 20);

  /// Updates theta(k, c) in place; returns |change|.
  double update(std::size_t k, std::size_t c);

  /// Log-likelihood at the mean field with column c's scale set to 1 minus
  /// the same with it set to 0; every other column keeps its scale.
  double column_switch_gain(std::size_t c) const;

  void set_scale(std::size_t c, double scale);
  double scale(std::size_t c) const { return scales_[c]; }

  const Eigen::MatrixXd& theta() const noexcept { return theta_; }
  std::size_t vertex_count() const noexcept { return static_cast<std::size_t>(theta_.rows()); }
  std::size_t column_count() const noexcept { return static_cast<std::size_t>(theta_.cols()); }

  /// Recomputes the caches from theta (drops accumulated rounding).
  void refresh();

 private:
  double link_term(bool linked, double mu) const;
  double link_term(bool linked, double mu, double var) const;

  const AdjacencyMatrix& a_;
  double beta_;
  Eigen::MatrixXd theta_;
  std::vector<double> scales_;
  FieldMode mode_;
  GaussHermite quad_;
  Eigen::MatrixXd mean_;  // sum_d s_d^2 theta_kd theta_jd
  Eigen::MatrixXd var_;   // sum_d s_d^4 p_d (1 - p_d), gaussian mode only
};

/// Result of one epoch.
struct EpochResult {
  VariationalState state;
  double max_delta = 0.0;
};

/// Updates all V*C coordinates once in a random order drawn from
/// (config.seed, state.epoch).
EpochResult run_epoch(VariationalState state, const AdjacencyMatrix& a,
                      const ModelParams& params, const SolverConfig& config);

/// One epoch over an existing engine; the visiting order depends only on
/// (seed, epoch). Returns the largest |delta theta|.
double run_epoch(CoordinateSolver& solver, std::uint64_t seed, std::size_t epoch);

/// Theta drawn uniformly from [0.25, 0.75].
VariationalState initial_state(std::size_t v, std::size_t c, std::uint64_t seed);

/// z_ic = 1 iff theta(i, c) > 0.5, all-zero columns dropped.
CliqueMatrix round_theta(const Eigen::MatrixXd& theta);

struct FixedCResult {
  CliqueMatrix z;
  VariationalState state;
  double log_likelihood = 0.0;
  std::size_t best_restart = 0;
};

/// Best of config.restarts independent coordinate-ascent runs, ranked by
/// the log-likelihood of the rounded Z.
FixedCResult solve_fixed_c(const AdjacencyMatrix& a, const ModelParams& params,
                           const SolverConfig& config);

namespace detail {
/// Runs `task(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& task);
}  // namespace detail

}  // namespace cliquemat
