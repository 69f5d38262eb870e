#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cliquemat/graph.hpp"
#include "cliquemat/mean_field.hpp"
#include "cliquemat/rng.hpp"

namespace cliquemat {

/// Real-valued Z* sharing the support of a clique matrix; entries outside
/// the mask are exactly zero.
class WeightedCliqueMatrix {
 public:
  /// Free entries initialised to `fill`.
  explicit WeightedCliqueMatrix(CliqueMatrix mask, double fill = 1.0);
  /// Throws DimensionError if `values` has the wrong shape or is nonzero
  /// outside the mask.
  WeightedCliqueMatrix(CliqueMatrix mask, Eigen::MatrixXd values);

  const CliqueMatrix& mask() const noexcept { return mask_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  std::size_t free_count() const noexcept { return free_.size(); }
  /// Free entries in column-major order of the mask.
  Eigen::VectorXd free_values() const;
  void set_free_values(const Eigen::VectorXd& x);
  /// (row, column) of each free entry, matching free_values().
  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& free_entries() const noexcept {
    return free_;
  }

 private:
  CliqueMatrix mask_;
  Eigen::MatrixXd values_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free_;
};

struct CovarianceModel {
  AdjacencyMatrix graph;
  WeightedCliqueMatrix z_star;
  double ridge = 0.0;

  Eigen::MatrixXd sigma() const;
};

struct FitReport {
  double kappa = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  /// Objective after each accepted step, starting with the initial value.
  std::vector<double> kappa_trace;
};

struct FitConfig {
  std::size_t max_iterations = 10000;
  /// Stop when the gradient norm over free entries falls below this.
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Ridge used during optimisation; default 1e-8 * trace(S) / V.
  std::optional<double> ridge;
  /// L-BFGS history length; 0 gives plain steepest descent.
  std::size_t memory = 10;
  /// Starting Z* (V x C, zero outside the mask); replaces the Cholesky start.
  std::optional<Eigen::MatrixXd> initial;
};

/// Original columns followed by every distinct non-empty proper sub-column,
/// ordered by decreasing size then lexicographically by member list.
/// Throws ExpansionTooLargeError when the total would exceed max_columns.
CliqueMatrix expand_clique_matrix(const CliqueMatrix& z, std::size_t max_columns = 4096);

/// Elimination order (first eliminated first) from maximum cardinality
/// search, or nullopt if the graph is not chordal.
std::optional<std::vector<std::size_t>> perfect_elimination_order(const AdjacencyMatrix& a);

/// True iff the later neighbours of every vertex form a clique.
bool is_perfect_elimination_order(const AdjacencyMatrix& a, std::span<const std::size_t> order);

/// Lower-triangular pattern of A: column j holds {i >= j : A_ij = 1}.
/// Requires the identity order to be a perfect elimination order; throws
/// NotDecomposableError otherwise.
CliqueMatrix cholesky_pattern_clique_matrix(const AdjacencyMatrix& a);

/// Same pattern for the elimination order `order`, expressed in the
/// original vertex labels.
CliqueMatrix cholesky_pattern_clique_matrix(const AdjacencyMatrix& a,
                                            std::span<const std::size_t> order);

/// Z* Z*^T + ridge I, with exact zeros wherever two rows share no mask column.
Eigen::MatrixXd sigma_from(const WeightedCliqueMatrix& z_star, double ridge);

/// Tr(Sigma^{-1} S) + log det Sigma via a Cholesky factorisation.
/// Throws NumericalError when sigma is not positive definite.
double kappa(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s);

/// d kappa / d Z* = 2 (Sigma^{-1} - Sigma^{-1} S Sigma^{-1}) Z*, zero outside
/// the mask.
Eigen::MatrixXd kappa_gradient(const WeightedCliqueMatrix& z_star, const Eigen::MatrixXd& s,
                               double ridge);

/// Checks symmetry (tolerance 1e-9), positive diagonal and positive
/// semidefiniteness; returns the symmetrised matrix. Throws NumericalError.
Eigen::MatrixXd validate_sample_covariance(const Eigen::MatrixXd& s);

/// Minimises kappa over the free entries of Z* with L-BFGS and Armijo
/// backtracking. The returned model has ridge 0 unless dropping the ridge
/// would raise kappa above the optimised value, in which case it keeps the
/// optimisation ridge. Throws DimensionError
/// when the mask is not a clique matrix for `graph`, NumericalError for an
/// invalid S.
std::pair<CovarianceModel, FitReport> fit_covariance(const Eigen::MatrixXd& s,
                                                     const AdjacencyMatrix& graph,
                                                     const CliqueMatrix& z_mask,
                                                     const FitConfig& config = {});

/// RMS of sigma_fit - s over entries with A_ij = 1, diagonal included.
double rms_error(const Eigen::MatrixXd& sigma_fit, const Eigen::MatrixXd& s,
                 const AdjacencyMatrix& graph);

/// Mask for fitting a graph: a chordal graph gets its Cholesky pattern in a
/// perfect elimination order; otherwise the mean-field solver proposes a
/// clique matrix (falling back to the incidence matrix when its rounding
/// does not reconstruct the graph). The result is deduplicated and expanded
/// up to `max_columns`.
CliqueMatrix covariance_mask(const AdjacencyMatrix& graph, const SolverConfig& solver,
                             std::size_t max_columns = 4096);

// The four-cycle 1-2, 1-3, 2-4, 3-4 (0-indexed 0-1, 0-2, 1-3, 2-3) and the
// covariance replication experiment on it.

AdjacencyMatrix four_cycle();

/// S = L L^T with L lower triangular on the four-cycle pattern, entries
/// standard normal except L(2,1), which is solved from
/// L(1,0) L(2,0) + L(1,1) L(2,1) = 0 so that S(1,2) = 0.
Eigen::MatrixXd draw_four_cycle_covariance(Rng& rng);

struct ReplicationResult {
  std::uint64_t seed = 0;
  double rms_error = 0.0;
  double kappa = 0.0;
  bool converged = false;
};

/// Replication r draws S from split_seed(seed, r) and fits the 4 x 8
/// expanded incidence mask.
ReplicationResult run_replication(std::uint64_t seed, std::size_t r, const FitConfig& config = {});

}  // namespace cliquemat
