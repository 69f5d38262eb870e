#include "cliquemat/covfit.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cliquemat/errors.hpp"

namespace cliquemat {

WeightedCliqueMatrix::WeightedCliqueMatrix(CliqueMatrix mask, double fill)
    : mask_(std::move(mask)),
      values_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mask_.vertex_count()),
                                    static_cast<Eigen::Index>(mask_.column_count()))) {
  for (Eigen::Index c = 0; c < values_.cols(); ++c)
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
      if (mask_(static_cast<std::size_t>(i), static_cast<std::size_t>(c))) {
        free_.emplace_back(i, c);
        values_(i, c) = fill;
      }
}

WeightedCliqueMatrix::WeightedCliqueMatrix(CliqueMatrix mask, Eigen::MatrixXd values)
    : WeightedCliqueMatrix(std::move(mask), 0.0) {
  if (values.rows() != values_.rows() || values.cols() != values_.cols())
    throw DimensionError("values shape differs from the mask");
  for (Eigen::Index c = 0; c < values.cols(); ++c)
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      if (!mask_(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) && values(i, c) != 0.0)
        throw DimensionError("nonzero value outside the mask");
  values_ = std::move(values);
  values_ += Eigen::MatrixXd::Zero(values_.rows(), values_.cols());  // flush -0.0
}

Eigen::VectorXd WeightedCliqueMatrix::free_values() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k)
    x(static_cast<Eigen::Index>(k)) = values_(free_[k].first, free_[k].second);
  return x;
}

void WeightedCliqueMatrix::set_free_values(const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != free_.size())
    throw DimensionError("wrong number of free values");
  for (std::size_t k = 0; k < free_.size(); ++k)
    values_(free_[k].first, free_[k].second) = x(static_cast<Eigen::Index>(k));
}

Eigen::MatrixXd CovarianceModel::sigma() const { return sigma_from(z_star, ridge); }

Eigen::MatrixXd sigma_from(const WeightedCliqueMatrix& z_star, double ridge) {
  const auto& w = z_star.values();
  const BitMatrix& rows = z_star.mask().row_bits();
  const Eigen::Index v = w.rows();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(v, v);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = i; j < v; ++j) {
      const bool shared =
          w.cols() > 0 && rows.rows_intersect(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (!shared) continue;  // structural zero stays +0.0
      const double x = w.row(i).dot(w.row(j));
      sigma(i, j) = x;
      sigma(j, i) = x;
    }
  sigma.diagonal().array() += ridge;
  return sigma;
}

namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw NumericalError("covariance is not positive definite");
  const auto d = llt.matrixLLT().diagonal();
  if (!(d.array() > 0.0).all() || !d.allFinite())
    throw NumericalError("covariance is not positive definite");
  return llt;
}

double kappa_from(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& s) {
  const double trace = llt.solve(s).trace();
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return trace + logdet;
}

}  // namespace

double kappa(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s) {
  if (sigma.rows() != s.rows() || sigma.cols() != s.cols() || sigma.rows() != sigma.cols())
    throw DimensionError("kappa needs square matrices of equal size");
  return kappa_from(factor(sigma), s);
}

Eigen::MatrixXd kappa_gradient(const WeightedCliqueMatrix& z_star, const Eigen::MatrixXd& s,
                               double ridge) {
  const auto llt = factor(sigma_from(z_star, ridge));
  const Eigen::Index v = s.rows();
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(v, v));
  const Eigen::MatrixXd d_sigma = inv - inv * s * inv;
  Eigen::MatrixXd g = 2.0 * d_sigma * z_star.values();
  for (Eigen::Index c = 0; c < g.cols(); ++c)
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      if (!z_star.mask()(static_cast<std::size_t>(i), static_cast<std::size_t>(c))) g(i, c) = 0.0;
  return g;
}

Eigen::MatrixXd validate_sample_covariance(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0)
    throw NumericalError("sample covariance must be a non-empty square matrix");
  if (!s.allFinite()) throw NumericalError("sample covariance has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw NumericalError("sample covariance is not symmetric");
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  if (!(sym.diagonal().array() > 0.0).all())
    throw NumericalError("sample covariance needs a positive diagonal");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))
    throw NumericalError("sample covariance is not positive semidefinite");
  return sym;
}

double rms_error(const Eigen::MatrixXd& sigma_fit, const Eigen::MatrixXd& s,
                 const AdjacencyMatrix& graph) {
  const std::size_t v = graph.vertex_count();
  if (static_cast<std::size_t>(sigma_fit.rows()) != v || static_cast<std::size_t>(s.rows()) != v ||
      sigma_fit.cols() != sigma_fit.rows() || s.cols() != s.rows())
    throw DimensionError("rms_error: matrix sizes differ from the graph");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = 0; j < v; ++j)
      if (graph(i, j)) {
        const double d = sigma_fit(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                         s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        sum += d * d;
        ++n;
      }
  return std::sqrt(sum / static_cast<double>(n));
}

namespace {

// Cholesky entries of S where a mask column can hold them, small noise
// elsewhere.
WeightedCliqueMatrix initial_factor(const Eigen::MatrixXd& s, const CliqueMatrix& mask,
                                    std::uint64_t seed) {
  const Eigen::Index v = s.rows();
  const Eigen::MatrixXd l =
      Eigen::LLT<Eigen::MatrixXd>(s + 1e-6 * Eigen::MatrixXd::Identity(v, v)).matrixL();
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(v, static_cast<Eigen::Index>(mask.column_count()));
  std::vector<char> used(static_cast<std::size_t>(v), 0);
  for (std::size_t c = 0; c < mask.column_count(); ++c) {
    const auto members = mask.column(c);
    const std::size_t pivot = members.front();
    const bool take = !used[pivot];
    used[pivot] = 1;
    for (std::size_t i : members) {
      const auto ii = static_cast<Eigen::Index>(i);
      values(ii, static_cast<Eigen::Index>(c)) =
          take ? l(ii, static_cast<Eigen::Index>(pivot)) : noise(rng);
    }
  }
  // Zero Cholesky entries would sit at a saddle of the objective.
  for (Eigen::Index c = 0; c < values.cols(); ++c)
    for (Eigen::Index i = 0; i < v; ++i)
      if (mask(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) && values(i, c) == 0.0)
        values(i, c) = noise(rng);
  return WeightedCliqueMatrix(mask, std::move(values));
}

class Objective {
 public:
  Objective(const Eigen::MatrixXd& s, WeightedCliqueMatrix z, double ridge)
      : s_(s), z_(std::move(z)), ridge_(ridge) {}

  // +inf when Sigma is not positive definite.
  double value(const Eigen::VectorXd& x) {
    z_.set_free_values(x);
    try {
      return kappa_from(factor(sigma_from(z_, ridge_)), s_);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) {
    z_.set_free_values(x);
    const Eigen::MatrixXd g = kappa_gradient(z_, s_, ridge_);
    Eigen::VectorXd out(x.size());
    const auto& entries = z_.free_entries();
    for (std::size_t k = 0; k < entries.size(); ++k)
      out(static_cast<Eigen::Index>(k)) = g(entries[k].first, entries[k].second);
    return out;
  }

  WeightedCliqueMatrix& z() { return z_; }

 private:
  const Eigen::MatrixXd& s_;
  WeightedCliqueMatrix z_;
  double ridge_;
};

}  // namespace

std::pair<CovarianceModel, FitReport> fit_covariance(const Eigen::MatrixXd& s_in,
                                                     const AdjacencyMatrix& graph,
                                                     const CliqueMatrix& z_mask,
                                                     const FitConfig& config) {
  const Eigen::MatrixXd s = validate_sample_covariance(s_in);
  const std::size_t v = graph.vertex_count();
  if (static_cast<std::size_t>(s.rows()) != v)
    throw DimensionError("sample covariance size differs from the graph");
  if (z_mask.vertex_count() != v || z_mask.column_count() == 0 ||
      !is_valid_clique_matrix(graph, z_mask))
    throw DimensionError("mask is not a clique matrix for the graph");
  const double ridge = config.ridge.value_or(1e-8 * s.trace() / static_cast<double>(v));
  if (!(ridge >= 0.0)) throw ConfigError("ridge must be nonnegative");

  Objective obj(s,
                config.initial ? WeightedCliqueMatrix(z_mask, *config.initial)
                               : initial_factor(s, z_mask, config.seed),
                ridge);
  Eigen::VectorXd x = obj.z().free_values();
  double f = obj.value(x);
  if (!std::isfinite(f)) {
    // Fall back to a diagonal start; singleton entries are always present
    // in an expanded mask, otherwise every entry gets the same scale.
    x.setConstant(std::sqrt(s.diagonal().mean()));
    f = obj.value(x);
    if (!std::isfinite(f)) throw NumericalError("could not find a positive definite start");
  }
  Eigen::VectorXd g = obj.gradient(x);

  FitReport report;
  report.kappa_trace.push_back(f);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (step, grad change)

  constexpr double armijo = 1e-4;
  std::size_t it = 0;
  for (; it < config.max_iterations; ++it) {
    if (g.norm() < config.tol) break;

    // Two-loop recursion.
    Eigen::VectorXd d = -g;
    if (!history.empty()) {
      std::vector<double> rho(history.size()), coef(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const auto& [sk, yk] = history[k];
        rho[k] = 1.0 / yk.dot(sk);
        coef[k] = rho[k] * sk.dot(d);
        d -= coef[k] * yk;
      }
      const auto& [sl, yl] = history.back();
      d *= sl.dot(yl) / yl.squaredNorm();
      for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& [sk, yk] = history[k];
        const double b = rho[k] * yk.dot(d);
        d += (coef[k] - b) * sk;
      }
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      history.clear();
      d = -g;
      slope = -g.squaredNorm();
    }

    double step = history.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    Eigen::VectorXd x_new;
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 80; ++tries) {
      x_new = x + step * d;
      f_new = obj.value(x_new);
      if (std::isfinite(f_new) && f_new <= f + armijo * step * slope && f_new < f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (history.empty()) break;  // no descent even along -g
      history.clear();
      continue;
    }

    const Eigen::VectorXd g_new = obj.gradient(x_new);
    Eigen::VectorXd sk = x_new - x;
    Eigen::VectorXd yk = g_new - g;
    if (sk.dot(yk) > 1e-12 * sk.norm() * yk.norm()) {
      history.emplace_back(std::move(sk), std::move(yk));
      if (history.size() > config.memory) history.pop_front();
    }
    x = std::move(x_new);
    f = f_new;
    g = g_new;
    report.kappa_trace.push_back(f);
  }

  obj.z().set_free_values(x);
  report.iterations = it;
  report.grad_norm = g.norm();
  report.converged = report.grad_norm < config.tol;
  CovarianceModel model{graph, obj.z(), 0.0};
  double bare = std::numeric_limits<double>::infinity();
  try {
    bare = kappa(model.sigma(), s);
  } catch (const NumericalError&) {
  }
  // An optimum that leans on the ridge keeps it.
  if (!(bare <= f + 1e-6 * (1.0 + std::abs(f)))) model.ridge = ridge;
  report.kappa = kappa(model.sigma(), s);
  return {std::move(model), std::move(report)};
}

CliqueMatrix covariance_mask(const AdjacencyMatrix& graph, const SolverConfig& solver,
                             std::size_t max_columns) {
  CliqueMatrix base;
  if (auto order = perfect_elimination_order(graph)) {
    base = cholesky_pattern_clique_matrix(graph, *order);
  } else {
    const CliqueMatrix incidence = incidence_matrix(graph);
    const ModelParams params{10.0, incidence.column_count()};
    const auto fit = solve_fixed_c(graph, params, solver);
    base = (fit.z.column_count() && is_valid_clique_matrix(graph, fit.z) &&
            columns_are_cliques(graph, fit.z))
               ? dedup_columns(fit.z)
               : incidence;
  }
  try {
    return expand_clique_matrix(base, max_columns);
  } catch (const ExpansionTooLargeError&) {
    // Keep the base columns and add any missing singletons.
    auto cols = base.columns();
    for (std::size_t i = 0; i < graph.vertex_count(); ++i)
      if (std::find(cols.begin(), cols.end(), std::vector<std::size_t>{i}) == cols.end())
        cols.push_back({i});
    return CliqueMatrix::from_columns(graph.vertex_count(), cols);
  }
}

AdjacencyMatrix four_cycle() {
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  return AdjacencyMatrix::from_edges(4, edges);
}

Eigen::MatrixXd draw_four_cycle_covariance(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
  l(0, 0) = normal(rng);
  l(1, 0) = normal(rng);
  l(1, 1) = normal(rng);
  l(2, 0) = normal(rng);
  l(2, 2) = normal(rng);
  l(3, 1) = normal(rng);
  l(3, 2) = normal(rng);
  l(3, 3) = normal(rng);
  l(2, 1) = -l(1, 0) * l(2, 0) / l(1, 1);
  Eigen::MatrixXd s = l * l.transpose();
  s(0, 3) = s(3, 0) = 0.0;
  s(1, 2) = s(2, 1) = 0.0;
  return s;
}

ReplicationResult run_replication(std::uint64_t seed, std::size_t r, const FitConfig& config) {
  const AdjacencyMatrix graph = four_cycle();
  static const CliqueMatrix mask = expand_clique_matrix(incidence_matrix(four_cycle()));
  ReplicationResult out;
  out.seed = split_seed(seed, r);
  Rng rng(out.seed);
  const Eigen::MatrixXd s = draw_four_cycle_covariance(rng);
  FitConfig local = config;
  local.seed = out.seed;
  const auto [model, report] = fit_covariance(s, graph, mask, local);
  out.rms_error = rms_error(model.sigma(), s, graph);
  out.kappa = report.kappa;
  out.converged = report.converged;
  return out;
}

}  // namespace cliquemat
