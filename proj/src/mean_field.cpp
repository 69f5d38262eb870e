#include "cliquemat/mean_field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "cliquemat/errors.hpp"
#include "cliquemat/rng.hpp"

namespace cliquemat {

namespace {

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

// Logistic of a log-odds value.
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Column entries this small change the field by less than the rounding
// noise of the cached sums; their pair terms are skipped.
constexpr double negligible_entry = 1e-12;

}  // namespace

void SolverConfig::validate() const {
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (restarts == 0) throw ConfigError("restarts must be at least 1");
  if (field_mode == FieldMode::gaussian && quadrature_points == 0)
    throw ConfigError("quadrature_points must be positive");
}

double sigma(double x, double beta) { return logistic(beta * (x - 0.5)); }

double log_sigma(double x, double beta) { return -softplus(beta * (0.5 - x)); }

double log_one_minus_sigma(double x, double beta) { return -softplus(beta * (x - 0.5)); }

double log_likelihood(const AdjacencyMatrix& a, const CliqueMatrix& z, double beta) {
  if (a.vertex_count() != z.vertex_count())
    throw DimensionError("clique matrix and graph differ in vertex count");
  const std::size_t v = a.vertex_count();
  const BitMatrix& rows = z.row_bits();
  double ll = 0.0;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) {
      const double overlap = z.column_count() ? static_cast<double>(rows.rows_overlap(i, j)) : 0.0;
      ll += a(i, j) ? log_sigma(overlap, beta) : log_one_minus_sigma(overlap, beta);
    }
  return ll;
}

FieldStats field_stats(const VariationalState& state, std::size_t k, std::size_t j,
                       std::size_t c, bool z_kc) {
  const auto& th = state.theta;
  FieldStats f;
  const double b = z_kc ? 1.0 : 0.0;
  f.mu = b * th(j, c);
  f.var = b * th(j, c) * (1.0 - th(j, c));
  for (Eigen::Index d = 0; d < th.cols(); ++d) {
    if (d == static_cast<Eigen::Index>(c)) continue;
    const double p = th(k, d) * th(j, d);
    f.mu += p;
    f.var += p * (1.0 - p);
  }
  return f;
}

GaussHermite::GaussHermite(std::size_t n) {
  if (n == 0) return;
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Hermite
  // recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k) / 2.0);
    jacobi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = off;
    jacobi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  const double sqrt_pi = std::sqrt(std::acos(-1.0));
  for (std::size_t k = 0; k < n; ++k) {
    nodes.push_back(eig.eigenvalues()(static_cast<Eigen::Index>(k)));
    const double v0 = eig.eigenvectors()(0, static_cast<Eigen::Index>(k));
    weights.push_back(sqrt_pi * v0 * v0);
  }
}

double update_theta(const VariationalState& state, const AdjacencyMatrix& a,
                    const ModelParams& params, std::size_t k, std::size_t c,
                    FieldMode mode, std::size_t quadrature_points) {
  const std::size_t v = a.vertex_count();
  const GaussHermite quad(mode == FieldMode::gaussian ? quadrature_points : 0);
  const double beta = params.beta;
  double log_s[2] = {0.0, 0.0};
  for (int b = 0; b < 2; ++b) {
    for (std::size_t j = 0; j < v; ++j) {
      if (j == k) continue;
      const FieldStats f = field_stats(state, k, j, c, b == 1);
      const bool linked = a(k, j);
      auto term = [&](double x) {
        return linked ? log_sigma(x, beta) : log_one_minus_sigma(x, beta);
      };
      log_s[b] += mode == FieldMode::gaussian ? quad.expect(term, f.mu, f.var) : term(f.mu);
    }
    log_s[b] *= 2.0;
  }
  return logistic(log_s[1] - log_s[0]);
}

CoordinateSolver::CoordinateSolver(const AdjacencyMatrix& a, double beta,
                                   Eigen::MatrixXd theta, std::vector<double> scales,
                                   FieldMode mode, std::size_t quadrature_points)
    : a_(a),
      beta_(beta),
      theta_(std::move(theta)),
      scales_(std::move(scales)),
      mode_(mode),
      quad_(mode == FieldMode::gaussian ? quadrature_points : 0) {
  if (static_cast<std::size_t>(theta_.rows()) != a.vertex_count())
    throw DimensionError("theta rows differ from the vertex count");
  if (scales_.size() != static_cast<std::size_t>(theta_.cols()))
    throw DimensionError("one scale per column required");
  refresh();
}

void CoordinateSolver::refresh() {
  Eigen::VectorXd w(theta_.cols());
  for (Eigen::Index d = 0; d < theta_.cols(); ++d)
    w(d) = scales_[static_cast<std::size_t>(d)] * scales_[static_cast<std::size_t>(d)];
  mean_ = theta_ * w.asDiagonal() * theta_.transpose();
  if (mode_ == FieldMode::gaussian) {
    const Eigen::Index v = theta_.rows();
    var_ = Eigen::MatrixXd::Zero(v, v);
    for (Eigen::Index d = 0; d < theta_.cols(); ++d) {
      const double w2 = w(d) * w(d);
      if (w2 == 0.0) continue;
      for (Eigen::Index i = 0; i < v; ++i)
        for (Eigen::Index j = 0; j < v; ++j) {
          const double p = theta_(i, d) * theta_(j, d);
          var_(i, j) += w2 * p * (1.0 - p);
        }
    }
  }
}

double CoordinateSolver::link_term(bool linked, double mu) const {
  return linked ? log_sigma(mu, beta_) : log_one_minus_sigma(mu, beta_);
}

double CoordinateSolver::link_term(bool linked, double mu, double var) const {
  if (var <= 0.0) return link_term(linked, mu);
  return quad_.expect([&](double x) { return link_term(linked, x); }, mu, var);
}

double CoordinateSolver::update(std::size_t k, std::size_t c) {
  const Eigen::Index kk = static_cast<Eigen::Index>(k);
  const Eigen::Index cc = static_cast<Eigen::Index>(c);
  const Eigen::Index v = theta_.rows();
  const double w = scales_[c] * scales_[c];
  const double old = theta_(kk, cc);
  const bool gaussian = mode_ == FieldMode::gaussian;

  double gain = 0.0;  // log s_1 - log s_0, before the factor 2
  if (w > 0.0) {
    for (Eigen::Index j = 0; j < v; ++j) {
      if (j == kk) continue;
      const double tj = theta_(j, cc);
      if (w * tj <= negligible_entry) continue;
      const bool linked = a_(k, static_cast<std::size_t>(j));
      const double p_old = old * tj;
      const double mu0 = mean_(kk, j) - w * p_old;
      const double mu1 = mu0 + w * tj;
      if (gaussian) {
        const double var0 = std::max(0.0, var_(kk, j) - w * w * p_old * (1.0 - p_old));
        const double var1 = var0 + w * w * tj * (1.0 - tj);
        gain += link_term(linked, mu1, var1) - link_term(linked, mu0, var0);
      } else {
        gain += link_term(linked, mu1) - link_term(linked, mu0);
      }
    }
  }
  const double fresh = logistic(2.0 * gain);
  const double delta = fresh - old;
  if (delta != 0.0) {
    theta_(kk, cc) = fresh;
    for (Eigen::Index j = 0; j < v; ++j) {
      if (j == kk) continue;
      const double tj = theta_(j, cc);
      const double dm = w * delta * tj;
      mean_(kk, j) += dm;
      mean_(j, kk) += dm;
      if (gaussian) {
        const double p_old = old * tj, p_new = fresh * tj;
        const double dv = w * w * (p_new * (1.0 - p_new) - p_old * (1.0 - p_old));
        var_(kk, j) += dv;
        var_(j, kk) += dv;
      }
    }
    // Diagonal entries are never read; keep them consistent anyway.
    mean_(kk, kk) += w * (fresh * fresh - old * old);
  }
  return std::abs(delta);
}

double CoordinateSolver::column_switch_gain(std::size_t c) const {
  const Eigen::Index cc = static_cast<Eigen::Index>(c);
  const Eigen::Index v = theta_.rows();
  const double w = scales_[c] * scales_[c];
  std::vector<Eigen::Index> live;
  for (Eigen::Index i = 0; i < v; ++i)
    if (theta_(i, cc) > negligible_entry) live.push_back(i);
  double gain = 0.0;
  for (std::size_t x = 0; x < live.size(); ++x)
    for (std::size_t y = x + 1; y < live.size(); ++y) {
      const Eigen::Index i = live[x], j = live[y];
      const double p = theta_(i, cc) * theta_(j, cc);
      const double off = mean_(i, j) - w * p;
      const bool linked = a_(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      gain += link_term(linked, off + p) - link_term(linked, off);
    }
  return gain;
}

void CoordinateSolver::set_scale(std::size_t c, double scale) {
  const Eigen::Index cc = static_cast<Eigen::Index>(c);
  const double w_old = scales_[c] * scales_[c];
  const double w_new = scale * scale;
  scales_[c] = scale;
  if (w_old == w_new) return;
  const Eigen::VectorXd col = theta_.col(cc);
  mean_.noalias() += (w_new - w_old) * col * col.transpose();
  if (mode_ == FieldMode::gaussian) {
    const Eigen::Index v = theta_.rows();
    for (Eigen::Index i = 0; i < v; ++i)
      for (Eigen::Index j = 0; j < v; ++j) {
        const double p = col(i) * col(j);
        var_(i, j) += (w_new * w_new - w_old * w_old) * p * (1.0 - p);
      }
  }
}

double run_epoch(CoordinateSolver& solver, std::uint64_t seed, std::size_t epoch) {
  const std::size_t v = solver.vertex_count();
  const std::size_t c = solver.column_count();
  std::vector<std::size_t> order(v * c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, epoch + 1);
  std::shuffle(order.begin(), order.end(), rng);
  double max_delta = 0.0;
  for (std::size_t idx : order) max_delta = std::max(max_delta, solver.update(idx % v, idx / v));
  return max_delta;
}

EpochResult run_epoch(VariationalState state, const AdjacencyMatrix& a,
                      const ModelParams& params, const SolverConfig& config) {
  CoordinateSolver solver(a, params.beta, std::move(state.theta),
                          std::vector<double>(static_cast<std::size_t>(params.columns), 1.0),
                          config.field_mode, config.quadrature_points);
  EpochResult out;
  out.max_delta = run_epoch(solver, config.seed, state.epoch);
  out.state.theta = solver.theta();
  out.state.epoch = state.epoch + 1;
  out.state.converged = out.max_delta < config.tol;
  return out;
}

VariationalState initial_state(std::size_t v, std::size_t c, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> u(0.25, 0.75);
  VariationalState s;
  s.theta.resize(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(c));
  for (Eigen::Index d = 0; d < s.theta.cols(); ++d)
    for (Eigen::Index i = 0; i < s.theta.rows(); ++i) s.theta(i, d) = u(rng);
  return s;
}

CliqueMatrix round_theta(const Eigen::MatrixXd& theta) {
  std::vector<std::vector<std::size_t>> cols;
  for (Eigen::Index d = 0; d < theta.cols(); ++d) {
    std::vector<std::size_t> members;
    for (Eigen::Index i = 0; i < theta.rows(); ++i)
      if (theta(i, d) > 0.5) members.push_back(static_cast<std::size_t>(i));
    if (!members.empty()) cols.push_back(std::move(members));
  }
  return CliqueMatrix::from_columns(static_cast<std::size_t>(theta.rows()), cols);
}

namespace detail {

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = next++; i < n; i = next++) task(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

FixedCResult solve_fixed_c(const AdjacencyMatrix& a, const ModelParams& params,
                           const SolverConfig& config) {
  config.validate();
  if (!(params.beta > 0.0)) throw ConfigError("beta must be positive");
  if (params.columns == 0) throw ConfigError("column count must be at least 1");

  const std::size_t v = a.vertex_count();
  std::vector<FixedCResult> runs(config.restarts);
  detail::parallel_for(config.restarts, config.threads, [&](std::size_t r) {
    SolverConfig local = config;
    local.seed = split_seed(config.seed, r);
    VariationalState init = initial_state(v, params.columns, local.seed);
    CoordinateSolver solver(a, params.beta, std::move(init.theta),
                            std::vector<double>(params.columns, 1.0), config.field_mode,
                            config.quadrature_points);
    VariationalState state;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
      if (epoch) solver.refresh();
      const double delta = run_epoch(solver, local.seed, epoch);
      state.epoch = epoch + 1;
      if (delta < config.tol) {
        state.converged = true;
        break;
      }
    }
    state.theta = solver.theta();
    FixedCResult& out = runs[r];
    out.z = round_theta(state.theta);
    out.log_likelihood = log_likelihood(a, out.z, params.beta);
    out.state = std::move(state);
    out.best_restart = r;
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].log_likelihood > runs[best].log_likelihood) best = r;
  return std::move(runs[best]);
}

}  // namespace cliquemat
