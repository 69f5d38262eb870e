#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cliquemat/covfit.hpp"
#include "cliquemat/errors.hpp"
#include "cliquemat/graph.hpp"
#include "cliquemat/mean_field.hpp"
#include "cliquemat/model_select.hpp"

namespace py = pybind11;
using namespace cliquemat;

namespace {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<std::vector<int>> rows_of(const IntMatrix& m) {
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows[static_cast<std::size_t>(i)].assign(m.row(i).data(), m.row(i).data() + m.cols());
  return rows;
}

AdjacencyMatrix to_graph(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("adjacency matrix must be square");
  return AdjacencyMatrix::from_dense(rows_of(a));
}

CliqueMatrix to_cliques(const IntMatrix& z) {
  if (z.cols() == 0) return CliqueMatrix::from_columns(static_cast<std::size_t>(z.rows()), {});
  return CliqueMatrix::from_dense(rows_of(z));
}

IntMatrix from_graph(const AdjacencyMatrix& a) {
  const auto v = static_cast<Eigen::Index>(a.vertex_count());
  IntMatrix m(v, v);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = 0; j < v; ++j) m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

IntMatrix from_cliques(const CliqueMatrix& z) {
  IntMatrix m(static_cast<Eigen::Index>(z.vertex_count()), static_cast<Eigen::Index>(z.column_count()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(i, c) = z(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
  return m;
}

FieldMode parse_field(const std::string& name) {
  if (name == "zero") return FieldMode::zero_variance;
  if (name == "gaussian") return FieldMode::gaussian;
  throw ConfigError("field must be 'zero' or 'gaussian'");
}

SolverConfig solver_config(std::size_t restarts, std::uint64_t seed, double tol, std::size_t max_epochs,
                           const std::string& field, std::size_t threads) {
  SolverConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  cfg.tol = tol;
  cfg.max_epochs = max_epochs;
  cfg.field_mode = parse_field(field);
  cfg.threads = threads;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clique matrix decomposition and constrained covariance fitting.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<NotDecomposableError>(m, "NotDecomposableError", error.ptr());
  py::register_exception<ExpansionTooLargeError>(m, "ExpansionTooLargeError", error.ptr());

  m.def("incidence_matrix", [](const IntMatrix& a) { return from_cliques(incidence_matrix(to_graph(a))); },
        py::arg("adjacency"));
  m.def("heaviside_reconstruct", [](const IntMatrix& z) { return from_graph(heaviside_reconstruct(to_cliques(z))); },
        py::arg("z"));
  m.def("is_valid_clique_matrix",
        [](const IntMatrix& a, const IntMatrix& z) { return is_valid_clique_matrix(to_graph(a), to_cliques(z)); },
        py::arg("adjacency"), py::arg("z"));
  m.def("log_likelihood",
        [](const IntMatrix& a, const IntMatrix& z, double beta) {
          return log_likelihood(to_graph(a), to_cliques(z), beta);
        },
        py::arg("adjacency"), py::arg("z"), py::arg("beta") = 10.0);

  m.def("solve_fixed_c",
        [](const IntMatrix& a, std::size_t columns, double beta, std::size_t restarts, std::uint64_t seed,
           double tol, std::size_t max_epochs, const std::string& field, std::size_t threads) {
          const auto cfg = solver_config(restarts, seed, tol, max_epochs, field, threads);
          FixedCResult r;
          {
            py::gil_scoped_release release;
            r = solve_fixed_c(to_graph(a), {beta, columns}, cfg);
          }
          py::dict out;
          out["z"] = from_cliques(r.z);
          out["theta"] = r.state.theta;
          out["log_likelihood"] = r.log_likelihood;
          out["epochs"] = r.state.epoch;
          out["converged"] = r.state.converged;
          out["best_restart"] = r.best_restart;
          return out;
        },
        py::arg("adjacency"), py::arg("columns"), py::arg("beta") = 10.0, py::arg("restarts") = 1,
        py::arg("seed") = 0, py::arg("tol") = 1e-4, py::arg("max_epochs") = 100, py::arg("field") = "zero",
        py::arg("threads") = 0);

  m.def("solve_auto_c",
        [](const IntMatrix& a, std::size_t c_max, double beta, double prior_a, double prior_b,
           std::size_t restarts, std::uint64_t seed, double tol, std::size_t max_epochs, const std::string& field,
           std::size_t threads) {
          const auto cfg = solver_config(restarts, seed, tol, max_epochs, field, threads);
          AutoSelectResult r;
          {
            py::gil_scoped_release release;
            r = solve_auto_c(to_graph(a), c_max, beta, cfg, prior_a, prior_b);
          }
          py::dict out;
          out["z"] = from_cliques(r.z);
          out["theta"] = r.state.theta;
          out["alpha"] = r.indicators.alpha_mean;
          out["retained_columns"] = r.retained_columns;
          out["log_likelihood"] = r.log_likelihood;
          out["score"] = r.score;
          out["epochs"] = r.state.epoch;
          out["converged"] = r.state.converged;
          return out;
        },
        py::arg("adjacency"), py::arg("c_max"), py::arg("beta") = 10.0, py::arg("a") = 1.0, py::arg("b") = 3.0,
        py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("tol") = 1e-4, py::arg("max_epochs") = 100,
        py::arg("field") = "zero", py::arg("threads") = 0);

  m.def("beta_bernoulli_log_prior", &beta_bernoulli_log_prior, py::arg("n_active"), py::arg("c_max"),
        py::arg("a") = 1.0, py::arg("b") = 3.0);

  m.def("expand_clique_matrix",
        [](const IntMatrix& z, std::size_t max_columns) {
          return from_cliques(expand_clique_matrix(to_cliques(z), max_columns));
        },
        py::arg("z"), py::arg("max_columns") = 4096);

  m.def("perfect_elimination_order",
        [](const IntMatrix& a) { return perfect_elimination_order(to_graph(a)); }, py::arg("adjacency"));

  m.def("covariance_mask",
        [](const IntMatrix& a, std::size_t restarts, std::uint64_t seed, std::size_t max_columns) {
          SolverConfig cfg;
          cfg.restarts = restarts;
          cfg.seed = seed;
          return from_cliques(covariance_mask(to_graph(a), cfg, max_columns));
        },
        py::arg("adjacency"), py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("max_columns") = 4096);

  m.def("kappa", &kappa, py::arg("sigma"), py::arg("s"));

  m.def("fit_covariance",
        [](const Eigen::MatrixXd& s, const IntMatrix& a, const IntMatrix& mask, std::size_t max_iterations,
           double tol, std::uint64_t seed, std::optional<double> ridge) {
          FitConfig cfg;
          cfg.max_iterations = max_iterations;
          cfg.tol = tol;
          cfg.seed = seed;
          cfg.ridge = ridge;
          const auto graph = to_graph(a);
          std::optional<std::pair<CovarianceModel, FitReport>> fit;
          {
            py::gil_scoped_release release;
            fit.emplace(fit_covariance(s, graph, to_cliques(mask), cfg));
          }
          const auto& [model, report] = *fit;
          py::dict out;
          out["sigma"] = model.sigma();
          out["z_star"] = model.z_star.values();
          out["ridge"] = model.ridge;
          out["kappa"] = report.kappa;
          out["iterations"] = report.iterations;
          out["converged"] = report.converged;
          out["grad_norm"] = report.grad_norm;
          out["rms_error"] = rms_error(model.sigma(), s, graph);
          return out;
        },
        py::arg("s"), py::arg("adjacency"), py::arg("mask"), py::arg("max_iterations") = 10000,
        py::arg("tol") = 1e-6, py::arg("seed") = 0, py::arg("ridge") = py::none());

  m.def("rms_error",
        [](const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& s, const IntMatrix& a) {
          return rms_error(sigma, s, to_graph(a));
        },
        py::arg("sigma_fit"), py::arg("s"), py::arg("adjacency"));

  m.def("four_cycle", [] { return from_graph(four_cycle()); });

  m.def("run_replication",
        [](std::uint64_t seed, std::size_t r) {
          const auto out = run_replication(seed, r);
          py::dict d;
          d["seed"] = out.seed;
          d["rms_error"] = out.rms_error;
          d["kappa"] = out.kappa;
          d["converged"] = out.converged;
          return d;
        },
        py::arg("seed"), py::arg("replication"));
}
