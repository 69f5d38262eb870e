#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cliquemat/covfit.hpp"
#include "cliquemat/errors.hpp"
#include "cliquemat/graph_io.hpp"
#include "cliquemat/matrix_io.hpp"
#include "cliquemat/model_select.hpp"

namespace cliquemat::cli {

namespace {

using json = nlohmann::json;

struct Options {
  std::string input;
  std::string format;
  std::string mask;
  std::string cov;
  std::string out_dir = ".";
  std::size_t c = 0;
  std::size_t cmax = 0;
  double beta = 10.0;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  double tol = 1e-4;
  std::size_t max_epochs = 100;
  std::string field = "zero";
  double a = 1.0;
  double b = 3.0;
  std::size_t max_columns = 4096;
  std::size_t replications = 1000;
  std::size_t threads = 0;
  double fit_tol = 1e-6;
  std::size_t max_iterations = 10000;
};

// Files are collected here and only written after the command succeeds.
using Outputs = std::vector<std::pair<std::string, std::string>>;

GraphFormat resolve_format(const Options& o) {
  if (!o.format.empty()) return parse_graph_format(o.format);
  const std::string ext = std::filesystem::path(o.input).extension().string();
  if (ext == ".gml") return GraphFormat::gml;
  if (ext == ".clq" || ext == ".col" || ext == ".dimacs") return GraphFormat::dimacs;
  return GraphFormat::edgelist;
}

GraphFile load_graph(const Options& o) {
  if (o.input.empty()) throw ConfigError("--input is required");
  return read_graph_file(o.input, resolve_format(o));
}

CliqueMatrix load_mask(const std::string& path, std::optional<std::size_t> v) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_clique_matrix(in, v);
}

SolverConfig solver_config(const Options& o) {
  SolverConfig s;
  s.max_epochs = o.max_epochs;
  s.tol = o.tol;
  s.seed = o.seed;
  s.restarts = o.restarts;
  s.field_mode = o.field == "gaussian" ? FieldMode::gaussian : FieldMode::zero_variance;
  s.threads = o.threads;
  s.validate();
  return s;
}

json solver_json(const Options& o) {
  return {{"beta", o.beta},         {"seed", o.seed},         {"restarts", o.restarts},
          {"tol", o.tol},           {"max_epochs", o.max_epochs}, {"field", o.field}};
}

json stats_json(const GraphStats& s) {
  json hist = json::object();
  for (const auto& [size, count] : s.size_histogram) hist[std::to_string(size)] = count;
  return {{"vertex_count", s.vertex_count},
          {"edge_count", s.edge_count},
          {"clique_count", s.clique_count},
          {"size_histogram", hist},
          {"max_clique_size", s.max_clique_size()},
          {"reconstruction_exact", s.reconstruction_exact}};
}

std::string histogram_csv(const GraphStats& s) {
  std::ostringstream out;
  out << "size,count,log2_count_plus_1\n";
  for (const auto& [size, count] : s.size_histogram)
    out << size << ',' << count << ',' << json(std::log2(static_cast<double>(count) + 1.0)).dump()
        << '\n';
  return out.str();
}

void add_clique_files(Outputs& files, const CliqueMatrix& z, const GraphFile* g) {
  std::ostringstream sparse, csv;
  const auto* ann = g && !g->annotations.empty() ? &g->annotations : nullptr;
  write_clique_matrix_sparse(sparse, z, ann);
  write_clique_matrix_csv(csv, z);
  files.emplace_back("cliques.txt", sparse.str());
  files.emplace_back("cliques.csv", csv.str());
}

Outputs cmd_decompose(const Options& o) {
  const SolverConfig solver = solver_config(o);
  const ModelParams params{o.beta, o.c};
  const GraphFile g = load_graph(o);
  const FixedCResult r = solve_fixed_c(g.adjacency, params, solver);
  const GraphStats s = stats(g.adjacency, r.z);

  json report = stats_json(s);
  report["command"] = "decompose";
  report["columns_are_cliques"] = columns_are_cliques(g.adjacency, r.z);
  report["log_likelihood"] = r.log_likelihood;
  report["converged"] = r.state.converged;
  report["epochs"] = r.state.epoch;
  report["best_restart"] = r.best_restart;
  report["config"] = solver_json(o);
  report["config"]["c"] = o.c;

  Outputs files;
  add_clique_files(files, r.z, &g);
  files.emplace_back("stats.json", report.dump(2) + "\n");
  files.emplace_back("histogram.csv", histogram_csv(s));
  return files;
}

Outputs cmd_select(const Options& o) {
  const SolverConfig solver = solver_config(o);
  if (o.cmax == 0) throw ConfigError("--cmax must be at least 1");
  if (!(o.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(o.a > 0.0) || !(o.b > 0.0)) throw ConfigError("--a and --b must be positive");
  const GraphFile g = load_graph(o);
  const AutoSelectResult r = solve_auto_c(g.adjacency, o.cmax, o.beta, solver, o.a, o.b);
  const GraphStats s = stats(g.adjacency, r.z);

  json report = stats_json(s);
  report["command"] = "select";
  report["columns_are_cliques"] = columns_are_cliques(g.adjacency, r.z);
  report["log_likelihood"] = r.log_likelihood;
  report["score"] = r.score;
  report["converged"] = r.state.converged;
  report["epochs"] = r.state.epoch;
  report["best_restart"] = r.best_restart;
  report["retained_count"] = r.retained_columns.size();
  report["retained_columns"] = r.retained_columns;
  report["alpha"] = r.indicators.alpha_mean;
  report["config"] = solver_json(o);
  report["config"]["c_max"] = o.cmax;
  report["config"]["a"] = o.a;
  report["config"]["b"] = o.b;

  Outputs files;
  add_clique_files(files, r.z, &g);
  files.emplace_back("stats.json", report.dump(2) + "\n");
  files.emplace_back("histogram.csv", histogram_csv(s));
  return files;
}

Outputs cmd_expand(const Options& o) {
  if (o.mask.empty() == o.input.empty())
    throw ConfigError("expand needs exactly one of --mask or --input");
  std::optional<GraphFile> g;
  CliqueMatrix base;
  if (!o.mask.empty()) {
    base = load_mask(o.mask, std::nullopt);
  } else {
    g = load_graph(o);
    base = incidence_matrix(g->adjacency);
  }
  if (base.column_count() == 0) throw DimensionError("clique matrix has no columns");
  const CliqueMatrix expanded = expand_clique_matrix(base, o.max_columns);
  const AdjacencyMatrix target = heaviside_reconstruct(base);

  json report = stats_json(stats(target, expanded));
  report["command"] = "expand";
  report["original_columns"] = base.column_count();
  report["expanded_columns"] = expanded.column_count();
  report["config"] = {{"max_columns", o.max_columns}};

  Outputs files;
  add_clique_files(files, expanded, g ? &*g : nullptr);
  files.emplace_back("stats.json", report.dump(2) + "\n");
  return files;
}

Outputs cmd_stats(const Options& o) {
  const GraphFile g = load_graph(o);
  const CliqueMatrix z =
      o.mask.empty() ? incidence_matrix(g.adjacency) : load_mask(o.mask, g.adjacency.vertex_count());
  const GraphStats s = stats(g.adjacency, z);
  json report = stats_json(s);
  report["command"] = "stats";
  report["columns_are_cliques"] = columns_are_cliques(g.adjacency, z);
  report["mask_source"] = o.mask.empty() ? "incidence" : "file";
  return {{"stats.json", report.dump(2) + "\n"}, {"histogram.csv", histogram_csv(s)}};
}

FitConfig fit_config(const Options& o) {
  if (!(o.fit_tol > 0.0)) throw ConfigError("--fit-tol must be positive");
  FitConfig f;
  f.tol = o.fit_tol;
  f.max_iterations = o.max_iterations;
  f.seed = o.seed;
  return f;
}

Outputs cmd_fitcov(const Options& o) {
  const FitConfig fit = fit_config(o);
  if (o.cov.empty()) throw ConfigError("--cov is required");
  const GraphFile g = load_graph(o);
  const Eigen::MatrixXd s = read_matrix_csv_file(o.cov);
  const std::size_t v = g.adjacency.vertex_count();
  if (static_cast<std::size_t>(s.rows()) != v || static_cast<std::size_t>(s.cols()) != v)
    throw DimensionError("covariance is " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()) + ", graph has " + std::to_string(v) +
                         " vertices");
  validate_sample_covariance(s);
  const CliqueMatrix mask = o.mask.empty()
                                ? covariance_mask(g.adjacency, solver_config(o), o.max_columns)
                                : load_mask(o.mask, v);
  const auto [model, report] = fit_covariance(s, g.adjacency, mask, fit);
  const Eigen::MatrixXd sigma = model.sigma();

  json out = {{"kappa", report.kappa},
              {"iterations", report.iterations},
              {"converged", report.converged},
              {"grad_norm", report.grad_norm},
              {"rms_error", rms_error(sigma, s, g.adjacency)},
              {"mask_columns", mask.column_count()},
              {"mask_source", o.mask.empty() ? "pipeline" : "file"},
              {"command", "fitcov"},
              {"config", {{"tol", fit.tol}, {"max_iterations", fit.max_iterations}, {"seed", o.seed}}}};

  std::ostringstream sigma_csv, mask_txt;
  write_matrix_csv(sigma_csv, sigma);
  write_clique_matrix_sparse(mask_txt, mask);
  return {{"sigma.csv", sigma_csv.str()}, {"fit.json", out.dump(2) + "\n"}, {"mask.txt", mask_txt.str()}};
}

// Decade bins of the rms error.
std::string rms_histogram(const std::vector<ReplicationResult>& rows) {
  std::map<int, std::size_t> bins;
  constexpr int floor_exp = -12;
  for (const auto& r : rows) {
    const int e = r.rms_error > 0.0 ? static_cast<int>(std::floor(std::log10(r.rms_error))) : floor_exp;
    ++bins[std::max(e, floor_exp)];
  }
  std::size_t peak = 1;
  for (const auto& [e, n] : bins) peak = std::max(peak, n);
  std::ostringstream out;
  out << "rms error histogram (" << rows.size() << " replications, decade bins)\n";
  if (bins.empty()) return out.str();
  for (int e = bins.begin()->first; e <= bins.rbegin()->first; ++e) {
    const std::size_t n = bins.contains(e) ? bins.at(e) : 0;
    std::ostringstream label;
    label << (e == floor_exp ? "<" : "") << "1e" << e;
    out << label.str() << std::string(8 - std::min<std::size_t>(8, label.str().size()), ' ')
        << std::string(6 - std::min<std::size_t>(6, std::to_string(n).size()), ' ') << n << ' '
        << std::string((n * 50 + peak - 1) / peak, '#') << '\n';
  }
  return out.str();
}

Outputs cmd_replicate(const Options& o) {
  if (o.replications == 0) throw ConfigError("--replications must be at least 1");
  const FitConfig fit = fit_config(o);
  std::vector<ReplicationResult> rows(o.replications);
  detail::parallel_for(o.replications, o.threads,
                       [&](std::size_t r) { rows[r] = run_replication(o.seed, r, fit); });

  std::ostringstream csv;
  csv << "seed,rms_error,kappa,converged\n";
  std::vector<double> rms;
  std::size_t converged = 0;
  for (const auto& r : rows) {
    csv << r.seed << ',' << json(r.rms_error).dump() << ',' << json(r.kappa).dump() << ','
        << (r.converged ? 1 : 0) << '\n';
    rms.push_back(r.rms_error);
    converged += r.converged;
  }
  std::sort(rms.begin(), rms.end());
  auto quantile = [&](double q) {
    return rms[static_cast<std::size_t>(q * static_cast<double>(rms.size() - 1))];
  };
  double mean = 0.0;
  for (double x : rms) mean += x;
  mean /= static_cast<double>(rms.size());
  const json summary = {{"command", "replicate"},
                        {"replications", o.replications},
                        {"seed", o.seed},
                        {"rms_median", quantile(0.5)},
                        {"rms_mean", mean},
                        {"rms_p90", quantile(0.9)},
                        {"rms_max", rms.back()},
                        {"converged", converged}};
  return {{"replications.csv", csv.str()},
          {"histogram.txt", rms_histogram(rows)},
          {"summary.json", summary.dump(2) + "\n"}};
}

void write_outputs(const std::string& dir, const Outputs& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  for (const auto& [name, content] : files) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("cannot write " + path.string());
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Clique-matrix graph decomposition and covariance fitting"};
  app.name("cliquemat");
  app.require_subcommand(1);

  auto graph_opts = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "graph file");
    sub->add_option("--format", o.format, "dimacs, edgelist or gml (default: from extension)")
        ->check(CLI::IsMember({"dimacs", "edgelist", "gml"}));
  };
  auto solver_opts = [&](CLI::App* sub) {
    sub->add_option("--beta", o.beta, "likelihood steepness")->capture_default_str();
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option("--restarts", o.restarts, "independent restarts")->capture_default_str();
    sub->add_option("--tol", o.tol, "convergence threshold on max |delta theta|")->capture_default_str();
    sub->add_option("--max-epochs", o.max_epochs, "epoch limit")->capture_default_str();
    sub->add_option("--field", o.field, "field approximation")
        ->check(CLI::IsMember({"zero", "gaussian"}))
        ->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  };
  auto out_opt = [&](CLI::App* sub) {
    sub->add_option("--out-dir", o.out_dir, "directory for result files")->capture_default_str();
  };
  auto fit_opts = [&](CLI::App* sub) {
    sub->add_option("--fit-tol", o.fit_tol, "gradient-norm stopping threshold")->capture_default_str();
    sub->add_option("--max-iterations", o.max_iterations, "optimiser iteration cap")->capture_default_str();
  };

  auto* decompose = app.add_subcommand("decompose", "fixed-C clique decomposition");
  graph_opts(decompose);
  decompose->add_option("--c", o.c, "number of columns")->required();
  solver_opts(decompose);
  out_opt(decompose);

  auto* select = app.add_subcommand("select", "decomposition with automatic column count");
  graph_opts(select);
  select->add_option("--cmax", o.cmax, "maximum number of columns")->required();
  select->add_option("--a", o.a, "Beta prior a")->capture_default_str();
  select->add_option("--b", o.b, "Beta prior b")->capture_default_str();
  solver_opts(select);
  out_opt(select);

  auto* expand = app.add_subcommand("expand", "expand a clique matrix with all sub-columns");
  graph_opts(expand);
  expand->add_option("--mask", o.mask, "clique matrix file (sparse or CSV)");
  expand->add_option("--max-columns", o.max_columns, "column cap")->capture_default_str();
  out_opt(expand);

  auto* stats_cmd = app.add_subcommand("stats", "graph and clique-matrix statistics");
  graph_opts(stats_cmd);
  stats_cmd->add_option("--mask", o.mask, "clique matrix file (default: incidence matrix)");
  out_opt(stats_cmd);

  auto* fitcov = app.add_subcommand("fitcov", "fit a covariance under the graph's zero constraints");
  graph_opts(fitcov);
  fitcov->add_option("--cov", o.cov, "sample covariance CSV")->required();
  fitcov->add_option("--mask", o.mask, "clique matrix file (default: decomposition pipeline)");
  fitcov->add_option("--max-columns", o.max_columns, "expansion cap")->capture_default_str();
  solver_opts(fitcov);
  fit_opts(fitcov);
  out_opt(fitcov);

  auto* replicate = app.add_subcommand("replicate", "four-cycle covariance replication experiment");
  replicate->add_option("--replications", o.replications, "number of draws")->capture_default_str();
  replicate->add_option("--seed", o.seed, "random seed")->capture_default_str();
  replicate->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  fit_opts(replicate);
  out_opt(replicate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_failure;
  }

  try {
    Outputs files;
    if (decompose->parsed()) files = cmd_decompose(o);
    else if (select->parsed()) files = cmd_select(o);
    else if (expand->parsed()) files = cmd_expand(o);
    else if (stats_cmd->parsed()) files = cmd_stats(o);
    else if (fitcov->parsed()) files = cmd_fitcov(o);
    else files = cmd_replicate(o);
    write_outputs(o.out_dir, files);
    for (const auto& f : files) out << (std::filesystem::path(o.out_dir) / f.first).string() << "\n";
    return ok;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return parse_failure;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return numerical_failure;
  } catch (const Error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return config_failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return numerical_failure;
  }
}

}  // namespace cliquemat::cli
