#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "cliquemat/covfit.hpp"
#include "cliquemat/graph_io.hpp"
#include "cliquemat/matrix_io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cliquemat;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cliquemat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("cliquemat_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json load_json(const std::string& path) { return json::parse(slurp(path)); }

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream s;
  write_matrix_csv(s, m);
  return s.str();
}

const char* two_triangles_dimacs = "c two triangles\np edge 4 5\ne 1 2\ne 1 3\ne 2 3\ne 2 4\ne 3 4\n";
const char* four_cycle_edges = "# vertices 4\n0 1\n0 2\n1 3\n2 3\n";

}  // namespace

TEST_CASE("decompose") {
  TempDir dir;
  const auto graph = dir.file("g.clq", two_triangles_dimacs);
  const auto r = run_cli({"decompose", "--input", graph, "--c", "2", "--beta", "10", "--restarts", "10",
                      "--out-dir", dir / "out"});
  REQUIRE(r.code == 0);
  const auto stats = load_json(dir / "out/stats.json");
  CHECK(stats["size_histogram"] == json{{"3", 2}});
  CHECK(stats["reconstruction_exact"] == true);
  CHECK(slurp(dir / "out/histogram.csv") == "size,count,log2_count_plus_1\n3,2,1.584962500721156\n");
  std::ifstream sparse(dir / "out/cliques.txt");
  CHECK(fixtures::column_set(read_clique_matrix(sparse)) ==
        fixtures::column_set(fixtures::two_triangles_cover()));
  std::ifstream csv(dir / "out/cliques.csv");
  CHECK(read_clique_matrix(csv).column_count() == 2);
}

TEST_CASE("parse errors write nothing") {
  TempDir dir;
  const auto graph = dir.file("bad.clq", "p edge four 5\n");
  const auto r = run_cli({"decompose", "--input", graph, "--c", "2", "--out-dir", dir / "out"});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
  CHECK(run_cli({"decompose", "--input", dir / "missing.clq", "--c", "2", "--out-dir", dir / "out"}).code == 1);
  CHECK(run_cli({"stats", "--input", dir.file("e.txt", "0 1\n0 x\n"), "--out-dir", dir / "out"}).code == 1);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("configuration errors") {
  TempDir dir;
  const auto graph = dir.file("g.clq", two_triangles_dimacs);
  CHECK(run_cli({"select", "--input", graph, "--cmax", "0", "--out-dir", dir / "o"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph, "--c", "0", "--out-dir", dir / "o"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph, "--c", "2", "--restarts", "0", "--out-dir", dir / "o"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph, "--c", "2", "--beta", "-1", "--out-dir", dir / "o"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph, "--c", "2", "--field", "odd"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph, "--c", "2", "--format", "xml"}).code == 2);
  CHECK(run_cli({"decompose", "--input", graph}).code == 2);
  CHECK(run_cli({"replicate", "--replications", "0", "--out-dir", dir / "o"}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK_FALSE(fs::exists(dir / "o"));
  const auto help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("decompose") != std::string::npos);
}

TEST_CASE("select") {
  TempDir dir;
  const auto graph = dir.file("g.clq", two_triangles_dimacs);
  REQUIRE(run_cli({"select", "--input", graph, "--cmax", "8", "--restarts", "10", "--out-dir", dir / "out"}).code == 0);
  const auto stats = load_json(dir / "out/stats.json");
  CHECK(stats["retained_count"] == 2);
  CHECK(stats["alpha"].size() == 8);
  CHECK(stats["reconstruction_exact"] == true);
  CHECK(stats["config"]["a"] == 1.0);
  CHECK(stats["config"]["b"] == 3.0);
}

TEST_CASE("expand and stats") {
  TempDir dir;
  const auto mask = dir.file("z.txt", "# vertices 4 columns 2\nc1: 0 1 2\nc2: 1 2 3\n");
  REQUIRE(run_cli({"expand", "--mask", mask, "--out-dir", dir / "out"}).code == 0);
  std::ifstream in(dir / "out/cliques.txt");
  const auto expanded = read_clique_matrix(in);
  CHECK(expanded.column_count() == 11);
  CHECK(is_valid_clique_matrix(heaviside_reconstruct(fixtures::two_triangles_cover()), expanded));
  CHECK(load_json(dir / "out/stats.json")["expanded_columns"] == 11);

  CHECK(run_cli({"expand", "--mask", mask, "--max-columns", "5", "--out-dir", dir / "capped"}).code == 2);
  CHECK(run_cli({"expand", "--out-dir", dir / "none"}).code == 2);

  const auto c4 = dir.file("c4.txt", four_cycle_edges);
  REQUIRE(run_cli({"expand", "--input", c4, "--out-dir", dir / "c4"}).code == 0);
  CHECK(load_json(dir / "c4/stats.json")["expanded_columns"] == 8);

  const auto graph = dir.file("g.clq", two_triangles_dimacs);
  REQUIRE(run_cli({"stats", "--input", graph, "--out-dir", dir / "s"}).code == 0);
  auto s = load_json(dir / "s/stats.json");
  CHECK(s["clique_count"] == 5);
  CHECK(s["size_histogram"] == json{{"2", 5}});
  REQUIRE(run_cli({"stats", "--input", graph, "--mask", mask, "--out-dir", dir / "s2"}).code == 0);
  s = load_json(dir / "s2/stats.json");
  CHECK(s["clique_count"] == 2);
  CHECK(s["reconstruction_exact"] == true);
}

TEST_CASE("gml labels reach the sparse output") {
  TempDir dir;
  const auto graph = dir.file("g.gml", R"(graph [
  node [ id 0 label "A" value "c" ]
  node [ id 1 label "B" value "l" ]
  node [ id 2 label "C" value "c" ]
  edge [ source 0 target 1 ]
  edge [ source 1 target 2 ]
  edge [ source 0 target 2 ]
])");
  REQUIRE(run_cli({"decompose", "--input", graph, "--c", "1", "--restarts", "3", "--out-dir", dir / "out"}).code == 0);
  CHECK(slurp(dir / "out/cliques.txt") == "# vertices 3 columns 1\nc1: 0 1 2\n#   [A | c] [B | l] [C | c]\n");
}

TEST_CASE("fitcov") {
  TempDir dir;
  std::mt19937_64 rng(30);

  SUBCASE("four-cycle keeps exact zeros") {
    const auto g = dir.file("c4.txt", four_cycle_edges);
    Rng draw(5);
    const auto s = dir.file("s.csv", matrix_csv(draw_four_cycle_covariance(draw)));
    REQUIRE(run_cli({"fitcov", "--input", g, "--cov", s, "--out-dir", dir / "out"}).code == 0);
    const auto sigma = read_matrix_csv_file(dir / "out/sigma.csv");
    CHECK(sigma(0, 3) == 0.0);
    CHECK(sigma(3, 0) == 0.0);
    CHECK(sigma(1, 2) == 0.0);
    CHECK(sigma(2, 1) == 0.0);
    const auto report = load_json(dir / "out/fit.json");
    for (const char* key : {"kappa", "iterations", "converged", "grad_norm"}) CHECK(report.contains(key));
    CHECK(report["mask_columns"] == 8);
  }

  SUBCASE("complete graph reproduces S") {
    const auto k4 = dir.file("k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    const Eigen::MatrixXd s = oracle::random_spd(4, rng);
    const auto path = dir.file("s.csv", matrix_csv(s));
    REQUIRE(run_cli({"fitcov", "--input", k4, "--cov", path, "--fit-tol", "1e-10", "--out-dir", dir / "out"}).code == 0);
    CHECK((read_matrix_csv_file(dir / "out/sigma.csv") - s).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(load_json(dir / "out/fit.json")["kappa"].get<double>() ==
          doctest::Approx(4.0 + std::log(s.determinant())).epsilon(1e-10));
  }

  SUBCASE("chain matches the oracle") {
    const auto chain = dir.file("chain.txt", "0 1\n1 2\n");
    const Eigen::MatrixXd s = oracle::random_spd(3, rng);
    const auto path = dir.file("s.csv", matrix_csv(s));
    REQUIRE(run_cli({"fitcov", "--input", chain, "--cov", path, "--fit-tol", "1e-10", "--out-dir", dir / "out"}).code == 0);
    const double best = oracle::structured_cholesky_min(fixtures::dense(fixtures::chain(3)), {0, 1, 2}, s, 3, rng);
    CHECK(std::abs(load_json(dir / "out/fit.json")["kappa"].get<double>() - best) < 1e-6);
  }

  SUBCASE("user mask") {
    const auto g = dir.file("c4.txt", four_cycle_edges);
    const auto mask = dir.file("m.txt", "c1: 0 1\nc2: 0 2\nc3: 1 3\nc4: 2 3\n");
    Rng draw(6);
    const auto s = dir.file("s.csv", matrix_csv(draw_four_cycle_covariance(draw)));
    REQUIRE(run_cli({"fitcov", "--input", g, "--cov", s, "--mask", mask, "--out-dir", dir / "out"}).code == 0);
    CHECK(load_json(dir / "out/fit.json")["mask_columns"] == 4);
    const auto bad = dir.file("bad.txt", "c1: 0 3\n");
    CHECK(run_cli({"fitcov", "--input", g, "--cov", s, "--mask", bad, "--out-dir", dir / "bad"}).code == 2);
  }

  SUBCASE("invalid covariance") {
    const auto g = dir.file("c4.txt", four_cycle_edges);
    Eigen::MatrixXd s = -Eigen::MatrixXd::Identity(4, 4);
    CHECK(run_cli({"fitcov", "--input", g, "--cov", dir.file("neg.csv", matrix_csv(s)), "--out-dir", dir / "o"}).code == 3);
    s = Eigen::MatrixXd::Identity(4, 4);
    s(0, 1) = 0.5;
    CHECK(run_cli({"fitcov", "--input", g, "--cov", dir.file("asym.csv", matrix_csv(s)), "--out-dir", dir / "o"}).code == 3);
    CHECK(run_cli({"fitcov", "--input", g, "--cov", dir.file("small.csv", matrix_csv(Eigen::MatrixXd::Identity(3, 3))),
               "--out-dir", dir / "o"}).code == 2);
    CHECK(run_cli({"fitcov", "--input", g, "--cov", dir.file("text.csv", "1,a\n"), "--out-dir", dir / "o"}).code == 1);
    CHECK_FALSE(fs::exists(dir / "o"));
  }
}

TEST_CASE("replicate") {
  TempDir dir;
  REQUIRE(run_cli({"replicate", "--replications", "1", "--out-dir", dir / "one"}).code == 0);
  const auto one = slurp(dir / "one/replications.csv");
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  CHECK(one.rfind("seed,rms_error,kappa,converged\n", 0) == 0);

  REQUIRE(run_cli({"replicate", "--replications", "1000", "--seed", "7", "--out-dir", dir / "a"}).code == 0);
  REQUIRE(run_cli({"replicate", "--replications", "1000", "--seed", "7", "--threads", "3", "--out-dir", dir / "b"}).code == 0);
  const auto a = slurp(dir / "a/replications.csv");
  CHECK(std::count(a.begin(), a.end(), '\n') == 1001);
  CHECK(a == slurp(dir / "b/replications.csv"));
  CHECK(slurp(dir / "a/histogram.txt") == slurp(dir / "b/histogram.txt"));
  CHECK(slurp(dir / "a/summary.json") == slurp(dir / "b/summary.json"));
}

TEST_CASE("every command is reproducible from its seed") {
  TempDir dir;
  const auto graph = dir.file("g.clq", two_triangles_dimacs);
  const auto c4 = dir.file("c4.txt", four_cycle_edges);
  Rng draw(8);
  const auto cov = dir.file("s.csv", matrix_csv(draw_four_cycle_covariance(draw)));
  const std::vector<std::vector<std::string>> commands{
      {"decompose", "--input", graph, "--c", "3", "--seed", "5", "--field", "gaussian"},
      {"select", "--input", graph, "--cmax", "6", "--seed", "5"},
      {"expand", "--input", graph},
      {"stats", "--input", graph},
      {"fitcov", "--input", c4, "--cov", cov, "--seed", "5"},
      {"replicate", "--replications", "20", "--seed", "5"}};
  int k = 0;
  for (auto args : commands) {
    const std::string x = dir / ("x" + std::to_string(k)), y = dir / ("y" + std::to_string(k));
    ++k;
    auto ax = args, ay = args;
    ax.insert(ax.end(), {"--out-dir", x});
    ay.insert(ay.end(), {"--out-dir", y});
    REQUIRE(run_cli(ax).code == 0);
    REQUIRE(run_cli(ay).code == 0);
    for (const auto& entry : fs::directory_iterator(x))
      CHECK(slurp(entry.path().string()) == slurp((fs::path(y) / entry.path().filename()).string()));
  }
}
