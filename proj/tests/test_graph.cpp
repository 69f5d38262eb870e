#include <doctest.h>

#include <random>
#include <sstream>

#include "cliquemat/errors.hpp"
#include "cliquemat/graph.hpp"
#include "cliquemat/graph_io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cliquemat;
using fixtures::column_set;

TEST_CASE("heaviside reconstruction") {
  SUBCASE("two triangles from the minimal cover") {
    CHECK(heaviside_reconstruct(fixtures::two_triangles_cover()) == fixtures::two_triangles());
  }
  SUBCASE("identity gives isolated vertices") {
    const auto z = CliqueMatrix::from_columns(3, {{0}, {1}, {2}});
    CHECK(heaviside_reconstruct(z) == AdjacencyMatrix::identity(3));
  }
  SUBCASE("incidence matrix") {
    CHECK(heaviside_reconstruct(fixtures::two_triangles_incidence()) == fixtures::two_triangles());
  }
  SUBCASE("no columns") {
    CHECK_THROWS_AS(heaviside_reconstruct(CliqueMatrix::from_columns(3, {})), DimensionError);
  }
}

TEST_CASE("incidence matrix") {
  SUBCASE("two triangles gives the five edges") {
    CHECK(column_set(incidence_matrix(fixtures::two_triangles())) ==
          column_set(fixtures::two_triangles_incidence()));
  }
  SUBCASE("edgeless graph gives the identity") {
    const auto z = incidence_matrix(AdjacencyMatrix::identity(3));
    CHECK(column_set(z) == std::vector<std::vector<std::size_t>>{{0}, {1}, {2}});
  }
  SUBCASE("triangle") {
    CHECK(column_set(incidence_matrix(fixtures::complete(3))) ==
          std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}, {1, 2}});
  }
  SUBCASE("isolated vertex next to an edge") {
    const std::vector<Edge> e{{0, 1}};
    const auto a = AdjacencyMatrix::from_edges(3, e);
    const auto z = incidence_matrix(a);
    CHECK(z.column_count() == 2);
    CHECK(is_valid_clique_matrix(a, z));
  }
}

TEST_CASE("clique matrix validity") {
  const auto a = fixtures::two_triangles();
  CHECK(is_valid_clique_matrix(a, fixtures::two_triangles_cover()));
  CHECK(is_valid_clique_matrix(a, fixtures::two_triangles_incidence()));
  CHECK_FALSE(is_valid_clique_matrix(a, CliqueMatrix::from_columns(4, {{0, 1, 2, 3}})));
  CHECK_FALSE(is_valid_clique_matrix(a, CliqueMatrix::from_columns(4, {{0, 1, 2}})));
  CHECK_THROWS_AS(is_valid_clique_matrix(a, CliqueMatrix::from_columns(3, {{0, 1}})), DimensionError);
}

TEST_CASE("columns are cliques") {
  const auto a = fixtures::two_triangles();
  CHECK(columns_are_cliques(a, fixtures::two_triangles_cover()));
  CHECK(columns_are_cliques(a, CliqueMatrix::from_columns(4, {{0}, {1}, {2}, {3}})));
  CHECK_FALSE(columns_are_cliques(a, CliqueMatrix::from_columns(4, {{0, 3}})));
  // Cliques that leave edges uncovered are still cliques.
  CHECK(columns_are_cliques(a, CliqueMatrix::from_columns(4, {{0, 1}})));
  CHECK_THROWS_AS(columns_are_cliques(a, CliqueMatrix::from_columns(5, {{0}})), DimensionError);
}

TEST_CASE("clique matrix construction rejects bad columns") {
  CHECK_THROWS_AS(CliqueMatrix::from_columns(3, {{}}), DimensionError);
  CHECK_THROWS_AS(CliqueMatrix::from_columns(3, {{3}}), DimensionError);
  CHECK_THROWS_AS(CliqueMatrix::from_dense({{1, 0}, {1, 0}}), DimensionError);
  CHECK_THROWS_AS(CliqueMatrix::from_dense({{1, 2}}), DimensionError);
  CHECK_THROWS_AS(AdjacencyMatrix::from_dense({{1, 1}, {0, 1}}), DimensionError);
  CHECK_THROWS_AS(AdjacencyMatrix::from_dense({{0}}), DimensionError);
  CHECK_THROWS_AS(AdjacencyMatrix::identity(0), DimensionError);
}

TEST_CASE("stats") {
  const auto a = fixtures::two_triangles();
  auto s = stats(a, fixtures::two_triangles_cover());
  CHECK(s.clique_count == 2);
  CHECK(s.size_histogram == std::map<std::size_t, std::size_t>{{3, 2}});
  CHECK(s.reconstruction_exact);
  CHECK(s.edge_count == 5);
  CHECK(s.max_clique_size() == 3);

  s = stats(a, fixtures::two_triangles_incidence());
  CHECK(s.clique_count == 5);
  CHECK(s.size_histogram == std::map<std::size_t, std::size_t>{{2, 5}});
  CHECK(s.reconstruction_exact);

  s = stats(AdjacencyMatrix::identity(2), CliqueMatrix::from_columns(2, {{0}, {1}}));
  CHECK(s.clique_count == 2);
  CHECK(s.size_histogram == std::map<std::size_t, std::size_t>{{1, 2}});
  CHECK(s.reconstruction_exact);

  s = stats(a, CliqueMatrix::from_columns(4, {{0, 1, 2}}));
  CHECK_FALSE(s.reconstruction_exact);
  std::size_t total = 0;
  for (const auto& [size, count] : s.size_histogram) total += count;
  CHECK(total == s.clique_count);
}

TEST_CASE("dedup columns") {
  const auto z = CliqueMatrix::from_columns(4, {{0, 1}, {0, 1, 2}, {0, 1, 2}, {3}, {1, 2}});
  CHECK(dedup_columns(z).columns() == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3}});
  CHECK(dedup_columns(fixtures::two_triangles_cover()) == fixtures::two_triangles_cover());
}

TEST_CASE("incidence round trip on random graphs") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(1, 30);
  const double probs[] = {0.1, 0.5, 0.9};
  for (int t = 0; t < 100; ++t) {
    const auto a = AdjacencyMatrix::from_dense(oracle::random_graph(size(rng), probs[t % 3], rng));
    REQUIRE(is_valid_clique_matrix(a, incidence_matrix(a)));
  }
}

TEST_CASE("reconstruction ignores column order and duplicates") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto a = AdjacencyMatrix::from_dense(oracle::random_graph(8, 0.5, rng));
    auto cols = incidence_matrix(a).columns();
    const auto base = heaviside_reconstruct(CliqueMatrix::from_columns(8, cols));
    std::shuffle(cols.begin(), cols.end(), rng);
    CHECK(heaviside_reconstruct(CliqueMatrix::from_columns(8, cols)) == base);
    cols.push_back(cols.front());
    CHECK(heaviside_reconstruct(CliqueMatrix::from_columns(8, cols)) == base);
  }
}

TEST_CASE("validity implies clique columns, exhaustively on three vertices") {
  int valid_pairs = 0;
  for (int g = 0; g < 8; ++g) {
    const std::vector<std::vector<int>> d{
        {1, g & 1, g >> 1 & 1}, {g & 1, 1, g >> 2 & 1}, {g >> 1 & 1, g >> 2 & 1, 1}};
    const auto a = AdjacencyMatrix::from_dense(d);
    for (int code = 0; code < 64; ++code) {
      std::vector<std::vector<int>> z(3, std::vector<int>(2, 0));
      for (int b = 0; b < 6; ++b) z[b / 2][b % 2] = code >> b & 1;
      const bool col0 = z[0][0] | z[1][0] | z[2][0];
      const bool col1 = z[0][1] | z[1][1] | z[2][1];
      if (!col0 || !col1) continue;  // empty columns are not representable
      const auto zm = CliqueMatrix::from_dense(z);
      if (is_valid_clique_matrix(a, zm)) {
        ++valid_pairs;
        CHECK(columns_are_cliques(a, zm));
      }
    }
  }
  CHECK(valid_pairs > 0);
}

TEST_CASE("DIMACS parsing") {
  SUBCASE("two triangles") {
    std::istringstream in("c example\np edge 4 5\ne 1 2\ne 1 3\ne 2 3\ne 2 4\ne 3 4\n");
    CHECK(parse_graph(in, GraphFormat::dimacs) == fixtures::two_triangles());
  }
  SUBCASE("col header, duplicates and self loops") {
    std::istringstream in("p col 3 4\ne 1 2\ne 2 1\ne 3 3\n\n");
    const auto a = parse_graph(in, GraphFormat::dimacs);
    CHECK(a.edge_count() == 1);
    CHECK(a(2, 2));
  }
  SUBCASE("errors carry line numbers") {
    auto fails_on = [](const std::string& text, std::size_t line) {
      std::istringstream in(text);
      try {
        parse_graph(in, GraphFormat::dimacs);
      } catch (const ParseError& e) {
        return e.line() == line;
      }
      return false;
    };
    CHECK(fails_on("p edge x 5\n", 1));
    CHECK(fails_on("p edge 3\n", 1));
    CHECK(fails_on("c\np edge 3 1\ne 1 4\n", 3));
    CHECK(fails_on("p edge 3 1\ne 1 b\n", 2));
    CHECK(fails_on("e 1 2\np edge 3 1\n", 1));
    CHECK(fails_on("p edge 3 1\nq 1 2\n", 2));
    CHECK(fails_on("p edge 3 1\np edge 3 1\n", 2));
    CHECK(fails_on("p edge 3 1\ne 0 1\n", 2));
    std::istringstream empty("c nothing\n");
    CHECK_THROWS_AS(parse_graph(empty, GraphFormat::dimacs), ParseError);
  }
}

TEST_CASE("edge-list parsing") {
  SUBCASE("declared vertices and no edges") {
    std::istringstream in("# vertices 3\n");
    CHECK(parse_graph(in, GraphFormat::edgelist) == AdjacencyMatrix::identity(3));
  }
  SUBCASE("vertex count from the largest index") {
    std::istringstream in("0 1\n1 4\n");
    CHECK(parse_graph(in, GraphFormat::edgelist).vertex_count() == 5);
  }
  SUBCASE("errors") {
    std::istringstream range("# vertices 2\n0 2\n");
    CHECK_THROWS_AS(parse_graph(range, GraphFormat::edgelist), ParseError);
    std::istringstream token("0 x\n");
    CHECK_THROWS_AS(parse_graph(token, GraphFormat::edgelist), ParseError);
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_graph(empty, GraphFormat::edgelist), ParseError);
  }
}

TEST_CASE("DIMACS and edge-list forms agree") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto a = AdjacencyMatrix::from_dense(oracle::random_graph(12, 0.3, rng));
    std::stringstream dimacs, edges;
    write_dimacs(dimacs, a);
    write_edgelist(edges, a);
    const auto x = parse_graph(dimacs, GraphFormat::dimacs);
    const auto y = parse_graph(edges, GraphFormat::edgelist);
    CHECK(x == y);
    CHECK(x == a);
  }
}

TEST_CASE("GML parsing") {
  const std::string text = R"(Creator "test"
graph
[
  directed 0
  node
  [
    id 10
    label "Alpha"
    value "c"
  ]
  node [ id 20 label "Beta" value "l" ]
  node [ id 30 graphics [ x 1.5 y 2 ] ]
  edge [ source 10 target 20 ]
  edge [ source 20 target 30 weight 2.5 ]
  edge [ source 30 target 20 ]
]
)";
  std::istringstream in(text);
  const GraphFile g = read_graph(in, GraphFormat::gml);
  CHECK(g.adjacency.vertex_count() == 3);
  CHECK(g.adjacency.edge_count() == 2);
  CHECK(g.adjacency(0, 1));
  CHECK(g.adjacency(1, 2));
  CHECK_FALSE(g.adjacency(0, 2));
  REQUIRE(g.annotations.size() == 3);
  CHECK(g.annotations[0].label == "Alpha");
  CHECK(g.annotations[1].value == "l");
  CHECK_FALSE(g.annotations[2].label.has_value());

  std::istringstream bad("graph [ node [ id 1 ] edge [ source 1 target 2 ] ]");
  CHECK_THROWS_AS(read_graph(bad, GraphFormat::gml), ParseError);
  std::istringstream open("graph [ node [ id 1 ]");
  CHECK_THROWS_AS(read_graph(open, GraphFormat::gml), ParseError);
}

TEST_CASE("graph format names") {
  CHECK(parse_graph_format("gml") == GraphFormat::gml);
  CHECK(to_string(GraphFormat::edgelist) == "edgelist");
  CHECK_THROWS_AS(parse_graph_format("xml"), ConfigError);
}

TEST_CASE("clique matrix text forms") {
  const auto z = fixtures::two_triangles_cover();
  std::stringstream sparse, csv;
  write_clique_matrix_sparse(sparse, z);
  write_clique_matrix_csv(csv, z);
  CHECK(sparse.str() == "# vertices 4 columns 2\nc1: 0 1 2\nc2: 1 2 3\n");
  CHECK(csv.str() == "1,0\n1,1\n1,1\n0,1\n");
  CHECK(read_clique_matrix(sparse) == z);
  CHECK(read_clique_matrix(csv) == z);

  std::vector<VertexAnnotation> ann(4);
  ann[0].label = "a";
  ann[0].value = "x";
  std::stringstream labelled;
  write_clique_matrix_sparse(labelled, z, &ann);
  CHECK(labelled.str().find("#   [a | x] [1] [2]") != std::string::npos);
  CHECK(read_clique_matrix(labelled) == z);

  std::istringstream bad("1,0\n2,1\n");
  CHECK_THROWS_AS(read_clique_matrix(bad), ParseError);
  std::istringstream ragged("1,0\n1\n");
  CHECK_THROWS_AS(read_clique_matrix(ragged), ParseError);
}
