#pragma once
// Small graphs from the method's worked examples, 0-indexed.

#include <vector>

#include "cliquemat/graph.hpp"
#include "oracles.hpp"

namespace fixtures {

using cliquemat::AdjacencyMatrix;
using cliquemat::CliqueMatrix;
using cliquemat::Edge;

// Four vertices, edges 0-1 0-2 1-2 1-3 2-3: two triangles sharing 1-2.
inline AdjacencyMatrix two_triangles() {
  const std::vector<Edge> e{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}};
  return AdjacencyMatrix::from_edges(4, e);
}

// Minimal clique matrix of two_triangles().
inline CliqueMatrix two_triangles_cover() { return CliqueMatrix::from_columns(4, {{0, 1, 2}, {1, 2, 3}}); }

inline CliqueMatrix two_triangles_incidence() {
  return CliqueMatrix::from_columns(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
}

inline AdjacencyMatrix complete(std::size_t v) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j) e.emplace_back(i, j);
  return AdjacencyMatrix::from_edges(v, e);
}

inline AdjacencyMatrix chain(std::size_t v) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < v; ++i) e.emplace_back(i, i + 1);
  return AdjacencyMatrix::from_edges(v, e);
}

inline oracle::Dense dense(const AdjacencyMatrix& a) {
  oracle::Dense d(a.vertex_count(), std::vector<int>(a.vertex_count(), 0));
  for (std::size_t i = 0; i < a.vertex_count(); ++i)
    for (std::size_t j = 0; j < a.vertex_count(); ++j) d[i][j] = a(i, j) ? 1 : 0;
  return d;
}

inline oracle::Dense dense(const CliqueMatrix& z) {
  oracle::Dense d(z.vertex_count(), std::vector<int>(z.column_count(), 0));
  for (std::size_t i = 0; i < z.vertex_count(); ++i)
    for (std::size_t c = 0; c < z.column_count(); ++c) d[i][c] = z(i, c) ? 1 : 0;
  return d;
}

// Columns as a sorted list of member lists, for order-free comparison.
inline std::vector<std::vector<std::size_t>> column_set(const CliqueMatrix& z) {
  auto cols = z.columns();
  std::sort(cols.begin(), cols.end());
  return cols;
}

}  // namespace fixtures
