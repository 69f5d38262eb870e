#include "cliquemat/graph.hpp"

#include <string>

#include "cliquemat/errors.hpp"

namespace cliquemat {

namespace {

void require_same_vertices(const AdjacencyMatrix& a, const CliqueMatrix& z) {
  if (a.vertex_count() != z.vertex_count())
    throw DimensionError("clique matrix has " + std::to_string(z.vertex_count()) +
                         " rows but the graph has " +
                         std::to_string(a.vertex_count()) + " vertices");
}

bool is_subset(std::span<const BitMatrix::word_type> a,
               std::span<const BitMatrix::word_type> b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

}  // namespace

AdjacencyMatrix AdjacencyMatrix::identity(std::size_t v) {
  if (v == 0) throw DimensionError("a graph needs at least one vertex");
  BitMatrix bits(v, v);
  for (std::size_t i = 0; i < v; ++i) bits.set(i, i);
  return AdjacencyMatrix(std::move(bits));
}

AdjacencyMatrix AdjacencyMatrix::from_edges(std::size_t v,
                                            std::span<const Edge> edges) {
  AdjacencyMatrix a = identity(v);
  for (const auto& [i, j] : edges) {
    if (i >= v || j >= v)
      throw DimensionError("edge (" + std::to_string(i) + ", " +
                           std::to_string(j) + ") out of range for " +
                           std::to_string(v) + " vertices");
    a.bits_.set(i, j);
    a.bits_.set(j, i);
  }
  return a;
}

AdjacencyMatrix AdjacencyMatrix::from_dense(
    const std::vector<std::vector<int>>& rows) {
  const std::size_t v = rows.size();
  AdjacencyMatrix a = identity(v);
  for (std::size_t i = 0; i < v; ++i) {
    if (rows[i].size() != v) throw DimensionError("adjacency matrix is not square");
    for (std::size_t j = 0; j < v; ++j) {
      const int x = rows[i][j];
      if (x != 0 && x != 1) throw DimensionError("adjacency entries must be 0 or 1");
      if (x != rows[j][i]) throw DimensionError("adjacency matrix is not symmetric");
      if (i == j && x != 1) throw DimensionError("adjacency diagonal must be 1");
      if (x) a.bits_.set(i, j);
    }
  }
  return a;
}

std::size_t AdjacencyMatrix::edge_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < vertex_count(); ++i) n += degree(i);
  return n / 2;
}

std::vector<Edge> AdjacencyMatrix::edges() const {
  std::vector<Edge> out;
  const std::size_t v = vertex_count();
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (bits_.get(i, j)) out.emplace_back(i, j);
  return out;
}

AdjacencyMatrix AdjacencyMatrix::permuted(
    std::span<const std::size_t> order) const {
  const std::size_t v = vertex_count();
  if (order.size() != v) throw DimensionError("permutation has the wrong length");
  std::vector<char> seen(v, 0);
  for (std::size_t x : order) {
    if (x >= v || seen[x]) throw DimensionError("not a permutation");
    seen[x] = 1;
  }
  BitMatrix bits(v, v);
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = 0; j < v; ++j)
      if (bits_.get(order[i], order[j])) bits.set(i, j);
  return AdjacencyMatrix(std::move(bits));
}

CliqueMatrix::CliqueMatrix(std::size_t v, BitMatrix cols)
    : v_(v), rows_(cols.transposed()), cols_(std::move(cols)) {
  if (cols_.rows() == 0) rows_ = BitMatrix(v, 0);
}

CliqueMatrix CliqueMatrix::from_columns(
    std::size_t v, const std::vector<std::vector<std::size_t>>& columns) {
  BitMatrix cols(columns.size(), v);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].empty())
      throw DimensionError("column " + std::to_string(c) + " is empty");
    for (std::size_t i : columns[c]) {
      if (i >= v)
        throw DimensionError("vertex " + std::to_string(i) + " out of range in column " +
                             std::to_string(c));
      cols.set(c, i);
    }
  }
  return CliqueMatrix(v, std::move(cols));
}

CliqueMatrix CliqueMatrix::from_dense(const std::vector<std::vector<int>>& rows) {
  const std::size_t v = rows.size();
  const std::size_t c = v ? rows.front().size() : 0;
  BitMatrix cols(c, v);
  for (std::size_t i = 0; i < v; ++i) {
    if (rows[i].size() != c) throw DimensionError("ragged clique matrix");
    for (std::size_t k = 0; k < c; ++k) {
      if (rows[i][k] != 0 && rows[i][k] != 1)
        throw DimensionError("clique matrix entries must be 0 or 1");
      if (rows[i][k]) cols.set(k, i);
    }
  }
  for (std::size_t k = 0; k < c; ++k)
    if (cols.row_count(k) == 0)
      throw DimensionError("column " + std::to_string(k) + " is empty");
  return CliqueMatrix(v, std::move(cols));
}

std::vector<std::size_t> CliqueMatrix::column(std::size_t c) const {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < v_; ++i)
    if (cols_.get(c, i)) members.push_back(i);
  return members;
}

std::vector<std::vector<std::size_t>> CliqueMatrix::columns() const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(column_count());
  for (std::size_t c = 0; c < column_count(); ++c) out.push_back(column(c));
  return out;
}

AdjacencyMatrix heaviside_reconstruct(const CliqueMatrix& z) {
  if (z.column_count() == 0)
    throw DimensionError("cannot reconstruct from a clique matrix with no columns");
  const std::size_t v = z.vertex_count();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < v; ++i)
    for (std::size_t j = i + 1; j < v; ++j)
      if (z.row_bits().rows_intersect(i, j)) edges.emplace_back(i, j);
  AdjacencyMatrix a = AdjacencyMatrix::from_edges(v, edges);
  // A vertex in no column has a zero diagonal in Z Z^T, which an
  // AdjacencyMatrix cannot express; callers compare via is_valid_clique_matrix.
  return a;
}

CliqueMatrix incidence_matrix(const AdjacencyMatrix& a) {
  std::vector<std::vector<std::size_t>> cols;
  for (const auto& [i, j] : a.edges()) cols.push_back({i, j});
  for (std::size_t i = 0; i < a.vertex_count(); ++i)
    if (a.degree(i) == 0) cols.push_back({i});
  return CliqueMatrix::from_columns(a.vertex_count(), cols);
}

bool is_valid_clique_matrix(const AdjacencyMatrix& a, const CliqueMatrix& z) {
  require_same_vertices(a, z);
  const BitMatrix& rows = z.row_bits();
  const std::size_t v = a.vertex_count();
  for (std::size_t i = 0; i < v; ++i) {
    if (rows.row_count(i) == 0) return false;  // diagonal of ZZ^T would be 0
    for (std::size_t j = i + 1; j < v; ++j)
      if (rows.rows_intersect(i, j) != a(i, j)) return false;
  }
  return true;
}

bool columns_are_cliques(const AdjacencyMatrix& a, const CliqueMatrix& z) {
  require_same_vertices(a, z);
  for (std::size_t c = 0; c < z.column_count(); ++c) {
    const auto members = z.column(c);
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y)
        if (!a(members[x], members[y])) return false;
  }
  return true;
}

GraphStats stats(const AdjacencyMatrix& a, const CliqueMatrix& z) {
  require_same_vertices(a, z);
  GraphStats s;
  s.vertex_count = a.vertex_count();
  s.edge_count = a.edge_count();
  s.clique_count = z.column_count();
  for (std::size_t c = 0; c < z.column_count(); ++c) ++s.size_histogram[z.column_weight(c)];
  s.reconstruction_exact = is_valid_clique_matrix(a, z);
  return s;
}

CliqueMatrix dedup_columns(const CliqueMatrix& z) {
  const BitMatrix& cols = z.column_bits();
  const std::size_t n = z.column_count();
  std::vector<std::vector<std::size_t>> kept;
  for (std::size_t c = 0; c < n; ++c) {
    bool drop = false;
    for (std::size_t d = 0; d < n && !drop; ++d) {
      if (d == c || !is_subset(cols.row(c), cols.row(d))) continue;
      // Strict subset, or an identical column that appeared earlier.
      drop = !is_subset(cols.row(d), cols.row(c)) || d < c;
    }
    if (!drop) kept.push_back(z.column(c));
  }
  return CliqueMatrix::from_columns(z.vertex_count(), kept);
}

}  // namespace cliquemat
