#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cliquemat/bit_matrix.hpp"

namespace cliquemat {

using Edge = std::pair<std::size_t, std::size_t>;

/// Symmetric 0/1 adjacency matrix of an undirected graph with every vertex
/// self-connected (unit diagonal). Vertices are 0-indexed.
class AdjacencyMatrix {
 public:
  /// `v` isolated vertices.
  static AdjacencyMatrix identity(std::size_t v);
  /// Self loops are ignored and duplicate edges collapse.
  /// Throws DimensionError for an endpoint >= v or v == 0.
  static AdjacencyMatrix from_edges(std::size_t v, std::span<const Edge> edges);
  /// Throws DimensionError unless `rows` is square, symmetric, 0/1 and has a
  /// unit diagonal.
  static AdjacencyMatrix from_dense(const std::vector<std::vector<int>>& rows);

  std::size_t vertex_count() const noexcept { return bits_.rows(); }
  bool operator()(std::size_t i, std::size_t j) const noexcept {
    return bits_.get(i, j);
  }
  const BitMatrix& bits() const noexcept { return bits_; }

  std::size_t edge_count() const noexcept;
  /// Off-diagonal edges with i < j, in row-major order.
  std::vector<Edge> edges() const;
  std::size_t degree(std::size_t i) const noexcept {
    return bits_.row_count(i) - 1;
  }

  /// Relabel so that new vertex k is old vertex order[k].
  AdjacencyMatrix permuted(std::span<const std::size_t> order) const;

  friend bool operator==(const AdjacencyMatrix&,
                         const AdjacencyMatrix&) = default;

 private:
  explicit AdjacencyMatrix(BitMatrix bits) : bits_(std::move(bits)) {}
  BitMatrix bits_;
};

/// Binary V x C matrix whose columns are vertex subsets. No column is empty;
/// a matrix with zero columns is allowed (e.g. an empty solver result).
class CliqueMatrix {
 public:
  CliqueMatrix() = default;
  /// Each entry of `columns` lists the member vertices of one column.
  /// Throws DimensionError on an empty column or a vertex >= v.
  static CliqueMatrix from_columns(std::size_t v,
                                   const std::vector<std::vector<std::size_t>>& columns);
  /// V rows of C entries each (0/1).
  static CliqueMatrix from_dense(const std::vector<std::vector<int>>& rows);

  std::size_t vertex_count() const noexcept { return v_; }
  std::size_t column_count() const noexcept { return cols_.rows(); }
  bool operator()(std::size_t i, std::size_t c) const noexcept {
    return rows_.get(i, c);
  }

  /// Sorted member list of column c.
  std::vector<std::size_t> column(std::size_t c) const;
  std::size_t column_weight(std::size_t c) const noexcept {
    return cols_.row_count(c);
  }
  std::vector<std::vector<std::size_t>> columns() const;

  /// Row-major bits (V x C); rows intersect iff two vertices share a column.
  const BitMatrix& row_bits() const noexcept { return rows_; }
  /// Column-major bits (C x V).
  const BitMatrix& column_bits() const noexcept { return cols_; }

  friend bool operator==(const CliqueMatrix& a, const CliqueMatrix& b) {
    return a.v_ == b.v_ && a.cols_ == b.cols_;
  }

 private:
  CliqueMatrix(std::size_t v, BitMatrix cols);
  std::size_t v_ = 0;
  BitMatrix rows_;
  BitMatrix cols_;
};

struct GraphStats {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t clique_count = 0;
  std::map<std::size_t, std::size_t> size_histogram;
  bool reconstruction_exact = false;

  std::size_t max_clique_size() const {
    return size_histogram.empty() ? 0 : size_histogram.rbegin()->first;
  }
};

/// H(Z Z^T). Throws DimensionError when z has no columns.
AdjacencyMatrix heaviside_reconstruct(const CliqueMatrix& z);

/// One column per edge plus one singleton column per isolated vertex, so the
/// reconstruction reproduces `a` including its diagonal.
CliqueMatrix incidence_matrix(const AdjacencyMatrix& a);

/// True iff H(Z Z^T) == A. Throws DimensionError on a vertex-count mismatch.
bool is_valid_clique_matrix(const AdjacencyMatrix& a, const CliqueMatrix& z);

/// True iff every column of z is a clique of a (edges may stay uncovered).
bool columns_are_cliques(const AdjacencyMatrix& a, const CliqueMatrix& z);

GraphStats stats(const AdjacencyMatrix& a, const CliqueMatrix& z);

/// Removes exact duplicate columns and columns contained in another column.
/// Keeps the first occurrence; relative order is preserved.
CliqueMatrix dedup_columns(const CliqueMatrix& z);

}  // namespace cliquemat
