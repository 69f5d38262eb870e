// Clique-matrix structure for covariance parameterisation: expansion into
// sub-columns and Cholesky patterns of chordal graphs.

#include <algorithm>
#include <numeric>
#include <set>

#include "cliquemat/covfit.hpp"
#include "cliquemat/errors.hpp"

namespace cliquemat {

namespace {

struct LargerFirst {
  bool operator()(const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) const {
    if (x.size() != y.size()) return x.size() > y.size();
    return x < y;
  }
};

}  // namespace

CliqueMatrix expand_clique_matrix(const CliqueMatrix& z, std::size_t max_columns) {
  const auto originals = z.columns();
  if (originals.size() > max_columns) throw ExpansionTooLargeError(max_columns);
  const std::set<std::vector<std::size_t>> seen(originals.begin(), originals.end());
  std::set<std::vector<std::size_t>, LargerFirst> extra;
  const std::size_t budget = max_columns - originals.size();

  for (const auto& col : originals) {
    const std::size_t w = col.size();
    // Every subset is distinct, so the loop below throws after at most
    // budget + |originals| + 1 iterations.
    if (w >= 63) throw ExpansionTooLargeError(max_columns);
    const std::uint64_t full = (std::uint64_t{1} << w) - 1;
    for (std::uint64_t bits = 1; bits < full; ++bits) {
      std::vector<std::size_t> sub;
      for (std::size_t t = 0; t < w; ++t)
        if (bits >> t & 1u) sub.push_back(col[t]);
      if (seen.contains(sub)) continue;
      extra.insert(std::move(sub));
      if (extra.size() > budget) throw ExpansionTooLargeError(max_columns);
    }
  }

  std::vector<std::vector<std::size_t>> all = originals;
  all.insert(all.end(), extra.begin(), extra.end());
  return CliqueMatrix::from_columns(z.vertex_count(), all);
}

bool is_perfect_elimination_order(const AdjacencyMatrix& a, std::span<const std::size_t> order) {
  const std::size_t v = a.vertex_count();
  if (order.size() != v) return false;
  std::vector<std::size_t> pos(v, v);
  for (std::size_t t = 0; t < v; ++t) {
    if (order[t] >= v || pos[order[t]] != v) return false;
    pos[order[t]] = t;
  }
  for (std::size_t t = 0; t < v; ++t) {
    const std::size_t x = order[t];
    std::vector<std::size_t> later;
    for (std::size_t u = 0; u < v; ++u)
      if (u != x && a(x, u) && pos[u] > t) later.push_back(u);
    for (std::size_t p = 0; p < later.size(); ++p)
      for (std::size_t q = p + 1; q < later.size(); ++q)
        if (!a(later[p], later[q])) return false;
  }
  return true;
}

std::optional<std::vector<std::size_t>> perfect_elimination_order(const AdjacencyMatrix& a) {
  // Maximum cardinality search; the reverse visiting order is a perfect
  // elimination order exactly when the graph is chordal.
  const std::size_t v = a.vertex_count();
  std::vector<std::size_t> weight(v, 0);
  std::vector<char> visited(v, 0);
  std::vector<std::size_t> visit;
  visit.reserve(v);
  for (std::size_t step = 0; step < v; ++step) {
    std::size_t pick = v;
    for (std::size_t u = 0; u < v; ++u)
      if (!visited[u] && (pick == v || weight[u] > weight[pick])) pick = u;
    visited[pick] = 1;
    visit.push_back(pick);
    for (std::size_t u = 0; u < v; ++u)
      if (!visited[u] && a(pick, u)) ++weight[u];
  }
  std::reverse(visit.begin(), visit.end());
  if (!is_perfect_elimination_order(a, visit)) return std::nullopt;
  return visit;
}

CliqueMatrix cholesky_pattern_clique_matrix(const AdjacencyMatrix& a,
                                            std::span<const std::size_t> order) {
  if (!is_perfect_elimination_order(a, order))
    throw NotDecomposableError("vertex order is not a perfect elimination order");
  const std::size_t v = a.vertex_count();
  std::vector<std::size_t> pos(v);
  for (std::size_t t = 0; t < v; ++t) pos[order[t]] = t;
  std::vector<std::vector<std::size_t>> cols;
  for (std::size_t t = 0; t < v; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t u = 0; u < v; ++u)
      if (a(order[t], u) && pos[u] >= t) members.push_back(u);
    cols.push_back(std::move(members));
  }
  return CliqueMatrix::from_columns(v, cols);
}

CliqueMatrix cholesky_pattern_clique_matrix(const AdjacencyMatrix& a) {
  std::vector<std::size_t> order(a.vertex_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return cholesky_pattern_clique_matrix(a, order);
}

}  // namespace cliquemat
