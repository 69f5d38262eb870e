#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cliquemat/graph.hpp"

namespace cliquemat {

enum class GraphFormat { dimacs, edgelist, gml };

/// Throws ConfigError for an unknown name.
GraphFormat parse_graph_format(std::string_view name);
std::string_view to_string(GraphFormat format);

/// Optional per-vertex fields carried through from GML input.
struct VertexAnnotation {
  std::optional<std::string> label;
  std::optional<std::string> value;
};

struct GraphFile {
  AdjacencyMatrix adjacency = AdjacencyMatrix::identity(1);
  /// Empty unless the input format carries annotations.
  std::vector<VertexAnnotation> annotations;
};

// Formats:
//   dimacs    "p edge V E" header, "e i j" lines (1-indexed), "c ..." comments.
//   edgelist  optional "# vertices V" header, "i j" per line (0-indexed).
//   gml       graph [ node [ id N label "..." value "..." ] edge [ source A target B ] ]
// Self loops are dropped and duplicate edges collapse. Errors throw
// ParseError carrying the offending line number.
GraphFile read_graph(std::istream& in, GraphFormat format);
AdjacencyMatrix parse_graph(std::istream& in, GraphFormat format);
GraphFile read_graph_file(const std::string& path, GraphFormat format);

void write_dimacs(std::ostream& out, const AdjacencyMatrix& a);
void write_edgelist(std::ostream& out, const AdjacencyMatrix& a);

// Clique-matrix text forms. The sparse form writes a "# vertices V columns C"
// header and one "c<k>: v1 v2 ..." line per column with 0-indexed vertices.
// When annotations are given, each column is followed by a comment line
// listing the member labels.
void write_clique_matrix_csv(std::ostream& out, const CliqueMatrix& z);
void write_clique_matrix_sparse(std::ostream& out, const CliqueMatrix& z,
                                const std::vector<VertexAnnotation>* annotations = nullptr);

/// Reads either text form (detected from the first data line). The sparse form
/// takes V from its header, else from `vertex_count`, else 1 + max index.
CliqueMatrix read_clique_matrix(std::istream& in,
                                std::optional<std::size_t> vertex_count = std::nullopt);

}  // namespace cliquemat
