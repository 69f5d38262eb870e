#include "cliquemat/graph_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cliquemat/errors.hpp"

namespace cliquemat {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long parse_int(std::string_view tok, std::size_t line) {
  long long x = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
  return x;
}

std::size_t parse_index(std::string_view tok, std::size_t line) {
  const long long x = parse_int(tok, line);
  if (x < 0) throw ParseError(line, "negative vertex index " + std::string(tok));
  return static_cast<std::size_t>(x);
}

GraphFile read_dimacs(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> v;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (v) throw ParseError(lineno, "duplicate problem line");
      if (tok.size() != 4 || (tok[1] != "edge" && tok[1] != "col"))
        throw ParseError(lineno, "malformed header, expected 'p edge <V> <E>'");
      const std::size_t n = parse_index(tok[2], lineno);
      parse_index(tok[3], lineno);
      if (n == 0) throw ParseError(lineno, "graph must have at least one vertex");
      v = n;
    } else if (tok[0] == "e") {
      if (!v) throw ParseError(lineno, "edge line before the problem line");
      if (tok.size() != 3) throw ParseError(lineno, "malformed edge line");
      const std::size_t i = parse_index(tok[1], lineno);
      const std::size_t j = parse_index(tok[2], lineno);
      if (i < 1 || i > *v || j < 1 || j > *v)
        throw ParseError(lineno, "vertex index out of range");
      if (i != j) edges.emplace_back(i - 1, j - 1);
    } else {
      throw ParseError(lineno, "unrecognised line type '" + std::string(tok[0]) + "'");
    }
  }
  if (!v) throw ParseError(lineno, "missing problem line 'p edge <V> <E>'");
  return {AdjacencyMatrix::from_edges(*v, edges), {}};
}

GraphFile read_edgelist(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> declared;
  std::vector<std::pair<Edge, std::size_t>> edges;  // edge, source line
  std::size_t max_index = 0;
  bool any_index = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0].starts_with('#')) {
      // "# vertices V" (also "#vertices V")
      std::vector<std::string_view> rest = tok;
      if (rest[0] == "#") rest.erase(rest.begin());
      else rest[0].remove_prefix(1);
      if (!rest.empty() && rest[0] == "vertices") {
        if (rest.size() != 2) throw ParseError(lineno, "malformed '# vertices' header");
        if (declared) throw ParseError(lineno, "duplicate '# vertices' header");
        declared = parse_index(rest[1], lineno);
        if (*declared == 0) throw ParseError(lineno, "graph must have at least one vertex");
      }
      continue;
    }
    if (tok.size() != 2) throw ParseError(lineno, "expected 'i j'");
    const std::size_t i = parse_index(tok[0], lineno);
    const std::size_t j = parse_index(tok[1], lineno);
    if (declared && (i >= *declared || j >= *declared))
      throw ParseError(lineno, "vertex index out of range");
    max_index = std::max({max_index, i, j});
    any_index = true;
    if (i != j) edges.push_back({{i, j}, lineno});
  }
  std::size_t v = declared ? *declared : (any_index ? max_index + 1 : 0);
  if (v == 0) throw ParseError(0, "edge list declares no vertices");
  for (const auto& [e, ln] : edges)
    if (e.first >= v || e.second >= v) throw ParseError(ln, "vertex index out of range");
  std::vector<Edge> plain;
  plain.reserve(edges.size());
  for (const auto& [e, ln] : edges) plain.push_back(e);
  return {AdjacencyMatrix::from_edges(v, plain), {}};
}

// Minimal GML reader: keys, integers/reals, quoted strings and [ ] lists.
class GmlLexer {
 public:
  struct Token {
    enum Kind { word, string, open, close, end } kind;
    std::string text;
    std::size_t line;
  };

  explicit GmlLexer(std::istream& in)
      : text_(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()) {}

  Token next() {
    skip_space();
    if (pos_ >= text_.size()) return {Token::end, "", line_};
    const char ch = text_[pos_];
    if (ch == '[') return ++pos_, Token{Token::open, "[", line_};
    if (ch == ']') return ++pos_, Token{Token::close, "]", line_};
    if (ch == '"') {
      const std::size_t start_line = line_;
      std::string s;
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\n') ++line_;
        s += text_[pos_++];
      }
      if (pos_ >= text_.size()) throw ParseError(start_line, "unterminated string");
      ++pos_;
      return {Token::string, std::move(s), start_line};
    }
    std::string s;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '[' && text_[pos_] != ']' && text_[pos_] != '"')
      s += text_[pos_++];
    return {Token::word, std::move(s), line_};
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

class GmlParser {
 public:
  explicit GmlParser(std::istream& in) : lex_(in) {}

  GraphFile parse() {
    for (;;) {
      auto key = lex_.next();
      if (key.kind == Tok::end) throw ParseError(key.line, "no 'graph [' block found");
      if (key.kind != Tok::word) throw ParseError(key.line, "expected a key");
      if (key.text == "graph") {
        expect_open();
        return parse_graph();
      }
      skip_value();
    }
  }

 private:
  using Tok = GmlLexer::Token;

  struct Node {
    long long id;
    VertexAnnotation annotation;
    std::size_t line;
  };
  struct RawEdge {
    long long source, target;
    std::size_t line;
  };

  void expect_open() {
    auto t = lex_.next();
    if (t.kind != Tok::open) throw ParseError(t.line, "expected '['");
  }

  // Skips the value following a key: a scalar or a bracketed list.
  void skip_value() {
    auto t = lex_.next();
    if (t.kind == Tok::word || t.kind == Tok::string) return;
    if (t.kind != Tok::open) throw ParseError(t.line, "expected a value");
    int depth = 1;
    while (depth > 0) {
      auto u = lex_.next();
      if (u.kind == Tok::end) throw ParseError(u.line, "unterminated list");
      if (u.kind == Tok::open) ++depth;
      if (u.kind == Tok::close) --depth;
    }
  }

  Tok scalar() {
    auto t = lex_.next();
    if (t.kind != Tok::word && t.kind != Tok::string)
      throw ParseError(t.line, "expected a scalar value");
    return t;
  }

  GraphFile parse_graph() {
    std::vector<Node> nodes;
    std::vector<RawEdge> edges;
    for (;;) {
      auto key = lex_.next();
      if (key.kind == Tok::close) break;
      if (key.kind == Tok::end) throw ParseError(key.line, "unterminated graph block");
      if (key.kind != Tok::word) throw ParseError(key.line, "expected a key");
      if (key.text == "node") {
        expect_open();
        nodes.push_back(parse_node(key.line));
      } else if (key.text == "edge") {
        expect_open();
        edges.push_back(parse_edge(key.line));
      } else {
        skip_value();
      }
    }
    if (nodes.empty()) throw ParseError(0, "graph has no nodes");

    std::map<long long, std::size_t> index;
    GraphFile out;
    for (const auto& n : nodes) {
      if (!index.emplace(n.id, index.size()).second)
        throw ParseError(n.line, "duplicate node id " + std::to_string(n.id));
      out.annotations.push_back(n.annotation);
    }
    std::vector<Edge> plain;
    for (const auto& e : edges) {
      auto s = index.find(e.source);
      auto t = index.find(e.target);
      if (s == index.end() || t == index.end())
        throw ParseError(e.line, "vertex index out of range");
      if (s->second != t->second) plain.emplace_back(s->second, t->second);
    }
    out.adjacency = AdjacencyMatrix::from_edges(nodes.size(), plain);
    return out;
  }

  Node parse_node(std::size_t line) {
    Node n{0, {}, line};
    bool has_id = false;
    for (;;) {
      auto key = lex_.next();
      if (key.kind == Tok::close) break;
      if (key.kind != Tok::word) throw ParseError(key.line, "expected a key in node");
      if (key.text == "id") {
        auto v = scalar();
        n.id = parse_int(v.text, v.line);
        has_id = true;
      } else if (key.text == "label") {
        n.annotation.label = scalar().text;
      } else if (key.text == "value") {
        n.annotation.value = scalar().text;
      } else {
        skip_value();
      }
    }
    if (!has_id) throw ParseError(line, "node without id");
    return n;
  }

  RawEdge parse_edge(std::size_t line) {
    std::optional<long long> s, t;
    for (;;) {
      auto key = lex_.next();
      if (key.kind == Tok::close) break;
      if (key.kind != Tok::word) throw ParseError(key.line, "expected a key in edge");
      if (key.text == "source") {
        auto v = scalar();
        s = parse_int(v.text, v.line);
      } else if (key.text == "target") {
        auto v = scalar();
        t = parse_int(v.text, v.line);
      } else {
        skip_value();
      }
    }
    if (!s || !t) throw ParseError(line, "edge without source/target");
    return {*s, *t, line};
  }

  GmlLexer lex_;
};

bool looks_sparse(std::string_view line) {
  if (line.size() < 2 || line[0] != 'c') return false;
  const auto colon = line.find(':');
  if (colon == std::string_view::npos || colon < 2) return false;
  return std::all_of(line.begin() + 1, line.begin() + colon,
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "dimacs") return GraphFormat::dimacs;
  if (name == "edgelist") return GraphFormat::edgelist;
  if (name == "gml") return GraphFormat::gml;
  throw ConfigError("unknown graph format '" + std::string(name) + "'");
}

std::string_view to_string(GraphFormat format) {
  switch (format) {
    case GraphFormat::dimacs: return "dimacs";
    case GraphFormat::edgelist: return "edgelist";
    case GraphFormat::gml: return "gml";
  }
  return "?";
}

GraphFile read_graph(std::istream& in, GraphFormat format) {
  switch (format) {
    case GraphFormat::dimacs: return read_dimacs(in);
    case GraphFormat::edgelist: return read_edgelist(in);
    case GraphFormat::gml: return GmlParser(in).parse();
  }
  throw ConfigError("unknown graph format");
}

AdjacencyMatrix parse_graph(std::istream& in, GraphFormat format) {
  return read_graph(in, format).adjacency;
}

GraphFile read_graph_file(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return read_graph(in, format);
}

void write_dimacs(std::ostream& out, const AdjacencyMatrix& a) {
  out << "p edge " << a.vertex_count() << ' ' << a.edge_count() << '\n';
  for (const auto& [i, j] : a.edges()) out << "e " << i + 1 << ' ' << j + 1 << '\n';
}

void write_edgelist(std::ostream& out, const AdjacencyMatrix& a) {
  out << "# vertices " << a.vertex_count() << '\n';
  for (const auto& [i, j] : a.edges()) out << i << ' ' << j << '\n';
}

void write_clique_matrix_csv(std::ostream& out, const CliqueMatrix& z) {
  for (std::size_t i = 0; i < z.vertex_count(); ++i) {
    for (std::size_t c = 0; c < z.column_count(); ++c) {
      if (c) out << ',';
      out << (z(i, c) ? '1' : '0');
    }
    out << '\n';
  }
}

void write_clique_matrix_sparse(std::ostream& out, const CliqueMatrix& z,
                                const std::vector<VertexAnnotation>* annotations) {
  out << "# vertices " << z.vertex_count() << " columns " << z.column_count() << '\n';
  for (std::size_t c = 0; c < z.column_count(); ++c) {
    const auto members = z.column(c);
    out << 'c' << c + 1 << ':';
    for (std::size_t i : members) out << ' ' << i;
    out << '\n';
    if (annotations && annotations->size() == z.vertex_count()) {
      out << "#  ";
      for (std::size_t i : members) {
        const auto& ann = (*annotations)[i];
        out << " [" << ann.label.value_or(std::to_string(i));
        if (ann.value) out << " | " << *ann.value;
        out << ']';
      }
      out << '\n';
    }
  }
}

CliqueMatrix read_clique_matrix(std::istream& in, std::optional<std::size_t> vertex_count) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<bool> sparse;
  std::optional<std::size_t> header_v;
  std::vector<std::vector<std::size_t>> columns;
  std::vector<std::vector<int>> dense;
  std::size_t max_index = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto tok = split_ws(t.substr(1));
      if (tok.size() >= 2 && tok[0] == "vertices") header_v = parse_index(tok[1], lineno);
      continue;
    }
    if (!sparse) sparse = looks_sparse(t);
    if (*sparse) {
      if (!looks_sparse(t)) throw ParseError(lineno, "expected 'c<k>: v1 v2 ...'");
      const auto tok = split_ws(t.substr(t.find(':') + 1));
      std::vector<std::size_t> members;
      for (auto v : tok) {
        members.push_back(parse_index(v, lineno));
        max_index = std::max(max_index, members.back());
      }
      if (members.empty()) throw ParseError(lineno, "empty column");
      columns.push_back(std::move(members));
    } else {
      std::vector<int> row;
      std::size_t start = 0;
      while (start <= t.size()) {
        std::size_t comma = t.find(',', start);
        if (comma == std::string_view::npos) comma = t.size();
        const auto cell = trim(t.substr(start, comma - start));
        const long long x = parse_int(cell, lineno);
        if (x != 0 && x != 1) throw ParseError(lineno, "clique matrix entries must be 0 or 1");
        row.push_back(static_cast<int>(x));
        start = comma + 1;
      }
      if (!dense.empty() && row.size() != dense.front().size())
        throw ParseError(lineno, "ragged CSV row");
      dense.push_back(std::move(row));
    }
  }
  if (!sparse) throw ParseError(0, "empty clique matrix input");
  if (!*sparse) {
    try {
      return CliqueMatrix::from_dense(dense);
    } catch (const DimensionError& e) {
      throw ParseError(0, e.what());
    }
  }
  const std::size_t v = header_v ? *header_v : vertex_count ? *vertex_count : max_index + 1;
  if (max_index >= v) throw ParseError(0, "vertex index out of range");
  return CliqueMatrix::from_columns(v, columns);
}

}  // namespace cliquemat
