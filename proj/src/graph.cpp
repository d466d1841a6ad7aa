#include "ibd/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ibd/error.hpp"

namespace ibd {

const std::vector<int>& Graph::neighbors(int x) const {
  check_vertex(x);
  return adjacency_[x];
}

int Graph::degree(int x) const {
  check_vertex(x);
  return static_cast<int>(adjacency_[x].size());
}

bool Graph::adjacent(int x, int y) const {
  check_vertex(x);
  check_vertex(y);
  const auto& nb = adjacency_[x];
  return std::binary_search(nb.begin(), nb.end(), y);
}

int Graph::max_degree() const {
  int best = 0;
  for (const auto& nb : adjacency_) best = std::max(best, static_cast<int>(nb.size()));
  return best;
}

void Graph::check_vertex(int x) const {
  if (x < 0 || x >= num_vertices()) {
    throw IndexOutOfRange("vertex " + std::to_string(x) + " not in [0, " +
                          std::to_string(num_vertices()) + ")");
  }
}

Graph build_graph(int num_vertices, const std::vector<Edge>& edge_list) {
  if (num_vertices < 1) {
    throw InvalidEdge("graph needs at least one vertex, got " + std::to_string(num_vertices));
  }
  Graph g;
  g.adjacency_.assign(num_vertices, {});
  std::set<Edge> seen;
  for (auto [u, v] : edge_list) {
    const std::string label = "(" + std::to_string(u) + "," + std::to_string(v) + ")";
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) {
      throw InvalidEdge("edge " + label + " out of range");
    }
    if (u == v) throw InvalidEdge("self-loop " + label);
    Edge e{std::min(u, v), std::max(u, v)};
    if (!seen.insert(e).second) throw InvalidEdge("duplicate edge " + label);
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
  g.edges_.assign(seen.begin(), seen.end());

  std::vector<char> reached(num_vertices, 0);
  std::vector<int> stack{0};
  reached[0] = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y : g.adjacency_[x]) {
      if (!reached[y]) {
        reached[y] = 1;
        stack.push_back(y);
      }
    }
  }
  for (int x = 0; x < num_vertices; ++x) {
    if (!reached[x]) {
      throw DisconnectedGraph("vertex " + std::to_string(x) + " unreachable from vertex 0");
    }
  }
  return g;
}

InteractionMatrix incidence_matrix(const Graph& g) {
  const int n = g.num_vertices();
  Matrix m = Matrix::Zero(n, n);
  for (auto [u, v] : g.edges()) {
    m(u, v) = 1.0;
    m(v, u) = 1.0;
  }
  return validate_interaction(g, m);
}

InteractionMatrix validate_interaction(const Graph& g, const Matrix& m) {
  const int n = g.num_vertices();
  if (m.rows() != n || m.cols() != n) {
    throw DimensionMismatch("interaction matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", graph has " + std::to_string(n) +
                            " vertices");
  }
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x != y && m(x, y) != 0.0 && !g.adjacent(x, y)) throw PatternViolation(x, y, m(x, y));
    }
  }
  return InteractionMatrix(m);
}

int degree(const Graph& g, int x) { return g.degree(x); }

Graph path_graph(int num_vertices) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < num_vertices; ++i) edges.emplace_back(i, i + 1);
  return build_graph(num_vertices, edges);
}

Graph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return build_graph(leaves + 1, edges);
}

Graph cycle_graph(int num_vertices) {
  if (num_vertices < 3) throw InvalidEdge("cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  for (int i = 0; i < num_vertices; ++i) edges.emplace_back(i, (i + 1) % num_vertices);
  return build_graph(num_vertices, edges);
}

Graph complete_graph(int num_vertices) {
  std::vector<Edge> edges;
  for (int i = 0; i < num_vertices; ++i)
    for (int j = i + 1; j < num_vertices; ++j) edges.emplace_back(i, j);
  return build_graph(num_vertices, edges);
}

Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1;
  int line_no = 0;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto fail = [&](const std::string& msg) {
      throw InvalidEdge("graph line " + std::to_string(line_no) + ": " + msg);
    };
    if (tag == "n") {
      if (n >= 0) fail("repeated 'n' line");
      if (!(ls >> n) || n < 1) fail("expected 'n <num_vertices>' with a positive count");
    } else if (tag == "e") {
      if (n < 0) fail("'e' line before 'n' line");
      int u = 0, v = 0;
      if (!(ls >> u >> v)) fail("expected 'e <u> <v>'");
      edges.emplace_back(u, v);
    } else {
      fail("unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  if (n < 0) throw InvalidEdge("graph text has no 'n' line");
  return build_graph(n, edges);
}

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph(ss.str());
}

std::string format_graph(const Graph& g) {
  std::ostringstream out;
  out << "n " << g.num_vertices() << "\n";
  for (auto [u, v] : g.edges()) out << "e " << u << " " << v << "\n";
  return out.str();
}

}  // namespace ibd
