#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ibd/linalg.hpp"

namespace ibd {

using Edge = std::pair<int, int>;

/// Finite connected simple graph. Immutable once built.
///
/// Edges are stored normalized (smaller index first) and sorted. The
/// self-adjacency convention x ~ x of interaction matrices is not stored
/// as an edge and does not contribute to degree().
class Graph {
 public:
  int num_vertices() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int x) const;
  int degree(int x) const;
  bool adjacent(int x, int y) const;
  int max_degree() const;

  friend Graph build_graph(int num_vertices, const std::vector<Edge>& edge_list);

 private:
  Graph() = default;
  void check_vertex(int x) const;

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// A real matrix whose off-diagonal entry (x,y) vanishes unless x and y are
/// adjacent. Only obtainable through validate_interaction() or
/// incidence_matrix(), so holding one means the pattern was checked.
class InteractionMatrix {
 public:
  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int x, int y) const { return m_(x, y); }

  friend InteractionMatrix validate_interaction(const Graph& g, const Matrix& m);

 private:
  explicit InteractionMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Throws InvalidEdge for self-loops, out-of-range or duplicate edges and
/// DisconnectedGraph when some vertex is unreachable from vertex 0.
Graph build_graph(int num_vertices, const std::vector<Edge>& edge_list);

/// 0/1 adjacency matrix with zero diagonal (the I_Λ of A = αE + βI_Λ).
InteractionMatrix incidence_matrix(const Graph& g);

InteractionMatrix validate_interaction(const Graph& g, const Matrix& m);

int degree(const Graph& g, int x);

// Common families.
Graph path_graph(int num_vertices);
Graph star_graph(int leaves);
Graph cycle_graph(int num_vertices);
Graph complete_graph(int num_vertices);

/// Text form: "n <num_vertices>" then one "e <u> <v>" line per edge.
/// Blank lines and lines starting with '#' are ignored.
Graph parse_graph(const std::string& text);
Graph read_graph_file(const std::string& path);
std::string format_graph(const Graph& g);

}  // namespace ibd
