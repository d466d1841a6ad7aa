#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"

namespace ibd {

using Spin = std::int64_t;
/// Spin vector ξ indexed by vertex.
using Configuration = std::vector<Spin>;
using RateMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Rate exponents beyond this magnitude raise RateOverflow.
inline constexpr double kMaxExponent = 700.0;
inline constexpr std::int64_t kDefaultStateCap = 200'000;
/// Dense solves (stationary_solve) allocate states² doubles.
inline constexpr std::int64_t kDefaultDenseStateCap = 2'048;

/// Interacting truncated birth-and-death chain on {-l,…,r}^Λ: spin x moves up
/// at rate exp((A_b ξ)_x) while ξ_x < r and down at rate exp((A_d ξ)_x) while
/// ξ_x > -l.
class ChainSpec {
 public:
  ChainSpec(Graph graph, InteractionMatrix birth, InteractionMatrix death, Spin l, Spin r);

  const Graph& graph() const { return graph_; }
  const InteractionMatrix& birth() const { return birth_; }
  const InteractionMatrix& death() const { return death_; }
  Spin lower() const { return l_; }
  Spin upper() const { return r_; }
  int num_vertices() const { return graph_.num_vertices(); }

  /// A = A_b - A_d.
  Matrix drift_matrix() const { return birth_.matrix() - death_.matrix(); }

  /// (A_b ξ)_x and (A_d ξ)_x using the stored sparsity pattern.
  double birth_exponent(const Configuration& xi, int x) const;
  double death_exponent(const Configuration& xi, int x) const;

  bool contains(const Configuration& xi) const;
  /// Throws InvalidConfiguration unless xi has the right size and lies in the box.
  void check(const Configuration& xi) const;

 private:
  struct Entry {
    int col;
    double value;
  };
  static std::vector<std::vector<Entry>> sparse_rows(const Matrix& m);

  Graph graph_;
  InteractionMatrix birth_;
  InteractionMatrix death_;
  Spin l_;
  Spin r_;
  std::vector<std::vector<Entry>> birth_rows_;
  std::vector<std::vector<Entry>> death_rows_;
};

/// Builds A_b, A_d from raw matrices, validating their pattern against g.
ChainSpec make_chain_spec(const Graph& g, const Matrix& birth, const Matrix& death, Spin l, Spin r);

double birth_rate(const ChainSpec& spec, const Configuration& xi, int x);
double death_rate(const ChainSpec& spec, const Configuration& xi, int x);

/// Enumeration of Ω = {-l,…,r}^Λ as a mixed-radix odometer: vertex 0 varies
/// fastest and each spin runs from -l upward.
class StateSpace {
 public:
  explicit StateSpace(const ChainSpec& spec, std::int64_t cap = kDefaultStateCap);

  std::int64_t size() const { return size_; }
  Configuration configuration(std::int64_t index) const;
  std::int64_t index(const Configuration& xi) const;

 private:
  int num_vertices_;
  Spin l_;
  std::int64_t radix_;
  std::int64_t size_;
};

/// Q[ξ, ξ±e(x)] = birth/death rate; diagonal holds minus the row sum.
RateMatrix build_generator(const ChainSpec& spec, std::int64_t cap = kDefaultStateCap);

/// Solves πQ = 0, Σπ = 1 by dense LU with one balance equation replaced by
/// the normalization.
Vector stationary_solve(const ChainSpec& spec, std::int64_t cap = kDefaultDenseStateCap);

struct GibbsDistribution {
  Vector probabilities;  // odometer order, see StateSpace
  double log_partition = 0.0;
};

/// ½[(Aξ,ξ) - (α,ξ)] with α the diagonal of A.
double gibbs_exponent(const Matrix& a, const Configuration& xi);

/// Product-form stationary law for symmetric A = A_b - A_d. Throws
/// AsymmetricA otherwise.
GibbsDistribution gibbs_measure(const ChainSpec& spec, std::int64_t cap = kDefaultStateCap);

/// Max residual of e^{(Aξ)_x} μ(ξ) = μ(ξ+e(x)) and of the two-sided form
/// e^{(A_b ξ)_x} μ(ξ) = μ(ξ+e(x)) e^{(A_d ξ)_x} over all ξ with ξ_x < r. The
/// two-sided residual is divided by max(1, e^{(A_d ξ)_x}).
double check_detailed_balance(const ChainSpec& spec, std::int64_t cap = kDefaultStateCap);

/// "state_index,s0,…,s{n-1},probability".
std::string distribution_csv(const ChainSpec& spec, const Vector& probabilities);

}  // namespace ibd
