#include "ibd/chain.hpp"

#include <cmath>
#include <sstream>

#include "ibd/error.hpp"
#include "ibd/format.hpp"

namespace ibd {

ChainSpec::ChainSpec(Graph graph, InteractionMatrix birth, InteractionMatrix death, Spin l, Spin r)
    : graph_(std::move(graph)), birth_(std::move(birth)), death_(std::move(death)), l_(l), r_(r) {
  if (l_ < 0) throw InvalidConfiguration("lower truncation l must be >= 0, got " + std::to_string(l_));
  if (r_ <= 0) throw InvalidConfiguration("upper truncation r must be > 0, got " + std::to_string(r_));
  if (birth_.dim() != graph_.num_vertices() || death_.dim() != graph_.num_vertices()) {
    throw DimensionMismatch("interaction matrices do not match the graph size");
  }
  birth_rows_ = sparse_rows(birth_.matrix());
  death_rows_ = sparse_rows(death_.matrix());
}

std::vector<std::vector<ChainSpec::Entry>> ChainSpec::sparse_rows(const Matrix& m) {
  std::vector<std::vector<Entry>> rows(m.rows());
  for (int x = 0; x < m.rows(); ++x)
    for (int y = 0; y < m.cols(); ++y)
      if (m(x, y) != 0.0) rows[x].push_back({y, m(x, y)});
  return rows;
}

double ChainSpec::birth_exponent(const Configuration& xi, int x) const {
  double s = 0.0;
  for (const auto& e : birth_rows_[x]) s += e.value * static_cast<double>(xi[e.col]);
  return s;
}

double ChainSpec::death_exponent(const Configuration& xi, int x) const {
  double s = 0.0;
  for (const auto& e : death_rows_[x]) s += e.value * static_cast<double>(xi[e.col]);
  return s;
}

bool ChainSpec::contains(const Configuration& xi) const {
  if (static_cast<int>(xi.size()) != num_vertices()) return false;
  for (Spin s : xi)
    if (s < -l_ || s > r_) return false;
  return true;
}

void ChainSpec::check(const Configuration& xi) const {
  if (static_cast<int>(xi.size()) != num_vertices()) {
    throw InvalidConfiguration("configuration has " + std::to_string(xi.size()) +
                               " spins, graph has " + std::to_string(num_vertices()) +
                               " vertices");
  }
  for (std::size_t x = 0; x < xi.size(); ++x) {
    if (xi[x] < -l_ || xi[x] > r_) {
      throw InvalidConfiguration("spin " + std::to_string(x) + " = " + std::to_string(xi[x]) +
                                 " outside [" + std::to_string(-l_) + ", " +
                                 std::to_string(r_) + "]");
    }
  }
}

ChainSpec make_chain_spec(const Graph& g, const Matrix& birth, const Matrix& death, Spin l, Spin r) {
  return ChainSpec(g, validate_interaction(g, birth), validate_interaction(g, death), l, r);
}

namespace {

double guarded_exp(double exponent, int x, const char* which) {
  if (!(std::abs(exponent) <= kMaxExponent)) {
    throw RateOverflow(std::string(which) + " rate exponent " + std::to_string(exponent) +
                       " at vertex " + std::to_string(x));
  }
  return std::exp(exponent);
}

}  // namespace

double birth_rate(const ChainSpec& spec, const Configuration& xi, int x) {
  if (xi[x] >= spec.upper()) return 0.0;
  return guarded_exp(spec.birth_exponent(xi, x), x, "birth");
}

double death_rate(const ChainSpec& spec, const Configuration& xi, int x) {
  if (xi[x] <= -spec.lower()) return 0.0;
  return guarded_exp(spec.death_exponent(xi, x), x, "death");
}

StateSpace::StateSpace(const ChainSpec& spec, std::int64_t cap)
    : num_vertices_(spec.num_vertices()),
      l_(spec.lower()),
      radix_(spec.lower() + spec.upper() + 1),
      size_(1) {
  for (int i = 0; i < num_vertices_; ++i) {
    if (size_ > cap / radix_) {
      throw StateSpaceTooLarge(std::to_string(radix_) + "^" + std::to_string(num_vertices_) +
                               " states exceed the cap of " + std::to_string(cap));
    }
    size_ *= radix_;
  }
}

Configuration StateSpace::configuration(std::int64_t index) const {
  Configuration xi(num_vertices_);
  for (int x = 0; x < num_vertices_; ++x) {
    xi[x] = index % radix_ - l_;
    index /= radix_;
  }
  return xi;
}

std::int64_t StateSpace::index(const Configuration& xi) const {
  std::int64_t idx = 0;
  for (int x = num_vertices_ - 1; x >= 0; --x) idx = idx * radix_ + (xi[x] + l_);
  return idx;
}

RateMatrix build_generator(const ChainSpec& spec, std::int64_t cap) {
  const StateSpace space(spec, cap);
  const int n = spec.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(space.size()) * (2 * n + 1));
  for (std::int64_t i = 0; i < space.size(); ++i) {
    Configuration xi = space.configuration(i);
    double out = 0.0;
    for (int x = 0; x < n; ++x) {
      const double up = birth_rate(spec, xi, x);
      const double down = death_rate(spec, xi, x);
      if (up > 0.0) {
        ++xi[x];
        triplets.emplace_back(i, space.index(xi), up);
        --xi[x];
      }
      if (down > 0.0) {
        --xi[x];
        triplets.emplace_back(i, space.index(xi), down);
        ++xi[x];
      }
      out += up + down;
    }
    triplets.emplace_back(i, i, -out);
  }
  RateMatrix q(space.size(), space.size());
  q.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

Vector stationary_solve(const ChainSpec& spec, std::int64_t cap) {
  const RateMatrix q = build_generator(spec, cap);
  const auto size = q.rows();
  Matrix system = Matrix(q.transpose());
  system.row(size - 1).setOnes();
  Vector rhs = Vector::Zero(size);
  rhs(size - 1) = 1.0;
  Vector pi = system.partialPivLu().solve(rhs);

  const double residual = (q.transpose() * pi).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, Matrix(q).cwiseAbs().rowwise().sum().maxCoeff());
  if (!pi.allFinite() || residual > 1e-10 * scale) {
    throw SingularSystem("stationary solve residual " + std::to_string(residual));
  }
  return pi;
}

double gibbs_exponent(const Matrix& a, const Configuration& xi) {
  const int n = static_cast<int>(xi.size());
  Vector v(n);
  for (int x = 0; x < n; ++x) v(x) = static_cast<double>(xi[x]);
  return 0.5 * (v.dot(a * v) - a.diagonal().dot(v));
}

namespace {

Matrix symmetric_drift(const ChainSpec& spec) {
  Matrix a = spec.drift_matrix();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (asymmetry(a) > 1e-12 * scale) {
    throw AsymmetricA("A = A_b - A_d is not symmetric (max |A - Aᵀ| = " +
                      std::to_string(asymmetry(a)) + ")");
  }
  return a;
}

}  // namespace

GibbsDistribution gibbs_measure(const ChainSpec& spec, std::int64_t cap) {
  const Matrix a = symmetric_drift(spec);
  const StateSpace space(spec, cap);
  Vector log_w(space.size());
  for (std::int64_t i = 0; i < space.size(); ++i) {
    log_w(i) = gibbs_exponent(a, space.configuration(i));
  }
  const double shift = log_w.maxCoeff();
  Vector w = (log_w.array() - shift).exp().matrix();
  const double total = w.sum();
  return {w / total, shift + std::log(total)};
}

double check_detailed_balance(const ChainSpec& spec, std::int64_t cap) {
  const Matrix a = symmetric_drift(spec);
  const GibbsDistribution mu = gibbs_measure(spec, cap);
  const StateSpace space(spec, cap);
  const int n = spec.num_vertices();
  double worst = 0.0;
  for (std::int64_t i = 0; i < space.size(); ++i) {
    Configuration xi = space.configuration(i);
    for (int x = 0; x < n; ++x) {
      if (xi[x] >= spec.upper()) continue;
      double drift_x = 0.0;
      for (int y = 0; y < n; ++y) drift_x += a(x, y) * static_cast<double>(xi[y]);
      const double here = mu.probabilities(i);
      const double up_rate = std::exp(spec.birth_exponent(xi, x));
      const double down_rate = std::exp(spec.death_exponent(xi, x));
      ++xi[x];
      const double there = mu.probabilities(space.index(xi));
      --xi[x];
      worst = std::max(worst, std::abs(std::exp(drift_x) * here - there));
      // The two-sided products scale with the death rate; compare at unit scale.
      worst = std::max(worst, std::abs(up_rate * here - there * down_rate) /
                                  std::max(1.0, down_rate));
    }
  }
  return worst;
}

std::string distribution_csv(const ChainSpec& spec, const Vector& probabilities) {
  const StateSpace space(spec, probabilities.size());
  if (space.size() != probabilities.size()) {
    throw DimensionMismatch("distribution length does not match the state space");
  }
  std::ostringstream out;
  out << "state_index";
  for (int x = 0; x < spec.num_vertices(); ++x) out << ",s" << x;
  out << ",probability\n";
  for (std::int64_t i = 0; i < space.size(); ++i) {
    out << i;
    for (Spin s : space.configuration(i)) out << "," << s;
    out << "," << format_double(probabilities(i)) << "\n";
  }
  return out.str();
}

}  // namespace ibd
