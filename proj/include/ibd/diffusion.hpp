#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"
#include "ibd/path.hpp"

namespace ibd {

/// A = A_b - A_d of the limit SDE du = Au dt + √2 dW.
class DriftMatrix {
 public:
  explicit DriftMatrix(Matrix a);
  /// Difference of two interaction matrices on the same graph.
  DriftMatrix(const InteractionMatrix& birth, const InteractionMatrix& death);

  const Matrix& a() const { return a_; }
  const Vector& alpha() const { return alpha_; }
  /// Ã = -A.
  Matrix negated() const { return -a_; }
  int dim() const { return static_cast<int>(a_.rows()); }
  bool symmetric(double tol = 1e-12) const;

 private:
  Matrix a_;
  Vector alpha_;
};

using DiffusionPath = SamplePath;

struct GaussianLaw {
  Vector mean;
  Matrix covariance;
};

bool is_hurwitz(const DriftMatrix& a);

/// A·u.
Vector drift(const DriftMatrix& a, const Vector& u);

/// Euler–Maruyama: u_{k+1} = u_k + A u_k h + √(2h) z_k. With noise off this is
/// explicit Euler for u̇ = Au. The grid is uniform with step dt except for a
/// shorter final step when dt does not divide t_end. Every `record_stride`-th
/// point plus the terminal point is recorded.
DiffusionPath euler_maruyama(const DriftMatrix& a, const Vector& u0, double dt, double t_end,
                             std::uint64_t seed, bool noise_on = true, int record_stride = 1);

/// Terminal state only; draws from `rng` so replicas can share a stream layout.
template <class Rng>
Vector euler_maruyama_terminal(const DriftMatrix& a, const Vector& u0, double dt, double t_end,
                               Rng& rng);

/// Mean e^{At}u0 and covariance 2∫₀ᵗ e^{As}e^{Aᵀs} ds. The integral uses
/// composite Simpson with interval halving until the relative Frobenius change
/// drops below `rel_tol`; more than `max_halvings` refinements throws
/// QuadratureNotConverged.
GaussianLaw exact_transition(const DriftMatrix& a, const Vector& u0, double t,
                             double rel_tol = 1e-8, int max_halvings = 20);

/// Zero-mean stationary law. Symmetric A: covariance (-A)^{-1}. Otherwise the
/// solution of AΣ + ΣAᵀ = -2I. Throws NotHurwitz when no stationary law exists.
GaussianLaw stationary_gaussian(const DriftMatrix& a);

/// ‖AΣ + ΣAᵀ + 2I‖_∞ (max entry).
double lyapunov_residual(const DriftMatrix& a, const Matrix& sigma);

/// ½(Au,u): log of the invariant density up to a constant. Symmetric A only.
double stationary_log_density_unnormalized(const DriftMatrix& a, const Vector& u);

/// "kind,row,col,value" rows: mean entries, then covariance in row-major order.
std::string gaussian_law_csv(const GaussianLaw& law);

// ---------------------------------------------------------------------------

template <class Rng>
Vector euler_maruyama_terminal(const DriftMatrix& a, const Vector& u0, double dt, double t_end,
                               Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u = u0;
  Vector z(u.size());
  double t = 0.0;
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  for (long long k = 0; k < steps; ++k) {
    const double h = std::min(dt, t_end - t);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    u += h * (a.a() * u) + std::sqrt(2.0 * h) * z;
    t = (k + 1 == steps) ? t_end : (k + 1) * dt;
  }
  return u;
}

}  // namespace ibd
