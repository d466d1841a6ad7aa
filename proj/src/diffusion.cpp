#include "ibd/diffusion.hpp"

#include <cmath>
#include <sstream>

#include "ibd/error.hpp"
#include "ibd/format.hpp"
#include "ibd/rng.hpp"
#include "ibd/spectral.hpp"

namespace ibd {

DriftMatrix::DriftMatrix(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() == 0) {
    throw DimensionMismatch("drift matrix must be square and non-empty");
  }
  alpha_ = a_.diagonal();
}

DriftMatrix::DriftMatrix(const InteractionMatrix& birth, const InteractionMatrix& death)
    : DriftMatrix(Matrix(birth.matrix() - death.matrix())) {}

bool DriftMatrix::symmetric(double tol) const {
  return asymmetry(a_) <= tol * std::max(1.0, a_.cwiseAbs().maxCoeff());
}

bool is_hurwitz(const DriftMatrix& a) { return is_hurwitz(a.a()); }

namespace {

void check_dim(const DriftMatrix& a, const Vector& u, const char* what) {
  if (u.size() != a.dim()) {
    throw DimensionMismatch(std::string(what) + " has length " + std::to_string(u.size()) +
                            ", drift matrix is " + std::to_string(a.dim()) + "x" +
                            std::to_string(a.dim()));
  }
}

}  // namespace

Vector drift(const DriftMatrix& a, const Vector& u) {
  check_dim(a, u, "state");
  return a.a() * u;
}

DiffusionPath euler_maruyama(const DriftMatrix& a, const Vector& u0, double dt, double t_end,
                             std::uint64_t seed, bool noise_on, int record_stride) {
  check_dim(a, u0, "initial state");
  if (!(dt > 0.0) || !(dt <= t_end)) {
    throw ValidationError("euler_maruyama needs 0 < dt <= t_end");
  }
  if (record_stride < 1) throw ValidationError("record_stride must be >= 1");

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DiffusionPath path;
  path.times.push_back(0.0);
  path.states.push_back(u0);

  Vector u = u0;
  Vector z = Vector::Zero(u.size());
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  double t = 0.0;
  for (long long k = 0; k < steps; ++k) {
    const double h = std::min(dt, t_end - t);
    if (noise_on) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    }
    u += h * (a.a() * u) + std::sqrt(2.0 * h) * z;
    t = (k + 1 == steps) ? t_end : (k + 1) * dt;
    if ((k + 1) % record_stride == 0 || k + 1 == steps) {
      path.times.push_back(t);
      path.states.push_back(u);
    }
  }
  return path;
}

namespace {

// Simpson sum of e^{As}e^{Aᵀs} on [0, t] with `intervals` (even) pieces.
Matrix simpson_gram(const Matrix& a, double t, long long intervals) {
  const int d = static_cast<int>(a.rows());
  const double h = t / static_cast<double>(intervals);
  const Matrix step = matrix_exp(a, h);
  constexpr long long kResync = 64;

  Matrix sum = Matrix::Zero(d, d);
  Matrix e = Matrix::Identity(d, d);
  for (long long k = 0; k <= intervals; ++k) {
    if (k > 0) e = (k % kResync == 0) ? matrix_exp(a, k * h) : Matrix(e * step);
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum.noalias() += w * (e * e.transpose());
  }
  return sum * (h / 3.0);
}

}  // namespace

GaussianLaw exact_transition(const DriftMatrix& a, const Vector& u0, double t, double rel_tol,
                             int max_halvings) {
  check_dim(a, u0, "initial state");
  if (!(t >= 0.0)) throw ValidationError("exact_transition needs t >= 0");
  const int d = a.dim();
  if (t == 0.0) return {u0, Matrix::Zero(d, d)};

  GaussianLaw law;
  law.mean = matrix_exp(a.a(), t) * u0;

  long long intervals = 2;
  Matrix previous = simpson_gram(a.a(), t, intervals);
  for (int level = 1; level <= max_halvings; ++level) {
    intervals *= 2;
    Matrix current = simpson_gram(a.a(), t, intervals);
    const double change = (current - previous).norm() / current.norm();
    previous = std::move(current);
    if (change < rel_tol) {
      Matrix cov = 2.0 * previous;
      law.covariance = 0.5 * (cov + cov.transpose());
      return law;
    }
  }
  throw QuadratureNotConverged("covariance integral did not settle after " +
                               std::to_string(max_halvings) + " halvings");
}

GaussianLaw stationary_gaussian(const DriftMatrix& a) {
  const int d = a.dim();
  if (!is_hurwitz(a)) {
    throw NotHurwitz("spectral abscissa " + std::to_string(spectral_abscissa(a.a())) +
                     " >= 0: no stationary law");
  }
  GaussianLaw law{Vector::Zero(d), Matrix()};
  if (a.symmetric()) {
    law.covariance = a.negated().partialPivLu().inverse();
  } else {
    // vec(AΣ + ΣAᵀ) = (I⊗A + A⊗I) vec(Σ), column-major vec.
    const int n = d * d;
    Matrix kron = Matrix::Zero(n, n);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          kron(j * d + i, j * d + k) += a.a()(i, k);  // I⊗A
          kron(j * d + i, k * d + i) += a.a()(j, k);  // A⊗I
        }
      }
    }
    Vector rhs = Vector::Zero(n);
    for (int i = 0; i < d; ++i) rhs(i * d + i) = -2.0;
    Vector vec = kron.partialPivLu().solve(rhs);
    law.covariance = Eigen::Map<Matrix>(vec.data(), d, d);
  }
  law.covariance = 0.5 * (law.covariance + law.covariance.transpose());
  return law;
}

double lyapunov_residual(const DriftMatrix& a, const Matrix& sigma) {
  const int d = a.dim();
  return (a.a() * sigma + sigma * a.a().transpose() + 2.0 * Matrix::Identity(d, d))
      .cwiseAbs()
      .maxCoeff();
}

double stationary_log_density_unnormalized(const DriftMatrix& a, const Vector& u) {
  if (!a.symmetric()) throw AsymmetricA("invariant density formula needs symmetric A");
  check_dim(a, u, "point");
  return 0.5 * u.dot(a.a() * u);
}

std::string gaussian_law_csv(const GaussianLaw& law) {
  std::ostringstream out;
  out << "kind,row,col,value\n";
  for (Eigen::Index i = 0; i < law.mean.size(); ++i) {
    out << "mean," << i << ",0," << format_double(law.mean(i)) << "\n";
  }
  for (Eigen::Index i = 0; i < law.covariance.rows(); ++i) {
    for (Eigen::Index j = 0; j < law.covariance.cols(); ++j) {
      out << "cov," << i << "," << j << "," << format_double(law.covariance(i, j)) << "\n";
    }
  }
  return out.str();
}

}  // namespace ibd
