#include "ibd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ibd/error.hpp"
#include "ibd/format.hpp"

namespace ibd {

std::string to_string(SpectralMethod m) {
  switch (m) {
    case SpectralMethod::closed_form_star: return "closed_form_star";
    case SpectralMethod::closed_form_path: return "closed_form_path";
    case SpectralMethod::gershgorin_bound: return "gershgorin_bound";
    case SpectralMethod::numeric: return "numeric";
  }
  return "unknown";
}

std::vector<double> eigen_sym(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw NotSymmetric("matrix is not square");
  if (n == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (asymmetry(m) > 1e-12 * scale) {
    throw NotSymmetric("max |M - Mᵀ| = " + std::to_string(asymmetry(m)));
  }

  Matrix a = 0.5 * (m + m.transpose());
  const double frob = a.norm();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-14 * frob) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          a(r, p) = a(p, r) = c * g - s * h;
          a(r, q) = a(q, r) = s * g + c * h;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

Matrix matrix_exp(const Matrix& m, double t) {
  const int n = static_cast<int>(m.rows());
  Matrix x = m * t;
  const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  x /= std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = term * x / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Matrix negated_drift(const Graph& g, double alpha, double beta) {
  const int n = g.num_vertices();
  return -(alpha * Matrix::Identity(n, n) + beta * incidence_matrix(g).matrix());
}

namespace {

SpectralReport finish(std::vector<double> eigenvalues, SpectralMethod method, bool criterion) {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  SpectralReport r;
  r.eigenvalues = std::move(eigenvalues);
  r.method = method;
  r.boundary = std::abs(r.min_eigenvalue()) <= kPdTolerance;
  r.positive_definite = r.min_eigenvalue() > kPdTolerance;
  r.criterion_holds = criterion;
  return r;
}

}  // namespace

SpectralReport star_spectrum(int m, double alpha, double beta) {
  if (m < 2) throw ValidationError("star_spectrum needs m >= 2, got " + std::to_string(m));
  const double root = std::sqrt(static_cast<double>(m));
  std::vector<double> ev(m - 1, -alpha);
  ev.push_back(-alpha - beta * root);
  ev.push_back(-alpha + beta * root);
  return finish(std::move(ev), SpectralMethod::closed_form_star,
                alpha < 0 && alpha + std::abs(beta) * root < 0);
}

SpectralReport path_spectrum(int n, double alpha, double beta) {
  if (n < 0) throw ValidationError("path_spectrum needs n >= 0, got " + std::to_string(n));
  const double denom = n + 3;
  std::vector<double> ev;
  ev.reserve(n + 2);
  for (int k = 1; k <= n + 2; ++k) {
    ev.push_back(-alpha - 2.0 * beta * std::cos(k * std::numbers::pi / denom));
  }
  // Two-sided form of the criterion; the cosine spectrum is symmetric in k.
  const bool criterion =
      alpha < 0 && alpha + 2.0 * std::abs(beta) * std::cos(std::numbers::pi / denom) < 0;
  return finish(std::move(ev), SpectralMethod::closed_form_path, criterion);
}

SpectralReport classify_pd(const Graph& g, double alpha, double beta) {
  const int n = g.num_vertices();
  std::vector<int> degrees(n);
  for (int x = 0; x < n; ++x) degrees[x] = g.degree(x);
  const int max_deg = g.max_degree();
  const int min_deg = *std::min_element(degrees.begin(), degrees.end());
  const auto num_edges = static_cast<int>(g.edges().size());

  if (n >= 3 && max_deg == n - 1 && num_edges == n - 1) {
    return star_spectrum(n - 1, alpha, beta);
  }
  if (n >= 2 && num_edges == n - 1 && max_deg <= 2) {
    return path_spectrum(n - 2, alpha, beta);
  }

  const Matrix a_tilde = negated_drift(g, alpha, beta);
  auto numeric = eigen_sym(a_tilde);
  if (min_deg == max_deg && max_deg >= 1) {
    const bool criterion = alpha < 0 && alpha + std::abs(beta) * max_deg < 0;
    return finish(std::move(numeric), SpectralMethod::gershgorin_bound, criterion);
  }
  const bool dominant = alpha < 0 && alpha + std::abs(beta) * max_deg < 0;
  return finish(std::move(numeric),
                dominant ? SpectralMethod::gershgorin_bound : SpectralMethod::numeric, dominant);
}

double spectral_abscissa(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("spectral_abscissa needs a square matrix");
  if (a.rows() == 0) throw DimensionMismatch("spectral_abscissa of an empty matrix");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (asymmetry(a) <= 1e-12 * scale) return eigen_sym(0.5 * (a + a.transpose())).back();

  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw InconclusiveSpectrum("real Schur iteration did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& a) { return spectral_abscissa(a) < -kPdTolerance; }

std::string spectral_report_csv(const SpectralReport& r) {
  std::ostringstream out;
  out << "method,pd,min_eig,max_eig\n"
      << to_string(r.method) << "," << (r.positive_definite ? "true" : "false") << ","
      << format_double(r.min_eigenvalue()) << "," << format_double(r.max_eigenvalue()) << "\n";
  return out.str();
}

std::string eigenvalues_csv(const SpectralReport& r) {
  std::ostringstream out;
  out << "index,eigenvalue\n";
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    out << i << "," << format_double(r.eigenvalues[i]) << "\n";
  }
  return out.str();
}

}  // namespace ibd
