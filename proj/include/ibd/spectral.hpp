#pragma once

#include <string>
#include <vector>

#include "ibd/graph.hpp"
#include "ibd/linalg.hpp"

namespace ibd {

/// Verdicts on a minimal eigenvalue within this distance of zero are
/// "boundary": reported as not positive definite.
inline constexpr double kPdTolerance = 1e-10;

enum class SpectralMethod { closed_form_star, closed_form_path, gershgorin_bound, numeric };

std::string to_string(SpectralMethod m);

/// Spectrum of Ã = -A for A = αE + βI_Λ and the positive-definiteness verdict.
struct SpectralReport {
  std::vector<double> eigenvalues;  // ascending
  bool positive_definite = false;
  bool boundary = false;  // |λ_min| <= kPdTolerance
  SpectralMethod method = SpectralMethod::numeric;
  // Whether the graph-family criterion in closed form holds. For the
  // constant-degree family this is α<0 ∧ α+|β|ν<0; for general graphs it is
  // the diagonal-dominance sufficient condition. The eigenvalue verdict
  // (positive_definite) is authoritative when the two disagree.
  bool criterion_holds = false;

  double min_eigenvalue() const { return eigenvalues.front(); }
  double max_eigenvalue() const { return eigenvalues.back(); }
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Throws NotSymmetric if |M - Mᵀ| exceeds 1e-12 (relative to max |M|).
std::vector<double> eigen_sym(const Matrix& m);

/// exp(t·M) by scaling and squaring of the truncated Taylor series.
Matrix matrix_exp(const Matrix& m, double t = 1.0);

/// Ã = -(αE + βI_Λ) for an explicit graph.
Matrix negated_drift(const Graph& g, double alpha, double beta);

/// Star with m leaves: -α (multiplicity m-1) and -α ∓ β√m.
SpectralReport star_spectrum(int m, double alpha, double beta);

/// Path with n+2 vertices: λ_k = -α - 2β cos(kπ/(n+3)), k = 1..n+2.
SpectralReport path_spectrum(int n, double alpha, double beta);

/// Classifies Ã = -(αE + βI_Λ), dispatching on graph shape: star, then
/// path, then constant degree, then general.
SpectralReport classify_pd(const Graph& g, double alpha, double beta);

/// Max real part of the spectrum of a (possibly non-symmetric) matrix.
double spectral_abscissa(const Matrix& a);

/// True iff every eigenvalue of `a` has real part < -kPdTolerance.
bool is_hurwitz(const Matrix& a);

/// "method,pd,min_eig,max_eig" header and row.
std::string spectral_report_csv(const SpectralReport& r);
/// "index,eigenvalue" listing.
std::string eigenvalues_csv(const SpectralReport& r);

}  // namespace ibd
