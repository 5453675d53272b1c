#pragma once

// Dense complex matrix functions. Nothing in here diagonalizes its argument,
// so every kernel is valid for defective (non-diagonalizable) inputs.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace telegraph {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Eigenvalues counted with algebraic multiplicity, in no particular order.
struct Spectrum {
  std::vector<Complex> eigenvalues;

  std::size_t size() const { return eigenvalues.size(); }
  double min_real() const;
  double max_abs_imag() const;
};

/// Relative residual ||X^2 - M||_F / ||M||_F accepted from sqrtm_principal.
inline constexpr double kDefaultSqrtTolerance = 1e-10;

/// Band around (-inf, 0] inside which an eigenvalue is considered to sit on
/// the branch cut of the principal square root.
inline constexpr double kBranchCutTolerance = 1e-12;

/// Throws DimensionMismatch unless square, NonFinite on NaN/Inf entries.
void require_square_finite(const ComplexMatrix& m, const char* who);

/// Scaling and squaring with a diagonal Pade approximant (degree 3..13,
/// selected from 1-norm thresholds).
ComplexMatrix expm(const ComplexMatrix& m);

/// Principal square root via complex Schur form and the triangular
/// recurrence. Throws BranchCut when an eigenvalue lies on (-inf, 0].
ComplexMatrix sqrtm_principal(const ComplexMatrix& m, double tol = kDefaultSqrtTolerance);

ComplexMatrix coshm(const ComplexMatrix& m);
ComplexMatrix sinhm(const ComplexMatrix& m);

/// cosh and sinh from one pair of exponentials.
struct HyperbolicPair {
  ComplexMatrix cosh;
  ComplexMatrix sinh;
};
HyperbolicPair cosh_sinh(const ComplexMatrix& m);

Spectrum spectrum(const ComplexMatrix& m);

/// lambda_min of the Hermitian part (M + M*)/2, which is also the minimum
/// real part over the numerical range of M.
double hermitian_part_min_eig(const ComplexMatrix& m);

/// ||M||_F^(n-1) / |det M|, an upper bound on ||M^-1||_2.
double inverse_norm_bound(const ComplexMatrix& m);

double spectral_norm(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);
Complex det(const ComplexMatrix& m);

/// LU inverse; throws Singular when the reciprocal condition estimate falls
/// below a few ulps.
ComplexMatrix inverse(const ComplexMatrix& m);

/// ||a - b||_F / ||b||_F, with ||b||_F == 0 falling back to ||a - b||_F.
double relative_error(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace telegraph
