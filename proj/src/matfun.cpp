#include "telegraph/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "telegraph/error.hpp"

namespace telegraph {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double one_norm(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// U and V such that (V - U)^-1 (V + U) is the [k/k] Pade approximant of e^A.
// Coefficients and switching thresholds are the double-precision set from
// Higham's 2005 revisit of scaling and squaring.
void pade3(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
  static constexpr double b[] = {120.0, 60.0, 12.0, 1.0};
  const auto id = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix a2 = a * a;
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

void pade5(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
  static constexpr double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const auto id = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade7(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
  static constexpr double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                 25200.0,    1512.0,    56.0,      1.0};
  const auto id = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade9(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
  static constexpr double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                 30270240.0,    2162160.0,    110880.0,     3960.0,
                                 90.0,          1.0};
  const auto id = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const ComplexMatrix a8 = a6 * a2;
  u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

void pade13(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const auto id = ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;
  const ComplexMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                                b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * u_inner;
  v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
      b[0] * id;
}

}  // namespace

double Spectrum::min_real() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues) out = std::min(out, z.real());
  return out;
}

double Spectrum::max_abs_imag() const {
  double out = 0.0;
  for (const auto& z : eigenvalues) out = std::max(out, std::abs(z.imag()));
  return out;
}

void require_square_finite(const ComplexMatrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(who) + ": expected a square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(who) + ": matrix has NaN or Inf entries");
  }
}

ComplexMatrix expm(const ComplexMatrix& m) {
  require_square_finite(m, "expm");
  if (m.rows() == 0) return m;

  const double norm = one_norm(m);
  ComplexMatrix u;
  ComplexMatrix v;
  int squarings = 0;
  if (norm < 1.495585217958292e-2) {
    pade3(m, u, v);
  } else if (norm < 2.539398330063230e-1) {
    pade5(m, u, v);
  } else if (norm < 9.504178996162932e-1) {
    pade7(m, u, v);
  } else if (norm < 2.097847961257068e0) {
    pade9(m, u, v);
  } else {
    constexpr double theta13 = 5.371920351148152e0;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    pade13(m * std::ldexp(1.0, -squarings), u, v);
  }

  ComplexMatrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.allFinite()) {
    throw Error(ErrorKind::NonFinite, "expm: result overflowed (1-norm " +
                                          std::to_string(norm) + ")");
  }
  return result;
}

ComplexMatrix sqrtm_principal(const ComplexMatrix& m, double tol) {
  require_square_finite(m, "sqrtm_principal");
  const Eigen::Index n = m.rows();
  if (n == 0) return m;

  Eigen::ComplexSchur<ComplexMatrix> schur(m);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "sqrtm_principal: Schur iteration stagnated");
  }
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& q = schur.matrixU();

  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lambda = t(i, i);
    const double band = kBranchCutTolerance * (1.0 + std::abs(lambda));
    if (std::abs(lambda.imag()) <= band && lambda.real() <= band) {
      throw Error(ErrorKind::BranchCut,
                  "sqrtm_principal: eigenvalue (" + std::to_string(lambda.real()) + ", " +
                      std::to_string(lambda.imag()) + ") lies on (-inf, 0]");
    }
  }

  // Upper triangular R with R^2 = T, filled one superdiagonal at a time.
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) r(i, i) = std::sqrt(t(i, i));
  for (Eigen::Index k = 1; k < n; ++k) {
    for (Eigen::Index i = 0; i + k < n; ++i) {
      const Eigen::Index j = i + k;
      Complex acc = t(i, j);
      for (Eigen::Index p = i + 1; p < j; ++p) acc -= r(i, p) * r(p, j);
      r(i, j) = acc / (r(i, i) + r(j, j));
    }
  }

  ComplexMatrix x = q * r * q.adjoint();
  const double residual = relative_error(x * x, m);
  if (!(residual <= tol)) {
    throw Error(ErrorKind::ConvergenceFailure,
                "sqrtm_principal: relative residual " + std::to_string(residual) +
                    " exceeds tolerance " + std::to_string(tol));
  }
  return x;
}

HyperbolicPair cosh_sinh(const ComplexMatrix& m) {
  const ComplexMatrix ep = expm(m);
  const ComplexMatrix em = expm(-m);
  return {0.5 * (ep + em), 0.5 * (ep - em)};
}

ComplexMatrix coshm(const ComplexMatrix& m) { return cosh_sinh(m).cosh; }

ComplexMatrix sinhm(const ComplexMatrix& m) { return cosh_sinh(m).sinh; }

Spectrum spectrum(const ComplexMatrix& m) {
  require_square_finite(m, "spectrum");
  Spectrum out;
  if (m.rows() == 0) return out;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "spectrum: eigensolver stagnated");
  }
  const auto& values = solver.eigenvalues();
  out.eigenvalues.assign(values.data(), values.data() + values.size());
  return out;
}

double hermitian_part_min_eig(const ComplexMatrix& m) {
  require_square_finite(m, "hermitian_part_min_eig");
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "hermitian_part_min_eig: eigensolver stagnated");
  }
  return solver.eigenvalues().minCoeff();
}

double inverse_norm_bound(const ComplexMatrix& m) {
  require_square_finite(m, "inverse_norm_bound");
  const auto n = static_cast<double>(m.rows());
  const double fro = m.norm();
  const double abs_det = std::abs(det(m));
  // |det| is at most ||M||_F^n; anything within a few ulps of that scale is
  // indistinguishable from zero.
  if (!(abs_det > n * kEps * std::pow(fro, n))) {
    throw Error(ErrorKind::Singular, "inverse_norm_bound: determinant is numerically zero");
  }
  return std::pow(fro, n - 1.0) / abs_det;
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "spectral_norm: SVD did not converge");
  }
  return svd.singularValues()(0);
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

Complex det(const ComplexMatrix& m) {
  require_square_finite(m, "det");
  if (m.rows() == 0) return {1.0, 0.0};
  return m.partialPivLu().determinant();
}

ComplexMatrix inverse(const ComplexMatrix& m) {
  require_square_finite(m, "inverse");
  const auto lu = m.partialPivLu();
  const double rcond = lu.rcond();
  if (!(rcond > static_cast<double>(m.rows()) * kEps)) {
    throw Error(ErrorKind::Singular,
                "inverse: reciprocal condition estimate " + std::to_string(rcond));
  }
  return lu.inverse();
}

double relative_error(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double diff = (a - b).norm();
  const double scale = b.norm();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace telegraph
