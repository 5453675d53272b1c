#include "telegraph/line.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "telegraph/error.hpp"

namespace telegraph {

namespace {

LineConstants::Extremes symmetric_extremes(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver stagnated");
  }
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

double max_asymmetry(const RealMatrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

// Operator norm of a symmetric matrix from its extreme eigenvalues.
double sym_norm(const LineConstants::Extremes& e) {
  return std::max(std::abs(e.min), std::abs(e.max));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

ValidationReport validate(const LineMatrices& m) {
  const auto n = m.L.rows();
  const auto square_n = [n](const RealMatrix& x) { return x.rows() == n && x.cols() == n; };
  if (n < 1 || !square_n(m.L) || !square_n(m.C) || !square_n(m.R) || !square_n(m.G)) {
    throw Error(ErrorKind::DimensionMismatch,
                "line constants must all be n x n with n >= 1 (L is " +
                    std::to_string(m.L.rows()) + "x" + std::to_string(m.L.cols()) + ")");
  }

  ValidationReport report;
  report.n = static_cast<int>(n);

  const std::pair<const char*, const RealMatrix*> named[] = {
      {"L", &m.L}, {"C", &m.C}, {"R", &m.R}, {"G", &m.G}};
  double* asym[] = {&report.asymmetry_L, &report.asymmetry_C, &report.asymmetry_R,
                    &report.asymmetry_G};
  bool finite = true;
  for (int k = 0; k < 4; ++k) {
    const auto& [name, mat] = named[k];
    if (!mat->allFinite()) {
      report.problems.push_back(std::string(name) + " has NaN or Inf entries");
      finite = false;
      continue;
    }
    *asym[k] = max_asymmetry(*mat);
    const double scale = mat->cwiseAbs().maxCoeff();
    if (*asym[k] > kSymmetryTolerance * scale) {
      report.problems.push_back(std::string(name) + " is not symmetric (max asymmetry " +
                                fmt(*asym[k]) + ")");
    }
  }

  if (finite) {
    report.lambda_min_L = symmetric_extremes(0.5 * (m.L + m.L.transpose())).min;
    report.lambda_min_C = symmetric_extremes(0.5 * (m.C + m.C.transpose())).min;
    if (!(report.lambda_min_L > 0.0)) {
      report.problems.push_back("L is not positive definite (lambda_min = " +
                                fmt(report.lambda_min_L) + ")");
    }
    if (!(report.lambda_min_C > 0.0)) {
      report.problems.push_back("C is not positive definite (lambda_min = " +
                                fmt(report.lambda_min_C) + ")");
    }
  }

  report.passed = report.problems.empty();
  return report;
}

LineConstants LineConstants::from(const LineMatrices& m) {
  const ValidationReport report = validate(m);
  if (!report.passed) {
    std::string msg = "line constants rejected:";
    for (const auto& p : report.problems) msg += " " + p + ";";
    msg.pop_back();
    throw Error(ErrorKind::ValidationFailure, msg);
  }
  LineConstants out;
  out.L_ = 0.5 * (m.L + m.L.transpose());
  out.C_ = 0.5 * (m.C + m.C.transpose());
  out.R_ = 0.5 * (m.R + m.R.transpose());
  out.G_ = 0.5 * (m.G + m.G.transpose());
  out.eig_L_ = symmetric_extremes(out.L_);
  out.eig_C_ = symmetric_extremes(out.C_);
  out.eig_R_ = symmetric_extremes(out.R_);
  out.eig_G_ = symmetric_extremes(out.G_);
  return out;
}

LineConstants dual_constants(const LineConstants& line) {
  return LineConstants::from({line.C(), line.L(), line.G(), line.R()});
}

AccretivityThresholds accretivity_thresholds(const LineConstants& line) {
  const auto& g = line.eig_G();
  const auto& c = line.eig_C();
  const auto& r = line.eig_R();
  const auto& l = line.eig_L();
  AccretivityThresholds out;
  // Adding +0.0 turns the -0.0 produced by lossless lines into +0.0.
  out.gamma = -std::min(g.min / c.max, g.min / c.min) + 0.0;
  out.rho = -std::min(r.min / l.max, r.min / l.min) + 0.0;
  return out;
}

double abscissa(const LineConstants& line) {
  const auto t = accretivity_thresholds(line);
  return std::max(t.rho, t.gamma);
}

DeltaCoefficients lemma_delta_coeffs(const LineConstants& line) {
  return {std::max(sym_norm(line.eig_R()), sym_norm(line.eig_G())),
          std::max(sym_norm(line.eig_L()), sym_norm(line.eig_C()))};
}

double lossless_exponential_norm(const LineConstants& line, double omega) {
  // With L^(1/2) C L^(1/2) = V diag(mu^2) V^T the exponential factors as
  // diag(L^(1/2) V, L^(-1/2) V) [[cos, j sin / mu], [j mu sin, cos]]
  // diag(V^T L^(-1/2), V^T L^(1/2)), which stays accurate for any omega.
  if (omega == 0.0) return 1.0;
  const Eigen::Index n = line.n();
  Eigen::SelfAdjointEigenSolver<RealMatrix> l_solver(line.L());
  const RealMatrix l_half = l_solver.operatorSqrt();
  const RealMatrix l_half_inv = l_solver.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<RealMatrix> s_solver(l_half * line.C() * l_half);
  if (l_solver.info() != Eigen::Success || s_solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "lossless exponential: eigensolver stagnated");
  }
  // The phases omega * mu dominate the round-off at large omega. Averaging the
  // spectra of L^(1/2) C L^(1/2) and C^(1/2) L C^(1/2) makes mu bitwise
  // symmetric in L and C, so a line and its dual sample the same phases.
  Eigen::SelfAdjointEigenSolver<RealMatrix> c_solver(line.C());
  const RealMatrix c_half = c_solver.operatorSqrt();
  Eigen::SelfAdjointEigenSolver<RealMatrix> t_solver(c_half * line.L() * c_half,
                                                     Eigen::EigenvaluesOnly);
  if (c_solver.info() != Eigen::Success || t_solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "lossless exponential: eigensolver stagnated");
  }
  const RealMatrix& v = s_solver.eigenvectors();
  const Eigen::VectorXd mu =
      (0.5 * (s_solver.eigenvalues() + t_solver.eigenvalues())).cwiseSqrt();

  ComplexMatrix middle = ComplexMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::cos(omega * mu(i));
    const double sn = std::sin(omega * mu(i));
    middle(i, i) = c;
    middle(n + i, n + i) = c;
    middle(i, n + i) = Complex(0.0, sn / mu(i));
    middle(n + i, i) = Complex(0.0, sn * mu(i));
  }
  ComplexMatrix left = ComplexMatrix::Zero(2 * n, 2 * n);
  ComplexMatrix right = ComplexMatrix::Zero(2 * n, 2 * n);
  left.topLeftCorner(n, n) = (l_half * v).cast<Complex>();
  left.bottomRightCorner(n, n) = (l_half_inv * v).cast<Complex>();
  right.topLeftCorner(n, n) = (v.transpose() * l_half_inv).cast<Complex>();
  right.bottomRightCorner(n, n) = (v.transpose() * l_half).cast<Complex>();
  return spectral_norm(left * middle * right);
}

namespace {

// Block-norm envelope for sup_w ||exp([[0, jwF], [jwS, 0]])|| with the
// diagonalizer of FS taken as Q = F^(1/2) V, V diagonalizing the SPD matrix
// F^(1/2) S F^(1/2). Every block of the exponential is bounded through
// cond(Q), ||F sqrt(SF)^-1|| and ||S sqrt(FS)^-1||.
double block_envelope(const RealMatrix& first, const RealMatrix& second) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> f_solver(first);
  const RealMatrix f_half = f_solver.operatorSqrt();
  const RealMatrix f_half_inv = f_solver.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<RealMatrix> s_solver(f_half * second * f_half);
  if (f_solver.info() != Eigen::Success || s_solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "kappa_estimate: eigensolver stagnated");
  }
  const Eigen::VectorXd f_eig = f_solver.eigenvalues();
  const RealMatrix& v = s_solver.eigenvectors();
  const RealMatrix inv_sqrt_lambda =
      s_solver.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
  const RealMatrix f_inv_sqrt_sf = f_half * v * inv_sqrt_lambda * v.transpose() * f_half;
  const RealMatrix s_inv_sqrt_fs =
      second * f_half * v * inv_sqrt_lambda * v.transpose() * f_half_inv;
  const double cond_q = std::sqrt(f_eig.maxCoeff() / f_eig.minCoeff());

  Eigen::Matrix2d blocks;
  blocks << cond_q, cond_q * spectral_norm(f_inv_sqrt_sf.cast<Complex>()),
      cond_q * spectral_norm(s_inv_sqrt_fs.cast<Complex>()), cond_q;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(blocks);
  return svd.singularValues()(0);
}

// Analytic upper bound on sup_w ||exp([[0, jwL], [jwC, 0]])||.
double kappa_envelope(const LineConstants& line, bool& normal) {
  const RealMatrix& L = line.L();
  const RealMatrix& C = line.C();
  const RealMatrix cl = C * L;
  const RealMatrix commutator = cl * cl.transpose() - cl.transpose() * cl;
  normal = commutator.norm() <= kNormalityTolerance * cl.squaredNorm();

  if (normal) {
    // lambda_min(CL) through the congruent SPD matrices F^(1/2) S F^(1/2).
    const auto lambda_min_product = [](const RealMatrix& f, const RealMatrix& s) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> f_solver(f);
      const RealMatrix f_half = f_solver.operatorSqrt();
      Eigen::SelfAdjointEigenSolver<RealMatrix> solver(f_half * s * f_half,
                                                       Eigen::EigenvaluesOnly);
      return solver.eigenvalues().minCoeff();
    };
    const double lambda = std::max(lambda_min_product(L, C), lambda_min_product(C, L));
    const double c1 = std::max(sym_norm(line.eig_L()), sym_norm(line.eig_C()));
    return 1.0 + c1 / std::sqrt(lambda);
  }
  // kappa is invariant under L <-> C, so either ordering gives a valid bound.
  return std::min(block_envelope(L, C), block_envelope(C, L));
}

// Normal CL with real positive spectrum is symmetric, so L and C commute and
// the exponential splits into 2x2 modal blocks [[cos, jz sin], [j sin / z, cos]]
// whose supremum is max(z, 1/z) with z^2 an eigenvalue of C^(-1/2) L C^(-1/2).
double commuting_kappa(const LineConstants& line) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> c_solver(line.C());
  const RealMatrix c_inv_half = c_solver.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(c_inv_half * line.L() * c_inv_half,
                                                   Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = solver.eigenvalues();
  return std::sqrt(std::max(mu.maxCoeff(), 1.0 / mu.minCoeff()));
}

}  // namespace

KappaEstimate kappa_estimate(const LineConstants& line, const KappaGrid& grid) {
  if (!(grid.omega_min > 0.0 && grid.omega_max > grid.omega_min && grid.points_per_decade > 0)) {
    throw Error(ErrorKind::DomainError, "kappa_estimate: invalid frequency grid");
  }
  KappaEstimate est;
  est.envelope = kappa_envelope(line, est.normal_product);
  est.upper = est.normal_product ? std::min(est.envelope, commuting_kappa(line)) : est.envelope;

  est.lower = lossless_exponential_norm(line, 0.0);
  est.samples = 1;
  double best_log10 = std::log10(grid.omega_min);

  const double step = 1.0 / grid.points_per_decade;
  auto sample_decade_range = [&](double from_log10, double to_log10, bool include_start) {
    const int count = static_cast<int>(std::lround((to_log10 - from_log10) / step));
    for (int i = include_start ? 0 : 1; i <= count; ++i) {
      const double e = from_log10 + i * step;
      const double w = std::pow(10.0, e);
      for (const double omega : {w, -w}) {
        const double value = lossless_exponential_norm(line, omega);
        ++est.samples;
        if (value > est.lower) {
          est.lower = value;
          est.argmax_omega = omega;
          best_log10 = e;
        }
      }
    }
  };

  double top = std::log10(grid.omega_max);
  sample_decade_range(std::log10(grid.omega_min), top, true);
  const double cap = std::log10(grid.omega_cap);
  while (top - best_log10 < grid.stagnation_decades && top + 1.0 <= cap + 1e-9) {
    sample_decade_range(top, top + 1.0, false);
    top += 1.0;
  }
  est.omega_reached = std::pow(10.0, top);
  // In the commuting case upper is the exact supremum; samples can only
  // exceed it by round-off.
  if (est.normal_product) est.lower = std::min(est.lower, est.upper);
  return est;
}

BoundParams bound_params(const LineConstants& line, const KappaGrid& grid) {
  BoundParams p;
  const auto thresholds = accretivity_thresholds(line);
  p.gamma = thresholds.gamma;
  p.rho = thresholds.rho;
  p.alpha = std::max(p.rho, p.gamma);
  const auto coeffs = lemma_delta_coeffs(line);
  p.c0 = coeffs.c0;
  p.c1 = coeffs.c1;
  const auto kappa = kappa_estimate(line, grid);
  p.kappa_lower = kappa.lower;
  p.kappa_upper = kappa.upper;
  p.normal_product = kappa.normal_product;
  p.theta = p.c0 / p.c1;
  p.nu_lower = 1.0 / (p.kappa_upper * p.c1);
  p.nu_upper = 1.0 / (p.kappa_lower * p.c1);
  p.b = std::min(line.eig_L().min, line.eig_C().min);
  return p;
}

double growth_envelope(const BoundParams& p, double re_s, double d) {
  return p.kappa_upper * std::exp(std::abs(d) / p.nu_lower * (std::abs(re_s) + p.theta));
}

}  // namespace telegraph
