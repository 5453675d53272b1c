#include "telegraph/netparams.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "telegraph/error.hpp"

namespace telegraph {

namespace {

std::string describe_s(Complex s) {
  std::ostringstream os;
  os.precision(17);
  os << "s = " << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag()) << "j";
  return os.str();
}

void require_finite(Complex s, double d, const char* who) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || !std::isfinite(d)) {
    throw Error(ErrorKind::NonFinite, std::string(who) + ": s and d must be finite");
  }
}

void require_accretive_domain(const LineConstants& line, Complex s, const char* who) {
  const double alpha = abscissa(line);
  if (!(s.real() > alpha)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": Re(s) = " << s.real() << " must exceed alpha = " << alpha;
    throw Error(ErrorKind::DomainError, os.str());
  }
}

void require_positive_length(double d, const char* who) {
  if (!(d > 0.0)) {
    throw Error(ErrorKind::ShortCircuit,
                std::string(who) + ": a line of length d <= 0 is a short-circuit; d = " +
                    std::to_string(d));
  }
}

// Forward error of scaling and squaring grows with ||d E(s)||_1.
double scaled_floor(const LineConstants& line, Complex s, double d, const BlockwiseOptions& o) {
  const ComplexMatrix exponent = d * exponent_matrix(line, s);
  const double one_norm = exponent.cwiseAbs().colwise().sum().maxCoeff();
  return o.ulps * std::numeric_limits<double>::epsilon() * one_norm;
}

ComplexMatrix series_factor(const RealMatrix& per_s, const RealMatrix& constant, Complex s) {
  return s * per_s.cast<Complex>() + constant.cast<Complex>();
}

}  // namespace

std::string_view to_string(PortKind kind) {
  switch (kind) {
    case PortKind::Chain: return "chain";
    case PortKind::Abcd: return "abcd";
    case PortKind::Admittance: return "admittance";
    case PortKind::Impedance: return "impedance";
    case PortKind::LeadFactor: return "lead";
  }
  return "unknown";
}

ComplexMatrix AbcdBlocks::assemble() const {
  const Eigen::Index n = A_d.rows();
  ComplexMatrix out(2 * n, 2 * n);
  out << A_d, B_d, C_d, D_d;
  return out;
}

ComplexMatrix exponent_matrix(const LineConstants& line, Complex s) {
  const Eigen::Index n = line.n();
  ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = series_factor(line.L(), line.R(), s);
  m.bottomLeftCorner(n, n) = series_factor(line.C(), line.G(), s);
  return m;
}

PortMatrix chain_matrix(const LineConstants& line, Complex s, double d) {
  require_finite(s, d, "chain_matrix");
  if (d < 0.0) {
    throw Error(ErrorKind::DomainError, "chain_matrix: physical length d must be >= 0");
  }
  return {PortKind::Chain, expm(-d * exponent_matrix(line, s)), s, d};
}

PortMatrix abcd_direct(const LineConstants& line, Complex s, double d) {
  require_finite(s, d, "abcd_direct");
  return {PortKind::Abcd, expm(d * exponent_matrix(line, s)), s, d};
}

AbcdBlocks abcd_blockwise(const LineConstants& line, Complex s, double d,
                          const BlockwiseOptions& options) {
  require_finite(s, d, "abcd_blockwise");
  require_accretive_domain(line, s, "abcd_blockwise");

  const ComplexMatrix lr = series_factor(line.L(), line.R(), s);
  const ComplexMatrix cg = series_factor(line.C(), line.G(), s);

  AbcdBlocks out;
  out.s = s;
  out.d = d;
  out.sqrt_LR_CG = sqrtm_principal(lr * cg);
  out.sqrt_CG_LR = sqrtm_principal(cg * lr);
  out.Zc = lr * inverse(out.sqrt_CG_LR);
  out.Yc = cg * inverse(out.sqrt_LR_CG);

  const HyperbolicPair p = cosh_sinh(d * out.sqrt_LR_CG);
  const HyperbolicPair q = cosh_sinh(d * out.sqrt_CG_LR);
  out.A_d = p.cosh;
  out.B_d = out.Zc * q.sinh;
  out.C_d = out.Yc * p.sinh;
  out.D_d = q.cosh;

  const ComplexMatrix direct = expm(d * exponent_matrix(line, s));
  out.direct_gap = relative_error(out.assemble(), direct);
  const double threshold = std::max(options.relative, scaled_floor(line, s, d, options));
  if (!(out.direct_gap <= threshold)) {
    std::ostringstream os;
    os.precision(6);
    os << "abcd_blockwise: blocks differ from the direct exponential by " << out.direct_gap
       << " (threshold " << threshold << ") at " << describe_s(s) << ", d = " << d;
    throw Error(ErrorKind::ConsistencyError, os.str());
  }
  return out;
}

PortMatrix admittance(const LineConstants& line, Complex s, double d,
                      const BlockwiseOptions& options) {
  require_positive_length(d, "admittance");
  const AbcdBlocks blocks = abcd_blockwise(line, s, d, options);
  const Eigen::Index n = line.n();
  // With Q = sqrt((Cs+G)(Ls+R)): B^-1 = csch(dQ) Yc and D B^-1 = coth(dQ) Yc.
  // Both come from E = exp(-dQ), which decays for Re(s) > alpha, so B itself
  // is never inverted. I - E^2 = 2dQ phi1(-2dQ) keeps small dQ accurate.
  const ComplexMatrix x = -2.0 * d * blocks.sqrt_CG_LR;
  ComplexMatrix augmented = ComplexMatrix::Zero(2 * n, 2 * n);
  augmented.topLeftCorner(n, n) = x;
  augmented.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
  const ComplexMatrix aug_exp = expm(augmented);
  const ComplexMatrix e2 = aug_exp.topLeftCorner(n, n);
  const ComplexMatrix one_minus_e2 = -x * aug_exp.topRightCorner(n, n);
  const ComplexMatrix w = inverse(one_minus_e2);
  const ComplexMatrix e1 = expm(-d * blocks.sqrt_CG_LR);
  const ComplexMatrix b_inv = 2.0 * e1 * w * blocks.Yc;
  const ComplexMatrix db_inv = (ComplexMatrix::Identity(n, n) + e2) * w * blocks.Yc;
  ComplexMatrix y(2 * n, 2 * n);
  y << db_inv, -b_inv, -b_inv, db_inv;
  return {PortKind::Admittance, std::move(y), s, d};
}

PortMatrix impedance(const LineConstants& line, Complex s, double d, double cross_check_tol,
                     const BlockwiseOptions& options) {
  require_positive_length(d, "impedance");
  const LineConstants dual = dual_constants(line);
  const PortMatrix y_dual = admittance(dual, s, d, options);

  // J Y' J^T with J = [[0, -I], [I, 0]] just moves and negates blocks.
  const Eigen::Index n = line.n();
  const ComplexMatrix& yd = y_dual.value;
  ComplexMatrix z(2 * n, 2 * n);
  z.topLeftCorner(n, n) = yd.bottomRightCorner(n, n);
  z.topRightCorner(n, n) = -yd.bottomLeftCorner(n, n);
  z.bottomLeftCorner(n, n) = -yd.topRightCorner(n, n);
  z.bottomRightCorner(n, n) = yd.topLeftCorner(n, n);

  if (cross_check_tol > 0.0) {
    const ComplexMatrix y_line = admittance(line, s, d, options).value;
    const ComplexMatrix z_inv = inverse(y_line);
    const double gap = relative_error(z, z_inv);
    // Inverting Y amplifies its forward error by cond(Y).
    const double condition = spectral_norm(y_line) * spectral_norm(z_inv);
    const double threshold =
        std::max(cross_check_tol, condition * scaled_floor(line, s, d, options));
    if (!(gap <= threshold)) {
      std::ostringstream os;
      os.precision(6);
      os << "impedance: dual route and inverse(Y) differ by " << gap << " (threshold "
         << threshold << ") at " << describe_s(s)
         << ", d = " << d;
      throw Error(ErrorKind::ConsistencyError, os.str());
    }
  }
  return {PortKind::Impedance, std::move(z), s, d};
}

PortMatrix lead_factor(const LineConstants& line, const BoundParams& params, Complex s,
                       double d) {
  require_finite(s, d, "lead_factor");
  // The real part of the advance is folded into the exponent so large Re(s)
  // never materialises e^{|d| Re s / nu} on its own; the imaginary part is a
  // unimodular phase applied afterwards.
  const Eigen::Index n = line.n();
  const Complex advance = -std::abs(d) * s / params.nu_lower;
  const ComplexMatrix shifted =
      d * exponent_matrix(line, s) + advance.real() * ComplexMatrix::Identity(2 * n, 2 * n);
  const Complex phase = std::polar(1.0, advance.imag());
  return {PortKind::LeadFactor, phase * expm(shifted), s, d};
}

}  // namespace telegraph
