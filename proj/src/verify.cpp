#include "telegraph/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include "json.hpp"

#include "parallel.hpp"
#include "telegraph/error.hpp"
#include "telegraph/netparams.hpp"
#include "telegraph/random.hpp"

namespace telegraph {

namespace {

using json = nlohmann::json;

struct CheckInfo {
  CheckId id;
  std::string_view name;
  Comparison comparison;
  std::string_view anchor;
};

// clang-format off
const CheckInfo kChecks[] = {
    {CheckId::ExpmSeries, "ExpmSeries", Comparison::Residual,
     "expm(M) = sum_k M^k / k!"},
    {CheckId::ExpmUnitarySimilarity, "ExpmUnitarySimilarity", Comparison::Residual,
     "expm(U M U*) = U expm(M) U* for unitary U"},
    {CheckId::SqrtmResidual, "SqrtmResidual", Comparison::Residual,
     "X = sqrtm(M): X^2 = M and Re spec(X) > 0"},
    {CheckId::SqrtmJordan, "SqrtmJordan", Comparison::Residual,
     "X = sqrtm(J_8(1)): X^2 = J_8(1)"},
    {CheckId::InverseNormBound, "InverseNormBound", Comparison::Slack,
     "||A^-1|| <= ||A||_F^(n-1) / |det A|"},
    {CheckId::HermitianPartRange, "HermitianPartRange", Comparison::Slack,
     "lambda_min((A + A*)/2) <= Re(x* A x) for every unit x"},
    {CheckId::AlphaIsMax, "AlphaIsMax", Comparison::Residual,
     "alpha = max(rho, gamma)"},
    {CheckId::Accretivity, "Accretivity", Comparison::Slack,
     "Re s > alpha => lambda_min H(Ls+R) > 0 and lambda_min H(Cs+G) > 0"},
    {CheckId::DeltaBound, "DeltaBound", Comparison::Slack,
     "||[[0, Lt+R], [Ct+G, 0]]|| <= c1 |t| + c0 for real t"},
    {CheckId::KappaOrder, "KappaOrder", Comparison::Slack,
     "1 <= kappa_lower <= kappa_upper"},
    {CheckId::LosslessExact, "LosslessExact", Comparison::Residual,
     "R = G = 0 => alpha = 0 and theta = 0"},
    {CheckId::DualParams, "DualParams", Comparison::Residual,
     "(L, C, R, G) -> (C, L, G, R) preserves kappa, theta, nu"},
    {CheckId::BlockwiseDirect, "BlockwiseDirect", Comparison::Residual,
     "[[A_d, B_d], [C_d, D_d]] = expm(d [[0, Ls+R], [Cs+G, 0]]) for Re s > alpha"},
    {CheckId::InverseIdentity, "InverseIdentity", Comparison::Residual,
     "Xi(s,-d) Xi(s,d) = I"},
    {CheckId::ChainAbcdNorm, "ChainAbcdNorm", Comparison::Residual,
     "||Xi(s,d)|| = ||Xi(s,-d)||"},
    {CheckId::BlockCommutation, "BlockCommutation", Comparison::Residual,
     "A_d B_d = B_d D_d and D_d B_d^-1 = B_d^-1 A_d"},
    {CheckId::GrowthBound, "GrowthBound", Comparison::Slack,
     "||Xi(s,d)|| <= kappa exp((|d|/nu)(|Re s| + theta))"},
    {CheckId::AdmittanceGrowth, "AdmittanceGrowth", Comparison::Slack,
     "||Y(s,d)|| <= M exp((n d/nu)(Re s + theta)) for Re s >= beta, d >= delta"},
    {CheckId::ImagAxisBounded, "ImagAxisBounded", Comparison::Slack,
     "R, G > 0 => sup_w ||Xi(jw,d)||, ||Y(jw,d)||, ||Z(jw,d)|| < inf"},
    {CheckId::SpectralInclusion, "SpectralInclusion", Comparison::Slack,
     "Re s >= alpha + eps => Re spec sqrt((Cs+G)(Ls+R)) >= b eps"},
    {CheckId::SinhDetFloor, "SinhDetFloor", Comparison::Slack,
     "Re s >= alpha + eps, d >= delta => |det sinh(d sqrt((Cs+G)(Ls+R)))| >= (delta b eps)^n"},
    {CheckId::BdDetFloor, "BdDetFloor", Comparison::Positive,
     "inf { |det B_d(s)| : Re s >= beta, d >= delta } > 0"},
    {CheckId::SinhSingularity, "SinhSingularity", Comparison::Residual,
     "sinh(X) is singular <=> spec(X) meets j pi Z"},
    {CheckId::AdmittancePorts, "AdmittancePorts", Comparison::Residual,
     "Y(s,d) [V_in; V_out] = [I_in; -I_out]"},
    {CheckId::ImpedanceInverse, "ImpedanceInverse", Comparison::Residual,
     "Z(s,d) Y(s,d) = I"},
    {CheckId::DualNormEquality, "DualNormEquality", Comparison::Residual,
     "||Z(s,d)|| = ||Y'(s,d)|| for the dual line"},
    {CheckId::LeadFactorBound, "LeadFactorBound", Comparison::Slack,
     "Re s >= 0 => ||exp(-|d| s/nu) Xi(s,d)|| <= kappa exp(|d| theta/nu)"},
    {CheckId::DefectiveBlockwise, "DefectiveBlockwise", Comparison::Residual,
     "blockwise ABCD = expm(d E(s)) where (Ls+R)(Cs+G) is nearest to defective"},
};

const CoverageEntry kCoverage[] = {
    {"matfun", "expm agrees with a series reference for ||M|| <= 10", CheckId::ExpmSeries},
    {"matfun", "principal square root residual and right-half-plane spectrum", CheckId::SqrtmResidual},
    {"matfun", "principal square root of the 8x8 Jordan block", CheckId::SqrtmJordan},
    {"matfun", "inverse norm bound dominates the inverse norm", CheckId::InverseNormBound},
    {"matfun", "Hermitian-part eigenvalue bounds the numerical range", CheckId::HermitianPartRange},
    {"matfun", "expm commutes with unitary similarity", CheckId::ExpmUnitarySimilarity},
    {"line", "alpha is the larger of rho and gamma", CheckId::AlphaIsMax},
    {"line", "series and shunt factors are accretive right of alpha", CheckId::Accretivity},
    {"line", "exponent norm grows at most affinely in a real argument", CheckId::DeltaBound},
    {"line", "kappa_lower is at least one", CheckId::KappaOrder},
    {"line", "lossless constants give zero alpha and theta", CheckId::LosslessExact},
    {"netparams", "blockwise ABCD agrees with the direct exponential", CheckId::BlockwiseDirect},
    {"netparams", "chain matrix inverts the ABCD matrix", CheckId::InverseIdentity},
    {"netparams", "chain and ABCD matrices have equal norms", CheckId::ChainAbcdNorm},
    {"netparams", "ABCD blocks commute as A B = B D", CheckId::BlockCommutation},
    {"netparams", "ABCD growth envelope", CheckId::GrowthBound},
    {"netparams", "admittance growth is at most exponential in n d Re s / nu", CheckId::AdmittanceGrowth},
    {"netparams", "network matrices stay bounded on the imaginary axis", CheckId::ImagAxisBounded},
    {"netparams", "square-root spectrum lies right of b eps", CheckId::SpectralInclusion},
    {"netparams", "determinant floor of sinh(d sqrt)", CheckId::SinhDetFloor},
    {"netparams", "determinant of B_d stays away from zero", CheckId::BdDetFloor},
    {"netparams", "sinh of a matrix is singular exactly on the j pi lattice", CheckId::SinhSingularity},
    {"netparams", "admittance maps port voltages to port currents", CheckId::AdmittancePorts},
    {"netparams", "impedance inverts the admittance", CheckId::ImpedanceInverse},
    {"netparams", "impedance norm equals the dual admittance norm", CheckId::DualNormEquality},
    {"netparams", "dual line preserves the bound parameters", CheckId::DualParams},
    {"netparams", "lead factor is bounded on the right half plane", CheckId::LeadFactorBound},
    {"netparams", "blockwise ABCD on near-defective products", CheckId::DefectiveBlockwise},
};
// clang-format on

const CheckInfo& info(CheckId id) {
  for (const auto& c : kChecks)
    if (c.id == id) return c;
  throw Error(ErrorKind::UnknownCheck, "check id " + std::to_string(static_cast<int>(id)));
}

// ---------------------------------------------------------------------------
// Sampling

class Sampler {
 public:
  Sampler(const CheckSpec& spec) : rng_(make_rng(spec.seed, static_cast<std::uint64_t>(spec.check_id))), r_(spec.region) {}

  Rng& rng() { return rng_; }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  // Uniform on (lo, hi], so a zero lower edge never yields zero.
  double uniform_open_low(double lo, double hi) { return hi - (hi - lo) * unit_(rng_); }

  double im() {
    const double mag = std::exp(uniform(std::log(r_.im_min), std::log(r_.im_max)));
    return sign_(rng_) ? mag : -mag;
  }

  Complex s_from(double lo) { return {lo + (r_.re_span) * (1.0 - unit_(rng_)), im()}; }
  Complex s_plane() { return {uniform(-r_.re_span, r_.re_span), im()}; }

  double d_positive() { return uniform_open_low(r_.d_min, r_.d_max); }
  double d_signed() { return uniform(-r_.d_max, r_.d_max); }
  double d_from_delta() { return r_.delta + r_.d_max * unit_(rng_); }

 private:
  Rng rng_;
  const Region& r_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::bernoulli_distribution sign_;
};

// Tracks the worst margin seen so far and where it happened.
class Tracker {
 public:
  explicit Tracker(Comparison c) : c_(c) {
    worst_ = c == Comparison::Residual ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
  }

  void add(double value, const Witness& w) {
    ++count_;
    if (std::isnan(worst_)) return;
    const bool worse = std::isnan(value) ||
                       (c_ == Comparison::Residual ? value > worst_ : value < worst_);
    if (worse || !have_) {
      worst_ = value;
      witness_ = w;
      have_ = true;
    }
  }

  double worst() const { return have_ ? worst_ : 0.0; }
  const Witness& witness() const { return witness_; }
  int count() const { return count_; }

 private:
  Comparison c_;
  double worst_;
  Witness witness_;
  bool have_ = false;
  int count_ = 0;
};

Witness at(int k, std::optional<Complex> s = std::nullopt, std::optional<double> d = std::nullopt) {
  return {k, s, d};
}

ComplexMatrix cplx(const RealMatrix& m) { return m.cast<Complex>(); }

double rel_identity(const ComplexMatrix& m) {
  return relative_error(m, ComplexMatrix::Identity(m.rows(), m.cols()));
}

double slack(double bound, double value) {
  if (std::isinf(bound) && bound > 0 && std::isfinite(value)) return 1.0;
  // A zero bound (lossless line at s = 0) leaves only the absolute slack.
  if (bound == 0.0) return -value;
  return (bound - value) / bound;
}

double beta_of(const Region& r, double alpha) {
  return std::isnan(r.beta) ? std::max(0.0, alpha) + 0.5 : r.beta;
}

// Extended-precision scaled Taylor series, the reference for expm.
ComplexMatrix reference_expm(const ComplexMatrix& m) {
  using LC = std::complex<long double>;
  using LM = Eigen::Matrix<LC, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = m.rows();
  LM a = m.cast<LC>();
  long double norm = 0.0L;
  for (Eigen::Index i = 0; i < n; ++i) {
    long double row = 0.0L;
    for (Eigen::Index j = 0; j < n; ++j) row += std::abs(a(i, j));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.5L) {
    norm /= 2.0L;
    ++squarings;
  }
  a /= std::ldexp(1.0L, squarings);
  LM sum = LM::Identity(n, n);
  LM term = LM::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * a / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  ComplexMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = Complex(static_cast<double>(sum(i, j).real()),
                          static_cast<double>(sum(i, j).imag()));
  return out;
}

double eigenvector_condition(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  ComplexMatrix v = solver.eigenvectors();
  for (Eigen::Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const auto& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  return lo > 0.0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
}

ComplexMatrix product_at(const LineConstants& line, Complex s) {
  return (s * cplx(line.L()) + cplx(line.R())) * (s * cplx(line.C()) + cplx(line.G()));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Each check fills the tracker and may append to the note.
using CheckFn =
    std::function<void(const LineConstants&, const CheckSpec&, Sampler&, Tracker&, std::string&)>;

BlockwiseOptions unchecked() {
  BlockwiseOptions o;
  o.relative = std::numeric_limits<double>::infinity();
  return o;
}

// ---------------------------------------------------------------------------
// matfun

void check_expm_series(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                       std::string&) {
  const int max_dim = std::max(6, 2 * line.n());
  for (int k = 0; k < spec.samples; ++k) {
    const int n = 1 + k % max_dim;
    ComplexMatrix m = random_complex(n, n, sm.rng());
    m *= sm.uniform_open_low(0.0, 10.0) / spectral_norm(m);
    t.add(relative_error(expm(m), reference_expm(m)), at(k));
  }
}

void check_expm_similarity(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                           Tracker& t, std::string&) {
  const int max_dim = std::max(5, 2 * line.n());
  for (int k = 0; k < spec.samples; ++k) {
    const int n = 2 + k % (max_dim - 1);
    const ComplexMatrix m = 2.0 * random_complex(n, n, sm.rng());
    const ComplexMatrix u = random_unitary(n, sm.rng());
    t.add(relative_error(expm(u * m * u.adjoint()), u * expm(m) * u.adjoint()), at(k));
  }
}

double sqrt_residual(const ComplexMatrix& m) {
  const ComplexMatrix x = sqrtm_principal(m);
  if (spectrum(x).min_real() <= -1e-12) return std::numeric_limits<double>::infinity();
  return relative_error(x * x, m);
}

void check_sqrtm_residual(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                          Tracker& t, std::string& note) {
  const double alpha = abscissa(line);
  for (int k = 0; k < spec.samples; ++k) {
    if (k % 2 == 0) {
      const Complex s = sm.s_from(alpha + spec.region.re_offset);
      t.add(sqrt_residual(product_at(line, s)), at(k, s));
    } else {
      const int n = 1 + (k / 2) % 6;
      t.add(sqrt_residual(random_complex(n, n, sm.rng())), at(k));
    }
  }
  note = "even samples: (Ls+R)(Cs+G) right of alpha; odd samples: random complex matrices";
}

void check_sqrtm_jordan(const LineConstants&, const CheckSpec& spec, Sampler& sm, Tracker& t,
                        std::string& note) {
  ComplexMatrix j = ComplexMatrix::Identity(8, 8);
  for (int i = 0; i < 7; ++i) j(i, i + 1) = 1.0;
  for (int k = 0; k < spec.samples; ++k) {
    if (k == 0) {
      t.add(sqrt_residual(j), at(k));
    } else {
      const ComplexMatrix u = random_unitary(8, sm.rng());
      t.add(sqrt_residual(u * j * u.adjoint()), at(k));
    }
  }
  note = "sample 0 is the Jordan block itself, later samples are unitary conjugates";
}

void check_inverse_norm_bound(const LineConstants&, const CheckSpec& spec, Sampler& sm,
                              Tracker& t, std::string&) {
  for (int k = 0; k < spec.samples; ++k) {
    const int n = 1 + k % 6;
    const ComplexMatrix a = random_complex(n, n, sm.rng());
    t.add(slack(inverse_norm_bound(a), spectral_norm(inverse(a))), at(k));
  }
}

void check_hermitian_range(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                           Tracker& t, std::string& note) {
  const double alpha = abscissa(line);
  std::normal_distribution<double> normal;
  for (int k = 0; k < spec.samples; ++k) {
    ComplexMatrix a;
    std::optional<Complex> s;
    if (k % 2 == 0) {
      const int n = 1 + (k / 2) % 6;
      a = random_complex(n, n, sm.rng());
    } else {
      s = sm.s_from(alpha + spec.region.re_offset);
      a = *s * cplx(line.L()) + cplx(line.R());
    }
    const double lambda = hermitian_part_min_eig(a);
    const double scale = spectral_norm(a);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd x(a.rows());
    for (int v = 0; v < 1000; ++v) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(normal(sm.rng()), normal(sm.rng()));
      x.normalize();
      best = std::min(best, (x.adjoint() * a * x)(0, 0).real());
    }
    t.add((best - lambda) / scale, at(k, s));
  }
  note = "1000 unit vectors per matrix; slack scaled by ||A||";
}

// ---------------------------------------------------------------------------
// line

void check_alpha_is_max(const LineConstants& line, const CheckSpec&, Sampler&, Tracker& t,
                        std::string&) {
  const auto th = accretivity_thresholds(line);
  t.add(std::abs(abscissa(line) - std::max(th.rho, th.gamma)), at(0));
}

void check_accretivity(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                       std::string& note) {
  const double alpha = abscissa(line);
  const auto c = lemma_delta_coeffs(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double lo = std::min(hermitian_part_min_eig(s * cplx(line.L()) + cplx(line.R())),
                               hermitian_part_min_eig(s * cplx(line.C()) + cplx(line.G())));
    t.add(lo / (c.c1 * std::abs(s.real()) + c.c0), at(k, s));
  }
  note = "margin is lambda_min scaled by c1 |Re s| + c0";
}

void check_delta_bound(const LineConstants& line, const CheckSpec& spec, Sampler&, Tracker& t,
                       std::string& note) {
  const auto c = lemma_delta_coeffs(line);
  const Eigen::Index n = line.n();
  const int per_sign = std::max(1, (spec.samples - 1) / 2);
  for (int k = 0; k < 2 * per_sign + 1; ++k) {
    double x = 0.0;
    if (k > 0) {
      const int i = (k - 1) % per_sign;
      const double mag = std::pow(10.0, -3.0 + 12.0 * i / std::max(1, per_sign - 1));
      x = k <= per_sign ? mag : -mag;
    }
    ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n) = cplx(line.L() * x + line.R());
    m.bottomLeftCorner(n, n) = cplx(line.C() * x + line.G());
    t.add(slack(c.c1 * std::abs(x) + c.c0, spectral_norm(m)), at(k, Complex(x, 0.0)));
  }
  note = "t = 0 and +/- 10^u on a uniform grid u in [-3, 9]; witness s_re holds t";
}

void check_kappa_order(const LineConstants& line, const CheckSpec&, Sampler&, Tracker& t,
                       std::string& note) {
  const auto k = kappa_estimate(line);
  t.add(std::min(k.lower - 1.0, slack(k.upper, k.lower)), at(0));
  note = "kappa_lower = " + fmt(k.lower) + ", kappa_upper = " + fmt(k.upper) +
         (k.normal_product ? " (CL normal)" : " (CL not normal)");
}

void check_lossless_exact(const LineConstants& line, const CheckSpec&, Sampler&, Tracker& t,
                          std::string&) {
  const auto zero = RealMatrix::Zero(line.n(), line.n());
  const auto lossless = LineConstants::from({line.L(), line.C(), zero, zero});
  const auto p = bound_params(lossless);
  t.add(std::abs(p.alpha) + std::abs(p.theta), at(0));
}

void check_dual_params(const LineConstants& line, const CheckSpec&, Sampler&, Tracker& t,
                       std::string& note) {
  const auto p = bound_params(line);
  const auto q = bound_params(dual_constants(line));
  const auto rel = [](double a, double b) {
    return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(a), std::abs(b));
  };
  const double worst = std::max({rel(p.alpha, q.alpha), rel(p.theta, q.theta),
                                 rel(p.kappa_upper, q.kappa_upper), rel(p.nu_lower, q.nu_lower),
                                 rel(p.kappa_lower, q.kappa_lower), rel(p.nu_upper, q.nu_upper)});
  t.add(worst, at(0));
  note = "kappa_lower and nu_upper are sampled and agree to the phase round-off of the argmax";
}

// ---------------------------------------------------------------------------
// netparams

void check_blockwise_direct(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                            Tracker& t, std::string&) {
  const double alpha = abscissa(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double d = sm.d_positive();
    const auto b = abcd_blockwise(line, s, d, unchecked());
    t.add(relative_error(b.assemble(), abcd_direct(line, s, d).value), at(k, s, d));
  }
}

void check_inverse_identity(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                            Tracker& t, std::string&) {
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_plane();
    const double d = sm.d_positive();
    t.add(rel_identity(chain_matrix(line, s, d).value * abcd_direct(line, s, d).value),
          at(k, s, d));
  }
}

void check_chain_abcd_norm(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                           Tracker& t, std::string&) {
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_plane();
    const double d = sm.d_positive();
    const double a = spectral_norm(abcd_direct(line, s, d).value);
    const double c = spectral_norm(chain_matrix(line, s, d).value);
    t.add(std::abs(a - c) / a, at(k, s, d));
  }
}

void check_block_commutation(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                             Tracker& t, std::string& note) {
  const double alpha = abscissa(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double d = sm.d_positive();
    const auto b = abcd_blockwise(line, s, d);
    // B^-1 from the admittance; an LU inverse of B loses cond(B) digits.
    const ComplexMatrix b_inv = -admittance(line, s, d).value.topRightCorner(line.n(), line.n());
    // Product residuals are scaled by the factor norms they are computed from.
    const double ab = (b.A_d * b.B_d - b.B_d * b.D_d).norm() /
                      (b.B_d.norm() * std::max(b.A_d.norm(), b.D_d.norm()));
    const double ba = (b.D_d * b_inv - b_inv * b.A_d).norm() /
                      (b_inv.norm() * std::max(b.A_d.norm(), b.D_d.norm()));
    t.add(std::max(ab, ba), at(k, s, d));
  }
  note = "residuals scaled by ||B|| max(||A||, ||D||) and ||B^-1|| max(||A||, ||D||)";
}

void check_growth_bound(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                        std::string& note) {
  const auto p = bound_params(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_plane();
    const double d = sm.d_signed();
    const double norm = spectral_norm(abcd_direct(line, s, d).value);
    t.add(slack(growth_envelope(p, s.real(), d), norm), at(k, s, d));
  }
  note = "envelope uses kappa_upper and nu_lower; slack relative to the envelope";
}

void check_admittance_growth(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                             Tracker& t, std::string& note) {
  const auto p = bound_params(line);
  const double alpha = p.alpha;
  const double beta = beta_of(spec.region, alpha);
  if (!(beta >= 0.0 && beta > alpha)) {
    throw Error(ErrorKind::DomainError, "AdmittanceGrowth: beta must be >= 0 and exceed alpha");
  }
  const double delta = spec.region.delta;
  const double eps = beta - alpha;
  const int n = line.n();
  // M(s) = 2 n^((n-1)/2) kappa^n / (|det Zc(s)| (delta b eps)^n).
  const double log_const = std::log(2.0) + 0.5 * (n - 1) * std::log(static_cast<double>(n)) +
                           n * std::log(p.kappa_upper) - n * std::log(delta * p.b * eps);
  double largest_ratio = 0.0;
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(beta);
    const double d = sm.d_from_delta();
    const auto blocks = abcd_blockwise(line, s, d);
    const double log_det_z = std::log(std::abs(det(blocks.Zc)));
    const double log_y = std::log(spectral_norm(admittance(line, s, d).value));
    const double growth = n * d / p.nu_lower * (s.real() + p.theta);
    largest_ratio = std::max(largest_ratio, log_y - growth);
    t.add(1.0 - std::exp(log_y - (log_const - log_det_z + growth)), at(k, s, d));
  }
  note = "M(s) = 2 n^((n-1)/2) kappa_upper^n / (|det Zc(s)| (delta b eps)^n) with eps = beta - "
         "alpha = " + fmt(eps) + "; sampled sup of ||Y|| exp(-(n d/nu)(Re s + theta)) = " +
         fmt(std::exp(largest_ratio));
}

void check_imag_axis(const LineConstants& line, const CheckSpec& spec, Sampler&, Tracker& t,
                     std::string& note) {
  const Region& r = spec.region;
  const double d = r.delta;
  // Slowest one-way delay per unit length: sqrt(lambda_max(CL)).
  Eigen::SelfAdjointEigenSolver<RealMatrix> l_solver(line.L());
  const RealMatrix l_half = l_solver.operatorSqrt();
  Eigen::SelfAdjointEigenSolver<RealMatrix> p_solver(l_half * line.C() * l_half,
                                                     Eigen::EigenvaluesOnly);
  const double tau = d * std::sqrt(p_solver.eigenvalues().maxCoeff());

  LineConstants lossy = line;
  const bool hypothesis = line.eig_R().min > 0.0 && line.eig_G().min > 0.0;
  if (!hypothesis) {
    lossy = LineConstants::from({line.L(), line.C(), 0.01 / tau * line.L(), 0.01 / tau * line.C()});
  }

  const double lo = std::log10(r.omega_min);
  const double hi = std::log10(r.omega_max);
  const int points = static_cast<int>(std::lround((hi - lo) * r.points_per_decade)) + 1;
  const double split = hi - 3.0;
  const char* names[] = {"chain", "admittance", "impedance"};
  double before[3] = {0, 0, 0}, all[3] = {0, 0, 0};
  double argmax[3] = {0, 0, 0};
  for (int k = 0; k < points; ++k) {
    const double e = lo + (hi - lo) * k / (points - 1);
    const double omega = std::pow(10.0, e) / tau;
    const Complex s(0.0, omega);
    const double norms[3] = {spectral_norm(chain_matrix(lossy, s, d).value),
                             spectral_norm(admittance(lossy, s, d).value),
                             spectral_norm(impedance(lossy, s, d).value)};
    for (int q = 0; q < 3; ++q) {
      if (!std::isfinite(norms[q])) {
        throw Error(ErrorKind::NonFinite, std::string(names[q]) + " norm is not finite");
      }
      if (norms[q] > all[q]) {
        all[q] = norms[q];
        argmax[q] = omega;
      }
      if (e <= split) before[q] = std::max(before[q], norms[q]);
    }
  }
  std::ostringstream os;
  os << (hypothesis ? "line has R, G > 0" : "R, G not both positive definite; using R = 0.01 L/tau, G = 0.01 C/tau")
     << "; tau = " << fmt(tau) << "; " << points << " grid points";
  for (int q = 0; q < 3; ++q) {
    const double growth = (all[q] - before[q]) / before[q];
    t.add(r.stagnation - growth, at(q, Complex(0.0, argmax[q]), d));
    os << "; sup " << names[q] << " = " << fmt(all[q]) << " (last-3-decade growth " << fmt(growth)
       << ")";
  }
  note = os.str();
}

double epsilon_eff(const Region& r, double alpha) { return std::max(r.epsilon, -alpha); }

void check_spectral_inclusion(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                              Tracker& t, std::string& note) {
  const double alpha = abscissa(line);
  const double eps = epsilon_eff(spec.region, alpha);
  const double b = std::min(line.eig_L().min, line.eig_C().min);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + eps);
    const auto b_blocks = abcd_blockwise(line, s, 1.0);
    const double lowest = spectrum(b_blocks.sqrt_CG_LR).min_real();
    t.add((lowest - b * eps) / (b * eps), at(k, s));
  }
  note = "eps = max(epsilon, -alpha) = " + fmt(eps) + "; slack relative to b eps";
}

// log |det sinh(X)| for X with spectrum in Re > 0, from
// sinh(X) = e^X (I - e^{-2X}) / 2 and det e^X = e^{tr X}. An LU determinant
// of sinh(X) itself cancels to zero once its modes span many decades.
double log_abs_det_sinh(const ComplexMatrix& x) {
  const Eigen::Index n = x.rows();
  ComplexMatrix augmented = ComplexMatrix::Zero(2 * n, 2 * n);
  augmented.topLeftCorner(n, n) = -2.0 * x;
  augmented.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
  // I - e^{-2X} = 2X phi1(-2X) with phi1 the top-right block.
  const ComplexMatrix one_minus = 2.0 * x * expm(augmented).topRightCorner(n, n);
  return x.trace().real() + std::log(std::abs(det(one_minus))) -
         static_cast<double>(n) * std::log(2.0);
}

void check_sinh_det_floor(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                          Tracker& t, std::string& note) {
  const double alpha = abscissa(line);
  const double eps = epsilon_eff(spec.region, alpha);
  const double b = std::min(line.eig_L().min, line.eig_C().min);
  const double floor = std::pow(spec.region.delta * b * eps, line.n());
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + eps);
    const double d = sm.d_from_delta();
    const ComplexMatrix cg_lr = (s * cplx(line.C()) + cplx(line.G())) *
                                (s * cplx(line.L()) + cplx(line.R()));
    const ComplexMatrix root = sqrtm_principal(cg_lr);
    const double log_ratio = log_abs_det_sinh(d * root) - std::log(floor);
    t.add(std::expm1(std::min(log_ratio, 700.0)), at(k, s, d));
  }
  note = "eps = max(epsilon, -alpha) = " + fmt(eps) + "; floor (delta b eps)^n = " + fmt(floor) +
         "; slack relative to the floor";
}

void check_bd_det_floor(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                        std::string& note) {
  const double alpha = abscissa(line);
  const double beta = beta_of(spec.region, alpha);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(beta);
    const double d = sm.d_from_delta();
    // B = Zc sinh(dQ) with Q = sqrt((Cs+G)(Ls+R)).
    const auto blocks = abcd_blockwise(line, s, d);
    const double log_value = std::log(std::abs(det(blocks.Zc))) +
                             log_abs_det_sinh(d * blocks.sqrt_CG_LR);
    t.add(std::exp(std::min(log_value, 700.0)), at(k, s, d));
  }
  note = "beta = " + fmt(beta) + ", delta = " + fmt(spec.region.delta) +
         "; |det B| = |det Zc| |det sinh(dQ)|, capped at e^700";
}

void check_sinh_singularity(const LineConstants&, const CheckSpec& spec, Sampler& sm, Tracker& t,
                            std::string& note) {
  std::uniform_int_distribution<int> lattice(-3, 3);
  std::normal_distribution<double> normal;
  for (int k = 0; k < spec.samples; ++k) {
    const int n = 2 + k % 3;
    ComplexMatrix tri = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) tri(i, j) = 0.5 * Complex(normal(sm.rng()), normal(sm.rng()));
    Complex product = 1.0;
    for (int i = 1; i < n; ++i) {
      Complex z;
      do {
        z = Complex(sm.uniform(-2.0, 2.0), sm.uniform(-2.0, 2.0));
        // Keep away from the lattice so the product is well separated from 0.
      } while (std::abs(std::sinh(z)) < 0.3);
      tri(i, i) = z;
      product *= std::sinh(z);
    }
    const ComplexMatrix u = random_unitary(n, sm.rng());
    const Complex on_lattice(0.0, M_PI * lattice(sm.rng()));
    tri(0, 0) = on_lattice;
    const double singular = std::abs(det(sinhm(u * tri * u.adjoint())));
    const Complex off_lattice = on_lattice + 0.5;
    tri(0, 0) = off_lattice;
    const Complex expected = product * std::sinh(off_lattice);
    const double regular =
        std::abs(det(sinhm(u * tri * u.adjoint())) - expected) / std::abs(expected);
    t.add(std::max(singular, regular), at(k));
  }
  note = "max of |det sinh X| with j pi k in spec X and the relative determinant error after "
         "shifting that eigenvalue off the lattice";
}

void check_admittance_ports(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                            Tracker& t, std::string&) {
  const double alpha = abscissa(line);
  const Eigen::Index n = line.n();
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double d = sm.d_positive();
    const Eigen::VectorXcd in = random_complex(2 * n, 1, sm.rng());
    const Eigen::VectorXcd out = chain_matrix(line, s, d).value * in;
    Eigen::VectorXcd v(2 * n), i(2 * n);
    v << in.head(n), out.head(n);
    i << in.tail(n), -out.tail(n);
    t.add(relative_error(admittance(line, s, d).value * v, i), at(k, s, d));
  }
}

void check_impedance_inverse(const LineConstants& line, const CheckSpec& spec, Sampler& sm,
                             Tracker& t, std::string&) {
  const double alpha = abscissa(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double d = sm.d_positive();
    const ComplexMatrix z = impedance(line, s, d, 0.0).value;
    t.add(rel_identity(z * admittance(line, s, d).value), at(k, s, d));
  }
}

void check_dual_norm(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                     std::string&) {
  const double alpha = abscissa(line);
  const auto dual = dual_constants(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s = sm.s_from(alpha + spec.region.re_offset);
    const double d = sm.d_positive();
    const double z = spectral_norm(impedance(line, s, d, 0.0).value);
    const double y = spectral_norm(admittance(dual, s, d).value);
    t.add(std::abs(z - y) / y, at(k, s, d));
  }
}

void check_lead_factor(const LineConstants& line, const CheckSpec& spec, Sampler& sm, Tracker& t,
                       std::string& note) {
  const auto p = bound_params(line);
  for (int k = 0; k < spec.samples; ++k) {
    const Complex s(spec.region.re_span * sm.uniform(0.0, 1.0), sm.im());
    const double d = sm.d_signed();
    const double bound = p.kappa_upper * std::exp(std::abs(d) * p.theta / p.nu_lower);
    t.add(slack(bound, spectral_norm(lead_factor(line, p, s, d).value)), at(k, s, d));
  }
  note = "advance uses nu_lower; slack relative to the bound";
}

void check_defective_blockwise(const LineConstants& line, const CheckSpec& spec, Sampler&,
                               Tracker& t, std::string& note) {
  if (line.n() == 1) {
    t.add(0.0, at(0));
    note = "scalar line: the product is 1x1 and cannot be defective";
    return;
  }
  const auto w = defectiveness_search(line, spec.samples, spec.seed);
  if (!w) {
    t.add(0.0, at(0));
    note = "no candidate right of alpha";
    return;
  }
  const double d = spec.region.delta;
  const auto blocks = abcd_blockwise(line, w->s, d, unchecked());
  const double gap = relative_error(blocks.assemble(), abcd_direct(line, w->s, d).value);
  const ComplexMatrix m = product_at(line, w->s);
  const double root = relative_error(blocks.sqrt_LR_CG * blocks.sqrt_LR_CG, m);
  t.add(std::max(gap, root), at(0, w->s, d));
  note = std::string(w->exact ? "discriminant root" : "search result") +
         "; eigenvector condition of (Ls+R)(Cs+G) at the witness: " +
         fmt(w->eigenvector_condition);
}

CheckFn function_of(CheckId id) {
  switch (id) {
    case CheckId::ExpmSeries: return check_expm_series;
    case CheckId::ExpmUnitarySimilarity: return check_expm_similarity;
    case CheckId::SqrtmResidual: return check_sqrtm_residual;
    case CheckId::SqrtmJordan: return check_sqrtm_jordan;
    case CheckId::InverseNormBound: return check_inverse_norm_bound;
    case CheckId::HermitianPartRange: return check_hermitian_range;
    case CheckId::AlphaIsMax: return check_alpha_is_max;
    case CheckId::Accretivity: return check_accretivity;
    case CheckId::DeltaBound: return check_delta_bound;
    case CheckId::KappaOrder: return check_kappa_order;
    case CheckId::LosslessExact: return check_lossless_exact;
    case CheckId::DualParams: return check_dual_params;
    case CheckId::BlockwiseDirect: return check_blockwise_direct;
    case CheckId::InverseIdentity: return check_inverse_identity;
    case CheckId::ChainAbcdNorm: return check_chain_abcd_norm;
    case CheckId::BlockCommutation: return check_block_commutation;
    case CheckId::GrowthBound: return check_growth_bound;
    case CheckId::AdmittanceGrowth: return check_admittance_growth;
    case CheckId::ImagAxisBounded: return check_imag_axis;
    case CheckId::SpectralInclusion: return check_spectral_inclusion;
    case CheckId::SinhDetFloor: return check_sinh_det_floor;
    case CheckId::BdDetFloor: return check_bd_det_floor;
    case CheckId::SinhSingularity: return check_sinh_singularity;
    case CheckId::AdmittancePorts: return check_admittance_ports;
    case CheckId::ImpedanceInverse: return check_impedance_inverse;
    case CheckId::DualNormEquality: return check_dual_norm;
    case CheckId::LeadFactorBound: return check_lead_factor;
    case CheckId::DefectiveBlockwise: return check_defective_blockwise;
  }
  throw Error(ErrorKind::UnknownCheck, "check id " + std::to_string(static_cast<int>(id)));
}

bool judge(Comparison c, double worst, double tol) {
  if (std::isnan(worst)) return false;
  switch (c) {
    case Comparison::Residual: return worst <= tol;
    case Comparison::Slack: return worst >= -tol;
    case Comparison::Positive: return worst > tol;
  }
  return false;
}

std::string_view comparison_name(Comparison c) {
  switch (c) {
    case Comparison::Residual: return "residual";
    case Comparison::Slack: return "slack";
    case Comparison::Positive: return "positive";
  }
  return "unknown";
}

json matrix_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Quartic whose roots are the s where the 2x2 product has a repeated
// eigenvalue: tr(M)^2 - 4 det(M) with M(s) = (Ls+R)(Cs+G).
std::vector<Complex> discriminant_roots(const LineConstants& line) {
  using Poly = std::vector<double>;  // coefficients, lowest degree first
  const auto mul = [](const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  const auto det2 = [](const RealMatrix& a, const RealMatrix& b) {
    // det(a s + b) for 2x2 a, b.
    return Poly{b.determinant(),
                a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1),
                a.determinant()};
  };
  const RealMatrix &L = line.L(), &C = line.C(), &R = line.R(), &G = line.G();
  const Poly trace{(R * G).trace(), (L * G + R * C).trace(), (L * C).trace()};
  const Poly tr2 = mul(trace, trace);
  const Poly det = mul(det2(L, R), det2(C, G));
  Poly disc(5);
  for (int i = 0; i < 5; ++i) disc[i] = tr2[i] - 4.0 * det[i];

  double scale = 0.0;
  for (double c : disc) scale = std::max(scale, std::abs(c));
  int degree = 4;
  while (degree > 0 && std::abs(disc[degree]) <= 1e-12 * scale) --degree;
  if (degree == 0) return {};
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -disc[i] / disc[degree];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

}  // namespace

const std::vector<CheckId>& all_checks() {
  static const std::vector<CheckId> ids = [] {
    std::vector<CheckId> v;
    for (const auto& c : kChecks) v.push_back(c.id);
    return v;
  }();
  return ids;
}

std::string_view to_string(CheckId id) { return info(id).name; }

CheckId check_from_string(std::string_view name) {
  for (const auto& c : kChecks)
    if (c.name == name) return c.id;
  throw Error(ErrorKind::UnknownCheck, "no check named '" + std::string(name) + "'");
}

Comparison comparison_of(CheckId id) { return info(id).comparison; }

std::string_view anchor_of(CheckId id) { return info(id).anchor; }

CheckSpec default_spec(CheckId id, std::uint64_t seed) {
  CheckSpec spec;
  spec.check_id = id;
  spec.seed = seed;
  spec.samples = 100;
  switch (comparison_of(id)) {
    case Comparison::Residual: spec.tolerance = 1e-10; break;
    case Comparison::Slack: spec.tolerance = 1e-9; break;
    case Comparison::Positive: spec.tolerance = 0.0; break;
  }
  Region& r = spec.region;
  switch (id) {
    case CheckId::ExpmSeries:
      spec.samples = 200;
      spec.tolerance = 1e-12;
      break;
    case CheckId::ExpmUnitarySimilarity:
      spec.samples = 50;
      spec.tolerance = 1e-12;
      break;
    case CheckId::SqrtmResidual: spec.samples = 200; break;
    case CheckId::SqrtmJordan: spec.samples = 10; break;
    case CheckId::InverseNormBound: spec.samples = 200; break;
    case CheckId::HermitianPartRange: spec.samples = 50; break;
    case CheckId::AlphaIsMax:
    case CheckId::LosslessExact:
      spec.samples = 1;
      spec.tolerance = 0.0;
      break;
    case CheckId::KappaOrder: spec.samples = 1; break;
    case CheckId::DualParams:
      spec.samples = 1;
      spec.tolerance = 1e-8;
      break;
    case CheckId::Accretivity:
      spec.samples = 200;
      r.re_offset = 1e-6;
      break;
    case CheckId::DeltaBound: spec.samples = 401; break;
    case CheckId::BlockwiseDirect:
      spec.samples = 200;
      r.im_max = 1e3;
      break;
    case CheckId::InverseIdentity:
      r.re_span = 1.0;
      r.d_max = 1.0;
      r.im_max = 1e3;
      break;
    case CheckId::ChainAbcdNorm:
      spec.tolerance = 1e-12;
      r.re_span = 1.0;
      r.d_max = 1.0;
      r.im_max = 1e3;
      break;
    case CheckId::BlockCommutation:
      spec.tolerance = 1e-9;
      r.im_max = 1e3;
      break;
    case CheckId::GrowthBound: spec.samples = 1000; break;
    case CheckId::AdmittanceGrowth: spec.samples = 200; break;
    case CheckId::ImagAxisBounded: spec.samples = 0; break;
    case CheckId::SpectralInclusion:
    case CheckId::SinhDetFloor:
    case CheckId::BdDetFloor: spec.samples = 500; break;
    case CheckId::SinhSingularity: break;
    case CheckId::AdmittancePorts:
      spec.tolerance = 1e-9;
      r.im_max = 1e3;
      break;
    case CheckId::ImpedanceInverse:
      spec.tolerance = 1e-8;
      r.im_max = 1e3;
      break;
    case CheckId::DualNormEquality:
      spec.tolerance = 1e-12;
      r.im_max = 1e3;
      break;
    case CheckId::LeadFactorBound: spec.samples = 200; break;
    case CheckId::DefectiveBlockwise:
      spec.samples = 200;
      spec.tolerance = 1e-9;
      break;
  }
  return spec;
}

std::vector<CheckSpec> default_suite(std::uint64_t seed) {
  std::vector<CheckSpec> suite;
  for (CheckId id : all_checks()) suite.push_back(default_spec(id, seed));
  return suite;
}

CheckReport run_check(const LineConstants& line, const CheckSpec& spec) {
  CheckReport report;
  report.check_id = spec.check_id;
  report.comparison = comparison_of(spec.check_id);
  report.anchor = std::string(anchor_of(spec.check_id));
  report.tolerance = spec.tolerance;
  report.seed = spec.seed;
  const CheckFn fn = function_of(spec.check_id);

  Sampler sampler(spec);
  Tracker tracker(report.comparison);
  try {
    fn(line, spec, sampler, tracker, report.note);
    report.worst_margin = tracker.worst();
    report.witness = tracker.witness();
    report.samples_run = tracker.count();
    report.passed = tracker.count() > 0 && judge(report.comparison, report.worst_margin, spec.tolerance);
  } catch (const std::exception& e) {
    report.passed = false;
    report.worst_margin = std::numeric_limits<double>::quiet_NaN();
    report.samples_run = tracker.count() + 1;
    report.witness.sample = tracker.count();
    report.note = std::string("error at sample ") + std::to_string(tracker.count()) + ": " + e.what();
  }
  return report;
}

std::vector<CheckReport> run_suite(const LineConstants& line, const std::vector<CheckSpec>& suite,
                                   unsigned threads) {
  std::vector<CheckReport> reports(suite.size());
  detail::parallel_for(suite.size(), threads,
                       [&](std::size_t i) { reports[i] = run_check(line, suite[i]); });
  return reports;
}

const std::vector<CoverageEntry>& coverage() {
  static const std::vector<CoverageEntry> entries(std::begin(kCoverage), std::end(kCoverage));
  return entries;
}

std::string report_json(const LineConstants& line, const std::vector<CheckReport>& reports,
                        std::uint64_t seed) {
  json doc;
  doc["seed"] = seed;
  doc["n"] = line.n();
  doc["constants"] = {{"L", matrix_json(line.L())},
                      {"C", matrix_json(line.C())},
                      {"R", matrix_json(line.R())},
                      {"G", matrix_json(line.G())}};
  int passed = 0;
  json checks = json::array();
  for (const auto& r : reports) {
    passed += r.passed ? 1 : 0;
    json w;
    w["sample"] = r.witness.sample;
    w["s_re"] = r.witness.s ? json(r.witness.s->real()) : json(nullptr);
    w["s_im"] = r.witness.s ? json(r.witness.s->imag()) : json(nullptr);
    w["d"] = r.witness.d ? json(*r.witness.d) : json(nullptr);
    checks.push_back({{"check_id", std::string(to_string(r.check_id))},
                      {"status", r.passed ? "pass" : "fail"},
                      {"comparison", std::string(comparison_name(r.comparison))},
                      {"worst_margin", std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr)},
                      {"tolerance", r.tolerance},
                      {"samples_run", r.samples_run},
                      {"seed", r.seed},
                      {"witness", w},
                      {"quote_anchor", r.anchor},
                      {"note", r.note}});
  }
  doc["summary"] = {{"total", reports.size()},
                    {"passed", passed},
                    {"failed", static_cast<int>(reports.size()) - passed}};
  doc["checks"] = std::move(checks);
  return doc.dump(2) + "\n";
}

std::vector<CheckSpec> parse_suite(std::string_view text, std::uint64_t default_seed) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("suite: ") + e.what());
  }
  std::uint64_t seed = default_seed;
  json checks;
  if (doc.is_array()) {
    checks = doc;
  } else if (doc.is_object() && doc.contains("checks")) {
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned())
        throw Error(ErrorKind::ParseError, "suite: field 'seed' must be a non-negative integer");
      seed = doc["seed"].get<std::uint64_t>();
    }
    checks = doc["checks"];
    if (!checks.is_array()) throw Error(ErrorKind::ParseError, "suite: field 'checks' must be an array");
  } else {
    throw Error(ErrorKind::ParseError, "suite: expected an array or an object with 'checks'");
  }

  std::vector<CheckSpec> suite;
  for (size_t i = 0; i < checks.size(); ++i) {
    const json& c = checks[i];
    const std::string where = "suite: checks[" + std::to_string(i) + "]";
    if (!c.is_object() || !c.contains("check_id") || !c["check_id"].is_string()) {
      throw Error(ErrorKind::ParseError, where + " needs a string 'check_id'");
    }
    CheckSpec spec = default_spec(check_from_string(c["check_id"].get<std::string>()), seed);
    const auto number = [&](const json& obj, const char* key, double& out) {
      if (!obj.contains(key)) return;
      if (!obj[key].is_number())
        throw Error(ErrorKind::ParseError, where + "." + key + " must be a number");
      out = obj[key].get<double>();
    };
    if (c.contains("samples")) {
      if (!c["samples"].is_number_integer() || c["samples"].get<long long>() < 0)
        throw Error(ErrorKind::ParseError, where + ".samples must be a non-negative integer");
      spec.samples = c["samples"].get<int>();
    }
    number(c, "tolerance", spec.tolerance);
    if (c.contains("seed")) {
      if (!c["seed"].is_number_unsigned())
        throw Error(ErrorKind::ParseError, where + ".seed must be a non-negative integer");
      spec.seed = c["seed"].get<std::uint64_t>();
    }
    if (c.contains("region")) {
      const json& r = c["region"];
      if (!r.is_object()) throw Error(ErrorKind::ParseError, where + ".region must be an object");
      static const char* known[] = {"re_offset", "re_span", "im_min", "im_max", "d_min",
                                    "d_max", "beta", "delta", "epsilon", "omega_min",
                                    "omega_max", "points_per_decade", "stagnation"};
      for (auto it = r.begin(); it != r.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return it.key() == k; }) == std::end(known)) {
          throw Error(ErrorKind::ParseError, where + ".region has unknown field '" + it.key() + "'");
        }
      }
      Region& g = spec.region;
      number(r, "re_offset", g.re_offset);
      number(r, "re_span", g.re_span);
      number(r, "im_min", g.im_min);
      number(r, "im_max", g.im_max);
      number(r, "d_min", g.d_min);
      number(r, "d_max", g.d_max);
      number(r, "beta", g.beta);
      number(r, "delta", g.delta);
      number(r, "epsilon", g.epsilon);
      number(r, "omega_min", g.omega_min);
      number(r, "omega_max", g.omega_max);
      number(r, "stagnation", g.stagnation);
      if (r.contains("points_per_decade")) {
        if (!r["points_per_decade"].is_number_integer() || r["points_per_decade"].get<int>() < 1)
          throw Error(ErrorKind::ParseError, where + ".region.points_per_decade must be a positive integer");
        g.points_per_decade = r["points_per_decade"].get<int>();
      }
      if (!(g.im_min > 0.0 && g.im_max >= g.im_min && g.omega_min > 0.0 &&
            g.omega_max > g.omega_min && g.d_max >= g.d_min && g.delta > 0.0 && g.epsilon > 0.0)) {
        throw Error(ErrorKind::ParseError, where + ".region is inconsistent");
      }
    }
    suite.push_back(spec);
  }
  return suite;
}

std::optional<DefectivenessWitness> defectiveness_search(const LineConstants& line, int samples,
                                                         std::uint64_t seed) {
  const double alpha = abscissa(line);
  std::optional<DefectivenessWitness> best;
  const auto consider = [&](Complex s, bool exact) {
    if (!(s.real() > alpha) || !std::isfinite(s.real()) || !std::isfinite(s.imag())) return;
    const double cond = eigenvector_condition(product_at(line, s));
    if (!best || cond > best->eigenvector_condition) best = DefectivenessWitness{s, cond, exact};
  };

  if (line.n() == 2) {
    for (Complex s : discriminant_roots(line)) consider(s, true);
    if (best) return best;
  }

  CheckSpec spec = default_spec(CheckId::DefectiveBlockwise, seed);
  Sampler sm(spec);
  const int global = std::max(1, samples / 2);
  for (int k = 0; k < global; ++k) consider(sm.s_from(alpha + 1e-3), false);
  if (!best) return best;
  // Pattern search around the best global sample.
  double step = std::max(1e-3, 0.1 * std::abs(best->s));
  for (int k = global; k < samples && step > 1e-14 * std::abs(best->s); ++k) {
    const Complex centre = best->s;
    const double before = best->eigenvector_condition;
    for (Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) consider(centre + step * dir, false);
    if (best->eigenvector_condition <= before) step *= 0.5;
  }
  return best;
}

}  // namespace telegraph
