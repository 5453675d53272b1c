#pragma once

// Per-unit-length line constants (SI: H/m, F/m, ohm/m, S/m) and the scalar
// parameters that drive the accretivity domain and the growth envelopes.

#include <string>
#include <vector>

#include "telegraph/matfun.hpp"

namespace telegraph {

/// Raw, unvalidated input: four real n x n matrices.
struct LineMatrices {
  RealMatrix L;
  RealMatrix C;
  RealMatrix R;
  RealMatrix G;
};

struct ValidationReport {
  int n = 0;
  /// max |M - M^T| per matrix, in L, C, R, G order.
  double asymmetry_L = 0.0;
  double asymmetry_C = 0.0;
  double asymmetry_R = 0.0;
  double asymmetry_G = 0.0;
  double lambda_min_L = 0.0;
  double lambda_min_C = 0.0;
  bool passed = false;
  std::vector<std::string> problems;
};

/// Relative symmetry tolerance applied to every matrix.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Throws DimensionMismatch when the matrices are not all n x n (n >= 1).
ValidationReport validate(const LineMatrices& m);

/// Validated, symmetrized line constants. Immutable once built; the extreme
/// eigenvalues used by every threshold are cached at construction.
class LineConstants {
 public:
  /// Throws ValidationFailure (with the report's problems in the message)
  /// when validate() fails.
  static LineConstants from(const LineMatrices& m);

  int n() const { return static_cast<int>(L_.rows()); }
  const RealMatrix& L() const { return L_; }
  const RealMatrix& C() const { return C_; }
  const RealMatrix& R() const { return R_; }
  const RealMatrix& G() const { return G_; }
  LineMatrices matrices() const { return {L_, C_, R_, G_}; }

  struct Extremes {
    double min = 0.0;
    double max = 0.0;
  };
  const Extremes& eig_L() const { return eig_L_; }
  const Extremes& eig_C() const { return eig_C_; }
  const Extremes& eig_R() const { return eig_R_; }
  const Extremes& eig_G() const { return eig_G_; }

 private:
  LineConstants() = default;

  RealMatrix L_, C_, R_, G_;
  Extremes eig_L_, eig_C_, eig_R_, eig_G_;
};

/// Swaps L <-> C and R <-> G.
LineConstants dual_constants(const LineConstants& line);

struct AccretivityThresholds {
  double gamma = 0.0;  ///< Cs + G accretive for Re(s) > gamma
  double rho = 0.0;    ///< Ls + R accretive for Re(s) > rho
};
AccretivityThresholds accretivity_thresholds(const LineConstants& line);

/// alpha = max(rho, gamma): both factors accretive on Re(s) > alpha.
double abscissa(const LineConstants& line);

struct DeltaCoefficients {
  double c0 = 0.0;  ///< max(||R||, ||G||), 1/m-scale
  double c1 = 0.0;  ///< max(||L||, ||C||), s/m-scale
};
DeltaCoefficients lemma_delta_coeffs(const LineConstants& line);

/// Frequency grid for the lossless-exponential supremum. Samples omega = 0
/// and +/- omega on a log grid, then keeps extending upward one decade at a
/// time until the running maximum has not grown for `stagnation_decades`.
struct KappaGrid {
  double omega_min = 1e-3;
  double omega_max = 1e9;
  int points_per_decade = 20;
  int stagnation_decades = 3;
  double omega_cap = 1e15;
};

struct KappaEstimate {
  double lower = 1.0;  ///< sampled max, a certified lower estimate of kappa
  double upper = 1.0;  ///< certified upper bound, min of envelope and the exact commuting value
  double envelope = 1.0;  ///< analytic envelope alone (normal or block form)
  bool normal_product = false;  ///< CL normal, closed-form envelope used
  double argmax_omega = 0.0;
  double omega_reached = 0.0;
  int samples = 0;
};

/// ||exp([[0, j w L], [j w C, 0]])||_2 at one frequency.
double lossless_exponential_norm(const LineConstants& line, double omega);

KappaEstimate kappa_estimate(const LineConstants& line, const KappaGrid& grid = {});

/// Relative Frobenius commutator below which CL is treated as normal.
inline constexpr double kNormalityTolerance = 1e-10;

struct BoundParams {
  double alpha = 0.0;        ///< 1/s
  double gamma = 0.0;        ///< 1/s
  double rho = 0.0;          ///< 1/s
  double c0 = 0.0;           ///< 1/m
  double c1 = 0.0;           ///< s/m
  double kappa_lower = 1.0;  ///< dimensionless
  double kappa_upper = 1.0;  ///< dimensionless
  double theta = 0.0;        ///< 1/s
  double nu_lower = 0.0;     ///< m/s, from kappa_upper
  double nu_upper = 0.0;     ///< m/s, from kappa_lower
  double b = 0.0;            ///< min(lambda_min L, lambda_min C)
  bool normal_product = false;
};

BoundParams bound_params(const LineConstants& line, const KappaGrid& grid = {});

/// kappa_upper * exp((|d| / nu_lower) * (|Re s| + theta)).
double growth_envelope(const BoundParams& p, double re_s, double d);

}  // namespace telegraph
