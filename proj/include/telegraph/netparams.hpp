#pragma once

// Chain, ABCD, admittance and impedance matrices of a uniform line of length
// d, all 2n x 2n, evaluated at one complex frequency s (1/s).
//
// Port conventions: the chain matrix maps [V_in; I_in] to [V_out; I_out], the
// ABCD matrix is its inverse, and the admittance matrix maps [V_in; V_out] to
// [I_in; -I_out].

#include <string_view>

#include "telegraph/line.hpp"
#include "telegraph/matfun.hpp"

namespace telegraph {

enum class PortKind { Chain, Abcd, Admittance, Impedance, LeadFactor };

std::string_view to_string(PortKind kind);

struct PortMatrix {
  PortKind kind = PortKind::Chain;
  ComplexMatrix value;
  Complex s;
  double d = 0.0;
};

/// Blocks of the ABCD matrix together with the factors they were built from.
struct AbcdBlocks {
  ComplexMatrix A_d, B_d, C_d, D_d;
  ComplexMatrix Zc;           ///< (Ls+R) sqrt((Cs+G)(Ls+R))^-1
  ComplexMatrix Yc;           ///< (Cs+G) sqrt((Ls+R)(Cs+G))^-1
  ComplexMatrix sqrt_LR_CG;   ///< principal sqrt of (Ls+R)(Cs+G)
  ComplexMatrix sqrt_CG_LR;   ///< principal sqrt of (Cs+G)(Ls+R)
  Complex s;
  double d = 0.0;
  /// Relative Frobenius gap to the direct exponential, from the self-check.
  double direct_gap = 0.0;

  ComplexMatrix assemble() const;
};

/// Self-check threshold for the blockwise ABCD against the direct
/// exponential. The effective threshold is
///   max(relative, ulps * eps * ||d * exponent||_1)
/// because both sides inherit the forward error of scaling and squaring,
/// which grows with the number of squarings.
struct BlockwiseOptions {
  double relative = 1e-10;
  double ulps = 1e4;
};

/// [[0, Ls+R], [Cs+G, 0]].
ComplexMatrix exponent_matrix(const LineConstants& line, Complex s);

/// Xi(s, -d) = expm(-d * exponent). Defined for every finite s and d >= 0.
PortMatrix chain_matrix(const LineConstants& line, Complex s, double d);

/// Xi(s, d) = expm(d * exponent). Defined for every finite s and real d.
PortMatrix abcd_direct(const LineConstants& line, Complex s, double d);

/// Blockwise ABCD through the principal square roots. Requires
/// Re(s) > alpha; throws DomainError otherwise, ConsistencyError when the
/// assembled blocks disagree with the direct exponential.
AbcdBlocks abcd_blockwise(const LineConstants& line, Complex s, double d,
                          const BlockwiseOptions& options = {});

/// [[D B^-1, -B^-1], [-B^-1, D B^-1]]. Requires d > 0 and Re(s) > alpha.
/// The blocks are evaluated as csch and coth of d sqrt((Cs+G)(Ls+R)) times
/// Yc, so B, which grows exponentially in d Re(s), is never inverted.
/// Singular is raised when sinh(d sqrt((Cs+G)(Ls+R))) is numerically singular.
PortMatrix admittance(const LineConstants& line, Complex s, double d,
                      const BlockwiseOptions& options = {});

/// Impedance through the dual line: Z = J Y'(s, d) J^T with
/// J = [[0, -I], [I, 0]] and Y' the admittance of the dual. The result is
/// compared with inverse(Y) and a ConsistencyError is raised if the relative
/// gap exceeds max(cross_check_tol, cond(Y) * ulps * eps * ||d * exponent||_1);
/// pass 0 to skip the comparison.
inline constexpr double kImpedanceCrossCheck = 1e-8;
PortMatrix impedance(const LineConstants& line, Complex s, double d,
                     double cross_check_tol = kImpedanceCrossCheck,
                     const BlockwiseOptions& options = {});

/// H_d(s) = exp(-|d| s / nu_lower) Xi(s, d).
PortMatrix lead_factor(const LineConstants& line, const BoundParams& params, Complex s,
                       double d);

}  // namespace telegraph
