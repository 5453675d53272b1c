#pragma once

// Property-verification harness. Each check samples a region of (s, d) or
// random matrices, evaluates one equality or inequality and keeps the worst
// margin together with the sample that produced it.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "telegraph/line.hpp"
#include "telegraph/matfun.hpp"

namespace telegraph {

enum class CheckId {
  ExpmSeries,
  ExpmUnitarySimilarity,
  SqrtmResidual,
  SqrtmJordan,
  InverseNormBound,
  HermitianPartRange,
  AlphaIsMax,
  Accretivity,
  DeltaBound,
  KappaOrder,
  LosslessExact,
  DualParams,
  BlockwiseDirect,
  InverseIdentity,
  ChainAbcdNorm,
  BlockCommutation,
  GrowthBound,
  AdmittanceGrowth,
  ImagAxisBounded,
  SpectralInclusion,
  SinhDetFloor,
  BdDetFloor,
  SinhSingularity,
  AdmittancePorts,
  ImpedanceInverse,
  DualNormEquality,
  LeadFactorBound,
  DefectiveBlockwise,
};

/// Every check id, in report order.
const std::vector<CheckId>& all_checks();

std::string_view to_string(CheckId id);
/// Throws UnknownCheck for names that are not check ids.
CheckId check_from_string(std::string_view name);

/// How the worst margin is judged against the tolerance.
enum class Comparison {
  Residual,  ///< worst = max residual, pass iff worst <= tolerance
  Slack,     ///< worst = min slack, pass iff worst >= -tolerance
  Positive,  ///< worst = min value, pass iff worst > tolerance
};

Comparison comparison_of(CheckId id);

/// Math statement of the property a check evaluates.
std::string_view anchor_of(CheckId id);

/// Sampling region. Unused fields are ignored by a given check.
///
/// s: Re(s) is uniform in [lo, lo + re_span] where lo is alpha + re_offset for
/// claims on the right of alpha, beta for the determinant floors, and
/// -re_span for claims valid on the whole plane (then over [-re_span,
/// re_span]). |Im(s)| is log-uniform in [im_min, im_max] with a random sign.
/// d is uniform in [d_min, d_max]; claims that need d >= delta use
/// [delta, delta + d_max].
struct Region {
  double re_offset = 0.1;
  double re_span = 10.0;
  double im_min = 1e-2;
  double im_max = 1e6;
  double d_min = 0.0;
  double d_max = 5.0;
  /// Lower edge for Re(s) in the determinant floors; NaN selects
  /// max(0, alpha) + 0.5.
  double beta = std::numeric_limits<double>::quiet_NaN();
  double delta = 1.0;
  double epsilon = 0.5;
  /// Imaginary-axis grid in units of the slowest one-way delay of a line of
  /// length delta, with this many points per decade.
  double omega_min = 1e-2;
  double omega_max = 1e9;
  int points_per_decade = 1000;
  /// Allowed relative growth of the running maximum over the last three
  /// decades of the imaginary-axis grid.
  double stagnation = 0.01;
};

struct CheckSpec {
  CheckId check_id = CheckId::InverseIdentity;
  int samples = 100;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  Region region;
};

/// Default sample count, tolerance and region for a check.
CheckSpec default_spec(CheckId id, std::uint64_t seed);

/// One spec per check id, all sharing `seed`.
std::vector<CheckSpec> default_suite(std::uint64_t seed);

struct Witness {
  int sample = -1;
  std::optional<Complex> s;
  std::optional<double> d;
};

struct CheckReport {
  CheckId check_id = CheckId::InverseIdentity;
  bool passed = false;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  Comparison comparison = Comparison::Residual;
  Witness witness;
  int samples_run = 0;
  std::uint64_t seed = 0;
  std::string anchor;
  std::string note;
};

/// Runs one check. Deterministic in (constants, spec). Kernel errors raised
/// while sampling are recorded as a failure at the offending sample.
CheckReport run_check(const LineConstants& line, const CheckSpec& spec);

/// Runs every spec, concurrently on up to `threads` workers (0 picks the
/// hardware concurrency). Reports come back in suite order.
std::vector<CheckReport> run_suite(const LineConstants& line, const std::vector<CheckSpec>& suite,
                                   unsigned threads = 0);

/// Maps a module invariant to the check that exercises it.
struct CoverageEntry {
  std::string_view module;
  std::string_view invariant;
  CheckId check;
};

const std::vector<CoverageEntry>& coverage();

/// JSON document with the constants, a pass/fail summary and one object per
/// report carrying check_id, status, worst_margin, witness{s_re, s_im, d},
/// quote_anchor, samples_run, tolerance, comparison, seed and note.
std::string report_json(const LineConstants& line, const std::vector<CheckReport>& reports,
                        std::uint64_t seed);

/// Parses a suite document: either an array of check objects or an object
/// with "seed" and "checks". Each check object needs "check_id"; "samples",
/// "tolerance", "seed" and "region" fall back to the defaults. Throws
/// ParseError or UnknownCheck.
std::vector<CheckSpec> parse_suite(std::string_view json_text, std::uint64_t default_seed);

/// Search for s where (Ls+R)(Cs+G) is closest to defective, measured by the
/// condition number of its eigenvector matrix. Exact for n = 2 (roots of the
/// discriminant), a random search otherwise.
struct DefectivenessWitness {
  Complex s;
  double eigenvector_condition = 1.0;
  /// True when s is a root of the n = 2 discriminant, false for search results.
  bool exact = false;
};
std::optional<DefectivenessWitness> defectiveness_search(const LineConstants& line, int samples,
                                                         std::uint64_t seed);

}  // namespace telegraph
