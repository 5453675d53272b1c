#pragma once

// Command-line front end: params, eval, sweep and verify over a JSON line
// configuration. The pieces are exposed so they can be driven in-process.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "telegraph/error.hpp"
#include "telegraph/line.hpp"
#include "telegraph/matfun.hpp"

namespace telegraph::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitVerifyFailed = 4;

/// Seed of the default verification suite; TELEGRAPH_SEED overrides it.
inline constexpr std::uint64_t kDefaultSeed = 1;

int exit_code(ErrorKind kind);

/// Network quantities. `eval` accepts all but Bounds, `sweep` accepts
/// chain, abcd, admittance, impedance and bounds.
enum class Quantity { Chain, Abcd, Blockwise, Admittance, Impedance, Lead, Bounds };

std::string_view to_string(Quantity q);
/// Throws ParseError for unknown names.
Quantity parse_quantity(std::string_view name);

enum class Spacing { Linear, Log };

struct SweepSpec {
  double f_start = 0.0;  ///< Hz
  double f_stop = 0.0;   ///< Hz
  int points = 2;
  Spacing spacing = Spacing::Linear;
  double sigma = 0.0;  ///< 1/s, s = sigma + j 2 pi f
  double d = 1.0;      ///< m
  std::vector<Quantity> quantities;
  bool full_matrices = false;
};

/// Rejects malformed grids with ParseError, d <= 0 with admittance or
/// impedance with ShortCircuit, d < 0 otherwise and sigma <= alpha with
/// admittance or impedance with DomainError.
void check_sweep(const SweepSpec& spec, const LineConstants& line);

/// Strictly increasing grid from f_start to f_stop inclusive.
std::vector<double> sweep_frequencies(const SweepSpec& spec);

struct SweepRow {
  double f = 0.0;
  /// Spectral norm per matrix quantity, in request order.
  std::vector<double> norms;
  /// Full matrices per matrix quantity when requested.
  std::vector<ComplexMatrix> matrices;
  /// kappa_upper exp((|d| / nu_lower)(|sigma| + theta)) when bounds are requested.
  double envelope = std::numeric_limits<double>::quiet_NaN();
};

/// Evaluates every grid point, concurrently on up to `threads` workers.
/// Rows come back in frequency order.
std::vector<SweepRow> run_sweep(const LineConstants& line, const SweepSpec& spec,
                                unsigned threads = 0);

/// Header plus one line per row. Numbers are shortest round-trip scientific.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, int n,
                     const std::vector<SweepRow>& rows);

/// Bound parameters and validation summary, one "name value unit" per line.
std::string params_report(const LineConstants& line);

/// Full matrix with 17 significant digits plus its spectral norm.
std::string eval_report(const LineConstants& line, Complex s, double d, Quantity q);

/// Parses argv and runs one subcommand. Errors are written to `err` and
/// mapped to the exit statuses above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace telegraph::cli
