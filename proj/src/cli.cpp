#include "telegraph/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "parallel.hpp"
#include "telegraph/config.hpp"
#include "telegraph/netparams.hpp"
#include "telegraph/verify.hpp"

namespace telegraph::cli {

namespace {

std::string sci(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value,
                                    std::chars_format::scientific);
  return std::string(buffer, result.ptr);
}

std::string g17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string complex17(Complex z) {
  char buffer[96];
  std::snprintf(buffer, sizeof buffer, "%.17g%+.17gj", z.real(), z.imag());
  return buffer;
}

bool needs_positive_domain(Quantity q) {
  return q == Quantity::Admittance || q == Quantity::Impedance;
}

std::vector<Quantity> matrix_quantities(const SweepSpec& spec) {
  std::vector<Quantity> out;
  for (const Quantity q : spec.quantities) {
    if (q == Quantity::Bounds) continue;
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

bool wants_bounds(const SweepSpec& spec) {
  return std::find(spec.quantities.begin(), spec.quantities.end(), Quantity::Bounds) !=
         spec.quantities.end();
}

ComplexMatrix evaluate(const LineConstants& line, Quantity q, Complex s, double d) {
  switch (q) {
    case Quantity::Chain: return chain_matrix(line, s, d).value;
    case Quantity::Abcd: return abcd_direct(line, s, d).value;
    case Quantity::Blockwise: return abcd_blockwise(line, s, d).assemble();
    case Quantity::Admittance: return admittance(line, s, d).value;
    case Quantity::Impedance: return impedance(line, s, d).value;
    case Quantity::Lead: return lead_factor(line, bound_params(line), s, d).value;
    case Quantity::Bounds: break;
  }
  throw Error(ErrorKind::ParseError, "bounds is a sweep column, not a matrix");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IOError, "cannot open " + path + " for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  std::string origin = "--seed";
  if (text.empty()) {
    const char* env = std::getenv("TELEGRAPH_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    text = env;
    origin = "TELEGRAPH_SEED";
  }
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, origin + " must be an unsigned integer, got '" + text + "'");
  }
  return seed;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationFailure:
    case ErrorKind::UnknownCheck:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NonFinite:
      return kExitParse;
    case ErrorKind::DomainError:
    case ErrorKind::ShortCircuit:
    case ErrorKind::BranchCut:
      return kExitDomain;
    default:
      return kExitOther;
  }
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Chain: return "chain";
    case Quantity::Abcd: return "abcd";
    case Quantity::Blockwise: return "blockwise";
    case Quantity::Admittance: return "admittance";
    case Quantity::Impedance: return "impedance";
    case Quantity::Lead: return "lead";
    case Quantity::Bounds: return "bounds";
  }
  return "unknown";
}

Quantity parse_quantity(std::string_view name) {
  for (const Quantity q : {Quantity::Chain, Quantity::Abcd, Quantity::Blockwise,
                           Quantity::Admittance, Quantity::Impedance, Quantity::Lead,
                           Quantity::Bounds}) {
    if (name == to_string(q)) return q;
  }
  throw Error(ErrorKind::ParseError,
              "unknown quantity '" + std::string(name) +
                  "' (expected chain, abcd, blockwise, admittance, impedance, lead or bounds)");
}

std::vector<double> sweep_frequencies(const SweepSpec& spec) {
  std::vector<double> f(static_cast<std::size_t>(spec.points));
  const double last = spec.points - 1;
  if (spec.spacing == Spacing::Linear) {
    for (int i = 0; i < spec.points; ++i) {
      f[i] = spec.f_start + (spec.f_stop - spec.f_start) * (i / last);
    }
  } else {
    const double lo = std::log10(spec.f_start);
    const double hi = std::log10(spec.f_stop);
    for (int i = 0; i < spec.points; ++i) f[i] = std::pow(10.0, lo + (hi - lo) * (i / last));
  }
  f.front() = spec.f_start;
  f.back() = spec.f_stop;
  return f;
}

void check_sweep(const SweepSpec& spec, const LineConstants& line) {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::ParseError, what); };
  if (!std::isfinite(spec.f_start) || !std::isfinite(spec.f_stop) ||
      !std::isfinite(spec.sigma) || !std::isfinite(spec.d)) {
    fail("sweep: f_start, f_stop, sigma and d must be finite");
  }
  if (spec.points < 2) fail("sweep: points must be at least 2");
  if (!(spec.f_start < spec.f_stop)) fail("sweep: f_start must be below f_stop");
  if (spec.spacing == Spacing::Log && !(spec.f_start > 0.0)) {
    fail("sweep: log spacing needs f_start > 0");
  }
  if (spec.quantities.empty()) fail("sweep: no quantities requested");
  for (const Quantity q : spec.quantities) {
    if (q == Quantity::Blockwise || q == Quantity::Lead) {
      fail("sweep: quantity '" + std::string(to_string(q)) + "' is only available in eval");
    }
  }
  const auto f = sweep_frequencies(spec);
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (!(f[i] > f[i - 1])) fail("sweep: grid is not strictly increasing at point " + std::to_string(i));
  }

  bool port_domain = false;
  for (const Quantity q : spec.quantities) port_domain = port_domain || needs_positive_domain(q);
  if (port_domain && !(spec.d > 0.0)) {
    throw Error(ErrorKind::ShortCircuit,
                "sweep: admittance and impedance need d > 0; d = " + g17(spec.d) +
                    " is a short-circuit");
  }
  if (!(spec.d >= 0.0)) throw Error(ErrorKind::DomainError, "sweep: d must be >= 0");
  const double alpha = abscissa(line);
  if (port_domain && !(spec.sigma > alpha)) {
    throw Error(ErrorKind::DomainError, "sweep: sigma = " + g17(spec.sigma) +
                                            " must exceed alpha = " + g17(alpha) +
                                            " for admittance and impedance");
  }
}

std::vector<SweepRow> run_sweep(const LineConstants& line, const SweepSpec& spec,
                                unsigned threads) {
  check_sweep(spec, line);
  const auto f = sweep_frequencies(spec);
  const auto quantities = matrix_quantities(spec);
  double envelope = std::numeric_limits<double>::quiet_NaN();
  if (wants_bounds(spec)) envelope = growth_envelope(bound_params(line), spec.sigma, spec.d);

  std::vector<SweepRow> rows(f.size());
  detail::parallel_for(f.size(), threads, [&](std::size_t i) {
    const Complex s(spec.sigma, 2.0 * std::numbers::pi * f[i]);
    SweepRow& row = rows[i];
    row.f = f[i];
    row.envelope = envelope;
    for (const Quantity q : quantities) {
      ComplexMatrix m = evaluate(line, q, s, spec.d);
      const double norm = spectral_norm(m);
      if (!std::isfinite(norm)) {
        throw Error(ErrorKind::NonFinite, "sweep: " + std::string(to_string(q)) +
                                              " norm is not finite at f = " + g17(f[i]));
      }
      row.norms.push_back(norm);
      if (spec.full_matrices) row.matrices.push_back(std::move(m));
    }
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, int n,
                     const std::vector<SweepRow>& rows) {
  const auto quantities = matrix_quantities(spec);
  const bool bounds = wants_bounds(spec);
  out << "f";
  for (const Quantity q : quantities) {
    const std::string name(to_string(q));
    out << ',' << name << "_norm";
    if (!spec.full_matrices) continue;
    for (int i = 1; i <= 2 * n; ++i) {
      for (int j = 1; j <= 2 * n; ++j) {
        const std::string entry = name + "_" + std::to_string(i) + "_" + std::to_string(j);
        out << ',' << entry << "_re," << entry << "_im";
      }
    }
  }
  if (bounds) out << ",envelope";
  out << '\n';

  for (const SweepRow& row : rows) {
    out << sci(row.f);
    for (std::size_t k = 0; k < quantities.size(); ++k) {
      out << ',' << sci(row.norms[k]);
      if (!spec.full_matrices) continue;
      const ComplexMatrix& m = row.matrices[k];
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          out << ',' << sci(m(i, j).real()) << ',' << sci(m(i, j).imag());
        }
      }
    }
    if (bounds) out << ',' << sci(row.envelope);
    out << '\n';
  }
}

std::string params_report(const LineConstants& line) {
  const ValidationReport v = validate(line.matrices());
  const BoundParams p = bound_params(line);
  std::ostringstream os;
  const auto put = [&os](const char* name, const std::string& value, const char* unit) {
    char buffer[160];
    std::snprintf(buffer, sizeof buffer, "%-12s %-25s %s", name, value.c_str(), unit);
    std::string text = buffer;
    while (!text.empty() && text.back() == ' ') text.pop_back();
    os << text << '\n';
  };
  put("n", std::to_string(line.n()), "");
  put("alpha", g17(p.alpha), "1/s");
  put("gamma", g17(p.gamma), "1/s");
  put("rho", g17(p.rho), "1/s");
  put("c0", g17(p.c0), "1/m");
  put("c1", g17(p.c1), "s/m");
  put("kappa_lower", g17(p.kappa_lower), "1");
  put("kappa_upper", g17(p.kappa_upper), "1");
  put("theta", g17(p.theta), "1/s");
  put("nu_lower", g17(p.nu_lower), "m/s");
  put("nu_upper", g17(p.nu_upper), "m/s");
  put("b", g17(p.b), "H/m or F/m");
  put("normal_CL", p.normal_product ? "yes" : "no", "");
  put("validation", v.passed ? "passed" : "failed", "");
  put("asymmetry", "L=" + g17(v.asymmetry_L) + " C=" + g17(v.asymmetry_C) +
                       " R=" + g17(v.asymmetry_R) + " G=" + g17(v.asymmetry_G),
      "");
  return os.str();
}

std::string eval_report(const LineConstants& line, Complex s, double d, Quantity q) {
  const ComplexMatrix m = evaluate(line, q, s, d);
  std::ostringstream os;
  os << "quantity " << to_string(q) << '\n';
  os << "s " << complex17(s) << '\n';
  os << "d " << g17(d) << '\n';
  os << "norm " << g17(spectral_norm(m)) << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j == 0 ? "" : " ") << complex17(m(i, j));
    os << '\n';
  }
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Network matrices and growth bounds of uniform multiconductor lines", "telegraph"};
  app.require_subcommand(1);

  std::string config;
  unsigned threads = 0;

  auto* params_cmd = app.add_subcommand("params", "print bound parameters of a line");
  params_cmd->add_option("config", config, "line configuration (JSON)")->required();
  std::string emit_path;
  params_cmd->add_option("--emit-config", emit_path, "write the validated constants to FILE");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate one network matrix");
  eval_cmd->add_option("config", config, "line configuration (JSON)")->required();
  double s_re = 0.0, s_im = 0.0, eval_d = 0.0;
  std::string quantity;
  eval_cmd->add_option("--s-re", s_re, "Re(s), 1/s");
  eval_cmd->add_option("--s-im", s_im, "Im(s), rad/s");
  eval_cmd->add_option("--d", eval_d, "length, m")->required();
  eval_cmd->add_option("--quantity", quantity,
                       "chain, abcd, blockwise, admittance, impedance or lead")
      ->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate norms over a frequency grid");
  sweep_cmd->add_option("config", config, "line configuration (JSON)")->required();
  SweepSpec sweep;
  std::string spacing = "lin";
  std::vector<std::string> quantities;
  std::string sweep_out;
  sweep_cmd->add_option("--f-start", sweep.f_start, "first frequency, Hz")->required();
  sweep_cmd->add_option("--f-stop", sweep.f_stop, "last frequency, Hz")->required();
  sweep_cmd->add_option("--points", sweep.points, "grid points")->required();
  sweep_cmd->add_option("--spacing", spacing, "lin or log")
      ->check(CLI::IsMember({"lin", "linear", "log"}));
  sweep_cmd->add_option("--sigma", sweep.sigma, "Re(s), 1/s");
  sweep_cmd->add_option("--d", sweep.d, "length, m")->required();
  sweep_cmd->add_option("--quantities", quantities,
                        "comma-separated subset of chain, abcd, admittance, impedance, bounds")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "CSV output file")->required();
  sweep_cmd->add_flag("--full-matrices", sweep.full_matrices, "also write every matrix entry");
  sweep_cmd->add_option("--threads", threads, "worker threads, 0 for all cores");

  auto* verify_cmd = app.add_subcommand("verify", "run the property-verification suite");
  verify_cmd->add_option("config", config, "line configuration (JSON)")->required();
  std::string suite_path, verify_out, seed_flag;
  verify_cmd->add_option("--suite", suite_path, "suite file (JSON); default suite when absent");
  verify_cmd->add_option("--out", verify_out, "JSON report file")->required();
  verify_cmd->add_option("--seed", seed_flag, "seed, overrides TELEGRAPH_SEED");
  verify_cmd->add_option("--threads", threads, "worker threads, 0 for all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitParse;
  }

  try {
    const LineConstants line = load_config(config);

    if (params_cmd->parsed()) {
      out << params_report(line);
      if (!emit_path.empty()) write_file(emit_path, emit_config(line));
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      out << eval_report(line, Complex(s_re, s_im), eval_d, parse_quantity(quantity));
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      sweep.spacing = spacing == "log" ? Spacing::Log : Spacing::Linear;
      for (const auto& name : quantities) sweep.quantities.push_back(parse_quantity(name));
      const auto rows = run_sweep(line, sweep, threads);
      std::ostringstream csv;
      write_sweep_csv(csv, sweep, line.n(), rows);
      write_file(sweep_out, csv.str());
      out << "wrote " << rows.size() << " rows to " << sweep_out << '\n';
      return kExitOk;
    }

    const std::uint64_t seed = resolve_seed(seed_flag);
    const auto suite =
        suite_path.empty() ? default_suite(seed) : parse_suite(read_file(suite_path), seed);
    const auto reports = run_suite(line, suite, threads);
    write_file(verify_out, report_json(line, reports, seed));
    int passed = 0;
    for (const auto& r : reports) {
      passed += r.passed ? 1 : 0;
      char buffer[160];
      std::snprintf(buffer, sizeof buffer, "%s %-22s worst=%-24s tol=%s", r.passed ? "PASS" : "FAIL",
                    std::string(telegraph::to_string(r.check_id)).c_str(),
                    g17(r.worst_margin).c_str(), g17(r.tolerance).c_str());
      out << buffer << '\n';
    }
    out << passed << "/" << reports.size() << " checks passed, seed " << seed << '\n';
    return passed == static_cast<int>(reports.size()) ? kExitOk : kExitVerifyFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace telegraph::cli
