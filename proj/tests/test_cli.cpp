#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "telegraph/cli.hpp"
#include "telegraph/config.hpp"
#include "telegraph/error.hpp"
#include "telegraph/random.hpp"

using namespace telegraph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "telegraph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "telegraph_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    for (std::string cell; std::getline(cells_in, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kUnitScalar =
    R"({"n": 1, "units": "si_per_meter", "L": [[1]], "C": [[1]], "R": [[0]], "G": [[0]]})";

std::string identity_config(int n) {
  LineMatrices m{RealMatrix::Identity(n, n), RealMatrix::Identity(n, n), RealMatrix::Zero(n, n),
                 RealMatrix::Zero(n, n)};
  return emit_config(LineConstants::from(m));
}

// "name value unit" lines of the params report.
double report_value(const std::string& report, const std::string& name) {
  std::istringstream in(report);
  for (std::string line; std::getline(in, line);) {
    std::istringstream fields(line);
    std::string key, value;
    fields >> key >> value;
    if (key == name) return std::stod(value);
  }
  FAIL("missing " << name);
  return 0.0;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected telegraph::Error");
  return ErrorKind::IOError;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("emitted configs re-parse to bit-identical matrices") {
    Rng rng = make_rng(5, 0);
    for (int n = 1; n <= 4; ++n) {
      const auto line = random_line(n, rng);
      const auto again = parse_config(emit_config(line));
      CHECK(again.L() == line.L());
      CHECK(again.C() == line.C());
      CHECK(again.R() == line.R());
      CHECK(again.G() == line.G());
      CHECK(emit_config(again) == emit_config(line));
    }
  }

  TEST_CASE("awkward numbers survive the round trip") {
    for (const double x : {1.0 / 3.0, 1e-300, 4.9406564584124654e-324, -0.0, 123456789012345678.0,
                           0.1 + 0.2, -2.5e-12}) {
      CAPTURE(x);
      const double back = nlohmann::json::parse(round_trip(x)).get<double>();
      CHECK(std::memcmp(&back, &x, sizeof x) == 0);
    }
  }

  TEST_CASE("syntax errors carry line and column") {
    try {
      parse_config("{\n  \"n\": 1,\n  \"L\" [[1]]\n}", "line.json");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ParseError);
      CHECK(std::string(e.what()).find("line.json:3:") != std::string::npos);
    }
  }

  TEST_CASE("structural errors name the field") {
    const auto message = [](const std::string& text) {
      try {
        parse_config(text);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        return std::string(e.what());
      }
      FAIL("expected ParseError");
      return std::string();
    };
    CHECK(message(R"({"L": [[1]], "C": [[1]], "R": [[0]], "G": [[0]]})").find("field n") !=
          std::string::npos);
    CHECK(message(R"({"n": 0, "L": [[1]], "C": [[1]], "R": [[0]], "G": [[0]]})").find("field n") !=
          std::string::npos);
    CHECK(message(R"({"n": 1, "L": [[1]], "C": [[1]], "R": [[0]]})").find("field G") !=
          std::string::npos);
    CHECK(message(R"({"n": 2, "L": [[1, 0]], "C": [[1]], "R": [[0]], "G": [[0]]})")
              .find("field L: expected 2 rows") != std::string::npos);
    CHECK(message(R"({"n": 1, "L": [[1, 2]], "C": [[1]], "R": [[0]], "G": [[0]]})")
              .find("field L[0]") != std::string::npos);
    CHECK(message(R"({"n": 1, "L": [[1]], "C": [[true]], "R": [[0]], "G": [[0]]})")
              .find("field C[0][0]") != std::string::npos);
    CHECK(message(R"({"n": 1, "units": "mks", "L": [[1]], "C": [[1]], "R": [[0]], "G": [[0]]})")
              .find("field units") != std::string::npos);
    CHECK(message(R"({"n": 1, "Lx": [[1]], "L": [[1]], "C": [[1]], "R": [[0]], "G": [[0]]})")
              .find("field Lx: unknown") != std::string::npos);
    CHECK(message("[1, 2]").find("JSON object") != std::string::npos);
  }

  TEST_CASE("invalid constants are rejected by name") {
    try {
      parse_config(R"({"n": 2, "L": [[1, 0.5], [0, 1]], "C": [[1, 0], [0, 1]],
                       "R": [[0, 0], [0, 0]], "G": [[0, 0], [0, 0]]})");
      FAIL("expected ValidationFailure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ValidationFailure);
      CHECK(std::string(e.what()).find("L ") != std::string::npos);
    }
  }

  TEST_CASE("missing files are IO errors") {
    CHECK(kind_of([] { load_config(scratch("does_not_exist.json").string()); }) ==
          ErrorKind::IOError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(cli::exit_code(ErrorKind::ParseError) == 2);
    CHECK(cli::exit_code(ErrorKind::ValidationFailure) == 2);
    CHECK(cli::exit_code(ErrorKind::UnknownCheck) == 2);
    CHECK(cli::exit_code(ErrorKind::DomainError) == 3);
    CHECK(cli::exit_code(ErrorKind::ShortCircuit) == 3);
    CHECK(cli::exit_code(ErrorKind::Singular) == 1);
    CHECK(cli::exit_code(ErrorKind::IOError) == 1);
    CHECK(call({}).code == 2);
    CHECK(call({"--help"}).code == 0);
    CHECK(call({"params"}).code == 2);
  }

  TEST_CASE("params on the identity line") {
    const auto o = call({"params", write("identity.json", identity_config(2))});
    REQUIRE(o.code == 0);
    CHECK(report_value(o.out, "alpha") == 0.0);
    CHECK(report_value(o.out, "theta") == 0.0);
    CHECK(report_value(o.out, "b") == 1.0);
    CHECK(o.out.find("validation   passed") != std::string::npos);
  }

  TEST_CASE("params on a physical scalar line") {
    const auto path = write("scalar_physical.json",
                            R"({"n": 1, "L": [[0.5e-6]], "C": [[100e-12]], "R": [[0.01]],
                                "G": [[1e-9]]})");
    const auto o = call({"params", path});
    REQUIRE(o.code == 0);
    CHECK(report_value(o.out, "rho") == doctest::Approx(-2e4).epsilon(1e-12));
    CHECK(report_value(o.out, "gamma") == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(report_value(o.out, "alpha") == doctest::Approx(-10.0).epsilon(1e-12));
  }

  TEST_CASE("params --emit-config round trips through the tool") {
    Rng rng = make_rng(8, 3);
    const auto first = write("random3.json", emit_config(random_line(3, rng)));
    const auto second = scratch("random3_emitted.json").string();
    const auto third = scratch("random3_emitted_again.json").string();
    REQUIRE(call({"params", first, "--emit-config", second}).code == 0);
    REQUIRE(call({"params", second, "--emit-config", third}).code == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(second) == slurp(third));
    const auto a = load_config(first);
    const auto b = load_config(third);
    CHECK(a.L() == b.L());
    CHECK(a.G() == b.G());
  }

  TEST_CASE("params reports invalid constants with exit 2") {
    const auto path = write("asym.json", R"({"n": 2, "L": [[1, 0.5], [0, 1]], "C": [[1, 0], [0, 1]],
                                            "R": [[0, 0], [0, 0]], "G": [[0, 0], [0, 0]]})");
    const auto o = call({"params", path});
    CHECK(o.code == 2);
    CHECK(o.err.find("ValidationFailure") != std::string::npos);
  }

  TEST_CASE("eval") {
    const auto path = write("unit_scalar.json", kUnitScalar);
    SUBCASE("lossless scalar abcd at s = 1, d = 1") {
      const auto o = call({"eval", path, "--s-re", "1", "--d", "1", "--quantity", "abcd"});
      REQUIRE(o.code == 0);
      std::istringstream in(o.out);
      std::string line;
      for (int i = 0; i < 4; ++i) std::getline(in, line);
      std::string a, b, c, d;
      in >> a >> b >> c >> d;
      const auto real_part = [](const std::string& z) { return std::stod(z); };
      CHECK(real_part(a) == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
      CHECK(real_part(b) == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
      CHECK(real_part(c) == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
      CHECK(real_part(d) == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
      // 17 significant digits in the real part.
      const std::string re = a.substr(0, a.find_first_of("+-", 1));
      CHECK(std::count_if(re.begin(), re.end(), [](char ch) { return std::isdigit(ch); }) == 17);
    }
    SUBCASE("chain at d = 0 is the identity") {
      const auto o = call({"eval", write("id2.json", identity_config(2)), "--s-re", "0.3",
                           "--s-im", "5", "--d", "0", "--quantity", "chain"});
      REQUIRE(o.code == 0);
      CHECK(o.out.find("1+0j 0+0j 0+0j 0+0j\n0+0j 1+0j 0+0j 0+0j\n") != std::string::npos);
    }
    SUBCASE("admittance at d = 0 is a short circuit") {
      const auto o = call({"eval", path, "--s-re", "1", "--d", "0", "--quantity", "admittance"});
      CHECK(o.code == 3);
      CHECK(o.err.find("ShortCircuit") != std::string::npos);
      CHECK(o.err.find("short-circuit") != std::string::npos);
    }
    SUBCASE("domain and unknown quantities") {
      CHECK(call({"eval", path, "--s-re", "-1", "--d", "1", "--quantity", "impedance"}).code == 3);
      CHECK(call({"eval", path, "--d", "1", "--quantity", "bounds"}).code == 2);
      CHECK(call({"eval", path, "--d", "1", "--quantity", "volts"}).code == 2);
    }
  }

  TEST_CASE("sweep of the lossless scalar line") {
    const auto path = write("unit_scalar_sweep.json", kUnitScalar);
    const auto out = scratch("lossless.csv").string();
    const auto o = call({"sweep", path, "--f-start", "0.001", "--f-stop", "1000", "--points", "61",
                         "--spacing", "log", "--sigma", "0", "--d", "2", "--quantities",
                         "chain,bounds", "--out", out});
    REQUIRE(o.code == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 62);
    CHECK(rows[0] == std::vector<std::string>{"f", "chain_norm", "envelope"});
    double previous = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == 3);
      const double f = std::stod(rows[i][0]);
      const double norm = std::stod(rows[i][1]);
      CHECK(f > previous);
      previous = f;
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      // The envelope is exact here, so only round-off separates the two.
      CHECK(std::stod(rows[i][2]) >= norm * (1.0 - 1e-12));
    }
    CHECK(std::stod(rows[1][0]) == 0.001);
    CHECK(std::stod(rows.back()[0]) == 1000.0);
  }

  TEST_CASE("sweep columns, ordering and threads") {
    const auto path = write("random2.json", [] {
      Rng rng = make_rng(12, 2);
      return emit_config(random_line(2, rng));
    }());
    const auto serial = scratch("serial.csv").string();
    const auto parallel = scratch("parallel.csv").string();
    const std::vector<std::string> common{"sweep",   path,   "--f-start", "0",
                                          "--f-stop", "50",  "--points",  "40",
                                          "--sigma",  "1.5", "--d",       "0.7",
                                          "--quantities", "abcd,admittance,impedance,bounds",
                                          "--full-matrices"};
    auto a = common;
    a.insert(a.end(), {"--out", serial, "--threads", "1"});
    auto b = common;
    b.insert(b.end(), {"--out", parallel, "--threads", "4"});
    REQUIRE(call(a).code == 0);
    REQUIRE(call(b).code == 0);
    CHECK(slurp(serial) == slurp(parallel));

    const auto rows = read_csv(serial);
    REQUIRE(rows.size() == 41);
    // f, then per quantity a norm and 16 complex entries, then the envelope.
    const std::size_t columns = 1 + 3 * (1 + 2 * 16) + 1;
    CHECK(rows[0].size() == columns);
    CHECK(rows[0][1] == "abcd_norm");
    CHECK(rows[0][2] == "abcd_1_1_re");
    CHECK(rows[0][3] == "abcd_1_1_im");
    CHECK(rows[0].back() == "envelope");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].size() == columns);
      CHECK(std::stod(rows[i].back()) >= std::stod(rows[i][1]));
    }
  }

  TEST_CASE("sweep errors come before any output") {
    const auto path = write("unit_scalar_errors.json", kUnitScalar);
    const auto out = scratch("never_written.csv");
    fs::remove(out);
    const auto base = [&](std::vector<std::string> extra) {
      std::vector<std::string> args{"sweep", path, "--points", "5", "--out", out.string()};
      args.insert(args.end(), extra.begin(), extra.end());
      return call(args);
    };
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--spacing", "log", "--d", "1",
                "--quantities", "chain"})
              .code == 2);
    CHECK(base({"--f-start", "2", "--f-stop", "1", "--d", "1", "--quantities", "chain"}).code == 2);
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--d", "1", "--quantities", "lead"}).code == 2);
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--d", "1", "--sigma", "0", "--quantities",
                "admittance"})
              .code == 3);
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--d", "0", "--sigma", "1", "--quantities",
                "impedance"})
              .code == 3);
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--d", "-1", "--quantities", "chain"}).code ==
          3);
    CHECK(base({"--f-start", "0", "--f-stop", "1", "--d", "1", "--spacing", "cubic",
                "--quantities", "chain"})
              .code == 2);
    CHECK_FALSE(fs::exists(out));
  }

  TEST_CASE("sweep grid helpers") {
    cli::SweepSpec spec;
    spec.f_start = 1.0;
    spec.f_stop = 1e6;
    spec.points = 7;
    spec.spacing = cli::Spacing::Log;
    const auto f = cli::sweep_frequencies(spec);
    REQUIRE(f.size() == 7);
    for (int i = 0; i < 7; ++i) CHECK(f[i] == doctest::Approx(std::pow(10.0, i)).epsilon(1e-14));
    CHECK(f.front() == 1.0);
    CHECK(f.back() == 1e6);
  }

  TEST_CASE("verify") {
    const auto identity = write("identity_verify.json", identity_config(2));
    SUBCASE("default suite on the identity line exits 0") {
      const auto report = scratch("identity_report.json").string();
      const auto o = call({"verify", identity, "--out", report, "--seed", "3"});
      CHECK(o.code == 0);
      const auto doc = nlohmann::json::parse(slurp(report));
      CHECK(doc["seed"] == 3);
      CHECK(doc["summary"]["failed"] == 0);
      CHECK(doc["summary"]["passed"].get<int>() >= 12);
    }
    SUBCASE("seed-pinned random n = 3 constants") {
      Rng rng = make_rng(2024, 3);
      const auto path = write("random_verify3.json", emit_config(random_line(3, rng)));
      const auto report = scratch("random3_report.json").string();
      const auto o = call({"verify", path, "--out", report, "--seed", "9"});
      CHECK(o.code == 0);
      CHECK(nlohmann::json::parse(slurp(report))["checks"].size() >= 12);
    }
    SUBCASE("unknown check ids in a suite file") {
      const auto suite = write("bad_suite.json", R"([{"check_id": "NotACheck"}])");
      const auto o = call({"verify", identity, "--suite", suite, "--out",
                           scratch("unused.json").string()});
      CHECK(o.code == 2);
      CHECK(o.err.find("UnknownCheck") != std::string::npos);
    }
    SUBCASE("a failing suite exits 4") {
      const auto suite =
          write("strict_suite.json", R"([{"check_id": "BlockwiseDirect", "tolerance": 0}])");
      const auto report = scratch("strict_report.json").string();
      Rng rng = make_rng(4, 2);
      const auto path = write("random_strict.json", emit_config(random_line(2, rng)));
      const auto o = call({"verify", path, "--suite", suite, "--out", report});
      CHECK(o.code == 4);
      CHECK(nlohmann::json::parse(slurp(report))["checks"][0]["status"] == "fail");
    }
    SUBCASE("TELEGRAPH_SEED overrides the default seed") {
      const auto suite = write("small_suite.json", R"([{"check_id": "InverseIdentity", "samples": 5}])");
      const auto report = scratch("seeded_report.json").string();
      ::setenv("TELEGRAPH_SEED", "77", 1);
      const auto o = call({"verify", identity, "--suite", suite, "--out", report});
      ::unsetenv("TELEGRAPH_SEED");
      CHECK(o.code == 0);
      const auto doc = nlohmann::json::parse(slurp(report));
      CHECK(doc["seed"] == 77);
      CHECK(doc["checks"][0]["seed"] == 77);

      ::setenv("TELEGRAPH_SEED", "seven", 1);
      CHECK(call({"verify", identity, "--suite", suite, "--out", report}).code == 2);
      ::unsetenv("TELEGRAPH_SEED");
    }
    SUBCASE("repeated runs write identical reports") {
      const auto a = scratch("repeat_a.json").string();
      const auto b = scratch("repeat_b.json").string();
      REQUIRE(call({"verify", identity, "--out", a, "--threads", "1"}).code == 0);
      REQUIRE(call({"verify", identity, "--out", b, "--threads", "3"}).code == 0);
      CHECK(slurp(a) == slurp(b));
    }
  }
}
