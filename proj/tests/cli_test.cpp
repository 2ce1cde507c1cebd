#include "lrnls/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lrnls::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "lrnls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.status = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

// A fresh directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lrnls_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_usage_error(const Result& r) {
  EXPECT_EQ(r.status, 2);
  EXPECT_TRUE(r.out.empty());
  ASSERT_EQ(lines(r.err).size(), 1u) << r.err;
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
}

TEST(ParseNumber, PowersOfTwoAndDecimals) {
  EXPECT_EQ(parse_number("2^-6"), 1.0 / 64);
  EXPECT_EQ(parse_number("2^3"), 8.0);
  EXPECT_EQ(parse_number(" 0.25 "), 0.25);
  EXPECT_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_THROW(parse_number("2^x"), std::invalid_argument);
  EXPECT_THROW(parse_number("2^-6.5"), std::invalid_argument);
  EXPECT_THROW(parse_number("1.5q"), std::invalid_argument);
  EXPECT_THROW(parse_number(""), std::invalid_argument);
  EXPECT_EQ(parse_number_list("2^-6,2^-7, 2^-8"), (std::vector<double>{1.0 / 64, 1.0 / 128, 1.0 / 256}));
  EXPECT_EQ(parse_int_list("256,512,1024"), (std::vector<int>{256, 512, 1024}));
  EXPECT_THROW(parse_int_list("16,,32"), std::invalid_argument);
  EXPECT_THROW(parse_int_list("16,3.5"), std::invalid_argument);
}

TEST(Help, MatchesGoldenFiles) {
  const fs::path golden(LRNLS_GOLDEN_DIR);
  const auto top = run({"--help"});
  EXPECT_EQ(top.status, 0);
  EXPECT_EQ(top.out, slurp(golden / "help.txt"));
  for (const std::string command : {"solve", "study-temporal", "study-spatial", "diagnostics", "selftest"}) {
    const auto r = run({command, "--help"});
    EXPECT_EQ(r.status, 0) << command;
    EXPECT_EQ(r.out, slurp(golden / ("help_" + command + ".txt"))) << command;
  }
}

TEST(Help, DocumentsEveryFlag) {
  const std::vector<std::string> common{"--alpha", "--lambda",      "--T",         "--initial", "--tail-cutoff",
                                        "--init-mode", "--scheme", "--amplitude", "--mode",    "--config"};
  const auto solve = run({"solve", "--help"}).out;
  for (const auto& flag : common) EXPECT_NE(solve.find(flag + " "), std::string::npos) << flag;
  for (const std::string flag : {"--tau", "--N", "--out", "--snapshots"}) {
    EXPECT_NE(solve.find(flag + " "), std::string::npos) << flag;
  }
  const auto study = run({"study-temporal", "--help"}).out;
  for (const auto& flag : common) EXPECT_NE(study.find(flag + " "), std::string::npos) << flag;
  for (const std::string flag : {"--tau-list", "--N-list", "--out", "--format", "--norm", "--jobs", "--comparison"}) {
    EXPECT_NE(study.find(flag + " "), std::string::npos) << flag;
  }
}

TEST(Solve, ConstantStateExample) {
  for (int lambda : {-1, 1}) {
    const auto r = run({"solve", "--initial", "constant", "--amplitude", "1", "--tau", "0.001", "--N", "4", "--T", "1",
                        "--lambda", lambda > 0 ? "+1" : "-1"});
    ASSERT_EQ(r.status, 0) << r.err;
    std::istringstream in(r.out);
    const auto field = read_field(in);
    ASSERT_EQ(field.cutoff(), 4);
    const Complex expected = std::polar(1.0, -double(lambda));
    // First order in tau: the error is a small multiple of tau.
    EXPECT_LT(std::abs(field.coeff(0) - expected), 2e-3);
    for (int k = 1; k <= 4; ++k) EXPECT_LT(std::abs(field.coeff(k)) + std::abs(field.coeff(-k)), 1e-13);
  }
}

TEST(Solve, DumpAndDiagnostics) {
  const auto dir = scratch("dump");
  const auto r = run({"solve", "--alpha", "1", "--N", "32", "--tau", "2^-4", "--snapshots", "0.25,0.5",
                      "--out", (dir / "traj").string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out.rfind("steps=16 T=1 ", 0), 0u) << r.out;
  const auto traj = read_trajectory(dir / "traj");
  ASSERT_EQ(traj.snapshots.size(), 4u);
  EXPECT_EQ(traj.snapshots[1].step, 4);
  EXPECT_EQ(traj.params.N, 32);

  const auto d = run({"diagnostics", "--in", (dir / "traj").string()});
  ASSERT_EQ(d.status, 0) << d.err;
  const auto rows = lines(d.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "step,t,l2,h1,mass_drift,momentum_drift");
  EXPECT_EQ(rows[2].rfind("4,0.25,", 0), 0u);

  const auto to_file = run({"diagnostics", "--in", (dir / "traj").string(), "--out", (dir / "diag").string()});
  ASSERT_EQ(to_file.status, 0) << to_file.err;
  EXPECT_TRUE(to_file.out.empty());
  EXPECT_EQ(slurp(dir / "diag" / "diagnostics.csv"), d.out);

  const auto missing = run({"diagnostics", "--in", (dir / "nothing").string()});
  EXPECT_EQ(missing.status, 1);
  EXPECT_EQ(missing.err.rfind("error: ", 0), 0u);
}

TEST(Solve, SchemesSelectable) {
  for (const std::string scheme : {"lowreg", "lie", "strang"}) {
    const auto dir = scratch("scheme_" + scheme);
    const auto r = run({"solve", "--N", "8", "--tau", "2^-3", "--scheme", scheme, "--out", dir.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(read_trajectory(dir).scheme, scheme);
  }
}

TEST(Errors, SingleLineWithNonzeroExit) {
  expect_usage_error(run({}));
  expect_usage_error(run({"solve", "--N", "4"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.3"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--lambda", "2"}));
  expect_usage_error(run({"solve", "--N", "0", "--tau", "0.25"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "2^y"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--initial", "gauss"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--bogus"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--snapshots", "0.3"}));
  expect_usage_error(run({"study-temporal", "--N-list", "8", "--tau-list", "2^-3,2^-4"}));
  expect_usage_error(run({"study-temporal", "--N-list", "8", "--tau-list", "2^-3,2^-4,2^-6"}));
  expect_usage_error(run({"study-spatial", "--N-list", "8,16,24", "--tau-list", "2^-3"}));
  expect_usage_error(run({"study-spatial", "--N-list", "8,16,32", "--tau-list", "2^-3", "--format", "json"}));
  expect_usage_error(
      run({"study-temporal", "--N-list", "8", "--tau-list", "2^-3,2^-4,2^-5", "--comparison", "reference",
           "--refinement", "3"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--config"}));
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--config", "/nonexistent/run.cfg"}));
}

TEST(Studies, TemporalExampleLayout) {
  const auto r = run({"study-temporal", "--alpha", "2", "--lambda", "-1", "--T", "1", "--N-list", "256,512,1024",
                      "--tau-list", "2^-6,2^-7,2^-8"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "study,alpha,lambda,T,row_param,col_param,error,rate,wall_ms");
  const auto first = fields(rows[1]);
  EXPECT_EQ(first[0], "temporal");
  EXPECT_EQ(first[4], "0.015625");
  EXPECT_EQ(first[5], "256");
  // Default Plancherel norm: the coefficient-l2 value 7.662e-06 times sqrt(2 pi).
  EXPECT_NEAR(std::stod(first[6]), 7.662e-06 * std::sqrt(2 * std::numbers::pi), 0.05 * 1.92e-05);
  const auto rate = fields(rows[4]);
  EXPECT_EQ(rate[4], "rate");
  EXPECT_NEAR(std::stod(rate[7]), 1.0, 0.02);
  EXPECT_EQ(fields(rows[5])[5], "512");
  EXPECT_EQ(fields(rows[9])[5], "1024");
}

TEST(Studies, OutputDirectoryAndTable) {
  const auto dir = scratch("study");
  const auto r = run({"study-spatial", "--alpha", "2", "--N-list", "8,16,32", "--tau-list", "2^-4,2^-5", "--norm",
                      "normalized", "--jobs", "2", "--out", dir.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("rate"), std::string::npos);
  EXPECT_NE(r.out.find("E-0"), std::string::npos);
  EXPECT_EQ(lines(slurp(dir / "spatial.csv")).size(), 1u + 2 * 4);
  const auto meta = slurp(dir / "spatial.meta");
  EXPECT_NE(meta.find("norm=normalized"), std::string::npos);
  EXPECT_NE(meta.find("comparison=self_doubling"), std::string::npos);
  EXPECT_NE(meta.find("jobs=2"), std::string::npos);

  const auto table = run({"study-spatial", "--alpha", "2", "--N-list", "8,16,32", "--tau-list", "2^-4,2^-5", "--norm",
                          "normalized", "--table"});
  ASSERT_EQ(table.status, 0);
  EXPECT_EQ(table.out, r.out);
}

TEST(Studies, BlowUpWritesReportAndFails) {
  const auto r = run({"study-temporal", "--initial", "plane", "--amplitude", "1e150", "--N-list", "4", "--tau-list",
                      "2^-3,2^-4,2^-5"});
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(lines(r.out).size(), 5u);
  EXPECT_NE(r.out.find(",nan,"), std::string::npos);
  ASSERT_EQ(lines(r.err).size(), 1u);
  EXPECT_NE(r.err.find("error: 3 invalid cell(s)"), std::string::npos);
  EXPECT_NE(r.err.find("blow-up"), std::string::npos);
}

TEST(Config, FileValuesAndOverrides) {
  const auto dir = scratch("config");
  const auto path = dir / "run.cfg";
  {
    std::ofstream cfg(path);
    cfg << "# constant state\ninitial = constant\namplitude=1\ntau=2^-3\nN=4\nlambda=+1\n\n";
  }
  auto phase = [](const Result& r) {
    std::istringstream in(r.out);
    return std::arg(read_field(in).coeff(0));
  };
  const auto from_file = run({"solve", "--config", path.string()});
  ASSERT_EQ(from_file.status, 0) << from_file.err;
  EXPECT_LT(phase(from_file), 0.0);
  const auto overridden = run({"solve", "--config", path.string(), "--lambda", "-1"});
  ASSERT_EQ(overridden.status, 0) << overridden.err;
  EXPECT_GT(phase(overridden), 0.0);
  const auto equals_form = run({"solve", "--lambda=-1", "--config=" + path.string()});
  EXPECT_EQ(equals_form.out, overridden.out);

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "bogus=3\n";
  }
  expect_usage_error(run({"solve", "--N", "4", "--tau", "0.25", "--config", (dir / "bad.cfg").string()}));
  {
    std::ofstream cfg(dir / "junk.cfg");
    cfg << "N 4\n";
  }
  expect_usage_error(run({"solve", "--tau", "0.25", "--config", (dir / "junk.cfg").string()}));
}

TEST(Selftest, Passes) {
  const auto r = run({"selftest"});
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("selftest: 6/6 passed"), std::string::npos);
}

}  // namespace
}  // namespace lrnls::cli
