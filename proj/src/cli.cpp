#include "lrnls/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace lrnls::cli {
namespace {

// Option values as typed, before conversion to the library types.
struct RawOptions {
  std::string initial = "sobolev";
  double alpha = 1.0;
  std::optional<double> amplitude;
  int mode = 1;
  std::optional<int> tail_cutoff;
  std::string init_mode = "truncated";
  int lambda = -1;
  std::string T = "1";
  std::string tau;
  int N = 0;
  std::string scheme = "lowreg";
  std::string out;
  std::string snapshots;
  std::string tau_list;
  std::string N_list;
  std::string comparison = "self";
  int refinement = 2;
  std::string refine = "both";
  std::string norm = "plancherel";
  int jobs = 0;
  std::string format = "csv";
  std::string input;
  bool table = false;
  std::string config;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) items.push_back(trim(item));
  if (items.empty() || std::any_of(items.begin(), items.end(), [](const auto& s) { return s.empty(); })) {
    throw std::invalid_argument("malformed list '" + text + "'");
  }
  return items;
}

// Listed for --help only; the file is expanded before parsing.
void add_config(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--config", raw.config, "Read key=value options from FILE; flags given on the command line win")
      ->type_name("FILE");
}

bool given(const std::vector<std::string>& args, std::size_t from, const std::string& flag) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Replaces `--config FILE` after the subcommand with `--key=value` for every
// line of FILE whose flag is not already present.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::size_t command = 1;
  while (command < args.size() && args[command].rfind("-", 0) == 0) ++command;
  if (command >= args.size()) return args;
  std::string path;
  bool found = false;
  for (std::size_t i = command + 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config requires a file");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      found = true;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      found = true;
      break;
    }
  }
  if (!found) return args;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::string> injected;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string flag = "--" + trim(line.substr(0, eq));
    if (flag == "--config") throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": nested config");
    if (!given(args, command + 1, flag)) injected.push_back(flag + "=" + trim(line.substr(eq + 1)));
  }
  args.insert(args.begin() + static_cast<long>(command) + 1, injected.begin(), injected.end());
  return args;
}

void add_initial_options(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--initial", raw.initial, "Initial state")
      ->check(CLI::IsMember({"sobolev", "plane", "constant"}))
      ->capture_default_str();
  sub->add_option("--alpha", raw.alpha, "Sobolev index of the power-law series")->capture_default_str();
  sub->add_option(
      "--amplitude", raw.amplitude, "Amplitude (default 0.1 for sobolev, 1 for plane and constant)");
  sub->add_option("--mode", raw.mode, "Wavenumber of the plane wave")->capture_default_str();
  sub->add_option("--tail-cutoff", raw.tail_cutoff, "Largest |k| of the series when sampling (default max(16N, 2^14))")
          ->check(CLI::PositiveNumber);
  sub->add_option("--init-mode", raw.init_mode, "Initialization: sampled (interpolate) or truncated (Pi_N u0)")
      ->check(CLI::IsMember({"sampled", "truncated"}))
      ->capture_default_str();
}

void add_equation_options(CLI::App* sub, RawOptions& raw) {
  sub->add_option("--lambda", raw.lambda, "-1 focusing, +1 defocusing")
      ->check(CLI::IsMember({-1, 1}))
      ->capture_default_str();
  sub->add_option("--T", raw.T, "Final time; 2^-k accepted")->type_name("NUMBER")->capture_default_str();
  sub->add_option("--scheme", raw.scheme, "Time stepper")
      ->check(CLI::IsMember({"lowreg", "lie", "strang"}))
      ->capture_default_str();
}

void add_study_options(CLI::App* sub, RawOptions& raw) {
  add_initial_options(sub, raw);
  add_equation_options(sub, raw);
  sub->add_option("--tau-list", raw.tau_list, "Step sizes, comma separated; 2^-k accepted")
      ->type_name("LIST")->required();
  sub->add_option("--N-list", raw.N_list, "Cutoffs, comma separated")->type_name("LIST")->required();
  sub->add_option("--comparison", raw.comparison, "self (halved tau or doubled N) or reference (refined run)")
      ->check(CLI::IsMember({"self", "reference"}))
      ->capture_default_str();
  sub->add_option("--refinement", raw.refinement, "Reference refinement factor, a power of two")
      ->capture_default_str();
  sub->add_option("--refine", raw.refine, "Reference axes to refine")
      ->check(CLI::IsMember({"time", "space", "both"}))
      ->capture_default_str();
  sub->add_option("--norm", raw.norm, "plancherel (with 2 pi) or normalized (coefficient l2)")
      ->check(CLI::IsMember({"plancherel", "normalized"}))
      ->capture_default_str();
  sub->add_option("--jobs", raw.jobs, "Worker threads, 0 for all cores")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--out", raw.out, "Write temporal.csv or spatial.csv plus a .meta sidecar to DIR and print the table")
      ->type_name("DIR");
  sub->add_option("--format", raw.format, "Report format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  sub->add_flag("--table", raw.table, "Print the formatted table instead of CSV");
  add_config(sub, raw);
}

InitialDataSpec initial_from(const RawOptions& raw) {
  const auto kind = parse_initial_kind(raw.initial);
  InitialDataSpec spec;
  switch (kind) {
    case InitialKind::plane_wave:
      spec = InitialDataSpec::plane(raw.mode, raw.amplitude.value_or(1.0));
      break;
    case InitialKind::constant:
      spec = InitialDataSpec::constant(raw.amplitude.value_or(1.0));
      break;
    default:
      spec = InitialDataSpec::sobolev(raw.alpha);
      if (raw.amplitude) spec.amplitude = *raw.amplitude;
      break;
  }
  if (raw.tail_cutoff) spec.tail_cutoff = raw.tail_cutoff;
  spec.validate();
  return spec;
}

double parse_option_number(const std::string& flag, const std::string& text) {
  try {
    return parse_number(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(flag + ": " + e.what());
  }
}

RunConfig solve_config(const RawOptions& raw) {
  RunConfig config;
  config.command = "solve";
  config.initial = initial_from(raw);
  config.init_mode = parse_init_mode(raw.init_mode);
  config.scheme = parse_reference_scheme(raw.scheme);
  config.params = SchemeParams::from_step_size(raw.lambda, parse_option_number("--T", raw.T),
                                               parse_option_number("--tau", raw.tau), raw.N);
  config.params.validate();
  if (!raw.snapshots.empty()) config.snapshot_times = parse_number_list(raw.snapshots);
  output_steps_from_times(config.params, config.snapshot_times);
  if (!raw.out.empty()) config.out = raw.out;
  return config;
}

RunConfig study_config(const RawOptions& raw, StudyAxis axis) {
  RunConfig config;
  config.command = axis == StudyAxis::temporal ? "study-temporal" : "study-spatial";
  auto& s = config.study;
  s.axis = axis;
  s.initial = initial_from(raw);
  s.lambda = raw.lambda;
  s.T = parse_option_number("--T", raw.T);
  try {
    s.tau_list = parse_number_list(raw.tau_list);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("--tau-list: ") + e.what());
  }
  try {
    s.N_list = parse_int_list(raw.N_list);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("--N-list: ") + e.what());
  }
  if (raw.comparison == "reference") s.comparison = Comparison::vs_reference;
  s.scheme = parse_reference_scheme(raw.scheme);
  s.init_mode = parse_init_mode(raw.init_mode);
  s.norm = parse_norm_convention(raw.norm);
  s.jobs = raw.jobs;
  s.reference.scheme = s.scheme;
  s.reference.refinement = raw.refinement;
  s.reference.refine_time = raw.refine != "space";
  s.reference.refine_space = raw.refine != "time";
  s.reference.init_mode = s.init_mode;
  s.validate();
  if (s.comparison) s.reference.validate();
  if (!raw.out.empty()) config.out = raw.out;
  config.table = raw.table;
  return config;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  return file;
}

void finish_output(std::ofstream& file, const std::filesystem::path& path) {
  file.close();
  if (!file) throw std::runtime_error("cannot write " + path.string());
}

int run_solve(const RunConfig& config, std::ostream& out) {
  std::vector<double> times = config.snapshot_times;
  times.push_back(0.0);
  times.push_back(config.params.T);
  const auto steps = output_steps_from_times(config.params, times);
  const auto u0 = initialize(config.initial, config.params.N, config.init_mode);
  const auto traj = evolve_scheme(config.scheme, config.params, u0, steps);
  if (!config.out) {
    write_field(out, traj.final_field());
    return 0;
  }
  write_trajectory(*config.out, traj);
  const auto& last = traj.snapshots.back();
  out << "steps=" << config.params.L << " T=" << format_double(last.time)
      << " l2=" << format_double(last.diagnostics.l2) << " h1=" << format_double(last.diagnostics.h1)
      << " max_h1=" << format_double(traj.max_h1) << " mass_drift=" << format_double(last.diagnostics.mass_drift)
      << " wall_ms=" << format_double(traj.wall_ms) << "\n";
  return 0;
}

int run_study_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto report = run_study(config.study);
  if (config.out) {
    std::filesystem::create_directories(*config.out);
    const std::string stem = to_string(config.study.axis);
    const auto csv_path = *config.out / (stem + ".csv");
    const auto meta_path = *config.out / (stem + ".meta");
    auto csv = open_output(csv_path);
    write_csv(csv, report);
    finish_output(csv, csv_path);
    auto meta = open_output(meta_path);
    write_metadata(meta, report);
    finish_output(meta, meta_path);
    out << format_table(report);
  } else if (config.table) {
    out << format_table(report);
  } else {
    write_csv(out, report);
  }
  if (!report.all_valid()) {
    int invalid = 0;
    std::string first;
    for (const auto& row : report.cells) {
      for (const auto& c : row) {
        if (c.valid) continue;
        if (invalid++ == 0) first = c.failure;
      }
    }
    err << "error: " << invalid << " invalid cell(s); first: " << first << "\n";
    return 1;
  }
  return 0;
}

int run_diagnostics(const RawOptions& raw, std::ostream& out) {
  const auto rows = diagnostics_series(read_trajectory(raw.input));
  if (raw.out.empty()) {
    write_diagnostics_csv(out, rows);
    return 0;
  }
  const std::filesystem::path dir(raw.out);
  std::filesystem::create_directories(dir);
  const auto path = dir / "diagnostics.csv";
  auto file = open_output(path);
  write_diagnostics_csv(file, rows);
  finish_output(file, path);
  return 0;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return trim(text);
}

// Self-test helpers.

Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng);
  return {re, u(rng)};
}

SpectralField random_field(std::mt19937_64& rng, int cutoff) {
  SpectralField f(cutoff);
  for (int k = -cutoff; k <= cutoff; ++k) f.at(k) = random_complex(rng) / (1.0 + std::abs(k));
  return f;
}

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double relative(std::span<const Complex> a, std::span<const Complex> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
  const double scale = norm2(b);
  return scale > 0.0 ? std::sqrt(d) / scale : std::sqrt(d);
}

double check_dft(std::mt19937_64& rng) {
  double worst = 0.0;
  for (std::size_t m : {1, 2, 3, 5, 7, 17, 64, 101, 255, 1025}) {
    const DftPlan plan(m);
    std::vector<Complex> samples(m), coeffs(m), back(m), direct(m);
    for (auto& s : samples) s = random_complex(rng);
    plan.forward(samples, coeffs);
    plan.inverse(coeffs, back);
    const long first = -static_cast<long>(m / 2);
    for (std::size_t i = 0; i < m; ++i) {
      const double k = static_cast<double>(first + static_cast<long>(i));
      Complex sum{};
      for (std::size_t j = 0; j < m; ++j) {
        const double x = 2.0 * std::numbers::pi * static_cast<double>(first + static_cast<long>(j)) / double(m);
        sum += std::polar(1.0, -k * x) * samples[j];
      }
      direct[i] = sum / double(m);
    }
    worst = std::max({worst, relative(coeffs, direct), relative(back, samples)});
  }
  return worst;
}

double check_dealiasing(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int n : {1, 2, 4, 8, 16}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_field(rng, n);
      const auto g = random_field(rng, n);
      SpectralField direct(n);
      for (int k = -n; k <= n; ++k) {
        for (int j = std::max(-n, k - n); j <= std::min(n, k + n); ++j) direct.at(k) += f.coeff(j) * g.coeff(k - j);
      }
      worst = std::max(worst, relative(dealiased_product(f, g).coeffs(), direct.coeffs()));
    }
  }
  return worst;
}

double check_constant() {
  double worst = 0.0;
  const Complex c(0.8, -0.3);
  for (int lambda : {-1, 1}) {
    const auto p = SchemeParams::from_steps(lambda, 0.5, 4, 6);
    const auto u = constant_field(6, c);
    const auto out = step(u, p, conserved_quantities(u));
    const Complex expected = c * (1.0 - Complex(0.0, 1.0) * double(lambda) * p.tau * std::norm(c));
    worst = std::max(worst, relative(out.coeffs(), constant_field(6, expected).coeffs()));
  }
  return worst;
}

double check_twisted(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_field(rng, 8);
    const auto cq = conserved_quantities(u);
    const auto p = SchemeParams::from_steps(trial % 2 ? 1 : -1, 0.5, 5, 8);
    const auto target = step(u, p, cq);
    for (int n = 0; n <= 4; ++n) {
      const auto v = free_propagator(u, -p.time(n));
      const auto back = free_propagator(step_twisted(v, n, p, cq), p.time(n + 1));
      worst = std::max(worst, relative(back.coeffs(), target.coeffs()));
    }
  }
  return worst;
}

double check_conserved(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_field(rng, 12);
    const auto a = conserved_quantities(u);
    const auto b = conserved_quantities_via_products(u);
    worst = std::max({worst, std::abs(a.mass() - b.mass()) / a.mass(), std::abs(a.momentum() - b.momentum()) / a.mass()});
  }
  return worst;
}

double check_round_trip(std::mt19937_64& rng) {
  const auto f = random_field(rng, 9);
  std::stringstream text;
  write_field(text, f);
  return read_field(text) == f ? 0.0 : 1.0;
}

}  // namespace

double parse_number(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) throw std::invalid_argument("empty number");
  if (text.rfind("2^", 0) == 0) {
    const std::string exponent = text.substr(2);
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(exponent, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != exponent.size()) throw std::invalid_argument("malformed power of two '" + text + "'");
    return std::ldexp(1.0, e);
  }
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw std::invalid_argument("malformed number '" + text + "'");
  return value;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) values.push_back(parse_number(item));
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument("malformed integer '" + item + "'");
    values.push_back(v);
  }
  return values;
}

bool selftest(std::ostream& out) {
  std::mt19937_64 rng(20240611);
  struct Check {
    const char* name;
    double value;
    double tolerance;
  };
  const Check checks[] = {
      {"dft inversion and direct sums", check_dft(rng), 1e-11},
      {"dealiased product vs direct convolution", check_dealiasing(rng), 1e-12},
      {"constant state step", check_constant(), 1e-13},
      {"twisted form equivalence", check_twisted(rng), 1e-10},
      {"conserved quantities two ways", check_conserved(rng), 1e-12},
      {"field text round trip", check_round_trip(rng), 0.0},
  };
  int failed = 0;
  for (const auto& c : checks) {
    const bool ok = c.value <= c.tolerance;
    if (!ok) ++failed;
    out << (ok ? "PASS " : "FAIL ") << c.name << " (" << c.value << " <= " << c.tolerance << ")\n";
  }
  out << "selftest: " << (std::size(checks) - failed) << "/" << std::size(checks) << " passed\n";
  return failed == 0;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Low-regularity integrator for the periodic cubic NLS", "lrnls");
  app.require_subcommand(1);
  RawOptions raw;

  auto* solve = app.add_subcommand("solve", "Run one trajectory and dump fields plus a manifest");
  add_initial_options(solve, raw);
  add_equation_options(solve, raw);
  solve->add_option("--tau", raw.tau, "Step size; must divide T; 2^-k accepted")->type_name("NUMBER")->required();
  solve->add_option("--N", raw.N, "Spectral cutoff")->required()->check(CLI::PositiveNumber);
  solve->add_option("--snapshots", raw.snapshots, "Extra snapshot times, comma separated")->type_name("LIST");
  solve->add_option("--out", raw.out, "Trajectory dump directory; without it the final field is printed")
      ->type_name("DIR");
  add_config(solve, raw);

  auto* temporal = app.add_subcommand("study-temporal", "Temporal convergence study (rows tau, columns N)");
  add_study_options(temporal, raw);
  auto* spatial = app.add_subcommand("study-spatial", "Spatial convergence study (rows N, columns tau)");
  add_study_options(spatial, raw);

  auto* diagnostics = app.add_subcommand("diagnostics", "Diagnostics table of a trajectory dump");
  diagnostics->add_option("--in", raw.input, "Trajectory dump directory")->type_name("DIR")->required();
  diagnostics->add_option("--out", raw.out, "Write diagnostics.csv to DIR instead of stdout")->type_name("DIR");
  diagnostics->add_option("--format", raw.format, "Output format")
      ->check(CLI::IsMember({"csv"}))
      ->capture_default_str();
  add_config(diagnostics, raw);

  auto* self = app.add_subcommand("selftest", "Run the quick invariant suite");
  app.footer("Run 'lrnls <command> --help' for the options of a command.");

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    if (!args.empty()) args.pop_back();
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  }

  RunConfig config;
  try {
    if (solve->parsed()) config = solve_config(raw);
    if (temporal->parsed()) config = study_config(raw, StudyAxis::temporal);
    if (spatial->parsed()) config = study_config(raw, StudyAxis::spatial);
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(config, out);
    if (temporal->parsed() || spatial->parsed()) return run_study_command(config, out, err);
    if (diagnostics->parsed()) return run_diagnostics(raw, out);
    if (self->parsed()) {
      if (selftest(out)) return 0;
      err << "error: selftest failed\n";
      return 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lrnls::cli
