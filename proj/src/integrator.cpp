#include "lrnls/integrator.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lrnls {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

SchemeParams SchemeParams::from_steps(int lambda, double T, int L, int N) {
  SchemeParams p;
  p.lambda = lambda;
  p.T = T;
  p.L = L;
  p.N = N;
  p.tau = L > 0 ? T / L : 0.0;
  p.validate();
  return p;
}

SchemeParams SchemeParams::from_step_size(int lambda, double T, double tau, int N) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("time step must be positive");
  const double steps = T / tau;
  const auto L = static_cast<long long>(std::llround(steps));
  if (L < 1 || std::abs(static_cast<double>(L) * tau - T) > 1e-12 * T) {
    throw std::invalid_argument("time step " + format_double(tau) + " does not divide T = " + format_double(T));
  }
  SchemeParams p;
  p.lambda = lambda;
  p.T = T;
  p.tau = tau;
  p.L = static_cast<int>(L);
  p.N = N;
  p.validate();
  return p;
}

void SchemeParams::validate() const {
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("lambda must be +1 or -1");
  if (N < 1) throw std::invalid_argument("cutoff N must be >= 1");
  if (L < 1) throw std::invalid_argument("step count L must be >= 1");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("final time T must be positive");
  if (!(tau > 0.0) || std::abs(tau * L - T) > 1e-12 * T) {
    throw std::invalid_argument("time step must satisfy tau * L = T");
  }
}

ConservedQuantities::ConservedQuantities(double mass, Complex momentum) : mass_(mass), momentum_(momentum) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw std::invalid_argument("discrete mass must be finite and >= 0");
  if (std::abs(momentum.real()) > 1e-10 * (1.0 + std::abs(momentum))) {
    throw std::invalid_argument("discrete momentum must be purely imaginary, got real part " +
                                format_double(momentum.real()));
  }
}

ConservedQuantities conserved_quantities(const SpectralField& u) {
  double mass = 0.0;
  double weighted = 0.0;
  for (int k = -u.cutoff(); k <= u.cutoff(); ++k) {
    const double w = std::norm(u.coeff(k));
    mass += w;
    weighted += k * w;
  }
  return ConservedQuantities(mass, Complex(0.0, -weighted));
}

ConservedQuantities conserved_quantities_via_products(const SpectralField& u) {
  const ProductGrid grid(u.cutoff());
  const GridValues gu = grid.lift(u);
  const Complex mass = grid.mean(grid.multiply(gu, gu.conj()));
  const Complex momentum = grid.mean(grid.multiply(gu, grid.lift(derivative(conjugate(u)))));
  return ConservedQuantities(mass.real(), momentum);
}

std::string to_string(InitMode mode) { return mode == InitMode::sampled ? "sampled" : "truncated"; }

InitMode parse_init_mode(const std::string& name) {
  if (name == "sampled") return InitMode::sampled;
  if (name == "truncated") return InitMode::truncated;
  throw std::invalid_argument("unknown init mode '" + name + "'");
}

SpectralField interpolate(const SampleVector& samples, int cutoff) {
  const std::size_t points = 4 * static_cast<std::size_t>(cutoff) + 1;
  if (samples.size() != points) throw std::invalid_argument("interpolate: expected samples on the 4N+1 grid");
  const CoefficientVector coeffs = DftPlan(points).forward(samples);
  SpectralField f(cutoff);
  for (int k = -cutoff; k <= cutoff; ++k) f.at(k) = coeffs[k];
  return f;
}

SpectralField initialize(const InitialDataSpec& source, int cutoff, InitMode mode) {
  if (cutoff < 1) throw std::invalid_argument("initialize: cutoff must be >= 1");
  if (mode == InitMode::truncated) return truncated_field(source, cutoff);
  const int tail = effective_tail_cutoff(source, cutoff);
  if (source.kind == InitialKind::sobolev_series && tail < 4 * cutoff) {
    throw std::invalid_argument("initialize: tail cutoff must be at least 4N");
  }
  return interpolate(sample_on_grid(source, 4 * static_cast<std::size_t>(cutoff) + 1, tail), cutoff);
}

SpectralField initialize(const InitialDataSpec& source, const SchemeParams& params, InitMode mode) {
  return initialize(source, params.N, mode);
}

LowRegularityStepper::LowRegularityStepper(const SchemeParams& params, const ConservedQuantities& cq)
    : params_(params), cq_(cq), grid_(params.N) {
  params_.validate();
  const int n = params_.N;
  const SpectralField ones(n, std::vector<Complex>(2 * static_cast<std::size_t>(n) + 1, 1.0));
  const SpectralField twist = twist_propagator(ones, params_.tau, params_.lambda, cq_.mass(), cq_.momentum());
  const SpectralField prop = free_propagator(ones, params_.tau);
  twist_.assign(twist.coeffs().begin(), twist.coeffs().end());
  propagate_.assign(prop.coeffs().begin(), prop.coeffs().end());
}

SpectralField LowRegularityStepper::step(const SpectralField& f) const {
  if (f.cutoff() != params_.N) throw CutoffMismatch(params_.N, f.cutoff());
  const double lam = params_.lambda;
  const double tau = params_.tau;
  const auto forward_flow = [this](SpectralField g) {  // exp(+i tau d_xx)
    auto c = g.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= propagate_[i];
    return g;
  };
  const auto backward_flow = [this](SpectralField g) {  // exp(-i tau d_xx)
    auto c = g.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::conj(propagate_[i]);
    return g;
  };

  const Complex mean = zero_mode(f);
  const SpectralField f_bar = conjugate(f);
  const SpectralField dx_f_bar = derivative(f_bar);
  const SpectralField inv_dx_f = inv_derivative(f);

  const GridValues g_f = grid_.lift(f);
  const GridValues g_f_bar = g_f.conj();
  const GridValues g_dx_f_bar = grid_.lift(dx_f_bar);

  // |f|^2 and f^2 truncated to S_N.
  const SpectralField abs_sq = grid_.project(grid_.multiply(g_f, g_f_bar));
  const SpectralField sq = grid_.project(grid_.multiply(g_f, g_f));
  const GridValues g_sq = grid_.lift(sq);

  // (1) + (2)
  SpectralField result = f;
  {
    auto c = result.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= twist_[i];
  }
  result.at(0) += (1.0 - std::exp(Complex(0.0, -2.0 * lam * tau * cq_.mass()))) * mean;

  // (3)
  result.at(0) += -kI * lam * tau * mean_of_product(abs_sq, f);

  // exp(-i tau d_xx) conj(f) is the conjugate of exp(i tau d_xx) f.
  const GridValues g_ef = grid_.lift(forward_flow(f));
  const GridValues g_ef_bar = g_ef.conj();

  // (4)
  {
    const SpectralField abs_sq_ef = grid_.project(grid_.multiply(g_ef, g_ef_bar));
    const SpectralField inner = grid_.project(grid_.multiply(g_ef, grid_.lift(inv_derivative(abs_sq_ef))));
    result += lam * inv_derivative(inner);
  }

  // (6)
  {
    const SpectralField first = grid_.project(grid_.multiply(g_ef_bar, grid_.lift(forward_flow(sq))));
    const SpectralField second = grid_.project(grid_.multiply(g_f_bar, g_sq));
    result += (-0.5 * lam) * (inv_derivative2(first) - forward_flow(inv_derivative2(second)));
  }

  // (5), (7), (8), (9) all end in exp(i tau d_xx) d_x^{-1} Pi_N and share one
  // forward transform.
  {
    const GridValues g_inv_dx_f = grid_.lift(inv_derivative(abs_sq));
    GridProduct combined = (-lam) * grid_.multiply(g_f, g_inv_dx_f);

    const GridValues g_e_inv = grid_.lift(forward_flow(inv_dx_f));
    const GridValues g_inv = grid_.lift(inv_dx_f);
    const SpectralField sq_e_inv = grid_.project(grid_.multiply(g_e_inv, g_e_inv));
    const SpectralField sq_inv = grid_.project(grid_.multiply(g_inv, g_inv));
    const GridValues g_diff = grid_.lift(backward_flow(sq_e_inv) - sq_inv);
    combined += (-0.5 * lam) * grid_.multiply(g_dx_f_bar, g_diff);

    combined += (-kI * lam * tau) * grid_.multiply(g_dx_f_bar, g_sq);
    combined += (2.0 * kI * lam * tau * mean) * grid_.multiply(g_dx_f_bar, g_f);

    result += forward_flow(inv_derivative(grid_.project(combined)));
  }

  // (10)
  result += (-kI * lam * tau * mean * mean) * forward_flow(nonzero_part(f_bar));
  return result;
}

SpectralField step(const SpectralField& f, const SchemeParams& params, const ConservedQuantities& cq) {
  return LowRegularityStepper(params, cq).step(f);
}

TwistedStepper::TwistedStepper(const SchemeParams& params, const ConservedQuantities& cq)
    : params_(params), cq_(cq), grid_(params.N) {
  params_.validate();
}

SpectralField TwistedStepper::step(const SpectralField& v, int n) const {
  if (v.cutoff() != params_.N) throw CutoffMismatch(params_.N, v.cutoff());
  const double lam = params_.lambda;
  const double tau = params_.tau;
  const double t_now = params_.time(n);
  const double t_next = params_.time(n + 1);
  const double mass = cq_.mass();
  const Complex momentum = cq_.momentum();
  const auto prod = [this](const SpectralField& a, const SpectralField& b) { return grid_.product(a, b); };

  const SpectralField v_bar = conjugate(v);
  const SpectralField a = free_propagator(v, t_now);
  const SpectralField b = free_propagator(v, t_next);
  const SpectralField a_sq = prod(a, a);
  const SpectralField a_abs_sq = prod(a, conjugate(a));
  const SpectralField dx_bar_now = free_propagator(derivative(v_bar), -t_now);
  const Complex mean = zero_mode(v);

  const SpectralField t1 = apply_multiplier(v, [&](int k) {
    if (k == 0) return std::exp(Complex(0.0, -2.0 * lam * tau * mass));
    return std::exp(-2.0 * kI * lam * tau * momentum / Complex(0.0, k) - 2.0 * kI * lam * tau * mass);
  });
  const SpectralField t2 = constant_field(v.cutoff(), (1.0 - std::exp(Complex(0.0, -2.0 * lam * tau * mass))) * mean);
  const SpectralField t3 = constant_field(v.cutoff(), -kI * lam * tau * zero_mode(prod(a_abs_sq, a)));

  const SpectralField t4 =
      lam * free_propagator(inv_derivative(prod(b, inv_derivative(prod(b, conjugate(b))))), -t_next);
  const SpectralField t5 = -lam * free_propagator(inv_derivative(prod(a, inv_derivative(a_abs_sq))), -t_now);

  const SpectralField t6a = free_propagator(
      inv_derivative2(prod(free_propagator(v_bar, -t_next), free_propagator(a_sq, tau))), -t_next);
  const SpectralField t6b = free_propagator(inv_derivative2(prod(free_propagator(v_bar, -t_now), a_sq)), -t_now);
  const SpectralField t6 = (-0.5 * lam) * (t6a - t6b);

  const SpectralField e_next_inv = free_propagator(inv_derivative(v), t_next);
  const SpectralField e_now_inv = free_propagator(inv_derivative(v), t_now);
  const SpectralField t7a =
      free_propagator(inv_derivative(prod(dx_bar_now, free_propagator(prod(e_next_inv, e_next_inv), -tau))), -t_now);
  const SpectralField t7b = free_propagator(inv_derivative(prod(dx_bar_now, prod(e_now_inv, e_now_inv))), -t_now);
  const SpectralField t7 = (-0.5 * lam) * (t7a - t7b);

  const SpectralField t8 = (-kI * lam * tau) * free_propagator(inv_derivative(prod(dx_bar_now, a_sq)), -t_now);
  const SpectralField t9 =
      (2.0 * kI * lam * tau * mean) * free_propagator(inv_derivative(prod(dx_bar_now, a)), -t_now);
  // Without the outer exp(-i t_n d_xx) this term alone breaks the conjugacy
  // to Psi for n > 0.
  const SpectralField t10 =
      (-kI * lam * tau * mean * mean) * free_propagator(nonzero_part(free_propagator(v_bar, -t_now)), -t_now);

  return t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9 + t10;
}

SpectralField step_twisted(const SpectralField& v, int n, const SchemeParams& params, const ConservedQuantities& cq) {
  return TwistedStepper(params, cq).step(v, n);
}

BlowUp::BlowUp(int step, const std::string& detail)
    : std::runtime_error("blow-up at step " + std::to_string(step) + ": " + detail), step_(step) {}

SnapshotDiagnostics diagnose(const SpectralField& u, const ConservedQuantities& cq) {
  SnapshotDiagnostics d;
  d.l2 = sobolev_norm(u, SobolevIndex{0.0});
  d.h1 = sobolev_norm(u, SobolevIndex{1.0});
  const ConservedQuantities now = conserved_quantities(u);
  d.mass_drift = std::abs(now.mass() - cq.mass());
  d.momentum_drift = std::abs(now.momentum() - cq.momentum());
  return d;
}

std::vector<int> output_steps_from_times(const SchemeParams& params, const std::vector<double>& times) {
  std::vector<int> steps;
  for (const double t : times) {
    const auto n = std::llround(t / params.tau);
    if (n < 0 || n > params.L || std::abs(static_cast<double>(n) * params.tau - t) > 1e-9 * std::max(1.0, params.T)) {
      throw std::invalid_argument("output time " + format_double(t) + " is not a grid time n*tau");
    }
    steps.push_back(static_cast<int>(n));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

Trajectory evolve_with(const SchemeParams& params, const SpectralField& u0n, std::vector<int> output_steps,
                       const ConservedQuantities& cq, const StepFunction& advance, std::string scheme) {
  params.validate();
  if (u0n.cutoff() != params.N) throw CutoffMismatch(params.N, u0n.cutoff());
  if (output_steps.empty()) output_steps = {0, params.L};
  std::sort(output_steps.begin(), output_steps.end());
  output_steps.erase(std::unique(output_steps.begin(), output_steps.end()), output_steps.end());
  if (output_steps.front() < 0 || output_steps.back() > params.L) {
    throw std::invalid_argument("output steps must lie in [0, L]");
  }

  const auto start = std::chrono::steady_clock::now();
  Trajectory traj;
  traj.params = params;
  traj.conserved = cq;
  traj.scheme = std::move(scheme);
  auto next_output = output_steps.begin();
  const auto record = [&](int n, const SpectralField& u) {
    if (next_output != output_steps.end() && *next_output == n) {
      traj.snapshots.push_back(Snapshot{n, params.time(n), u, diagnose(u, cq)});
      ++next_output;
    }
  };

  SpectralField u = u0n;
  traj.max_h1 = sobolev_norm(u, SobolevIndex{1.0});
  record(0, u);
  for (int n = 0; n < params.L; ++n) {
    u = advance(u, n);
    if (!u.all_finite()) throw BlowUp(n + 1, "non-finite Fourier coefficient");
    traj.max_h1 = std::max(traj.max_h1, sobolev_norm(u, SobolevIndex{1.0}));
    record(n + 1, u);
  }
  traj.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

Trajectory evolve(const SchemeParams& params, const SpectralField& u0n, const std::vector<int>& output_steps) {
  const ConservedQuantities cq = conserved_quantities(u0n);
  const LowRegularityStepper stepper(params, cq);
  return evolve_with(params, u0n, output_steps, cq, [&stepper](const SpectralField& u, int) { return stepper.step(u); },
                     "lowreg");
}

namespace {

std::string snapshot_name(int step) {
  std::ostringstream name;
  name << "snapshot_" << step << ".field";
  return name.str();
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("manifest: missing key '" + key + "'");
  double value = 0.0;
  const auto& s = it->second;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("manifest: bad number for '" + key + "'");
  }
  return value;
}

int to_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const double value = to_double(kv, key);
  if (value != std::floor(value)) throw std::runtime_error("manifest: '" + key + "' must be an integer");
  return static_cast<int>(value);
}

}  // namespace

void write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write " + (dir / "manifest.txt").string());
  const auto& p = trajectory.params;
  manifest << "scheme=" << trajectory.scheme << '\n'
           << "lambda=" << p.lambda << '\n'
           << "tau=" << format_double(p.tau) << '\n'
           << "N=" << p.N << '\n'
           << "T=" << format_double(p.T) << '\n'
           << "L=" << p.L << '\n'
           << "mass=" << format_double(trajectory.conserved.mass()) << '\n'
           << "momentum_re=" << format_double(trajectory.conserved.momentum().real()) << '\n'
           << "momentum_im=" << format_double(trajectory.conserved.momentum().imag()) << '\n'
           << "max_h1=" << format_double(trajectory.max_h1) << '\n'
           << "wall_ms=" << format_double(trajectory.wall_ms) << '\n'
           << "snapshots=" << trajectory.snapshots.size() << '\n';
  for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
    const Snapshot& s = trajectory.snapshots[i];
    const std::string prefix = "snapshot." + std::to_string(i) + ".";
    manifest << prefix << "step=" << s.step << '\n'
             << prefix << "time=" << format_double(s.time) << '\n'
             << prefix << "file=" << snapshot_name(s.step) << '\n'
             << prefix << "l2=" << format_double(s.diagnostics.l2) << '\n'
             << prefix << "h1=" << format_double(s.diagnostics.h1) << '\n'
             << prefix << "mass_drift=" << format_double(s.diagnostics.mass_drift) << '\n'
             << prefix << "momentum_drift=" << format_double(s.diagnostics.momentum_drift) << '\n';
    std::ofstream field(dir / snapshot_name(s.step));
    if (!field) throw std::runtime_error("cannot write " + (dir / snapshot_name(s.step)).string());
    write_field(field, s.field);
  }
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot read " + (dir / "manifest.txt").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("manifest: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  Trajectory traj;
  traj.scheme = kv.count("scheme") ? kv["scheme"] : "lowreg";
  traj.params.lambda = to_int(kv, "lambda");
  traj.params.tau = to_double(kv, "tau");
  traj.params.N = to_int(kv, "N");
  traj.params.T = to_double(kv, "T");
  traj.params.L = to_int(kv, "L");
  traj.params.validate();
  traj.conserved =
      ConservedQuantities(to_double(kv, "mass"), Complex(to_double(kv, "momentum_re"), to_double(kv, "momentum_im")));
  traj.max_h1 = kv.count("max_h1") ? to_double(kv, "max_h1") : 0.0;
  traj.wall_ms = kv.count("wall_ms") ? to_double(kv, "wall_ms") : 0.0;
  const int count = to_int(kv, "snapshots");
  for (int i = 0; i < count; ++i) {
    const std::string prefix = "snapshot." + std::to_string(i) + ".";
    Snapshot s;
    s.step = to_int(kv, prefix + "step");
    s.time = to_double(kv, prefix + "time");
    const auto file_it = kv.find(prefix + "file");
    if (file_it == kv.end()) throw std::runtime_error("manifest: missing key '" + prefix + "file'");
    std::ifstream field(dir / file_it->second);
    if (!field) throw std::runtime_error("cannot read " + (dir / file_it->second).string());
    s.field = read_field(field);
    if (s.field.cutoff() != traj.params.N) throw CutoffMismatch(traj.params.N, s.field.cutoff());
    s.diagnostics = diagnose(s.field, traj.conserved);
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

}  // namespace lrnls
