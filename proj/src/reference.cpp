#include "lrnls/reference.hpp"

#include <algorithm>
#include <cmath>

namespace lrnls {

namespace {

std::size_t as_size(int n) { return static_cast<std::size_t>(n); }

}  // namespace

SplittingStepper::SplittingStepper(int cutoff, double tau, int lambda, SplittingOrder order)
    : cutoff_(cutoff),
      tau_(tau),
      lambda_(lambda),
      order_(order),
      plan_(4 * as_size(std::max(cutoff, 0)) + 1, as_size(std::max(cutoff, 0))) {
  if (cutoff < 1) throw std::invalid_argument("splitting: cutoff N must be >= 1");
  if (lambda != 1 && lambda != -1) throw std::invalid_argument("lambda must be +1 or -1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("splitting: tau must be positive");
  propagate_.resize(2 * as_size(cutoff) + 1);
  for (int k = -cutoff; k <= cutoff; ++k) {
    propagate_[as_size(k + cutoff)] = std::polar(1.0, -tau * static_cast<double>(k) * static_cast<double>(k));
  }
}

SpectralField SplittingStepper::nonlinear_flow(const SpectralField& f, double t) const {
  std::vector<Complex> values(plan_.length());
  plan_.inverse(f.coeffs(), values);
  for (auto& u : values) u *= std::polar(1.0, -lambda_ * std::norm(u) * t);
  SpectralField out(cutoff_);
  plan_.forward(values, out.coeffs());
  return out;
}

SpectralField SplittingStepper::step(const SpectralField& f) const {
  if (f.cutoff() != cutoff_) throw CutoffMismatch(cutoff_, f.cutoff());
  const double first = order_ == SplittingOrder::lie ? tau_ : 0.5 * tau_;
  SpectralField u = nonlinear_flow(f, first);
  auto c = u.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= propagate_[i];
  if (order_ == SplittingOrder::strang) u = nonlinear_flow(u, 0.5 * tau_);
  return u;
}

SpectralField splitting_step(const SpectralField& f, double tau, int lambda, SplittingOrder order) {
  return SplittingStepper(f.cutoff(), tau, lambda, order).step(f);
}

std::string to_string(SplittingOrder order) { return order == SplittingOrder::lie ? "lie" : "strang"; }

Trajectory evolve_splitting(const SchemeParams& params, const SpectralField& u0n, SplittingOrder order,
                            const std::vector<int>& output_steps) {
  params.validate();
  const SplittingStepper stepper(params.N, params.tau, params.lambda, order);
  return evolve_with(params, u0n, output_steps, conserved_quantities(u0n),
                     [&stepper](const SpectralField& u, int) { return stepper.step(u); }, to_string(order));
}

std::string to_string(ReferenceScheme scheme) {
  switch (scheme) {
    case ReferenceScheme::lie_splitting: return "lie";
    case ReferenceScheme::strang_splitting: return "strang";
    case ReferenceScheme::lowreg_fine: return "lowreg";
  }
  return "unknown";
}

ReferenceScheme parse_reference_scheme(const std::string& name) {
  if (name == "lie") return ReferenceScheme::lie_splitting;
  if (name == "strang") return ReferenceScheme::strang_splitting;
  if (name == "lowreg") return ReferenceScheme::lowreg_fine;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected lowreg, lie or strang)");
}

void ReferenceConfig::validate() const {
  if (refinement < 2 || (refinement & (refinement - 1)) != 0) {
    throw std::invalid_argument("reference refinement must be a power of two >= 2");
  }
  if (!refine_time && !refine_space) throw std::invalid_argument("reference run must refine time or space");
}

Trajectory evolve_scheme(ReferenceScheme scheme, const SchemeParams& params, const SpectralField& u0n,
                         const std::vector<int>& output_steps) {
  switch (scheme) {
    case ReferenceScheme::lie_splitting: return evolve_splitting(params, u0n, SplittingOrder::lie, output_steps);
    case ReferenceScheme::strang_splitting: return evolve_splitting(params, u0n, SplittingOrder::strang, output_steps);
    case ReferenceScheme::lowreg_fine: break;
  }
  return evolve(params, u0n, output_steps);
}

std::size_t estimated_bytes(int cutoff) {
  // Grid buffers of the step plus the padded convolution workspace.
  return sizeof(Complex) * (4 * as_size(cutoff) + 1) * 24;
}

SpectralField reference_solution(const SchemeParams& params, const InitialDataSpec& source,
                                 const ReferenceConfig& config) {
  params.validate();
  config.validate();
  const long long fine_n = config.refine_space ? static_cast<long long>(params.N) * config.refinement : params.N;
  const long long fine_l = config.refine_time ? static_cast<long long>(params.L) * config.refinement : params.L;
  if (fine_n > (1 << 28) || fine_l > (1LL << 40) || estimated_bytes(static_cast<int>(fine_n)) > config.max_bytes) {
    throw ResourceCapExceeded("reference run with N=" + std::to_string(fine_n) + " exceeds the memory cap of " +
                              std::to_string(config.max_bytes) + " bytes");
  }
  if (fine_l > (1LL << 31) - 1) throw ResourceCapExceeded("reference run needs too many steps");
  const auto fine = SchemeParams::from_steps(params.lambda, params.T, static_cast<int>(fine_l), static_cast<int>(fine_n));
  const SpectralField u0 = initialize(source, fine.N, config.init_mode);
  return project(evolve_scheme(config.scheme, fine, u0).final_field(), params.N);
}

}  // namespace lrnls
