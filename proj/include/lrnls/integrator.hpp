#pragma once

// Fully discrete low-regularity integrator for the periodic cubic NLS
//   i u_t + u_xx = lambda |u|^2 u,   x in (-pi, pi),
// with lambda = -1 (focusing) or +1 (defocusing).

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrnls/initial_data.hpp"
#include "lrnls/spectral.hpp"

namespace lrnls {

struct SchemeParams {
  int lambda = -1;
  double tau = 0.0;
  int N = 0;
  double T = 0.0;
  int L = 0;

  // tau = T / L.
  static SchemeParams from_steps(int lambda, double T, int L, int N);
  // L = round(T / tau); throws unless tau divides T.
  static SchemeParams from_step_size(int lambda, double T, double tau, int N);

  void validate() const;
  double time(int step) const { return step * tau; }
};

// Discrete mass M_N = Pi_0(|u|^2) and momentum P_N = Pi_0(u d_x conj(u)) of
// the initial field. P_N = -i sum_k k |u_k|^2 is purely imaginary.
class ConservedQuantities {
 public:
  ConservedQuantities(double mass, Complex momentum);

  double mass() const { return mass_; }
  Complex momentum() const { return momentum_; }

 private:
  double mass_;
  Complex momentum_;
};

// Closed-form sums over the coefficients.
ConservedQuantities conserved_quantities(const SpectralField& u);
// Same quantities as zero modes of the exact grid products.
ConservedQuantities conserved_quantities_via_products(const SpectralField& u);

enum class InitMode { sampled, truncated };
std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& name);

// Pi_N I_{2N} of sample values on the (4N+1)-point grid.
SpectralField interpolate(const SampleVector& samples, int cutoff);
// u^0_{tau,N}: sampled mode interpolates the (tail-truncated) series on the
// 4N+1 grid; truncated mode takes Pi_N u0 directly.
SpectralField initialize(const InitialDataSpec& source, int cutoff, InitMode mode = InitMode::sampled);
SpectralField initialize(const InitialDataSpec& source, const SchemeParams& params,
                         InitMode mode = InitMode::sampled);

// One-step map Psi with tables and transform plan prepared once.
class LowRegularityStepper {
 public:
  // Grid transforms per step: 10 inverse, 9 forward.
  static constexpr int kTransformsPerStep = 19;

  LowRegularityStepper(const SchemeParams& params, const ConservedQuantities& cq);

  SpectralField step(const SpectralField& f) const;

  const SchemeParams& params() const { return params_; }
  const ConservedQuantities& conserved() const { return cq_; }
  const ProductGrid& grid() const { return grid_; }

 private:
  SchemeParams params_;
  ConservedQuantities cq_;
  ProductGrid grid_;
  std::vector<Complex> twist_;      // twist propagator multipliers
  std::vector<Complex> propagate_;  // exp(-i tau k^2)
};

SpectralField step(const SpectralField& f, const SchemeParams& params, const ConservedQuantities& cq);

// The map Phi^n acting on the twisted variable v^n = exp(-i t_n d_xx) u^n.
class TwistedStepper {
 public:
  TwistedStepper(const SchemeParams& params, const ConservedQuantities& cq);
  SpectralField step(const SpectralField& v, int n) const;

 private:
  SchemeParams params_;
  ConservedQuantities cq_;
  ProductGrid grid_;
};

SpectralField step_twisted(const SpectralField& v, int n, const SchemeParams& params, const ConservedQuantities& cq);

class BlowUp : public std::runtime_error {
 public:
  BlowUp(int step, const std::string& detail);
  int step() const { return step_; }

 private:
  int step_;
};

struct SnapshotDiagnostics {
  double l2 = 0.0;
  double h1 = 0.0;
  double mass_drift = 0.0;      // |Pi_0(|u^n|^2) - M_N|
  double momentum_drift = 0.0;  // |Pi_0(u^n d_x conj(u^n)) - P_N|
};

SnapshotDiagnostics diagnose(const SpectralField& u, const ConservedQuantities& cq);

struct Snapshot {
  int step = 0;
  double time = 0.0;
  SpectralField field{0};
  SnapshotDiagnostics diagnostics;
};

struct Trajectory {
  SchemeParams params;
  ConservedQuantities conserved{0.0, 0.0};
  std::string scheme = "lowreg";
  std::vector<Snapshot> snapshots;
  // Largest H^1 norm over every step, snapshots or not.
  double max_h1 = 0.0;
  double wall_ms = 0.0;

  const SpectralField& final_field() const { return snapshots.back().field; }
};

using StepFunction = std::function<SpectralField(const SpectralField&, int step)>;

// Steps in [0, L] at which snapshots are recorded; empty means {0, L}.
std::vector<int> output_steps_from_times(const SchemeParams& params, const std::vector<double>& times);

// Iterates `advance` L times from u0n and records snapshots.
Trajectory evolve_with(const SchemeParams& params, const SpectralField& u0n, std::vector<int> output_steps,
                       const ConservedQuantities& cq, const StepFunction& advance, std::string scheme);

// u^{n+1} = Psi(u^n) for n = 0 ... L-1.
Trajectory evolve(const SchemeParams& params, const SpectralField& u0n, const std::vector<int>& output_steps = {});

// Directory layout: manifest.txt (key=value) plus snapshot_<step>.field files.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& trajectory);
Trajectory read_trajectory(const std::filesystem::path& dir);

}  // namespace lrnls
