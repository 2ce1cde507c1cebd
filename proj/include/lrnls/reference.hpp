#pragma once

// Baseline splitting schemes and refined reference runs.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrnls/integrator.hpp"

namespace lrnls {

enum class SplittingOrder { lie = 1, strang = 2 };

// Lie or Strang splitting. The nonlinear subflow u -> u exp(-i lambda |u|^2 t)
// is applied pointwise on the (4N+1)-point grid and truncated back to S_N,
// so it aliases; the linear subflow is exact.
class SplittingStepper {
 public:
  SplittingStepper(int cutoff, double tau, int lambda, SplittingOrder order);

  SpectralField step(const SpectralField& f) const;

 private:
  SpectralField nonlinear_flow(const SpectralField& f, double t) const;

  int cutoff_;
  double tau_;
  int lambda_;
  SplittingOrder order_;
  BandDftPlan plan_;
  std::vector<Complex> propagate_;  // exp(-i tau k^2)
};

SpectralField splitting_step(const SpectralField& f, double tau, int lambda, SplittingOrder order);

std::string to_string(SplittingOrder order);

// Trajectory of the splitting scheme; diagnostics use the conserved
// quantities of u0n.
Trajectory evolve_splitting(const SchemeParams& params, const SpectralField& u0n, SplittingOrder order,
                            const std::vector<int>& output_steps = {});

enum class ReferenceScheme { lie_splitting, strang_splitting, lowreg_fine };

std::string to_string(ReferenceScheme scheme);
ReferenceScheme parse_reference_scheme(const std::string& name);

struct ReferenceConfig {
  ReferenceScheme scheme = ReferenceScheme::lowreg_fine;
  // tau is divided and N multiplied by this factor.
  int refinement = 2;
  bool refine_time = true;
  bool refine_space = true;
  InitMode init_mode = InitMode::truncated;
  // Guard on the estimated working set of the refined run.
  std::size_t max_bytes = std::size_t{1} << 30;

  void validate() const;
};

class ResourceCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trajectory of the selected scheme from u0n.
Trajectory evolve_scheme(ReferenceScheme scheme, const SchemeParams& params, const SpectralField& u0n,
                         const std::vector<int>& output_steps = {});

// Rough working-set estimate of one trajectory at cutoff N.
std::size_t estimated_bytes(int cutoff);

// Runs the refined scheme from `source` to params.T and returns the final
// field projected to S_N.
SpectralField reference_solution(const SchemeParams& params, const InitialDataSpec& source,
                                 const ReferenceConfig& config = {});

}  // namespace lrnls
