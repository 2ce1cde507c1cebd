#include "lrnls/initial_data.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lrnls {

InitialDataSpec InitialDataSpec::sobolev(double alpha) {
  InitialDataSpec spec;
  spec.kind = InitialKind::sobolev_series;
  spec.alpha = alpha;
  return spec;
}

InitialDataSpec InitialDataSpec::plane(int mode, double amplitude) {
  InitialDataSpec spec;
  spec.kind = InitialKind::plane_wave;
  spec.mode = mode;
  spec.amplitude = amplitude;
  return spec;
}

InitialDataSpec InitialDataSpec::constant(double amplitude) {
  InitialDataSpec spec;
  spec.kind = InitialKind::constant;
  spec.amplitude = amplitude;
  return spec;
}

void InitialDataSpec::validate() const {
  if (!std::isfinite(amplitude)) throw std::invalid_argument("initial data: amplitude must be finite");
  if (kind == InitialKind::sobolev_series && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw std::invalid_argument("initial data: alpha must be positive for the Sobolev series");
  }
  if (tail_cutoff && *tail_cutoff < 1) throw std::invalid_argument("initial data: tail cutoff must be positive");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::sobolev_series: return "sobolev";
    case InitialKind::plane_wave: return "plane";
    case InitialKind::constant: return "constant";
    case InitialKind::custom_coefficients: return "custom";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "sobolev" || name == "sobolev_series") return InitialKind::sobolev_series;
  if (name == "plane" || name == "plane_wave") return InitialKind::plane_wave;
  if (name == "constant") return InitialKind::constant;
  if (name == "custom") return InitialKind::custom_coefficients;
  throw std::invalid_argument("unknown initial data kind '" + name + "'");
}

Complex coefficient(const InitialDataSpec& spec, int k) {
  switch (spec.kind) {
    case InitialKind::sobolev_series:
      if (k == 0) return 0.0;
      return spec.amplitude * std::pow(static_cast<double>(std::abs(k)), -spec.exponent_offset - spec.alpha);
    case InitialKind::plane_wave:
      return k == spec.mode ? Complex(spec.amplitude) : Complex{};
    case InitialKind::constant:
      return k == 0 ? Complex(spec.amplitude) : Complex{};
    case InitialKind::custom_coefficients: {
      const auto it = spec.custom.find(k);
      return it == spec.custom.end() ? Complex{} : it->second;
    }
  }
  return 0.0;
}

int effective_tail_cutoff(const InitialDataSpec& spec, int cutoff) {
  switch (spec.kind) {
    case InitialKind::sobolev_series:
      return spec.tail_cutoff.value_or(std::max(16 * cutoff, 1 << 14));
    case InitialKind::plane_wave:
      return std::abs(spec.mode);
    case InitialKind::constant:
      return 0;
    case InitialKind::custom_coefficients: {
      int widest = 0;
      for (const auto& [k, value] : spec.custom) widest = std::max(widest, std::abs(k));
      return widest;
    }
  }
  return 0;
}

SampleVector sample_on_grid(const InitialDataSpec& spec, std::size_t points, int tail_cutoff) {
  spec.validate();
  if (points == 0) throw std::invalid_argument("sample_on_grid: grid must have at least one point");
  CoefficientVector folded(points);
  const long m = static_cast<long>(points);
  for (long k = -tail_cutoff; k <= tail_cutoff; ++k) {
    const Complex c = coefficient(spec, static_cast<int>(k));
    if (c == Complex{}) continue;
    // exp(ikx_n) depends only on k mod M; map onto the centered window.
    long r = ((k - folded.first()) % m + m) % m + folded.first();
    folded[r] += c;
  }
  return DftPlan(points).inverse(folded);
}

SpectralField truncated_field(const InitialDataSpec& spec, int cutoff) {
  spec.validate();
  SpectralField f(cutoff);
  for (int k = -cutoff; k <= cutoff; ++k) f.at(k) = coefficient(spec, k);
  return f;
}

}  // namespace lrnls
