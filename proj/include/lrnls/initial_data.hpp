#pragma once

// Initial states: the power-law Fourier series
//   u0(x) = a * sum_{k != 0} |k|^{-offset-alpha} exp(ikx),  a = 1/10, offset = 0.51,
// which lies in H^alpha but not in H^{alpha-0.01}, plus plane waves,
// constants and explicit coefficient lists.

#include <complex>
#include <map>
#include <optional>
#include <string>

#include "lrnls/dft.hpp"
#include "lrnls/spectral.hpp"

namespace lrnls {

enum class InitialKind { sobolev_series, plane_wave, constant, custom_coefficients };

struct InitialDataSpec {
  InitialKind kind = InitialKind::sobolev_series;
  double alpha = 1.0;
  double amplitude = 0.1;
  double exponent_offset = 0.51;
  int mode = 1;
  // Largest |k| kept when sampling the series; unset selects max(16N, 2^14)
  // at the point of use.
  std::optional<int> tail_cutoff;
  std::map<int, Complex> custom;

  static InitialDataSpec sobolev(double alpha);
  static InitialDataSpec plane(int mode, double amplitude = 1.0);
  static InitialDataSpec constant(double amplitude);

  // Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

// Fourier coefficient of mode k.
Complex coefficient(const InitialDataSpec& spec, int k);

// Largest |k| with a nonzero coefficient that sampling must honour.
int effective_tail_cutoff(const InitialDataSpec& spec, int cutoff);

// Values of the series truncated at |k| <= tail_cutoff at x_n = 2 pi n / M.
// Modes are folded modulo M and resolved with one length-M transform.
SampleVector sample_on_grid(const InitialDataSpec& spec, std::size_t points, int tail_cutoff);

// Pi_N u0 taken directly from the coefficients.
SpectralField truncated_field(const InitialDataSpec& spec, int cutoff);

}  // namespace lrnls
