#pragma once

// Arbitrary-length discrete Fourier transform on a centered index window.
//
// Samples are values at x_n = 2*pi*n/M and coefficients are indexed by the
// signed wavenumber k. Both windows run over n, k = -(M/2) ... M-1-(M/2),
// which is the symmetric window -(M-1)/2 ... (M-1)/2 for odd M.
//
//   forward: c_k = (1/M) sum_n exp(-i k x_n) s_n
//   inverse: s_n =       sum_k exp(+i k x_n) c_k
//
// Lengths built from small primes use a mixed-radix transform directly;
// every other length goes through Bluestein's chirp-z reformulation on a
// 2^a 3^b 5^c convolution, so the cost is O(M log M) for all M.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace lrnls {

using Complex = std::complex<double>;

// Values on a centered integer window of length M.
template <typename Tag>
class CenteredArray {
 public:
  CenteredArray() = default;
  explicit CenteredArray(std::size_t length) : data_(length) {
    if (length == 0) throw std::invalid_argument("CenteredArray: length must be >= 1");
  }
  explicit CenteredArray(std::vector<Complex> values) : data_(std::move(values)) {
    if (data_.empty()) throw std::invalid_argument("CenteredArray: length must be >= 1");
  }

  std::size_t size() const { return data_.size(); }
  // Smallest index of the window.
  long first() const { return -static_cast<long>(data_.size() / 2); }
  long last() const { return first() + static_cast<long>(data_.size()) - 1; }

  Complex& operator[](long i) { return data_[static_cast<std::size_t>(i - first())]; }
  const Complex& operator[](long i) const { return data_[static_cast<std::size_t>(i - first())]; }

  std::span<Complex> values() { return data_; }
  std::span<const Complex> values() const { return data_; }

 private:
  std::vector<Complex> data_;
};

struct SampleTag {};
struct CoefficientTag {};
using SampleVector = CenteredArray<SampleTag>;
using CoefficientVector = CenteredArray<CoefficientTag>;

namespace detail {

// Mixed-radix Stockham FFT for lengths whose prime factors are all <= 13.
// Radices 2, 3, 4, 5 and 8 have dedicated butterflies; 7, 11 and 13 use a
// generic O(p^2) butterfly.
class MixedRadixFft {
 public:
  explicit MixedRadixFft(std::size_t size);

  static bool supports(std::size_t size);
  // Smallest n >= size of the form 2^a 3^b 5^c.
  static std::size_t good_size(std::size_t size);

  std::size_t size() const { return size_; }
  // Unnormalized sum_j exp(-2 pi i jk/n) x_j; `scratch` needs size() entries.
  void forward(std::span<Complex> data, std::span<Complex> scratch) const;
  // sign = -1 as forward, sign = +1 with the conjugate kernel.
  void transform(std::span<Complex> data, int sign) const;

 private:
  struct Stage {
    std::size_t radix;
    std::size_t stride;  // product of the radices of earlier stages
    std::size_t twiddle_offset;
  };
  std::size_t size_;
  std::vector<Stage> stages_;
  std::vector<Complex> twiddles_;
};

}  // namespace detail

// Immutable transform plan; safe to share across threads.
class DftPlan {
 public:
  explicit DftPlan(std::size_t length);

  std::size_t length() const { return length_; }

  CoefficientVector forward(const SampleVector& samples) const;
  SampleVector inverse(const CoefficientVector& coeffs) const;

  // Buffer-level interface in centered storage order (index 0 holds n = -(M/2)).
  // `in` and `out` must both have length M; they may alias.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  // Unnormalized transform in standard order; sign -1 is exp(-2 pi i jk/M).
  void transform_standard(std::span<Complex> data, int sign) const;
  void run(std::span<const Complex> in, std::span<Complex> out, int sign, double scale) const;

  std::size_t length_;
  bool direct_;
  std::shared_ptr<const detail::MixedRadixFft> fft_;
  // Bluestein data: chirp w_j = exp(-i pi j^2 / M) and the transformed
  // convolution kernel conj(w) wrapped onto the padded length, scaled by
  // 1/padded so the inverse convolution transform needs no extra pass.
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_hat_;
};

// Transform between the coefficient band |k| <= B and all M samples of an
// odd-length grid, exploiting that the remaining coefficients are zero (or
// not wanted). Equivalent to DftPlan with zero padding or truncation but the
// chirp-z convolution only spans 2(B + (M-1)/2) points.
class BandDftPlan {
 public:
  BandDftPlan(std::size_t length, std::size_t band);

  std::size_t length() const { return length_; }
  std::size_t band() const { return band_; }

  // coeffs: 2B+1 values for k = -B ... B; samples: M values for
  // n = -(M-1)/2 ... (M-1)/2. Buffers must not alias.
  void inverse(std::span<const Complex> coeffs, std::span<Complex> samples) const;
  // Coefficients |k| <= B of the 1/M-normalized forward transform.
  void forward(std::span<const Complex> samples, std::span<Complex> coeffs) const;

 private:
  // y_o = sum_{|i| <= in_half} x_i exp(+2 pi i i o / M) for |o| <= out_half.
  void chirp_sum(std::span<const Complex> in, std::size_t in_half, std::span<Complex> out, std::size_t out_half) const;

  std::size_t length_;
  std::size_t band_;
  std::shared_ptr<const detail::MixedRadixFft> fft_;
  std::vector<Complex> chirp_;       // exp(i pi j^2 / M) for 0 <= j <= D
  std::vector<Complex> kernel_hat_;  // transform of conj(chirp) on the padded length, / P
};

}  // namespace lrnls
