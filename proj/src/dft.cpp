#include "lrnls/dft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lrnls {

namespace {

constexpr std::size_t kLargestDirectPrime = 13;

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// -i * z
inline Complex rot_neg_i(Complex z) { return {z.imag(), -z.real()}; }

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> primes;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  if (n > 1) primes.push_back(n);
  return primes;
}

// Per-thread execution buffers; plans themselves stay immutable.
std::vector<Complex>& thread_buffer(int which, std::size_t size) {
  thread_local std::vector<Complex> buffers[3];
  auto& buf = buffers[which];
  if (buf.size() < size) buf.resize(size);
  return buf;
}

}  // namespace

namespace detail {

bool MixedRadixFft::supports(std::size_t size) {
  if (size == 0) return false;
  for (const std::size_t p : factorize(size)) {
    if (p > kLargestDirectPrime) return false;
  }
  return true;
}

std::size_t MixedRadixFft::good_size(std::size_t size) {
  std::size_t best = 1;
  while (best < size) best <<= 1;
  for (std::size_t f5 = 1; f5 < best; f5 *= 5) {
    for (std::size_t f35 = f5; f35 < best; f35 *= 3) {
      std::size_t n = f35;
      while (n < size) n <<= 1;
      best = std::min(best, n);
    }
  }
  return best;
}

MixedRadixFft::MixedRadixFft(std::size_t size) : size_(size) {
  if (!supports(size)) throw std::invalid_argument("MixedRadixFft: length has a prime factor above 13");
  std::vector<std::size_t> primes = factorize(size);
  std::vector<std::size_t> radices;
  auto twos = static_cast<std::size_t>(std::count(primes.begin(), primes.end(), std::size_t{2}));
  for (; twos >= 3; twos -= 3) radices.push_back(8);
  if (twos == 2) radices.push_back(4);
  if (twos == 1) radices.push_back(2);
  for (const std::size_t p : primes) {
    if (p != 2) radices.push_back(p);
  }

  std::size_t stride = 1;
  for (const std::size_t p : radices) {
    stages_.push_back(Stage{p, stride, twiddles_.size()});
    const double span = static_cast<double>(stride * p);
    for (std::size_t k = 0; k < stride; ++k) {
      for (std::size_t r = 1; r < p; ++r) {
        twiddles_.push_back(std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r * k) / span));
      }
    }
    stride *= p;
  }
}

}  // namespace detail

namespace {

template <std::size_t P>
inline void butterfly(Complex* a) {
  if constexpr (P == 2) {
    const Complex a0 = a[0], a1 = a[1];
    a[0] = a0 + a1;
    a[1] = a0 - a1;
  } else if constexpr (P == 3) {
    constexpr double kSin = 0.86602540378443864676;
    const Complex t1 = a[1] + a[2];
    const Complex t2 = a[0] - 0.5 * t1;
    const Complex t3 = kSin * rot_neg_i(a[1] - a[2]);
    a[0] = a[0] + t1;
    a[1] = t2 + t3;
    a[2] = t2 - t3;
  } else if constexpr (P == 4) {
    const Complex t0 = a[0] + a[2];
    const Complex t1 = a[0] - a[2];
    const Complex t2 = a[1] + a[3];
    const Complex t3 = rot_neg_i(a[1] - a[3]);
    a[0] = t0 + t2;
    a[1] = t1 + t3;
    a[2] = t0 - t2;
    a[3] = t1 - t3;
  } else if constexpr (P == 8) {
    constexpr double kR = 0.70710678118654752440;
    Complex e[4] = {a[0], a[2], a[4], a[6]};
    Complex o[4] = {a[1], a[3], a[5], a[7]};
    butterfly<4>(e);
    butterfly<4>(o);
    o[1] = Complex(kR * (o[1].real() + o[1].imag()), kR * (o[1].imag() - o[1].real()));
    o[2] = rot_neg_i(o[2]);
    o[3] = Complex(kR * (o[3].imag() - o[3].real()), -kR * (o[3].real() + o[3].imag()));
    for (int r = 0; r < 4; ++r) {
      a[r] = e[r] + o[r];
      a[r + 4] = e[r] - o[r];
    }
  } else if constexpr (P == 5) {
    constexpr double kC1 = 0.30901699437494742410;
    constexpr double kC2 = -0.80901699437494742410;
    constexpr double kS1 = 0.95105651629515357212;
    constexpr double kS2 = 0.58778525229247312917;
    const Complex t1 = a[1] + a[4], t2 = a[2] + a[3], t3 = a[1] - a[4], t4 = a[2] - a[3];
    const Complex b1 = a[0] + kC1 * t1 + kC2 * t2;
    const Complex b2 = a[0] + kC2 * t1 + kC1 * t2;
    const Complex d1 = rot_neg_i(kS1 * t3 + kS2 * t4);
    const Complex d2 = rot_neg_i(kS2 * t3 - kS1 * t4);
    a[0] = a[0] + t1 + t2;
    a[1] = b1 + d1;
    a[2] = b2 + d2;
    a[3] = b2 - d2;
    a[4] = b1 - d1;
  }
}

// One Stockham pass with a dedicated butterfly.
template <std::size_t P>
void radix_pass(const Complex* x, Complex* y, std::size_t n, std::size_t ns, const Complex* tw_stage) {
  const std::size_t m = n / P;
  for (std::size_t block = 0; block < m / ns; ++block) {
    const Complex* in = x + block * ns;
    Complex* out = y + block * ns * P;
    for (std::size_t k = 0; k < ns; ++k) {
      const Complex* tw = tw_stage + k * (P - 1);
      Complex a[P];
      a[0] = in[k];
      if (ns == 1) {
        for (std::size_t r = 1; r < P; ++r) a[r] = in[k + r * m];
      } else {
        for (std::size_t r = 1; r < P; ++r) a[r] = mul(in[k + r * m], tw[r - 1]);
      }
      butterfly<P>(a);
      for (std::size_t r = 0; r < P; ++r) out[k + r * ns] = a[r];
    }
  }
}

void generic_pass(const Complex* x, Complex* y, std::size_t n, std::size_t p, std::size_t ns, const Complex* tw_stage) {
  const std::size_t m = n / p;
  Complex roots[kLargestDirectPrime];
  for (std::size_t q = 0; q < p; ++q) {
    roots[q] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(p));
  }
  for (std::size_t block = 0; block < m / ns; ++block) {
    for (std::size_t k = 0; k < ns; ++k) {
      const std::size_t j = block * ns + k;
      const Complex* tw = tw_stage + k * (p - 1);
      Complex a[kLargestDirectPrime];
      a[0] = x[j];
      for (std::size_t r = 1; r < p; ++r) a[r] = mul(x[j + r * m], tw[r - 1]);
      const std::size_t out = block * ns * p + k;
      for (std::size_t r = 0; r < p; ++r) {
        Complex acc = a[0];
        for (std::size_t q = 1; q < p; ++q) acc += mul(a[q], roots[(r * q) % p]);
        y[out + r * ns] = acc;
      }
    }
  }
}

}  // namespace

namespace detail {

void MixedRadixFft::forward(std::span<Complex> data, std::span<Complex> scratch) const {
  const std::size_t n = size_;
  Complex* x = data.data();
  Complex* y = scratch.data();
  for (const Stage& stage : stages_) {
    const Complex* tw = twiddles_.data() + stage.twiddle_offset;
    switch (stage.radix) {
      case 2: radix_pass<2>(x, y, n, stage.stride, tw); break;
      case 3: radix_pass<3>(x, y, n, stage.stride, tw); break;
      case 4: radix_pass<4>(x, y, n, stage.stride, tw); break;
      case 5: radix_pass<5>(x, y, n, stage.stride, tw); break;
      case 8: radix_pass<8>(x, y, n, stage.stride, tw); break;
      default: generic_pass(x, y, n, stage.radix, stage.stride, tw); break;
    }
    std::swap(x, y);
  }
  if (x != data.data()) std::copy(x, x + n, data.data());
}

void MixedRadixFft::transform(std::span<Complex> data, int sign) const {
  std::vector<Complex> scratch(size_);
  if (sign > 0) {
    for (auto& z : data) z = std::conj(z);
  }
  forward(data, scratch);
  if (sign > 0) {
    for (auto& z : data) z = std::conj(z);
  }
}

}  // namespace detail

DftPlan::DftPlan(std::size_t length) : length_(length), direct_(detail::MixedRadixFft::supports(length)) {
  if (length == 0) throw std::invalid_argument("DftPlan: length must be >= 1");
  if (direct_) {
    fft_ = std::make_shared<detail::MixedRadixFft>(length);
    return;
  }
  const std::size_t padded = detail::MixedRadixFft::good_size(2 * length - 1);
  fft_ = std::make_shared<detail::MixedRadixFft>(padded);

  chirp_.resize(length);
  const auto two_m = static_cast<unsigned long long>(2 * length);
  for (std::size_t j = 0; j < length; ++j) {
    // j^2 mod 2M keeps the chirp argument small and exact.
    const auto jj = static_cast<unsigned long long>(j);
    const auto r = (jj * jj) % two_m;
    chirp_[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(r) / static_cast<double>(length));
  }
  kernel_hat_.assign(padded, Complex{});
  kernel_hat_[0] = std::conj(chirp_[0]);
  for (std::size_t j = 1; j < length; ++j) {
    kernel_hat_[j] = std::conj(chirp_[j]);
    kernel_hat_[padded - j] = std::conj(chirp_[j]);
  }
  fft_->transform(kernel_hat_, -1);
  const double inv_padded = 1.0 / static_cast<double>(padded);
  for (auto& z : kernel_hat_) z *= inv_padded;
}

void DftPlan::transform_standard(std::span<Complex> data, int sign) const {
  if (length_ == 1) return;
  if (sign > 0) {
    for (auto& z : data) z = std::conj(z);
  }
  if (direct_) {
    fft_->forward(data, std::span(thread_buffer(1, length_)).first(length_));
  } else {
    // X_k = w_k sum_j (x_j w_j) conj(w_{k-j}); the cyclic convolution is
    // evaluated as conj(F(conj(F(a) * F(b)))) / P.
    const std::size_t padded = fft_->size();
    auto work = std::span(thread_buffer(1, padded)).first(padded);
    auto scratch = std::span(thread_buffer(2, padded)).first(padded);
    for (std::size_t j = 0; j < length_; ++j) work[j] = mul(data[j], chirp_[j]);
    std::fill(work.begin() + static_cast<std::ptrdiff_t>(length_), work.end(), Complex{});
    fft_->forward(work, scratch);
    for (std::size_t j = 0; j < padded; ++j) work[j] = std::conj(mul(work[j], kernel_hat_[j]));
    fft_->forward(work, scratch);
    for (std::size_t k = 0; k < length_; ++k) data[k] = mul(std::conj(work[k]), chirp_[k]);
  }
  if (sign > 0) {
    for (auto& z : data) z = std::conj(z);
  }
}

void DftPlan::run(std::span<const Complex> in, std::span<Complex> out, int sign, double scale) const {
  if (in.size() != length_ || out.size() != length_) {
    throw std::invalid_argument("DftPlan: buffer length does not match plan length");
  }
  const std::size_t half = length_ / 2;
  // Centered slot i holds index i - half, which sits at standard slot (i - half) mod M.
  // The mapping is a rotation by `half`.
  auto standard = std::span(thread_buffer(0, length_)).first(length_);
  const auto h = static_cast<std::ptrdiff_t>(half);
  std::copy(in.begin() + h, in.end(), standard.begin());
  std::copy(in.begin(), in.begin() + h, standard.end() - h);
  transform_standard(standard, sign);
  const std::size_t tail = length_ - half;
  for (std::size_t j = 0; j < tail; ++j) out[j + half] = standard[j] * scale;
  for (std::size_t j = tail; j < length_; ++j) out[j - tail] = standard[j] * scale;
}

void DftPlan::forward(std::span<const Complex> in, std::span<Complex> out) const {
  run(in, out, -1, 1.0 / static_cast<double>(length_));
}

void DftPlan::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  run(in, out, +1, 1.0);
}

CoefficientVector DftPlan::forward(const SampleVector& samples) const {
  CoefficientVector out(samples.size());
  forward(samples.values(), out.values());
  return out;
}

SampleVector DftPlan::inverse(const CoefficientVector& coeffs) const {
  SampleVector out(coeffs.size());
  inverse(coeffs.values(), out.values());
  return out;
}

BandDftPlan::BandDftPlan(std::size_t length, std::size_t band) : length_(length), band_(band) {
  if (length % 2 == 0) throw std::invalid_argument("BandDftPlan: length must be odd");
  const std::size_t half = length / 2;
  if (band > half) throw std::invalid_argument("BandDftPlan: band exceeds the grid window");
  const std::size_t reach = band + half;  // largest |o - i|
  // The kernel is even in d, so d = +reach and d = -reach may share a slot.
  // The full sample vector still has to fit.
  const std::size_t padded = detail::MixedRadixFft::good_size(std::max(2 * reach, length));
  fft_ = std::make_shared<detail::MixedRadixFft>(padded);

  chirp_.resize(reach + 1);
  const auto two_m = static_cast<unsigned long long>(2 * length);
  for (std::size_t j = 0; j <= reach; ++j) {
    const auto jj = static_cast<unsigned long long>(j);
    const auto r = (jj * jj) % two_m;
    chirp_[j] = std::polar(1.0, std::numbers::pi * static_cast<double>(r) / static_cast<double>(length));
  }
  kernel_hat_.assign(padded, Complex{});
  for (std::size_t d = 0; d <= reach; ++d) {
    kernel_hat_[d % padded] = std::conj(chirp_[d]);
    kernel_hat_[(padded - d) % padded] = std::conj(chirp_[d]);
  }
  std::vector<Complex> scratch(padded);
  fft_->forward(kernel_hat_, scratch);
  const double inv_padded = 1.0 / static_cast<double>(padded);
  for (auto& z : kernel_hat_) z *= inv_padded;
}

void BandDftPlan::chirp_sum(std::span<const Complex> in, std::size_t in_half, std::span<Complex> out,
                            std::size_t out_half) const {
  // i*o = (i^2 + o^2 - (o-i)^2) / 2 turns the sum into a convolution with
  // the chirp. Input slot i + in_half, output slot (o + in_half) mod P.
  const std::size_t padded = fft_->size();
  auto work = std::span(thread_buffer(1, padded)).first(padded);
  auto scratch = std::span(thread_buffer(2, padded)).first(padded);
  const std::size_t in_len = 2 * in_half + 1;
  for (std::size_t s = 0; s < in_len; ++s) {
    const std::size_t j = s >= in_half ? s - in_half : in_half - s;
    work[s] = mul(in[s], chirp_[j]);
  }
  std::fill(work.begin() + static_cast<std::ptrdiff_t>(in_len), work.end(), Complex{});
  fft_->forward(work, scratch);
  for (std::size_t j = 0; j < padded; ++j) work[j] = std::conj(mul(work[j], kernel_hat_[j]));
  fft_->forward(work, scratch);
  const std::size_t out_len = 2 * out_half + 1;
  for (std::size_t s = 0; s < out_len; ++s) {
    // o = s - out_half, slot (o + in_half) mod P
    const std::size_t slot = (s + in_half + padded - out_half) % padded;
    const std::size_t j = s >= out_half ? s - out_half : out_half - s;
    out[s] = mul(std::conj(work[slot]), chirp_[j]);
  }
}

void BandDftPlan::inverse(std::span<const Complex> coeffs, std::span<Complex> samples) const {
  if (coeffs.size() != 2 * band_ + 1 || samples.size() != length_) {
    throw std::invalid_argument("BandDftPlan: buffer lengths do not match the plan");
  }
  chirp_sum(coeffs, band_, samples, length_ / 2);
}

void BandDftPlan::forward(std::span<const Complex> samples, std::span<Complex> coeffs) const {
  if (coeffs.size() != 2 * band_ + 1 || samples.size() != length_) {
    throw std::invalid_argument("BandDftPlan: buffer lengths do not match the plan");
  }
  // The -1 kernel is the conjugate of the +1 kernel on conjugated data.
  auto conj_in = std::span(thread_buffer(0, length_)).first(length_);
  for (std::size_t i = 0; i < length_; ++i) conj_in[i] = std::conj(samples[i]);
  chirp_sum(conj_in, length_ / 2, coeffs, band_);
  const double scale = 1.0 / static_cast<double>(length_);
  for (auto& z : coeffs) z = std::conj(z) * scale;
}

}  // namespace lrnls
