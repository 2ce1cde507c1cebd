#pragma once

// Trigonometric polynomials with modes |k| <= N (the space S_N) and the
// Fourier-multiplier, projection and product operators acting on them.
//
// Conventions: f(x) = sum_k exp(ikx) f_k on the torus (-pi, pi), and
// ||f||_{H^s}^2 = 2 pi sum_k (1 + k^2)^s |f_k|^2.

#include <complex>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrnls/dft.hpp"

namespace lrnls {

// Raised when operands live in spaces with different cutoffs.
class CutoffMismatch : public std::invalid_argument {
 public:
  CutoffMismatch(int lhs, int rhs);
};

class SpectralField {
 public:
  // Zero field in S_N.
  explicit SpectralField(int cutoff);
  // `coeffs` holds k = -N ... N in order; its length must be 2N+1.
  SpectralField(int cutoff, std::vector<Complex> coeffs);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return coeffs_.size(); }

  // Coefficient of mode k; zero for |k| > N.
  Complex coeff(int k) const {
    return (k < -cutoff_ || k > cutoff_) ? Complex{} : coeffs_[static_cast<std::size_t>(k + cutoff_)];
  }
  // Checked access, |k| <= N.
  Complex& at(int k);
  const Complex& at(int k) const;

  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }

  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& rhs);
  SpectralField& operator-=(const SpectralField& rhs);
  SpectralField& operator*=(Complex scale);

  friend bool operator==(const SpectralField&, const SpectralField&) = default;

 private:
  int cutoff_;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField lhs, const SpectralField& rhs);
SpectralField operator-(SpectralField lhs, const SpectralField& rhs);
SpectralField operator-(SpectralField f);
SpectralField operator*(Complex scale, SpectralField f);
SpectralField operator*(SpectralField f, Complex scale);

// Field with the single mode `value * exp(i k x)` in S_N.
SpectralField single_mode(int cutoff, int k, Complex value);
// Constant field in S_N.
SpectralField constant_field(int cutoff, Complex value);

// Mode-wise multiplier: result_k = sigma(k) * f_k.
template <typename Sigma>
SpectralField apply_multiplier(const SpectralField& f, Sigma&& sigma) {
  SpectralField out(f.cutoff());
  const int n = f.cutoff();
  const auto in = f.coeffs();
  auto dst = out.coeffs();
  for (int k = -n; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k + n);
    dst[i] = sigma(k) * in[i];
  }
  return out;
}

// Keeps modes |k| <= min(M, N) and represents the result in S_M, so M >= N
// zero-pads and M < N truncates.
SpectralField project(const SpectralField& f, int new_cutoff);

// Mean value (mode 0).
Complex zero_mode(const SpectralField& f);
// f with its mean removed.
SpectralField nonzero_part(const SpectralField& f);
// Antiderivative with zero mean: (ik)^{-1} f_k for k != 0, 0 at k = 0.
SpectralField inv_derivative(const SpectralField& f);
// (ik)^{-2} f_k on k != 0; the composition of inv_derivative with itself.
SpectralField inv_derivative2(const SpectralField& f);
SpectralField derivative(const SpectralField& f);
// Coefficients of the complex conjugate function: conj(f_{-k}).
SpectralField conjugate(const SpectralField& f);

// exp(i t d_xx): multiplies mode k by exp(-i t k^2).
SpectralField free_propagator(const SpectralField& f, double t);

// exp(i tau (-2 lambda P d_x^{-1} - 2 lambda M + d_xx)) for the frozen mass M
// and momentum P. The exponent is purely imaginary when P is.
SpectralField twist_propagator(const SpectralField& f, double tau, int lambda, double mass, Complex momentum);

struct SobolevIndex {
  double s = 0.0;
};

// sqrt(2 pi sum_k (1+k^2)^s |f_k|^2).
double sobolev_norm(const SpectralField& f, SobolevIndex s);
// Pi_0(f g) = sum_k f_k g_{-k}, exact for any cutoffs.
Complex mean_of_product(const SpectralField& f, const SpectralField& g);

// L^2 distance; the operand with the smaller cutoff is zero-extended.
double l2_error(const SpectralField& f, const SpectralField& g);

class ProductGrid;

// Point values of a field of S_N on the (4N+1)-point grid. Only linear
// combinations and conjugation are available, so these remain exact samples
// of an element of S_N.
class GridValues {
 public:
  int cutoff() const { return cutoff_; }
  std::span<const Complex> values() const { return values_; }

  GridValues conj() const;
  GridValues& operator+=(const GridValues& rhs);
  GridValues& operator*=(Complex scale);
  friend GridValues operator+(GridValues lhs, const GridValues& rhs) { return lhs += rhs; }
  friend GridValues operator*(Complex scale, GridValues v) { return v *= scale; }

 private:
  friend class ProductGrid;
  GridValues(int cutoff, std::vector<Complex> values) : cutoff_(cutoff), values_(std::move(values)) {}
  int cutoff_;
  std::vector<Complex> values_;
};

// Point values of a product of two elements of S_N (a member of S_{2N}),
// exactly representable on the grid. Closed under linear combination but
// not under further multiplication.
class GridProduct {
 public:
  int cutoff() const { return cutoff_; }
  std::span<const Complex> values() const { return values_; }

  GridProduct& operator+=(const GridProduct& rhs);
  GridProduct& operator-=(const GridProduct& rhs);
  GridProduct& operator*=(Complex scale);
  friend GridProduct operator+(GridProduct lhs, const GridProduct& rhs) { return lhs += rhs; }
  friend GridProduct operator-(GridProduct lhs, const GridProduct& rhs) { return lhs -= rhs; }
  friend GridProduct operator*(Complex scale, GridProduct p) { return p *= scale; }

 private:
  friend class ProductGrid;
  GridProduct(int cutoff, std::vector<Complex> values) : cutoff_(cutoff), values_(std::move(values)) {}
  int cutoff_;
  std::vector<Complex> values_;
};

// The (4N+1)-point transform used to form the exact truncated products
// Pi_N(f g) of fields f, g in S_N.
class ProductGrid {
 public:
  explicit ProductGrid(int cutoff);

  int cutoff() const { return cutoff_; }
  std::size_t points() const { return plan_.length(); }

  GridValues lift(const SpectralField& f) const;
  GridProduct multiply(const GridValues& a, const GridValues& b) const;
  // Pi_N of the product, back in S_N.
  SpectralField project(const GridProduct& p) const;
  // Pi_0 of the product.
  Complex mean(const GridProduct& p) const;

  // Pi_N(f g).
  SpectralField product(const SpectralField& f, const SpectralField& g) const;

 private:
  void check(int cutoff) const;
  int cutoff_;
  BandDftPlan plan_;
};

// Pi_N(f g) for f, g in the same S_N. Builds a transform plan per call; use
// ProductGrid for repeated products.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

// Text format: header `N <cutoff>` followed by one `k re im` line per mode,
// k ascending, floats in shortest round-trip form.
void write_field(std::ostream& out, const SpectralField& f);
SpectralField read_field(std::istream& in);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace lrnls
