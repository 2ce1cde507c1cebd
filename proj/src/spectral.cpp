#include "lrnls/spectral.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lrnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t field_length(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("SpectralField: cutoff must be non-negative");
  return 2 * static_cast<std::size_t>(cutoff) + 1;
}

}  // namespace

CutoffMismatch::CutoffMismatch(int lhs, int rhs)
    : std::invalid_argument("incompatible fields: cutoff " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}

SpectralField::SpectralField(int cutoff) : cutoff_(cutoff), coeffs_(field_length(cutoff)) {}

SpectralField::SpectralField(int cutoff, std::vector<Complex> coeffs) : cutoff_(cutoff), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != field_length(cutoff)) {
    throw std::invalid_argument("SpectralField: expected " + std::to_string(field_length(cutoff)) +
                                " coefficients, got " + std::to_string(coeffs_.size()));
  }
}

Complex& SpectralField::at(int k) {
  if (k < -cutoff_ || k > cutoff_) throw std::out_of_range("SpectralField: mode " + std::to_string(k) + " outside S_N");
  return coeffs_[static_cast<std::size_t>(k + cutoff_)];
}

const Complex& SpectralField::at(int k) const {
  if (k < -cutoff_ || k > cutoff_) throw std::out_of_range("SpectralField: mode " + std::to_string(k) + " outside S_N");
  return coeffs_[static_cast<std::size_t>(k + cutoff_)];
}

bool SpectralField::all_finite() const {
  for (const auto& z : coeffs_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& rhs) {
  if (rhs.cutoff_ != cutoff_) throw CutoffMismatch(cutoff_, rhs.cutoff_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& rhs) {
  if (rhs.cutoff_ != cutoff_) throw CutoffMismatch(cutoff_, rhs.cutoff_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(Complex scale) {
  for (auto& z : coeffs_) z *= scale;
  return *this;
}

SpectralField operator+(SpectralField lhs, const SpectralField& rhs) { return lhs += rhs; }
SpectralField operator-(SpectralField lhs, const SpectralField& rhs) { return lhs -= rhs; }
SpectralField operator-(SpectralField f) { return f *= -1.0; }
SpectralField operator*(Complex scale, SpectralField f) { return f *= scale; }
SpectralField operator*(SpectralField f, Complex scale) { return f *= scale; }

SpectralField single_mode(int cutoff, int k, Complex value) {
  SpectralField f(cutoff);
  f.at(k) = value;
  return f;
}

SpectralField constant_field(int cutoff, Complex value) { return single_mode(cutoff, 0, value); }

SpectralField project(const SpectralField& f, int new_cutoff) {
  if (new_cutoff < 0) throw std::invalid_argument("project: cutoff must be non-negative");
  SpectralField out(new_cutoff);
  const int keep = std::min(new_cutoff, f.cutoff());
  for (int k = -keep; k <= keep; ++k) out.at(k) = f.coeff(k);
  return out;
}

Complex zero_mode(const SpectralField& f) { return f.coeff(0); }

SpectralField nonzero_part(const SpectralField& f) {
  SpectralField out = f;
  out.at(0) = 0.0;
  return out;
}

SpectralField inv_derivative(const SpectralField& f) {
  // (ik)^{-1} = -i/k
  return apply_multiplier(f, [](int k) { return k == 0 ? Complex{} : Complex(0.0, -1.0 / k); });
}

SpectralField inv_derivative2(const SpectralField& f) { return inv_derivative(inv_derivative(f)); }

SpectralField derivative(const SpectralField& f) {
  return apply_multiplier(f, [](int k) { return Complex(0.0, k); });
}

SpectralField conjugate(const SpectralField& f) {
  SpectralField out(f.cutoff());
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) out.at(k) = std::conj(f.coeff(-k));
  return out;
}

SpectralField free_propagator(const SpectralField& f, double t) {
  return apply_multiplier(f, [t](int k) { return std::polar(1.0, -t * static_cast<double>(k) * k); });
}

SpectralField twist_propagator(const SpectralField& f, double tau, int lambda, double mass, Complex momentum) {
  const double lam = lambda;
  return apply_multiplier(f, [&](int k) {
    if (k == 0) return std::exp(Complex(0.0, -2.0 * lam * tau * mass));
    const double kk = static_cast<double>(k);
    const Complex exponent = Complex(0.0, tau) * (-2.0 * lam * mass - 2.0 * lam * momentum / Complex(0.0, kk) - kk * kk);
    return std::exp(exponent);
  });
}

double sobolev_norm(const SpectralField& f, SobolevIndex s) {
  double sum = 0.0;
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) {
    const double weight = s.s == 0.0 ? 1.0 : std::pow(1.0 + static_cast<double>(k) * k, s.s);
    sum += weight * std::norm(f.coeff(k));
  }
  return std::sqrt(kTwoPi * sum);
}

Complex mean_of_product(const SpectralField& f, const SpectralField& g) {
  const int n = std::min(f.cutoff(), g.cutoff());
  Complex sum{};
  for (int k = -n; k <= n; ++k) sum += f.coeff(k) * g.coeff(-k);
  return sum;
}

double l2_error(const SpectralField& f, const SpectralField& g) {
  const int n = std::max(f.cutoff(), g.cutoff());
  return sobolev_norm(project(f, n) - project(g, n), SobolevIndex{0.0});
}

GridValues GridValues::conj() const {
  GridValues out = *this;
  for (auto& z : out.values_) z = std::conj(z);
  return out;
}

GridValues& GridValues::operator+=(const GridValues& rhs) {
  if (rhs.cutoff_ != cutoff_) throw CutoffMismatch(cutoff_, rhs.cutoff_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

GridValues& GridValues::operator*=(Complex scale) {
  for (auto& z : values_) z *= scale;
  return *this;
}

GridProduct& GridProduct::operator+=(const GridProduct& rhs) {
  if (rhs.cutoff_ != cutoff_) throw CutoffMismatch(cutoff_, rhs.cutoff_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

GridProduct& GridProduct::operator-=(const GridProduct& rhs) {
  if (rhs.cutoff_ != cutoff_) throw CutoffMismatch(cutoff_, rhs.cutoff_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

GridProduct& GridProduct::operator*=(Complex scale) {
  for (auto& z : values_) z *= scale;
  return *this;
}

ProductGrid::ProductGrid(int cutoff)
    : cutoff_(cutoff), plan_(4 * static_cast<std::size_t>(std::max(cutoff, 0)) + 1, static_cast<std::size_t>(std::max(cutoff, 0))) {
  if (cutoff < 0) throw std::invalid_argument("ProductGrid: cutoff must be non-negative");
}

void ProductGrid::check(int cutoff) const {
  if (cutoff != cutoff_) throw CutoffMismatch(cutoff_, cutoff);
}

GridValues ProductGrid::lift(const SpectralField& f) const {
  check(f.cutoff());
  std::vector<Complex> values(points());
  plan_.inverse(f.coeffs(), values);
  return GridValues(cutoff_, std::move(values));
}

GridProduct ProductGrid::multiply(const GridValues& a, const GridValues& b) const {
  check(a.cutoff());
  check(b.cutoff());
  std::vector<Complex> out(points());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values_[i] * b.values_[i];
  return GridProduct(cutoff_, std::move(out));
}

SpectralField ProductGrid::project(const GridProduct& p) const {
  check(p.cutoff());
  SpectralField out(cutoff_);
  plan_.forward(p.values(), out.coeffs());
  return out;
}

Complex ProductGrid::mean(const GridProduct& p) const {
  check(p.cutoff());
  Complex sum{};
  for (const auto& z : p.values()) sum += z;
  return sum / static_cast<double>(points());
}

SpectralField ProductGrid::product(const SpectralField& f, const SpectralField& g) const {
  return project(multiply(lift(f), lift(g)));
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  if (f.cutoff() != g.cutoff()) throw CutoffMismatch(f.cutoff(), g.cutoff());
  return ProductGrid(f.cutoff()).product(f, g);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_field(std::ostream& out, const SpectralField& f) {
  out << "N " << f.cutoff() << '\n';
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) {
    const Complex z = f.coeff(k);
    out << k << ' ' << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
  }
}

namespace {

double parse_double(const std::string& token) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw std::runtime_error("read_field: bad number '" + token + "'");
  }
  return value;
}

}  // namespace

SpectralField read_field(std::istream& in) {
  std::string tag;
  int cutoff = -1;
  if (!(in >> tag >> cutoff) || tag != "N" || cutoff < 0) {
    throw std::runtime_error("read_field: expected header 'N <cutoff>'");
  }
  SpectralField f(cutoff);
  for (int expected = -cutoff; expected <= cutoff; ++expected) {
    int k = 0;
    std::string re, im;
    if (!(in >> k >> re >> im)) throw std::runtime_error("read_field: truncated mode list");
    if (k != expected) {
      throw std::runtime_error("read_field: expected mode " + std::to_string(expected) + ", got " + std::to_string(k));
    }
    f.at(k) = Complex(parse_double(re), parse_double(im));
  }
  return f;
}

}  // namespace lrnls
