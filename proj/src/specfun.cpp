#include "bemspectra/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bemspectra {

namespace {

constexpr int kRescaleBits = 600;
const double kRescaleUp = std::ldexp(1.0, kRescaleBits);
const double kRescaleDown = std::ldexp(1.0, -kRescaleBits);

constexpr int kLegendreBits = 256;
const double kLegendreHigh = std::ldexp(1.0, kLegendreBits);
const double kLegendreLow = std::ldexp(1.0, -kLegendreBits);

void require_positive_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("spherical Bessel argument must be finite and > 0, got " +
                            std::to_string(x));
  }
}

void require_order(int l) {
  if (l < 0) throw std::domain_error("spherical Bessel order must be >= 0");
}

// fs^m * 2^(es*m) by binary exponentiation with renormalization.
ScaledReal scaled_power(double base, int m) {
  if (m == 0) return ScaledReal::from(1.0);
  if (base == 0.0) return ScaledReal{};
  int eb = 0;
  const double fb = std::frexp(base, &eb);
  ScaledReal result = ScaledReal::from(1.0);
  ScaledReal sq{fb, eb};
  int k = m;
  while (k > 0) {
    if (k & 1) result = result * sq;
    sq = sq * sq;
    k >>= 1;
  }
  return result;
}

}  // namespace

ScaledReal ScaledReal::from(double v, std::int64_t e) {
  return ScaledReal{v, e}.normalized();
}

ScaledReal ScaledReal::normalized() const {
  if (mantissa == 0.0 || !std::isfinite(mantissa)) return {mantissa, mantissa == 0.0 ? 0 : exponent};
  int e = 0;
  const double m = std::frexp(mantissa, &e);
  return {m, exponent + e};
}

double ScaledReal::to_double() const {
  if (mantissa == 0.0) return 0.0;
  constexpr std::int64_t kMax = 4096;
  if (exponent > kMax) return std::copysign(std::numeric_limits<double>::infinity(), mantissa);
  if (exponent < -kMax) return std::copysign(0.0, mantissa);
  return std::ldexp(mantissa, static_cast<int>(exponent));
}

ScaledReal operator*(ScaledReal a, ScaledReal b) {
  return ScaledReal{a.mantissa * b.mantissa, a.exponent + b.exponent}.normalized();
}

ScaledReal operator*(ScaledReal a, double s) { return ScaledReal{a.mantissa * s, a.exponent}.normalized(); }

ScaledReal operator+(ScaledReal a, ScaledReal b) {
  if (a.is_zero()) return b.normalized();
  if (b.is_zero()) return a.normalized();
  const std::int64_t e = std::max(a.exponent, b.exponent);
  const auto shift = [e](const ScaledReal& v) {
    const std::int64_t d = v.exponent - e;
    return d < -2000 ? 0.0 : std::ldexp(v.mantissa, static_cast<int>(d));
  };
  return ScaledReal{shift(a) + shift(b), e}.normalized();
}

ScaledReal operator-(ScaledReal a, ScaledReal b) { return a + ScaledReal{-b.mantissa, b.exponent}; }

std::complex<double> SpecialFunctionValue::reconstruct() const {
  const double s = std::exp(log_scale);
  const std::complex<double> v = value * s;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw std::range_error("special function value is not representable as a double");
  }
  return v;
}

SphericalBesselTable::SphericalBesselTable(int l_max, double x) : l_max_(l_max), x_(x) {
  require_order(l_max);
  require_positive_argument(x);

  const int n = std::max(l_max, 1);
  j_.resize(static_cast<std::size_t>(n) + 1);
  y_.resize(static_cast<std::size_t>(n) + 1);

  const double s = std::sin(x);
  const double c = std::cos(x);

  // Downward Miller sweep; stored_[l] * 2^(600 k_[l]) is proportional to j_l.
  const int start = std::max(n, static_cast<int>(std::ceil(x))) + std::max(20, static_cast<int>(std::ceil(1.5 * x)));
  std::vector<double> stored(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<std::int64_t> k_of(static_cast<std::size_t>(n) + 1, 0);
  double next = 0.0;
  double cur = 1.0;
  std::int64_t k = 0;
  for (int l = start; l >= 1; --l) {
    if (l <= n) {
      stored[l] = cur;
      k_of[l] = k;
    }
    double prev = (2.0 * l + 1.0) / x * cur - next;
    if (std::abs(prev) > kRescaleUp) {
      prev *= kRescaleDown;
      cur *= kRescaleDown;
      ++k;
    }
    next = cur;
    cur = prev;
  }
  stored[0] = cur;
  k_of[0] = k;

  const double j0 = s / x;
  const double j1 = s / (x * x) - c / x;
  const int ref = std::abs(j0) >= std::abs(j1) ? 0 : 1;
  const double j_ref = ref == 0 ? j0 : j1;
  // Kept as mantissa and exponent: stored[l] * (j_ref / stored[ref]) can
  // underflow a double even when the scaled result is representable.
  const ScaledReal sref = ScaledReal::from(stored[ref]).normalized();
  const ScaledReal scale{j_ref / sref.mantissa, -sref.exponent};
  for (int l = 0; l <= n; ++l) {
    if (l == ref) {
      j_[l] = ScaledReal::from(j_ref);
    } else {
      const ScaledReal v = ScaledReal::from(stored[l]) * scale;
      j_[l] = ScaledReal{v.mantissa, v.exponent + kRescaleBits * (k_of[l] - k_of[ref])}.normalized();
    }
  }

  // Upward sweep for y_l.
  double ym = -c / x;
  double yc = -c / (x * x) - s / x;
  std::int64_t ky = 0;
  y_[0] = ScaledReal::from(ym);
  y_[1] = ScaledReal::from(yc);
  for (int l = 1; l < n; ++l) {
    double yn = (2.0 * l + 1.0) / x * yc - ym;
    if (std::abs(yn) > kRescaleUp) {
      yn *= kRescaleDown;
      yc *= kRescaleDown;
      ++ky;
    }
    ym = yc;
    yc = yn;
    y_[l + 1] = ScaledReal::from(yc, kRescaleBits * ky);
  }
}

void SphericalBesselTable::check(int l) const {
  if (l < 0 || l > l_max_) throw std::out_of_range("spherical Bessel order outside table");
}

ScaledReal SphericalBesselTable::j(int l) const {
  check(l);
  return j_[l];
}

ScaledReal SphericalBesselTable::y(int l) const {
  check(l);
  return y_[l];
}

ScaledReal SphericalBesselTable::j_minus_one() const { return ScaledReal::from(std::cos(x_) / x_); }
ScaledReal SphericalBesselTable::y_minus_one() const { return ScaledReal::from(std::sin(x_) / x_); }

ScaledReal SphericalBesselTable::j_prime(int l) const {
  check(l);
  const ScaledReal lower = l == 0 ? j_minus_one() : j_[l - 1];
  return lower - j_[l] * ((l + 1.0) / x_);
}

ScaledReal SphericalBesselTable::y_prime(int l) const {
  check(l);
  const ScaledReal lower = l == 0 ? y_minus_one() : y_[l - 1];
  return lower - y_[l] * ((l + 1.0) / x_);
}

double spherical_bessel_j(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  return SphericalBesselTable(l, x).j(l).to_double();
}

double spherical_bessel_y(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  const double v = SphericalBesselTable(l, x).y(l).to_double();
  if (!std::isfinite(v)) throw std::range_error("y_l(x) overflows a double");
  return v;
}

std::complex<double> spherical_hankel2(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  const SphericalBesselTable t(l, x);
  const double im = -t.y(l).to_double();
  if (!std::isfinite(im)) throw std::range_error("h_l^(2)(x) overflows a double");
  return {t.j(l).to_double(), im};
}

double spherical_bessel_j_prime(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  return SphericalBesselTable(l, x).j_prime(l).to_double();
}

std::complex<double> spherical_hankel2_prime(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  const SphericalBesselTable t(l, x);
  const ScaledReal jp = t.j_prime(l);
  const ScaledReal yp = t.y_prime(l);
  const double re = jp.to_double();
  const double im = -yp.to_double();
  if (!std::isfinite(im)) throw std::range_error("h_l^(2)'(x) overflows a double");
  return {re, im};
}

SpecialFunctionValue scaled_hankel2(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  const SphericalBesselTable t(l, x);
  const ScaledReal jv = t.j(l);
  const ScaledReal yv = t.y(l);
  // Factor out the exponent of y, which dominates |h| whenever scaling matters.
  const std::int64_t e = yv.exponent;
  const auto rel = [e](const ScaledReal& v) {
    const std::int64_t d = v.exponent - e;
    return d < -2000 ? 0.0 : std::ldexp(v.mantissa, static_cast<int>(d));
  };
  return {{rel(jv), -rel(yv)}, static_cast<double>(e) * std::numbers::ln2};
}

std::complex<double> bessel_hankel_product(int l, double x) {
  require_order(l);
  require_positive_argument(x);
  const SphericalBesselTable t(l, x);
  const ScaledReal jv = t.j(l);
  return {(jv * jv).to_double(), -(jv * t.y(l)).to_double()};
}

LegendreRecurrence::LegendreRecurrence(int m, int l_max) : m_(m), l_max_(l_max) {
  if (m < 0 || l_max < m) throw std::domain_error("Legendre recurrence needs 0 <= m <= l_max");
  ScaledReal f = ScaledReal::from(std::sqrt(2.0 * m + 1.0));
  for (int i = 1; i <= m; ++i) f = f * std::sqrt((2.0 * i - 1.0) / (2.0 * i));
  sectoral_factor_mantissa_ = f.mantissa;
  sectoral_factor_exponent_ = f.exponent;

  const auto n = static_cast<std::size_t>(l_max - m + 1);
  a_.assign(n, 0.0);
  b_.assign(n, 0.0);
  if (n > 1) a_[1] = std::sqrt(2.0 * m + 3.0);
  for (int l = m + 2; l <= l_max; ++l) {
    const double ll = static_cast<double>(l);
    const double mm = static_cast<double>(m);
    const double denom = ll * ll - mm * mm;
    a_[l - m] = std::sqrt((4.0 * ll * ll - 1.0) / denom);
    b_[l - m] = std::sqrt((2.0 * ll + 1.0) * (ll - 1.0 - mm) * (ll - 1.0 + mm) / ((2.0 * ll - 3.0) * denom));
  }
}

void LegendreRecurrence::column(double z, std::span<double> out) const {
  if (out.size() != static_cast<std::size_t>(l_max_ - m_ + 1)) {
    throw std::invalid_argument("Legendre column buffer has wrong size");
  }
  if (!(std::abs(z) <= 1.0)) throw std::domain_error("Legendre argument must satisfy |z| <= 1");

  const double s2 = (1.0 - z) * (1.0 + z);
  if (m_ > 0 && s2 <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const ScaledReal sect =
      ScaledReal{sectoral_factor_mantissa_, sectoral_factor_exponent_} * scaled_power(std::sqrt(s2), m_);

  double p0 = sect.mantissa;
  std::int64_t e = sect.exponent;
  const auto emit = [&e](double v) {
    return e < -2100 ? 0.0 : std::ldexp(v, static_cast<int>(e));
  };
  out[0] = emit(p0);
  if (l_max_ == m_) return;
  double p1 = a_[1] * z * p0;
  out[1] = emit(p1);
  for (int l = m_ + 2; l <= l_max_; ++l) {
    double p2 = a_[l - m_] * z * p1 - b_[l - m_] * p0;
    if (std::abs(p2) > kLegendreHigh) {
      p2 *= kLegendreLow;
      p1 *= kLegendreLow;
      e += kLegendreBits;
    }
    p0 = p1;
    p1 = p2;
    out[l - m_] = emit(p2);
  }
}

void normalized_legendre_column(int m, int l_max, double z, std::span<double> out) {
  LegendreRecurrence(m, l_max).column(z, out);
}

double normalized_legendre(int l, int p, double z) {
  const int m = std::abs(p);
  if (l < 0 || m > l) throw std::domain_error("normalized_legendre needs |p| <= l");
  if (!(std::abs(z) <= 1.0)) throw std::domain_error("normalized_legendre needs |z| <= 1");
  std::vector<double> col(static_cast<std::size_t>(l - m + 1));
  normalized_legendre_column(m, l, z, col);
  return col.back();
}

}  // namespace bemspectra
