#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace bemspectra {

/// Real number held as mantissa * 2^exponent so that spherical Bessel values
/// deep in the l >> x region stay representable through products.
struct ScaledReal {
  double mantissa = 0.0;
  std::int64_t exponent = 0;

  static ScaledReal from(double v, std::int64_t e = 0);

  ScaledReal normalized() const;
  /// ldexp(mantissa, exponent); may underflow to zero or overflow to inf.
  double to_double() const;
  bool is_zero() const { return mantissa == 0.0; }

  friend ScaledReal operator*(ScaledReal a, ScaledReal b);
  friend ScaledReal operator*(ScaledReal a, double s);
  /// a*2^ea + b*2^eb aligned on the larger exponent.
  friend ScaledReal operator+(ScaledReal a, ScaledReal b);
  friend ScaledReal operator-(ScaledReal a, ScaledReal b);
};

/// Complex value with an exponent factored out: value * exp(log_scale).
struct SpecialFunctionValue {
  std::complex<double> value;
  double log_scale = 0.0;

  /// Throws std::range_error when the product is not representable.
  std::complex<double> reconstruct() const;
};

/// j_l, y_l and their derivatives for l = 0..l_max at a fixed x > 0.
///
/// j_l comes from a downward Miller recurrence started at
/// max(l_max, ceil x) + max(20, ceil(1.5 x)) and normalized against the closed form of
/// whichever of j_0, j_1 is larger in magnitude; y_l from the upward
/// recurrence, which is stable. Both are rescaled by powers of two during the
/// sweep so no intermediate overflows.
class SphericalBesselTable {
 public:
  SphericalBesselTable(int l_max, double x);

  int l_max() const { return l_max_; }
  double x() const { return x_; }

  ScaledReal j(int l) const;
  ScaledReal y(int l) const;
  /// f_l' = f_{l-1} - (l+1)/x f_l with j_{-1} = cos x / x, y_{-1} = sin x / x.
  ScaledReal j_prime(int l) const;
  ScaledReal y_prime(int l) const;

 private:
  ScaledReal j_minus_one() const;
  ScaledReal y_minus_one() const;
  void check(int l) const;

  int l_max_;
  double x_;
  std::vector<ScaledReal> j_;
  std::vector<ScaledReal> y_;
};

double spherical_bessel_j(int l, double x);
double spherical_bessel_y(int l, double x);
std::complex<double> spherical_hankel2(int l, double x);
double spherical_bessel_j_prime(int l, double x);
std::complex<double> spherical_hankel2_prime(int l, double x);

/// h_l^{(2)}(x) with the exponent kept apart, for orders where y_l overflows.
SpecialFunctionValue scaled_hankel2(int l, double x);

/// j_l(x) * h_l^{(2)}(x) through the scaled path; always representable.
std::complex<double> bessel_hankel_product(int l, double x);

/// Fully normalized associated Legendre function
///   Pbar_l^p(z) = sqrt((2l+1)(l-|p|)!/(l+|p|)!) P_l^{|p|}(z),
/// so that the integral of Pbar^2 over [-1, 1] is 2. No Condon-Shortley phase;
/// Pbar_l^{-p} == Pbar_l^{p}.
double normalized_legendre(int l, int p, double z);

/// Pbar_l^m(z) for l = m..l_max written to out[l - m]; out.size() must be
/// l_max - m + 1. Uses the sectoral seed and the l-recurrence with running
/// binary exponent, so large m near the poles underflows gracefully to zero
/// instead of poisoning the recurrence.
void normalized_legendre_column(int m, int l_max, double z, std::span<double> out);

/// Recurrence coefficients for one order m, reused across many z.
class LegendreRecurrence {
 public:
  LegendreRecurrence(int m, int l_max);

  int m() const { return m_; }
  int l_max() const { return l_max_; }
  void column(double z, std::span<double> out) const;

 private:
  int m_;
  int l_max_;
  double sectoral_factor_mantissa_;
  std::int64_t sectoral_factor_exponent_;
  std::vector<double> a_;  // a_[l - m] multiplies z Pbar_{l-1}
  std::vector<double> b_;  // b_[l - m] multiplies Pbar_{l-2}
};

}  // namespace bemspectra
