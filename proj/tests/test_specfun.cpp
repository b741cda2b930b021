#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bemspectra/specfun.hpp"
#include "bemspectra/sphere_grid.hpp"
#include "oracle/mp_oracles.hpp"

using namespace bemspectra;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("j_l and y_l against the 400-digit Rayleigh sum") {
  for (const double x : {0.1, 1.0, 10.0, 100.0}) {
    for (const int l : {0, 1, 2, 5, 10, 20, 35, 50}) {
      CAPTURE(x);
      CAPTURE(l);
      const double j_ref = static_cast<double>(oracle::bessel_j(l, x));
      const double y_ref = static_cast<double>(oracle::bessel_y(l, x));
      if (j_ref != 0.0 && std::isnormal(j_ref)) CHECK(rel(spherical_bessel_j(l, x), j_ref) < 1e-12);
      if (std::isfinite(y_ref)) CHECK(rel(spherical_bessel_y(l, x), y_ref) < 1e-12);
    }
  }
}

TEST_CASE("scaled j_l deep below the turning point keeps its digits") {
  const SphericalBesselTable t(120, 0.1);
  const auto ref = oracle::bessel_j_series(120, 0.1);
  int e = 0;
  const double mant = static_cast<double>(boost::multiprecision::frexp(ref, &e));
  const ScaledReal v = t.j(120).normalized();
  const double got = std::ldexp(v.mantissa, static_cast<int>(v.exponent - e));
  CHECK(std::abs(got - mant) / std::abs(mant) < 1e-12);
}

TEST_CASE("Rayleigh and ascending-series oracles agree where both are exact") {
  for (const int l : {3, 12, 30}) {
    const auto a = oracle::bessel_j(l, 0.9), b = oracle::bessel_j_series(l, 0.9);
    CHECK(static_cast<double>(abs(a - b) / abs(b)) < 1e-30);
  }
}

TEST_CASE("closed forms at l = 0") {
  for (const double x : {0.3, 2.0, 17.5}) {
    CHECK(rel(spherical_bessel_j(0, x), std::sin(x) / x) < 1e-14);
    CHECK(rel(spherical_bessel_y(0, x), -std::cos(x) / x) < 1e-14);
    const std::complex<double> h = spherical_hankel2(0, x);
    const std::complex<double> ref = std::complex<double>(0.0, 1.0) * std::polar(1.0, -x) / x;
    CHECK(std::abs(h - ref) < 1e-14 * std::abs(ref));
  }
}

TEST_CASE("Wronskian j y' - j' y = 1/x^2 for l <= 200") {
  for (const double x : {0.1, 1.0, 10.0, 100.0}) {
    const SphericalBesselTable t(200, x);
    double worst = 0.0;
    for (int l = 0; l <= 200; ++l) {
      const ScaledReal w = t.j(l) * t.y_prime(l) - t.j_prime(l) * t.y(l);
      worst = std::max(worst, std::abs(w.to_double() * x * x - 1.0));
    }
    CAPTURE(x);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("derivatives against the oracle recurrence") {
  for (const double x : {0.7, 8.0, 40.0}) {
    for (const int l : {1, 4, 15, 30}) {
      const auto jl = oracle::bessel_j(l, x), jm = oracle::bessel_j(l - 1, x);
      const double ref = static_cast<double>(jm - (l + 1) * jl / x);
      CHECK(rel(spherical_bessel_j_prime(l, x), ref) < 1e-11);
    }
  }
}

TEST_CASE("overflow and domain errors are explicit") {
  CHECK_THROWS_AS(spherical_bessel_y(200, 0.1), std::range_error);
  CHECK_THROWS_AS(spherical_hankel2(200, 0.1), std::range_error);
  CHECK_THROWS_AS(spherical_bessel_j(2, 0.0), std::domain_error);
  CHECK_THROWS_AS(spherical_bessel_j(2, -1.0), std::domain_error);
  CHECK_THROWS_AS(spherical_bessel_j(-1, 1.0), std::domain_error);
  CHECK_THROWS_AS(scaled_hankel2(200, 0.1).reconstruct(), std::range_error);
}

TEST_CASE("j h product stays representable where each factor is not") {
  const std::complex<double> p = bessel_hankel_product(200, 0.1);
  CHECK(std::isfinite(p.real()));
  CHECK(std::isfinite(p.imag()));
  // j_l y_l -> -1/((2l+1) x) as l/x grows
  CHECK(std::abs(p.imag() * (2 * 200 + 1) * 0.1 - 1.0) < 1e-3);
  const SpecialFunctionValue h = scaled_hankel2(200, 0.1);
  CHECK(std::isfinite(h.log_scale));
  CHECK(std::isfinite(std::abs(h.value)));
}

TEST_CASE("Hankel derivative matches the recurrence at moderate order") {
  const double x = 3.0;
  const auto a = oracle::hankel2(6, x), b = oracle::hankel2(5, x);
  const std::complex<double> ref(static_cast<double>(b.first - 7 * a.first / x),
                                 static_cast<double>(b.second - 7 * a.second / x));
  CHECK(std::abs(spherical_hankel2_prime(6, x) - ref) < 1e-12 * std::abs(ref));
}

TEST_CASE("normalized Legendre against the explicit polynomial") {
  for (const double z : {-0.93, -0.2, 0.0, 0.41, 0.999}) {
    for (const int l : {0, 1, 3, 10, 25, 40}) {
      for (const int m : {0, 1, 2, 7, 20}) {
        if (m > l) continue;
        const double ref = static_cast<double>(oracle::legendre_normalized(l, m, z));
        CAPTURE(z);
        CAPTURE(l);
        CAPTURE(m);
        CHECK(std::abs(normalized_legendre(l, m, z) - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("negative order equals positive order; |p| > l is rejected") {
  for (const double z : {-0.5, 0.3, 0.8}) {
    CHECK(normalized_legendre(9, -4, z) == normalized_legendre(9, 4, z));
    CHECK_THROWS_AS(normalized_legendre(3, 5, z), std::domain_error);
  }
  CHECK_THROWS_AS(normalized_legendre(3, 1, 1.5), std::domain_error);
}

TEST_CASE("orthogonality of Pbar_l^p for l, l' <= 60") {
  const GaussRule g = gauss_legendre(96);
  double worst = 0.0;
  for (const int m : {0, 1, 2, 5, 13, 30, 60}) {
    const int count = 60 - m + 1;
    std::vector<std::vector<double>> cols(g.nodes.size(), std::vector<double>(count));
    for (std::size_t q = 0; q < g.nodes.size(); ++q) normalized_legendre_column(m, 60, g.nodes[q], cols[q]);
    for (int a = 0; a < count; ++a) {
      for (int b = a; b < count; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * cols[q][a] * cols[q][b];
        worst = std::max(worst, std::abs(s - (a == b ? 2.0 : 0.0)));
      }
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("high order columns underflow gracefully and keep their norm") {
  const int m = 500, L = 1000;
  const GaussRule g = gauss_legendre(1100);
  std::vector<double> col(L - m + 1);
  double norm_last = 0.0, norm_first = 0.0;
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    normalized_legendre_column(m, L, g.nodes[q], col);
    for (const double v : col) REQUIRE(std::isfinite(v));
    norm_first += g.weights[q] * col.front() * col.front();
    norm_last += g.weights[q] * col.back() * col.back();
  }
  CHECK(std::abs(norm_first - 2.0) < 1e-10);
  CHECK(std::abs(norm_last - 2.0) < 1e-10);
  normalized_legendre_column(m, L, 0.99999, col);
  CHECK(col.front() == 0.0);
}

TEST_CASE("scaled real arithmetic") {
  const ScaledReal a = ScaledReal::from(3.0, 2000);
  const ScaledReal b = ScaledReal::from(0.5, -2000);
  CHECK((a * b).to_double() == doctest::Approx(1.5));
  CHECK(std::isinf(a.to_double()));
  CHECK((a - a).is_zero());
  CHECK((ScaledReal::from(1.0) + ScaledReal::from(1.0, -60)).to_double() == doctest::Approx(1.0 + std::ldexp(1.0, -60)));
}
