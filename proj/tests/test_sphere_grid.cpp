#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "bemspectra/moment_table.hpp"
#include "bemspectra/specfun.hpp"
#include "bemspectra/sphere_grid.hpp"

using namespace bemspectra;

namespace {

BasisFamily family(BasisKind kind, int V) {
  BasisFamily f;
  f.kind = kind;
  f.grid = SphereGrid(V);
  return f;
}

double tanh_sinh_moment(const BasisFamily& f, int l, int m, int n) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const std::vector<double> br = f.z_breakpoints();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double hi = br[i], lo = br[i + 1];
    if (hi <= lo) continue;
    total += ts.integrate([&](double z) { return normalized_legendre(l, m, z) * f.z_factor(n, z); }, lo, hi, 1e-15);
  }
  return total * f.normalization_constant;
}

}  // namespace

TEST_CASE("grid rejects even or small V") {
  CHECK_THROWS_AS(SphereGrid(4), std::invalid_argument);
  CHECK_THROWS_AS(SphereGrid(1), std::invalid_argument);
  CHECK_NOTHROW(SphereGrid(3));
}

TEST_CASE("grid geometry") {
  const SphereGrid g(7);
  CHECK(g.z_node(0) == 1.0);
  CHECK(g.z_node(7) == -1.0);
  CHECK(g.z_midpoint(3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.cell_area() * 49 == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(g.phi_node(2) == doctest::Approx(4.0 * std::numbers::pi / 7));
}

TEST_CASE("basis factors form a partition of unity") {
  for (const BasisKind kind : {BasisKind::Patch, BasisKind::Pyramid}) {
    const BasisFamily f = family(kind, 7);
    for (double z = -1.0; z <= 1.0; z += 0.0371) {
      double s = 0.0;
      for (int n = 0; n < 7; ++n) s += f.z_factor(n, z);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (double phi = 0.013; phi < 2.0 * std::numbers::pi; phi += 0.0913) {
      double s = 0.0;
      for (int m = 0; m < 7; ++m) s += f.phi_factor(m, phi);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("fourier coefficient matches quadrature and vanishes at multiples of M") {
  const int M = 9;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const BasisKind kind : {BasisKind::Patch, BasisKind::Pyramid}) {
    const BasisFamily f = family(kind, M);
    const double h = f.grid.h_phi();
    for (const int p : {0, 1, 4, 7, 13}) {
      // factor 0 is even about 0, so the integral is real
      const double lo = -h, hi = h;
      double q = 0.0;
      const double mid = kind == BasisKind::Patch ? h / 2 : 0.0;
      auto integrand = [&](double phi) { return f.phi_factor(0, phi) * std::cos(p * phi); };
      if (kind == BasisKind::Patch) {
        q = ts.integrate(integrand, -mid, mid);
      } else {
        q = ts.integrate(integrand, lo, 0.0) + ts.integrate(integrand, 0.0, hi);
      }
      CHECK(fourier_coefficient(kind, p, M) == doctest::Approx(q / h).epsilon(1e-12));
    }
    CHECK(fourier_coefficient(kind, 0, M) == 1.0);
    CHECK(fourier_coefficient(kind, M, M) == 0.0);
    CHECK(fourier_coefficient(kind, -2 * M, M) == 0.0);
  }
}

TEST_CASE("DFT eigenvector matrix is unitary") {
  for (const int M : {3, 9, 21}) {
    const Eigen::MatrixXcd F = dft_eigenvector_matrix(M);
    const Eigen::MatrixXcd D = F.adjoint() * F - Eigen::MatrixXcd::Identity(M, M);
    CHECK(D.cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("spectral permutation is a bijection and groups blocks") {
  const int M = 5, N = 3;
  const std::vector<int> perm = spectral_permutation(M, N);
  CHECK(std::set<int>(perm.begin(), perm.end()).size() == static_cast<std::size_t>(M * N));
  Eigen::MatrixXcd X(M * N, M * N);
  for (int a = 0; a < M * N; ++a)
    for (int b = 0; b < M * N; ++b) X(a, b) = {static_cast<double>(a), static_cast<double>(b)};
  const Eigen::MatrixXcd Y = apply_spectral_permutation(X, M, N);
  for (int a = 0; a < M * N; ++a)
    for (int b = 0; b < M * N; ++b) CHECK(Y(perm[a], perm[b]) == X(a, b));
}

TEST_CASE("l = 0 moments are c * 2 / V for both bases") {
  for (const BasisKind kind : {BasisKind::Patch, BasisKind::Pyramid}) {
    const BasisFamily f = family(kind, 9);
    const LegendreMomentTable t(f, 0, 4);
    for (int n = 0; n < 9; ++n) CHECK(t(0, n) == doctest::Approx(kCalibratedNormalization * 2.0 / 9).epsilon(1e-14));
  }
}

TEST_CASE("moment tables against tanh-sinh quadrature") {
  for (const BasisKind kind : {BasisKind::Patch, BasisKind::Pyramid}) {
    const BasisFamily f = family(kind, 7);
    for (const int m : {0, 1, 4}) {
      const LegendreMomentTable t(f, m, 40);
      for (const int l : {m, m + 3, 17, 40}) {
        for (const int n : {0, 2, 6}) {
          CAPTURE(m);
          CAPTURE(l);
          CAPTURE(n);
          CHECK(std::abs(t(l, n) - tanh_sinh_moment(f, l, m, n)) < 1e-12);
        }
      }
      const MomentVector v = legendre_moment_vector(17, m, f);
      for (int n = 0; n < 7; ++n) CHECK(std::abs(v.entries[n] - t(17, n)) < 1e-14);
    }
  }
}

TEST_CASE("moment vectors vanish for |p| > l and ignore the sign of p") {
  const BasisFamily f = family(BasisKind::Pyramid, 5);
  for (const double e : legendre_moment_vector(2, 3, f).entries) CHECK(e == 0.0);
  const MomentVector a = legendre_moment_vector(6, 2, f), b = legendre_moment_vector(6, -2, f);
  CHECK(a.entries == b.entries);
}

TEST_CASE("serial and parallel moment caches agree bitwise") {
  const BasisFamily f = family(BasisKind::Pyramid, 11);
  const std::vector<int> orders{0, 1, 2, 5, 11, 16};
  const MomentCache a(f, 80, orders, Execution::Serial), b(f, 80, orders, Execution::Parallel);
  for (const int m : orders) {
    for (int l = m; l <= 80; ++l)
      for (int n = 0; n < 11; ++n) CHECK((*a.find(m))(l, n) == (*b.find(m))(l, n));
  }
  CHECK(a.find(3) == nullptr);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const GaussRule r = gauss_legendre(10);
  for (int k = 0; k <= 19; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    const double exact = k % 2 == 0 ? 2.0 / (k + 1) : 0.0;
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

TEST_CASE("basis kind names") {
  CHECK(parse_basis_kind("patch") == BasisKind::Patch);
  CHECK(parse_basis_kind(to_string(BasisKind::Pyramid)) == BasisKind::Pyramid);
  CHECK_THROWS(parse_basis_kind("spline"));
}
