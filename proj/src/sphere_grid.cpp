#include "bemspectra/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bemspectra/moment_table.hpp"

namespace bemspectra {

namespace {

constexpr double kPi = std::numbers::pi;

// phi - centre wrapped into [-pi, pi).
double wrapped_offset(double phi, double centre) {
  double d = std::fmod(phi - centre + kPi, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return d - kPi;
}

}  // namespace

SphereGrid::SphereGrid(int V) : V_(V) {
  if (V < 3 || V % 2 == 0) throw std::invalid_argument("grid size V must be odd and >= 3, got " + std::to_string(V));
}

double SphereGrid::phi_node(int mu) const { return static_cast<double>(mu) * h_phi(); }

double SphereGrid::z_node(int nu) const {
  if (nu < 0 || nu > V_) throw std::out_of_range("z node index out of range");
  return static_cast<double>(V_ - 2 * nu) / V_;
}

double SphereGrid::z_midpoint(int n) const {
  if (n < 0 || n >= V_) throw std::out_of_range("z cell index out of range");
  return static_cast<double>(V_ - 2 * n - 1) / V_;
}

std::string_view to_string(BasisKind kind) { return kind == BasisKind::Patch ? "patch" : "pyramid"; }

BasisKind parse_basis_kind(std::string_view text) {
  if (text == "patch" || text == "pi") return BasisKind::Patch;
  if (text == "pyramid" || text == "lambda") return BasisKind::Pyramid;
  throw std::invalid_argument("unknown basis kind: " + std::string(text));
}

double BasisFamily::phi_factor(int m, double phi) const {
  const double h = grid.h_phi();
  const double d = wrapped_offset(phi, grid.phi_node(m));
  if (kind == BasisKind::Patch) return (d >= -0.5 * h && d < 0.5 * h) ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - std::abs(d) / h);
}

double BasisFamily::z_factor(int n, double z) const {
  const int V = grid.V();
  if (n < 0 || n >= V) throw std::out_of_range("z basis index out of range");
  if (kind == BasisKind::Patch) {
    const double top = grid.z_node(n);
    const double bottom = grid.z_node(n + 1);
    if (n == V - 1) return (z >= bottom && z <= top) ? 1.0 : 0.0;
    return (z > bottom && z <= top) ? 1.0 : 0.0;
  }
  const double c = grid.z_midpoint(n);
  if (n == 0 && z >= c) return 1.0;
  if (n == V - 1 && z <= c) return 1.0;
  return std::max(0.0, 1.0 - std::abs(z - c) / grid.h_z());
}

std::vector<double> BasisFamily::z_breakpoints() const {
  const int V = grid.V();
  std::vector<double> bp;
  if (kind == BasisKind::Patch) {
    for (int nu = 0; nu <= V; ++nu) bp.push_back(grid.z_node(nu));
  } else {
    bp.push_back(1.0);
    for (int n = 0; n < V; ++n) bp.push_back(grid.z_midpoint(n));
    bp.push_back(-1.0);
  }
  return bp;
}

std::vector<double> BasisFamily::phi_breakpoints(int m) const {
  const double c = grid.phi_node(m);
  const double h = grid.h_phi();
  if (kind == BasisKind::Patch) return {c - 0.5 * h, c + 0.5 * h};
  return {c - h, c, c + h};
}

double fourier_coefficient(BasisKind kind, int p, int M) {
  if (M <= 0) throw std::invalid_argument("Fourier coefficient needs M > 0");
  if (p % M == 0) return p == 0 ? 1.0 : 0.0;
  const double x = kPi * static_cast<double>(p) / M;
  const double sinc = std::sin(x) / x;
  return kind == BasisKind::Patch ? sinc : sinc * sinc;
}

MomentVector legendre_moment_vector(int l, int p, const BasisFamily& family) {
  MomentVector v;
  v.l = l;
  v.p = p;
  v.entries.assign(static_cast<std::size_t>(family.grid.N()), 0.0);
  const int m = std::abs(p);
  if (l < 0) throw std::domain_error("moment vector needs l >= 0");
  if (m > l) return v;
  const LegendreMomentTable table(family, m, l);
  for (int n = 0; n < family.grid.N(); ++n) v.entries[n] = table(l, n);
  return v;
}

Eigen::MatrixXcd dft_eigenvector_matrix(int M) {
  if (M < 1 || M % 2 == 0) throw std::invalid_argument("DFT size M must be odd and >= 1");
  const int half = M / 2;
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  Eigen::MatrixXcd D(M, M);
  for (int q = 0; q < M; ++q) {
    const int p = q - half;
    for (int m = 0; m < M; ++m) {
      // Reduce p*m modulo M so the phase is exact for large products.
      const int r = ((p * m) % M + M) % M;
      const double angle = -2.0 * kPi * r / M;
      D(m, q) = std::polar(scale, angle);
    }
  }
  return D;
}

std::vector<int> spectral_permutation(int M, int N) {
  if (M < 1 || N < 1) throw std::invalid_argument("permutation sizes must be >= 1");
  std::vector<int> perm(static_cast<std::size_t>(M) * N);
  for (int i = 0; i < N; ++i) {
    for (int q = 0; q < M; ++q) perm[static_cast<std::size_t>(i) * M + q] = q * N + i;
  }
  return perm;
}

Eigen::MatrixXcd apply_spectral_permutation(const Eigen::MatrixXcd& X, int M, int N) {
  const auto perm = spectral_permutation(M, N);
  const auto size = static_cast<Eigen::Index>(perm.size());
  if (X.rows() != size || X.cols() != size) throw std::invalid_argument("matrix size does not match M*N");
  Eigen::MatrixXcd Y(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = 0; b < size; ++b) Y(perm[a], perm[b]) = X(a, b);
  }
  return Y;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace bemspectra
