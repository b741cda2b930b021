#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <string_view>
#include <vector>

namespace bemspectra {

/// Uniform (phi, z = cos theta) partition of the unit sphere into V^2 cells of
/// equal area 4 pi / V^2.
class SphereGrid {
 public:
  /// V must be odd and >= 3.
  explicit SphereGrid(int V);

  int V() const { return V_; }
  int M() const { return V_; }
  int N() const { return V_; }
  double h_phi() const { return 2.0 * std::numbers::pi / V_; }
  double h_z() const { return 2.0 / V_; }
  double cell_area() const { return 4.0 * std::numbers::pi / (static_cast<double>(V_) * V_); }

  /// phi_mu = mu h_phi, mu = 0..V-1
  double phi_node(int mu) const;
  /// z_nu = 1 - nu h_z, nu = 0..V; exactly +1 and -1 at the ends.
  double z_node(int nu) const;
  /// Centre of z-cell n, between z_{n+1} and z_n.
  double z_midpoint(int n) const;

  friend bool operator==(const SphereGrid&, const SphereGrid&) = default;

 private:
  int V_;
};

enum class BasisKind { Patch, Pyramid };
enum class BasisRole { Test, Source };

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view text);

/// Amplitude applied to every z-moment so that the patch Gram blocks tend to
/// the identity: with block prefactor V/2 the completeness sum of Pbar gives
/// 2 c^2 on the diagonal, hence c^2 = 1/2.
inline constexpr double kCalibratedNormalization = 0.70710678118654752440;

/// Separable basis b_{nM+m}(z, phi) = b^z_n(z) b^phi_m(phi).
///
/// phi-factors are centred on phi_m: the patch covers [phi_m - h/2, phi_m + h/2)
/// and the pyramid is the periodic hat of half-width h_phi. z-factors: the
/// patch is the indicator of cell n; the pyramid is the hat of half-width h_z
/// centred on the cell midpoint, held flat at 1 between the outermost
/// midpoints and the poles so that the z-factors still sum to one.
struct BasisFamily {
  BasisKind kind = BasisKind::Patch;
  BasisRole role = BasisRole::Test;
  SphereGrid grid{3};
  double normalization_constant = kCalibratedNormalization;

  double phi_factor(int m, double phi) const;
  double z_factor(int n, double z) const;

  /// Descending z breakpoints from +1 to -1; no z-factor has a kink inside a
  /// panel between consecutive breakpoints.
  std::vector<double> z_breakpoints() const;
  /// Breakpoints of phi-factor m in ascending order (may extend outside [0, 2pi)).
  std::vector<double> phi_breakpoints(int m) const;

  /// True when the z-moments of both families are identical.
  bool same_z_moments(const BasisFamily& other) const {
    return kind == other.kind && grid == other.grid && normalization_constant == other.normalization_constant;
  }
};

/// Normalized Fourier coefficient (1/h_phi) * integral of b^phi_0 e^{i p phi}:
/// sinc(pi p / M) for the patch, its square for the pyramid. Exactly 1 at
/// p = 0 and exactly 0 at nonzero multiples of M.
double fourier_coefficient(BasisKind kind, int p, int M);

/// entries[n] = integral over [-1, 1] of Pbar_l^p(z) b^z_n(z) dz, scaled by the
/// family normalization constant. All zeros when |p| > l.
struct MomentVector {
  int l = 0;
  int p = 0;
  std::vector<double> entries;
};

MomentVector legendre_moment_vector(int l, int p, const BasisFamily& family);

/// Unitary M x M matrix whose column p + floor(M/2) has entries
/// e^{-i p phi_m} / sqrt(M). M odd.
Eigen::MatrixXcd dft_eigenvector_matrix(int M);

/// perm[i*M + q] = q*N + i: moves within-block index q of block-row i to
/// position i of the q-th grouped block.
std::vector<int> spectral_permutation(int M, int N);

/// Y = P^T X P for the permutation above, i.e. Y(perm[a], perm[b]) = X(a, b).
Eigen::MatrixXcd apply_spectral_permutation(const Eigen::MatrixXcd& X, int M, int N);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

}  // namespace bemspectra
