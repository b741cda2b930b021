#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bemspectra {

enum class OperatorKind { SingleLayer, Hypersingular, Identity };

std::string_view to_string(OperatorKind kind);
/// Accepts "single-layer", "hypersingular", "identity" (and S, N, I).
OperatorKind parse_operator_kind(std::string_view text);

/// Eigenvalue of the continuous operator on the unit sphere, radius folded
/// into ka. Multiplicity is always 2l + 1.
struct ContinuousEigenvalue {
  OperatorKind kind;
  int l;
  double ka;
  std::complex<double> value;

  int multiplicity() const { return 2 * l + 1; }
};

/// -i (ka)^2 j_l(ka) h_l^(2)(ka)
std::complex<double> lambda_single_layer(int l, double ka);
/// i (ka)^2 j_l'(ka) h_l^(2)'(ka)
std::complex<double> lambda_hypersingular(int l, double ka);
/// The identity; always 1.
std::complex<double> lambda_identity(int l);

std::complex<double> operator_eigenvalue(OperatorKind kind, int l, double ka);
ContinuousEigenvalue continuous_eigenvalue(OperatorKind kind, int l, double ka);

enum class SpectralRegion { Hyperbolic, Transition, Elliptic };

std::string_view to_string(SpectralRegion region);

constexpr double kDefaultTransitionWindow = 2.0;

/// Transition iff |l - ka| <= c (ka)^(1/3); Hyperbolic below, Elliptic above.
SpectralRegion classify_region(int l, double ka, double c = kDefaultTransitionWindow);

/// Eigenvalues lambda_0..lambda_{l_max} for one (kind, ka), computed in one
/// Bessel sweep. Immutable after construction, safe to share across threads.
class EigenvalueTable {
 public:
  EigenvalueTable(OperatorKind kind, double ka, int l_max);

  OperatorKind kind() const { return kind_; }
  double ka() const { return ka_; }
  int l_max() const { return static_cast<int>(values_.size()) - 1; }
  std::complex<double> operator[](int l) const { return values_[static_cast<std::size_t>(l)]; }
  std::span<const std::complex<double>> values() const { return values_; }

 private:
  OperatorKind kind_;
  double ka_;
  std::vector<std::complex<double>> values_;
};

/// Least-squares slope and RMS residual of log(y) against log(x).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace bemspectra
