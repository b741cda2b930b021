#include "bemspectra/continuous_spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "bemspectra/specfun.hpp"

namespace bemspectra {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void require_ka(double ka) {
  if (!(ka > 0.0) || !std::isfinite(ka)) throw std::domain_error("ka must be finite and > 0");
}

// -i x^2 j (j - i y) = -x^2 j y - i x^2 j^2
std::complex<double> single_layer_from(const ScaledReal& j, const ScaledReal& y, double x) {
  const double x2 = x * x;
  return {-x2 * (j * y).to_double(), -x2 * (j * j).to_double()};
}

// i x^2 j' (j' - i y') = x^2 j' y' + i x^2 j'^2
std::complex<double> hypersingular_from(const ScaledReal& jp, const ScaledReal& yp, double x) {
  const double x2 = x * x;
  return {x2 * (jp * yp).to_double(), x2 * (jp * jp).to_double()};
}

}  // namespace

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::SingleLayer: return "single-layer";
    case OperatorKind::Hypersingular: return "hypersingular";
    case OperatorKind::Identity: return "identity";
  }
  return "?";
}

OperatorKind parse_operator_kind(std::string_view text) {
  if (text == "single-layer" || text == "S" || text == "single_layer") return OperatorKind::SingleLayer;
  if (text == "hypersingular" || text == "N") return OperatorKind::Hypersingular;
  if (text == "identity" || text == "I" || text == "gram") return OperatorKind::Identity;
  throw std::invalid_argument("unknown operator kind: " + std::string(text));
}

std::complex<double> lambda_single_layer(int l, double ka) {
  require_ka(ka);
  const SphericalBesselTable t(l, ka);
  return single_layer_from(t.j(l), t.y(l), ka);
}

std::complex<double> lambda_hypersingular(int l, double ka) {
  require_ka(ka);
  const SphericalBesselTable t(l, ka);
  return hypersingular_from(t.j_prime(l), t.y_prime(l), ka);
}

std::complex<double> lambda_identity(int l) {
  if (l < 0) throw std::domain_error("spectral index must be >= 0");
  return {1.0, 0.0};
}

std::complex<double> operator_eigenvalue(OperatorKind kind, int l, double ka) {
  switch (kind) {
    case OperatorKind::SingleLayer: return lambda_single_layer(l, ka);
    case OperatorKind::Hypersingular: return lambda_hypersingular(l, ka);
    case OperatorKind::Identity: return lambda_identity(l);
  }
  throw std::logic_error("unhandled operator kind");
}

ContinuousEigenvalue continuous_eigenvalue(OperatorKind kind, int l, double ka) {
  return {kind, l, ka, operator_eigenvalue(kind, l, ka)};
}

std::string_view to_string(SpectralRegion region) {
  switch (region) {
    case SpectralRegion::Hyperbolic: return "hyperbolic";
    case SpectralRegion::Transition: return "transition";
    case SpectralRegion::Elliptic: return "elliptic";
  }
  return "?";
}

SpectralRegion classify_region(int l, double ka, double c) {
  const double half_width = c * std::cbrt(ka);
  const double d = static_cast<double>(l) - ka;
  if (std::abs(d) <= half_width) return SpectralRegion::Transition;
  return d < 0.0 ? SpectralRegion::Hyperbolic : SpectralRegion::Elliptic;
}

EigenvalueTable::EigenvalueTable(OperatorKind kind, double ka, int l_max) : kind_(kind), ka_(ka) {
  if (l_max < 0) throw std::domain_error("eigenvalue table needs l_max >= 0");
  values_.resize(static_cast<std::size_t>(l_max) + 1);
  if (kind == OperatorKind::Identity) {
    std::fill(values_.begin(), values_.end(), std::complex<double>{1.0, 0.0});
    return;
  }
  require_ka(ka);
  const SphericalBesselTable t(l_max, ka);
  for (int l = 0; l <= l_max; ++l) {
    values_[l] = kind == OperatorKind::SingleLayer ? single_layer_from(t.j(l), t.y(l), ka)
                                                   : hypersingular_from(t.j_prime(l), t.y_prime(l), ka);
  }
}

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log-log fit needs >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("log-log fit needs positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("log-log fit needs distinct abscissae");
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace bemspectra
