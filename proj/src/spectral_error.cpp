#include "bemspectra/spectral_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bemspectra/assignment.hpp"

namespace bemspectra {

namespace {

constexpr double kUnreachableCost = 1e6;

bool lexicographic_less(std::complex<double> a, std::complex<double> b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

double log_distance(std::complex<double> a, std::complex<double> b) {
  if (a == 0.0 || b == 0.0) return kUnreachableCost;
  const double d = std::abs(std::log(a) - std::log(b));
  return std::isfinite(d) ? std::min(d, kUnreachableCost) : kUnreachableCost;
}

BasisFamily make_family(BasisKind kind, BasisRole role, int V) {
  BasisFamily f;
  f.kind = kind;
  f.role = role;
  f.grid = SphereGrid(V);
  return f;
}

}  // namespace

std::complex<double> relative_error(std::complex<double> matrix_eigenvalue, std::complex<double> operator_eigenvalue) {
  if (std::abs(operator_eigenvalue) < kResonanceThreshold) {
    throw ResonanceError("operator eigenvalue below resonance threshold");
  }
  return (matrix_eigenvalue - operator_eigenvalue) / operator_eigenvalue;
}

std::vector<ContinuousEigenvalue> continuous_spectrum(OperatorKind kind, double ka, int l_max) {
  const EigenvalueTable table(kind, ka, l_max);
  std::vector<ContinuousEigenvalue> out;
  out.reserve(static_cast<std::size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) out.push_back({kind, l, ka, table[l]});
  return out;
}

int round_to_odd(double x) { return 2 * static_cast<int>(std::floor(x / 2.0)) + 1; }

MatchReport match_block(const BlockEigenvalues& block, std::span<const ContinuousEigenvalue> spectrum,
                        double transition_window) {
  const int V = static_cast<int>(block.values.size());
  const int m = std::abs(block.p);
  if (m >= V) throw std::invalid_argument("block index |p| must be below the number of eigenvalues");

  std::vector<std::complex<double>> reference(static_cast<std::size_t>(V - m));
  std::vector<char> seen(reference.size(), 0);
  for (const auto& e : spectrum) {
    if (e.kind != block.kind) throw std::invalid_argument("spectrum kind differs from block kind");
    if (block.kind != OperatorKind::Identity && e.ka != block.ka) {
      throw std::invalid_argument("spectrum ka differs from block ka");
    }
    if (e.l < m || e.l >= V) continue;
    reference[e.l - m] = e.value;
    seen[e.l - m] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("spectrum does not cover l = |p| .. V-1");
  }

  std::vector<std::complex<double>> values = block.values;
  std::sort(values.begin(), values.end(), lexicographic_less);

  Eigen::MatrixXd cost(V - m, V);
  for (int i = 0; i < V - m; ++i) {
    for (int j = 0; j < V; ++j) cost(i, j) = log_distance(values[j], reference[i]);
  }
  const std::vector<int> assigned = solve_assignment(cost);

  MatchReport report;
  report.p = block.p;
  std::vector<char> used(static_cast<std::size_t>(V), 0);
  for (int i = 0; i < V - m; ++i) {
    const int l = m + i;
    SpectralErrorRecord r;
    r.kind = block.kind;
    r.l = l;
    r.p = block.p;
    r.ka = block.ka;
    r.V = V;
    r.matrix_eigenvalue = values[assigned[i]];
    r.operator_eigenvalue = reference[i];
    r.region = classify_region(l, block.ka, transition_window);
    r.reliable = l <= block.ka;
    try {
      r.relative_error = relative_error(r.matrix_eigenvalue, r.operator_eigenvalue);
    } catch (const ResonanceError&) {
      r.resonant = true;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.relative_error = {nan, nan};
    }
    used[assigned[i]] = 1;
    report.matched.push_back(r);
  }
  for (int j = 0; j < V; ++j) {
    if (!used[j]) report.unmatched_matrix_eigenvalues.push_back(values[j]);
  }
  return report;
}

std::vector<SpectralErrorRecord> SpectrumAnalysis::records() const {
  std::vector<SpectralErrorRecord> out;
  for (const auto& b : blocks) out.insert(out.end(), b.matched.begin(), b.matched.end());
  return out;
}

SpectrumAnalysis analyze_spectrum(OperatorKind kind, double ka, int V, const SweepSettings& settings) {
  TruncationPolicy policy = TruncationPolicy::defaults(settings.test, settings.source, V, ka);
  settings.overrides.apply(policy);
  return analyze_spectrum(kind, ka, V, settings, policy);
}

SpectrumAnalysis analyze_spectrum(OperatorKind kind, double ka, int V, const SweepSettings& settings,
                                  const TruncationPolicy& policy) {
  const BasisFamily test = make_family(settings.test, BasisRole::Test, V);
  const BasisFamily source = make_family(settings.source, BasisRole::Source, V);
  const ModalAssembler assembler(kind, ka, test, source, policy);
  const std::vector<ModalBlock> blocks = settings.execution == Execution::Parallel
                                             ? assembler.assemble_all_blocks()
                                             : assembler.assemble_all_blocks_serial();
  const std::vector<ContinuousEigenvalue> spectrum = continuous_spectrum(kind, ka, V - 1);

  SpectrumAnalysis analysis;
  analysis.kind = kind;
  analysis.ka = ka;
  analysis.V = V;
  for (const auto& block : blocks) {
    analysis.blocks.push_back(match_block(block_eigenvalues(block), spectrum, settings.transition_window));
    analysis.tail_estimate = std::max(analysis.tail_estimate, block.truncation.tail_estimate);
  }
  return analysis;
}

TransitionMaximum max_transition_error(const std::vector<SpectralErrorRecord>& records) {
  TransitionMaximum best;
  for (const auto& r : records) {
    if (!r.reliable || r.resonant || r.region != SpectralRegion::Transition) continue;
    ++best.count;
    const double e = r.error_magnitude();
    if (e > best.value) {
      best.value = e;
      best.l = r.l;
      best.p = r.p;
    }
  }
  return best;
}

namespace {

void validate_sweep(double c_v, const std::vector<double>& ka_list) {
  if (ka_list.size() < 4) throw std::invalid_argument("a frequency sweep needs at least 4 ka values");
  for (std::size_t i = 0; i < ka_list.size(); ++i) {
    if (!(ka_list[i] > 0.0) || !std::isfinite(ka_list[i])) throw std::invalid_argument("ka values must be > 0");
    if (i > 0 && !(ka_list[i] > ka_list[i - 1])) throw std::invalid_argument("ka values must be strictly increasing");
    if (round_to_odd(c_v * ka_list[i]) < 5) throw std::invalid_argument("sweep needs V = round_to_odd(c_v ka) >= 5");
  }
}

double fitted_slope(const std::vector<double>& ka, const std::vector<double>& values, double* residual = nullptr) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (values[i] > 0.0 && std::isfinite(values[i])) {
      x.push_back(ka[i]);
      y.push_back(values[i]);
    }
  }
  if (x.size() < 2) throw std::runtime_error("fewer than two positive sweep values to fit");
  const LogLogFit fit = fit_loglog(x, y);
  if (residual) *residual = fit.residual;
  return fit.slope;
}

}  // namespace

SweepResult hf_sweep(OperatorKind kind, double c_v, const std::vector<double>& ka_list, const SweepSettings& settings) {
  validate_sweep(c_v, ka_list);
  SweepResult result;
  result.kind = kind;
  result.hk_constant = c_v;
  result.ka_list = ka_list;
  for (const double ka : ka_list) {
    const int V = round_to_odd(c_v * ka);
    SpectrumAnalysis analysis = analyze_spectrum(kind, ka, V, settings);
    const TransitionMaximum best = max_transition_error(analysis.records());
    result.V_list.push_back(V);
    result.per_ka_max_transition_error.push_back(best.value);
    result.per_ka_argmax_l.push_back(best.l);
    result.per_ka_argmax_p.push_back(best.p);
    result.points.push_back(std::move(analysis));
  }
  result.fitted_exponent = fitted_slope(ka_list, result.per_ka_max_transition_error, &result.fit_residual);
  return result;
}

AliasingDecomposition aliasing_decomposition(OperatorKind kind, double c_v, const std::vector<double>& ka_list,
                                             const SweepSettings& settings) {
  validate_sweep(c_v, ka_list);
  AliasingDecomposition d;
  d.ka_list = ka_list;
  for (const double ka : ka_list) {
    const int V = round_to_odd(c_v * ka);
    TruncationPolicy full = TruncationPolicy::defaults(settings.test, settings.source, V, ka);
    settings.overrides.apply(full);
    TruncationPolicy principal = full;
    principal.s_max = 0;
    TruncationPolicy visible = principal;
    visible.l_window = V - 1;
    d.full.push_back(max_transition_error(analyze_spectrum(kind, ka, V, settings, full).records()).value);
    d.principal_only.push_back(max_transition_error(analyze_spectrum(kind, ka, V, settings, principal).records()).value);
    d.visible_only.push_back(max_transition_error(analyze_spectrum(kind, ka, V, settings, visible).records()).value);
  }
  d.full_exponent = fitted_slope(ka_list, d.full);
  d.principal_exponent = fitted_slope(ka_list, d.principal_only);
  d.visible_exponent = fitted_slope(ka_list, d.visible_only);
  return d;
}

}  // namespace bemspectra
