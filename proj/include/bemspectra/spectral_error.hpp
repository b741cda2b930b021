#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "bemspectra/continuous_spectra.hpp"
#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

/// Operator eigenvalues below this magnitude are treated as resonant.
inline constexpr double kResonanceThreshold = 1e-14;

class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (matrix - op) / op. Throws ResonanceError when |op| < kResonanceThreshold.
std::complex<double> relative_error(std::complex<double> matrix_eigenvalue, std::complex<double> operator_eigenvalue);

struct SpectralErrorRecord {
  OperatorKind kind;
  int l = 0;
  int p = 0;
  double ka = 0.0;
  int V = 0;
  std::complex<double> matrix_eigenvalue;
  std::complex<double> operator_eigenvalue;
  /// NaN when the record is resonant.
  std::complex<double> relative_error;
  SpectralRegion region = SpectralRegion::Hyperbolic;
  /// l <= ka; records above are heuristic.
  bool reliable = false;
  bool resonant = false;

  double error_magnitude() const { return std::abs(relative_error); }
};

struct MatchReport {
  int p = 0;
  std::vector<SpectralErrorRecord> matched;
  std::vector<std::complex<double>> unmatched_matrix_eigenvalues;
};

/// Assigns the reference values lambda_l, l = |p|..V-1 (V = number of block
/// eigenvalues), one-to-one to block eigenvalues minimizing the total
/// |log(matrix) - log(op)| on the principal branch. The |p| leftover
/// eigenvalues are reported as unmatched. Eigenvalues are put in
/// lexicographic (re, im) order first, so the result does not depend on the
/// order they came in. Throws std::invalid_argument if the spectrum lacks an
/// index in range or its kind/ka disagree with the block.
MatchReport match_block(const BlockEigenvalues& block, std::span<const ContinuousEigenvalue> spectrum,
                        double transition_window = kDefaultTransitionWindow);

/// Spectrum lambda_0..lambda_{l_max} as records for match_block.
std::vector<ContinuousEigenvalue> continuous_spectrum(OperatorKind kind, double ka, int l_max);

/// 2 floor(x / 2) + 1.
int round_to_odd(double x);

/// All blocks, their eigenvalues and the matched records for one (kind, ka, V).
struct SpectrumAnalysis {
  OperatorKind kind;
  double ka = 0.0;
  int V = 0;
  std::vector<MatchReport> blocks;  // ascending p
  double tail_estimate = 0.0;

  std::vector<SpectralErrorRecord> records() const;
};

struct SweepSettings {
  BasisKind test = BasisKind::Pyramid;
  BasisKind source = BasisKind::Pyramid;
  PolicyOverrides overrides;
  double transition_window = kDefaultTransitionWindow;
  Execution execution = Execution::Parallel;
};

SpectrumAnalysis analyze_spectrum(OperatorKind kind, double ka, int V, const SweepSettings& settings);

/// Same analysis on explicitly given policy (defaults and overrides ignored).
SpectrumAnalysis analyze_spectrum(OperatorKind kind, double ka, int V, const SweepSettings& settings,
                                  const TruncationPolicy& policy);

/// Largest |E| over reliable, non-resonant Transition records; 0 if none.
struct TransitionMaximum {
  double value = 0.0;
  int l = -1;
  int p = 0;
  std::size_t count = 0;
};

TransitionMaximum max_transition_error(const std::vector<SpectralErrorRecord>& records);

struct SweepResult {
  OperatorKind kind;
  double hk_constant = 1.0;  // c_v in V = round_to_odd(c_v ka)
  std::vector<double> ka_list;
  std::vector<int> V_list;
  std::vector<double> per_ka_max_transition_error;
  std::vector<int> per_ka_argmax_l;
  std::vector<int> per_ka_argmax_p;
  double fitted_exponent = 0.0;
  double fit_residual = 0.0;
  std::vector<SpectrumAnalysis> points;
};

/// Constant-hk sweep: V = round_to_odd(c_v ka) for each ka, all blocks
/// assembled and matched, max transition |E| per ka, log-log slope fitted.
/// Requires at least 4 strictly increasing ka values and V >= 5.
SweepResult hf_sweep(OperatorKind kind, double c_v, const std::vector<double>& ka_list, const SweepSettings& settings);

/// Diagnostic split of the sweep statistic by truncation variant, reported
/// and never asserted: the full sum, the principal branch s = 0 alone, and the
/// principal branch cut at l <= |p| + V - 1 (no image and no tail content).
struct AliasingDecomposition {
  std::vector<double> ka_list;
  std::vector<double> full;
  std::vector<double> principal_only;
  std::vector<double> visible_only;
  double full_exponent = 0.0;
  double principal_exponent = 0.0;
  double visible_exponent = 0.0;
};

AliasingDecomposition aliasing_decomposition(OperatorKind kind, double c_v, const std::vector<double>& ka_list,
                                             const SweepSettings& settings);

}  // namespace bemspectra
