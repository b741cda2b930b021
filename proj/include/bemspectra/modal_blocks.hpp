#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bemspectra/continuous_spectra.hpp"
#include "bemspectra/moment_table.hpp"
#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

/// How the doubly infinite (s, l) sum of a modal block is cut.
///
/// Adaptive mode: each image branch s runs l upward from |p + sM| and stops
/// once tail_window consecutive rank-one terms have Frobenius norm below
/// tail_tol times the norm of the principal (s = 0) branch. The test only
/// starts at l >= max(|p + sM|, ka) + V, past the visible and transition
/// range. Reaching l_cap first is a saturation error.
///
/// Fixed mode: every branch runs exactly to l_cap; used where two routes
/// must share an identical term set.
struct TruncationPolicy {
  int s_max = 6;
  int l_cap = 0;
  double tail_tol = 1e-6;
  int tail_window = 5;
  bool adaptive = true;
  /// When >= 0, branch q stops at l = |q| + l_window at the latest (a
  /// deliberate cut, never a saturation). Used for the visible-range variant.
  int l_window = -1;

  static TruncationPolicy defaults(BasisKind test, BasisKind source, int V, double ka);
  static TruncationPolicy fixed(int s_max, int l_max);
  void validate(int V) const;
};

/// Command-line or config overrides layered onto the defaults.
struct PolicyOverrides {
  std::optional<int> s_max;
  std::optional<int> l_cap;
  std::optional<double> tail_tol;
  std::optional<int> tail_window;

  void apply(TruncationPolicy& policy) const;
};

struct BranchReport {
  int s = 0;
  int order = 0;  // p + s M
  int l_first = 0;
  int l_last = -1;
  double last_ratio = 0.0;
  bool saturated = false;
};

struct TruncationReport {
  std::vector<BranchReport> branches;
  bool saturated = false;
  /// Largest final term ratio over all branches.
  double tail_estimate = 0.0;
};

class SaturationError : public std::runtime_error {
 public:
  SaturationError(const std::string& what, TruncationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const TruncationReport& report() const { return report_; }

 private:
  TruncationReport report_;
};

/// One diagonal block of the DFT-and-permutation similarity of the BEM matrix:
///   (V/2) sum_s sum_{l >= |p+sM|} lambda_l T_{-(p+sM)} F_{p+sM} t_l f_l^T.
struct ModalBlock {
  OperatorKind kind;
  int p = 0;
  double ka = 0.0;
  Eigen::MatrixXcd matrix;
  TruncationReport truncation;
};

struct BlockEigenvalues {
  OperatorKind kind;
  int p = 0;
  double ka = 0.0;
  std::vector<std::complex<double>> values;
};

/// Shares the eigenvalue table between all blocks of one (kind, ka, families,
/// policy). Moment tables are built per block for the orders |p + sM| it
/// needs and released afterwards. Immutable after construction.
class ModalAssembler {
 public:
  ModalAssembler(OperatorKind kind, double ka, const BasisFamily& test, const BasisFamily& source,
                 const TruncationPolicy& policy);

  const SphereGrid& grid() const { return test_.grid; }
  const EigenvalueTable& eigenvalues() const { return *lambda_; }
  const TruncationPolicy& policy() const { return policy_; }

  ModalBlock assemble_block(int p) const;
  /// Blocks for p = -floor(M/2)..floor(M/2) in ascending p.
  std::vector<ModalBlock> assemble_all_blocks() const;
  std::vector<ModalBlock> assemble_all_blocks_serial() const;

  /// t_l f_l^T for branch order q, before lambda, weights and prefactor.
  Eigen::MatrixXd rank_one_term(int q, int l) const;

 private:
  std::vector<ModalBlock> assemble_many(Execution execution) const;

  OperatorKind kind_;
  double ka_;
  BasisFamily test_;
  BasisFamily source_;
  TruncationPolicy policy_;
  std::shared_ptr<const EigenvalueTable> lambda_;
};

ModalBlock assemble_block(OperatorKind kind, int p, double ka, const BasisFamily& test, const BasisFamily& source,
                          const TruncationPolicy& policy);

std::vector<ModalBlock> assemble_all_blocks(OperatorKind kind, double ka, const BasisFamily& test,
                                            const BasisFamily& source, const TruncationPolicy& policy,
                                            Execution execution = Execution::Parallel);

/// Eigenvalues of a dense non-Hermitian complex matrix (complex Schur form).
/// Throws std::runtime_error if the QR iteration does not converge.
std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXcd& matrix);

BlockEigenvalues block_eigenvalues(const ModalBlock& block);

}  // namespace bemspectra
