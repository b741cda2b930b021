#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "bemspectra/continuous_spectra.hpp"
#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

/// Full V^2 x V^2 Galerkin matrix, element u = n M + m (z index n, phi index m).
struct FullMatrix {
  OperatorKind kind;
  double ka = 0.0;
  int V = 0;
  Eigen::MatrixXcd matrix;
};

/// Element-level modal expansion
///   A(nM+m, n'M+m') = V^2/(8 pi^2) sum_q sum_{l>=|q|} lambda_l t_l^{|q|}[n] f_l^{|q|}[n']
///                     Phi^t_m(q) conj(Phi^f_m'(q)),
/// Phi_m(q) = integral of b^phi_m(phi) e^{i q phi}, computed here by Gauss
/// quadrature rather than from the closed-form coefficients. q runs over
/// |q| <= floor(M/2) + s_max M and l up to l_cap: the same terms the blocks
/// use under the same fixed policy. V <= 9.
FullMatrix assemble_full_modal(OperatorKind kind, double ka, const BasisFamily& test, const BasisFamily& source,
                               const TruncationPolicy& policy);

/// Max relative Frobenius deviation of the M x M blocks (n, n') from circulant.
double circulant_defect(const Eigen::MatrixXcd& matrix, int M, int N);

struct BlockDiagonalization {
  /// blocks[i] belongs to p = i - floor(M/2).
  std::vector<Eigen::MatrixXcd> blocks;
  /// ||off-diagonal-block part|| / ||total|| after the similarity.
  double off_diagonal_residual = 0.0;
};

/// P^T (I_N kron D)^H A (I_N kron D) P with the DFT eigenvector matrix D and the
/// spectral permutation P.
BlockDiagonalization block_diagonalize(const Eigen::MatrixXcd& matrix, int M, int N);
BlockDiagonalization block_diagonalize(const FullMatrix& full);

/// Inverse of block_diagonalize for exactly block-diagonal input.
Eigen::MatrixXcd reassemble_from_blocks(const std::vector<Eigen::MatrixXcd>& blocks, int M, int N);

struct QuadratureReport {
  FullMatrix full;
  /// Some near-singular pair still changed by more than the target after the
  /// last subdivision level.
  bool accuracy_flag = false;
  double max_refinement_change = 0.0;
};

/// Direct Galerkin assembly (k/A) int t_u int f_v G dr' dr of the single-layer
/// matrix for the patch basis. The 1/(4 pi R) part of the kernel is integrated
/// over the source cell by a Duffy split at the (clamped) target point, the
/// smooth remainder by tensor Gauss; the target cell is subdivided dyadically
/// up to 4 levels toward the source cell. V <= 5, ka <= 3.
QuadratureReport assemble_quadrature_single_layer(double ka, const BasisFamily& test, const BasisFamily& source);

/// Binary dump: "BEMM", uint32 version 1, uint64 rows, uint64 cols, then
/// rows*cols (re, im) double pairs in row-major order, little-endian.
void write_matrix_binary(std::ostream& out, const Eigen::MatrixXcd& matrix);
Eigen::MatrixXcd read_matrix_binary(std::istream& in);
/// One row per line, 2*cols comma-separated values re0,im0,re1,im1,...
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& matrix);

}  // namespace bemspectra
