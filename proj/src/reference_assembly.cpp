#include "bemspectra/reference_assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "bemspectra/moment_table.hpp"

namespace bemspectra {

namespace {

constexpr double kPi = std::numbers::pi;

// Phi_m(q) for all m by Gauss quadrature over the factor's support.
Eigen::VectorXcd phi_moments(const BasisFamily& family, int q) {
  const int M = family.grid.M();
  Eigen::VectorXcd out(M);
  for (int m = 0; m < M; ++m) {
    const std::vector<double> bp = family.phi_breakpoints(m);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      const double a = bp[k];
      const double b = bp[k + 1];
      const double half = 0.5 * (b - a);
      const double mid = 0.5 * (a + b);
      // Evaluate the factor inside the panel, away from the kinks at its ends.
      const int nodes = static_cast<int>(std::ceil(0.5 * std::abs(q) * (b - a))) + 16;
      const GaussRule rule = gauss_legendre(nodes);
      for (int i = 0; i < nodes; ++i) {
        const double phi = mid + half * rule.nodes[i];
        acc += half * rule.weights[i] * family.phi_factor(m, phi) * std::polar(1.0, q * phi);
      }
    }
    out[m] = acc;
  }
  return out;
}

}  // namespace

FullMatrix assemble_full_modal(OperatorKind kind, double ka, const BasisFamily& test, const BasisFamily& source,
                               const TruncationPolicy& policy) {
  if (!(test.grid == source.grid)) throw std::invalid_argument("test and source families must share the grid");
  const int V = test.grid.V();
  if (V > 9) throw std::invalid_argument("full modal assembly is limited to V <= 9");
  if (policy.adaptive) throw std::invalid_argument("full modal assembly needs a fixed truncation policy");
  policy.validate(V);
  const int M = test.grid.M();
  const int N = test.grid.N();
  const int L = policy.l_cap;
  const int Q = M / 2 + policy.s_max * M;

  const EigenvalueTable lambda(kind, kind == OperatorKind::Identity ? 1.0 : ka, L);
  std::vector<int> orders;
  for (int m = 0; m <= std::min(Q, L); ++m) orders.push_back(m);
  const MomentCache t_cache(test, L, orders);
  const bool shared = source.same_z_moments(test);
  const MomentCache f_cache_own(shared ? test : source, shared ? 0 : L, shared ? std::vector<int>{} : orders);
  const MomentCache& f_cache = shared ? t_cache : f_cache_own;

  const double K = static_cast<double>(V) * V / (8.0 * kPi * kPi);
  FullMatrix full;
  full.kind = kind;
  full.ka = ka;
  full.V = V;
  full.matrix = Eigen::MatrixXcd::Zero(M * N, M * N);

  for (int q = -Q; q <= Q; ++q) {
    const int m = std::abs(q);
    if (m > L) continue;
    const LegendreMomentTable& t = *t_cache.find(m);
    const LegendreMomentTable& f = *f_cache.find(m);
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(N, N);
    for (int l = m; l <= L; ++l) {
      Z.noalias() += lambda[l] * (t.vector(l) * f.vector(l).transpose()).cast<std::complex<double>>();
    }
    const Eigen::VectorXcd pt = phi_moments(test, q);
    const Eigen::VectorXcd pf = phi_moments(source, q).conjugate();
    const Eigen::MatrixXcd phase = pt * pf.transpose();
    for (int n = 0; n < N; ++n) {
      for (int n2 = 0; n2 < N; ++n2) full.matrix.block(n * M, n2 * M, M, M) += (K * Z(n, n2)) * phase;
    }
  }
  return full;
}

double circulant_defect(const Eigen::MatrixXcd& matrix, int M, int N) {
  if (matrix.rows() != M * N || matrix.cols() != M * N) throw std::invalid_argument("matrix size does not match M*N");
  double largest = 0.0;
  for (int n = 0; n < N; ++n) {
    for (int n2 = 0; n2 < N; ++n2) largest = std::max(largest, matrix.block(n * M, n2 * M, M, M).norm());
  }
  double worst = 0.0;
  for (int n = 0; n < N; ++n) {
    for (int n2 = 0; n2 < N; ++n2) {
      const Eigen::MatrixXcd B = matrix.block(n * M, n2 * M, M, M);
      double diff = 0.0;
      for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) diff += std::norm(B(i, j) - B((i + 1) % M, (j + 1) % M));
      }
      const double scale = std::max(B.norm(), 1e-14 * largest);
      if (scale > 0.0) worst = std::max(worst, std::sqrt(diff) / scale);
    }
  }
  return worst;
}

BlockDiagonalization block_diagonalize(const Eigen::MatrixXcd& matrix, int M, int N) {
  if (matrix.rows() != M * N || matrix.cols() != M * N) throw std::invalid_argument("matrix size does not match M*N");
  const Eigen::MatrixXcd D = dft_eigenvector_matrix(M);
  Eigen::MatrixXcd Y(M * N, M * N);
  for (int n = 0; n < N; ++n) {
    for (int n2 = 0; n2 < N; ++n2) {
      Y.block(n * M, n2 * M, M, M) = D.adjoint() * matrix.block(n * M, n2 * M, M, M) * D;
    }
  }
  const Eigen::MatrixXcd P = apply_spectral_permutation(Y, M, N);

  BlockDiagonalization out;
  double off = 0.0;
  for (int i = 0; i < M; ++i) {
    out.blocks.push_back(P.block(i * N, i * N, N, N));
    for (int j = 0; j < M; ++j) {
      if (j != i) off += P.block(i * N, j * N, N, N).squaredNorm();
    }
  }
  const double total = P.squaredNorm();
  out.off_diagonal_residual = total > 0.0 ? std::sqrt(off / total) : 0.0;
  return out;
}

BlockDiagonalization block_diagonalize(const FullMatrix& full) { return block_diagonalize(full.matrix, full.V, full.V); }

Eigen::MatrixXcd reassemble_from_blocks(const std::vector<Eigen::MatrixXcd>& blocks, int M, int N) {
  if (static_cast<int>(blocks.size()) != M) throw std::invalid_argument("need M blocks");
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(M * N, M * N);
  for (int i = 0; i < M; ++i) {
    if (blocks[i].rows() != N || blocks[i].cols() != N) throw std::invalid_argument("blocks must be N x N");
    P.block(i * N, i * N, N, N) = blocks[i];
  }
  const auto perm = spectral_permutation(M, N);
  Eigen::MatrixXcd Y(M * N, M * N);
  for (int a = 0; a < M * N; ++a) {
    for (int b = 0; b < M * N; ++b) Y(a, b) = P(perm[a], perm[b]);
  }
  const Eigen::MatrixXcd D = dft_eigenvector_matrix(M);
  Eigen::MatrixXcd X(M * N, M * N);
  for (int n = 0; n < N; ++n) {
    for (int n2 = 0; n2 < N; ++n2) X.block(n * M, n2 * M, M, M) = D * Y.block(n * M, n2 * M, M, M) * D.adjoint();
  }
  return X;
}

namespace {

constexpr char kMagic[4] = {'B', 'E', 'M', 'M'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated matrix dump");
  return value;
}

}  // namespace

void write_matrix_binary(std::ostream& out, const Eigen::MatrixXcd& matrix) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(matrix.cols()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      put<double>(out, matrix(i, j).real());
      put<double>(out, matrix(i, j).imag());
    }
  }
}

Eigen::MatrixXcd read_matrix_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a matrix dump");
  if (get<std::uint32_t>(in) != kBinaryVersion) throw std::runtime_error("unsupported matrix dump version");
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  Eigen::MatrixXcd matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      matrix(i, j) = {re, im};
    }
  }
  return matrix;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXcd& matrix) {
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << matrix(i, j).real() << ',' << matrix(i, j).imag();
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace bemspectra
