#include "bemspectra/modal_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace bemspectra {

namespace {

struct BranchSum {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  BranchReport report;
};

double frobenius(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
  return std::sqrt(re.squaredNorm() + im.squaredNorm());
}

}  // namespace

TruncationPolicy TruncationPolicy::defaults(BasisKind test, BasisKind source, int V, double ka) {
  TruncationPolicy policy;
  const bool smooth = test == BasisKind::Pyramid && source == BasisKind::Pyramid;
  policy.s_max = smooth ? 6 : 24;
  policy.tail_tol = 1e-5;
  policy.tail_window = 5;
  policy.l_cap = std::max(128 * V, static_cast<int>(std::ceil(2.0 * ka)) + 400);
  policy.adaptive = true;
  return policy;
}

void PolicyOverrides::apply(TruncationPolicy& policy) const {
  if (s_max) policy.s_max = *s_max;
  if (l_cap) policy.l_cap = *l_cap;
  if (tail_tol) policy.tail_tol = *tail_tol;
  if (tail_window) policy.tail_window = *tail_window;
}

TruncationPolicy TruncationPolicy::fixed(int s_max, int l_max) {
  TruncationPolicy policy;
  policy.s_max = s_max;
  policy.l_cap = l_max;
  policy.adaptive = false;
  return policy;
}

void TruncationPolicy::validate(int V) const {
  if (s_max < 0) throw std::invalid_argument("s_max must be >= 0");
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be > 0");
  if (tail_window < 1) throw std::invalid_argument("tail_window must be >= 1");
  if (l_window < -1) throw std::invalid_argument("l_window must be >= 0 or -1");
  if (l_cap < V + V / 2) {
    throw std::invalid_argument("l_cap must be >= V + |p| for every block (need " + std::to_string(V + V / 2) + ")");
  }
}

ModalAssembler::ModalAssembler(OperatorKind kind, double ka, const BasisFamily& test, const BasisFamily& source,
                               const TruncationPolicy& policy)
    : kind_(kind), ka_(ka), test_(test), source_(source), policy_(policy) {
  if (!(test.grid == source.grid)) throw std::invalid_argument("test and source families must share the grid");
  if (kind != OperatorKind::Identity && (!(ka > 0.0) || !std::isfinite(ka))) {
    throw std::domain_error("ka must be finite and > 0");
  }
  policy_.validate(test.grid.V());
  lambda_ = std::make_shared<const EigenvalueTable>(kind, kind == OperatorKind::Identity ? 1.0 : ka, policy_.l_cap);
}

Eigen::MatrixXd ModalAssembler::rank_one_term(int q, int l) const {
  const int m = std::abs(q);
  const int N = grid().N();
  if (l < m) return Eigen::MatrixXd::Zero(N, N);
  const LegendreMomentTable t(test_, m, l);
  if (source_.same_z_moments(test_)) return t.vector(l) * t.vector(l).transpose();
  const LegendreMomentTable f(source_, m, l);
  return t.vector(l) * f.vector(l).transpose();
}

ModalBlock ModalAssembler::assemble_block(int p) const {
  const SphereGrid& g = grid();
  const int M = g.M();
  const int N = g.N();
  const int half = M / 2;
  if (p < -half || p > half) throw std::out_of_range("block index p outside [-M/2, M/2]");

  const int L = policy_.l_cap;
  const bool shared = source_.same_z_moments(test_);

  auto run_branch = [&](int s, double reference) {
    BranchSum b;
    b.re = Eigen::MatrixXd::Zero(N, N);
    b.im = Eigen::MatrixXd::Zero(N, N);
    const int q = p + s * M;
    const int m = std::abs(q);
    b.report.s = s;
    b.report.order = q;
    b.report.l_first = m;
    const double weight = fourier_coefficient(test_.kind, -q, M) * fourier_coefficient(source_.kind, q, M);
    if (weight == 0.0) return b;
    if (m > L) {
      b.report.saturated = policy_.adaptive;
      b.report.last_ratio = 1.0;
      return b;
    }
    const int test_start = std::max(m, static_cast<int>(std::ceil(ka_))) + g.V();
    int quiet = 0;
    bool converged = false;
    int l = m;
    // Tables are rebuilt at doubled length until the branch converges; the
    // sum itself always runs l upward in one pass.
    const int upper = policy_.l_window >= 0 ? std::min(L, m + policy_.l_window) : L;
    int length = policy_.adaptive ? std::min(upper, test_start + 4 * g.V()) : upper;
    while (!converged) {
      const LegendreMomentTable t(test_, m, length);
      std::unique_ptr<LegendreMomentTable> f_own;
      if (!shared) f_own = std::make_unique<LegendreMomentTable>(source_, m, length);
      const LegendreMomentTable& f = shared ? t : *f_own;
      for (; l <= length; ++l) {
        const std::complex<double> c = (*lambda_)[l] * weight;
        const auto tv = t.vector(l);
        const auto fv = f.vector(l);
        b.re.noalias() += (c.real() * tv) * fv.transpose();
        b.im.noalias() += (c.imag() * tv) * fv.transpose();
        b.report.l_last = l;
        if (!policy_.adaptive || l < test_start) continue;
        const double term = std::abs(c) * tv.norm() * fv.norm();
        const double denom = s == 0 ? frobenius(b.re, b.im) : reference;
        const double ratio = denom > 0.0 ? term / denom : (term > 0.0 ? 1.0 : 0.0);
        b.report.last_ratio = ratio;
        quiet = ratio < policy_.tail_tol ? quiet + 1 : 0;
        if (quiet >= policy_.tail_window) {
          converged = true;
          break;
        }
      }
      if (length == upper) break;
      length = std::min(upper, 2 * length);
    }
    if (policy_.adaptive && !converged && upper == L) b.report.saturated = true;
    return b;
  };

  const int s_max = policy_.s_max;
  std::vector<BranchSum> branches(static_cast<std::size_t>(2 * s_max + 1));
  branches[s_max] = run_branch(0, 0.0);
  const double reference = frobenius(branches[s_max].re, branches[s_max].im);
  for (int s = -s_max; s <= s_max; ++s) {
    if (s != 0) branches[s + s_max] = run_branch(s, reference);
  }

  ModalBlock block;
  block.kind = kind_;
  block.p = p;
  block.ka = ka_;
  Eigen::MatrixXd re = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(N, N);
  for (auto& b : branches) {
    re += b.re;
    im += b.im;
    block.truncation.tail_estimate = std::max(block.truncation.tail_estimate, b.report.last_ratio);
    block.truncation.saturated = block.truncation.saturated || b.report.saturated;
    block.truncation.branches.push_back(b.report);
  }
  const double prefactor = 0.5 * g.V();
  block.matrix.resize(N, N);
  block.matrix.real() = prefactor * re;
  block.matrix.imag() = prefactor * im;

  if (!block.matrix.allFinite()) throw std::range_error("modal block has non-finite entries");
  if (block.truncation.saturated) {
    throw SaturationError("l_cap " + std::to_string(L) + " reached before the tail criterion in block p=" +
                              std::to_string(p) + " (tail " + std::to_string(block.truncation.tail_estimate) + ")",
                          block.truncation);
  }
  return block;
}

std::vector<ModalBlock> ModalAssembler::assemble_many(Execution execution) const {
  const int half = grid().M() / 2;
  const int count = 2 * half + 1;
  std::vector<ModalBlock> blocks(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) {
      try {
        blocks[i] = assemble_block(i - half);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < count; ++i) {
      try {
        blocks[i] = assemble_block(i - half);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return blocks;
}

std::vector<ModalBlock> ModalAssembler::assemble_all_blocks() const { return assemble_many(Execution::Parallel); }

std::vector<ModalBlock> ModalAssembler::assemble_all_blocks_serial() const { return assemble_many(Execution::Serial); }

ModalBlock assemble_block(OperatorKind kind, int p, double ka, const BasisFamily& test, const BasisFamily& source,
                          const TruncationPolicy& policy) {
  return ModalAssembler(kind, ka, test, source, policy).assemble_block(p);
}

std::vector<ModalBlock> assemble_all_blocks(OperatorKind kind, double ka, const BasisFamily& test,
                                            const BasisFamily& source, const TruncationPolicy& policy,
                                            Execution execution) {
  const ModalAssembler assembler(kind, ka, test, source, policy);
  return execution == Execution::Parallel ? assembler.assemble_all_blocks() : assembler.assemble_all_blocks_serial();
}

std::vector<std::complex<double>> dense_eigenvalues(const Eigen::MatrixXcd& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("eigenvalues need a square matrix");
  if (matrix.rows() == 0) return {};
  if (!matrix.allFinite()) throw std::domain_error("eigenvalues of a matrix with non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(matrix, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("complex Schur iteration did not converge");
  const Eigen::VectorXcd& v = solver.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

BlockEigenvalues block_eigenvalues(const ModalBlock& block) {
  return {block.kind, block.p, block.ka, dense_eigenvalues(block.matrix)};
}

}  // namespace bemspectra
