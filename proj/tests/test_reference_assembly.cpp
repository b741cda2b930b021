#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "bemspectra/reference_assembly.hpp"

using namespace bemspectra;

namespace {

BasisFamily family(BasisKind kind, int V) {
  BasisFamily f;
  f.kind = kind;
  f.grid = SphereGrid(V);
  return f;
}

double rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).norm() / b.norm(); }

Eigen::MatrixXcd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

}  // namespace

TEST_CASE("full patch Gram matrix at V = 3 is close to the identity") {
  const BasisFamily f = family(BasisKind::Patch, 3);
  const FullMatrix g = assemble_full_modal(OperatorKind::Identity, 1.0, f, f, TruncationPolicy::fixed(24, 400));
  CHECK(g.matrix.rows() == 9);
  CHECK(rel(g.matrix, Eigen::MatrixXcd::Identity(9, 9)) < 0.05);
  CHECK(circulant_defect(g.matrix, 3, 3) < 1e-12);
}

TEST_CASE("full matrix is block circulant and block diagonalizes") {
  const BasisFamily f = family(BasisKind::Pyramid, 5);
  const TruncationPolicy pol = TruncationPolicy::fixed(3, 60);
  for (const OperatorKind kind : {OperatorKind::SingleLayer, OperatorKind::Hypersingular}) {
    const FullMatrix full = assemble_full_modal(kind, 2.0, f, f, pol);
    CHECK(circulant_defect(full.matrix, 5, 5) < 1e-12);
    const BlockDiagonalization d = block_diagonalize(full);
    CHECK(d.off_diagonal_residual < 1e-10);
    REQUIRE(d.blocks.size() == 5);
    const auto blocks = assemble_all_blocks(kind, 2.0, f, f, pol);
    for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(rel(d.blocks[i], blocks[i].matrix) < 1e-10);
  }
}

TEST_CASE("synthetic block-diagonal round trip") {
  std::mt19937_64 rng(7);
  const int M = 5, N = 3;
  std::vector<Eigen::MatrixXcd> blocks;
  for (int i = 0; i < M; ++i) blocks.push_back(random_matrix(N, N, rng));
  const Eigen::MatrixXcd A = reassemble_from_blocks(blocks, M, N);
  CHECK(circulant_defect(A, M, N) < 1e-12);
  const BlockDiagonalization d = block_diagonalize(A, M, N);
  CHECK(d.off_diagonal_residual < 1e-12);
  for (int i = 0; i < M; ++i) CHECK(rel(d.blocks[i], blocks[i]) < 1e-12);
}

TEST_CASE("a non-circulant perturbation is detected") {
  std::mt19937_64 rng(11);
  std::vector<Eigen::MatrixXcd> blocks;
  for (int i = 0; i < 3; ++i) blocks.push_back(random_matrix(3, 3, rng));
  Eigen::MatrixXcd A = reassemble_from_blocks(blocks, 3, 3);
  A(0, 1) += 0.1 * A.cwiseAbs().maxCoeff();
  CHECK(circulant_defect(A, 3, 3) > 1e-3);
  CHECK(block_diagonalize(A, 3, 3).off_diagonal_residual > 1e-3);
}

TEST_CASE("binary matrix export round trips exactly") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd A = random_matrix(4, 6, rng);
  std::stringstream ss;
  write_matrix_binary(ss, A);
  CHECK(ss.str().substr(0, 4) == "BEMM");
  CHECK(ss.str().size() == 4 + 4 + 8 + 8 + 4 * 6 * 16);
  CHECK(read_matrix_binary(ss) == A);
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_matrix_binary(bad));
}

TEST_CASE("CSV matrix export") {
  Eigen::MatrixXcd A(2, 2);
  A << std::complex<double>(1, -2), 0.5, std::complex<double>(0, 3), -1;
  std::ostringstream out;
  write_matrix_csv(out, A);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 2);
  CHECK(out.str().find("1,-2,0.5,0") == 0);
}

TEST_CASE("direct quadrature single layer at V = 3") {
  const BasisFamily f = family(BasisKind::Patch, 3);
  const QuadratureReport q = assemble_quadrature_single_layer(1.0, f, f);
  const Eigen::MatrixXcd& A = q.full.matrix;
  REQUIRE(A.rows() == 9);
  for (int i = 0; i < 9; ++i) CHECK(A(i, i).real() > 0.0);
  CHECK(rel(A.transpose(), A) < 1e-3);
  CHECK(circulant_defect(A, 3, 3) < 1e-3);
  const FullMatrix modal = assemble_full_modal(OperatorKind::SingleLayer, 1.0, f, f, TruncationPolicy::fixed(24, 400));
  CHECK(rel(A, modal.matrix) < 2e-3);
}

TEST_CASE("reference routes reject out-of-range inputs") {
  const BasisFamily f9 = family(BasisKind::Patch, 11);
  CHECK_THROWS(assemble_full_modal(OperatorKind::SingleLayer, 1.0, f9, f9, TruncationPolicy::fixed(1, 30)));
  const BasisFamily f3 = family(BasisKind::Patch, 3);
  CHECK_THROWS(assemble_full_modal(OperatorKind::SingleLayer, 1.0, f3, f3,
                                   TruncationPolicy::defaults(f3.kind, f3.kind, 3, 1.0)));
  CHECK_THROWS(assemble_quadrature_single_layer(5.0, f3, f3));
  const BasisFamily p3 = family(BasisKind::Pyramid, 3);
  CHECK_THROWS(assemble_quadrature_single_layer(1.0, p3, p3));
}
