#include <chrono>
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/moment_table.hpp"

using namespace bemspectra;

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const int V = argc > 1 ? std::atoi(argv[1]) : 21;
  const double ka = argc > 2 ? std::atof(argv[2]) : 20.0;
  std::cout << "threads " << omp_get_max_threads() << ", V=" << V << ", ka=" << ka << "\n";

  BasisFamily f;
  f.kind = BasisKind::Pyramid;
  f.grid = SphereGrid(V);
  const int l_max = 16 * V;
  std::vector<int> orders;
  for (int m = 0; m <= 6 * V; ++m) orders.push_back(m);

  double checksum_serial = 0.0, checksum_parallel = 0.0;
  const double t_ms = seconds([&] {
    const MomentCache c(f, l_max, orders, Execution::Serial);
    checksum_serial = (*c.find(V))(l_max, V / 2);
  });
  const double t_mp = seconds([&] {
    const MomentCache c(f, l_max, orders, Execution::Parallel);
    checksum_parallel = (*c.find(V))(l_max, V / 2);
  });
  std::cout << "moment cache   serial " << t_ms << " s, parallel " << t_mp << " s, speedup " << t_ms / t_mp
            << (checksum_serial == checksum_parallel ? ", identical" : ", MISMATCH") << "\n";

  const TruncationPolicy policy = TruncationPolicy::defaults(f.kind, f.kind, V, ka);
  const ModalAssembler assembler(OperatorKind::SingleLayer, ka, f, f, policy);
  std::vector<ModalBlock> serial, parallel;
  const double t_bs = seconds([&] { serial = assembler.assemble_all_blocks_serial(); });
  const double t_bp = seconds([&] { parallel = assembler.assemble_all_blocks(); });
  bool same = serial.size() == parallel.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i) same = serial[i].matrix == parallel[i].matrix;
  std::cout << "block assembly serial " << t_bs << " s, parallel " << t_bp << " s, speedup " << t_bs / t_bp
            << (same ? ", identical" : ", MISMATCH") << "\n";
  return same && checksum_serial == checksum_parallel ? 0 : 1;
}
