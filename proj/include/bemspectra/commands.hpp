#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/run_config.hpp"
#include "bemspectra/sphere_grid.hpp"

namespace bemspectra {

enum ExitCode : int { kExitOk = 0, kExitTolerance = 1, kExitInvalidConfig = 2, kExitNumerical = 3 };

/// Roughly log-spaced distinct integers from lo to hi inclusive.
std::vector<int> log_spaced_integers(int lo, int hi, int count);

struct GramConvergence {
  int V = 0;
  BasisKind basis = BasisKind::Patch;
  std::vector<int> L;
  std::vector<double> deviation;  // ||G_{p=0}(L) - I||_F / ||I||_F
};

/// p = 0 Gram block with every branch summed to exactly L (s = 0 only; the
/// images vanish at p = 0).
GramConvergence gram_convergence(int V, BasisKind basis, const std::vector<int>& L, Execution execution = Execution::Parallel);

struct OracleCheck {
  std::string name;
  OperatorKind kind;
  int V = 0;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleSettings {
  std::vector<OperatorKind> kinds{OperatorKind::Identity, OperatorKind::SingleLayer, OperatorKind::Hypersingular};
  std::vector<int> V_list{3, 5};
  double ka = 2.0;
  BasisKind test = BasisKind::Patch;
  BasisKind source = BasisKind::Patch;
  /// Shared fixed truncation of the two routes.
  int s_max = 4;
  int l_cap = 48;
  bool quadrature = false;
  /// Perturbs one entry of each full matrix; every comparison must then fail.
  bool corrupt_one_entry = false;
};

/// Full modal matrix vs blocks: eigenvalue multisets (1e-8), off-diagonal
/// residual (1e-10), p = 0 block (1e-10), circulant defect (1e-12); with
/// quadrature, single-layer patch V = 3, ka = 1 eigenvalues (2e-3).
std::vector<OracleCheck> oracle_checks(const OracleSettings& settings);

/// Runs one resolved command, writing into config.out. Returns an ExitCode;
/// exceptions from the numerics are mapped to kExitNumerical, invalid
/// arguments to kExitInvalidConfig.
int run_command(const RunConfig& config, std::ostream& log);

/// Command-line entry: subcommand, flags, optional --config file whose values
/// the flags override.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bemspectra
