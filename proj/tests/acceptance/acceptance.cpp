#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bemspectra/assignment.hpp"
#include "bemspectra/commands.hpp"
#include "bemspectra/continuous_spectra.hpp"
#include "bemspectra/modal_blocks.hpp"
#include "bemspectra/reference_assembly.hpp"
#include "bemspectra/specfun.hpp"
#include "bemspectra/spectral_error.hpp"

using namespace bemspectra;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < time_limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s: %s | %s | %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
              time_limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

BasisFamily family(BasisKind kind, int V) {
  BasisFamily f;
  f.kind = kind;
  f.grid = SphereGrid(V);
  return f;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bemspectra");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome special_functions() {
  double wronskian = 0.0;
  for (const double x : {0.1, 1.0, 10.0, 100.0}) {
    const SphericalBesselTable t(200, x);
    for (int l = 0; l <= 200; ++l) {
      const ScaledReal w = t.j(l) * t.y_prime(l) - t.j_prime(l) * t.y(l);
      wronskian = std::max(wronskian, std::abs(w.to_double() * x * x - 1.0));
    }
  }
  const GaussRule g = gauss_legendre(96);
  double ortho = 0.0;
  for (int m = 0; m <= 60; ++m) {
    const int count = 60 - m + 1;
    std::vector<std::vector<double>> cols(g.nodes.size(), std::vector<double>(count));
    for (std::size_t q = 0; q < g.nodes.size(); ++q) normalized_legendre_column(m, 60, g.nodes[q], cols[q]);
    for (int a = 0; a < count; ++a) {
      for (int b = a; b < count; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < g.nodes.size(); ++q) s += g.weights[q] * cols[q][a] * cols[q][b];
        ortho = std::max(ortho, std::abs(s - (a == b ? 2.0 : 0.0)));
      }
    }
  }
  return {wronskian < 1e-10 && ortho < 1e-10,
          "max Wronskian defect " + fmt("%.2e", wronskian) + ", max orthogonality defect " + fmt("%.2e", ortho)};
}

Outcome closed_form_anchor() {
  double worst = 0.0;
  for (const double ka : {0.5, std::numbers::pi, 10.0, 30.0}) {
    worst = std::max(worst, std::abs(lambda_single_layer(0, ka) - std::sin(ka) * std::polar(1.0, -ka)));
  }
  return {worst < 1e-12, "max |lambda_0 - sin(ka) e^{-i ka}| = " + fmt("%.2e", worst)};
}

Outcome gram() {
  const int V = 15;
  const std::vector<int> L = log_spaced_integers(2 * V, 50 * V, 12);
  const GramConvergence g = gram_convergence(V, BasisKind::Patch, L);
  bool monotone = true;
  for (std::size_t i = 1; i < g.deviation.size(); ++i) monotone = monotone && g.deviation[i] < g.deviation[i - 1];
  const double last = g.deviation.back();
  return {monotone && last < 1e-2, std::string(monotone ? "monotone" : "NOT monotone") + ", deviation " +
                                       fmt("%.3e", g.deviation.front()) + " at L=" + std::to_string(L.front()) +
                                       " -> " + fmt("%.3e", last) + " at L=" + std::to_string(L.back())};
}

Outcome oracle_equivalence() {
  OracleSettings s;
  s.ka = 2.0;
  s.V_list = {3, 5};
  const auto checks = oracle_checks(s);
  std::map<std::string, double> worst;
  bool pass = !checks.empty();
  for (const OracleCheck& c : checks) {
    pass = pass && c.pass;
    worst[c.name] = std::max(worst[c.name], c.value);
  }
  std::string detail;
  for (const auto& [name, v] : worst) detail += (detail.empty() ? "" : ", ") + name + " " + fmt("%.1e", v);
  return {pass, detail};
}

Outcome quadrature() {
  const BasisFamily f = family(BasisKind::Patch, 3);
  const QuadratureReport q = assemble_quadrature_single_layer(1.0, f, f);
  const FullMatrix modal = assemble_full_modal(OperatorKind::SingleLayer, 1.0, f, f, TruncationPolicy::fixed(24, 400));
  const auto a = dense_eigenvalues(q.full.matrix), b = dense_eigenvalues(modal.matrix);
  const double d = multiset_relative_distance(a, b);
  return {d < 2e-3, "eigenvalue distance " + fmt("%.2e", d) + ", refinement change " +
                        fmt("%.1e", q.max_refinement_change) + (q.accuracy_flag ? " (flagged)" : "")};
}

Outcome continuous_scaling() {
  const std::vector<double> ka{10, 20, 40, 80};
  std::vector<double> s, n;
  for (const double k : ka) {
    const int l = static_cast<int>(std::lround(k));
    s.push_back(std::abs(lambda_single_layer(l, k)));
    n.push_back(std::abs(lambda_hypersingular(l, k)));
  }
  const double es = fit_loglog(ka, s).slope, en = fit_loglog(ka, n).slope;
  return {std::abs(es - 1.0 / 3.0) <= 0.1 && std::abs(en + 1.0 / 3.0) <= 0.1,
          "S exponent " + fmt("%.4f", es) + ", N exponent " + fmt("%.4f", en)};
}

Outcome hf_scaling() {
  const std::vector<double> ka{10, 15, 20, 30, 40};
  const SweepSettings settings;
  const SweepResult n = hf_sweep(OperatorKind::Hypersingular, 1.0, ka, settings);
  const SweepResult s = hf_sweep(OperatorKind::SingleLayer, 1.0, ka, settings);
  auto values = [](const SweepResult& r) {
    std::string t;
    for (std::size_t i = 0; i < r.ka_list.size(); ++i)
      t += (i ? "," : "") + fmt("%.3f", r.per_ka_max_transition_error[i]);
    return t;
  };
  const bool pass = std::abs(n.fitted_exponent - 1.0 / 3.0) <= 0.15 && std::abs(s.fitted_exponent + 1.0 / 3.0) <= 0.15;
  const AliasingDecomposition dn = aliasing_decomposition(OperatorKind::Hypersingular, 1.0, ka, settings);
  const AliasingDecomposition ds = aliasing_decomposition(OperatorKind::SingleLayer, 1.0, ka, settings);
  return {pass, "N exponent " + fmt("%+.3f", n.fitted_exponent) + " (max|E| " + values(n) + "), S exponent " +
                    fmt("%+.3f", s.fitted_exponent) + " (max|E| " + values(s) +
                    "); principal-only/visible-only exponents N " + fmt("%+.3f", dn.principal_exponent) + "/" +
                    fmt("%+.3f", dn.visible_exponent) + ", S " + fmt("%+.3f", ds.principal_exponent) + "/" +
                    fmt("%+.3f", ds.visible_exponent)};
}

Outcome multiplicity() {
  bool pass = true;
  std::string detail;
  for (const OperatorKind kind : {OperatorKind::SingleLayer, OperatorKind::Hypersingular}) {
    const SpectrumAnalysis a = analyze_spectrum(kind, 10.0, 21, SweepSettings{});
    std::map<int, int> count;
    bool within = true;
    for (const auto& r : a.records()) {
      ++count[r.l];
      if (std::abs(r.p) > r.l) within = false;
    }
    int bad = 0;
    for (int l = 0; l <= 10; ++l) bad += count[l] != 2 * l + 1;
    pass = pass && bad == 0 && within;
    detail += (detail.empty() ? "" : ", ") + std::string(to_string(kind)) + ": " + std::to_string(bad) +
              " indices off, |p| <= l " + (within ? "holds" : "violated");
  }
  return {pass, detail};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "bemspectra_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs{
      {"spectrum", "--ka", "10", "--V", "21"},
      {"gram-convergence", "--V", "15"},
      {"oracle-check"},
      {"error-sweep", "--ka-list", "6,8,10,12"},
  };
  int files = 0, differ = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      dirs.push_back(root / (std::to_string(i) + tag));
      auto args = runs[i];
      args.insert(args.end(), {"--format", "csv", "--out", dirs.back().string()});
      if (const int code = cli(args); code != kExitOk) return {false, runs[i][0] + " exited " + std::to_string(code)};
    }
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      if (slurp(e.path()) != slurp(dirs[1] / e.path().filename())) ++differ;
    }
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0, std::to_string(files) + " CSV files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  criterion("AC1", "special-function suite", 30, special_functions);
  criterion("AC2", "closed-form anchor for lambda_0", 10, closed_form_anchor);
  criterion("AC3", "Gram convergence, patch, V=15", 120, gram);
  criterion("AC4", "oracle equivalence, V in {3,5}, ka=2", 60, oracle_equivalence);
  criterion("AC5", "quadrature cross-check, V=3, ka=1", 120, quadrature);
  criterion("AC6", "continuous-spectrum transition scaling", 10, continuous_scaling);
  criterion("AC7", "high-frequency spectral-error scaling", 900, hf_scaling);
  criterion("AC8", "multiplicity accounting, ka=10, V=21", 120, multiplicity);
  criterion("AC9", "determinism of CSV outputs", 600, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
