#include "bemspectra/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

#include "bemspectra/assignment.hpp"
#include "bemspectra/reference_assembly.hpp"
#include "bemspectra/report_writers.hpp"
#include "bemspectra/spectral_error.hpp"

namespace bemspectra {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

BasisFamily family(BasisKind kind, BasisRole role, int V) {
  BasisFamily f;
  f.kind = kind;
  f.role = role;
  f.grid = SphereGrid(V);
  return f;
}

std::string kind_tag(OperatorKind kind) { return std::string(to_string(kind)); }

void emit(const RunConfig& config, const std::string& file, const std::string& text) {
  write_text_file(fs::path(config.out) / file, text);
}

SweepSettings sweep_settings(const RunConfig& config) {
  SweepSettings s;
  s.test = *config.basis_test;
  s.source = *config.basis_source;
  s.overrides = config.overrides;
  return s;
}

CsvTable records_table(const std::string& name, const std::vector<SpectralErrorRecord>& records) {
  CsvTable t(name, {"kind", "ka", "V", "p", "l", "matrix_re", "matrix_im", "operator_re", "operator_im", "abs_error",
                    "region", "reliable", "resonant"});
  for (const auto& r : records) {
    t.row()
        .add(kind_tag(r.kind))
        .add(r.ka)
        .add(r.V)
        .add(r.p)
        .add(r.l)
        .add(r.matrix_eigenvalue.real())
        .add(r.matrix_eigenvalue.imag())
        .add(r.operator_eigenvalue.real())
        .add(r.operator_eigenvalue.imag())
        .add(r.error_magnitude())
        .add(std::string(to_string(r.region)))
        .add(r.reliable)
        .add(r.resonant);
  }
  return t;
}

// ---------------------------------------------------------------------------

int cmd_gram_convergence(const RunConfig& config, std::ostream& log) {
  const int V = *config.V;
  const std::vector<int> L = log_spaced_integers(2 * V, 50 * V, config.l_points);
  const GramConvergence g = gram_convergence(V, *config.basis_test, L);

  bool monotone = true;
  for (std::size_t i = 1; i < g.deviation.size(); ++i) monotone = monotone && g.deviation[i] < g.deviation[i - 1];
  const double final_dev = g.deviation.back();
  const bool pass = final_dev < *config.threshold;

  if (config.formats.csv) {
    CsvTable t("gram_convergence", {"V", "basis", "L", "deviation"});
    for (std::size_t i = 0; i < L.size(); ++i) t.row().add(V).add(std::string(to_string(g.basis))).add(L[i]).add(g.deviation[i]);
    emit(config, "gram_convergence.csv", t.render());
  }
  if (config.formats.svg) {
    SvgPlot plot{"Gram block p=0 deviation from identity, V=" + std::to_string(V), "L", "||G(L) - I||_F / ||I||_F",
                 true, true, {}};
    PlotSeries s{std::string(to_string(g.basis)), {}, g.deviation, true, kPalette[0]};
    for (const int l : L) s.x.push_back(l);
    plot.series.push_back(s);
    emit(config, "gram_convergence.svg", plot.render());
  }
  if (config.formats.json) {
    json j;
    j["V"] = V;
    j["basis"] = to_string(g.basis);
    j["L"] = L;
    j["deviation"] = g.deviation;
    j["monotone"] = monotone;
    j["final_deviation"] = final_dev;
    j["threshold"] = *config.threshold;
    j["pass"] = pass;
    emit(config, "gram_convergence.json", j.dump(2) + "\n");
  }
  log << "gram-convergence V=" << V << " final deviation " << final_dev << " at L=" << L.back()
      << (monotone ? " (monotone)" : " (not monotone)") << (pass ? " PASS" : " FAIL") << '\n';
  return pass ? kExitOk : kExitTolerance;
}

int cmd_spectrum(const RunConfig& config, std::ostream& log) {
  const double ka = *config.ka;
  const int V = *config.V;
  const SweepSettings settings = sweep_settings(config);
  json summary = json::array();
  bool pass = true;
  for (const OperatorKind kind : config.kinds) {
    const SpectrumAnalysis a = analyze_spectrum(kind, ka, V, settings);
    const auto records = a.records();
    const std::string tag = kind_tag(kind);

    double max_reliable = 0.0;
    std::size_t reliable = 0;
    for (const auto& r : records) {
      if (!r.reliable || r.resonant) continue;
      ++reliable;
      max_reliable = std::max(max_reliable, r.error_magnitude());
    }
    std::vector<std::complex<double>> unmatched;
    CsvTable left("unmatched_" + tag, {"kind", "ka", "V", "p", "matrix_re", "matrix_im"});
    for (const auto& b : a.blocks) {
      for (const auto& z : b.unmatched_matrix_eigenvalues) {
        unmatched.push_back(z);
        left.row().add(tag).add(ka).add(V).add(b.p).add(z.real()).add(z.imag());
      }
    }

    if (config.formats.csv) {
      emit(config, "spectrum_" + tag + ".csv", records_table("spectrum_" + tag, records).render());
      emit(config, "unmatched_" + tag + ".csv", left.render());
    }
    if (config.formats.svg) {
      SvgPlot plane{tag + " spectrum, ka=" + format_double(ka) + ", V=" + std::to_string(V), "Re", "Im", false, false, {}};
      PlotSeries mat{"matrix", {}, {}, false, kPalette[0]};
      for (const auto& b : a.blocks) {
        for (const auto& r : b.matched) {
          mat.x.push_back(r.matrix_eigenvalue.real());
          mat.y.push_back(r.matrix_eigenvalue.imag());
        }
        for (const auto& z : b.unmatched_matrix_eigenvalues) {
          mat.x.push_back(z.real());
          mat.y.push_back(z.imag());
        }
      }
      PlotSeries op{"operator", {}, {}, true, kPalette[1]};
      const EigenvalueTable table(kind, kind == OperatorKind::Identity ? 1.0 : ka, V - 1);
      for (int l = 0; l < V; ++l) {
        op.x.push_back(table[l].real());
        op.y.push_back(table[l].imag());
      }
      plane.series = {mat, op};
      emit(config, "spectrum_" + tag + "_complex.svg", plane.render());

      SvgPlot index{tag + " |eigenvalue| by index, ka=" + format_double(ka), "l", "|lambda|", false, true, {}};
      PlotSeries mi{"matrix (matched)", {}, {}, false, kPalette[0]};
      for (const auto& r : records) {
        mi.x.push_back(r.l);
        mi.y.push_back(std::abs(r.matrix_eigenvalue));
      }
      PlotSeries oi{"operator", {}, {}, true, kPalette[1]};
      for (int l = 0; l < V; ++l) {
        oi.x.push_back(l);
        oi.y.push_back(std::abs(table[l]));
      }
      index.series = {mi, oi};
      emit(config, "spectrum_" + tag + "_index.svg", index.render());
    }
    json j;
    j["kind"] = tag;
    j["ka"] = ka;
    j["V"] = V;
    j["records"] = records.size();
    j["reliable_records"] = reliable;
    j["max_reliable_error"] = max_reliable;
    j["unmatched"] = unmatched.size();
    j["tail_estimate"] = a.tail_estimate;
    summary.push_back(j);
    log << "spectrum " << tag << " ka=" << ka << " V=" << V << ": " << records.size() << " matched, "
        << unmatched.size() << " unmatched, max reliable |E| " << max_reliable << '\n';
    if (config.threshold && !(max_reliable < *config.threshold)) pass = false;
  }
  if (config.formats.json) emit(config, "spectrum.json", summary.dump(2) + "\n");
  return pass ? kExitOk : kExitTolerance;
}

int cmd_error_sweep(const RunConfig& config, std::ostream& log) {
  const SweepSettings settings = sweep_settings(config);
  bool pass = true;
  for (const OperatorKind kind : config.kinds) {
    const SweepResult r = hf_sweep(kind, config.cells_per_ka, config.ka_list, settings);
    const std::string tag = kind_tag(kind);

    std::vector<SpectralErrorRecord> transition;
    for (const auto& point : r.points) {
      for (const auto& rec : point.records()) {
        if (rec.reliable && rec.region == SpectralRegion::Transition) transition.push_back(rec);
      }
    }
    if (config.formats.csv) {
      CsvTable t("error_sweep_" + tag, {"kind", "ka", "V", "max_transition_error", "argmax_l", "argmax_p"});
      for (std::size_t i = 0; i < r.ka_list.size(); ++i) {
        t.row()
            .add(tag)
            .add(r.ka_list[i])
            .add(r.V_list[i])
            .add(r.per_ka_max_transition_error[i])
            .add(r.per_ka_argmax_l[i])
            .add(r.per_ka_argmax_p[i]);
      }
      emit(config, "error_sweep_" + tag + ".csv", t.render());
      emit(config, "error_sweep_" + tag + "_records.csv",
           records_table("error_sweep_" + tag + "_records", transition).render());
    }
    json j;
    j["kind"] = tag;
    j["cells_per_ka"] = r.hk_constant;
    j["ka_list"] = r.ka_list;
    j["V_list"] = r.V_list;
    j["per_ka_max_transition_error"] = r.per_ka_max_transition_error;
    j["per_ka_argmax_l"] = r.per_ka_argmax_l;
    j["per_ka_argmax_p"] = r.per_ka_argmax_p;
    j["fitted_exponent"] = r.fitted_exponent;
    j["fit_residual"] = r.fit_residual;
    if (config.decompose) {
      const AliasingDecomposition d = aliasing_decomposition(kind, config.cells_per_ka, config.ka_list, settings);
      j["decomposition"] = {{"full", d.full},
                            {"principal_only", d.principal_only},
                            {"visible_only", d.visible_only},
                            {"full_exponent", d.full_exponent},
                            {"principal_exponent", d.principal_exponent},
                            {"visible_exponent", d.visible_exponent}};
    }
    if (config.formats.json) emit(config, "error_sweep_" + tag + ".json", j.dump(2) + "\n");
    if (config.formats.svg) {
      SvgPlot plot{tag + " transition max|E|, V = round_to_odd(" + format_double(r.hk_constant) + " ka)", "ka",
                   "max |E|", true, true, {}};
      plot.series.push_back({"measured", r.ka_list, r.per_ka_max_transition_error, true, kPalette[0]});
      double sx = 0, sy = 0;
      for (std::size_t i = 0; i < r.ka_list.size(); ++i) {
        sx += std::log(r.ka_list[i]);
        sy += r.per_ka_max_transition_error[i] > 0 ? std::log(r.per_ka_max_transition_error[i]) : 0.0;
      }
      sx /= r.ka_list.size();
      sy /= r.ka_list.size();
      PlotSeries fit{"fit slope " + format_double(std::round(r.fitted_exponent * 1000) / 1000), {}, {}, true, kPalette[1]};
      const double expected = kind == OperatorKind::Hypersingular ? 1.0 / 3.0 : -1.0 / 3.0;
      PlotSeries ref{kind == OperatorKind::Identity ? "flat" : (expected > 0 ? "slope +1/3" : "slope -1/3"), {}, {}, true,
                     kPalette[2]};
      for (const double ka : r.ka_list) {
        fit.x.push_back(ka);
        fit.y.push_back(std::exp(sy + r.fitted_exponent * (std::log(ka) - sx)));
        ref.x.push_back(ka);
        ref.y.push_back(std::exp(sy + (kind == OperatorKind::Identity ? 0.0 : expected) * (std::log(ka) - sx)));
      }
      plot.series.push_back(fit);
      plot.series.push_back(ref);
      emit(config, "error_sweep_" + tag + ".svg", plot.render());
    }
    log << "error-sweep " << tag << ": fitted exponent " << r.fitted_exponent << " (residual " << r.fit_residual << ")\n";
    if (config.residual_bound && r.fit_residual > *config.residual_bound) pass = false;
  }
  return pass ? kExitOk : kExitTolerance;
}

int cmd_oracle_check(const RunConfig& config, std::ostream& log) {
  OracleSettings s;
  s.kinds = config.kinds;
  if (config.V) s.V_list = {*config.V};
  s.ka = *config.ka;
  s.test = *config.basis_test;
  s.source = *config.basis_source;
  if (config.overrides.s_max) s.s_max = *config.overrides.s_max;
  if (config.overrides.l_cap) s.l_cap = *config.overrides.l_cap;
  s.quadrature = config.quadrature;
  s.corrupt_one_entry = config.corrupt_self_test;
  const std::vector<OracleCheck> checks = oracle_checks(s);

  bool all = true;
  CsvTable t("oracle_checks", {"check", "kind", "V", "value", "tolerance", "pass"});
  json j = json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    t.row().add(c.name).add(kind_tag(c.kind)).add(c.V).add(c.value).add(c.tolerance).add(c.pass);
    j.push_back({{"check", c.name}, {"kind", kind_tag(c.kind)}, {"V", c.V}, {"value", c.value}, {"tolerance", c.tolerance},
                 {"pass", c.pass}});
    log << (c.pass ? "ok   " : "FAIL ") << c.name << " " << kind_tag(c.kind) << " V=" << c.V << ": " << c.value
        << " (tol " << c.tolerance << ")\n";
  }
  if (config.formats.csv) emit(config, "oracle_checks.csv", t.render());
  if (config.formats.json) emit(config, "oracle_checks.json", j.dump(2) + "\n");
  return all ? kExitOk : kExitTolerance;
}

}  // namespace

std::vector<int> log_spaced_integers(int lo, int hi, int count) {
  if (lo < 1 || hi < lo || count < 2) throw std::invalid_argument("log spacing needs 1 <= lo <= hi and count >= 2");
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    const int v = i == count - 1 ? hi : static_cast<int>(std::lround(lo * std::pow(static_cast<double>(hi) / lo, t)));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

GramConvergence gram_convergence(int V, BasisKind basis, const std::vector<int>& L, Execution execution) {
  GramConvergence g;
  g.V = V;
  g.basis = basis;
  g.L = L;
  g.deviation.assign(L.size(), 0.0);
  const BasisFamily test = family(basis, BasisRole::Test, V);
  const BasisFamily source = family(basis, BasisRole::Source, V);
  const auto count = static_cast<long>(L.size());
  std::vector<std::exception_ptr> errors(L.size());
  auto one = [&](long i) {
    try {
      const ModalAssembler a(OperatorKind::Identity, 1.0, test, source, TruncationPolicy::fixed(0, L[i]));
      const Eigen::MatrixXcd G = a.assemble_block(0).matrix;
      g.deviation[i] = (G - Eigen::MatrixXcd::Identity(V, V)).norm() / std::sqrt(static_cast<double>(V));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) one(i);
  } else {
    for (long i = 0; i < count; ++i) one(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return g;
}

std::vector<OracleCheck> oracle_checks(const OracleSettings& settings) {
  std::vector<OracleCheck> checks;
  auto add = [&](std::string name, OperatorKind kind, int V, double value, double tol) {
    checks.push_back({std::move(name), kind, V, value, tol, std::isfinite(value) && value < tol});
  };
  for (const OperatorKind kind : settings.kinds) {
    for (const int V : settings.V_list) {
      const BasisFamily test = family(settings.test, BasisRole::Test, V);
      const BasisFamily source = family(settings.source, BasisRole::Source, V);
      const TruncationPolicy policy = TruncationPolicy::fixed(settings.s_max, std::max(settings.l_cap, V + V / 2));
      FullMatrix full = assemble_full_modal(kind, settings.ka, test, source, policy);
      if (settings.corrupt_one_entry) full.matrix(0, 1) += 1e-2 * full.matrix.cwiseAbs().maxCoeff();

      const ModalAssembler assembler(kind, settings.ka, test, source, policy);
      const std::vector<ModalBlock> blocks = assembler.assemble_all_blocks();
      std::vector<std::complex<double>> union_eigs;
      for (const auto& b : blocks) {
        const auto e = block_eigenvalues(b).values;
        union_eigs.insert(union_eigs.end(), e.begin(), e.end());
      }
      const auto full_eigs = dense_eigenvalues(full.matrix);
      add("eigenvalue_multiset", kind, V, multiset_relative_distance(full_eigs, union_eigs), 1e-8);

      const BlockDiagonalization d = block_diagonalize(full);
      add("off_diagonal_residual", kind, V, d.off_diagonal_residual, 1e-10);

      const int half = V / 2;
      const Eigen::MatrixXcd& direct0 = blocks[half].matrix;
      add("p0_block", kind, V, (d.blocks[half] - direct0).norm() / direct0.norm(), 1e-10);
      double worst = 0.0;
      for (int i = 0; i < V; ++i) worst = std::max(worst, (d.blocks[i] - blocks[i].matrix).norm() / blocks[i].matrix.norm());
      add("all_blocks", kind, V, worst, 1e-10);
      add("circulant_defect", kind, V, circulant_defect(full.matrix, V, V), 1e-12);
    }
  }
  if (settings.quadrature) {
    const BasisFamily patch = family(BasisKind::Patch, BasisRole::Test, 3);
    const QuadratureReport q = assemble_quadrature_single_layer(1.0, patch, patch);
    FullMatrix modal = assemble_full_modal(OperatorKind::SingleLayer, 1.0, patch, patch, TruncationPolicy::fixed(24, 400));
    if (settings.corrupt_one_entry) modal.matrix(0, 1) += 1e-2 * modal.matrix.cwiseAbs().maxCoeff();
    add("quadrature_eigenvalues", OperatorKind::SingleLayer, 3,
        multiset_relative_distance(dense_eigenvalues(q.full.matrix), dense_eigenvalues(modal.matrix)), 2e-3);
    add("quadrature_symmetry", OperatorKind::SingleLayer, 3,
        (q.full.matrix - q.full.matrix.transpose()).norm() / q.full.matrix.norm(), 1e-3);
    add("quadrature_refinement", OperatorKind::SingleLayer, 3, q.max_refinement_change, 1e-3);
  }
  return checks;
}

int run_command(const RunConfig& config, std::ostream& log) {
  try {
    RunConfig resolved = config;
    resolved.resolve();
    fs::create_directories(resolved.out);
    write_text_file(fs::path(resolved.out) / "run_config.txt", resolved.serialize());
    switch (resolved.command) {
      case Command::GramConvergence: return cmd_gram_convergence(resolved, log);
      case Command::Spectrum: return cmd_spectrum(resolved, log);
      case Command::ErrorSweep: return cmd_error_sweep(resolved, log);
      case Command::OracleCheck: return cmd_oracle_check(resolved, log);
    }
    return kExitInvalidConfig;
  } catch (const SaturationError& e) {
    log << "saturation: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    log << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis of BEM matrices on the sphere"};
  app.require_subcommand(1);

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--kind", "kind", "operator kind(s): single-layer, hypersingular, identity (comma list)"},
      {"--ka", "ka", "wavenumber times radius"},
      {"--ka-list", "ka_list", "comma-separated ka values for error-sweep"},
      {"--V", "V", "cells per direction (odd)"},
      {"--cells-per-ka", "cells_per_ka", "c_v in V = round_to_odd(c_v ka)"},
      {"--basis-test", "basis_test", "patch or pyramid"},
      {"--basis-source", "basis_source", "patch or pyramid"},
      {"--s-max", "s_max", "Fourier image count"},
      {"--l-cap", "l_cap", "hard cap on l per branch"},
      {"--tail-tol", "tail_tol", "relative tail threshold"},
      {"--tail-window", "tail_window", "consecutive sub-threshold terms"},
      {"--out", "out", "output directory"},
      {"--format", "format", "comma list of csv, json, svg"},
      {"--threshold", "threshold", "pass threshold"},
      {"--residual-bound", "residual_bound", "maximum fit residual for error-sweep"},
      {"--l-points", "l_points", "number of L values for gram-convergence"},
      {"--seed", "seed", "seed for synthetic inputs"},
  };
  static const Flag switches[] = {
      {"--quadrature", "quadrature", "also run the quadrature cross-check"},
      {"--corrupt-self-test", "corrupt_self_test", "perturb one matrix entry; checks must fail"},
      {"--decompose", "decompose", "report the aliasing decomposition"},
  };

  std::map<std::string, std::string> values;
  std::map<std::string, bool> switched;
  std::string config_file;
  std::string chosen;
  for (const Command c : {Command::GramConvergence, Command::Spectrum, Command::ErrorSweep, Command::OracleCheck}) {
    CLI::App* sub = app.add_subcommand(std::string(to_string(c)));
    sub->add_option("--config", config_file, "key=value config file; flags override it");
    for (const auto& f : flags) sub->add_option(f.name, values[f.key], f.help);
    for (const auto& f : switches) sub->add_flag(f.name, switched[f.key], f.help);
    sub->callback([&chosen, c] { chosen = std::string(to_string(c)); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInvalidConfig;
  }

  RunConfig config;
  try {
    if (!config_file.empty()) config = load_config_file(config_file);
    config.command = parse_command(chosen);
    for (const CLI::App* sub : app.get_subcommands()) {
      for (const auto& f : flags) {
        if (sub->count(f.name) > 0) config.set(f.key, values[f.key]);
      }
      for (const auto& f : switches) {
        if (sub->count(f.name) > 0) config.set(f.key, switched[f.key] ? "true" : "false");
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return run_command(config, out);
}

}  // namespace bemspectra
