#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shiftinv/classify.hpp"
#include "shiftinv/config.hpp"
#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/io.hpp"
#include "shiftinv/oracle.hpp"
#include "shiftinv/periodization.hpp"

namespace shiftinv::cli {

enum ExitCode : int { kOk = 0, kMismatch = 1, kConfig = 2, kNumeric = 3 };

struct Flags {
  std::string config;
  std::string preset;
  std::optional<int> grid;
  std::string out;
  std::string n;
  std::optional<int> nmax;
  std::string psi;
  std::optional<double> eps_zero;
  std::optional<double> class_tol;
  std::optional<double> target_tail;
  std::optional<int> m;
  std::string format = "csv";
};

/// The resolved inputs shared by every command.
struct Pipeline {
  RunConfig config;
  LatticeSpec lattice;
  Generator generator;
  std::filesystem::path base_dir;
};

inline IVec parse_int_vector(const std::string& text, int dim) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not an integer vector: '" + text + "'");
    }
  }
  if (static_cast<int>(parts.size()) != dim) {
    throw Error(ErrorCode::InvalidArgument, "--n needs " + std::to_string(dim) + " comma-separated integers");
  }
  IVec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = parts[i];
  return v;
}

inline RunConfig resolve_config(const Flags& f, std::filesystem::path* base_dir) {
  RunConfig c;
  c.generator = nullptr;
  if (!f.preset.empty()) c = preset(f.preset);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + f.config);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
    c = merge_config_file(std::move(c), j);
    if (base_dir) *base_dir = std::filesystem::path(f.config).parent_path();
  }
  if (f.grid) c.grid_res = *f.grid;
  if (f.eps_zero) c.eps_zero = f.eps_zero;
  if (f.class_tol) c.class_tol = *f.class_tol;
  if (f.target_tail) c.target_tail = f.target_tail;
  if (f.m) c.oracle_m = *f.m;
  if (!f.out.empty()) c.out = f.out;
  validate(c);
  return c;
}

inline Pipeline make_pipeline(const Flags& f) {
  std::filesystem::path base_dir;
  RunConfig c = resolve_config(f, &base_dir);
  LatticeSpec lattice = make_lattice(c.lattice);
  Generator g = generator_from_json(c.generator, lattice, base_dir);
  (void)l2_norm_squared(g);
  return {std::move(c), std::move(lattice), std::move(g), std::move(base_dir)};
}

inline PeriodizationTable table_for(const Pipeline& p) {
  PhiOptions opts;
  opts.target_tail = p.config.target_tail;
  return compute_phi(p.generator, p.lattice, p.config.grid_res, opts);
}

inline double eps_for(const Pipeline& p, const PeriodizationTable& t) {
  return p.config.eps_zero.value_or(default_eps_zero(t));
}

inline ClassifyOptions classify_options(const RunConfig& c) {
  ClassifyOptions o;
  o.class_tol = c.class_tol;
  return o;
}

// Writes to --out when given, otherwise to `out`.
template <typename Fn>
void emit(const RunConfig& c, std::ostream& out, Fn&& write) {
  if (c.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(c.out);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + c.out);
  write(file);
}

inline void emit_json(const RunConfig& c, std::ostream& out, const Json& j) {
  emit(c, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

inline Generator resolve_psi(const std::string& spec, const Pipeline& p) {
  if (spec.empty()) throw Error(ErrorCode::InvalidArgument, "--psi is required");
  if (spec.rfind("translate:", 0) == 0) {
    const IVec n = parse_int_vector(spec.substr(10), p.lattice.dim());
    return p.generator.translated(p.lattice.to_spatial(n));
  }
  Json j;
  if (spec.front() == '{') {
    try {
      j = Json::parse(spec);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("--psi is not valid JSON: ") + e.what());
    }
  } else if (std::find(preset_names().begin(), preset_names().end(), spec) != preset_names().end()) {
    j = preset(spec).generator;
  } else {
    std::ifstream in(spec);
    if (!in) throw Error(ErrorCode::Io, "--psi: not a preset, translate:<n>, JSON object or readable file: " + spec);
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("--psi file is not valid JSON: ") + e.what());
    }
  }
  return generator_from_json(j, p.lattice, p.base_dir);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_classify(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const PeriodizationTable table = table_for(p);
  const Classification c = classify_table(table, eps_for(p, table), classify_options(p.config));
  Json report{{"command", "classify"}};
  report.update(to_json(c));
  report["riesz"] = is_riesz(c.verdict);
  const double gram_size = std::pow(2.0 * p.config.oracle_m + 1.0, p.lattice.dim());
  if (gram_size <= static_cast<double>(kMaxGramSize)) {
    const EigenBounds eb = gram_eigen_bounds(gram_matrix(p.generator, p.lattice, p.config.oracle_m));
    report["oracle"] = Json{{"half_width", p.config.oracle_m},
                            {"lambda_min", number(eb.lambda_min)},
                            {"lambda_max", number(eb.lambda_max)}};
  } else {
    report["oracle"] = nullptr;
  }
  report["config"] = p.config.to_json();
  emit_json(p.config, out, report);
  return kOk;
}

inline int cmd_phi(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const PeriodizationTable table = table_for(p);
  if (f.format == "json") {
    Json report = to_json(table);
    report["config"] = p.config.to_json();
    emit_json(p.config, out, report);
  } else {
    emit(p.config, out, [&](std::ostream& os) { write_phi_csv(table, os); });
  }
  return kOk;
}

inline int cmd_gram(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const GramMatrix gram = gram_matrix(p.generator, p.lattice, p.config.oracle_m);
  if (f.format == "json") {
    const EigenBounds eb = gram_eigen_bounds(gram);
    Json report{{"command", "gram"},
                {"half_width", p.config.oracle_m},
                {"size", gram.size()},
                {"lambda_min", number(eb.lambda_min)},
                {"lambda_max", number(eb.lambda_max)},
                {"config", p.config.to_json()}};
    emit_json(p.config, out, report);
  } else {
    emit(p.config, out, [&](std::ostream& os) { write_gram_csv(gram, os); });
  }
  return kOk;
}

inline int cmd_coeffs(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const PeriodizationTable table = table_for(p);
  const int nmax = f.nmax.value_or(2);
  const CoefficientTable coeffs = phi_fourier_coeffs(table, nmax);
  Json rows = Json::array();
  for (std::size_t i = 0; i < coeffs.indices.size(); ++i) {
    const IVec& n = coeffs.indices[i];
    const cplx ac = autocorrelation(p.generator, p.lattice, n);
    rows.push_back(Json{{"n", ivec_json(n)},
                        {"phi_re", number(coeffs.values[i].real())},
                        {"phi_im", number(coeffs.values[i].imag())},
                        {"autocorr_re", number(ac.real())},
                        {"autocorr_im", number(ac.imag())}});
  }
  Json report{{"command", "coeffs"}, {"n_max", nmax}, {"coefficients", rows}, {"config", p.config.to_json()}};
  emit_json(p.config, out, report);
  return kOk;
}

inline int cmd_perturb(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const PeriodizationTable table = table_for(p);
  const IVec n = parse_int_vector(f.n.empty() ? std::string("1") : f.n, p.lattice.dim());
  const double eps = eps_for(p, table);
  const ClassifyOptions opts = classify_options(p.config);
  const Classification original = classify_table(table, eps, opts);
  const PerturbationCheck check = perturbation_frame_check(table, n, eps, opts);
  Json report{{"command", "perturb"},
              {"n", ivec_json(n)},
              {"original", to_json(original)},
              {"perturbed", to_json(check.perturbed)},
              {"frame_for_original_span", check.frame_for_original_span},
              {"lower_on_original", number(check.lower_on_original)},
              {"upper_on_original", number(check.upper_on_original)},
              {"config", p.config.to_json()}};
  emit_json(p.config, out, report);
  return kOk;
}

inline int cmd_project(const Flags& f, std::ostream& out) {
  const Pipeline p = make_pipeline(f);
  const Generator psi = resolve_psi(f.psi, p);
  const PeriodizationTable table = table_for(p);
  const ProjectionResult r = project_onto_span(p.generator, p.lattice, psi, table, eps_for(p, table));
  Json report{{"command", "project"},
              {"psi", psi.tag()},
              {"residual_norm_sq", number(r.residual_norm_sq)},
              {"psi_norm_sq", number(r.psi_norm_sq)},
              {"is_member", r.is_member},
              {"config", p.config.to_json()}};
  emit_json(p.config, out, report);
  return kOk;
}

/// Reproduces the Parseval-but-not-Riesz example end to end.
inline int cmd_example(const Flags& f, std::ostream& out) {
  Flags ex = f;
  ex.preset = "example";
  ex.config.clear();
  const Pipeline p = make_pipeline(ex);
  const PeriodizationTable table = table_for(p);
  const Classification c = classify_table(table, eps_for(p, table), classify_options(p.config));
  const bool riesz = is_riesz(c.verdict);
  out << "generator: " << p.generator.tag() << "  lattice A = [1]  grid N = " << table.grid_res << '\n';
  out << "verdict: " << to_string(c.verdict) << '\n';
  out << "bounds: lower = " << fmt12(c.lower.value_or(0.0)) << ", upper = " << fmt12(c.upper.value_or(0.0)) << '\n';
  out << "zero_fraction: " << fmt12(c.evidence.zero_fraction) << '\n';
  out << (riesz ? "Riesz sequence" : "not a Riesz sequence") << '\n';
  const bool ok = c.verdict == Verdict::ParsevalFrameSequence && !riesz && c.lower && c.upper &&
                  std::abs(*c.lower - 1.0) <= 1e-9 && std::abs(*c.upper - 1.0) <= 1e-9;
  out << (ok ? "reproduced" : "MISMATCH") << '\n';
  return ok ? kOk : kMismatch;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Frames of translates: periodization, classification and Gram-matrix cross-checks"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--preset", flags.preset, "built-in configuration")
        ->check(CLI::IsMember(preset_names()));
    sub->add_option("--grid", flags.grid, "grid points per axis (power of two >= 16)");
    sub->add_option("--out", flags.out, "output path (default: stdout)");
    sub->add_option("--eps-zero", flags.eps_zero, "zero-detection threshold");
    sub->add_option("--class-tol", flags.class_tol, "tolerance for Parseval/orthonormal detection");
    sub->add_option("--target-tail", flags.target_tail, "absolute truncation tail target");
    sub->add_option("--m", flags.m, "Gram oracle half-width M");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&, std::ostream&);
  };
  const Command commands[] = {
      {"classify", "classify the translate system and emit a JSON report", cmd_classify},
      {"phi", "dump the periodization grid (CSV, or JSON with --format json)", cmd_phi},
      {"gram", "dump the Gram finite section (CSV, or eigenvalue bounds with --format json)", cmd_gram},
      {"coeffs", "Fourier coefficients of Φ next to the lattice autocorrelation", cmd_coeffs},
      {"perturb", "classify f + T_{An} f", cmd_perturb},
      {"project", "project psi onto the span of the translates", cmd_project},
      {"example", "reproduce the Parseval-but-not-Riesz example", cmd_example},
  };
  int (*selected)(const Flags&, std::ostream&) = nullptr;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub);
    const std::string name = cmd.name;
    if (name == "phi" || name == "gram") {
      sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }
    if (name == "perturb") sub->add_option("--n", flags.n, "integer shift vector, comma-separated");
    if (name == "coeffs") sub->add_option("--nmax", flags.nmax, "largest |n|_inf");
    if (name == "project") sub->add_option("--psi", flags.psi, "preset, translate:<n>, JSON object or file")->required();
    sub->callback([&selected, run = cmd.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }
  try {
    return selected(flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kNumeric : kConfig;
  } catch (const Json::exception& e) {
    err << "error: malformed configuration: " << e.what() << '\n';
    return kConfig;
  }
}

}  // namespace shiftinv::cli
