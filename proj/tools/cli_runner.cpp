// Batch front end over the library: loads body definitions, runs one
// experiment per invocation, and writes machine-readable reports.
//
// Exit codes are a stable contract for CI pipelines:
//   0 success, 1 usage, 2 bad input, 3 numeric failure, 4 inequality violated.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hbm/body.hpp"
#include "hbm/corpus.hpp"
#include "hbm/errors.hpp"
#include "hbm/inequality.hpp"
#include "hbm/io.hpp"
#include "hbm/solver.hpp"
#include "hbm/spectrum.hpp"

namespace {

using namespace hbm;

// Command-level argument problems that CLI11 cannot see (wrong body count,
// unknown inequality name); mapped to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim = 3;
  int lmax = 0;  // 0: body files and corpora pick their own resolution
  double tol = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dim", cfg.dim, "Ambient dimension for generated bodies")
      ->check(CLI::IsMember({2, 3}));
  cmd->add_option("--lmax", cfg.lmax, "Basis cutoff override")->check(CLI::Range(4, 256));
  cmd->add_option("--tol", cfg.tol, "Tolerance override")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Seed for randomized corpora");
  cmd->add_option("--out", cfg.out, "Output file (default: stdout)");
  cmd->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty())
    std::fputs(text.c_str(), stdout);
  else
    write_text_file(cfg.out, text);
}

void require_json(const RunConfig& cfg, const char* cmd) {
  if (cfg.format != "json") throw UsageError(std::string(cmd) + " only writes json");
}

SupportField load_body(const std::string& path, const RunConfig& cfg) {
  return realize_body(parse_body_spec(read_text_file(path)), cfg.lmax);
}

std::string set_text(const std::vector<int>& ks) {
  std::string s = "{";
  for (size_t i = 0; i < ks.size(); ++i) s += (i ? "," : "") + std::to_string(ks[i]);
  return s + "}";
}

int cmd_spectrum(const RunConfig& cfg, const std::string& body_file, int k) {
  require_json(cfg, "spectrum");
  SupportField K = load_body(body_file, cfg);
  SpectralResult S = spectrum(assemble(K), k);
  double le = std::nan("");
  try {
    le = lambda1e(K);
  } catch (const NotSymmetricError&) {
  }
  emit(cfg, spectral_report_json(S, lambda2(K), le));
  std::fprintf(stderr, "spectrum: %d eigenvalues in [%.6g, %.6g], %zu clusters\n", k,
               S.eigenvalues[0], S.eigenvalues[k - 1], S.clusters.size());
  return 0;
}

// The function-based bounds take two bodies and test the proof function
// h_L / h_K; the mixed-volume bounds consume the bodies directly.
int cmd_check(const RunConfig& cfg, const std::string& raw_name,
              const std::vector<std::string>& files) {
  double tol = cfg.tol > 0 ? cfg.tol : 1e-7;
  using Runner = std::function<InequalityReport(const std::vector<SupportField>&)>;
  struct Entry {
    const char* name;
    size_t arity;
    Runner run;
  };
  auto ratio_jet = [](const SupportField& K, const SupportField& L) {
    return jet_ratio(L.jet, K.jet);
  };
  const std::vector<Entry> table = {
      {"local_bm", 2, [&](const auto& b) { return local_bm(b[0], ratio_jet(b[0], b[1]), tol); }},
      {"local_af", 2,
       [&](const auto& b) { return local_af({&b[0]}, ratio_jet(b[0], b[1]), tol); }},
      {"spectral_gap_ineq", 2,
       [&](const auto& b) { return spectral_gap_ineq(b[0], ratio_jet(b[0], b[1]), tol); }},
      {"reverse_ineq", 2,
       [&](const auto& b) { return reverse_ineq(b[0], ratio_jet(b[0], b[1]), tol); }},
      {"stability_bm", 2,
       [&](const auto& b) { return stability_bm(b[0], ratio_jet(b[0], b[1]), tol); }},
      {"minkowski_second_stability", 2,
       [&](const auto& b) { return minkowski_second_stability(b[0], b[1], tol); }},
      {"symmetric_stability", 2,
       [&](const auto& b) { return symmetric_stability(b[0], b[1], tol); }},
      {"ratio_bm_stability", 3,
       [&](const auto& b) { return ratio_bm_stability(b[0], b[1], b[2], tol); }},
      {"xk_inequality", 1, [&](const auto& b) { return xk_inequality(b[0], tol); }},
      {"heintze_karcher_planar", 2,
       [&](const auto& b) { return heintze_karcher_planar(b[0], b[1], tol); }},
  };

  std::string name = raw_name;
  for (char& c : name)
    if (c == '-') c = '_';
  const Entry* hit = nullptr;
  for (const Entry& e : table) {
    if (name == e.name) {
      hit = &e;
      break;
    }
    if (std::string(e.name).rfind(name, 0) == 0) {
      if (hit) throw UsageError("inequality name '" + raw_name + "' is ambiguous");
      hit = &e;
    }
  }
  if (!hit) throw UsageError("unknown inequality '" + raw_name + "'");
  if (files.size() != hit->arity)
    throw UsageError(std::string(hit->name) + " needs " + std::to_string(hit->arity) +
                     " bodies, got " + std::to_string(files.size()));

  std::vector<SupportField> bodies;
  bodies.reserve(files.size());
  for (const std::string& f : files) bodies.push_back(load_body(f, cfg));
  InequalityReport rep = hit->run(bodies);

  if (cfg.format == "csv")
    emit(cfg, std::string(kReportCsvHeader) + "\n" + report_csv_row(rep) + "\n");
  else
    emit(cfg, report_to_json(rep));
  std::fprintf(stderr, "%s: lhs=%.12g rhs=%.12g verdict=%s\n", rep.name.c_str(), rep.lhs, rep.rhs,
               verdict_name(rep.verdict));
  return rep.verdict == InequalityReport::Verdict::Violated ? 4 : 0;
}

int cmd_classify(const RunConfig& cfg, double p) {
  require_json(cfg, "classify");
  PlanarClassification C = classify_planar(p);
  std::vector<PlanarSolution> sols;
  std::vector<int> found_ks;
  for (const auto& [k, count] : C.branches) {
    (void)count;
    found_ks.push_back(k);
    for (PlanarSolution& s : solve_planar_branch(p, k)) sols.push_back(std::move(s));
  }
  emit(cfg, classification_json(C, sols));
  std::fprintf(stderr, "classify p=%.6g: predicted %s found %s\n", p,
               set_text(C.predicted).c_str(), set_text(found_ks).c_str());
  return 0;
}

int cmd_solve(const RunConfig& cfg, double p, const std::string& init_file) {
  require_json(cfg, "solve");
  SupportField init = load_body(init_file, cfg);
  NewtonOptions opts;
  if (cfg.tol > 0) opts.tol = cfg.tol;
  SolveReport rep = solve_sphere(p, init, opts);
  emit(cfg, solve_report_json(rep));
  std::fprintf(stderr,
               "solve p=%.6g: %d iterations, pde residual %.3g, lambda2 %.9g, ball deviation %.3g\n",
               p, rep.newton_iters, rep.pde_residual, rep.lambda2,
               rep.hypotheses.ball_deviation);
  return 0;
}

int cmd_isotropize(const RunConfig& cfg, const std::string& body_file) {
  require_json(cfg, "isotropize");
  SupportField K = load_body(body_file, cfg);
  IsotropizeResult R = s2_isotropize(K, cfg.tol > 0 ? cfg.tol : 1e-8);
  // the output is itself a body definition, so it can feed the next command
  emit(cfg, body_spec_to_json(spec_from_body(R.body)));
  std::fprintf(stderr, "isotropize: %d steps, moment defect %.3g\n", R.iters, R.defect);
  return 0;
}

// Invariant bounds the randomized spectral survey must stay inside; these
// mirror the library's documented low-spectrum structure.
constexpr double kSpectralLambda0Bound = 1e-8;
constexpr double kSpectralUnitBound = 1e-6;
constexpr double kSpectralGapMargin = 1e-3;
constexpr double kSpectralAngleBound = 1e-4;

int cmd_corpus(const RunConfig& cfg, const std::string& kind, int cases, double amplitude) {
  if (cfg.format != "csv") throw UsageError("corpus writes csv");
  CorpusOptions opt;
  opt.dim = cfg.dim;
  opt.lmax = cfg.lmax > 0 ? cfg.lmax : (cfg.dim == 2 ? 16 : 12);
  opt.seed = cfg.seed;
  opt.cases = cases;
  opt.amplitude = amplitude;

  if (kind == "spectral") {
    SpectralSummary s = run_spectral_corpus(opt);
    emit(cfg, spectral_corpus_csv(s));
    bool ok = s.max_lambda0 < kSpectralLambda0Bound &&
              s.max_lambda1_deviation < kSpectralUnitBound &&
              s.min_lambda_next > 1.0 + kSpectralGapMargin && s.max_angle < kSpectralAngleBound;
    std::fprintf(stderr,
                 "spectral corpus: %d bodies, max unit deviation %.3g, max angle %.3g -> %s\n",
                 (int)s.cases.size(), s.max_lambda1_deviation, s.max_angle,
                 ok ? "ok" : "violated");
    return ok ? 0 : 4;
  }

  CorpusSummary s = run_inequality_corpus(opt);
  emit(cfg, corpus_csv(s));
  std::fprintf(stderr, "inequality corpus: %d holds, %d equalities, %d violations\n", s.holds,
               s.equalities, s.violations);
  return s.violations == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for the Hilbert-Brunn-Minkowski operator of convex bodies"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string body_file, name, kind = "inequality", init_file;
  std::vector<std::string> files;
  int eigen_count = 12, cases = 200;
  double p = -2.0, amplitude = 0.2;

  CLI::App* sp = app.add_subcommand("spectrum", "Low eigenvalues of the operator of one body");
  sp->add_option("body", body_file, "Body definition file")->required();
  sp->add_option("k", eigen_count, "Number of eigenvalues")->check(CLI::Range(1, 4096));
  add_common(sp, cfg);

  CLI::App* ck = app.add_subcommand("check", "Evaluate one inequality on concrete bodies");
  ck->add_option("inequality", name, "Inequality name (unique prefix accepted)")->required();
  ck->add_option("bodies", files, "Body definition files");
  add_common(ck, cfg);

  CLI::App* cl = app.add_subcommand("classify", "Planar solution branches at one exponent");
  cl->add_option("p", p, "Exponent (p < -2)")->required();
  add_common(cl, cfg);

  CLI::App* so = app.add_subcommand("solve", "Newton solve of the isotropic curvature equation");
  so->add_option("p", p, "Exponent")->required();
  so->add_option("init", init_file, "Initial body definition file")->required();
  add_common(so, cfg);

  CLI::App* iso = app.add_subcommand("isotropize", "Move a body to its isotropic position");
  iso->add_option("body", body_file, "Body definition file")->required();
  add_common(iso, cfg);

  CLI::App* co = app.add_subcommand("corpus", "Randomized invariant suite, CSV summary");
  co->add_option("--kind", kind, "Which suite to run")
      ->check(CLI::IsMember({"inequality", "spectral"}));
  co->add_option("--cases", cases, "Number of cases")->check(CLI::Range(1, 100000));
  co->add_option("--amplitude", amplitude, "Perturbation amplitude")
      ->check(CLI::Range(0.0, 0.5));
  add_common(co, cfg);

  try {
    app.parse(argc, argv);
    if (sp->parsed()) return cmd_spectrum(cfg, body_file, eigen_count);
    if (ck->parsed()) return cmd_check(cfg, name, files);
    if (cl->parsed()) return cmd_classify(cfg, p);
    if (so->parsed()) return cmd_solve(cfg, p, init_file);
    if (iso->parsed()) return cmd_isotropize(cfg, body_file);
    if (co->count("--format") == 0) cfg.format = "csv";
    return cmd_corpus(cfg, kind, cases, amplitude);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const InvalidInputError& e) {
    std::fprintf(stderr, "bad input: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
}
