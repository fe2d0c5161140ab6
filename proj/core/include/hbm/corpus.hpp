#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hbm/body.hpp"
#include "hbm/inequality.hpp"

namespace hbm {

/**
 * Knobs for the randomized corpora. Every case derives its own generator
 * stream from (seed, case index), so results are independent of the worker
 * schedule. threads = 0 reads HBM_NUM_THREADS and falls back to the
 * hardware count.
 */
struct CorpusOptions {
  int dim = 3;
  int lmax = 12;
  std::uint64_t seed = 1;
  int cases = 200;
  double amplitude = 0.2;
  int threads = 0;
};

/// One corpus entry: which inequality ran, on what kind of generated input
/// (a short tag, e.g. "random" or "homothet witness"), and its report.
struct CorpusCase {
  int index = 0;
  std::string op;
  std::string setup;
  InequalityReport report;
};

struct CorpusSummary {
  std::vector<CorpusCase> cases;  // in index order
  int holds = 0;
  int equalities = 0;
  int violations = 0;
};

/// Spreads `cases` checks round-robin over the ten report-producing
/// inequality operations, mixing generic random inputs with the
/// characterized equality witnesses (homothets, renormalized linears,
/// origin-centred ellipsoids, gap eigenfunctions).
CorpusSummary run_inequality_corpus(const CorpusOptions& opt);

/// Low-spectrum survey entry for one random body: lambda_0, the worst
/// deviation of the dimension-fold eigenvalue 1, the eigenvalue after that
/// group, and the angle between the computed eigenspace and the span of the
/// renormalized linear functions.
struct SpectralCase {
  int index = 0;
  double lambda0 = 0;
  double lambda1_deviation = 0;
  double lambda_next = 0;
  double angle = 0;
};

struct SpectralSummary {
  std::vector<SpectralCase> cases;
  double max_lambda0 = 0;
  double max_lambda1_deviation = 0;
  double min_lambda_next = 0;
  double max_angle = 0;
};

SpectralSummary run_spectral_corpus(const CorpusOptions& opt);

/// CSV renderings, header plus one line per case, floats at 17 significant
/// digits. Equal options give byte-identical text regardless of threads.
std::string corpus_csv(const CorpusSummary& s);
std::string spectral_corpus_csv(const SpectralSummary& s);

}  // namespace hbm
