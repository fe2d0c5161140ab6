#include "hbm/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "hbm/domain.hpp"
#include "hbm/errors.hpp"
#include "hbm/io.hpp"
#include "hbm/spectrum.hpp"

namespace hbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Eigen::VectorXd;

// One generator stream per (seed, case); SplitMix-style mixing keeps the
// streams apart without any cross-case state.
std::uint64_t stream_seed(std::uint64_t seed, int index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (std::uint64_t)(index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniforms and normals built from the raw engine output. The standard
// distributions are implementation-defined, which would tie corpus text to
// the standard library version rather than to the seed.
double unit_open(std::mt19937_64& rng) { return ((rng() >> 11) + 0.5) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_open(rng);
}

double gauss(std::mt19937_64& rng) {
  double u = unit_open(rng), v = unit_open(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
}

VectorXd random_direction(std::mt19937_64& rng, int dim) {
  VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v / v.norm();
}

SupportField random_body(const DomainPtr& dom, std::mt19937_64& rng, double amplitude,
                         int top_degree = 4, bool even_only = false) {
  VectorXd c = VectorXd::Zero(dom->basis_count);
  c[0] = std::sqrt(dom->sphere_area());
  int top = dom->dim == 2 ? dom->index_of(top_degree, 1) : dom->index_of(top_degree, top_degree);
  VectorXd bump = VectorXd::Zero(dom->basis_count);
  for (int i = 1; i <= top; ++i)
    if (!even_only || dom->degree[i] % 2 == 0) bump[i] = gauss(rng);
  bump /= bump.norm();
  for (;;) {
    try {
      return body_from_coeffs(dom, c + amplitude * bump);
    } catch (const NotConvexError&) {
      amplitude *= 0.6;
    }
  }
}

TangentData random_jet(const DomainPtr& dom, std::mt19937_64& rng, int top_degree) {
  VectorXd c = VectorXd::Zero(dom->basis_count);
  for (int i = 0; i < dom->basis_count; ++i)
    if (dom->degree[i] <= top_degree) c[i] = gauss(rng) / (1.0 + dom->degree[i]);
  return differentiate(field_from_coeffs(dom, c));
}

TangentData renorm_linear(const SupportField& K, const VectorXd& v) {
  return jet_ratio(jet_linear(K.h.domain, v), K.jet);
}

SupportField homothet_of(const SupportField& K, std::mt19937_64& rng) {
  double c = uniform(rng, 0.7, 1.4);
  VectorXd v =
      random_direction(rng, K.domain()->dim) * (uniform(rng, 0.05, 0.25) * c * K.min_h);
  return translate_body(scale_body(K, c), v);
}

TangentData gap_eigenfunction(const SupportField& K) {
  int dim = K.domain()->dim;
  SpectralResult S = spectrum(assemble(K), dim + 2);
  return differentiate(field_from_coeffs(K.h.domain, S.eigenvectors.col(dim + 1)));
}

void validate_options(const CorpusOptions& opt) {
  if (opt.dim != 2 && opt.dim != 3)
    throw InvalidInputError("corpus options: dim must be 2 or 3");
  if (opt.lmax < 2) throw InvalidInputError("corpus options: lmax must be at least 2");
  if (opt.cases < 1) throw InvalidInputError("corpus options: need at least one case");
  if (!(opt.amplitude >= 0) || !std::isfinite(opt.amplitude))
    throw InvalidInputError("corpus options: amplitude must be finite and nonnegative");
  if (opt.threads < 0) throw InvalidInputError("corpus options: threads must be nonnegative");
}

int resolve_threads(int requested, int n) {
  int t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("HBM_NUM_THREADS")) t = std::atoi(env);
    if (t <= 0) {
      unsigned hc = std::thread::hardware_concurrency();
      t = hc ? (int)hc : 1;
    }
  }
  return std::min(t, n);
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto work = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads - 1; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
}

// The ten report-producing operations in fixed order; index % 10 selects,
// and every fourth ten-case cycle swaps the generic inputs for the
// operation's characterized equality witness.
CorpusCase make_case(const CorpusOptions& opt, int index) {
  std::mt19937_64 rng(stream_seed(opt.seed, index));
  int op = index % 10;
  bool witness = (index / 10) % 4 == 3;

  int dim = op == 9 ? 2 : opt.dim;  // the curvature-integral bound is planar
  int lmax = dim == opt.dim ? opt.lmax : 16;
  DomainPtr dom = make_domain(dim, lmax);
  double amp = opt.amplitude * uniform(rng, 0.3, 1.0);

  CorpusCase out;
  out.index = index;
  out.setup = "random";

  switch (op) {
    case 0: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "renormalized linear";
        out.report = local_bm(K, renorm_linear(K, random_direction(rng, dim) * uniform(rng, 0.1, 0.5)));
      } else {
        out.report = local_bm(K, random_jet(dom, rng, 5));
      }
      break;
    }
    case 1: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "renormalized linear";
        out.report = local_af({&K}, renorm_linear(K, random_direction(rng, dim) * uniform(rng, 0.1, 0.5)));
      } else {
        out.report = local_af({&K}, random_jet(dom, rng, 5));
      }
      break;
    }
    case 2: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "gap eigenfunction";
        out.report = spectral_gap_ineq(K, gap_eigenfunction(K));
      } else {
        out.report = spectral_gap_ineq(K, random_jet(dom, rng, 5));
      }
      break;
    }
    case 3: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        // renormalized linears sit in the kernel of the shifted operator, so
        // both sides vanish nodally; the gap eigenfunction only saturates
        // this bound weakly and its strong-form defect grows at coarse lmax
        out.setup = "renormalized linear";
        out.report = reverse_ineq(K, renorm_linear(K, random_direction(rng, dim) * uniform(rng, 0.1, 0.5)));
      } else {
        out.report = reverse_ineq(K, random_jet(dom, rng, 5));
      }
      break;
    }
    case 4: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "affine renormalized linear";
        TangentData lv = renorm_linear(K, random_direction(rng, dim) * uniform(rng, 0.1, 0.5));
        out.report = stability_bm(K, jet_scale_add(1.0, lv, 1.0, jet_constant(dom, uniform(rng, 0.3, 1.2))));
      } else {
        out.report = stability_bm(K, random_jet(dom, rng, 5));
      }
      break;
    }
    case 5: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "homothet";
        out.report = minkowski_second_stability(K, homothet_of(K, rng));
      } else {
        out.report = minkowski_second_stability(K, random_body(dom, rng, amp));
      }
      break;
    }
    case 6: {
      SupportField K = random_body(dom, rng, amp, 4, true);
      if (witness) {
        out.setup = "scaled copy";
        out.report = symmetric_stability(K, scale_body(K, uniform(rng, 0.6, 1.6)));
      } else {
        out.report = symmetric_stability(K, random_body(dom, rng, amp, 4, true));
      }
      break;
    }
    case 7: {
      SupportField K = random_body(dom, rng, amp);
      SupportField L1 = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "homothetic pair";
        out.report = ratio_bm_stability(K, L1, homothet_of(L1, rng));
      } else {
        out.report = ratio_bm_stability(K, L1, random_body(dom, rng, amp));
      }
      break;
    }
    case 8: {
      if (witness) {
        out.setup = "origin-centred ellipsoid";
        VectorXd axes(dim);
        for (int i = 0; i < dim; ++i) axes[i] = uniform(rng, 0.85, 1.3);
        out.report = xk_inequality(make_ellipsoid(dom, axes));
      } else {
        out.report = xk_inequality(random_body(dom, rng, amp));
      }
      break;
    }
    default: {
      SupportField K = random_body(dom, rng, amp);
      if (witness) {
        out.setup = "homothet";
        out.report = heintze_karcher_planar(K, homothet_of(K, rng));
      } else {
        out.report = heintze_karcher_planar(K, random_body(dom, rng, amp));
      }
      break;
    }
  }
  out.op = out.report.name;
  return out;
}

}  // namespace

CorpusSummary run_inequality_corpus(const CorpusOptions& opt) {
  validate_options(opt);
  make_domain(opt.dim, opt.lmax);  // build shared tables before fanning out
  if (opt.dim != 2 && opt.cases > 9) make_domain(2, 16);

  CorpusSummary s;
  s.cases.resize(opt.cases);
  parallel_for(opt.cases, resolve_threads(opt.threads, opt.cases),
               [&](int i) { s.cases[i] = make_case(opt, i); });

  for (const CorpusCase& c : s.cases) {
    switch (c.report.verdict) {
      case InequalityReport::Verdict::Holds: ++s.holds; break;
      case InequalityReport::Verdict::Equality: ++s.equalities; break;
      default: ++s.violations;
    }
  }
  return s;
}

SpectralSummary run_spectral_corpus(const CorpusOptions& opt) {
  validate_options(opt);
  DomainPtr dom = make_domain(opt.dim, opt.lmax);
  int dim = opt.dim;

  SpectralSummary s;
  s.cases.resize(opt.cases);
  s.min_lambda_next = std::numeric_limits<double>::infinity();

  parallel_for(opt.cases, resolve_threads(opt.threads, opt.cases), [&](int i) {
    std::mt19937_64 rng(stream_seed(opt.seed, i));
    SupportField K = random_body(dom, rng, opt.amplitude * uniform(rng, 0.3, 1.0));
    SpectralResult S = spectrum(assemble(K), dim + 2);

    SpectralCase c;
    c.index = i;
    c.lambda0 = std::abs(S.eigenvalues[0]);
    for (int l = 1; l <= dim; ++l)
      c.lambda1_deviation = std::max(c.lambda1_deviation, std::abs(S.eigenvalues[l] - 1.0));
    c.lambda_next = S.eigenvalues[dim + 1];

    DensityField cone = measure(K, MeasureLabel::ConeVolume);
    Eigen::MatrixXd U(dom->node_count, dim), W(dom->node_count, dim);
    for (int l = 0; l < dim; ++l) {
      U.col(l) = dom->synth(S.eigenvectors.col(1 + l));
      W.col(l) = dom->nodes.col(l).cwiseQuotient(K.h.values);
    }
    c.angle = subspace_angle(cone, U, W);
    s.cases[i] = c;
  });

  for (const SpectralCase& c : s.cases) {
    s.max_lambda0 = std::max(s.max_lambda0, c.lambda0);
    s.max_lambda1_deviation = std::max(s.max_lambda1_deviation, c.lambda1_deviation);
    s.min_lambda_next = std::min(s.min_lambda_next, c.lambda_next);
    s.max_angle = std::max(s.max_angle, c.angle);
  }
  return s;
}

std::string corpus_csv(const CorpusSummary& s) {
  std::string out = std::string("index,setup,") + kReportCsvHeader + "\n";
  for (const CorpusCase& c : s.cases)
    out += std::to_string(c.index) + "," + c.setup + "," + report_csv_row(c.report) + "\n";
  return out;
}

std::string spectral_corpus_csv(const SpectralSummary& s) {
  std::string out = "index,lambda0,lambda1_deviation,lambda_next,angle\n";
  for (const SpectralCase& c : s.cases)
    out += std::to_string(c.index) + "," + format_double(c.lambda0) + "," +
           format_double(c.lambda1_deviation) + "," + format_double(c.lambda_next) + "," +
           format_double(c.angle) + "\n";
  return out;
}

}  // namespace hbm
