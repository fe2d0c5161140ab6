#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "hbm/body.hpp"
#include "hbm/inequality.hpp"
#include "hbm/solver.hpp"
#include "hbm/spectrum.hpp"

namespace hbm {

/// Decimal rendering at 17 significant digits, the shortest count that
/// always reads back to the identical double. Every float that leaves the
/// library through a file goes through here.
std::string format_double(double x);

/**
 * A body definition as it appears in input files. kind selects which
 * parameters apply:
 *   "ball"            radius
 *   "ellipsoid"       axes (length = dim)
 *   "coeffs"          coeffs (basis coefficients; length pins lmax)
 *   "perturbed_ball"  modes, (degree, order, amplitude) triples
 * lmax = 0 means unspecified; realize_body falls back to a per-dimension
 * default (16 on the circle, 12 on the sphere).
 */
struct BodySpec {
  int dim = 3;
  int lmax = 0;
  std::string kind = "ball";
  double radius = 1.0;
  Eigen::VectorXd axes;
  Eigen::VectorXd coeffs;
  std::vector<std::tuple<int, int, double>> modes;
};

/// Parse a JSON body definition. Malformed JSON, unknown kinds, and
/// parameter mismatches raise InvalidInputError naming the offence.
BodySpec parse_body_spec(const std::string& text);

/// Inverse of parse_body_spec. A write/read cycle preserves every
/// coefficient exactly.
std::string body_spec_to_json(const BodySpec& spec);

/// Build the body a spec describes. lmax_override > 0 replaces spec.lmax;
/// for kind "coeffs" the coefficient vector already pins the basis size and
/// any conflicting resolution is rejected.
SupportField realize_body(const BodySpec& spec, int lmax_override = 0);

/// Capture a live body as a "coeffs" spec, the round-trippable form.
BodySpec spec_from_body(const SupportField& K);

/// Spectral report with per-cluster multiplicities. Pass NaN as lambda1e
/// to omit the field (it only exists for origin-symmetric bodies).
std::string spectral_report_json(const SpectralResult& S, double lambda2, double lambda1e);

const char* verdict_name(InequalityReport::Verdict v);
const char* hypothesis_name(HypothesisStatus s);

/// One inequality report as a JSON object, witness vectors included.
std::string report_to_json(const InequalityReport& rep);

/// CSV form used by the check and corpus commands.
inline constexpr const char* kReportCsvHeader = "name,lhs,rhs,residual,tolerance,verdict";
std::string report_csv_row(const InequalityReport& rep);

/// Solution file for the sphere solver: exponent, coefficients, residuals,
/// lambda2, and the uniqueness-hypothesis block.
std::string solve_report_json(const SolveReport& rep);

/// Classification file: the predicted branch set next to what was found,
/// plus turning points, residual, and modes per solved profile.
std::string classification_json(const PlanarClassification& C,
                                const std::vector<PlanarSolution>& solutions);

/// Profile samples of one planar solution as CSV columns theta,h,dh.
std::string planar_profile_csv(const PlanarSolution& sol);

/// Whole-file helpers; both raise InvalidInputError when the path cannot
/// be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hbm
