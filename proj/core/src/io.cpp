#include "hbm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hbm/domain.hpp"
#include "hbm/errors.hpp"

namespace hbm {

namespace {

using nlohmann::json;

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if ((unsigned char)c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string num_array(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out + "]";
}

std::string num_array(const std::vector<double>& v) {
  return num_array(Eigen::Map<const Eigen::VectorXd>(v.data(), (long)v.size()));
}

std::string int_array(const std::vector<int>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + "]";
}

// Field-by-field object writer; keeps every emitter down to a list of puts.
struct ObjectWriter {
  std::string body;
  void raw(const std::string& key, const std::string& value) {
    body += body.empty() ? "\n" : ",\n";
    body += "  " + quoted(key) + ": " + value;
  }
  void put(const std::string& key, double x) { raw(key, format_double(x)); }
  void put(const std::string& key, int x) { raw(key, std::to_string(x)); }
  void put(const std::string& key, bool b) { raw(key, b ? "true" : "false"); }
  void put(const std::string& key, const std::string& s) { raw(key, quoted(s)); }
  std::string str() const { return "{" + body + "\n}\n"; }
};

[[noreturn]] void bad_body(const std::string& what) {
  throw InvalidInputError("body definition: " + what);
}

double finite_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad_body("field '" + key + "' must be a number");
  double x = j.get<double>();
  if (!std::isfinite(x)) bad_body("field '" + key + "' must be finite");
  return x;
}

int integer_field(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad_body("field '" + key + "' must be an integer");
  return j.get<int>();
}

// Circle bases have 2L+1 functions, sphere bases (L+1)^2; invert to the
// cutoff or report that no cutoff fits.
int lmax_from_count(int dim, int count) {
  if (dim == 2) {
    if (count >= 5 && count % 2 == 1) return (count - 1) / 2;
  } else {
    int l = (int)std::lround(std::sqrt((double)count)) - 1;
    if (l >= 2 && (l + 1) * (l + 1) == count) return l;
  }
  bad_body("coefficient count " + std::to_string(count) +
           " does not match any basis in dimension " + std::to_string(dim));
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

BodySpec parse_body_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_body(std::string("not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) bad_body("top level must be an object");

  BodySpec spec;
  if (!j.contains("dim")) bad_body("missing field 'dim'");
  spec.dim = integer_field(j["dim"], "dim");
  if (spec.dim != 2 && spec.dim != 3) bad_body("'dim' must be 2 or 3");
  if (!j.contains("kind")) bad_body("missing field 'kind'");
  if (!j["kind"].is_string()) bad_body("'kind' must be a string");
  spec.kind = j["kind"].get<std::string>();
  if (j.contains("lmax")) {
    spec.lmax = integer_field(j["lmax"], "lmax");
    if (spec.lmax < 2) bad_body("'lmax' must be at least 2");
  }

  std::vector<std::string> allowed = {"dim", "kind", "lmax"};
  if (spec.kind == "ball") {
    allowed.push_back("radius");
    if (j.contains("radius")) spec.radius = finite_number(j["radius"], "radius");
    if (spec.radius <= 0) bad_body("'radius' must be positive");
  } else if (spec.kind == "ellipsoid") {
    allowed.push_back("axes");
    if (!j.contains("axes") || !j["axes"].is_array()) bad_body("'ellipsoid' needs an 'axes' array");
    if ((int)j["axes"].size() != spec.dim)
      bad_body("'axes' must list one semiaxis per dimension");
    spec.axes.resize(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
      spec.axes[i] = finite_number(j["axes"][i], "axes");
      if (spec.axes[i] <= 0) bad_body("semiaxes must be positive");
    }
  } else if (spec.kind == "coeffs") {
    allowed.push_back("coeffs");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) bad_body("'coeffs' needs a coefficient array");
    spec.coeffs.resize((long)j["coeffs"].size());
    for (long i = 0; i < spec.coeffs.size(); ++i)
      spec.coeffs[i] = finite_number(j["coeffs"][i], "coeffs");
    int inferred = lmax_from_count(spec.dim, (int)spec.coeffs.size());
    if (spec.lmax != 0 && spec.lmax != inferred)
      bad_body("'lmax' " + std::to_string(spec.lmax) + " contradicts the coefficient count (" +
               std::to_string(inferred) + ")");
    spec.lmax = inferred;
  } else if (spec.kind == "perturbed_ball") {
    allowed.push_back("modes");
    if (!j.contains("modes") || !j["modes"].is_array()) bad_body("'perturbed_ball' needs a 'modes' array");
    for (const json& m : j["modes"]) {
      if (!m.is_object() || !m.contains("degree") || !m.contains("order") ||
          !m.contains("amplitude"))
        bad_body("each mode must be an object with degree, order, amplitude");
      spec.modes.emplace_back(integer_field(m["degree"], "degree"),
                              integer_field(m["order"], "order"),
                              finite_number(m["amplitude"], "amplitude"));
    }
  } else {
    bad_body("unknown kind '" + spec.kind + "'");
  }

  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      bad_body("unexpected field '" + key + "' for kind '" + spec.kind + "'");
  }
  return spec;
}

std::string body_spec_to_json(const BodySpec& spec) {
  ObjectWriter w;
  w.put("dim", spec.dim);
  if (spec.lmax > 0) w.put("lmax", spec.lmax);
  w.put("kind", spec.kind);
  if (spec.kind == "ball") {
    w.put("radius", spec.radius);
  } else if (spec.kind == "ellipsoid") {
    w.raw("axes", num_array(spec.axes));
  } else if (spec.kind == "coeffs") {
    w.raw("coeffs", num_array(spec.coeffs));
  } else if (spec.kind == "perturbed_ball") {
    std::string arr = "[";
    for (size_t i = 0; i < spec.modes.size(); ++i) {
      const auto& [l, m, a] = spec.modes[i];
      if (i) arr += ",";
      arr += "{\"degree\": " + std::to_string(l) + ", \"order\": " + std::to_string(m) +
             ", \"amplitude\": " + format_double(a) + "}";
    }
    w.raw("modes", arr + "]");
  } else {
    bad_body("unknown kind '" + spec.kind + "'");
  }
  return w.str();
}

SupportField realize_body(const BodySpec& spec, int lmax_override) {
  int lmax = lmax_override > 0 ? lmax_override : spec.lmax;
  if (lmax == 0) lmax = spec.dim == 2 ? 16 : 12;

  if (spec.kind == "coeffs") {
    int pinned = lmax_from_count(spec.dim, (int)spec.coeffs.size());
    if (lmax != pinned)
      bad_body("cutoff " + std::to_string(lmax) + " conflicts with a coefficient vector of size " +
               std::to_string(spec.coeffs.size()));
    return body_from_coeffs(make_domain(spec.dim, pinned), spec.coeffs);
  }

  DomainPtr dom = make_domain(spec.dim, lmax);
  if (spec.kind == "ball") return make_ball(dom, spec.radius);
  if (spec.kind == "ellipsoid") {
    if (spec.axes.size() != spec.dim) bad_body("'axes' must list one semiaxis per dimension");
    return make_ellipsoid(dom, spec.axes);
  }
  if (spec.kind == "perturbed_ball") return make_perturbed_ball(dom, spec.modes);
  bad_body("unknown kind '" + spec.kind + "'");
}

BodySpec spec_from_body(const SupportField& K) {
  BodySpec spec;
  spec.dim = K.domain()->dim;
  spec.lmax = K.domain()->lmax;
  spec.kind = "coeffs";
  spec.coeffs = K.h.coeffs;
  return spec;
}

std::string spectral_report_json(const SpectralResult& S, double lambda2, double lambda1e) {
  std::vector<int> mult;
  mult.reserve(S.clusters.size());
  for (const auto& c : S.clusters) mult.push_back((int)c.size());

  ObjectWriter w;
  w.raw("eigenvalues", num_array(S.eigenvalues));
  w.raw("multiplicities", int_array(mult));
  w.raw("residuals", num_array(S.residuals));
  w.put("lambda2", lambda2);
  if (!std::isnan(lambda1e)) w.put("lambda1e", lambda1e);
  return w.str();
}

const char* verdict_name(InequalityReport::Verdict v) {
  switch (v) {
    case InequalityReport::Verdict::Holds: return "holds";
    case InequalityReport::Verdict::Equality: return "equality";
    default: return "violated";
  }
}

const char* hypothesis_name(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Met: return "met";
    case HypothesisStatus::Boundary: return "boundary";
    default: return "not_met";
  }
}

std::string report_to_json(const InequalityReport& rep) {
  ObjectWriter w;
  w.put("name", rep.name);
  w.put("lhs", rep.lhs);
  w.put("rhs", rep.rhs);
  w.put("residual", rep.residual);
  w.put("tolerance", rep.tolerance);
  w.put("verdict", std::string(verdict_name(rep.verdict)));
  std::string wit = "{";
  for (size_t i = 0; i < rep.witnesses.size(); ++i) {
    if (i) wit += ", ";
    wit += quoted(rep.witnesses[i].first) + ": " + num_array(rep.witnesses[i].second);
  }
  w.raw("witnesses", wit + "}");
  return w.str();
}

std::string report_csv_row(const InequalityReport& rep) {
  return rep.name + "," + format_double(rep.lhs) + "," + format_double(rep.rhs) + "," +
         format_double(rep.residual) + "," + format_double(rep.tolerance) + "," +
         verdict_name(rep.verdict);
}

std::string solve_report_json(const SolveReport& rep) {
  ObjectWriter h;
  h.put("pde_residual", rep.hypotheses.pde_residual);
  h.put("lambda2", rep.hypotheses.lambda2);
  h.put("threshold_origin_centred", rep.hypotheses.threshold_origin_centred);
  h.put("threshold_general", rep.hypotheses.threshold_general);
  h.put("origin_range_ok", rep.hypotheses.origin_range_ok);
  h.put("general_range_ok", rep.hypotheses.general_range_ok);
  h.put("isotropy_defect", rep.hypotheses.isotropy_defect);
  h.put("centroid_norm", rep.hypotheses.centroid_norm);
  h.put("ball_deviation", rep.hypotheses.ball_deviation);
  h.put("is_unit_ball", rep.hypotheses.is_unit_ball);
  h.put("origin_centred_verdict", std::string(hypothesis_name(rep.hypotheses.origin_centred_verdict)));
  h.put("general_verdict", std::string(hypothesis_name(rep.hypotheses.general_verdict)));
  h.put("identity_gradient", rep.hypotheses.identity_gradient);
  h.put("identity_position", rep.hypotheses.identity_position);

  // the nested block indents one level shallow; reindent it
  std::string block = h.str();
  block.pop_back();
  std::string indented;
  for (char c : block) {
    indented += c;
    if (c == '\n') indented += "  ";
  }

  ObjectWriter w;
  w.put("p", rep.p);
  w.put("dim", rep.body.domain()->dim);
  w.put("lmax", rep.body.domain()->lmax);
  w.raw("coeffs", num_array(rep.body.h.coeffs));
  w.put("pde_residual", rep.pde_residual);
  w.put("newton_iters", rep.newton_iters);
  w.put("lambda2", rep.lambda2);
  w.raw("residual_history", num_array(rep.residual_history));
  w.raw("hypotheses", indented);
  return w.str();
}

std::string classification_json(const PlanarClassification& C,
                                const std::vector<PlanarSolution>& solutions) {
  ObjectWriter w;
  w.put("p", C.p);
  w.raw("predicted", int_array(C.predicted));

  std::string found = "[";
  for (size_t i = 0; i < C.branches.size(); ++i) {
    if (i) found += ",";
    found += "{\"k\": " + std::to_string(C.branches[i].first) +
             ", \"count\": " + std::to_string(C.branches[i].second) + "}";
  }
  w.raw("found", found + "]");

  std::string sols = "[";
  for (size_t i = 0; i < solutions.size(); ++i) {
    const PlanarSolution& s = solutions[i];
    if (i) sols += ",";
    sols += "\n    {\"k\": " + std::to_string(s.k) + ", \"h0\": " + format_double(s.h0) +
            ", \"h_inner\": " + format_double(s.profile(s.profile.rows() - 1, 1)) +
            ", \"residual\": " + format_double(s.residual) + ", \"modes\": " + num_array(s.modes) +
            "}";
  }
  w.raw("solutions", sols + (solutions.empty() ? "]" : "\n  ]"));
  return w.str();
}

std::string planar_profile_csv(const PlanarSolution& sol) {
  std::string out = "theta,h,dh\n";
  for (long r = 0; r < sol.profile.rows(); ++r)
    out += format_double(sol.profile(r, 0)) + "," + format_double(sol.profile(r, 1)) + "," +
           format_double(sol.profile(r, 2)) + "\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot open for writing: " + path);
  out << text;
  out.close();
  if (!out) throw InvalidInputError("write failed: " + path);
}

}  // namespace hbm
