#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>

#include "json.hpp"

#include "hbm/body.hpp"
#include "hbm/errors.hpp"
#include "hbm/io.hpp"
#include "hbm/solver.hpp"
#include "hbm/spectrum.hpp"

using namespace hbm;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

double reparse(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("decimal rendering reads back to the identical double") {
  CHECK(reparse(format_double(0.25)) == 0.25);
  CHECK(reparse(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(reparse(format_double(-1e-300)) == -1e-300);
  CHECK(reparse(format_double(6.02214076e23)) == 6.02214076e23);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-300.0, 300.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double x = gauss(rng) * std::pow(10.0, mag(rng));
    if (!std::isfinite(x)) continue;
    CHECK(same_bits(reparse(format_double(x)), x));
  }
}

TEST_CASE("body definitions round-trip through json exactly") {
  BodySpec ball;
  ball.dim = 2;
  ball.kind = "ball";
  ball.radius = 1.0 / 3.0;
  BodySpec ball2 = parse_body_spec(body_spec_to_json(ball));
  CHECK(ball2.dim == 2);
  CHECK(ball2.kind == "ball");
  CHECK(same_bits(ball2.radius, ball.radius));
  CHECK(ball2.lmax == 0);

  BodySpec ell;
  ell.dim = 3;
  ell.lmax = 10;
  ell.kind = "ellipsoid";
  ell.axes = Vector3d(1.2, 1.0, 1.0 / 1.2);
  BodySpec ell2 = parse_body_spec(body_spec_to_json(ell));
  CHECK(ell2.lmax == 10);
  REQUIRE(ell2.axes.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(same_bits(ell2.axes[i], ell.axes[i]));

  BodySpec pb;
  pb.dim = 3;
  pb.lmax = 12;
  pb.kind = "perturbed_ball";
  pb.modes = {{2, 1, 0.1}, {4, -3, -0.037}};
  BodySpec pb2 = parse_body_spec(body_spec_to_json(pb));
  REQUIRE(pb2.modes.size() == 2);
  CHECK(pb2.modes[0] == std::tuple<int, int, double>(2, 1, 0.1));
  CHECK(pb2.modes[1] == std::tuple<int, int, double>(4, -3, -0.037));

  // a live body extracted to coefficients survives write/read/realize bitwise
  auto dom = make_domain(3, 8);
  SupportField K = make_perturbed_ball(dom, {{2, 0, 0.11}, {3, 2, 0.05}});
  BodySpec cs = spec_from_body(K);
  CHECK(cs.kind == "coeffs");
  CHECK(cs.lmax == 8);
  SupportField K2 = realize_body(parse_body_spec(body_spec_to_json(cs)));
  REQUIRE(K2.h.coeffs.size() == K.h.coeffs.size());
  for (int i = 0; i < K.h.coeffs.size(); ++i) CHECK(same_bits(K2.h.coeffs[i], K.h.coeffs[i]));
}

TEST_CASE("body definitions validate their parameters") {
  CHECK_THROWS_AS((void)parse_body_spec("{ not json"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec("[1,2,3]"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"kind":"ball"})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":2})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":4,"kind":"ball"})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":2,"kind":"simplex"})"), InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":2,"kind":"ball","radius":-1})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":3,"kind":"ellipsoid","axes":[2,1]})"),
                  InvalidInputError);
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":2,"kind":"coeffs","coeffs":[1,0,0,0]})"),
                  InvalidInputError);  // even length never matches a circle basis
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":3,"kind":"perturbed_ball","modes":[[2,1]]})"),
                  InvalidInputError);

  // an explicit lmax that contradicts the coefficient count is rejected
  CHECK_THROWS_AS((void)parse_body_spec(R"({"dim":2,"lmax":3,"kind":"coeffs","coeffs":[1,0,0]})"),
                  InvalidInputError);

  BodySpec cs;
  cs.dim = 2;
  cs.kind = "coeffs";
  cs.coeffs = VectorXd::Zero(5);
  cs.coeffs[0] = 2.5;
  cs.lmax = 2;
  CHECK_NOTHROW((void)realize_body(cs));
  CHECK_THROWS_AS((void)realize_body(cs, 6), InvalidInputError);
}

TEST_CASE("realized bodies match the factory constructions") {
  auto dom2 = make_domain(2, 16);
  auto dom3 = make_domain(3, 12);

  BodySpec ball;
  ball.dim = 2;
  ball.kind = "ball";
  ball.radius = 2.0;
  SupportField B = realize_body(ball);
  CHECK(B.domain()->lmax == 16);  // per-dimension default
  CHECK((B.h.values.array() - 2.0).abs().maxCoeff() < 1e-12);
  CHECK(realize_body(ball, 24).domain()->lmax == 24);

  BodySpec ell;
  ell.dim = 3;
  ell.kind = "ellipsoid";
  ell.axes = Vector3d(1.3, 1.0, 0.9);
  SupportField E = realize_body(ell);
  CHECK(E.domain()->lmax == 12);
  SupportField Eref = make_ellipsoid(dom3, Vector3d(1.3, 1.0, 0.9));
  CHECK((E.h.coeffs - Eref.h.coeffs).norm() == 0.0);

  BodySpec pb;
  pb.dim = 3;
  pb.lmax = 12;
  pb.kind = "perturbed_ball";
  pb.modes = {{2, -1, 0.08}};
  SupportField P = realize_body(pb);
  SupportField Pref = make_perturbed_ball(dom3, {{2, -1, 0.08}});
  CHECK((P.h.coeffs - Pref.h.coeffs).norm() == 0.0);

  // degenerate inputs surface the library's own validation
  BodySpec bad;
  bad.dim = 2;
  bad.kind = "perturbed_ball";
  bad.modes = {{3, 1, 0.9}};
  CHECK_THROWS_AS((void)realize_body(bad), NotConvexError);
}

TEST_CASE("spectral reports carry eigenvalues multiplicities and residuals") {
  auto dom = make_domain(2, 8);
  SupportField B = make_ball(dom);
  SpectralResult S = spectrum(assemble(B), 9);
  double l2 = lambda2(B);

  json rep = json::parse(spectral_report_json(S, l2, lambda1e(B)));
  REQUIRE(rep["eigenvalues"].size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(same_bits(rep["eigenvalues"][i].get<double>(), S.eigenvalues[i]));
  std::vector<int> mult = rep["multiplicities"].get<std::vector<int>>();
  REQUIRE(mult.size() == S.clusters.size());
  CHECK(mult[0] == 1);
  CHECK(mult[1] == 2);
  REQUIRE(rep["residuals"].size() == 9);
  CHECK(rep["residuals"][3].get<double>() < 1e-8);
  CHECK(same_bits(rep["lambda2"].get<double>(), l2));
  CHECK(rep.contains("lambda1e"));

  json noeven = json::parse(spectral_report_json(S, l2, std::nan("")));
  CHECK(!noeven.contains("lambda1e"));
}

TEST_CASE("inequality reports serialize to json and csv") {
  auto dom = make_domain(2, 16);
  SupportField B = make_ball(dom);
  TangentData lv = jet_ratio(jet_linear(dom, Vector2d(0.3, -0.2)), B.jet);
  InequalityReport r = local_bm(B, lv);
  REQUIRE(r.verdict == InequalityReport::Verdict::Equality);

  json j = json::parse(report_to_json(r));
  CHECK(j["name"].get<std::string>() == r.name);
  CHECK(same_bits(j["lhs"].get<double>(), r.lhs));
  CHECK(same_bits(j["rhs"].get<double>(), r.rhs));
  CHECK(same_bits(j["residual"].get<double>(), r.residual));
  CHECK(same_bits(j["tolerance"].get<double>(), r.tolerance));
  CHECK(j["verdict"].get<std::string>() == "equality");
  for (const auto& [key, val] : r.witnesses) {
    REQUIRE(j["witnesses"].contains(key));
    REQUIRE(j["witnesses"][key].size() == (size_t)val.size());
    for (int i = 0; i < val.size(); ++i)
      CHECK(same_bits(j["witnesses"][key][i].get<double>(), val[i]));
  }

  std::string row = report_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 5);
  CHECK(row.find(r.name + ",") == 0);
  CHECK(row.find(",equality") == row.size() - std::strlen(",equality"));
  CHECK(std::string(kReportCsvHeader) == "name,lhs,rhs,residual,tolerance,verdict");

  CHECK(std::string(verdict_name(InequalityReport::Verdict::Holds)) == "holds");
  CHECK(std::string(verdict_name(InequalityReport::Verdict::Violated)) == "violated");
}

TEST_CASE("solver reports serialize with hypotheses and residual history") {
  auto dom = make_domain(3, 8);
  SolveReport rep = solve_sphere(-2.0, make_ball(dom));
  json j = json::parse(solve_report_json(rep));
  CHECK(j["p"].get<double>() == -2.0);
  CHECK(j["dim"].get<int>() == 3);
  CHECK(j["lmax"].get<int>() == 8);
  CHECK(j["coeffs"].size() == (size_t)dom->basis_count);
  CHECK(same_bits(j["coeffs"][0].get<double>(), rep.body.h.coeffs[0]));
  CHECK(j["pde_residual"].get<double>() < 1e-10);
  CHECK(j["newton_iters"].get<int>() == 0);
  CHECK(same_bits(j["lambda2"].get<double>(), rep.lambda2));
  CHECK(j["residual_history"].size() == rep.residual_history.size());

  const json& h = j["hypotheses"];
  CHECK(same_bits(h["threshold_origin_centred"].get<double>(),
                  rep.hypotheses.threshold_origin_centred));
  CHECK(h["origin_range_ok"].is_boolean());
  CHECK(h["is_unit_ball"].get<bool>());
  std::string v = h["origin_centred_verdict"].get<std::string>();
  CHECK((v == "met" || v == "not_met" || v == "boundary"));
  CHECK(same_bits(h["identity_gradient"].get<double>(), rep.hypotheses.identity_gradient));
}

TEST_CASE("classification files pair predicted and found branches") {
  PlanarClassification C = classify_planar(-10.0);
  std::vector<PlanarSolution> sols = solve_planar_branch(-10.0, 3);
  REQUIRE(sols.size() == 1);

  json j = json::parse(classification_json(C, sols));
  CHECK(j["p"].get<double>() == -10.0);
  CHECK(j["predicted"].get<std::vector<int>>() == std::vector<int>{3});
  REQUIRE(j["found"].size() == 1);
  CHECK(j["found"][0]["k"].get<int>() == 3);
  CHECK(j["found"][0]["count"].get<int>() == 1);
  REQUIRE(j["solutions"].size() == 1);
  const json& s = j["solutions"][0];
  CHECK(s["k"].get<int>() == 3);
  CHECK(same_bits(s["h0"].get<double>(), sols[0].h0));
  CHECK(std::abs(s["h0"].get<double>() - 1.351003) < 2e-6);
  CHECK(std::abs(s["h_inner"].get<double>() - 0.841185) < 2e-6);
  CHECK(s["residual"].get<double>() < 1e-9);
  REQUIRE(s["modes"].size() == (size_t)sols[0].modes.size());
  CHECK(same_bits(s["modes"][1].get<double>(), sols[0].modes[1]));
}

TEST_CASE("planar profiles export as theta h dh columns") {
  std::vector<PlanarSolution> sols = solve_planar_branch(-10.0, 3);
  REQUIRE(sols.size() == 1);
  std::string csv = planar_profile_csv(sols[0]);

  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < csv.size()) {
    size_t nl = csv.find('\n', pos);
    REQUIRE(nl != std::string::npos);  // file ends with a newline
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == (size_t)sols[0].profile.rows() + 1);
  CHECK(lines[0] == "theta,h,dh");

  // first sample sits at the outer turning point
  double t0, h0, dh0;
  REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf", &t0, &h0, &dh0) == 3);
  CHECK(t0 == 0.0);
  CHECK(same_bits(h0, sols[0].profile(0, 1)));
  CHECK(std::abs(dh0) < 1e-10);
}

TEST_CASE("text files round-trip and missing paths are reported") {
  std::string path = "io_tmp_roundtrip.json";
  std::string text = body_spec_to_json(parse_body_spec(R"({"dim":2,"kind":"ball","radius":1.5})"));
  write_text_file(path, text);
  CHECK(read_text_file(path) == text);
  std::remove(path.c_str());

  CHECK_THROWS_AS((void)read_text_file("no_such_dir/no_such_file.json"), InvalidInputError);
  CHECK_THROWS_AS(write_text_file("no_such_dir/no_such_file.json", "x"), InvalidInputError);
}
