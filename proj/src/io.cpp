#include "hsh/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hsh::io {

namespace {

json ext_to_json(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

[[maybe_unused]] double ext_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("unexpected extended-real string: " + s);
  }
  return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const frobenius::Expansion& e) {
  return json{{"endpoint", e.endpoint},
              {"exponent", e.exponent},
              {"coefficients", e.coeffs},
              {"radius", e.radius}};
}

frobenius::Expansion expansion_from_json(const json& j) {
  frobenius::Expansion e;
  e.endpoint = j.at("endpoint").get<int>();
  e.exponent = j.at("exponent").get<double>();
  e.coeffs = j.at("coefficients").get<std::vector<double>>();
  e.radius = j.at("radius").get<double>();
  return e;
}

json to_json(const PowerModel& m) {
  return json{{"powers", m.powers}, {"coefficients", m.coeffs}};
}

PowerModel power_model_from_json(const json& j) {
  PowerModel m;
  m.powers = j.at("powers").get<std::vector<double>>();
  m.coeffs = j.at("coefficients").get<std::vector<double>>();
  return m;
}

json to_json(const AngularProfile& p) {
  json j;
  j["kind"] = p.kind == AngularProfile::Kind::linear ? "linear" : "nonlinear";
  j["n"] = p.n;
  j["mu"] = p.mu;
  j["nu"] = p.nu;
  j["Lambda"] = p.Lambda;
  j["p"] = p.p;
  j["Lambda_star"] = p.Lambda_star;
  j["prefactor"] = p.prefactor;
  j["switch0"] = p.switch0;
  j["switch1"] = p.switch1;
  j["grid"] = p.grid;
  j["y"] = p.y;
  j["dy"] = p.dy;
  j["ddy"] = p.ddy;
  j["have_bases0"] = p.have_bases0;
  if (p.have_bases0) {
    j["basis0_minus"] = to_json(p.basis0_minus);
    j["basis0_plus"] = to_json(p.basis0_plus);
    j["A"] = p.A;
    j["B"] = p.B;
  }
  j["model0"] = to_json(p.model0);
  j["have_expansion1"] = p.have_expansion1;
  if (p.have_expansion1) {
    j["expansion1"] = to_json(p.expansion1);
    j["C1"] = p.C1;
  }
  j["normalization"] = p.normalization;
  return j;
}

AngularProfile profile_from_json(const json& j) {
  AngularProfile p;
  p.kind = j.at("kind").get<std::string>() == "linear" ? AngularProfile::Kind::linear
                                                       : AngularProfile::Kind::nonlinear;
  p.n = j.at("n").get<int>();
  p.mu = j.at("mu").get<double>();
  p.nu = j.at("nu").get<double>();
  p.Lambda = j.at("Lambda").get<double>();
  p.p = j.at("p").get<double>();
  p.Lambda_star = j.at("Lambda_star").get<double>();
  p.prefactor = j.at("prefactor").get<double>();
  p.switch0 = j.at("switch0").get<double>();
  p.switch1 = j.at("switch1").get<double>();
  p.grid = j.at("grid").get<std::vector<double>>();
  p.y = j.at("y").get<std::vector<double>>();
  p.dy = j.at("dy").get<std::vector<double>>();
  p.ddy = j.at("ddy").get<std::vector<double>>();
  p.have_bases0 = j.at("have_bases0").get<bool>();
  if (p.have_bases0) {
    p.basis0_minus = expansion_from_json(j.at("basis0_minus"));
    p.basis0_plus = expansion_from_json(j.at("basis0_plus"));
    p.A = j.at("A").get<double>();
    p.B = j.at("B").get<double>();
  }
  p.model0 = power_model_from_json(j.at("model0"));
  p.have_expansion1 = j.at("have_expansion1").get<bool>();
  if (p.have_expansion1) {
    p.expansion1 = expansion_from_json(j.at("expansion1"));
    p.C1 = j.at("C1").get<double>();
  }
  p.normalization = j.at("normalization").get<std::string>();
  return p;
}

json to_json(const nonlinear::Bracket& b) {
  return json{{"branch", nonlinear::to_string(b.branch)},
              {"row", b.row},
              {"tau", b.tau},
              {"c", b.c},
              {"kappa", b.kappa},
              {"epsilon", b.epsilon},
              {"n", b.n},
              {"mu", b.mu},
              {"p", b.p},
              {"alpha", b.alpha},
              {"Lambda_star", b.Lambda_star},
              {"Lambda0", b.Lambda0},
              {"Lambda_eps", b.Lambda_eps}};
}

nonlinear::Bracket bracket_from_json(const json& j) {
  nonlinear::Bracket b;
  b.branch = j.at("branch").get<std::string>() == "plus" ? nonlinear::Branch::plus
                                                         : nonlinear::Branch::minus;
  b.row = j.at("row").get<int>();
  b.tau = j.at("tau").get<double>();
  b.c = j.at("c").get<double>();
  b.kappa = j.at("kappa").get<double>();
  b.epsilon = j.at("epsilon").get<double>();
  b.n = j.at("n").get<int>();
  b.mu = j.at("mu").get<double>();
  b.p = j.at("p").get<double>();
  b.alpha = j.at("alpha").get<double>();
  b.Lambda_star = j.at("Lambda_star").get<double>();
  b.Lambda0 = j.at("Lambda0").get<double>();
  b.Lambda_eps = j.at("Lambda_eps").get<double>();
  return b;
}

json to_json(const nonlinear::NonlinearProfile& p) {
  json j;
  j["branch"] = nonlinear::to_string(p.branch);
  j["v_limit"] = p.v_limit;
  j["residual_sup"] = p.residual_sup;
  j["iterations"] = p.iterations;
  j["final_change"] = p.final_change;
  j["b_admixture"] = p.b_admixture;
  j["bracket"] = to_json(p.bracket);
  j["profile"] = to_json(p.profile);
  return j;
}

nonlinear::NonlinearProfile nonlinear_profile_from_json(const json& j) {
  nonlinear::NonlinearProfile p;
  p.branch = j.at("branch").get<std::string>() == "plus" ? nonlinear::Branch::plus
                                                         : nonlinear::Branch::minus;
  p.v_limit = j.at("v_limit").get<double>();
  p.residual_sup = j.at("residual_sup").get<double>();
  p.iterations = j.at("iterations").get<int>();
  p.final_change = j.at("final_change").get<double>();
  p.b_admixture = j.at("b_admixture").get<double>();
  p.bracket = bracket_from_json(j.at("bracket"));
  p.profile = profile_from_json(j.at("profile"));
  return p;
}

json to_json(const spectra::SeparableHarmonic& h) {
  json j;
  j["kind"] = spectra::to_string(h.kind);
  j["n"] = h.n;
  j["mu"] = h.mu;
  j["gamma"] = h.gamma;
  j["m"] = h.m;
  j["positive"] = h.positive;
  j["closed_form"] = h.closed_form;
  j["closed_exponent"] = h.closed_exponent;
  j["azimuthal"] = h.azimuthal;
  j["note"] = h.note;
  if (!h.closed_form) j["angular"] = to_json(h.angular);
  return j;
}

spectra::SeparableHarmonic harmonic_from_json(const json& j) {
  spectra::SeparableHarmonic h;
  h.kind = spectra::harmonic_kind_from_string(j.at("kind").get<std::string>());
  h.n = j.at("n").get<int>();
  h.mu = j.at("mu").get<double>();
  h.gamma = j.at("gamma").get<double>();
  h.m = j.at("m").get<int>();
  h.positive = j.at("positive").get<bool>();
  h.closed_form = j.at("closed_form").get<bool>();
  h.closed_exponent = j.at("closed_exponent").get<double>();
  h.azimuthal = j.at("azimuthal").get<std::string>();
  h.note = j.at("note").get<std::string>();
  if (!h.closed_form) h.angular = profile_from_json(j.at("angular"));
  return h;
}

json to_json(const spectra::EigenResult& e) {
  json j;
  j["s"] = e.s;
  j["m"] = e.m;
  j["Lambda"] = e.Lambda_sm;
  j["gamma_plus"] = e.gamma_plus;
  j["gamma_minus"] = e.gamma_minus;
  j["mismatch"] = e.mismatch;
  j["node_count"] = e.node_count;
  j["profile"] = to_json(e.profile);
  return j;
}

spectra::EigenResult eigen_result_from_json(const json& j) {
  spectra::EigenResult e;
  e.s = j.at("s").get<int>();
  e.m = j.at("m").get<int>();
  e.Lambda_sm = j.at("Lambda").get<double>();
  e.gamma_plus = j.at("gamma_plus").get<double>();
  e.gamma_minus = j.at("gamma_minus").get<double>();
  e.mismatch = j.at("mismatch").get<double>();
  e.node_count = j.at("node_count").get<int>();
  e.profile = profile_from_json(j.at("profile"));
  return e;
}

json to_json(const ExponentTable& t) {
  json j;
  j["n"] = t.n;
  j["mu"] = t.mu;
  j["alpha_plus"] = t.alpha_plus;
  j["alpha_minus"] = t.alpha_minus;
  j["p_c"] = t.p_c;
  j["p_KO"] = ext_to_json(t.p_KO);
  j["p_c_minus"] = ext_to_json(t.p_c_minus);
  j["mu_star"] = t.mu_star;
  if (t.C_pmu)
    j["C_pmu"] = *t.C_pmu;
  else
    j["C_pmu"] = nullptr;
  j["Lambda_alpha_plus"] = t.alpha_plus * (t.alpha_plus + t.n - 2);
  return j;
}

json to_json(const RegimeClassification& rc) {
  json j;
  j["plus_branch"] = to_string(rc.plus_branch);
  j["minus_branch"] = to_string(rc.minus_branch);
  j["strong_singularity_possible"] = rc.strong_singularity_possible;
  j["table1_row"] = rc.table1_row;
  j["applicable_theorems"] = rc.applicable_theorems;
  j["Lambda0"] = rc.Lambda0;
  j["Lambda0_minus"] = rc.Lambda0_minus;
  return j;
}

json to_json(const spectra::GrowthBoundReport& r) {
  json j;
  j["pass"] = r.pass;
  j["c_best"] = ext_to_json(r.c_best);
  j["sup_ratio"] = r.sup_ratio;
  j["inf_ratio"] = r.inf_ratio;
  j["slope_low_t"] = r.slope_low_t;
  j["r_min"] = r.r_min;
  j["r_max"] = r.r_max;
  j["n_r"] = r.n_r;
  j["n_theta"] = r.n_theta;
  j["worst_r"] = r.worst_r;
  j["worst_t"] = r.worst_t;
  return j;
}

json to_json(const verify::BoundReport& r) {
  json j;
  j["constant_found"] = r.constant_found;
  j["grid_spec"] = r.grid_spec;
  j["worst_point"] = r.worst_point;
  j["sup_product"] = r.sup_product;
  j["pass"] = r.pass;
  return j;
}

json to_json(const verify::PLVerdict& v) {
  json j;
  j["hypothesis_a"] = v.hypothesis_a;
  j["hypothesis_b"] = v.hypothesis_b;
  j["hypotheses_hold"] = v.hypotheses_hold;
  j["conclusion_holds"] = v.conclusion_holds;
  j["inconclusive"] = v.inconclusive;
  j["limit_a"] = v.limit_a;
  j["limit_b"] = v.limit_b;
  j["limit_conclusion"] = v.limit_conclusion;
  j["slope_a"] = v.slope_a;
  j["slope_b"] = v.slope_b;
  j["slope_conclusion"] = v.slope_conclusion;
  return j;
}

json to_json(const nonlinear::UniquenessReport& r) {
  json j;
  j["n_starts"] = r.n_starts;
  j["max_pairwise_diff"] = r.max_pairwise_diff;
  j["tol"] = r.tol;
  j["agree"] = r.agree;
  j["w0_all_positive"] = r.w0_all_positive;
  j["w0_values"] = r.w0_values;
  j["start_labels"] = r.start_labels;
  j["seed"] = r.seed;
  return j;
}

void save_artifact(const std::string& path, const std::string& kind, const json& data) {
  json doc;
  doc["artifact"] = kind;
  doc["version"] = 1;
  doc["data"] = data;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(1, ' ') << "\n";
}

json load_artifact(const std::string& path, std::string* kind_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open artifact: " + path);
  json doc = json::parse(in);
  if (kind_out) *kind_out = doc.at("artifact").get<std::string>();
  return doc.at("data");
}

}  // namespace hsh::io
