#include <cmath>

#include <doctest.h>

#include "hsh/io.hpp"
#include "hsh/nonlinear.hpp"
#include "hsh/spectra.hpp"

using namespace hsh;

TEST_SUITE_BEGIN("io");

TEST_CASE("shortest round-trip double formatting") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, -1e-300, 6.02e23, 0.0}) {
    const auto s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("angular profile JSON round trip evaluates identically") {
  auto prof = solve_k_gamma(3, -0.4, 0, 0.3);
  const auto j = io::to_json(prof);
  const auto back = io::profile_from_json(j);
  for (double t : {1e-5, 1e-3, 0.05, 0.3, 0.7, 0.97, 0.9999}) {
    CHECK(back.value(t) == prof.value(t));  // bitwise: doubles survive JSON
  }
}

TEST_CASE("nonlinear profile and harmonic round trips") {
  auto np = nonlinear::solve_profile({3, 0.0, 2.0}, nonlinear::Branch::minus, 1e-8);
  const auto j = io::to_json(np);
  const auto back = io::nonlinear_profile_from_json(j);
  CHECK(back.v_limit == np.v_limit);
  for (double t : {1e-4, 0.2, 0.8, 1.0}) CHECK(back.profile.value(t) == np.profile.value(t));
  std::vector<double> x = {0.3, 0.4, 0.0};
  CHECK(nonlinear::eval_solution(back, x) == nonlinear::eval_solution(np, x));

  spectra::HarmonicExtra extra;
  extra.gamma = 0.3;
  auto h = spectra::harmonic(spectra::HarmonicKind::H_gamma, 3, 0.1, extra);
  const auto jh = io::to_json(h);
  const auto hb = io::harmonic_from_json(jh);
  CHECK(hb.value(1.7, 0.42) == h.value(1.7, 0.42));
}

TEST_CASE("artifact wrapper") {
  const auto path = std::string("/tmp/hsh_test_artifact.json");
  io::json data;
  data["x"] = 0.25;
  io::save_artifact(path, "demo", data);
  std::string kind;
  const auto loaded = io::load_artifact(path, &kind);
  CHECK(kind == "demo");
  CHECK(loaded.at("x").get<double>() == 0.25);
}

TEST_SUITE_END();
