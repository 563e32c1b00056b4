#include <cmath>

#include <doctest.h>

#include "hsh/errors.hpp"
#include "hsh/nonlinear.hpp"

using namespace hsh;
using nonlinear::Branch;

TEST_SUITE_BEGIN("nonlinear");

TEST_CASE("bracket rows and sign certificates") {
  // row 1
  auto b = nonlinear::build_bracket({3, 0.0, 1.5}, Branch::plus);
  CHECK(b.row == 1);
  CHECK(b.kappa < 1.0);
  CHECK(b.epsilon < 2.0);
  // row 3 with the constant solution inside
  auto b3 = nonlinear::build_bracket({3, 0.0, 2.0}, Branch::minus);
  CHECK(b3.row == 3);
  CHECK(b3.kappa > 1.0);
  for (double t : {1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999}) {
    CHECK(b3.sub(t) <= 2.0);
    CHECK(b3.super(t) >= 2.0);
  }
  // row 2
  auto b2 = nonlinear::build_bracket({3, 0.0, 4.0}, Branch::minus);
  CHECK(b2.row == 2);
  // row 4
  auto b4 = nonlinear::build_bracket({3, -1.0, 1.2}, Branch::minus);
  CHECK(b4.row == 4);

  for (const auto& br : {b, b3, b2, b4}) {
    for (double t : {1e-7, 1e-4, 0.01, 0.2, 0.5, 0.8, 0.99}) {
      CHECK(br.sub(t) <= br.super(t) + 1e-12);
      CHECK(br.sub_defect(t) >= -1e-12 * br.sub_defect_scale(t));
      CHECK(br.super_defect(t) <= 1e-12 * br.super_defect_scale(t));
    }
  }
}

TEST_CASE("no bracket beyond the thresholds") {
  CHECK_THROWS_AS(nonlinear::build_bracket({3, 0.0, 3.0}, Branch::plus), NoBracket);
  CHECK_THROWS_AS(nonlinear::build_bracket({3, -2.0, 4.0}, Branch::minus), NoBracket);
  // critical values are flagged
  try {
    nonlinear::build_bracket({3, 0.0, 2.0}, Branch::plus);
    CHECK(false);
  } catch (const NoBracket& e) {
    CHECK(e.critical);
  }
  try {
    nonlinear::build_bracket({3, -2.0, 3.0}, Branch::minus);
    CHECK(false);
  } catch (const NoBracket& e) {
    CHECK(e.critical);
  }
}

TEST_CASE("constant minus-branch solutions at mu = 0") {
  // n=3, p=2: v = Lambda(-2)^{1/(p-1)} = 2
  auto prof = nonlinear::solve_profile({3, 0.0, 2.0}, Branch::minus, 1e-9);
  double worst = 0;
  for (size_t i = 0; i < prof.profile.grid.size(); ++i)
    worst = std::max(worst, std::abs(prof.profile.y[i] - 2.0));
  CHECK(worst < 1e-8);
  CHECK(prof.v_limit == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(prof.residual_sup < 1e-8);

  // n=4, p=1.8: v = 1.25^{1.25}
  auto prof2 = nonlinear::solve_profile({4, 0.0, 1.8}, Branch::minus, 1e-9);
  const double expect = std::pow(1.25, 1.25);
  worst = 0;
  for (size_t i = 0; i < prof2.profile.grid.size(); ++i)
    worst = std::max(worst, std::abs(prof2.profile.y[i] - expect));
  CHECK(worst < 1e-7);
}

TEST_CASE("plus-branch profile at (3, 0, 1.5)") {
  auto prof = nonlinear::solve_profile({3, 0.0, 1.5}, Branch::plus, 1e-8);
  CHECK(prof.residual_sup < 1e-8);
  CHECK(prof.v_limit > 0.0);
  // containment and positivity on the stored grid
  for (size_t i = 0; i < prof.profile.grid.size(); ++i) {
    const double t = prof.profile.grid[i];
    const double v = std::pow(t, prof.bracket.alpha) * prof.profile.y[i];
    CHECK(v > 0.0);
    CHECK(v <= prof.bracket.super(t) * (1.0 + 1e-9) + 1e-12);
    CHECK(v >= prof.bracket.sub(t) * (1.0 - 1e-9) - 1e-12);
  }
}

TEST_CASE("integral identity holds on solutions and fails off them") {
  auto prof = nonlinear::solve_profile({3, 0.0, 1.5}, Branch::plus, 1e-9);
  CHECK(nonlinear::integral_identity_check(prof) < 1e-6);

  // constant solution: both sides evaluated by quadrature
  auto cprof = nonlinear::solve_profile({3, 0.0, 2.0}, Branch::minus, 1e-9);
  CHECK(nonlinear::integral_identity_check(cprof) < 1e-8);

  // a perturbed non-solution must be detected, even with its boundary
  // amplitude reported honestly
  const double defect = nonlinear::integral_identity_defect(
      3, 0.0, 2.0, [&](double t) { return cprof.profile.value(t) + 0.1; }, 0.0,
      cprof.v_limit + 0.1);
  CHECK(defect > 1e-2);
}

TEST_CASE("row 2 and row 4 representatives solve") {
  auto p2 = nonlinear::solve_profile({3, 0.0, 4.0}, Branch::minus, 1e-8);
  CHECK(p2.residual_sup < 1e-8);
  for (size_t i = 0; i < p2.profile.grid.size(); ++i) {
    const double t = p2.profile.grid[i];
    const double v = p2.profile.value(t);
    CHECK(v > 0.0);
    CHECK(v <= p2.bracket.super(t) * (1.0 + 1e-8) + 1e-10);
    CHECK(v >= p2.bracket.sub(t) * (1.0 - 1e-8) - 1e-10);
  }

  auto p4 = nonlinear::solve_profile({3, -1.0, 1.2}, Branch::minus, 1e-8);
  CHECK(p4.residual_sup < 1e-8);
  CHECK(p4.v_limit > 0.0);
}

TEST_CASE("uniqueness multi-start agreement (plus branch)") {
  auto rep = nonlinear::check_uniqueness_plus({3, 0.0, 1.5}, 5, 1e-6);
  CHECK(rep.agree);
  CHECK(rep.max_pairwise_diff < 1e-6);
  CHECK(rep.w0_all_positive);
  REQUIRE(rep.w0_values.size() == 5);
}

TEST_CASE("evaluation and scaling of the separable form") {
  auto prof = nonlinear::solve_profile({3, 0.0, 2.0}, Branch::minus, 1e-9);
  // radially symmetric: u = 2 |x|^{-2}
  std::vector<double> x = {0.3, 0.4, 0.0};
  const double r2 = 0.09 + 0.16;
  CHECK(nonlinear::eval_solution(prof, x) == doctest::Approx(2.0 / r2).epsilon(1e-7));

  // scaling consistency is an algebraic identity of the separable form
  auto plus = nonlinear::solve_profile({3, 0.1, 1.5}, Branch::plus, 1e-8);
  const double a = 2.0;
  std::vector<double> y = {0.2, 0.5, 0.1};
  std::vector<double> ay = {a * 0.2, a * 0.5, a * 0.1};
  const double lhs = std::pow(a, 2.0 / (plus.bracket.p - 1.0)) *
                     nonlinear::eval_solution(plus, ay);
  CHECK(lhs == doctest::Approx(nonlinear::eval_solution(plus, y)).epsilon(1e-12));

  // theta_1 = 0 ray: u(x1, 0) = v(1) x1^{-2/(p-1)}
  std::vector<double> ray = {0.7, 0.0, 0.0};
  CHECK(nonlinear::eval_solution(plus, ray) ==
        doctest::Approx(plus.profile.value(1.0) * std::pow(0.7, -2.0 / (plus.bracket.p - 1.0)))
            .epsilon(1e-10));
}

TEST_CASE("monotone iterates decrease and stay in the bracket") {
  // indirectly asserted inside the solver; a successful solve with the
  // containment flag near zero is the observable
  auto prof = nonlinear::solve_profile({3, 3.0 / 16.0, 1.8}, Branch::plus, 1e-8);
  CHECK(prof.residual_sup < 1e-8);
  CHECK(prof.v_limit > 0.0);
}

TEST_SUITE_END();
