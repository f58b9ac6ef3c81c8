#include <doctest.h>

#include <cmath>
#include <random>

#include "mixlab/bressan.hpp"
#include "mixlab/field_io.hpp"
#include "mixlab/velocity.hpp"
#include "oracles.hpp"

using namespace mixlab;

TEST_CASE("translation model") {
  const VelocityModel m = translation({1.0, 0.0});
  for (double t : {0.0, 0.7, 3.0}) {
    const Vec2 u = m.eval(t, {0.3, 0.9});
    CHECK(u.x == 1.0);
    CHECK(u.y == 0.0);
  }
  CHECK(m.budget.lip == 0.0);
  CHECK(m.budget.enstrophy == 0.0);
  CHECK(m.budget.kinetic == 1.0);
  CHECK(divergence_check(m, 0.0, 64) == 0.0);
}

TEST_CASE("steady shear model and budgets") {
  const double a = 1.5;
  const VelocityModel m = steady_shear(a);
  const Vec2 peak = m.eval(0.0, {0.0, 0.25});
  CHECK(peak.x == doctest::Approx(a).epsilon(1e-15));
  CHECK(peak.y == 0.0);
  CHECK(m.budget.lip == doctest::Approx(kTwoPi * a));
  CHECK(m.budget.kinetic == doctest::Approx(a / std::sqrt(2.0)));
  CHECK(m.budget.enstrophy == doctest::Approx(std::sqrt(2.0) * kPi * a));
  CHECK(m.budget.sup_norm == a);
  CHECK(divergence_check(m, 0.0, 64) < 1e-12);
  CHECK_THROWS_AS(steady_shear(-1.0), std::invalid_argument);
}

TEST_CASE("alternating shear switches axis at the half period") {
  const VelocityModel m = alternating_shear(1.0, 0.5);
  const Vec2 u0 = m.eval(0.25, {0.1, 0.25});
  CHECK(u0.x == doctest::Approx(1.0));
  CHECK(u0.y == 0.0);
  const Vec2 u1 = m.eval(0.75, {0.25, 0.1});
  CHECK(u1.x == 0.0);
  CHECK(u1.y == doctest::Approx(1.0));
  // breakpoints bracket strictly
  CHECK(m.next_breakpoint(0.0) == doctest::Approx(0.5));
  CHECK(m.next_breakpoint(0.5) == doctest::Approx(1.0));
  CHECK(m.prev_breakpoint(0.5) == doctest::Approx(0.0));
  CHECK(m.prev_breakpoint(0.7) == doctest::Approx(0.5));
  CHECK(divergence_check(m, 0.2, 64) < 1e-12);
  CHECK(divergence_check(m, 0.7, 64) < 1e-12);
}

TEST_CASE("declared budgets are consistent with sampled evaluation") {
  const int n = 256;
  for (const VelocityModel& m :
       {translation({0.7, -0.2}), steady_shear(1.0), alternating_shear(2.0, 0.5)}) {
    for (double t : {0.1, 0.6}) {
      const auto [u1, u2] = sample_velocity(m, t, n);
      // sup norm
      const double sup = std::max(linf_norm(u1), linf_norm(u2));
      CHECK(sup <= m.budget.sup_norm * 1.05 + 1e-12);
      CHECK(sup >= m.budget.sup_norm * 0.95 - 1e-12);
      // kinetic energy
      const double k2 = std::sqrt(lp_norm(u1, 2.0) * lp_norm(u1, 2.0) +
                                  lp_norm(u2, 2.0) * lp_norm(u2, 2.0));
      CHECK(k2 <= m.budget.kinetic * 1.05 + 1e-12);
      CHECK(k2 >= m.budget.kinetic * 0.95 - 1e-12);
      CHECK(m.budget.kinetic <= m.budget.sup_norm + 1e-15);
      // enstrophy (physical gradients)
      if (m.budget.enstrophy > 0.0) {
        const ScalarField g1 = gradient_magnitude(u1);
        const ScalarField g2 = gradient_magnitude(u2);
        const double e = std::sqrt(lp_norm(g1, 2.0) * lp_norm(g1, 2.0) +
                                   lp_norm(g2, 2.0) * lp_norm(g2, 2.0));
        CHECK(e <= m.budget.enstrophy * 1.05);
        CHECK(e >= m.budget.enstrophy * 0.95);
      }
    }
  }
}

TEST_CASE("Lipschitz budget dominates sampled difference quotients") {
  const VelocityModel m = steady_shear(1.0);
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 100000; ++s) {
    const Vec2 x{unif(rng), unif(rng)};
    const Vec2 y{unif(rng), unif(rng)};
    const double d = torus_dist(x, y);
    if (d == 0.0) continue;
    const Vec2 du = m.eval(0.0, x) - m.eval(0.0, y);
    worst = std::max(worst, du.norm() / d);
  }
  CHECK(worst <= m.budget.lip + 1e-12);
  CHECK(worst > 0.9 * m.budget.lip);  // the declared budget is tight
}

TEST_CASE("bressan stage field: divergence vanishes off the interfaces") {
  const int n = 256;
  const VelocityModel m = bressan_model(Timeline::unit, 0, 4.0);
  for (double t : {0.25, 0.75, 1.25}) {
    const auto [axis, lines] = bressan_interfaces(Timeline::unit, 0, t);
    const auto [u1, u2] = sample_velocity(m, t, n);
    // finite-difference divergence away from channel walls is exactly zero
    double worst = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = 1; j + 1 < n; ++j) {
        const double coord = axis == Axis::horizontal
                                 ? static_cast<double>(j) / n
                                 : static_cast<double>(i) / n;
        bool near = false;
        for (double line : lines)
          if (torus_dist1(coord, line) <= 2.0 / n) near = true;
        if (near) continue;
        const double div =
            (u1.at(i + 1, j) - u1.at(i - 1, j) + u2.at(i, j + 1) - u2.at(i, j - 1)) *
            n / 2.0;
        worst = std::max(worst, std::abs(div));
      }
    }
    CHECK(worst == 0.0);
  }
}

TEST_CASE("grid_sampled velocity checks divergence and evaluates at nodes") {
  const int n = 64;
  // divergence-free sample: u = (sin(2 pi y), sin(2 pi x))
  std::vector<double> u1(static_cast<std::size_t>(n) * n), u2(u1.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      u1[static_cast<std::size_t>(i) * n + j] = std::sin(kTwoPi * j / n);
      u2[static_cast<std::size_t>(i) * n + j] = std::sin(kTwoPi * i / n);
    }
  RegularityBudget b;
  b.lip = kTwoPi;
  b.sup_norm = 1.0;
  b.kinetic = 1.0;
  const VelocityModel m = grid_sampled(make_field(n, u1), make_field(n, u2), b);
  const Vec2 u = m.eval(0.0, {0.0, 0.25});
  CHECK(u.x == doctest::Approx(1.0).epsilon(1e-12));

  // a compressible sample is rejected
  std::vector<double> w1(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w1[static_cast<std::size_t>(i) * n + j] = std::sin(kTwoPi * i / n);
  CHECK_THROWS_AS(grid_sampled(make_field(n, w1), make_field(n, std::vector<double>(u2.size(), 0.0)), b),
                  std::invalid_argument);
}
