#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixlab/transport.hpp"
#include "oracles.hpp"

using namespace mixlab;

namespace {

ScalarField two_mode_field(int n) {
  std::vector<double> samples(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      samples[static_cast<std::size_t>(i) * n + j] =
          2.0 * std::cos(kTwoPi * x) + 0.5 * std::sin(kTwoPi * (x + 2 * y));
    }
  return make_field(n, std::move(samples), true);
}

}  // namespace

TEST_CASE("flow_map: translation is exact on the cover") {
  const VelocityModel m = translation({1.0, 0.0});
  const FlowMap fm = flow_map(m, 0.0, 0.25, 1.0 / 64, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      CHECK(fm.at(i, j).x == fm.seed(i, j).x + 0.25);
      CHECK(fm.at(i, j).y == fm.seed(i, j).y);
    }
}

TEST_CASE("flow_map: steady shear matches the explicit solution") {
  const double a = 1.0, T = 1.0;
  const VelocityModel m = steady_shear(a);
  const FlowMap fm = flow_map(m, 0.0, T, 0.05, 64);
  for (int i = 0; i < 64; i += 3)
    for (int j = 0; j < 64; j += 3) {
      const Vec2 x = fm.seed(i, j);
      CHECK(fm.at(i, j).x ==
            doctest::Approx(x.x + T * a * std::sin(kTwoPi * x.y)).epsilon(1e-8));
      CHECK(fm.at(i, j).y == doctest::Approx(x.y).epsilon(1e-12));
    }
}

TEST_CASE("flow_map: forward then backward composes to the identity") {
  const VelocityModel m = alternating_shear(1.0, 0.5);
  for (const auto& [n, T] : {std::pair{48, 2.0}, std::pair{24, 10.0}}) {
    const double dt = 1e-2;
    const FlowMap fwd = flow_map(m, 0.0, T, dt, n);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec2 back = detail::integrate(m, T, 0.0, dt, fwd.at(i, j));
        worst = std::max(worst, (back - fwd.seed(i, j)).norm());
      }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("flow_map rejects CFL violations for non-exempt models") {
  const int n = 64;
  RegularityBudget b;
  b.sup_norm = 1.0;
  b.lip = kTwoPi;
  std::vector<double> u1(static_cast<std::size_t>(n) * n), u2(u1.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      u1[static_cast<std::size_t>(i) * n + j] = std::sin(kTwoPi * j / n);
  const VelocityModel m = grid_sampled(make_field(n, u1), make_field(n, u2), b);
  CHECK_THROWS_AS(flow_map(m, 0.0, 1.0, 0.1, n), std::invalid_argument);
  CHECK_NOTHROW(flow_map(m, 0.0, 0.01, 0.5 / n, n));
}

TEST_CASE("advect: lattice-commensurate translation is an exact cyclic shift") {
  const int n = 64;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = translation({1.0, 0.0});
  // t = 16/64, dt binary so the backward sum is exact
  const ScalarField g = advect(f, m, 0.25, 1.0 / 64);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(g.at(i, j) == f.at((i - 16 + n) % n, j));
  // norms are bit-stable under the shift (permutation-invariant reductions)
  CHECK(lp_norm(g, 1.0) == lp_norm(f, 1.0));
  CHECK(lp_norm(g, 2.0) == lp_norm(f, 2.0));
  CHECK(linf_norm(g) == linf_norm(f));
  CHECK(g.mean == f.mean);
}

TEST_CASE("advect: t = 0 is the identity") {
  const ScalarField f = two_mode_field(32);
  const ScalarField g = advect(f, translation({1.0, 0.0}), 0.0, 0.01);
  CHECK(g.samples == f.samples);
}

TEST_CASE("advect: bilinear fallback stays accurate to first order") {
  const int n = 128;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = steady_shear(1.0);
  const ScalarField g = advect(f, m, 0.5, 5e-3, Interp::bilinear);
  double worst = 0.0;
  for (int i = 0; i < n; i += 3)
    for (int j = 0; j < n; j += 3) {
      const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      const double xs = x - 0.5 * std::sin(kTwoPi * y);
      const double exact =
          2.0 * std::cos(kTwoPi * xs) + 0.5 * std::sin(kTwoPi * (xs + 2 * y));
      worst = std::max(worst, std::abs(g.at(i, j) - exact));
    }
  CHECK(worst < 5e-2);  // coarser than bicubic but convergent
  CHECK(std::abs(g.mean - f.mean) < 1e-6);
}

TEST_CASE("advect: steady shear matches the explicit characteristic formula") {
  const int n = 256;
  const double a = 1.0, T = 1.0, dt = 5e-3;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = steady_shear(a);
  const ScalarField g = advect(f, m, T, dt);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
      const double xs = x - T * a * std::sin(kTwoPi * y);
      const double exact =
          2.0 * std::cos(kTwoPi * xs) + 0.5 * std::sin(kTwoPi * (xs + 2 * y));
      worst = std::max(worst, std::abs(g.at(i, j) - exact));
    }
  CHECK(worst < 1e-3);
  // mean preserved within the advection tolerance
  CHECK(std::abs(g.mean - f.mean) < 1e-6);
}

TEST_CASE("gronwall_check: isometries give unit ratios") {
  const VelocityModel m = translation({0.3, 0.4});
  const FlowMap fm = flow_map(m, 0.0, 2.0, 0.01, 32);
  const GronwallReport rep = gronwall_check(fm, 0.0, 20000);
  CHECK(rep.worst_expansion == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.worst_contraction == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.pass);

  const FlowMap id = flow_map(m, 0.0, 0.0, 0.01, 32);
  const GronwallReport rid = gronwall_check(id, 5.0, 5000);
  CHECK(rid.worst_expansion == 1.0);
  CHECK(rid.worst_contraction == 1.0);
}

TEST_CASE("gronwall_check: shear expansion stays below the two-sided bound") {
  const double a = 1.0, T = 1.0;
  const VelocityModel m = steady_shear(a);
  const FlowMap fm = flow_map(m, 0.0, T, 0.05, 128);
  const GronwallReport rep = gronwall_check(fm, m.budget.lip, 100000);
  CHECK(rep.pass);
  // the largest singular value of a unit shear with slope L is L/2 + sqrt(1 + L^2/4)
  const double L = kTwoPi * T;
  CHECK(rep.worst_expansion <= 0.5 * L + std::sqrt(1.0 + 0.25 * L * L) + 1e-6);
  CHECK(rep.worst_expansion > 2.0);
}

TEST_CASE("jacobian determinant stays near one") {
  const VelocityModel m = alternating_shear(1.0, 0.5);
  const FlowMap fm = flow_map(m, 0.0, 1.0, 0.01, 128);
  const JacobianStats st = jacobian_stats(fm);
  CHECK(std::abs(st.mean_det - 1.0) < 1e-3);
  // central differences on the composed shear carry the truncation error here
  CHECK(st.min_det > 0.9);
  CHECK(st.max_det < 1.1);
}

TEST_CASE("conservation_report: translation has zero drift") {
  const int n = 64;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = translation({1.0, 0.0});
  std::vector<ScalarField> fields;
  std::vector<double> times;
  for (int k = 0; k <= 4; ++k) {
    const double t = k * 0.25;
    fields.push_back(advect(f, m, t, 1.0 / 64));
    times.push_back(t);
  }
  const ConservationReport rep = conservation_report(fields, times);
  CHECK(rep.max_rel_l2_drift == 0.0);
  CHECK(rep.max_mean_drift == 0.0);
  for (std::size_t i = 1; i < rep.l1.size(); ++i) {
    CHECK(rep.l1[i] == rep.l1[0]);
    CHECK(rep.linf[i] == rep.linf[0]);
  }
}

TEST_CASE("conservation_report: alternating shear dissipates within budget") {
  const int n = 128;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = alternating_shear(1.0, 0.5);
  std::vector<ScalarField> fields;
  std::vector<double> times;
  for (int k = 0; k <= 4; ++k) {
    const double t = k * 0.25;
    fields.push_back(advect(f, m, t, 5e-3));
    times.push_back(t);
  }
  const ConservationReport rep = conservation_report(fields, times);
  CHECK(rep.max_rel_l2_drift < 1e-2);
  CHECK(rep.max_mean_drift < 1e-6);
  // energy moves toward higher shells: the lowest shell loses energy
  CHECK(rep.shells.back()[1] < rep.shells.front()[1]);
}

TEST_CASE("H1 growth bounded by the exponential budget") {
  const int n = 128;
  const double interp_tol = 1e-3;
  const ScalarField f = two_mode_field(n);
  const VelocityModel m = steady_shear(1.0);
  const double h1_0 = sobolev_norm(f, 1.0);
  for (double t : {0.25, 0.5, 1.0}) {
    const ScalarField g = advect(f, m, t, 5e-3);
    CHECK(sobolev_norm(g, 1.0) <=
          h1_0 * std::exp(m.budget.lip * t) * (1.0 + 10.0 * interp_tol));
  }
}
