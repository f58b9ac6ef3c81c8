#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/geometry.hpp"
#include "mixlab/interp.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/spectral.hpp"

namespace mixlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Declared regularity budgets of a velocity model. All derivative-based
/// entries carry the true 2pi factors (lip is the actual Lipschitz constant,
/// enstrophy is ||grad u||_{L2}, and so on), since they feed bound formulas
/// that live in physical units.
struct RegularityBudget {
  double lip = kInf;        // sup_t Lip(u(t,.))
  double kinetic = 0.0;     // sup_t ||u(t,.)||_{L2}
  double enstrophy = 0.0;   // sup_t ||grad u(t,.)||_{L2}
  double bv = 0.0;          // sup_t BV seminorm (jump size x interface length)
  double sup_norm = 0.0;    // sup_t ||u(t,.)||_{Linf}
  double sobolev_p = 2.0;   // exponent for w1p_norm
  double w1p_norm = 0.0;    // sup_t ||grad u(t,.)||_{Lp}
};

/// A divergence-free velocity model: exact pointwise evaluation plus declared
/// budgets. Models are closed-form evaluators, not stored grids, so flow-map
/// tests carry no interpolation error. Time-piecewise models expose their
/// breakpoints so integrators never step across a discontinuity in time.
struct VelocityModel {
  enum class Kind { translation, steady_shear, alternating_shear, bressan, grid_sampled };

  Kind kind = Kind::translation;
  RegularityBudget budget;
  std::function<Vec2(double, Vec2)> eval;
  // Smallest breakpoint strictly greater than t (or +inf), and largest
  // strictly smaller (or -inf). Both null for time-smooth models.
  std::function<double(double)> next_breakpoint;
  std::function<double(double)> prev_breakpoint;
  bool cfl_exempt = false;        // one-step-exact models (translations, shears)
  bool has_interfaces = false;    // spatial discontinuity lines exist
  std::string description;

  Vec2 operator()(double t, const Vec2& x) const { return eval(t, wrap01(x)); }
};

/// Constant translation; mixes nothing and costs no regularity.
inline VelocityModel translation(Vec2 v) {
  VelocityModel m;
  m.kind = VelocityModel::Kind::translation;
  m.eval = [v](double, Vec2) { return v; };
  m.budget.lip = 0.0;
  m.budget.kinetic = v.norm();
  m.budget.enstrophy = 0.0;
  m.budget.bv = 0.0;
  m.budget.sup_norm = v.norm();
  m.budget.w1p_norm = 0.0;
  m.cfl_exempt = true;
  m.description = "translation";
  return m;
}

/// u(x, y) = (a sin(2 pi y), 0).
inline VelocityModel steady_shear(double a) {
  if (a <= 0.0) throw std::invalid_argument("steady_shear: amplitude must be positive");
  VelocityModel m;
  m.kind = VelocityModel::Kind::steady_shear;
  m.eval = [a](double, Vec2 p) { return Vec2{a * std::sin(kTwoPi * p.y), 0.0}; };
  m.budget.lip = kTwoPi * a;
  m.budget.kinetic = a / std::sqrt(2.0);
  m.budget.enstrophy = std::sqrt(2.0) * kPi * a;
  m.budget.bv = 4.0 * a;  // integral of |2 pi a cos(2 pi y)|
  m.budget.sup_norm = a;
  m.budget.w1p_norm = std::sqrt(2.0) * kPi * a;  // p = 2
  m.cfl_exempt = true;
  m.description = "steady_shear";
  return m;
}

/// Horizontal sinusoidal shear on [2n tau, (2n+1) tau), vertical on the
/// complementary half-periods. Budgets match the steady shear, time-piecewise.
inline VelocityModel alternating_shear(double a, double tau) {
  if (a <= 0.0 || tau <= 0.0)
    throw std::invalid_argument("alternating_shear: amplitude and half-period must be positive");
  VelocityModel m = steady_shear(a);
  m.kind = VelocityModel::Kind::alternating_shear;
  m.eval = [a, tau](double t, Vec2 p) {
    const long long k = static_cast<long long>(std::floor(t / tau));
    if (k % 2 == 0) return Vec2{a * std::sin(kTwoPi * p.y), 0.0};
    return Vec2{0.0, a * std::sin(kTwoPi * p.x)};
  };
  // exact boundary arithmetic: the integrator clamps steps to these values,
  // so later queries at a clamped time must bracket strictly
  m.next_breakpoint = [tau](double t) { return (std::floor(t / tau) + 1.0) * tau; };
  m.prev_breakpoint = [tau](double t) { return (std::ceil(t / tau) - 1.0) * tau; };
  m.description = "alternating_shear";
  return m;
}

/// Sample the model's components on an n x n node grid at time t.
inline std::pair<ScalarField, ScalarField> sample_velocity(const VelocityModel& m,
                                                           double t, int n) {
  std::vector<double> u1(static_cast<std::size_t>(n) * n), u2(u1.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 u = m.eval(t, Vec2{static_cast<double>(i) / n, static_cast<double>(j) / n});
      u1[static_cast<std::size_t>(i) * n + j] = u.x;
      u2[static_cast<std::size_t>(i) * n + j] = u.y;
    }
  }
  return {make_field(n, std::move(u1)), make_field(n, std::move(u2))};
}

/// L2 norm of the spectral divergence of the sampled model at time t.
inline double divergence_check(const VelocityModel& m, double t, int n) {
  const auto [u1, u2] = sample_velocity(m, t, n);
  return spectral_divergence_l2(u1, u2);
}

/// Steady velocity read from two grid-sampled components, evaluated between
/// nodes by bicubic interpolation. Budgets must be declared by the caller;
/// the sampled divergence is checked on construction.
inline VelocityModel grid_sampled(ScalarField u1, ScalarField u2,
                                  const RegularityBudget& budget) {
  if (u1.n != u2.n)
    throw std::invalid_argument("grid_sampled: component resolutions differ");
  const double div = spectral_divergence_l2(u1, u2);
  if (div > 1e-8)
    throw std::invalid_argument("grid_sampled: sampled divergence " + std::to_string(div) +
                                " exceeds 1e-8");
  VelocityModel m;
  m.kind = VelocityModel::Kind::grid_sampled;
  m.budget = budget;
  m.eval = [c1 = std::move(u1), c2 = std::move(u2)](double, Vec2 p) {
    return Vec2{interpolate(c1, p), interpolate(c2, p)};
  };
  m.description = "grid_sampled";
  return m;
}

}  // namespace mixlab
