#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/geometry.hpp"
#include "mixlab/interp.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/spectral.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

/// Grid-sampled flow map. Positions live in the universal cover so that
/// displacement diagnostics never see wrap jumps; torus positions are the
/// wrapped values. Seeded at the grid nodes at time t0, integrated to t1
/// (backward when t1 < t0).
struct FlowMap {
  int n = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<Vec2> positions;

  bool backward() const { return t1 < t0; }
  Vec2 seed(int i, int j) const {
    return {static_cast<double>(i) / n, static_cast<double>(j) / n};
  }
  const Vec2& at(int i, int j) const {
    return positions[static_cast<std::size_t>(i) * n + j];
  }
};

inline constexpr double kDefaultCflFactor = 0.5;

namespace detail {

inline Vec2 rk4_step(const VelocityModel& m, double t, double dt, Vec2 x) {
  // steps never straddle a declared breakpoint, so all stage queries must
  // stay strictly inside the step: nudge endpoint eval times one ulp inward
  const double lo = std::min(t, t + dt), hi = std::max(t, t + dt);
  const double lo_in = std::nextafter(lo, hi), hi_in = std::nextafter(hi, lo);
  auto at = [&](double tau) { return std::min(std::max(tau, lo_in), hi_in); };
  const Vec2 k1 = m(at(t), x);
  const Vec2 k2 = m(at(t + 0.5 * dt), x + (0.5 * dt) * k1);
  const Vec2 k3 = m(at(t + 0.5 * dt), x + (0.5 * dt) * k2);
  const Vec2 k4 = m(at(t + dt), x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate one trajectory from t0 to t1, chopping steps at the model's
// declared time breakpoints so no step straddles a discontinuity.
inline Vec2 integrate(const VelocityModel& m, double t0, double t1, double dt, Vec2 x) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  const double eps = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  while (dir * (t1 - t) > eps) {
    double step_end = t + dir * dt;
    if (dir > 0) {
      if (m.next_breakpoint) step_end = std::min(step_end, m.next_breakpoint(t));
      step_end = std::min(step_end, t1);
    } else {
      if (m.prev_breakpoint) step_end = std::max(step_end, m.prev_breakpoint(t));
      step_end = std::max(step_end, t1);
    }
    x = rk4_step(m, t, step_end - t, x);
    t = step_end;
  }
  return x;
}

inline void require_cfl(const VelocityModel& m, double dt, int n) {
  if (dt <= 0.0) throw std::invalid_argument("transport: dt must be positive");
  if (m.cfl_exempt) return;
  const double limit = kDefaultCflFactor / n;
  if (dt * m.budget.sup_norm > limit + 1e-15)
    throw std::invalid_argument("transport: CFL violation, dt*|u| = " +
                                std::to_string(dt * m.budget.sup_norm) +
                                " exceeds " + std::to_string(limit));
}

}  // namespace detail

inline FlowMap flow_map(const VelocityModel& m, double t0, double t1, double dt, int n) {
  detail::require_cfl(m, dt, n);
  FlowMap fm;
  fm.n = n;
  fm.t0 = t0;
  fm.t1 = t1;
  fm.positions.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      fm.positions[static_cast<std::size_t>(i) * n + j] =
          detail::integrate(m, t0, t1, dt, fm.seed(i, j));
  return fm;
}

/// Semi-Lagrangian advection by backward characteristics: every node is
/// integrated back to the seed time t0 and the initial datum is interpolated
/// there once, so interpolation error does not compound across snapshots.
inline ScalarField advect(const ScalarField& field, const VelocityModel& m, double t,
                          double dt, Interp interp = Interp::bicubic, double t0 = 0.0) {
  if (t == t0) return field;
  detail::require_cfl(m, dt, field.n);
  const int n = field.n;
  std::vector<double> samples(field.samples.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 x{static_cast<double>(i) / n, static_cast<double>(j) / n};
      const Vec2 x0 = detail::integrate(m, t, t0, dt, x);
      samples[static_cast<std::size_t>(i) * n + j] = interpolate(field, x0, interp);
    }
  }
  return make_field(n, std::move(samples));
}

struct GronwallReport {
  double worst_expansion = 1.0;   // max over pairs of dist(Px,Py)/dist(x,y)
  double worst_contraction = 1.0; // min over pairs
  double bound_hi = 0.0;          // e^{L|t|} + tol
  double bound_lo = 0.0;          // e^{-L|t|} - tol
  int pairs = 0;
  bool pass = false;
};

/// Two-sided flow-regularity check over random node pairs (torus distance);
/// the integrator tolerance is folded into both bounds.
inline GronwallReport gronwall_check(const FlowMap& fm, double lip, int sample_pairs,
                                     std::uint64_t seed = 12345) {
  if (!std::isfinite(lip)) throw std::invalid_argument("gronwall_check: L must be finite");
  const double span = std::abs(fm.t1 - fm.t0);
  GronwallReport rep;
  rep.bound_hi = std::exp(lip * span) + 1e-6;
  rep.bound_lo = std::exp(-lip * span) - 1e-6;
  rep.pairs = sample_pairs;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, fm.n - 1);
  double worst_hi = 1.0, worst_lo = 1.0;
  for (int s = 0; s < sample_pairs; ++s) {
    const int i1 = pick(rng), j1 = pick(rng);
    int i2 = pick(rng), j2 = pick(rng);
    if (i1 == i2 && j1 == j2) {
      i2 = (i2 + 1) % fm.n;  // avoid the degenerate 0/0 ratio
    }
    const double d0 = torus_dist(fm.seed(i1, j1), fm.seed(i2, j2));
    const double d1 = torus_dist(fm.at(i1, j1), fm.at(i2, j2));
    const double ratio = d1 / d0;
    worst_hi = std::max(worst_hi, ratio);
    worst_lo = std::min(worst_lo, ratio);
  }
  rep.worst_expansion = worst_hi;
  rep.worst_contraction = worst_lo;
  rep.pass = worst_hi <= rep.bound_hi && worst_lo >= rep.bound_lo;
  return rep;
}

struct JacobianStats {
  double mean_det = 0.0;
  double min_det = 0.0;
  double max_det = 0.0;
};

/// Incompressibility proxy: determinant of the central-difference Jacobian of
/// the cover positions. Cover offsets of wrapped neighbours are removed by
/// rounding each difference to the branch nearest the grid spacing.
inline JacobianStats jacobian_stats(const FlowMap& fm) {
  const int n = fm.n;
  const double h = 1.0 / n;
  auto branch = [h](double d, double expected) { return d - std::round((d - expected) / 1.0); };
  std::vector<double> dets;
  dets.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2& xp = fm.at((i + 1) % n, j);
      const Vec2& xm = fm.at((i - 1 + n) % n, j);
      const Vec2& yp = fm.at(i, (j + 1) % n);
      const Vec2& ym = fm.at(i, (j - 1 + n) % n);
      const double a11 = branch(xp.x - xm.x, 2 * h) / (2 * h);
      const double a21 = branch(xp.y - xm.y, 0.0) / (2 * h);
      const double a12 = branch(yp.x - ym.x, 0.0) / (2 * h);
      const double a22 = branch(yp.y - ym.y, 2 * h) / (2 * h);
      dets.push_back(a11 * a22 - a12 * a21);
    }
  }
  JacobianStats st;
  st.min_det = dets[0];
  st.max_det = dets[0];
  for (double d : dets) {
    st.min_det = std::min(st.min_det, d);
    st.max_det = std::max(st.max_det, d);
  }
  st.mean_det = stable_sum(std::move(dets)) / (static_cast<double>(n) * n);
  return st;
}

struct ConservationReport {
  std::vector<double> times;
  std::vector<double> l1, l2, linf, mean, h1;
  std::vector<std::vector<double>> shells;  // spectral energy by |k| shell
  double max_rel_l2_drift = 0.0;
  double max_mean_drift = 0.0;
};

/// Conserved-quantity diagnostics along a series of advected fields.
inline ConservationReport conservation_report(const std::vector<ScalarField>& fields,
                                              const std::vector<double>& times) {
  if (fields.empty() || fields.size() != times.size())
    throw std::invalid_argument("conservation_report: series and times must align");
  ConservationReport rep;
  rep.times = times;
  for (const auto& f : fields) {
    rep.l1.push_back(lp_norm(f, 1.0));
    rep.l2.push_back(lp_norm(f, 2.0));
    rep.linf.push_back(linf_norm(f));
    rep.mean.push_back(f.mean);
    rep.h1.push_back(sobolev_norm(f, 1.0));
    rep.shells.push_back(spectral_shell_energy(spectral(f)));
  }
  const double l2_0 = rep.l2.front();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (l2_0 > 0.0)
      rep.max_rel_l2_drift =
          std::max(rep.max_rel_l2_drift, std::abs(rep.l2[i] - l2_0) / l2_0);
    rep.max_mean_drift =
        std::max(rep.max_mean_drift, std::abs(rep.mean[i] - rep.mean.front()));
  }
  return rep;
}

/// Binary flow-map export: uint64 n, double t, then 2 n^2 doubles (x then y
/// per node, row-major cover positions).
inline void write_flow_map(const std::string& path, const FlowMap& fm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(fm.n);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&fm.t1), sizeof(double));
  for (const Vec2& p : fm.positions) {
    out.write(reinterpret_cast<const char*>(&p.x), sizeof(double));
    out.write(reinterpret_cast<const char*>(&p.y), sizeof(double));
  }
}

}  // namespace mixlab
