#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/mixing.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

enum class Timeline { dyadic, unit };
enum class BressanPhase { whole, after_first_split };
enum class Axis { horizontal, vertical };

namespace detail {

// Stage channel shift patterns on the fine lattice (cells of side 2^{-(k+2)}).
// Stage 1 shears y-channels in x by one cell with signs (-,+,+,-) repeating;
// stage 2 shears x-channels in y by one cell on channels I with I mod 4 in
// {2,3}. The composed cell permutation maps the level-k checkerboard to the
// level-(k+1) checkerboard exactly; tests verify this sample-for-sample.
inline int stage1_shift(int j) { return ((j + 1) & 2) ? 1 : -1; }
inline int stage2_shift(int i) { return (i & 2) ? 1 : 0; }

inline int pow2i(int e) { return 1 << e; }

}  // namespace detail

/// One piecewise-constant shear stage: channels of width 2^{-(k+2)}
/// perpendicular to the velocity, each displaced by a lattice-commensurate
/// multiple of the channel width over the stage's time interval.
struct ShearStage {
  Axis axis = Axis::horizontal;  // horizontal: u = (s(y), 0); vertical: (0, s(x))
  int level = 0;
  double channel_width = 0.0;
  std::vector<int> shifts;  // per fine channel, in units of channel_width
  double t_begin = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_begin; }
  double speed(int channel) const {
    return shifts[channel] * channel_width / duration();
  }
  double max_speed() const {
    int m = 0;
    for (int s : shifts) m = std::max(m, std::abs(s));
    return m * channel_width / duration();
  }
};

/// Exact combinatorial state of the slice-and-dice scheme: a +-1 parity
/// pattern on the dyadic cell lattice, advanced only by exact permutations.
struct BressanState {
  int level = 0;
  BressanPhase phase = BressanPhase::whole;
  Timeline timeline = Timeline::unit;
  int base_level = 0;  // level of the initial configuration
  int lattice = 0;     // cells per side of the parity pattern
  std::vector<std::int8_t> parity;

  std::int8_t cell(int i, int j) const {
    return parity[static_cast<std::size_t>(i) * lattice + j];
  }

  int steps_taken() const { return level - base_level; }

  /// Scheme time at the current (whole) level.
  double time() const {
    const int s = steps_taken();
    if (timeline == Timeline::unit) return static_cast<double>(s);
    return 1.0 - std::pow(2.0, -s);
  }
};

/// Exact +/-1 checkerboard with squares of side 2^{-(level+1)}.
inline ScalarField checkerboard(int level, int n) {
  if (level < 0) throw std::invalid_argument("checkerboard: level must be >= 0");
  const int m = detail::pow2i(level + 2);
  if (n % m != 0)
    throw std::invalid_argument("checkerboard: resolution " + std::to_string(n) +
                                " is not a multiple of 2^(level+2) = " + std::to_string(m));
  const int cells = detail::pow2i(level + 1);
  const int stride = n / cells;
  std::vector<double> samples(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const int bi = i / stride;
    for (int j = 0; j < n; ++j) {
      const int bj = j / stride;
      samples[static_cast<std::size_t>(i) * n + j] = ((bi + bj) & 1) ? -1.0 : 1.0;
    }
  }
  return make_field(n, std::move(samples));
}

inline BressanState bressan_initial(int level, Timeline timeline) {
  BressanState st;
  st.level = level;
  st.base_level = level;
  st.timeline = timeline;
  st.lattice = detail::pow2i(level + 1);
  st.parity.resize(static_cast<std::size_t>(st.lattice) * st.lattice);
  for (int i = 0; i < st.lattice; ++i)
    for (int j = 0; j < st.lattice; ++j)
      st.parity[static_cast<std::size_t>(i) * st.lattice + j] =
          ((i + j) & 1) ? -1 : 1;
  return st;
}

namespace detail {

inline std::pair<double, double> step_interval(Timeline tl, int step) {
  if (tl == Timeline::unit)
    return {static_cast<double>(step), static_cast<double>(step + 1)};
  // dyadic: step s runs on [1 - 2^-s, 1 - 2^-(s+1))
  return {1.0 - std::pow(2.0, -step), 1.0 - std::pow(2.0, -(step + 1))};
}

}  // namespace detail

/// The two shear stages refining level k to level k+1. Stage times use the
/// step index (level - base_level) in the given timeline; each stage takes
/// half the step's time budget.
inline std::pair<ShearStage, ShearStage> step_stages(int level, Timeline timeline,
                                                     int base_level = 0) {
  if (level < base_level) throw std::invalid_argument("step_stages: level below base");
  const int m = detail::pow2i(level + 2);
  const auto [ta, tb] = detail::step_interval(timeline, level - base_level);
  const double mid = ta + 0.5 * (tb - ta);
  ShearStage s1, s2;
  s1.axis = Axis::horizontal;
  s1.level = level;
  s1.channel_width = 1.0 / m;
  s1.t_begin = ta;
  s1.t_end = mid;
  s1.shifts.resize(m);
  for (int j = 0; j < m; ++j) s1.shifts[j] = detail::stage1_shift(j);
  s2.axis = Axis::vertical;
  s2.level = level;
  s2.channel_width = 1.0 / m;
  s2.t_begin = mid;
  s2.t_end = tb;
  s2.shifts.resize(m);
  for (int i = 0; i < m; ++i) s2.shifts[i] = detail::stage2_shift(i);
  return {s1, s2};
}

namespace detail {

inline void refine_pattern(BressanState& st) {
  const int m = st.lattice;
  std::vector<std::int8_t> fine(static_cast<std::size_t>(2 * m) * (2 * m));
  for (int i = 0; i < 2 * m; ++i)
    for (int j = 0; j < 2 * m; ++j)
      fine[static_cast<std::size_t>(i) * 2 * m + j] = st.cell(i / 2, j / 2);
  st.lattice = 2 * m;
  st.parity = std::move(fine);
}

inline void coarsen_pattern(BressanState& st) {
  const int m = st.lattice / 2;
  std::vector<std::int8_t> coarse(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const std::int8_t v = st.cell(2 * i, 2 * j);
      if (st.cell(2 * i + 1, 2 * j) != v || st.cell(2 * i, 2 * j + 1) != v ||
          st.cell(2 * i + 1, 2 * j + 1) != v)
        throw std::runtime_error("coarsen: pattern is not constant on 2x2 blocks");
      coarse[static_cast<std::size_t>(i) * m + j] = v;
    }
  st.lattice = m;
  st.parity = std::move(coarse);
}

inline int wrap_cell(int m, int i) {
  int w = i % m;
  return w < 0 ? w + m : w;
}

}  // namespace detail

/// Apply a stage's cell permutation exactly (inverse = reversed shifts).
inline void apply_stage(BressanState& st, const ShearStage& stage, bool inverse = false) {
  const int m = st.lattice;
  if (static_cast<int>(stage.shifts.size()) != m)
    throw std::invalid_argument("apply_stage: lattice/stage resolution mismatch");
  std::vector<std::int8_t> next(st.parity.size());
  const int sign = inverse ? -1 : 1;
  if (stage.axis == Axis::horizontal) {
    for (int j = 0; j < m; ++j) {
      const int d = sign * stage.shifts[j];
      for (int i = 0; i < m; ++i)
        next[static_cast<std::size_t>(i) * m + j] = st.cell(detail::wrap_cell(m, i - d), j);
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const int d = sign * stage.shifts[i];
      for (int j = 0; j < m; ++j)
        next[static_cast<std::size_t>(i) * m + j] = st.cell(i, detail::wrap_cell(m, j - d));
    }
  }
  st.parity = std::move(next);
}

/// Advance one full step (two stages) by exact permutations.
inline void advance_step(BressanState& st) {
  if (st.phase != BressanPhase::whole)
    throw std::logic_error("advance_step: state is mid-step");
  if (st.lattice == detail::pow2i(st.level + 1)) detail::refine_pattern(st);
  const auto [s1, s2] = step_stages(st.level, st.timeline, st.base_level);
  apply_stage(st, s1);
  st.phase = BressanPhase::after_first_split;
  apply_stage(st, s2);
  st.phase = BressanPhase::whole;
  st.level += 1;
}

/// Undo one full step by applying the inverse permutations in reverse order.
inline void reverse_step(BressanState& st) {
  if (st.phase != BressanPhase::whole)
    throw std::logic_error("reverse_step: state is mid-step");
  if (st.level == st.base_level) throw std::logic_error("reverse_step: at initial level");
  const int prev = st.level - 1;
  if (st.lattice != detail::pow2i(prev + 2))
    throw std::logic_error("reverse_step: unexpected lattice resolution");
  const auto [s1, s2] = step_stages(prev, st.timeline, st.base_level);
  apply_stage(st, s2, /*inverse=*/true);
  apply_stage(st, s1, /*inverse=*/true);
  st.level = prev;
  detail::coarsen_pattern(st);
}

/// Render the exact pattern onto an n x n node grid (+1/-1 samples).
inline ScalarField render(const BressanState& st, int n) {
  if (n % st.lattice != 0)
    throw std::invalid_argument("render: resolution must be a multiple of the lattice side");
  const int stride = n / st.lattice;
  std::vector<double> samples(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      samples[static_cast<std::size_t>(i) * n + j] = st.cell(i / stride, j / stride);
  return make_field(n, std::move(samples));
}

namespace detail {

// BV seminorm of a stage's velocity field: sum over channel interfaces of
// |speed jump| x interface length (length 1 on the unit torus).
inline double stage_bv(const ShearStage& stage) {
  const int m = static_cast<int>(stage.shifts.size());
  const double v = stage.channel_width / stage.duration();
  double bv = 0.0;
  for (int c = 0; c < m; ++c) {
    const int prev = stage.shifts[(c - 1 + m) % m];
    bv += std::abs(stage.shifts[c] - prev) * v;
  }
  return bv;
}

inline double stage_kinetic(const ShearStage& stage) {
  const int m = static_cast<int>(stage.shifts.size());
  const double v = stage.channel_width / stage.duration();
  double acc = 0.0;
  for (int c = 0; c < m; ++c) {
    const double s = stage.shifts[c] * v;
    acc += s * s;  // channel area = 1/m
  }
  return std::sqrt(acc / m);
}

}  // namespace detail

/// Exact per-step budget snapshot (max over the step's two stages).
inline RegularityBudget bressan_budgets(int level, Timeline timeline, int base_level = 0) {
  const auto [s1, s2] = step_stages(level, timeline, base_level);
  RegularityBudget b;
  b.lip = kInf;
  b.bv = std::max(detail::stage_bv(s1), detail::stage_bv(s2));
  b.sup_norm = std::max(s1.max_speed(), s2.max_speed());
  b.kinetic = std::max(detail::stage_kinetic(s1), detail::stage_kinetic(s2));
  b.enstrophy = kInf;  // derivative is a measure, not L2
  b.w1p_norm = kInf;
  return b;
}

namespace detail {

// Which step is active at scheme time t, and the fraction through it.
inline int step_of_time(Timeline tl, double t) {
  if (tl == Timeline::unit) {
    if (t < 0.0) throw std::invalid_argument("bressan: time must be >= 0");
    return static_cast<int>(std::floor(t));
  }
  if (t < 0.0 || t >= 1.0)
    throw std::invalid_argument(
        "bressan (dyadic): time must lie in [0,1); the scheme completes at t = 1");
  return static_cast<int>(std::floor(-std::log2(1.0 - t)));
}

}  // namespace detail

/// Pointwise velocity of the scheme at time t (piecewise-constant shear of
/// the active stage, zero outside active channels).
inline Vec2 bressan_velocity(Timeline timeline, int base_level, double t, Vec2 p) {
  const int step = detail::step_of_time(timeline, t);
  const int level = base_level + step;
  const auto [s1, s2] = step_stages(level, timeline, base_level);
  const ShearStage& stage = (t < s1.t_end) ? s1 : s2;
  const int m = detail::pow2i(level + 2);
  const Vec2 q = wrap01(p);
  if (stage.axis == Axis::horizontal) {
    const int j = std::min(static_cast<int>(q.y * m), m - 1);
    return {stage.speed(j), 0.0};
  }
  const int i = std::min(static_cast<int>(q.x * m), m - 1);
  return {0.0, stage.speed(i)};
}

/// Interface lines (constant-coordinate values) of the active stage at time t;
/// used by divergence diagnostics to exclude discontinuity nodes.
inline std::pair<Axis, std::vector<double>> bressan_interfaces(Timeline timeline,
                                                               int base_level, double t) {
  const int step = detail::step_of_time(timeline, t);
  const int level = base_level + step;
  const auto [s1, s2] = step_stages(level, timeline, base_level);
  const ShearStage& stage = (t < s1.t_end) ? s1 : s2;
  const int m = detail::pow2i(level + 2);
  std::vector<double> lines;
  lines.reserve(m);
  for (int c = 0; c < m; ++c) lines.push_back(static_cast<double>(c) / m);
  return {stage.axis, lines};
}

/// VelocityModel wrapper for a scheme run on [0, horizon].
inline VelocityModel bressan_model(Timeline timeline, int base_level, double horizon) {
  VelocityModel m;
  m.kind = VelocityModel::Kind::bressan;
  m.eval = [timeline, base_level](double t, Vec2 p) {
    return bressan_velocity(timeline, base_level, t, p);
  };
  const int last_step =
      timeline == Timeline::unit
          ? std::max(0, static_cast<int>(std::ceil(horizon)) - 1)
          : detail::step_of_time(timeline, std::min(horizon, 1.0 - 1e-12));
  RegularityBudget b;
  b.lip = kInf;
  b.enstrophy = kInf;
  b.w1p_norm = kInf;
  for (int s = 0; s <= last_step; ++s) {
    const RegularityBudget bs = bressan_budgets(base_level + s, timeline, base_level);
    b.bv = std::max(b.bv, bs.bv);
    b.sup_norm = std::max(b.sup_norm, bs.sup_norm);
    b.kinetic = std::max(b.kinetic, bs.kinetic);
  }
  m.budget = b;
  m.has_interfaces = true;
  m.cfl_exempt = true;
  if (timeline == Timeline::unit) {
    // stage boundaries at integer multiples of 1/2
    m.next_breakpoint = [](double t) { return (std::floor(2.0 * t) + 1.0) / 2.0; };
    m.prev_breakpoint = [](double t) { return (std::ceil(2.0 * t) - 1.0) / 2.0; };
  } else {
    // boundaries t_s = 1 - 2^-s and midpoints, accumulating at t = 1
    m.next_breakpoint = [](double t) {
      if (t < 0.0) return 0.0;
      if (t >= 1.0) return kInf;
      const int s = detail::step_of_time(Timeline::dyadic, t);
      const auto [ta, tb] = detail::step_interval(Timeline::dyadic, s);
      const double mid = ta + 0.5 * (tb - ta);
      return t < mid ? mid : tb;
    };
    m.prev_breakpoint = [](double t) {
      if (t <= 0.0) return -kInf;
      const double tc = std::min(t, 1.0 - 1e-15);
      const int s = detail::step_of_time(Timeline::dyadic, tc);
      const auto [ta, tb] = detail::step_interval(Timeline::dyadic, s);
      const double mid = ta + 0.5 * (tb - ta);
      if (t > mid) return mid;
      if (t > ta) return ta;
      // exactly at a step start: previous boundary is the prior step's midpoint
      if (s == 0) return -kInf;
      const auto [pa, pb] = detail::step_interval(Timeline::dyadic, s - 1);
      return pa + 0.5 * (pb - pa);
    };
  }
  m.description = timeline == Timeline::unit ? "bressan_unit" : "bressan_dyadic";
  return m;
}

namespace detail {

// Exact continuum mix norm of the dyadic checkerboard: the level-0 pattern is
// a tensor square wave whose Fourier coefficients have modulus 2/(pi |k|) on
// odd modes, and each refinement halves the norm exactly. The inner sum over
// one axis has the closed form
//   sum_{q odd >= 1} 1/(q^2 (m^2 + q^2)) = (1/m^2) (pi^2/8 - pi tanh(pi m/2)/(4 m)).
inline double checkerboard_level0_mixf() {
  static const double value = [] {
    double acc = 0.0;  // ascending magnitudes: sum from the tail up
    for (long long m = 400001; m >= 1; m -= 2) {
      const double md = static_cast<double>(m);
      const double inner =
          (kPi * kPi / 8.0 - kPi * std::tanh(kPi * md / 2.0) / (4.0 * md)) / (md * md);
      acc += inner / (md * md);
    }
    return std::sqrt(64.0 / (kPi * kPi * kPi * kPi) * acc);
  }();
  return value;
}

}  // namespace detail

/// Exact (continuum) mix norm of the level-k checkerboard.
inline double checkerboard_mixf_exact(int level) {
  return detail::checkerboard_level0_mixf() * std::pow(2.0, -level);
}

struct BressanDecayRow {
  int step = 0;
  int level = 0;
  double t = 0.0;
  double mixf_exact = 0.0;  // continuum mix norm of the configuration
  double mixf_grid = 0.0;   // DFT mix norm of the rendered samples
  MixScale mixg;
  double bv = 0.0;      // budget of the step that produced this row
  double u_linf = 0.0;
  double kinetic = 0.0;
};

/// Advance n full steps, emitting per-step mixing diagnostics of the rendered
/// configurations. The rendered pattern after each step is checked against
/// the exact parity formula; any deviation is a hard error.
inline std::pair<BressanState, std::vector<BressanDecayRow>> evolve_exact(
    BressanState state, int steps, int render_n, const MixParams& params) {
  if (render_n % detail::pow2i(state.level + steps + 2) != 0)
    throw std::invalid_argument(
        "evolve_exact: render resolution cannot represent the final level");
  std::vector<BressanDecayRow> rows;
  auto emit = [&](int step_index, const RegularityBudget* step_budget) {
    BressanDecayRow row;
    row.step = step_index;
    row.level = state.level;
    row.t = state.time();
    row.mixf_exact = checkerboard_mixf_exact(state.level);
    const ScalarField f = render(state, render_n);
    row.mixf_grid = mix_f(f);
    row.mixg = mix_g(f, params);
    if (step_budget != nullptr) {
      row.bv = step_budget->bv;
      row.u_linf = step_budget->sup_norm;
      row.kinetic = step_budget->kinetic;
    }
    rows.push_back(row);
  };
  emit(0, nullptr);
  for (int s = 0; s < steps; ++s) {
    const RegularityBudget b = bressan_budgets(state.level, state.timeline, state.base_level);
    advance_step(state);
    // the composed permutation must land exactly on the refined checkerboard
    for (int i = 0; i < state.lattice; ++i)
      for (int j = 0; j < state.lattice; ++j)
        if (state.cell(i, j) != (((i + j) & 1) ? -1 : 1))
          throw std::runtime_error(
              "evolve_exact: composed stages broke the checkerboard contract");
    emit(s + 1, &b);
  }
  return {std::move(state), std::move(rows)};
}

}  // namespace mixlab
