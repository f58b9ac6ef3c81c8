#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mixlab/geometry.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/velocity.hpp"

namespace mixlab {

/// Default radii for the flow estimates: dyadic grid multiples up to 1/2.
/// An inner approximation of sup_{r>0}; callers may pass denser sets.
inline std::vector<double> dyadic_radii(int n) {
  std::vector<double> radii;
  for (int j = 1; j <= n / 2; j *= 2) radii.push_back(static_cast<double>(j) / n);
  if (radii.empty() || radii.back() != 0.5) radii.push_back(0.5);
  return radii;
}

namespace detail {

// Integer offsets (wrapped) of the discrete ball of radius r, as flattened
// index deltas plus the coordinate deltas for distance bookkeeping.
struct BallOffsets {
  double radius = 0.0;
  std::vector<int> di, dj;
  std::size_t size() const { return di.size(); }
};

inline BallOffsets ball_offsets(int n, double r) {
  const long long r2 = ball_radius_sq_cells(n, r);
  const int reach = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r2)))) ;
  BallOffsets b;
  b.radius = r;
  for (int a = -reach; a <= reach; ++a)
    for (int c = -reach; c <= reach; ++c)
      if (static_cast<long long>(a) * a + static_cast<long long>(c) * c <= r2) {
        b.di.push_back(a);
        b.dj.push_back(c);
      }
  return b;
}

}  // namespace detail

struct MaximalField {
  int n = 0;
  std::vector<double> values;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
};

/// Discrete maximal function: max over the radii set (plus the single-node
/// radius, so Mf >= |f| pointwise) of ball averages of |f|.
inline MaximalField maximal_function(const ScalarField& f,
                                     const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("maximal_function: empty radii set");
  MaximalField mf;
  mf.n = f.n;
  mf.values.resize(f.samples.size());
  for (std::size_t i = 0; i < mf.values.size(); ++i)
    mf.values[i] = std::abs(f.samples[i]);  // single-node radius

  std::vector<double> absf(f.samples.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.samples[i]);
  const ScalarField absfield = make_field(f.n, std::move(absf));
  const std::size_t nn = absfield.samples.size();
  std::vector<std::complex<double>> centered(nn), fhat(nn);
  for (std::size_t i = 0; i < nn; ++i) centered[i] = absfield.samples[i] - absfield.mean;
  detail::fft_for(f.n).forward(centered.data(), fhat.data());
  const double lo = *std::min_element(absfield.samples.begin(), absfield.samples.end());
  const double hi = *std::max_element(absfield.samples.begin(), absfield.samples.end());
  for (double r : radii) {
    const auto kernel = detail::disk_kernel_fft(f.n, r);
    const auto avg =
        detail::disk_average_from_spectrum(f.n, fhat, absfield.mean, lo, hi, kernel);
    for (std::size_t i = 0; i < nn; ++i) mf.values[i] = std::max(mf.values[i], avg[i]);
  }
  return mf;
}

struct WeakTypeReport {
  std::vector<double> levels;
  std::vector<double> tail_measure;  // |{Mf > lambda}| per level
  double weak_value = 0.0;           // sup_lambda lambda |{Mf > lambda}|
  double l1 = 0.0;
  double ratio = 0.0;                // weak_value / ||f||_1
};

/// Weak-type probe of the maximal operator at the given thresholds.
inline WeakTypeReport weak_type_probe(const ScalarField& f,
                                      const std::vector<double>& levels,
                                      const std::vector<double>& radii) {
  const MaximalField mf = maximal_function(f, radii);
  WeakTypeReport rep;
  rep.levels = levels;
  rep.l1 = lp_norm(f, 1.0);
  const double cell = 1.0 / (static_cast<double>(f.n) * f.n);
  for (double lam : levels) {
    std::size_t count = 0;
    for (double v : mf.values)
      if (v > lam) ++count;
    const double measure = count * cell;
    rep.tail_measure.push_back(measure);
    rep.weak_value = std::max(rep.weak_value, lam * measure);
  }
  rep.ratio = rep.l1 > 0.0 ? rep.weak_value / rep.l1 : 0.0;
  return rep;
}

struct IncrementsReport {
  double max_ratio = 0.0;
  int degenerate = 0;  // pairs with zero maximal sum but differing values
  int pairs = 0;
};

/// Empirical difference-quotient constant: the max over random node pairs of
/// |f(x)-f(y)| / (dist(x,y) (MDf(x) + MDf(y))). The gradient field is the
/// caller's (spectral) |grad f|.
inline IncrementsReport increments_check(const ScalarField& f, const ScalarField& grad,
                                         const std::vector<double>& radii, int pairs,
                                         std::uint64_t seed = 777) {
  if (f.n != grad.n) throw std::invalid_argument("increments_check: resolution mismatch");
  const MaximalField mdf = maximal_function(grad, radii);
  IncrementsReport rep;
  rep.pairs = pairs;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, f.n - 1);
  for (int s = 0; s < pairs; ++s) {
    const int i1 = pick(rng), j1 = pick(rng);
    int i2 = pick(rng), j2 = pick(rng);
    if (i1 == i2 && j1 == j2) i2 = (i2 + 1) % f.n;
    const double num = std::abs(f.at(i1, j1) - f.at(i2, j2));
    const double dist = torus_dist(Vec2{static_cast<double>(i1) / f.n, static_cast<double>(j1) / f.n},
                                   Vec2{static_cast<double>(i2) / f.n, static_cast<double>(j2) / f.n});
    const double denom = dist * (mdf.at(i1, j1) + mdf.at(i2, j2));
    if (denom == 0.0) {
      if (num > 0.0) ++rep.degenerate;
      continue;
    }
    rep.max_ratio = std::max(rep.max_ratio, num / denom);
  }
  return rep;
}

struct EstimateParams {
  double p = 2.0;
  std::vector<double> radii;
  double eta = 0.1;
};

struct GResult {
  double p = 2.0;
  double horizon = 0.0;
  int n = 0;
  std::vector<double> radii;
  std::vector<double> times;
  std::vector<double> g;  // per-node integrand, max over times and radii
  double value = 0.0;     // discrete L^p norm of g
};

/// Log-regularity functional of a flow family: per node,
///   g(x) = max_{t, r} avg_{B(x,r)} log(1 + dist(Phi_t(x), Phi_t(y)) / r),
/// and value = ||g||_{L^p}. Torus distance throughout.
inline GResult g_functional(const std::vector<FlowMap>& flows,
                            const std::vector<double>& times, double p,
                            const std::vector<double>& radii) {
  if (flows.empty() || flows.size() != times.size())
    throw std::invalid_argument("g_functional: flows and times must align");
  if (p <= 1.0) throw std::invalid_argument("g_functional: p must exceed 1");
  const int n = flows.front().n;
  for (const auto& fm : flows)
    if (fm.n != n) throw std::invalid_argument("g_functional: flows share one resolution");
  GResult res;
  res.p = p;
  res.n = n;
  res.radii = radii;
  res.times = times;
  res.horizon = *std::max_element(times.begin(), times.end());
  res.g.assign(static_cast<std::size_t>(n) * n, 0.0);

  std::vector<Vec2> wrapped(static_cast<std::size_t>(n) * n);
  for (const auto& fm : flows) {
    for (std::size_t i = 0; i < wrapped.size(); ++i) wrapped[i] = wrap01(fm.positions[i]);
    for (double r : radii) {
      const auto ball = detail::ball_offsets(n, r);
      const double inv_count = 1.0 / static_cast<double>(ball.size());
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Vec2 px = wrapped[static_cast<std::size_t>(i) * n + j];
          double acc = 0.0;
          for (std::size_t o = 0; o < ball.size(); ++o) {
            const int ii = detail::wrap_index(n, i + ball.di[o]);
            const int jj = detail::wrap_index(n, j + ball.dj[o]);
            const Vec2 py = wrapped[static_cast<std::size_t>(ii) * n + jj];
            acc += std::log1p(torus_dist(px, py) / r);
          }
          double& gx = res.g[static_cast<std::size_t>(i) * n + j];
          gx = std::max(gx, acc * inv_count);
        }
      }
    }
  }
  std::vector<double> powed(res.g.size());
  for (std::size_t i = 0; i < powed.size(); ++i) powed[i] = std::pow(res.g[i], p);
  res.value = std::pow(stable_sum(std::move(powed)) / (static_cast<double>(n) * n), 1.0 / p);
  return res;
}

struct GQuantReport {
  double g_value = 0.0;
  double du_l1lp = 0.0;  // ||Du||_{L1([0,T]; L^p)} from the declared budget
  double ratio = 0.0;    // g_value / (1 + du_l1lp)
};

/// Ratio of the functional to 1 + ||Du||: its stability under horizon
/// doubling is the reported diagnostic (no universal constant is asserted).
inline GQuantReport gquant_report(const GResult& g, const RegularityBudget& budget) {
  if (!std::isfinite(budget.w1p_norm))
    throw std::invalid_argument("gquant_report: model lacks a finite W^{1,p} budget");
  GQuantReport rep;
  rep.g_value = g.value;
  rep.du_l1lp = budget.w1p_norm * g.horizon;
  rep.ratio = g.value / (1.0 + rep.du_l1lp);
  return rep;
}

/// Discrete ball-overlap constant: max over radii of |B(x,r)| divided by the
/// minimal lens cardinality |B(x,r) cap B(x',r)| over center offsets that
/// select radius r (previous radius < dist <= r).
inline double ball_overlap_constant(int n, const std::vector<double>& radii) {
  double c2 = 0.0;
  double prev = 0.0;
  for (double r : radii) {
    const auto ball = detail::ball_offsets(n, r);
    const long long r2 = detail::ball_radius_sq_cells(n, r);
    const long long p2 = prev > 0.0 ? detail::ball_radius_sq_cells(n, prev) : 0;
    const int reach = static_cast<int>(std::ceil(r * n)) + 1;
    long long min_lens = static_cast<long long>(ball.size());
    for (int a = 0; a <= reach; ++a) {
      for (int c = 0; c <= reach; ++c) {
        const long long d2 = static_cast<long long>(a) * a + static_cast<long long>(c) * c;
        if (d2 == 0 || d2 <= p2 || d2 > r2) continue;  // offsets that pick this radius
        long long lens = 0;
        for (std::size_t o = 0; o < ball.size(); ++o) {
          const long long ea = ball.di[o] - a;
          const long long ec = ball.dj[o] - c;
          if (ea * ea + ec * ec <= r2) ++lens;
        }
        min_lens = std::min(min_lens, lens);
      }
    }
    if (min_lens > 0)
      c2 = std::max(c2, static_cast<double>(ball.size()) / static_cast<double>(min_lens));
    prev = r;
  }
  return c2;
}

struct LusinResult {
  double eta = 0.0;
  double lambda = 0.0;        // empirical (1-eta)-quantile of g
  double c2 = 0.0;            // measured ball-overlap constant
  double excluded_fraction = 0.0;
  double lip_estimate = 0.0;  // max distance ratio over pairs in K
  double bound = 0.0;         // exp(2 c2 lambda)
  std::vector<std::uint8_t> mask;  // 1 = node belongs to K
  long long checked_pairs = 0;
  long long violations = 0;
  bool pass = false;
};

/// Chebyshev extraction of a large set K on which the flow family is
/// Lipschitz with constant exp(2 c2 lambda_eta). Pair checks are exhaustive
/// when pair_budget = 0, sampled otherwise.
inline LusinResult lusin_extract(const GResult& g, const std::vector<FlowMap>& flows,
                                 double eta, long long pair_budget = 0,
                                 std::uint64_t seed = 4242) {
  if (eta <= 0.0 || eta >= 1.0)
    throw std::invalid_argument("lusin_extract: eta must lie in (0,1)");
  const int n = g.n;
  const std::size_t nn = g.g.size();
  std::vector<double> sorted = g.g;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil((1.0 - eta) * static_cast<double>(nn)));
  if (keep == 0) throw std::invalid_argument("lusin_extract: eta leaves K empty");
  LusinResult res;
  res.eta = eta;
  res.lambda = sorted[keep - 1];
  res.c2 = ball_overlap_constant(n, g.radii);
  res.bound = std::exp(2.0 * res.c2 * res.lambda);
  res.mask.assign(nn, 0);
  std::vector<int> members;
  for (std::size_t i = 0; i < nn; ++i)
    if (g.g[i] <= res.lambda) res.mask[i] = 1;
  for (std::size_t i = 0; i < nn; ++i)
    if (res.mask[i]) members.push_back(static_cast<int>(i));
  res.excluded_fraction =
      1.0 - static_cast<double>(members.size()) / static_cast<double>(nn);

  auto node = [n](int flat) {
    return Vec2{static_cast<double>(flat / n) / n, static_cast<double>(flat % n) / n};
  };
  auto check_pair = [&](int a, int b) {
    const double d0 = torus_dist(node(a), node(b));
    if (d0 == 0.0) return;
    double worst = 0.0;
    for (const auto& fm : flows) {
      const double d1 = torus_dist(wrap01(fm.positions[a]), wrap01(fm.positions[b]));
      worst = std::max(worst, d1 / d0);
    }
    res.lip_estimate = std::max(res.lip_estimate, worst);
    if (worst > res.bound * (1.0 + 1e-12)) ++res.violations;
    ++res.checked_pairs;
  };

  const long long total =
      static_cast<long long>(members.size()) * (static_cast<long long>(members.size()) - 1) / 2;
  if (pair_budget <= 0 || total <= pair_budget) {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        check_pair(members[a], members[b]);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    for (long long s = 0; s < pair_budget; ++s) {
      const std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      if (a == b) b = (b + 1) % members.size();
      check_pair(members[a], members[b]);
    }
  }
  res.pass = res.violations == 0;
  return res;
}

struct PipelineReport {
  double kappa_prime = 0.0;
  double eta = 0.0;
  double c2 = 0.0;
  std::vector<double> times;
  std::vector<double> mixg;
  std::vector<double> lambda;  // quantile of g over flows up to each time
  std::vector<double> bound;   // (1/6) exp(-2 c2 lambda(t))
  std::vector<double> margin;
  bool pass = false;
};

/// Half/half initial datum: +1 on [0,1/2) x [0,1), -1 elsewhere.
inline ScalarField half_half(int n) {
  std::vector<double> samples(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      samples[static_cast<std::size_t>(i) * n + j] = i < n / 2 ? 1.0 : -1.0;
  return make_field(n, std::move(samples));
}

/// Two-point geometric lower bound on the mixing scale, run end to end:
/// advect the half/half datum, measure mix_g, and compare against
/// (1/6) exp(-2 c2 lambda_eta(t)) where lambda_eta(t) is the measured
/// Chebyshev threshold of the backward-flow log-regularity integrand.
/// The default eta keeps the covering budget 25 eta / kappa + eta below 1/6.
inline PipelineReport geometric_bound_pipeline(const VelocityModel& model, double horizon,
                                               double kappa_prime, double eta, int n_adv,
                                               int n_est, double dt, double snap_every,
                                               double est_p = 2.0) {
  const ScalarField rho0 = half_half(n_adv);
  const MixParams params = [&] {
    MixParams p = MixParams::defaults(n_adv);
    p.kappa_prime = kappa_prime;
    return p;
  }();
  const std::vector<double> radii = dyadic_radii(n_est);

  PipelineReport rep;
  rep.kappa_prime = kappa_prime;
  rep.eta = eta;
  rep.c2 = ball_overlap_constant(n_est, radii);

  std::vector<double> gmax(static_cast<std::size_t>(n_est) * n_est, 0.0);
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil((1.0 - eta) * static_cast<double>(gmax.size())));
  rep.pass = true;
  for (double t = 0.0; t <= horizon + 1e-9; t += snap_every) {
    ScalarField rho = advect(rho0, model, t, dt);
    // the zero-average gauge propagates exactly in the continuum; enforce it
    // after transport once the drift passes the interpolation budget
    if (std::abs(rho.mean - rho0.mean) > 1e-6 * std::max(1.0, linf_norm(rho0)))
      throw std::runtime_error("pipeline: mean drift exceeds the 1e-6 budget");
    rho = make_field(rho.n, std::move(rho.samples), /*enforce_zero_mean=*/true);
    const MixScale mg = mix_g(rho, params);
    rep.times.push_back(t);
    rep.mixg.push_back(mg.epsilon);
    if (t > 0.0) {
      const FlowMap back = flow_map(model, t, 0.0, dt, n_est);
      const GResult g = g_functional({back}, {t}, est_p, radii);
      for (std::size_t i = 0; i < gmax.size(); ++i) gmax[i] = std::max(gmax[i], g.g[i]);
    }
    std::vector<double> sorted = gmax;
    std::sort(sorted.begin(), sorted.end());
    const double lambda = sorted[keep - 1];
    const double bound = (1.0 / 6.0) * std::exp(-2.0 * rep.c2 * lambda);
    rep.lambda.push_back(lambda);
    rep.bound.push_back(bound);
    rep.margin.push_back(mg.epsilon - bound);
    if (mg.epsilon <= 0.0 || mg.epsilon < bound) rep.pass = false;
  }
  return rep;
}

}  // namespace mixlab
