#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixlab/velocity.hpp"

namespace mixlab {

enum class BoundKind {
  lipschitz_exponential,
  kinetic_linear,
  enstrophy_linear_suboptimal,
  interpolated_exponential,
};

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::lipschitz_exponential: return "lipschitz_exponential";
    case BoundKind::kinetic_linear: return "kinetic_linear";
    case BoundKind::enstrophy_linear_suboptimal: return "enstrophy_linear_suboptimal";
    case BoundKind::interpolated_exponential: return "interpolated_exponential";
  }
  return "unknown";
}

inline BoundKind bound_kind_from_name(const std::string& s) {
  if (s == "lipschitz_exponential") return BoundKind::lipschitz_exponential;
  if (s == "kinetic_linear") return BoundKind::kinetic_linear;
  if (s == "enstrophy_linear_suboptimal") return BoundKind::enstrophy_linear_suboptimal;
  if (s == "interpolated_exponential") return BoundKind::interpolated_exponential;
  throw std::invalid_argument("unknown bound kind: " + s);
}

/// A lower-bound curve evaluated from declared budgets and initial norms;
/// observed data never enters the bound side.
struct BoundCurve {
  BoundKind kind = BoundKind::lipschitz_exponential;
  std::vector<double> times;
  std::vector<double> values;
  bool suboptimal = false;
  double zero_crossing = kInf;  // first time a clamped linear bound reaches 0
};

/// mix0 * e^{-L t}.
inline BoundCurve lipschitz_exponential(double mix0, double lip,
                                        const std::vector<double>& times) {
  if (lip < 0.0) throw std::invalid_argument("lipschitz_exponential: L must be >= 0");
  BoundCurve c;
  c.kind = BoundKind::lipschitz_exponential;
  c.times = times;
  for (double t : times) c.values.push_back(mix0 * std::exp(-lip * t));
  return c;
}

/// max(0, mix0 - K ||rho0||_inf t); the zero crossing is the first time at
/// which this budget stops excluding perfect mixing.
inline BoundCurve kinetic_linear(double mix0, double kinetic, double rho_sup,
                                 const std::vector<double>& times) {
  if (kinetic < 0.0 || rho_sup < 0.0)
    throw std::invalid_argument("kinetic_linear: budgets must be >= 0");
  BoundCurve c;
  c.kind = BoundKind::kinetic_linear;
  c.times = times;
  const double slope = kinetic * rho_sup;
  for (double t : times) c.values.push_back(std::max(0.0, mix0 - slope * t));
  c.zero_crossing = slope > 0.0 ? mix0 / slope : kInf;
  return c;
}

/// (||rho0||_L2^2 / ||rho0||_H1) e^{-L t}; at t = 0 this never exceeds the
/// mix norm (spectral Cauchy-Schwarz), with equality for single-mode data.
inline BoundCurve interpolated_exponential(double rho_l2, double rho_h1, double lip,
                                           const std::vector<double>& times) {
  if (rho_h1 <= 0.0)
    throw std::invalid_argument("interpolated_exponential: H1 norm must be positive");
  BoundCurve c;
  c.kind = BoundKind::interpolated_exponential;
  c.times = times;
  const double amp = rho_l2 * rho_l2 / rho_h1;
  for (double t : times) c.values.push_back(amp * std::exp(-lip * t));
  return c;
}

/// max(0, mix0 - E ||rho0||_L2 t), flagged suboptimal: informational only,
/// the implied constant is taken as 1.
inline BoundCurve enstrophy_report(double mix0, double enstrophy, double rho_l2,
                                   const std::vector<double>& times) {
  if (enstrophy < 0.0 || rho_l2 < 0.0)
    throw std::invalid_argument("enstrophy_report: budgets must be >= 0");
  BoundCurve c;
  c.kind = BoundKind::enstrophy_linear_suboptimal;
  c.times = times;
  const double slope = enstrophy * rho_l2;
  for (double t : times) c.values.push_back(std::max(0.0, mix0 - slope * t));
  c.zero_crossing = slope > 0.0 ? mix0 / slope : kInf;
  c.suboptimal = true;
  return c;
}

struct ComplianceReport {
  std::vector<double> margins;  // observed - bound per snapshot
  double tolerance = 0.0;       // absolute slack: tol * observed(0)
  bool pass = false;
};

/// Per-time margins of an observed series against a bound curve. The pass
/// threshold folds the advection-error budget: margins may dip to
/// -tolerance * observed(0).
inline ComplianceReport compliance(const std::vector<double>& times,
                                   const std::vector<double>& observed,
                                   const BoundCurve& curve, double tolerance) {
  if (times.size() != observed.size() || times.size() != curve.times.size())
    throw std::invalid_argument("compliance: series and curve sizes differ");
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - curve.times[i]) > 1e-12)
      throw std::invalid_argument("compliance: time grids do not match");
  ComplianceReport rep;
  rep.tolerance = tolerance * (observed.empty() ? 0.0 : observed.front());
  rep.pass = true;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double margin = observed[i] - curve.values[i];
    rep.margins.push_back(margin);
    if (margin < -rep.tolerance) rep.pass = false;
  }
  return rep;
}

}  // namespace mixlab
