#include "ggln/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ggln {

namespace {

struct Unpacked {
  std::vector<double> precisions;
  std::vector<double> means;
};

Unpacked unpack(std::span<const Univariate> experts) {
  Unpacked u;
  for (const auto& e : experts) {
    const auto v = make_univariate(e.mean, e.variance);
    u.precisions.push_back(1.0 / v.variance);
    u.means.push_back(v.mean);
  }
  return u;
}

bool has_mean_rows(const ConstraintSet& cs) { return cs.mu_min.has_value() || cs.mu_max.has_value(); }

void check_sizes(std::size_t w, std::size_t prec, std::span<const double> means, const ConstraintSet& cs) {
  if (w != prec) throw ValidationError("weight and expert counts differ");
  if (has_mean_rows(cs) && means.size() != w) throw ValidationError("mean bounds need expert means");
}

// Moves the box-feasible w along +/- a until a'w hits `target`, clipping each
// coordinate at the box face it reaches first. Every coordinate has exactly one
// breakpoint, so walking the sorted breakpoints solves the piecewise-linear
// equation exactly.
void shift_to_bound(std::span<double> w, std::span<const double> a, double target, double sign, double w_max) {
  const std::size_t m = w.size();
  double current = 0.0;
  std::vector<std::pair<double, std::size_t>> breaks;
  breaks.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    current += a[i] * w[i];
    if (a[i] <= 0.0) continue;
    const double room = sign < 0.0 ? w[i] : w_max - w[i];
    if (room <= 0.0) continue;
    breaks.emplace_back(room / a[i], i);
  }
  std::sort(breaks.begin(), breaks.end());
  // Slopes as suffix sums: subtracting a_i^2 from a running total cancels badly
  // when the precisions are large.
  std::vector<double> slope(breaks.size() + 1, 0.0);
  for (std::size_t j = breaks.size(); j-- > 0;) {
    const double ai = a[breaks[j].second];
    slope[j] = slope[j + 1] + ai * ai;
  }
  // f(lambda) = current + sign * slope[j] * (lambda - lambda0) on segment j.
  double lambda0 = 0.0;
  double lambda = 0.0;
  bool solved = false;
  for (std::size_t j = 0; j < breaks.size(); ++j) {
    const double bp = breaks[j].first;
    const double f_at_bp = current + sign * slope[j] * (bp - lambda0);
    if ((sign < 0.0 && f_at_bp <= target) || (sign > 0.0 && f_at_bp >= target)) {
      lambda = lambda0 + (target - current) / (sign * slope[j]);
      solved = true;
      break;
    }
    current = f_at_bp;
    lambda0 = bp;
  }
  if (!solved) {
    if (sign > 0.0) throw InfeasibleWeights("precision lower bound unreachable inside the weight box");
    lambda = lambda0;
  }
  double tau = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = std::clamp(w[i] + sign * lambda * a[i], 0.0, w_max);
    tau += a[i] * w[i];
  }
  // Remove the last rounding overshoot of an upper bound by scaling down, which
  // stays inside the box.
  if (sign < 0.0 && tau > target) {
    const double r = target / tau;
    for (auto& v : w) v *= r;
  }
}

}  // namespace

void ConstraintSet::validate() const {
  if (!(w_max >= 1.0) || !std::isfinite(w_max)) throw ValidationError("w_max must be >= 1");
  if (w_min != 0.0) throw ValidationError("w_min must be 0");
  if (!(sigma2_min > 0.0) || !(sigma2_min < sigma2_max) || !std::isfinite(sigma2_max)) {
    throw ValidationError("need 0 < sigma2_min < sigma2_max < inf");
  }
  if (!(xi > 0.0)) throw ValidationError("barrier constant xi must be positive");
  if (!(barrier_margin >= 0.0)) throw ValidationError("barrier margin must be non-negative");
  if (mu_min && mu_max && !(*mu_min < *mu_max)) throw ValidationError("need mu_min < mu_max");
}

void accumulate_barrier_gradient(std::span<const double> w, std::span<const double> precisions,
                                 std::span<const double> means, const ConstraintSet& cs, double scale,
                                 std::span<double> grad) {
  const std::size_t m = w.size();
  const double lo = -cs.barrier_margin;
  const double hi = cs.w_max + cs.barrier_margin;
  double tau = 0.0;
  double lo_gap = std::numeric_limits<double>::infinity();
  double hi_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double dl = w[i] - lo;
    const double du = hi - w[i];
    lo_gap = std::min(lo_gap, dl);
    hi_gap = std::min(hi_gap, du);
    grad[i] += scale * (1.0 / du - 1.0 / dl);
    tau += w[i] * precisions[i];
  }
  if (!(lo_gap > 0.0) || !(hi_gap > 0.0)) throw InfeasibleWeights("weight outside the barrier domain");
  const double tau_hi = (1.0 / cs.sigma2_min) * (1.0 + cs.barrier_margin);
  const double tau_lo = (1.0 / cs.sigma2_max) * (1.0 - cs.barrier_margin);
  const double su = tau_hi - tau;
  const double sl = tau - tau_lo;
  if (!(su > 0.0) || !(sl > 0.0)) throw InfeasibleWeights("product precision outside the barrier domain");
  const double cp = scale * (1.0 / su - 1.0 / sl);
  for (std::size_t i = 0; i < m; ++i) grad[i] += cp * precisions[i];
  if (!has_mean_rows(cs)) return;
  // mean rows: sum_i w_i tau_i (mu_i - mu_max) <= 0 and sum_i w_i tau_i (mu_min - mu_i) <= 0
  auto mean_row = [&](double bound, double sign) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w[i] * precisions[i] * sign * (means[i] - bound);
    const double slack = cs.barrier_margin - s;
    if (!(slack > 0.0)) throw InfeasibleWeights("product mean outside the barrier domain");
    for (std::size_t i = 0; i < m; ++i) grad[i] += scale * precisions[i] * sign * (means[i] - bound) / slack;
  };
  if (cs.mu_max) mean_row(*cs.mu_max, 1.0);
  if (cs.mu_min) mean_row(*cs.mu_min, -1.0);
}

BarrierValue barrier_penalty(std::span<const double> w, std::span<const double> precisions,
                             std::span<const double> means, const ConstraintSet& cs) {
  check_sizes(w.size(), precisions.size(), means, cs);
  validate_weights(w);
  BarrierValue out;
  out.gradient.assign(w.size(), 0.0);
  accumulate_barrier_gradient(w, precisions, means, cs, 1.0, out.gradient);
  const double lo = -cs.barrier_margin;
  const double hi = cs.w_max + cs.barrier_margin;
  double tau = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.value -= std::log(w[i] - lo) + std::log(hi - w[i]);
    tau += w[i] * precisions[i];
  }
  out.value -= std::log((1.0 / cs.sigma2_min) * (1.0 + cs.barrier_margin) - tau);
  out.value -= std::log(tau - (1.0 / cs.sigma2_max) * (1.0 - cs.barrier_margin));
  auto mean_row = [&](double bound, double sign) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * precisions[i] * sign * (means[i] - bound);
    out.value -= std::log(cs.barrier_margin - s);
  };
  if (cs.mu_max) mean_row(*cs.mu_max, 1.0);
  if (cs.mu_min) mean_row(*cs.mu_min, -1.0);
  return out;
}

BarrierValue barrier_penalty(std::span<const double> w, std::span<const Univariate> experts,
                             const ConstraintSet& cs) {
  const auto u = unpack(experts);
  return barrier_penalty(w, u.precisions, u.means, cs);
}

void backstop_project_inplace(std::span<double> w, std::span<const double> precisions,
                              std::span<const double> means, const ConstraintSet& cs) {
  check_sizes(w.size(), precisions.size(), means, cs);
  const std::size_t m = w.size();
  bool nan = false;
  double tau = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    nan |= std::isnan(w[i]);
    w[i] = std::clamp(w[i], 0.0, cs.w_max);
    tau += w[i] * precisions[i];
  }
  if (nan) throw InfeasibleWeights("weight is NaN");
  if (has_mean_rows(cs)) {
    // One linear projection per violated mean row, then a re-clip.
    std::vector<double> a(m);
    auto project_row = [&](double bound, double sign) {
      double s = 0.0;
      double n2 = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        a[i] = precisions[i] * sign * (means[i] - bound);
        s += a[i] * w[i];
        n2 += a[i] * a[i];
      }
      if (s <= 0.0 || n2 == 0.0) return;
      for (std::size_t i = 0; i < m; ++i) w[i] = std::clamp(w[i] - a[i] * s / n2, 0.0, cs.w_max);
    };
    if (cs.mu_max) project_row(*cs.mu_max, 1.0);
    if (cs.mu_min) project_row(*cs.mu_min, -1.0);
  }
  if (has_mean_rows(cs)) {
    tau = 0.0;
    for (std::size_t i = 0; i < m; ++i) tau += w[i] * precisions[i];
  }
  const double tau_hi = 1.0 / cs.sigma2_min;
  const double tau_lo = 1.0 / cs.sigma2_max;
  if (tau > tau_hi) {
    shift_to_bound(w, precisions, tau_hi, -1.0, cs.w_max);
  } else if (tau < tau_lo) {
    shift_to_bound(w, precisions, tau_lo, 1.0, cs.w_max);
  }
  if (tau > 0.0 && tau >= tau_lo && tau <= tau_hi) return;
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
    throw InfeasibleWeights("backstop projection removed every weight");
  }
}

bool is_feasible(std::span<const double> w, std::span<const double> precisions, std::span<const double> means,
                 const ConstraintSet& cs) {
  double tau = 0.0;
  bool box = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    box &= w[i] >= 0.0 && w[i] <= cs.w_max;
    tau += w[i] * precisions[i];
  }
  if (!box || !(tau > 0.0) || tau > 1.0 / cs.sigma2_min || tau < 1.0 / cs.sigma2_max) return false;
  if (!has_mean_rows(cs)) return true;
  double mu = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mu += w[i] * precisions[i] * means[i];
  mu /= tau;
  return !(cs.mu_max && mu > *cs.mu_max) && !(cs.mu_min && mu < *cs.mu_min);
}

std::vector<double> backstop_project(std::span<const double> w, std::span<const Univariate> experts,
                                     const ConstraintSet& cs) {
  const auto u = unpack(experts);
  std::vector<double> out(w.begin(), w.end());
  backstop_project_inplace(out, u.precisions, u.means, cs);
  return out;
}

}  // namespace ggln
