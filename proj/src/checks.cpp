#include "ggln/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ggln/base_models.hpp"
#include "ggln/data.hpp"
#include "ggln/network.hpp"

namespace ggln::checks {
namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point start = Clock::now();
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start).count(); }
};

CheckResult finish(std::string name, bool pass, const std::ostringstream& detail, const Timer& t) {
  return {std::move(name), pass, detail.str(), t.seconds()};
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<Univariate> random_univariates(Rng& rng, std::size_t m) {
  std::vector<Univariate> e(m);
  for (auto& g : e) g = {2.0 * normal(rng), uniform(rng, 0.25, 4.0)};
  return e;
}

std::vector<double> random_weights(Rng& rng, std::size_t m, double lo, double hi) {
  std::vector<double> w(m);
  for (auto& v : w) v = uniform(rng, lo, hi);
  return w;
}

Matrix random_spd(Rng& rng, std::size_t d) {
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = normal(rng);
  return a * a.transpose() / static_cast<double>(d) + 0.5 * Matrix::Identity(d, d);
}

// Dense solve by Gaussian elimination with partial pivoting.
std::vector<double> eliminate(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

double normal_log_pdf(double y, double mean, double var) {
  const double r = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

}  // namespace

CheckResult closure_univariate(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  constexpr std::size_t points = 1000000;
  constexpr double lo = -30.0;
  constexpr double hi = 30.0;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> logf(points);
  double worst = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 6);
    const auto e = random_univariates(rng, m);
    const auto w = random_weights(rng, m, 0.1, 2.0);
    const Univariate p = pog_univariate(e, w);

    std::vector<double> c(m);
    for (std::size_t i = 0; i < m; ++i) c[i] = normal_log_pdf(e[i].mean, e[i].mean, e[i].variance);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points; ++k) {
      const double y = lo + h * static_cast<double>(k);
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = y - e[i].mean;
        s += w[i] * (c[i] - 0.5 * r * r / e[i].variance);
      }
      logf[k] = s;
      peak = std::max(peak, s);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
      const double f = std::exp(logf[k] - peak);
      z += (k == 0 || k + 1 == points) ? 0.5 * f : f;
    }
    z *= h;
    for (std::size_t k = 0; k < points; ++k) {
      const double y = lo + h * static_cast<double>(k);
      const double err = std::abs(std::exp(logf[k] - peak) / z - density(p, y));
      worst = std::max(worst, err);
    }
  }
  std::ostringstream d;
  d << instances << " instances, max density error " << worst << " (tol 1e-6)";
  return finish("closure_univariate", worst < 1e-6, d, t);
}

CheckResult closure_full(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t d = pick(rng, 2, 4);
    const std::size_t m = pick(rng, 2, 5);
    std::vector<FullCovariance> e;
    for (std::size_t i = 0; i < m; ++i) {
      Vector mu(d);
      for (auto& v : mu) v = 2.0 * normal(rng);
      e.push_back(make_full(mu, random_spd(rng, d)));
    }
    const auto w = random_weights(rng, m, 0.05, 2.0);
    const FullCovariance p = pog_full(e, w);

    std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
    std::vector<double> b(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          const double pij = e[i].precision(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
          a[r][c] += w[i] * pij;
          b[r] += w[i] * pij * e[i].mean(static_cast<Eigen::Index>(c));
        }
      }
    }
    const auto mu = eliminate(a, b);
    for (std::size_t r = 0; r < d; ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      worst = std::max(worst, std::abs(p.mean(ri) - mu[r]) / std::max(1.0, std::abs(mu[r])));
      for (std::size_t c = 0; c < d; ++c) {
        const double ref = a[r][c];
        worst = std::max(worst, std::abs(p.precision(ri, static_cast<Eigen::Index>(c)) - ref) /
                                    std::max(1.0, std::abs(ref)));
      }
    }
  }
  std::ostringstream d;
  d << instances << " instances, max error vs elimination " << worst << " (tol 1e-9)";
  return finish("closure_full", worst < 1e-9, d, t);
}

CheckResult isotropic_consistency(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t d = pick(rng, 2, 5);
    const std::size_t m = pick(rng, 2, 6);
    std::vector<Isotropic> iso;
    std::vector<FullCovariance> full;
    for (std::size_t i = 0; i < m; ++i) {
      Vector mu(d);
      for (auto& v : mu) v = 2.0 * normal(rng);
      const double tau = uniform(rng, 0.25, 4.0);
      iso.push_back(make_isotropic(mu, tau));
      full.push_back(make_full(mu, tau * Matrix::Identity(d, d)));
    }
    const auto w = random_weights(rng, m, 0.05, 2.0);
    const Isotropic pi = pog_isotropic(iso, w);
    const FullCovariance pf = pog_full(full, w);
    worst = std::max(worst, (pi.mean - pf.mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (pi.precision * Matrix::Identity(d, d) - pf.precision).cwiseAbs().maxCoeff());
  }
  std::ostringstream d;
  d << instances << " instances, max difference " << worst << " (tol 1e-12)";
  return finish("isotropic_consistency", worst < 1e-12, d, t);
}

CheckResult convex_hull(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  std::size_t bad = 0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 8);
    const auto e = random_univariates(rng, m);
    auto w = random_weights(rng, m, 0.0, 3.0);
    for (std::size_t i = 1; i < m; ++i)
      if (uniform(rng, 0.0, 1.0) < 0.3) w[i] = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
      if (w[i] > 0.0) {
        lo = std::min(lo, e[i].mean);
        hi = std::max(hi, e[i].mean);
      }
    }
    const double mu = pog_univariate(e, w).mean;
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (mu < lo - slack || mu > hi + slack) ++bad;
  }
  std::ostringstream d;
  d << instances << " instances, " << bad << " outside the hull";
  return finish("convex_hull", bad == 0, d, t);
}

CheckResult gradient_fd(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 6);
    LossEvalPoint p;
    const int kind = static_cast<int>(n % 3);
    const std::size_t d = kind == 0 ? 1 : pick(rng, 2, 3);
    Vector y(d);
    for (auto& v : y) v = 2.0 * normal(rng);
    for (std::size_t i = 0; i < m; ++i) {
      Vector mu(d);
      for (auto& v : mu) v = 2.0 * normal(rng);
      if (kind == 0) {
        p.experts.emplace_back(make_univariate(mu(0), uniform(rng, 0.25, 4.0)));
      } else if (kind == 1) {
        p.experts.emplace_back(make_isotropic(mu, uniform(rng, 0.25, 4.0)));
      } else {
        p.experts.emplace_back(make_full(mu, random_spd(rng, d)));
      }
    }
    p.y = kind == 0 ? Target{y(0)} : Target{y};
    p.weights = random_weights(rng, m, 0.2, 2.0);
    const auto g = nll_gradient(p);
    double gmax = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      LossEvalPoint q = p;
      q.weights[i] = p.weights[i] + h;
      const double up = nll_loss(q);
      q.weights[i] = p.weights[i] - h;
      const double dn = nll_loss(q);
      diff = std::max(diff, std::abs((up - dn) / (2.0 * h) - g[i]));
      gmax = std::max(gmax, std::abs(g[i]));
    }
    worst = std::max(worst, diff / std::max(1.0, gmax));
  }
  std::ostringstream d;
  d << instances << " instances (univariate/isotropic/full), max rel. error " << worst << " (tol 1e-5)";
  return finish("gradient_fd", worst < 1e-5, d, t);
}

CheckResult hessian_psd(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  constexpr double h = 1e-6;
  double min_eig = std::numeric_limits<double>::infinity();
  double fd_err = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 6);
    const auto e = random_univariates(rng, m);
    const auto w = random_weights(rng, m, 0.1, 2.0);
    const double y = 2.0 * normal(rng);
    const Matrix hess = reduced_hessian(y, e, w);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hess, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());

    // Second derivatives of the reduced loss from differences of its gradient.
    Matrix fd(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      auto wp = w;
      auto wm = w;
      wp[j] += h;
      wm[j] -= h;
      const auto gp = nll_gradient(y, e, wp);
      const auto gm = nll_gradient(y, e, wm);
      for (std::size_t i = 0; i < m; ++i) {
        fd(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / h;  // 2 * NLL
      }
    }
    fd_err = std::max(fd_err, (fd - hess).cwiseAbs().maxCoeff() / std::max(1.0, hess.cwiseAbs().maxCoeff()));
  }
  std::ostringstream d;
  d << instances << " instances, min eigenvalue " << min_eig << " (tol -1e-8), rel. error vs differences "
    << fd_err;
  return finish("hessian_psd", min_eig >= -1e-8 && fd_err < 1e-5, d, t);
}

CheckResult loss_convexity(std::size_t triples, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  std::size_t bad = 0;
  double worst = 0.0;
  for (std::size_t n = 0; n < triples; ++n) {
    const std::size_t m = pick(rng, 2, 6);
    const auto e = random_univariates(rng, m);
    const double y = 3.0 * normal(rng);
    const auto w1 = random_weights(rng, m, 0.0, 3.0);
    const auto w2 = random_weights(rng, m, 0.0, 3.0);
    std::vector<double> mid(m);
    for (std::size_t i = 0; i < m; ++i) mid[i] = 0.5 * (w1[i] + w2[i]);
    const double gap = nll_loss(y, e, mid) - 0.5 * (nll_loss(y, e, w1) + nll_loss(y, e, w2));
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++bad;
  }
  std::ostringstream d;
  d << triples << " triples, " << bad << " violations, largest L(mid) - mean " << worst;
  return finish("loss_convexity", bad == 0, d, t);
}

namespace {

std::vector<double> feasible_point(Rng& rng, std::span<const double> tau, const ConstraintSet& cs) {
  for (;;) {
    std::vector<double> w(tau.size());
    for (auto& v : w) v = uniform(rng, 0.05, 0.9) * cs.w_max;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * tau[i];
    // Pull the precision into the interior of its interval.
    const double target = std::exp(uniform(rng, std::log(2.0 / cs.sigma2_max), std::log(0.5 / cs.sigma2_min)));
    for (auto& v : w) v *= target / s;
    if (std::all_of(w.begin(), w.end(), [&](double v) { return v > 0.02 && v < 0.98 * cs.w_max; })) return w;
  }
}

}  // namespace

CheckResult barrier(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  ConstraintSet cs;
  cs.w_max = 10.0;
  cs.sigma2_min = 0.05;
  cs.sigma2_max = 20.0;
  constexpr double h = 1e-6;
  double grad_err = 0.0;
  std::size_t convex_bad = 0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 6);
    std::vector<double> tau(m);
    for (auto& v : tau) v = uniform(rng, 0.25, 4.0);
    const auto w = feasible_point(rng, tau, cs);
    const auto b = barrier_penalty(w, tau, {}, cs);
    double diff = 0.0;
    double gmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      auto wp = w;
      auto wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double fd = (barrier_penalty(wp, tau, {}, cs).value - barrier_penalty(wm, tau, {}, cs).value) / (2 * h);
      diff = std::max(diff, std::abs(fd - b.gradient[i]));
      gmax = std::max(gmax, std::abs(b.gradient[i]));
    }
    grad_err = std::max(grad_err, diff / std::max(1.0, gmax));

    const auto w2 = feasible_point(rng, tau, cs);
    std::vector<double> mid(m);
    for (std::size_t i = 0; i < m; ++i) mid[i] = 0.5 * (w[i] + w2[i]);
    const double gap = barrier_penalty(mid, tau, {}, cs).value -
                       0.5 * (b.value + barrier_penalty(w2, tau, {}, cs).value);
    if (gap > 1e-9) ++convex_bad;
  }
  std::ostringstream d;
  d << instances << " instances, gradient rel. error " << grad_err << " (tol 1e-5), " << convex_bad
    << " midpoint violations";
  return finish("barrier", grad_err < 1e-5 && convex_bad == 0, d, t);
}

CheckResult backstop(std::size_t instances, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  ConstraintSet cs;
  cs.w_max = 10.0;
  cs.sigma2_min = 0.05;
  cs.sigma2_max = 20.0;
  std::size_t bad = 0;
  double drift = 0.0;
  for (std::size_t n = 0; n < instances; ++n) {
    const std::size_t m = pick(rng, 2, 8);
    std::vector<double> tau(m);
    for (auto& v : tau) v = std::exp(uniform(rng, -3.0, 3.0));
    std::vector<double> w(m);
    const double spread = std::exp(uniform(rng, -6.0, 4.0));
    for (auto& v : w) v = spread * normal(rng);
    w[0] = std::abs(w[0]) + 1e-3;  // at least one usable coordinate
    backstop_project_inplace(w, tau, {}, cs);
    double s = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      ok &= w[i] >= 0.0 && w[i] <= cs.w_max;
      s += w[i] * tau[i];
    }
    ok &= s <= (1.0 / cs.sigma2_min) * (1.0 + 1e-12) && s >= (1.0 / cs.sigma2_max) * (1.0 - 1e-12);
    if (!ok) ++bad;
    auto again = w;
    backstop_project_inplace(again, tau, {}, cs);
    for (std::size_t i = 0; i < m; ++i) drift = std::max(drift, std::abs(again[i] - w[i]));
  }
  std::ostringstream d;
  d << instances << " instances, " << bad << " infeasible outputs, re-projection drift " << drift;
  return finish("backstop", bad == 0 && drift <= 1e-12, d, t);
}

CheckResult switching_invariants(std::size_t steps, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  double sum_err = 0.0;
  bool in_range = true;
  for (std::size_t run = 0; run < 10; ++run) {
    const std::size_t m = pick(rng, 2, 12);
    SwitchingState st(m);
    std::vector<double> logd(m);
    for (std::size_t k = 0; k < steps; ++k) {
      for (auto& v : logd) v = uniform(rng, -60.0, 5.0);
      switching_step_log(st, logd);
      double s = 0.0;
      for (double v : st.weights) {
        in_range &= v >= 0.0 && v <= 1.0;
        s += v;
      }
      sum_err = std::max(sum_err, std::abs(s - 1.0));
    }
  }
  SwitchingState sym(2);
  double sym_err = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double rho = std::exp(uniform(rng, -5.0, 1.0));
    const double both[2] = {rho, rho};
    switching_step(sym, both);
    sym_err = std::max({sym_err, std::abs(sym.weights[0] - 0.5), std::abs(sym.weights[1] - 0.5)});
  }
  std::ostringstream d;
  d << "10 runs x " << steps << " steps, max |sum - 1| " << sum_err << (in_range ? "" : ", weight out of [0,1]")
    << "; symmetric fixture max |w - 1/2| " << sym_err;
  return finish("switching_invariants", in_range && sum_err <= 1e-12 && sym_err <= 1e-12, d, t);
}

CheckResult gating_partition(std::size_t points, std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  constexpr std::size_t dim = 3;
  constexpr std::size_t s = 6;
  const ComposedContext cc = sample_composed(dim, s, 0.3, rng);
  std::size_t mismatch = 0;
  std::size_t unstable = 0;
  std::vector<std::size_t> hits(cc.cells(), 0);
  for (std::size_t n = 0; n < points; ++n) {
    std::vector<double> z(dim);
    for (auto& v : z) v = normal(rng);
    std::uint32_t ref = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s; ++i) {
      const auto& c = cc.contexts()[i];
      double dot = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dot += c.normal()[j] * z[j];
      if (dot >= c.offset()) ref |= 1u << i;
      margin = std::min(margin, std::abs(dot - c.offset()));
    }
    const std::uint32_t idx = context_index(cc, z);
    if (idx != ref) ++mismatch;
    ++hits[idx];
    if (margin > 1e-6) {
      auto zp = z;
      for (auto& v : zp) v += 1e-9 * normal(rng);
      if (context_index(cc, zp) != idx) ++unstable;
    }
  }
  std::ostringstream d;
  d << points << " points, " << mismatch << " index mismatches, " << unstable << " unstable cells, "
    << std::count_if(hits.begin(), hits.end(), [](std::size_t v) { return v > 0; }) << " of " << cc.cells()
    << " cells visited";
  return finish("gating_partition", mismatch == 0 && unstable == 0, d, t);
}

namespace {

NetworkConfig small_network() {
  NetworkConfig cfg;
  cfg.layer_sizes = {8, 8, 1};
  cfg.context_dim = 3;
  cfg.side_info_dim = 1;
  cfg.base_count = 1;
  cfg.learning_rate = 0.05;
  return cfg;
}

ExpertSet hetero_base(double x) {
  const double feature[1] = {x};
  return make_expert_set(feature_experts(feature, 1.0));
}

}  // namespace

CheckResult update_locality(std::uint64_t seed) {
  Timer t;
  Rng rng(seed);
  Network net(small_network(), rng);
  const Dataset data = gen_heteroskedastic(300, seed + 1);
  std::size_t foreign = 0;
  std::size_t touched = 0;
  bool frozen = true;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const auto z = data.row_x(i);
    const auto y = data.row_y(i);
    const auto before = net.layers();
    const auto active = net.active_cells(z);
    if (i % 10 == 9) {
      net.infer_update(hetero_base(z[0]), z, y, 0.0);
      for (std::size_t l = 0; l < before.size(); ++l) frozen &= before[l].weights == net.layers()[l].weights;
      continue;
    }
    net.infer_update(hetero_base(z[0]), z, y);
    for (std::size_t l = 0; l < before.size(); ++l) {
      const Layer& a = before[l];
      const Layer& b = net.layers()[l];
      for (std::size_t k = 0; k < a.size; ++k) {
        for (std::size_t c = 0; c < a.cells; ++c) {
          const auto ra = a.row(k, c);
          const auto rb = b.row(k, c);
          if (!std::equal(ra.begin(), ra.end(), rb.begin())) {
            if (c == active[l][k]) {
              ++touched;
            } else {
              ++foreign;
            }
          }
        }
      }
    }
  }
  std::ostringstream d;
  d << touched << " active-row changes, " << foreign << " inactive-row changes"
    << (frozen ? ", eta = 0 left every weight unchanged" : ", eta = 0 changed weights");
  return finish("update_locality", foreign == 0 && touched > 0 && frozen, d, t);
}

CheckResult kernel_agreement(std::uint64_t seed) {
  Timer t;
  NetworkConfig cfg = small_network();
  cfg.layer_sizes = {32, 16, 1};
  cfg.aggregation = Aggregation::switching;
  Rng r1(seed);
  Rng r2(seed);
  Network serial(cfg, r1);
  Network parallel(cfg, r2);
  serial.set_exec(Exec::serial);
  parallel.set_exec(Exec::parallel);
  const Dataset data = gen_heteroskedastic(500, seed + 7);
  bool same_pred = true;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const auto z = data.row_x(i);
    const auto y = data.row_y(i);
    const auto ps = serial.infer_update(hetero_base(z[0]), z, y);
    const auto pp = parallel.infer_update(hetero_base(z[0]), z, y);
    same_pred &= ps.log_density(y) == pp.log_density(y);
  }
  bool same_w = true;
  for (std::size_t l = 0; l < serial.layers().size(); ++l)
    same_w &= serial.layers()[l].weights == parallel.layers()[l].weights;
  same_w &= serial.switching().weights == parallel.switching().weights;
  std::ostringstream d;
  d << data.rows << " updates, weights " << (same_w ? "bit-identical" : "differ") << ", predictions "
    << (same_pred ? "bit-identical" : "differ");
  return finish("kernel_agreement", same_w && same_pred, d, t);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "closure_univariate", "closure_full",  "isotropic_consistency", "convex_hull",
      "gradient_fd",        "hessian_psd",   "loss_convexity",        "barrier",
      "backstop",           "switching_invariants", "gating_partition", "update_locality",
      "kernel_agreement",
  };
  return names;
}

CheckResult run_suite(const std::string& name, std::uint64_t seed) {
  const auto& names = suite_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown property suite '" + name + "'");
  const std::uint64_t s = seed + static_cast<std::uint64_t>(it - names.begin());
  if (name == "closure_univariate") return closure_univariate(200, s);
  if (name == "closure_full") return closure_full(200, s);
  if (name == "isotropic_consistency") return isotropic_consistency(200, s);
  if (name == "convex_hull") return convex_hull(1000, s);
  if (name == "gradient_fd") return gradient_fd(100, s);
  if (name == "hessian_psd") return hessian_psd(100, s);
  if (name == "loss_convexity") return loss_convexity(1000, s);
  if (name == "barrier") return barrier(200, s);
  if (name == "backstop") return backstop(1000, s);
  if (name == "switching_invariants") return switching_invariants(10000, s);
  if (name == "gating_partition") return gating_partition(20000, s);
  if (name == "update_locality") return update_locality(s);
  return kernel_agreement(s);
}

std::vector<CheckResult> property_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (const auto& name : suite_names()) out.push_back(run_suite(name, seed));
  return out;
}

}  // namespace ggln::checks
