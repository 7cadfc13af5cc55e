#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace flatvisc {

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const GaussRule& gauss16() {
  static const GaussRule rule = make_gauss_legendre(16);
  return rule;
}

}  // namespace detail

/// 16-point Gauss-Legendre on [a, b].
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const auto& rule = detail::gauss16();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Integral over [a, b] (0 < a < b) in the variable log t, one Gauss panel per
/// factor of two. Power-law integrands become smooth exponentials.
inline double integrate_log(const std::function<double(double)>& f, double a, double b) {
  const double la = std::log(a), lb = std::log(b);
  const int panels = std::max(1, static_cast<int>(std::ceil((lb - la) / std::numbers::ln2)));
  const double step = (lb - la) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = la + k * step, x1 = (k + 1 == panels) ? lb : x0 + step;
    sum += gauss_legendre([&](double x) { const double t = std::exp(x); return f(t) * t; }, x0, x1);
  }
  return sum;
}

struct ImproperOptions {
  double rtol = 1e-6;        ///< relative change accepted between refinements
  int min_halvings = 8;
  int max_halvings = 200;
};

struct ImproperResult {
  double value = std::numeric_limits<double>::quiet_NaN();  ///< extrapolated integral
  double truncated = 0.0;    ///< integral down to the last refinement level
  double last_change = std::numeric_limits<double>::infinity();
  double last_ratio = 1.0;   ///< ratio of the last two dyadic increments
  int halvings = 0;
  bool converged = false;
};

/// Convergence test for an integral singular at 0.
///
/// `piece(a, b)` returns the integral over [a, b]. The truncated integrals
/// J_k over [upper 2^-k, upper] are accelerated by two rounds of Aitken's
/// delta-squared (exact for sums of two power-law tails); the integral is
/// accepted once the accelerated value changes by at most rtol between
/// consecutive halvings. Slowly divergent tails such as 1/(t |log t|) keep
/// drifting and are rejected.
template <typename Piece>
ImproperResult dyadic_improper(Piece&& piece, double upper, int max_halvings,
                               const ImproperOptions& opt = {}) {
  ImproperResult res;
  std::vector<double> S{0.0};
  double b = upper;

  auto aitken = [](const std::vector<double>& s, std::size_t i) {
    const double d1 = s[i + 1] - s[i], d2 = s[i + 2] - s[i + 1];
    const double den = d2 - d1;
    if (std::abs(den) <= 1e-14 * (std::abs(d1) + std::abs(d2)) || den == 0.0) return s[i + 2];
    return s[i + 2] - d2 * d2 / den;
  };
  auto accelerated = [&](std::size_t end) {  // A2 built from S[end-4 .. end]
    std::vector<double> a1(3);
    for (std::size_t i = 0; i < 3; ++i) a1[i] = aitken(S, end - 4 + i);
    return aitken(a1, 0);
  };

  double prev_acc = std::numeric_limits<double>::quiet_NaN();
  const int cap = std::min(max_halvings, opt.max_halvings);
  for (int k = 1; k <= cap; ++k) {
    const double a = 0.5 * b;
    const double inc = piece(a, b);
    if (!std::isfinite(inc)) return res;
    S.push_back(S.back() + inc);
    b = a;
    res.halvings = k;
    res.truncated = S.back();
    const std::size_t n = S.size();
    if (n >= 3) {
      const double d_prev = S[n - 2] - S[n - 3];
      res.last_ratio = d_prev != 0.0 ? inc / d_prev : 0.0;
    }
    // Negligible tail: accept the raw sum.
    if (k >= opt.min_halvings && std::abs(inc) <= 1e-3 * opt.rtol * std::abs(S.back())) {
      res.value = S.back();
      res.last_change = std::abs(inc);
      res.converged = true;
      return res;
    }
    if (n >= 5) {
      const double acc = accelerated(n - 1);
      if (std::isfinite(prev_acc) && k >= opt.min_halvings) {
        res.last_change = std::abs(acc - prev_acc) / std::max(std::abs(acc), 1e-300);
        if (res.last_change <= opt.rtol && res.last_ratio < 1.0) {
          res.value = acc;
          res.converged = true;
          return res;
        }
      }
      prev_acc = acc;
    }
  }
  return res;
}

/// Improper integral of a callable over (0, upper].
inline ImproperResult integrate_from_zero(const std::function<double(double)>& f, double upper,
                                          const ImproperOptions& opt = {}) {
  return dyadic_improper([&](double a, double b) { return integrate_log(f, a, b); }, upper,
                         opt.max_halvings, opt);
}

}  // namespace flatvisc
