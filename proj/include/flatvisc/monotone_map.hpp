#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace flatvisc {

enum class Interp {
  linear,  ///< piecewise linear in (t, f)
  loglog,  ///< piecewise linear in (log t, log f), i.e. piecewise power law
};

enum class Monotonicity { increasing, decreasing, constant };

/// Tabulated monotone scalar function.
///
/// Every scalar construction of the flat-kernel pipeline (omega, G, T, Theta and
/// their derivatives) is a one-dimensional monotone map, so a single table type
/// with exact inversion and exact integration of its interpolant covers them.
///
/// In loglog mode knots and values must be positive and the interpolant is a
/// power law on each segment; queries outside the knot range extend the first
/// or last segment. Power laws are reproduced exactly, which is what makes the
/// closed-form kernels testable to round-off.
class MonotoneMap {
 public:
  MonotoneMap() = default;

  MonotoneMap(std::vector<double> knots, std::vector<double> values,
              Interp interp = Interp::loglog)
      : knots_(std::move(knots)), values_(std::move(values)), interp_(interp) {
    if (knots_.size() != values_.size())
      throw std::invalid_argument("MonotoneMap: knots/values size mismatch");
    if (knots_.size() < 2) throw std::invalid_argument("MonotoneMap: need at least two knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
        throw std::invalid_argument("MonotoneMap: non-finite entry");
      if (i > 0 && !(knots_[i] > knots_[i - 1]))
        throw std::invalid_argument("MonotoneMap: knots must be strictly increasing");
      if (interp_ == Interp::loglog && (knots_[i] <= 0.0 || values_[i] <= 0.0))
        throw std::invalid_argument("MonotoneMap: loglog tables need positive knots and values");
    }
    bool up = false, down = false;
    strict_ = true;
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (values_[i] > values_[i - 1]) up = true;
      else if (values_[i] < values_[i - 1]) down = true;
      else strict_ = false;
    }
    if (up && down) throw std::invalid_argument("MonotoneMap: values are not monotone");
    direction_ = up ? Monotonicity::increasing
                    : (down ? Monotonicity::decreasing : Monotonicity::constant);
    if (direction_ == Monotonicity::constant) strict_ = false;

    xs_.resize(knots_.size());
    ys_.resize(knots_.size());
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      xs_[i] = to_x(knots_[i]);
      ys_[i] = to_y(values_[i]);
    }
  }

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return knots_.size(); }
  double lo() const { return knots_.front(); }
  double hi() const { return knots_.back(); }
  Interp interp() const { return interp_; }
  Monotonicity direction() const { return direction_; }
  bool strict() const { return strict_; }
  bool in_range(double t) const { return t >= lo() && t <= hi(); }

  /// Log-log slope (or plain slope in linear mode) of segment j.
  double segment_slope(std::size_t j) const {
    return (ys_[j + 1] - ys_[j]) / (xs_[j + 1] - xs_[j]);
  }

  double operator()(double t) const {
    if (interp_ == Interp::loglog && t <= 0.0) return limit_at_zero();
    const std::size_t j = segment(t);
    const double y = ys_[j] + (to_x(t) - xs_[j]) * segment_slope(j);
    return from_y(y);
  }

  /// Derivative of the interpolant (right derivative at knots).
  double derivative(double t) const {
    const std::size_t j = segment(t);
    const double s = segment_slope(j);
    if (interp_ == Interp::linear) return s;
    if (t <= 0.0) {
      if (s > 1.0) return 0.0;
      if (s == 1.0) return values_[0] / knots_[0];
      return std::numeric_limits<double>::infinity();
    }
    return (*this)(t)*s / t;
  }

  /// Exact inverse of the interpolant. Requires strict monotonicity.
  double invert(double y) const {
    if (!strict_) throw std::domain_error("MonotoneMap::invert: map is not strictly monotone");
    if (interp_ == Interp::loglog && y <= 0.0) {
      // Only an increasing power law from 0 reaches 0 (at t = 0).
      if (direction_ == Monotonicity::increasing && segment_slope(0) > 0.0) return 0.0;
      throw std::domain_error("MonotoneMap::invert: value outside the range of the map");
    }
    const double Y = to_y(y);
    std::size_t j;
    if (direction_ == Monotonicity::increasing) {
      auto it = std::upper_bound(ys_.begin(), ys_.end(), Y);
      j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - ys_.begin() - 1, 0,
                                                               static_cast<std::ptrdiff_t>(ys_.size()) - 2));
    } else {
      auto it = std::upper_bound(ys_.begin(), ys_.end(), Y, std::greater<>());
      j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - ys_.begin() - 1, 0,
                                                               static_cast<std::ptrdiff_t>(ys_.size()) - 2));
    }
    const double X = xs_[j] + (Y - ys_[j]) / segment_slope(j);
    return from_x(X);
  }

  /// Table with the roles of knots and values swapped.
  MonotoneMap inverse() const {
    if (!strict_) throw std::domain_error("MonotoneMap::inverse: map is not strictly monotone");
    std::vector<double> k = values_, v = knots_;
    if (direction_ == Monotonicity::decreasing) {
      std::reverse(k.begin(), k.end());
      std::reverse(v.begin(), v.end());
    }
    return MonotoneMap(std::move(k), std::move(v), interp_);
  }

  /// Exact integral of the interpolant over [a, b]; a may be 0 in loglog mode.
  /// Returns +inf when the extrapolated power law is not integrable at 0.
  double integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    if (a == b) return 0.0;
    double total = 0.0;
    double left = a;
    if (interp_ == Interp::loglog && a <= 0.0) {
      if (a < 0.0) throw std::domain_error("MonotoneMap::integral: negative bound in loglog mode");
      const double upto = std::min(b, lo());
      total += head_integral(upto);
      left = upto;
      if (left >= b) return total;
    }
    // Breakpoints are the interior knots; the end segments extend to +-inf.
    while (left < b) {
      const std::size_t j = segment(left);
      double right = b;
      if (j + 2 < knots_.size()) right = std::min(b, knots_[j + 1]);
      total += piece_integral(j, left, right);
      left = right;
    }
    return total;
  }

  /// Integrals from 0 (loglog) or from the first knot (linear) to every knot.
  std::vector<double> cumulative_integral() const {
    std::vector<double> out(knots_.size());
    double acc = interp_ == Interp::loglog ? head_integral(lo()) : 0.0;
    out[0] = acc;
    for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
      acc += piece_integral(j, knots_[j], knots_[j + 1]);
      out[j + 1] = acc;
    }
    return out;
  }

  friend bool operator==(const MonotoneMap& a, const MonotoneMap& b) {
    return a.interp_ == b.interp_ && a.knots_ == b.knots_ && a.values_ == b.values_;
  }

 private:
  double to_x(double t) const { return interp_ == Interp::loglog ? std::log(t) : t; }
  double to_y(double v) const { return interp_ == Interp::loglog ? std::log(v) : v; }
  double from_x(double x) const { return interp_ == Interp::loglog ? std::exp(x) : x; }
  double from_y(double y) const { return interp_ == Interp::loglog ? std::exp(y) : y; }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const auto idx = static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(knots_.size()) - 2));
  }

  double limit_at_zero() const {
    const double s = segment_slope(0);
    if (s > 0.0) return 0.0;
    if (s == 0.0) return values_[0];
    return std::numeric_limits<double>::infinity();
  }

  // Integral over [0, upto] of the first segment extended down to 0.
  double head_integral(double upto) const {
    if (upto <= 0.0) return 0.0;
    const double s = segment_slope(0);
    if (s <= -1.0) return std::numeric_limits<double>::infinity();
    return (*this)(upto)*upto / (s + 1.0);
  }

  // Integral of segment j's formula over [u, w].
  double piece_integral(std::size_t j, double u, double w) const {
    if (interp_ == Interp::linear) {
      return 0.5 * ((*this)(u) + (*this)(w)) * (w - u);
    }
    const double k = segment_slope(j) + 1.0;
    const double L = std::log(w / u);
    const double fu = from_y(ys_[j] + (std::log(u) - xs_[j]) * segment_slope(j));
    const double kL = k * L;
    // (exp(kL) - 1) / k, stable for k -> 0
    const double g = std::abs(kL) < 1e-12 ? L : std::expm1(kL) / k;
    return fu * u * g;
  }

  std::vector<double> knots_, values_;
  std::vector<double> xs_, ys_;
  Interp interp_ = Interp::loglog;
  Monotonicity direction_ = Monotonicity::constant;
  bool strict_ = false;
};

/// `count` log-spaced points on [lo, hi], endpoints exact.
inline std::vector<double> log_space(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw std::invalid_argument("log_space: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline void to_json(nlohmann::json& j, const MonotoneMap& m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) pairs.push_back({m.knots()[i], m.values()[i]});
  j = {{"interp", m.interp() == Interp::loglog ? "loglog" : "linear"}, {"pairs", std::move(pairs)}};
}

inline void from_json(const nlohmann::json& j, MonotoneMap& m) {
  std::vector<double> k, v;
  for (const auto& p : j.at("pairs")) {
    k.push_back(p.at(0).get<double>());
    v.push_back(p.at(1).get<double>());
  }
  const auto mode = j.value("interp", std::string("loglog"));
  m = MonotoneMap(std::move(k), std::move(v), mode == "linear" ? Interp::linear : Interp::loglog);
}

}  // namespace flatvisc
