#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "monotone_map.hpp"
#include "types.hpp"

namespace flatvisc {

/// F(a) = |a|^p.
struct PDirichlet {
  double p = 2.0;
};

/// F(a) = max(|a| - 1, 0)^p, vanishing on the closed unit ball.
struct Congestion {
  double p = 2.0;
};

/// F(a) = |a|^2.
struct Quadratic {};

/// F(a) = f(|a|) for a user supplied profile with its first two derivatives.
struct CustomRadial {
  std::function<double(double)> f, df, d2f;
  std::string name = "custom_radial";
  bool laplacian_bounded_at_infinity = true;
};

using Model = std::variant<PDirichlet, Congestion, Quadratic, CustomRadial>;

struct SingularSet {
  enum class Kind { empty, origin, sphere };
  Kind kind = Kind::empty;
  double radius = 0.0;

  static SingularSet empty() { return {}; }
  static SingularSet origin() { return {Kind::origin, 0.0}; }
  static SingularSet sphere(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("SingularSet::sphere: radius must be positive");
    return {Kind::sphere, r};
  }

  double distance(const Vec& a) const {
    switch (kind) {
      case Kind::empty: return std::numeric_limits<double>::infinity();
      case Kind::origin: return a.norm();
      case Kind::sphere: return std::abs(a.norm() - radius);
    }
    return std::numeric_limits<double>::infinity();
  }
  bool contains(const Vec& a) const { return distance(a) == 0.0; }

  friend bool operator==(const SingularSet&, const SingularSet&) = default;
};

/// Radial convex integrand F(a) = f(|a|) on R^n together with its singular set.
class Hamiltonian {
 public:
  Hamiltonian(int dim, Model model, std::optional<SingularSet> K = std::nullopt,
              std::optional<double> dimensional_constant = std::nullopt)
      : dim_(dim), model_(std::move(model)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Hamiltonian: dimension must be 1, 2 or 3");
    std::visit([](const auto& m) { validate(m); }, model_);
    K_ = K ? *K : default_singular_set(model_);
    C_ = dimensional_constant ? *dimensional_constant : static_cast<double>(dim);
    if (!(C_ > 0.0)) throw std::invalid_argument("Hamiltonian: dimensional constant must be positive");
  }

  static Hamiltonian p_dirichlet(double p, int dim) { return Hamiltonian(dim, PDirichlet{p}); }
  static Hamiltonian congestion(double p, int dim) { return Hamiltonian(dim, Congestion{p}); }
  static Hamiltonian quadratic(int dim) { return Hamiltonian(dim, Quadratic{}); }

  int dim() const { return dim_; }
  const Model& model() const { return model_; }
  const SingularSet& singular_set() const { return K_; }
  double dimensional_constant() const { return C_; }

  std::string name() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PDirichlet>) return "p_dirichlet";
          else if constexpr (std::is_same_v<M, Congestion>) return "congestion";
          else if constexpr (std::is_same_v<M, Quadratic>) return "quadratic";
          else return m.name;
        },
        model_);
  }

  // Radial profile f and its derivatives.
  double f(double r) const {
    return std::visit(
        [r](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PDirichlet>) return std::pow(r, m.p);
          else if constexpr (std::is_same_v<M, Congestion>) return r > 1.0 ? std::pow(r - 1.0, m.p) : 0.0;
          else if constexpr (std::is_same_v<M, Quadratic>) return r * r;
          else return m.f(r);
        },
        model_);
  }
  double df(double r) const {
    return std::visit(
        [r](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PDirichlet>) return r > 0.0 ? m.p * std::pow(r, m.p - 1.0) : 0.0;
          else if constexpr (std::is_same_v<M, Congestion>)
            return r > 1.0 ? m.p * std::pow(r - 1.0, m.p - 1.0) : 0.0;
          else if constexpr (std::is_same_v<M, Quadratic>) return 2.0 * r;
          else return m.df(r);
        },
        model_);
  }
  double d2f(double r) const {
    return std::visit(
        [r](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PDirichlet>) return power_second(m.p, r);
          else if constexpr (std::is_same_v<M, Congestion>) return r > 1.0 ? power_second(m.p, r - 1.0) : 0.0;
          else if constexpr (std::is_same_v<M, Quadratic>) return 2.0;
          else return m.d2f(r);
        },
        model_);
  }
  // f'(r)/r with its limit f''(0) at r = 0.
  double df_over_r(double r) const { return r > 0.0 ? df(r) / r : d2f(0.0); }

  /// Radial Laplacian f'' + (n - 1) f'/r.
  double radial_laplacian(double r) const {
    return d2f(r) + (dim_ - 1) * df_over_r(r);
  }

  double eval(const Vec& a) const {
    check_dim(a);
    return f(a.norm());
  }

  Vec grad(const Vec& a) const {
    check_dim(a);
    const double r = a.norm();
    if (r == 0.0) {
      const double d0 = df(0.0);
      if (d0 != 0.0 || !std::isfinite(d0))
        throw std::domain_error("Hamiltonian::grad: F is not differentiable at 0");
      return Vec::Zero(dim_);
    }
    Vec g = (df(r) / r) * a;
    if (!g.allFinite()) throw std::domain_error("Hamiltonian::grad: F is not differentiable here");
    return g;
  }

  /// F(a) with F_A(a) written to g; one power evaluation for p-Dirichlet.
  double value_and_grad(const Vec& a, Vec& g) const {
    if (const auto* m = std::get_if<PDirichlet>(&model_)) {
      check_dim(a);
      const double r2 = a.squaredNorm();
      if (r2 == 0.0) {
        g = Vec::Zero(dim_);
        return 0.0;
      }
      const double t = m->p == 2.0 ? 1.0 : std::pow(r2, 0.5 * m->p - 1.0);
      g = (m->p * t) * a;
      return t * r2;
    }
    g = grad(a);
    return eval(a);
  }

  Mat hess(const Vec& a) const {
    check_dim(a);
    if (K_.contains(a)) throw std::domain_error("Hamiltonian::hess: evaluation on the singular set");
    const double r = a.norm();
    const double tangential = df_over_r(r);
    Mat H = tangential * Mat::Identity(dim_, dim_);
    if (r > 0.0) {
      const Vec e = a / r;
      H += (d2f(r) - tangential) * (e * e.transpose());
      H = 0.5 * (H + H.transpose()).eval();
    }
    if (!H.allFinite()) throw std::domain_error("Hamiltonian::hess: F is not twice differentiable here");
    return H;
  }

  double laplacian(const Vec& a) const { return hess(a).trace(); }

  /// limsup of the Laplacian as |a| -> infinity is finite.
  bool laplacian_bounded_at_infinity() const {
    return std::visit(
        [](const auto& m) -> bool {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, PDirichlet> || std::is_same_v<M, Congestion>) return m.p <= 2.0;
          else if constexpr (std::is_same_v<M, Quadratic>) return true;
          else return m.laplacian_bounded_at_infinity;
        },
        model_);
  }

  /// Direction in which the radial Laplacian moves: -1 non-increasing, +1
  /// non-decreasing, 0 unknown (sample it).
  int laplacian_trend() const {
    if (const auto* m = std::get_if<PDirichlet>(&model_)) return m->p < 2.0 ? -1 : (m->p > 2.0 ? 1 : 0);
    if (std::holds_alternative<Quadratic>(model_)) return 1;
    return 0;
  }

 private:
  static double power_second(double p, double r) {
    if (r > 0.0) return p * (p - 1.0) * std::pow(r, p - 2.0);
    if (p < 2.0) return std::numeric_limits<double>::infinity();
    return p == 2.0 ? 2.0 : 0.0;
  }

  static void validate(const PDirichlet& m) {
    if (!(m.p > 1.0)) throw std::invalid_argument("p_dirichlet: need p > 1");
  }
  static void validate(const Congestion& m) {
    if (!(m.p > 1.0)) throw std::invalid_argument("congestion: need p > 1");
  }
  static void validate(const Quadratic&) {}
  static void validate(const CustomRadial& m) {
    if (!m.f || !m.df || !m.d2f) throw std::invalid_argument("custom_radial: profile and derivatives required");
  }

  static SingularSet default_singular_set(const Model& m) {
    if (std::holds_alternative<Congestion>(m)) return SingularSet::sphere(1.0);
    if (std::holds_alternative<CustomRadial>(m)) return SingularSet::empty();
    return SingularSet::origin();
  }

  void check_dim(const Vec& a) const {
    if (a.size() != dim_)
      throw std::invalid_argument("Hamiltonian: expected a vector of length " + std::to_string(dim_) +
                                  ", got " + std::to_string(a.size()));
  }

  int dim_;
  Model model_;
  SingularSet K_;
  double C_ = 1.0;
};

/// sup of the Laplacian over the open annulus t < |a| < R (R may be +inf).
inline double annulus_sup_laplacian(const Hamiltonian& H, double t, double R,
                                    int samples = 256) {
  const bool infinite = std::isinf(R);
  if (infinite && !H.laplacian_bounded_at_infinity())
    throw std::domain_error("annulus_sup_laplacian: Laplacian unbounded at infinity, R = inf not allowed");
  if (!(t >= 0.0) || !(R > t)) throw std::invalid_argument("annulus_sup_laplacian: need 0 <= t < R");

  switch (H.laplacian_trend()) {
    case -1: return H.radial_laplacian(t);
    case 1:
      if (infinite) return H.radial_laplacian(1e300);
      return H.radial_laplacian(R);
    default: break;
  }
  if (const auto* m = std::get_if<PDirichlet>(&H.model())) {
    (void)m;
    return H.radial_laplacian(std::max(t, 1.0));  // constant profile (p = 2)
  }
  // Sampled on log-spaced radii, endpoints included.
  const double lo = std::max(t, 1e-12);
  const double hi = infinite ? std::max(1e9, 10.0 * lo) : R * (1.0 - 1e-12);
  double best = std::max(H.radial_laplacian(lo), H.radial_laplacian(hi));
  if (hi > lo) {
    for (double r : log_space(lo, hi, static_cast<std::size_t>(std::max(samples, 2))))
      best = std::max(best, H.radial_laplacian(r));
  }
  if (const auto* c = std::get_if<Congestion>(&H.model()); c && t < 1.0 && R > 1.0) {
    best = std::max(best, H.radial_laplacian(1.0 + 1e-12 * std::max(1.0, R)));
    if (c->p < 2.0) best = std::numeric_limits<double>::infinity();
  }
  return best;
}

/// Table of t -> sup_{t<|a|<R} Laplacian on the given increasing radii.
///
/// Closed form when the radial Laplacian is monotone; otherwise a suffix
/// maximum over the radii themselves plus the value just inside R.
inline MonotoneMap radial_envelope(const Hamiltonian& H, double R, const std::vector<double>& ts) {
  if (ts.empty() || !(ts.back() <= R)) throw std::invalid_argument("radial_envelope: radii must not exceed R");
  if (std::isinf(R) && !H.laplacian_bounded_at_infinity())
    throw std::domain_error("radial_envelope: Laplacian unbounded at infinity, R = inf not allowed");
  std::vector<double> vals(ts.size());
  const bool closed = H.laplacian_trend() != 0 || std::holds_alternative<PDirichlet>(H.model());
  if (closed) {
    // A knot at R itself gets the limit from inside.
    for (std::size_t i = 0; i < ts.size(); ++i)
      vals[i] = annulus_sup_laplacian(H, std::min(ts[i], R * (1.0 - 1e-12)), R);
  } else {
    const double edge = std::isinf(R) ? H.radial_laplacian(1e300) : H.radial_laplacian(R * (1.0 - 1e-12));
    double run = edge;
    for (std::size_t i = ts.size(); i-- > 0;) {
      run = std::max(run, H.radial_laplacian(ts[i]));
      if (const auto* c = std::get_if<Congestion>(&H.model()); c && c->p < 2.0 && ts[i] < 1.0 && R > 1.0)
        run = std::numeric_limits<double>::infinity();
      vals[i] = run;
    }
  }
  bool positive = true;
  for (double v : vals) {
    if (!std::isfinite(v)) throw IntegrabilityError("radial_envelope: Laplacian envelope is infinite");
    positive = positive && v > 0.0;
  }
  for (std::size_t i = vals.size() - 1; i-- > 0;) vals[i] = std::max(vals[i], vals[i + 1]);
  return MonotoneMap(ts, vals, positive ? Interp::loglog : Interp::linear);
}

/// Envelope on `resolution` log-spaced radii in [lo, hi].
inline MonotoneMap radial_envelope(const Hamiltonian& H, double R, double lo, double hi,
                                   std::size_t resolution = 256) {
  return radial_envelope(H, R, log_space(lo, hi, resolution));
}

inline void to_json(nlohmann::json& j, const Hamiltonian& H) {
  j = nlohmann::json::object();
  j["model"] = H.name();
  j["dim"] = H.dim();
  if (const auto* m = std::get_if<PDirichlet>(&H.model())) j["p"] = m->p;
  if (const auto* m = std::get_if<Congestion>(&H.model())) j["p"] = m->p;
  const auto& K = H.singular_set();
  switch (K.kind) {
    case SingularSet::Kind::empty: j["singular_set"] = {{"kind", "empty"}}; break;
    case SingularSet::Kind::origin: j["singular_set"] = {{"kind", "origin"}}; break;
    case SingularSet::Kind::sphere: j["singular_set"] = {{"kind", "sphere"}, {"radius", K.radius}}; break;
  }
  j["dimensional_constant"] = H.dimensional_constant();
}

inline Hamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  const auto model = j.at("model").get<std::string>();
  const int dim = j.at("dim").get<int>();
  Model m;
  if (model == "p_dirichlet") m = PDirichlet{j.at("p").get<double>()};
  else if (model == "congestion") m = Congestion{j.at("p").get<double>()};
  else if (model == "quadratic") m = Quadratic{};
  else throw std::invalid_argument("unknown hamiltonian model '" + model + "'");

  std::optional<SingularSet> K;
  if (j.contains("singular_set")) {
    const auto& ks = j.at("singular_set");
    const auto kind = ks.is_string() ? ks.get<std::string>() : ks.at("kind").get<std::string>();
    if (kind == "empty") K = SingularSet::empty();
    else if (kind == "origin") K = SingularSet::origin();
    else if (kind == "sphere") K = SingularSet::sphere(ks.at("radius").get<double>());
    else throw std::invalid_argument("unknown singular set '" + kind + "'");
  }
  std::optional<double> C;
  if (j.contains("dimensional_constant")) C = j.at("dimensional_constant").get<double>();
  return Hamiltonian(dim, std::move(m), K, C);
}

}  // namespace flatvisc
