#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hamiltonian.hpp"
#include "monotone_map.hpp"
#include "quadrature.hpp"
#include "types.hpp"

namespace flatvisc {

struct KernelOptions {
  double t_lo = 1e-10;           ///< smallest knot of the T table
  std::size_t resolution = 4096; ///< knots of the T table on [t_lo, d]
  double R = std::numeric_limits<double>::infinity();
  bool rho_correction = true;    ///< false: Phi = 1/sup Laplacian
  double osgood_rtol = 1e-6;

  double knots_per_e(double d) const {
    return static_cast<double>(resolution - 1) / std::log(d / t_lo);
  }
};

/// Log-spaced knots on [lo, hi] with the given density per e-fold.
inline std::vector<double> log_knots(double lo, double hi, double per_e) {
  const auto count = static_cast<std::size_t>(std::ceil(std::log(hi / lo) * per_e)) + 1;
  return log_space(lo, hi, std::max<std::size_t>(count, 2));
}

/// omega(t) = sqrt(t) + int_0^t sup_{s<|a|<1} Laplacian ds on the given knots
/// (knots in (0, 1]). Throws IntegrabilityError when the envelope is not
/// integrable at 0.
inline MonotoneMap build_omega(const Hamiltonian& H, const std::vector<double>& knots,
                               double rtol = 1e-6) {
  if (knots.empty() || knots.back() > 1.0) throw std::invalid_argument("build_omega: knots must lie in (0, 1]");
  const MonotoneMap E = radial_envelope(H, 1.0, knots);

  ImproperOptions opt;
  opt.rtol = rtol;
  const int halvings = static_cast<int>(std::floor(std::log2(knots.back() / knots.front())));
  const auto gate = dyadic_improper([&](double a, double b) { return E.integral(a, b); }, knots.back(),
                                    halvings, opt);
  if (!gate.converged)
    throw IntegrabilityError("build_omega: sup-Laplacian envelope not integrable at 0 (relative change " +
                             std::to_string(gate.last_change) + " after " + std::to_string(gate.halvings) +
                             " halvings)");

  std::vector<double> cum = E.cumulative_integral();
  if (E.interp() == Interp::linear) {
    const double head = E.values().front() * E.lo();
    for (double& c : cum) c += head;
  }
  std::vector<double> vals(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) vals[i] = std::sqrt(knots[i]) + cum[i];
  return MonotoneMap(knots, std::move(vals));
}

inline MonotoneMap build_omega(const Hamiltonian& H, std::size_t resolution = 512, double lo = 1e-10) {
  return build_omega(H, log_space(lo, 1.0, resolution));
}

/// rho(t) = C omega(t)/t below 1, (C/2) omega(1) (e^{1-t} + 1) above.
class Rho {
 public:
  Rho(MonotoneMap omega, double C) : omega_(std::move(omega)), C_(C) {
    if (!(C > 0.0)) throw std::invalid_argument("Rho: C must be positive");
    if (omega_.hi() < 1.0) throw std::invalid_argument("Rho: omega table must reach t = 1");
    w1_ = omega_(1.0);
  }
  double operator()(double t) const {
    if (!(t > 0.0)) return std::numeric_limits<double>::infinity();
    if (t < 1.0) return C_ * omega_(t) / t;
    return 0.5 * C_ * w1_ * (std::exp(1.0 - t) + 1.0);
  }
  double at_infinity() const { return 0.5 * C_ * w1_; }
  double C() const { return C_; }
  const MonotoneMap& omega() const { return omega_; }

 private:
  MonotoneMap omega_;
  double C_;
  double w1_ = 0.0;
};

inline Rho build_rho(const MonotoneMap& omega, double C) { return Rho(omega, C); }

namespace detail {

// 1 / suffix-max of `denominator` over the knots and the supremum beyond them.
template <typename Den>
MonotoneMap phi_from_envelope(const Hamiltonian& H, const std::vector<double>& knots, double R, Den&& den) {
  if (!(R > 1.0)) throw std::invalid_argument("build_phi: need R > 1");
  if (!(knots.back() < R)) throw std::invalid_argument("build_phi: knots must lie below R");
  if (std::isinf(R) && !H.laplacian_bounded_at_infinity())
    throw std::domain_error("build_phi: R = inf requires a Laplacian bounded at infinity");

  // Radii between the last knot and R, sampled at the knot density.
  const double per_e = (knots.size() - 1) / std::log(knots.back() / knots.front());
  const double far = std::isinf(R) ? std::max(1e6, 100.0 * knots.back()) : R * (1.0 - 1e-12);
  double run = std::isinf(R) ? den(std::numeric_limits<double>::infinity()) : den(far);
  if (far > knots.back()) {
    for (double r : log_knots(knots.back(), far, per_e)) run = std::max(run, den(r));
  }
  std::vector<double> vals(knots.size());
  for (std::size_t i = knots.size(); i-- > 0;) {
    run = std::max(run, den(knots[i]));
    vals[i] = 1.0 / run;
  }
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v))
      throw IntegrabilityError("build_phi: Phi vanishes on the table (infinite Laplacian envelope)");
  return MonotoneMap(knots, std::move(vals));
}

}  // namespace detail

/// Phi^R(t) = inf_{t<|a|<R} 1/(rho(|a|) + Laplacian F(a)) on the given knots.
inline MonotoneMap build_phi(const Hamiltonian& H, const Rho& rho, double R, const std::vector<double>& knots) {
  return detail::phi_from_envelope(H, knots, R, [&](double r) {
    if (std::isinf(r)) return rho.at_infinity() + H.radial_laplacian(1e300);
    return rho(r) + H.radial_laplacian(r);
  });
}

/// Phi(t) = 1 / sup_{t<|a|<R} Laplacian F(a), without the rho correction.
inline MonotoneMap build_phi_uncorrected(const Hamiltonian& H, double R, const std::vector<double>& knots) {
  return detail::phi_from_envelope(H, knots, R, [&](double r) {
    return H.radial_laplacian(std::isinf(r) ? 1e300 : r);
  });
}

/// Result of the Osgood test on int_0 dt / Phi.
inline ImproperResult osgood_check(const MonotoneMap& phi, double rtol = 1e-6) {
  std::vector<double> rv(phi.size());
  for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = 1.0 / phi.values()[i];
  const MonotoneMap recip(phi.knots(), std::move(rv), phi.interp());
  const double upper = std::min(1.0, phi.hi());
  ImproperOptions opt;
  opt.rtol = rtol;
  const int halvings = static_cast<int>(std::floor(std::log2(upper / phi.lo())));
  return dyadic_improper([&](double a, double b) { return recip.integral(a, b); }, upper, halvings, opt);
}

namespace detail {

// G(tau) = int_0^tau ds / Phi(s) for a loglog Phi table, with exact inversion.
class OsgoodPrimitive {
 public:
  explicit OsgoodPrimitive(const MonotoneMap& phi) : phi_(phi) {
    std::vector<double> rv(phi.size());
    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = 1.0 / phi.values()[i];
    recip_ = MonotoneMap(phi.knots(), std::move(rv), Interp::loglog);
    G_ = recip_.cumulative_integral();
    if (!std::isfinite(G_.front()))
      throw IntegrabilityError("Osgood primitive: 1/Phi not integrable at 0");
  }

  double G(double tau) const { return recip_.integral(0.0, tau); }
  double G_at_knot(std::size_t i) const { return G_[i]; }

  double invert(double t) const {
    if (!(t > 0.0)) return 0.0;
    const auto& tau = phi_.knots();
    auto it = std::upper_bound(G_.begin(), G_.end(), t);
    if (it == G_.begin()) {
      // Head: G(tau) = tau_0 / Phi_0 (tau/tau_0)^{m+1} / (m+1).
      const double m1 = recip_.segment_slope(0) + 1.0;
      return tau[0] * std::pow(t / G_[0], 1.0 / m1);
    }
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - G_.begin()) - 1, G_.size() - 2);
    const double m1 = recip_.segment_slope(i) + 1.0;
    const double q = (t - G_[i]) * phi_.values()[i] / tau[i];  // (u^{m+1} - 1)/(m+1)
    double log_u;
    if (std::abs(m1) < 1e-12) log_u = q;
    else log_u = std::log1p(q * m1) / m1;
    return tau[i] * std::exp(log_u);
  }

 private:
  MonotoneMap phi_, recip_;
  std::vector<double> G_;
};

}  // namespace detail

/// `count` log-spaced points on [lo, hi] plus two more at the same spacing
/// beyond each end, so centred differences at lo and hi stay inside the table.
inline std::vector<double> padded_log_space(double lo, double hi, std::size_t count) {
  auto core = log_space(lo, hi, count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  std::vector<double> out;
  out.reserve(count + 4);
  out.push_back(lo * std::exp(-2.0 * step));
  out.push_back(lo * std::exp(-step));
  out.insert(out.end(), core.begin(), core.end());
  out.push_back(hi * std::exp(step));
  out.push_back(hi * std::exp(2.0 * step));
  return out;
}

/// T = G^{-1} with G(tau) = int_0^tau ds/Phi(s), and T' = Phi(T), on
/// `resolution` log-spaced knots of [t_lo, d] (padded). Rejects Phi failing Osgood.
inline std::pair<MonotoneMap, MonotoneMap> build_T(const MonotoneMap& phi, double d,
                                                    std::size_t resolution = 4096, double t_lo = 1e-10,
                                                    double rtol = 1e-6) {
  if (!(d > t_lo)) throw std::invalid_argument("build_T: need d > t_lo");
  if (phi.interp() != Interp::loglog) throw std::invalid_argument("build_T: Phi must be a loglog table");
  if (phi.direction() == Monotonicity::decreasing) throw std::invalid_argument("build_T: Phi must be increasing");
  if (!(phi(0.0) == 0.0)) throw std::invalid_argument("build_T: Phi(0+) must vanish");
  const auto gate = osgood_check(phi, rtol);
  if (!gate.converged)
    throw IntegrabilityError("build_T: Osgood integral of 1/Phi diverges (relative change " +
                             std::to_string(gate.last_change) + ", increment ratio " +
                             std::to_string(gate.last_ratio) + ")");
  const detail::OsgoodPrimitive G(phi);
  const auto ts = padded_log_space(t_lo, d, resolution);
  std::vector<double> T(ts.size()), Tp(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    T[j] = G.invert(ts[j]);
    Tp[j] = phi(T[j]);
  }
  return {MonotoneMap(ts, std::move(T)), MonotoneMap(ts, std::move(Tp))};
}

/// Theta(s) = 2 int_0^{sqrt s} T and Theta'(s) = T(sqrt s)/sqrt s on the
/// squared knots of T.
inline std::pair<MonotoneMap, MonotoneMap> build_theta(const MonotoneMap& T) {
  const auto cum = T.cumulative_integral();
  std::vector<double> s(T.size()), th(T.size()), thp(T.size());
  for (std::size_t j = 0; j < T.size(); ++j) {
    const double t = T.knots()[j];
    s[j] = t * t;
    th[j] = 2.0 * cum[j];
    thp[j] = T.values()[j] / t;
  }
  return {MonotoneMap(s, std::move(th)), MonotoneMap(std::move(s), std::move(thp))};
}

struct ThetaLimits {
  double s_small = 0.0, s_ref = 1e-2;
  double theta_ratio = 0.0;        ///< Theta(s_small) / Theta(s_ref)
  double thetaprime_ratio = 0.0;   ///< Theta'(s_small) / Theta'(s_ref)
  double s_theta2_ratio = 0.0;     ///< s Theta''(s) at s_small over s_ref
  double theta2_over_s = 0.0;      ///< Theta''(s_small)/s_small, diagnostic
  bool pass = false;
};

/// The bundle (Phi, T, T', Theta, Theta') of one flat sup-convolution family.
struct FlatKernel {
  MonotoneMap phi, T, Tprime, theta, thetaprime;
  double diam = 1.0;
  bool flat = true;

  /// Theta'' by a centred difference of log Theta' over one knot spacing.
  double theta_second(double s) const {
    const auto& k = thetaprime.knots();
    const double step = std::log(k[1] / k[0]);
    const double up = thetaprime(s * std::exp(step)), dn = thetaprime(s * std::exp(-step));
    return thetaprime(s) / s * (std::log(up) - std::log(dn)) / (2.0 * step);
  }

  double Tinv(double y) const { return y <= 0.0 ? 0.0 : T.invert(y); }

  /// sup over (0, d) of 2 Theta''(t^2) t^2 + Theta'(t^2) = T'(d) for increasing T'.
  double semiconvexity_constant() const { return Tprime(diam); }

  ThetaLimits theta_limits(double s_ref = 1e-2, double factor = 1e-4) const {
    ThetaLimits L;
    L.s_ref = s_ref;
    L.s_small = theta.lo();
    L.theta_ratio = theta(L.s_small) / theta(s_ref);
    L.thetaprime_ratio = thetaprime(L.s_small) / thetaprime(s_ref);
    const double sm = L.s_small * std::exp(std::log(theta.knots()[1] / theta.knots()[0]));
    L.s_theta2_ratio = std::abs(sm * theta_second(sm)) / std::abs(s_ref * theta_second(s_ref));
    L.theta2_over_s = theta_second(sm) / sm;
    L.pass = L.theta_ratio <= factor && L.thetaprime_ratio <= factor && L.s_theta2_ratio <= factor;
    return L;
  }

  /// Largest relative error of Theta'(t^2) t = T(t) over the points.
  double theta_prime_identity_error(const std::vector<double>& ts) const {
    double worst = 0.0;
    for (double t : ts) worst = std::max(worst, std::abs(thetaprime(t * t) * t - T(t)) / T(t));
    return worst;
  }
  /// Largest relative error of 2 Theta''(t^2) t^2 + Theta'(t^2) = T'(t).
  double theta_second_identity_error(const std::vector<double>& ts) const {
    double worst = 0.0;
    for (double t : ts) {
      const double s = t * t;
      const double lhs = 2.0 * theta_second(s) * s + thetaprime(s);
      worst = std::max(worst, std::abs(lhs - Tprime(t)) / Tprime(t));
    }
    return worst;
  }
};

/// Kernel with Theta(t) = T(t) = t and T' = 1; not flat.
inline FlatKernel classical_kernel(double d, double t_lo = 1e-10) {
  if (!(d > 0.0)) throw std::invalid_argument("classical_kernel: need d > 0");
  const auto ts = log_space(std::min(t_lo, 0.5 * d), d, 64);
  std::vector<double> ss(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) ss[i] = ts[i] * ts[i];
  const std::vector<double> ones(ts.size(), 1.0);
  FlatKernel k;
  k.phi = MonotoneMap(ts, ones);
  k.T = MonotoneMap(ts, ts);
  k.Tprime = MonotoneMap(ts, ones);
  k.theta = MonotoneMap(ss, ss);
  k.thetaprime = MonotoneMap(ss, ones);
  k.diam = d;
  k.flat = false;
  return k;
}

/// Kernel from an explicit Phi table.
inline FlatKernel kernel_from_phi(const MonotoneMap& phi, double d, const KernelOptions& opt = {}) {
  auto [T, Tp] = build_T(phi, d, opt.resolution, opt.t_lo, opt.osgood_rtol);
  auto [th, thp] = build_theta(T);
  FlatKernel k;
  k.phi = phi;
  k.T = std::move(T);
  k.Tprime = std::move(Tp);
  k.theta = std::move(th);
  k.thetaprime = std::move(thp);
  k.diam = d;
  k.flat = true;
  return k;
}

/// The full chain omega -> rho -> Phi^R -> T -> Theta for a Hamiltonian.
///
/// The Phi table is extended downwards until G(lo) falls below t_lo and
/// upwards until G(hi) reaches d, so T is never extrapolated.
inline FlatKernel build_kernel(const Hamiltonian& H, double d, const KernelOptions& opt = {}) {
  if (!(d > 0.0)) throw std::invalid_argument("build_kernel: need d > 0");
  const double per_e = opt.knots_per_e(d);
  double lo = std::min(opt.t_lo, 1e-10);
  double hi = std::max(1.0, 2.0 * d);
  if (!std::isinf(opt.R)) hi = std::min(hi, 0.5 * (1.0 + opt.R));

  for (int attempt = 0; attempt < 40; ++attempt) {
    MonotoneMap phi;
    if (opt.rho_correction) {
      const Rho rho(build_omega(H, log_knots(std::min(lo, 0.5), 1.0, per_e), opt.osgood_rtol),
                    H.dimensional_constant());
      phi = build_phi(H, rho, opt.R, log_knots(lo, hi, per_e));
    } else {
      phi = build_phi_uncorrected(H, opt.R, log_knots(lo, hi, per_e));
    }
    const detail::OsgoodPrimitive G(phi);
    const double g_lo = G.G_at_knot(0), g_hi = G.G_at_knot(phi.size() - 1);
    if (g_lo > 0.5 * opt.t_lo) {
      if (lo < 1e-280) throw std::domain_error("build_kernel: cannot resolve T near 0");
      lo *= 1e-20;
      continue;
    }
    if (g_hi < 2.0 * d) {
      const double next = std::isinf(opt.R) ? hi * 10.0 : 0.5 * (hi + opt.R);
      if (next - hi < 1e-9 * hi) throw std::domain_error("build_kernel: Phi^R too small to reach the diameter");
      hi = next;
      continue;
    }
    return kernel_from_phi(phi, d, opt);
  }
  throw std::domain_error("build_kernel: table range search did not terminate");
}

inline void to_json(nlohmann::json& j, const FlatKernel& k) {
  j = {{"schema_version", 1}, {"diam", k.diam},   {"flat", k.flat},
       {"phi", k.phi},        {"T", k.T},         {"Tprime", k.Tprime},
       {"theta", k.theta},    {"thetaprime", k.thetaprime}};
}

inline void from_json(const nlohmann::json& j, FlatKernel& k) {
  k.diam = j.at("diam").get<double>();
  k.flat = j.at("flat").get<bool>();
  k.phi = j.at("phi").get<MonotoneMap>();
  k.T = j.at("T").get<MonotoneMap>();
  k.Tprime = j.at("Tprime").get<MonotoneMap>();
  k.theta = j.at("theta").get<MonotoneMap>();
  k.thetaprime = j.at("thetaprime").get<MonotoneMap>();
}

}  // namespace flatvisc
