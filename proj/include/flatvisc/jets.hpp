#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "grid.hpp"
#include "hamiltonian.hpp"
#include "types.hpp"

namespace flatvisc {

/// Second-order jet (p, X); X is kept exactly symmetric.
struct Jet {
  Vec p;
  Mat X;

  Jet() = default;
  Jet(Vec p_, Mat X_) : p(std::move(p_)), X(std::move(X_)) {
    if (X.rows() != p.size() || X.cols() != p.size()) throw std::invalid_argument("Jet: size mismatch");
    X = (0.5 * (X + X.transpose())).eval();
  }
};

/// G(p, X) = F_AA(p) : X.
inline double G(const Hamiltonian& H, const Jet& j) { return (H.hess(j.p).cwiseProduct(j.X)).sum(); }

namespace detail {

inline void require_ball(const SampledFunction& u, std::size_t node, double radius) {
  if (radius < u.h_max() * (1.0 - 1e-12)) throw std::invalid_argument("touch test: radius below one cell");
  if (u.boundary_distance(node) < radius * (1.0 - 1e-12))
    throw std::domain_error("touch test: ball leaves the domain");
}

// Grid offsets (in index units) with |z| <= radius, z != 0.
inline std::vector<std::array<int, kMaxDim>> ball_offsets(const SampledFunction& u, double radius) {
  std::vector<std::array<int, kMaxDim>> out;
  const int n = u.dim();
  std::array<int, kMaxDim> R{0, 0, 0};
  for (int d = 0; d < n; ++d) R[static_cast<std::size_t>(d)] = static_cast<int>(std::floor(radius / u.h(d) + 1e-9));
  for (int c = -R[2]; c <= R[2]; ++c)
    for (int b = -R[1]; b <= R[1]; ++b)
      for (int a = -R[0]; a <= R[0]; ++a) {
        if (a == 0 && b == 0 && c == 0) continue;
        const std::array<int, kMaxDim> o{a, b, c};
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) {
          const double z = o[static_cast<std::size_t>(d)] * u.h(d);
          r2 += z * z;
        }
        if (r2 <= radius * radius * (1.0 + 1e-12)) out.push_back(o);
      }
  return out;
}

inline std::size_t shifted(const SampledFunction& u, std::size_t node, const std::array<int, kMaxDim>& o) {
  auto m = u.multi_index(node);
  for (int d = 0; d < u.dim(); ++d) m[static_cast<std::size_t>(d)] += o[static_cast<std::size_t>(d)];
  return u.index(m);
}

inline Vec offset_vec(const SampledFunction& u, const std::array<int, kMaxDim>& o) {
  Vec z(u.dim());
  for (int d = 0; d < u.dim(); ++d) z(d) = o[static_cast<std::size_t>(d)] * u.h(d);
  return z;
}

// Offset vectors and node indices of the ball around a node.
struct Ball {
  std::vector<Vec> z;
  std::vector<std::size_t> nodes;
  double scale = 0.0;  // max |u| on the closed ball
};

inline Ball make_ball(const SampledFunction& u, std::size_t node, double radius) {
  require_ball(u, node, radius);
  Ball b;
  b.scale = std::abs(u[node]);
  for (const auto& o : ball_offsets(u, radius)) {
    b.z.push_back(offset_vec(u, o));
    b.nodes.push_back(shifted(u, node, o));
    b.scale = std::max(b.scale, std::abs(u[b.nodes.back()]));
  }
  return b;
}

// sign = +1: u(x+z) <= u(x) + p.z + X:z z/2 + slack |z|^2; sign = -1: reversed.
inline bool touch(const SampledFunction& u, std::size_t node, const Ball& ball, const Jet& j, double slack, int sign) {
  if (j.p.size() != u.dim()) throw std::invalid_argument("touch test: jet dimension mismatch");
  const double u0 = u[node];
  const double round = 1e-12 * (1.0 + ball.scale);
  for (std::size_t i = 0; i < ball.z.size(); ++i) {
    const Vec& z = ball.z[i];
    const double model = u0 + j.p.dot(z) + 0.5 * z.dot(j.X * z);
    if (sign * (u[ball.nodes[i]] - model) > slack * z.squaredNorm() + round) return false;
  }
  return true;
}

}  // namespace detail

/// Discrete superjet membership on the ball of the given radius.
inline bool touch_test_upper(const SampledFunction& u, std::size_t node, const Jet& jet, double radius, double slack) {
  return detail::touch(u, node, detail::make_ball(u, node, radius), jet, slack, +1);
}

/// Discrete subjet membership on the ball of the given radius.
inline bool touch_test_lower(const SampledFunction& u, std::size_t node, const Jet& jet, double radius, double slack) {
  return detail::touch(u, node, detail::make_ball(u, node, radius), jet, slack, -1);
}

struct Probe {
  Jet jet;
  bool k_excluded = false;
  std::string origin;
};

struct ProbeSet {
  std::vector<Probe> probes;
  std::vector<double> fit_radii;  ///< decreasing
  double slack = 0.0;             ///< eta
  double kappa = 0.0;             ///< K-exclusion band
};

/// Slack eta = 10 h osc(u)/d^2 (10 h for constant data); scales with u.
inline double default_slack(const SampledFunction& u) {
  const double osc = u.max() - u.min();
  const double d = u.diam();
  return osc > 0.0 ? 10.0 * u.h_max() * osc / (d * d) : 10.0 * u.h_max();
}

/// K-exclusion band max(2h, 1e-3 * sup of the simplex gradients).
inline double default_kappa(const SampledFunction& u) {
  double gs = 0.0;
  for (const auto& g : gradient(u)) gs = std::max(gs, g.norm());
  return std::max(2.0 * u.h_max(), 1e-3 * gs);
}

namespace detail {

// Least-squares u(x+z) - u(x) ~ p.z + X:z z/2 over offsets accepted by `keep`.
template <typename Keep>
Jet quadratic_fit(const SampledFunction& u, std::size_t node, double radius, Keep&& keep) {
  const int n = u.dim();
  const int cols = n + n * (n + 1) / 2;
  std::vector<std::array<int, kMaxDim>> offs;
  for (const auto& o : ball_offsets(u, radius))
    if (keep(o)) offs.push_back(o);
  Eigen::MatrixXd A(static_cast<Eigen::Index>(offs.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(offs.size()));
  for (std::size_t r = 0; r < offs.size(); ++r) {
    const Vec z = offset_vec(u, offs[r]);
    const auto i = static_cast<Eigen::Index>(r);
    int c = 0;
    for (int d = 0; d < n; ++d) A(i, c++) = z(d);
    for (int a = 0; a < n; ++a)
      for (int bb = a; bb < n; ++bb) A(i, c++) = a == bb ? 0.5 * z(a) * z(a) : z(a) * z(bb);
    b(i) = u[shifted(u, node, offs[r])] - u[node];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (offs.size() < static_cast<std::size_t>(cols) || qr.rank() < cols)
    throw std::domain_error("generate_probes: degenerate quadratic fit");
  const Eigen::VectorXd s = qr.solve(b);
  Vec p(n);
  Mat X(n, n);
  int c = 0;
  for (int d = 0; d < n; ++d) p(d) = s(c++);
  for (int a = 0; a < n; ++a)
    for (int bb = a; bb < n; ++bb) X(a, bb) = X(bb, a) = s(c++);
  return Jet(p, X);
}

// Slope of the one-sided fit u(x + k h e_d) - u(x) ~ s k h + c (k h)^2 / 2, k = 1..m.
inline double one_sided_slope(const SampledFunction& u, std::size_t node, int axis, int dir, int m) {
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  const double h = u.h(axis);
  auto mi = u.multi_index(node);
  for (int k = 1; k <= m; ++k) {
    const double z = dir * k * h;
    A(k - 1, 0) = z;
    A(k - 1, 1) = 0.5 * z * z;
    auto o = mi;
    o[static_cast<std::size_t>(axis)] += dir * k;
    b(k - 1) = u[u.index(o)] - u[node];
  }
  return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace detail

/// Candidate jets at an interior node: quadratic fits on shrinking balls,
/// one-sided slopes and their convex combinations, an X ladder X + sI with
/// s in {+-eta, +-2eta, +-4eta, +-8eta}, scaled curvatures and small p shifts.
/// Gradients within kappa of K are flagged K-excluded.
inline ProbeSet generate_probes(const SampledFunction& u, std::size_t node, const SingularSet& K,
                                std::vector<double> fit_radii = {}, double slack = -1.0, double kappa = -1.0) {
  const double h = u.h_max();
  if (fit_radii.empty()) fit_radii = {4.0 * h, 3.0 * h, 2.0 * h};
  std::sort(fit_radii.begin(), fit_radii.end(), std::greater<>());
  if (u.on_boundary(node) || u.boundary_distance(node) < fit_radii.front() * (1.0 - 1e-12))
    throw std::domain_error("generate_probes: node too close to the boundary");
  ProbeSet set;
  set.fit_radii = fit_radii;
  set.slack = slack >= 0.0 ? slack : default_slack(u);
  set.kappa = kappa >= 0.0 ? kappa : default_kappa(u);
  const int n = u.dim();
  const double eta = set.slack;

  std::vector<Jet> fits;
  for (double r : fit_radii) fits.push_back(detail::quadratic_fit(u, node, r, [](const auto&) { return true; }));

  // Gradient candidates.
  std::vector<std::pair<Vec, std::string>> ps;
  for (std::size_t i = 0; i < fits.size(); ++i) ps.emplace_back(fits[i].p, "fit" + std::to_string(i));
  const int m = std::max(2, static_cast<int>(std::lround(fit_radii.front() / h)));
  std::vector<std::vector<double>> axis_slopes(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d) {
    const double sm = detail::one_sided_slope(u, node, d, -1, m);
    const double sp = detail::one_sided_slope(u, node, d, +1, m);
    auto& c = axis_slopes[static_cast<std::size_t>(d)];
    for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) c.push_back(lam * sp + (1.0 - lam) * sm);
  }
  {
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      Vec p(n);
      for (int d = 0; d < n; ++d) p(d) = axis_slopes[static_cast<std::size_t>(d)][idx[static_cast<std::size_t>(d)]];
      ps.emplace_back(p, "one_sided");
      int d = 0;
      while (d < n && ++idx[static_cast<std::size_t>(d)] == 5) idx[static_cast<std::size_t>(d++)] = 0;
      if (d == n) break;
    }
  }
  const double shift = 0.25 * set.kappa;
  for (int d = 0; d < n; ++d)
    for (double s : {-shift, shift}) {
      Vec p = fits.back().p;
      p(d) += s;
      ps.emplace_back(p, "shift");
    }
  // Merge duplicates (smooth data makes many candidates coincide).
  std::vector<std::pair<Vec, std::string>> uniq;
  for (auto& c : ps) {
    bool dup = false;
    for (const auto& q : uniq)
      if ((q.first - c.first).norm() <= 1e-12 * (1.0 + c.first.norm())) dup = true;
    if (!dup) uniq.push_back(std::move(c));
  }

  // Curvature candidates.
  std::vector<Mat> Xs;
  for (const auto& f : fits) Xs.push_back(f.X);
  const Mat& X0 = fits.front().X;
  for (double s : {0.5, 0.25, 0.0}) Xs.push_back(s * X0);
  for (double s : {1.0, 2.0, 4.0, 8.0})
    for (double sg : {-1.0, 1.0}) Xs.push_back(X0 + sg * s * eta * Mat::Identity(n, n));

  for (const auto& [p, origin] : uniq) {
    const bool excluded = K.distance(p) <= set.kappa;
    for (const auto& X : Xs) set.probes.push_back({Jet(p, X), excluded, origin});
  }
  return set;
}

enum class VerdictKind { pass, fail, vacuous };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::pass: return "pass";
    case VerdictKind::fail: return "fail";
    case VerdictKind::vacuous: return "vacuous";
  }
  return "?";
}

struct SideVerdict {
  VerdictKind kind = VerdictKind::vacuous;
  std::size_t admissible = 0;  ///< touching probes with p off K
  double worst = std::numeric_limits<double>::infinity();  ///< smallest margin
  std::optional<Jet> witness;
};

struct Verdict {
  VerdictKind kind = VerdictKind::vacuous;
  SideVerdict sub, super;
};

/// Feeble viscosity test at one node. Subsolution side: every touching
/// superjet with p off K has G(p, X + 2 eta I) >= -tol. Supersolution side:
/// every touching subjet has G(p, X - 2 eta I) <= tol. The 2 eta shift is the
/// curvature the touch slack allows.
inline Verdict feeble_check(const SampledFunction& u, const Hamiltonian& H, std::size_t node, const ProbeSet& probes,
                            double tol) {
  Verdict v;
  // touching on the largest ball implies the smaller ones
  const auto ball = detail::make_ball(u, node, probes.fit_radii.front());
  const int n = u.dim();
  const Mat shift = 2.0 * probes.slack * Mat::Identity(n, n);
  for (const auto& pr : probes.probes) {
    if (pr.k_excluded) continue;
    if (detail::touch(u, node, ball, pr.jet, probes.slack, +1)) {
      const double margin = G(H, Jet(pr.jet.p, pr.jet.X + shift)) + tol;
      ++v.sub.admissible;
      if (margin < v.sub.worst) {
        v.sub.worst = margin;
        if (margin < 0.0) v.sub.witness = pr.jet;
      }
    }
    if (detail::touch(u, node, ball, pr.jet, probes.slack, -1)) {
      const double margin = tol - G(H, Jet(pr.jet.p, pr.jet.X - shift));
      ++v.super.admissible;
      if (margin < v.super.worst) {
        v.super.worst = margin;
        if (margin < 0.0) v.super.witness = pr.jet;
      }
    }
  }
  for (auto* s : {&v.sub, &v.super}) {
    if (s->admissible == 0) s->kind = VerdictKind::vacuous;
    else s->kind = s->worst >= 0.0 ? VerdictKind::pass : VerdictKind::fail;
  }
  if (v.sub.kind == VerdictKind::fail || v.super.kind == VerdictKind::fail) v.kind = VerdictKind::fail;
  else if (v.sub.kind == VerdictKind::vacuous && v.super.kind == VerdictKind::vacuous) v.kind = VerdictKind::vacuous;
  else v.kind = VerdictKind::pass;
  return v;
}

struct RegionReport {
  std::size_t pass = 0, fail = 0, vacuous = 0;
  std::size_t sub_fail = 0, super_fail = 0;
  double worst_sub = std::numeric_limits<double>::infinity();
  double worst_super = std::numeric_limits<double>::infinity();
  double slack = 0.0, kappa = 0.0, tol = 0.0;
  struct Witness {
    std::size_t node;
    std::string side;
    Jet jet;
    double margin;
  };
  std::vector<Witness> witnesses;  ///< first max_listed failures
  std::vector<VerdictKind> verdicts;  ///< per node, vacuous outside the region
  static constexpr std::size_t max_listed = 20;

  bool ok() const { return fail == 0; }
};

/// feeble_check at every node at distance >= inner_margin (and >= the
/// largest fit radius) from the boundary.
inline RegionReport verify_region(const SampledFunction& u, const Hamiltonian& H, double inner_margin, double tol,
                                  std::vector<double> fit_radii = {}) {
  if (u.dim() != H.dim()) throw std::invalid_argument("verify_region: dimension mismatch");
  const double h = u.h_max();
  if (fit_radii.empty()) fit_radii = {4.0 * h, 3.0 * h, 2.0 * h};
  const double reach = *std::max_element(fit_radii.begin(), fit_radii.end());
  RegionReport rep;
  rep.slack = default_slack(u);
  rep.kappa = default_kappa(u);
  rep.tol = tol;
  rep.verdicts.assign(u.size(), VerdictKind::vacuous);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double bd = u.boundary_distance(k);
    if (u.on_boundary(k) || bd < std::max(inner_margin, reach) * (1.0 - 1e-12)) continue;
    const auto probes = generate_probes(u, k, H.singular_set(), fit_radii, rep.slack, rep.kappa);
    const auto v = feeble_check(u, H, k, probes, tol);
    rep.verdicts[k] = v.kind;
    switch (v.kind) {
      case VerdictKind::pass: ++rep.pass; break;
      case VerdictKind::fail: ++rep.fail; break;
      case VerdictKind::vacuous: ++rep.vacuous; break;
    }
    if (v.sub.kind == VerdictKind::fail) ++rep.sub_fail;
    if (v.super.kind == VerdictKind::fail) ++rep.super_fail;
    rep.worst_sub = std::min(rep.worst_sub, v.sub.worst);
    rep.worst_super = std::min(rep.worst_super, v.super.worst);
    for (const auto* s : {&v.sub, &v.super})
      if (s->witness && rep.witnesses.size() < RegionReport::max_listed)
        rep.witnesses.push_back({k, s == &v.sub ? "sub" : "super", *s->witness, s->worst});
  }
  return rep;
}

inline void to_json(nlohmann::json& j, const Jet& jet) {
  std::vector<double> p(jet.p.data(), jet.p.data() + jet.p.size());
  std::vector<std::vector<double>> X;
  for (Eigen::Index r = 0; r < jet.X.rows(); ++r) {
    X.emplace_back();
    for (Eigen::Index c = 0; c < jet.X.cols(); ++c) X.back().push_back(jet.X(r, c));
  }
  j = {{"p", p}, {"X", X}};
}

inline void to_json(nlohmann::json& j, const RegionReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j = {{"pass", r.pass},         {"fail", r.fail},           {"vacuous", r.vacuous},
       {"sub_fail", r.sub_fail}, {"super_fail", r.super_fail}, {"slack", r.slack},
       {"kappa", r.kappa},       {"tol", r.tol}};
  j["worst_sub_margin"] = finite_or_null(r.worst_sub);
  j["worst_super_margin"] = finite_or_null(r.worst_super);
  auto& w = j["witnesses"] = nlohmann::json::array();
  for (const auto& x : r.witnesses) w.push_back({{"node", x.node}, {"side", x.side}, {"jet", x.jet}, {"margin", x.margin}});
}

}  // namespace flatvisc
