#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "hamiltonian.hpp"
#include "types.hpp"

namespace flatvisc {

struct Coercivity {
  double s = 0.0;
  double c = 0.0;
};

/// Dirichlet problem: minimise the discrete energy with u = b on the boundary.
class DirichletProblem {
 public:
  DirichletProblem(Hamiltonian H, SampledFunction boundary, std::optional<Coercivity> coercivity = std::nullopt)
      : H_(std::move(H)), b_(std::move(boundary)), coercivity_(coercivity) {
    if (H_.dim() != b_.dim()) throw std::invalid_argument("DirichletProblem: dimension mismatch");
    if (coercivity_ && !(coercivity_->s > b_.dim() && coercivity_->c > 0.0))
      throw std::invalid_argument("DirichletProblem: coercivity needs s > n and c > 0");
  }

  /// Samples b on the whole grid; only the boundary values are used as data.
  DirichletProblem(Hamiltonian H, const Box& box, double h, const std::function<double(const Vec&)>& b,
                   std::optional<Coercivity> coercivity = std::nullopt)
      : DirichletProblem(std::move(H), SampledFunction::sample(box, h, b), coercivity) {}

  const Hamiltonian& H() const { return H_; }
  const SampledFunction& boundary() const { return b_; }
  const std::optional<Coercivity>& coercivity() const { return coercivity_; }

  /// Boundary values with a linear (1D) or Coons-patch (2D) interior.
  SampledFunction initial_guess() const {
    const auto& b = b_;
    std::vector<double> v(b.values());
    if (b.dim() == 1) {
      const int n = b.nodes(0);
      for (int i = 1; i + 1 < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        v[static_cast<std::size_t>(i)] = (1.0 - s) * b[0] + s * b[static_cast<std::size_t>(n - 1)];
      }
    } else if (b.dim() == 2) {
      const int nx = b.nodes(0), ny = b.nodes(1);
      auto at = [&](int i, int j) { return b[static_cast<std::size_t>(i + nx * j)]; };
      for (int j = 1; j + 1 < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i) {
          const double s = static_cast<double>(i) / (nx - 1), t = static_cast<double>(j) / (ny - 1);
          const double edges = (1 - s) * at(0, j) + s * at(nx - 1, j) + (1 - t) * at(i, 0) + t * at(i, ny - 1);
          const double corners = (1 - s) * (1 - t) * at(0, 0) + s * (1 - t) * at(nx - 1, 0) +
                                 (1 - s) * t * at(0, ny - 1) + s * t * at(nx - 1, ny - 1);
          v[static_cast<std::size_t>(i + nx * j)] = edges - corners;
        }
    } else {
      throw std::invalid_argument("DirichletProblem: only 1D and 2D problems are solved");
    }
    return b.with_values(std::move(v));
  }

 private:
  Hamiltonian H_;
  SampledFunction b_;
  std::optional<Coercivity> coercivity_;
};

/// Bump (1 - |x - c|^2 / r^2)^2 on the grid; C^1 with compact support.
/// Samples are kept sparse as (node, value) pairs.
struct TestFunction {
  std::size_t center = 0;
  double radius = 0.0;
  std::vector<std::pair<std::size_t, double>> samples;

  static double profile(double q) { return q < 1.0 ? (1.0 - q) * (1.0 - q) : 0.0; }

  static TestFunction bump(const SampledFunction& shape, std::size_t center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("TestFunction: radius must be positive");
    if (shape.on_boundary(center) || shape.boundary_distance(center) <= radius)
      throw std::domain_error("TestFunction: support touches the boundary");
    TestFunction phi{center, radius, {}};
    const auto c = shape.multi_index(center);
    std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < shape.dim(); ++d) {
      const auto id = static_cast<std::size_t>(d);
      const int w = static_cast<int>(std::ceil(radius / shape.h(d)));
      lo[id] = c[id] - w;
      hi[id] = c[id] + w;
    }
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const std::size_t k = shape.index({i, j, 0});
        const double v = phi.at(shape, k);
        if (v > 0.0) phi.samples.emplace_back(k, v);
      }
    return phi;
  }

  /// Value at any node of a grid of the same shape.
  double at(const SampledFunction& shape, std::size_t node) const {
    const double q = (shape.coord(node) - shape.coord(center)).squaredNorm() / (radius * radius);
    return profile(q);
  }

  SampledFunction dense(const SampledFunction& shape) const {
    std::vector<double> v(shape.size(), 0.0);
    for (const auto& [k, x] : samples) v[k] = x;
    return shape.with_values(std::move(v));
  }

  double l1() const {
    double s = 0.0;
    for (const auto& kv : samples) s += std::abs(kv.second);
    return s;
  }
};

/// Bumps at every interior node whose support fits, for each radius.
inline std::vector<TestFunction> bump_basis(const SampledFunction& shape, const std::vector<double>& radii) {
  std::vector<TestFunction> out;
  for (double r : radii)
    for (std::size_t k = 0; k < shape.size(); ++k)
      if (!shape.on_boundary(k) && shape.boundary_distance(k) > r * (1.0 + 1e-12))
        out.push_back(TestFunction::bump(shape, k, r));
  return out;
}

namespace detail {

// Quintic smoothstep on [0, 1] and its first two derivatives.
inline double smoothstep(double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
inline double smoothstep1(double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : 30.0 * x * x * (1.0 - x) * (1.0 - x); }
inline double smoothstep2(double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }

}  // namespace detail

/// F^delta = zeta(|a|/delta) F with zeta = 0 below 1/2 and 1 above 1.
inline Hamiltonian mollify(const Hamiltonian& H, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("mollify: delta must lie in (0, 1)");
  if (H.singular_set().kind != SingularSet::Kind::origin)
    throw std::invalid_argument("mollify: needs K = {0}");
  auto base = std::make_shared<const Hamiltonian>(H);
  // x = 2 r / delta - 1 maps [delta/2, delta] onto [0, 1].
  const double k = 2.0 / delta;
  CustomRadial m;
  m.name = H.name() + "_mollified";
  m.laplacian_bounded_at_infinity = H.laplacian_bounded_at_infinity();
  m.f = [base, delta, k](double r) {
    if (r <= 0.5 * delta) return 0.0;
    return detail::smoothstep(k * r - 1.0) * base->f(r);
  };
  m.df = [base, delta, k](double r) {
    if (r <= 0.5 * delta) return 0.0;
    const double x = k * r - 1.0;
    return k * detail::smoothstep1(x) * base->f(r) + detail::smoothstep(x) * base->df(r);
  };
  m.d2f = [base, delta, k](double r) {
    if (r <= 0.5 * delta) return 0.0;
    const double x = k * r - 1.0;
    return k * k * detail::smoothstep2(x) * base->f(r) + 2.0 * k * detail::smoothstep1(x) * base->df(r) +
           detail::smoothstep(x) * base->d2f(r);
  };
  return Hamiltonian(H.dim(), m, SingularSet::empty(), H.dimensional_constant());
}

struct MinimizeOptions {
  std::size_t max_iter = 200000;
  double grad_tol = -1.0;  ///< negative: 1e-8 * (energy / volume) * h^n
  std::optional<std::vector<double>> initial;
};

struct MinimizeResult {
  SampledFunction u;
  bool converged = false;
  std::size_t iterations = 0;
  double energy = 0.0;
  double grad_max = 0.0;  ///< max interior component of the energy gradient
  double grad_tol = 0.0;
  std::vector<double> energies;  ///< energy after every accepted step
  std::string stop;              ///< converged, max_iter, stalled or step_underflow
};

namespace detail {

inline double energy_noise(double E) { return 1e-14 * std::max(std::abs(E), 1e-300); }

inline double interior_norm2(const std::vector<double>& g, const std::vector<bool>& fixed) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!fixed[i]) s += g[i] * g[i];
  return s;
}

inline double interior_max(const std::vector<double>& g, const std::vector<bool>& fixed) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!fixed[i]) m = std::max(m, std::abs(g[i]));
  return m;
}

}  // namespace detail

/// Gradient components carry a cell volume h^n, so the tolerance does too.
inline double default_grad_tol(const SampledFunction& shape, double energy_scale) {
  return 1e-8 * std::max(energy_scale, 1e-12) / shape.box().volume() * std::pow(shape.h_max(), shape.dim());
}

/// Monotone accelerated gradient descent with backtracking and restart on
/// the discrete energy. Boundary nodes stay at b. Accepted energies never
/// increase by more than 1e-14 relative, the rounding level of the sum;
/// inside that band a step must shrink the gradient to count.
inline MinimizeResult minimize(const DirichletProblem& prob, const Hamiltonian& H, const MinimizeOptions& opts = {}) {
  const auto& b = prob.boundary();
  const SimplexMesh mesh(b);
  const auto fixed = b.boundary_mask();
  std::vector<double> x = opts.initial ? *opts.initial : prob.initial_guess().values();
  if (x.size() != b.size()) throw std::invalid_argument("minimize: initial guess has the wrong size");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (fixed[i]) x[i] = b[i];

  std::vector<double> gx, gy, gn;
  double Ex = energy_and_gradient(x, mesh, H, gx);
  const double tol = opts.grad_tol >= 0.0 ? opts.grad_tol : default_grad_tol(b, Ex);
  MinimizeResult res{b, false, 0, Ex, detail::interior_max(gx, fixed), tol, {Ex}, {}};

  std::vector<double> y = x, xn(x.size());
  double Ey = Ex;
  gy = gx;
  double t = 1.0, L = 1.0;
  int failures = 0;
  double gx2 = detail::interior_norm2(gx, fixed);
  for (std::size_t it = 0; it < opts.max_iter && res.grad_max > tol; ++it) {
    // Energy differences below this are rounding noise.
    const double noise = detail::energy_noise(Ey);
    double g2 = 0.0;
    for (std::size_t i = 0; i < gy.size(); ++i)
      if (!fixed[i]) g2 += gy[i] * gy[i];
    double En = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < x.size(); ++i) xn[i] = fixed[i] ? b[i] : y[i] - gy[i] / L;
      En = energy_and_gradient(xn, mesh, H, gn);
      double dg2 = 0.0;
      for (std::size_t i = 0; i < gn.size(); ++i)
        if (!fixed[i]) dg2 += (gn[i] - gy[i]) * (gn[i] - gy[i]);
      // Sufficient decrease plus a local Lipschitz bound |gn - gy| <= L |xn - y| = |gy|.
      if (En <= Ey - 0.5 * g2 / L + noise && dg2 <= g2) break;
      L *= 2.0;
      if (L > 1e300) break;
    }
    res.iterations = it + 1;
    if (!(L <= 1e300)) {
      res.stop = "step_underflow";
      break;
    }
    const double gn_max = detail::interior_max(gn, fixed);
    const double gn2 = detail::interior_norm2(gn, fixed);
    // Inside the noise band the energy cannot rank iterates; gradient steps
    // on a convex smooth energy shrink |g|_2, so a plain step must do that.
    const bool in_band = En <= Ex + detail::energy_noise(Ex);
    const bool progress = En < Ex || (in_band && (t > 1.0 || gn2 < gx2));
    if (!progress) {
      // Restart from x; a failed plain step also shortens the step.
      if (failures > 0) L *= 2.0;
      if (++failures > 60) {
        res.stop = "stalled";
        break;
      }
      t = 1.0;
      y = x;
      Ey = Ex;
      gy = gx;
      continue;
    }
    failures = 0;
    double ascent = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!fixed[i]) ascent += gy[i] * (xn[i] - x[i]);
    if (ascent > 0.0) t = 1.0;  // momentum points uphill
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = fixed[i] ? b[i] : xn[i] + beta * (xn[i] - x[i]);
    x.swap(xn);
    gx.swap(gn);
    Ex = En;
    gx2 = gn2;
    t = tn;
    res.energies.push_back(Ex);
    res.grad_max = gn_max;
    if (beta == 0.0) {
      Ey = Ex;
      gy = gx;
    } else {
      Ey = energy_and_gradient(y, mesh, H, gy);
    }
    L *= 0.9;
  }
  res.converged = res.grad_max <= tol;
  if (res.converged) res.stop = "converged";
  else if (res.stop.empty()) res.stop = "max_iter";
  res.energy = Ex;
  res.u = b.with_values(std::move(x));
  return res;
}

inline MinimizeResult minimize(const DirichletProblem& prob, const MinimizeOptions& opts = {}) {
  return minimize(prob, prob.H(), opts);
}

struct ContinuationStage {
  double delta = 0.0;
  double energy_stage = 0.0;  ///< energy with F^delta
  double energy = 0.0;        ///< energy with F
  std::size_t iterations = 0;
  bool converged = false;
};

struct ContinuationResult {
  MinimizeResult result;
  std::vector<ContinuationStage> stages;
};

inline const std::vector<double>& default_delta_schedule() {
  static const std::vector<double> s{0.1, 0.03, 0.01, 0.003, 0.0};
  return s;
}

/// Minimise with F^delta along the schedule, warm-starting each stage; a
/// zero entry means F itself and must come last.
inline ContinuationResult continuation_minimize(const DirichletProblem& prob,
                                                const std::vector<double>& schedule = default_delta_schedule(),
                                                MinimizeOptions opts = {}) {
  if (schedule.empty()) throw std::invalid_argument("continuation_minimize: empty schedule");
  ContinuationResult out;
  const double tol = opts.grad_tol;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const double delta = schedule[s];
    if (delta == 0.0 && s + 1 != schedule.size())
      throw std::invalid_argument("continuation_minimize: delta = 0 must be the last stage");
    if (s > 0 && !(delta < schedule[s - 1])) throw std::invalid_argument("continuation_minimize: schedule must decrease");
    const Hamiltonian Hs = delta > 0.0 ? mollify(prob.H(), delta) : prob.H();
    opts.grad_tol = tol;
    auto r = minimize(prob, Hs, opts);
    opts.initial = r.u.values();
    out.stages.push_back({delta, r.energy, energy(r.u, prob.H()), r.iterations, r.converged});
    out.result = std::move(r);
  }
  if (schedule.back() != 0.0) {
    // Finish on F so the optimality contract refers to the real energy.
    auto r = minimize(prob, prob.H(), opts);
    out.stages.push_back({0.0, r.energy, r.energy, r.iterations, r.converged});
    out.result = std::move(r);
  }
  return out;
}

/// sum over simplices of F_A(grad u) . grad phi * vol.
namespace detail {

// `scratch` is all zeros of size u.size() on entry and on exit.
inline double weak_residual(const SampledFunction& u, const Hamiltonian& H, const TestFunction& phi,
                            const SimplexMesh& mesh, std::vector<double>& scratch) {
  if (phi.center >= u.size() || u.on_boundary(phi.center) || u.boundary_distance(phi.center) <= phi.radius)
    throw std::domain_error("weak_residual: support touches the boundary");
  const auto c = u.multi_index(phi.center);
  std::array<int, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
  for (int d = 0; d < u.dim(); ++d) {
    const auto id = static_cast<std::size_t>(d);
    const int w = static_cast<int>(std::ceil(phi.radius / u.h(d)));
    lo[id] = c[id] - w - 1;
    hi[id] = c[id] + w;
  }
  for (const auto& [k, v] : phi.samples) scratch[k] = v;
  double r = 0.0;
  for (std::size_t k : mesh.simplices_in_box(lo, hi)) {
    const Vec gphi = mesh.gradient(scratch, k);
    if (gphi.squaredNorm() == 0.0) continue;
    r += mesh[k].vol * H.grad(mesh.gradient(u.values(), k)).dot(gphi);
  }
  for (const auto& kv : phi.samples) scratch[kv.first] = 0.0;
  return r;
}

}  // namespace detail

inline double weak_residual(const SampledFunction& u, const Hamiltonian& H, const TestFunction& phi) {
  std::vector<double> scratch(u.size(), 0.0);
  return detail::weak_residual(u, H, phi, SimplexMesh(u), scratch);
}

/// Residuals of every basis function, each divided by its l1 norm.
inline std::vector<double> weak_residuals(const SampledFunction& u, const Hamiltonian& H,
                                          const std::vector<TestFunction>& basis) {
  const SimplexMesh mesh(u);
  std::vector<double> scratch(u.size(), 0.0), out;
  out.reserve(basis.size());
  for (const auto& phi : basis) out.push_back(detail::weak_residual(u, H, phi, mesh, scratch) / phi.l1());
  return out;
}

/// F(A) >= c |A|^s - 1/c on log-spaced radii in [1e-3, rmax] and at 0.
inline bool coercivity_check(const Hamiltonian& H, double s, double c, double rmax, std::size_t samples = 400) {
  if (!(c > 0.0) || !(rmax > 1e-3)) throw std::invalid_argument("coercivity_check: need c > 0 and rmax > 1e-3");
  if (H.f(0.0) < -1.0 / c) return false;
  const double l0 = std::log(1e-3), l1 = std::log(rmax);
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(samples - 1));
    if (H.f(r) < c * std::pow(r, s) - 1.0 / c) return false;
  }
  return true;
}

/// ||Du||_{L^r(B_R)} / ||u||_{L^inf(B_2R)} on balls about the box centre.
/// Simplices count when their centroid lies in B_R.
inline double caccioppoli_diagnostic(const SampledFunction& u, const Hamiltonian& H, double r_exp, double R) {
  if (u.dim() != H.dim()) throw std::invalid_argument("caccioppoli_diagnostic: dimension mismatch");
  if (!(r_exp > 1.0) || !(R > 0.0)) throw std::invalid_argument("caccioppoli_diagnostic: need r > 1 and R > 0");
  const auto& box = u.box();
  Vec c(u.dim());
  for (int d = 0; d < u.dim(); ++d) {
    const auto id = static_cast<std::size_t>(d);
    c(d) = 0.5 * (box.lo[id] + box.hi[id]);
    if (c(d) - 2.0 * R < box.lo[id] - 1e-12 || c(d) + 2.0 * R > box.hi[id] + 1e-12)
      throw std::domain_error("caccioppoli_diagnostic: B_2R leaves the domain");
  }
  double sup = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    if ((u.coord(k) - c).norm() <= 2.0 * R * (1.0 + 1e-12)) sup = std::max(sup, std::abs(u[k]));
  const SimplexMesh mesh(u);
  double integral = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const auto& s = mesh[k];
    Vec centroid = Vec::Zero(u.dim());
    std::vector<std::size_t> verts;
    for (int d = 0; d < u.dim(); ++d) {
      verts.push_back(s.plus[static_cast<std::size_t>(d)]);
      verts.push_back(s.minus[static_cast<std::size_t>(d)]);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    for (auto v : verts) centroid += u.coord(v);
    centroid /= static_cast<double>(verts.size());
    if ((centroid - c).norm() <= R) integral += s.vol * std::pow(mesh.gradient(u.values(), k).norm(), r_exp);
  }
  const double num = std::pow(integral, 1.0 / r_exp);
  if (num == 0.0) return 0.0;
  if (sup == 0.0) throw std::domain_error("caccioppoli_diagnostic: u vanishes on B_2R");
  return num / sup;
}

struct MinimalityCertificate {
  double worst_gain = std::numeric_limits<double>::infinity();  ///< min of E(u + v) - E(u)
  std::size_t trials = 0;
  bool pass = false;
};

/// Random perturbations vanishing on the boundary, amplitudes 10^-1..10^-6
/// relative to the sup norm of u.
inline MinimalityCertificate minimality_certificate(const SampledFunction& u, const Hamiltonian& H,
                                                    std::size_t trials = 100, std::uint64_t seed = 1,
                                                    double slack = 1e-9) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const SimplexMesh mesh(u);
  const auto fixed = u.boundary_mask();
  const double E0 = energy(u.values(), mesh, H);
  const double scale = std::max(u.sup_norm(), 1e-12);
  MinimalityCertificate cert;
  std::vector<double> w(u.size());
  for (std::size_t t = 0; t < trials; ++t) {
    const double amp = scale * std::pow(10.0, -1.0 - static_cast<double>(t % 6));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] + (fixed[i] ? 0.0 : amp * unif(rng));
    cert.worst_gain = std::min(cert.worst_gain, energy(w, mesh, H) - E0);
    ++cert.trials;
  }
  cert.pass = cert.worst_gain >= -slack;
  return cert;
}

/// max over random pairs of F_A(a).(b - a) - (F(b) - F(a)), relative to
/// 1 + |F(a)| + |F(b)|; non-positive up to rounding for convex F.
inline double convexity_slack(const Hamiltonian& H, std::size_t pairs = 1000, std::uint64_t seed = 1,
                              double radius = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  double worst = -std::numeric_limits<double>::infinity();
  Vec a(H.dim()), b(H.dim());
  for (std::size_t k = 0; k < pairs; ++k) {
    for (int d = 0; d < H.dim(); ++d) {
      a(d) = unif(rng);
      b(d) = unif(rng);
    }
    const double Fa = H.eval(a), Fb = H.eval(b);
    worst = std::max(worst, (H.grad(a).dot(b - a) - (Fb - Fa)) / (1.0 + std::abs(Fa) + std::abs(Fb)));
  }
  return worst;
}

/// min over random pairs of (F_A(b) - F_A(a)).(b - a) / |b - a|^q.
inline double monotonicity_ratio(const Hamiltonian& H, double q, std::size_t pairs = 1000, std::uint64_t seed = 1,
                                 double radius = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  double worst = std::numeric_limits<double>::infinity();
  Vec a(H.dim()), b(H.dim());
  for (std::size_t k = 0; k < pairs; ++k) {
    for (int d = 0; d < H.dim(); ++d) {
      a(d) = unif(rng);
      b(d) = unif(rng);
    }
    const double n = (b - a).norm();
    if (n == 0.0) continue;
    worst = std::min(worst, (H.grad(b) - H.grad(a)).dot(b - a) / std::pow(n, q));
  }
  return worst;
}

/// Named boundary data; `exact` is set when the data is itself a solution
/// for every p-Dirichlet energy (affine) or for p = 2 (harmonic).
struct BoundaryData {
  std::string id;
  std::function<double(const Vec&)> b;
  bool harmonic = false;
  bool affine = false;
};

inline BoundaryData boundary_data(const std::string& id) {
  if (id == "affine_x") return {id, [](const Vec& x) { return x(0); }, true, true};
  if (id == "zero") return {id, [](const Vec&) { return 0.0; }, true, true};
  if (id == "saddle")
    return {id, [](const Vec& x) {
              if (x.size() < 2) throw std::invalid_argument("saddle: needs two dimensions");
              return x(0) * x(0) - x(1) * x(1);
            }, true, false};
  if (id == "harmonic_exp")
    return {id, [](const Vec& x) {
              if (x.size() < 2) throw std::invalid_argument("harmonic_exp: needs two dimensions");
              return std::exp(x(0)) * std::sin(x(1));
            }, true, false};
  if (id == "abs_x") return {id, [](const Vec& x) { return std::abs(x(0)); }, false, false};
  throw std::invalid_argument("unknown boundary data '" + id + "'");
}

}  // namespace flatvisc
