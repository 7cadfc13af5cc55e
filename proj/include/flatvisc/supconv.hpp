#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "flatness.hpp"
#include "grid.hpp"
#include "types.hpp"

namespace flatvisc {

/// The eps with localization radius r: Theta(r^2) / (4 |u|).
inline double eps_for_radius(const FlatKernel& kernel, double sup_norm, double r) {
  if (!(sup_norm > 0.0) || !(r > 0.0)) throw std::invalid_argument("eps_for_radius: need |u| > 0 and r > 0");
  return kernel.theta(r * r) / (4.0 * sup_norm);
}

/// sqrt(Theta^{-1}(4 |u| eps)), clamped to the kernel diameter once the
/// argument leaves the range Theta takes on [0, d^2].
inline double localization_radius(const FlatKernel& kernel, double sup_norm, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("localization_radius: eps must be positive");
  if (sup_norm < 0.0) throw std::invalid_argument("localization_radius: negative sup norm");
  const double y = 4.0 * sup_norm * eps;
  if (y <= 0.0) return 0.0;
  const double d = kernel.diam;
  if (y >= kernel.theta(d * d)) return d;
  return std::min(d, std::sqrt(kernel.theta.invert(y)));
}

struct ConvolutionResult {
  SampledFunction u_eps;
  std::vector<std::size_t> argmax;  ///< node index of the maximiser x^eps
  std::vector<bool> tied;           ///< more than one maximiser on the grid
  double eps = 0.0;
  double loc_radius = 0.0;          ///< rho(eps)
  double search_radius = 0.0;
  bool radius_floored = false;      ///< rho(eps) was below one cell
  bool inf = false;                 ///< inf-convolution (stored as -(-u)^eps)
  std::shared_ptr<const FlatKernel> kernel;

  std::size_t tie_count() const { return static_cast<std::size_t>(std::count(tied.begin(), tied.end(), true)); }
};

namespace detail {

inline ConvolutionResult sup_convolve_impl(const SampledFunction& u, std::shared_ptr<const FlatKernel> kernel,
                                           double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sup_convolve: eps must be positive");
  if (!kernel) throw std::invalid_argument("sup_convolve: null kernel");
  if (kernel->diam + 1e-12 < u.diam())
    throw std::invalid_argument("sup_convolve: kernel diameter does not cover the domain");
  const int n = u.dim();
  if (n > 2) throw std::invalid_argument("sup_convolve: only 1D and 2D grids");

  ConvolutionResult res;
  res.eps = eps;
  res.kernel = kernel;
  res.loc_radius = localization_radius(*kernel, u.sup_norm(), eps);
  const double hmax = u.h_max();
  res.radius_floored = res.loc_radius < hmax;
  res.search_radius = std::max(res.loc_radius, hmax) + hmax;

  const double hx = u.h(0), hy = n == 2 ? u.h(1) : 1.0;
  const int nx = u.nodes(0), ny = n == 2 ? u.nodes(1) : 1;
  const double r = res.search_radius, r2 = r * r;
  const int Rx = std::min(nx - 1, static_cast<int>(std::floor(r / hx + 1e-9)));
  const int Ry = n == 2 ? std::min(ny - 1, static_cast<int>(std::floor(r / hy + 1e-9))) : 0;

  // Penalty Theta(|z|^2)/(2 eps) and squared distance per |offset|; +inf outside the ball.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pen(static_cast<std::size_t>((Rx + 1) * (Ry + 1)), inf);
  std::vector<double> dist2(pen.size(), inf);
  std::vector<int> row_reach(static_cast<std::size_t>(Ry + 1), -1);
  for (int oy = 0; oy <= Ry; ++oy) {
    for (int ox = 0; ox <= Rx; ++ox) {
      const double d2 = (ox * hx) * (ox * hx) + (n == 2 ? (oy * hy) * (oy * hy) : 0.0);
      if (d2 > r2 * (1.0 + 1e-12)) continue;
      const auto id = static_cast<std::size_t>(oy * (Rx + 1) + ox);
      dist2[id] = d2;
      pen[id] = d2 == 0.0 ? 0.0 : kernel->theta(d2) / (2.0 * eps);
      row_reach[static_cast<std::size_t>(oy)] = ox;
    }
  }

  const auto& v = u.values();
  std::vector<double> out(v.size());
  res.argmax.assign(v.size(), 0);
  res.tied.assign(v.size(), false);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double best = -inf, best_d2 = inf;
      std::size_t arg = 0;
      bool tie = false;
      const int y0 = std::max(0, j - Ry), y1 = std::min(ny - 1, j + Ry);
      for (int yj = y0; yj <= y1; ++yj) {
        const int ay = std::abs(yj - j);
        const int reach = row_reach[static_cast<std::size_t>(ay)];
        if (reach < 0) continue;
        const int x0 = std::max(0, i - reach), x1 = std::min(nx - 1, i + reach);
        const double* prow = &pen[static_cast<std::size_t>(ay * (Rx + 1))];
        const double* drow = &dist2[static_cast<std::size_t>(ay * (Rx + 1))];
        const std::size_t base = static_cast<std::size_t>(yj) * static_cast<std::size_t>(nx);
        for (int xi = x0; xi <= x1; ++xi) {
          const int ax = xi < i ? i - xi : xi - i;
          const double val = v[base + static_cast<std::size_t>(xi)] - prow[ax];
          if (val > best) {
            best = val;
            best_d2 = drow[ax];
            arg = base + static_cast<std::size_t>(xi);
            tie = false;
          } else if (val == best) {
            tie = true;
            // Nodes are visited in increasing index, so only a closer node wins a tie.
            if (drow[ax] < best_d2) {
              best_d2 = drow[ax];
              arg = base + static_cast<std::size_t>(xi);
            }
          }
        }
      }
      const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
      out[k] = best;
      res.argmax[k] = arg;
      res.tied[k] = tie;
    }
  }
  res.u_eps = u.with_values(std::move(out));
  return res;
}

}  // namespace detail

/// u^eps(x) = max over nodes y with |y - x| <= rho(eps) + h of u(y) - Theta(|x-y|^2)/(2 eps).
inline ConvolutionResult sup_convolve(const SampledFunction& u, std::shared_ptr<const FlatKernel> kernel, double eps) {
  return detail::sup_convolve_impl(u, std::move(kernel), eps);
}
inline ConvolutionResult sup_convolve(const SampledFunction& u, const FlatKernel& kernel, double eps) {
  return sup_convolve(u, std::make_shared<const FlatKernel>(kernel), eps);
}

/// u_eps = -(-u)^eps; argmax holds the minimisers.
inline ConvolutionResult inf_convolve(const SampledFunction& u, std::shared_ptr<const FlatKernel> kernel, double eps) {
  auto res = detail::sup_convolve_impl(-u, std::move(kernel), eps);
  res.u_eps = -res.u_eps;
  res.inf = true;
  return res;
}
inline ConvolutionResult inf_convolve(const SampledFunction& u, const FlatKernel& kernel, double eps) {
  return inf_convolve(u, std::make_shared<const FlatKernel>(kernel), eps);
}

/// Outcome of one property check over grid nodes. Margins are >= 0 on success.
struct CheckReport {
  std::string name;
  bool pass = true;
  std::size_t checked = 0, failed = 0, skipped = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_node = 0;
  double tolerance = 0.0;
  double required_fraction = 1.0;  ///< share of checked nodes that must pass
  struct Failure {
    std::size_t node;
    double margin;
  };
  std::vector<Failure> failures;   ///< first max_listed failures
  std::vector<std::string> notes;
  static constexpr std::size_t max_listed = 20;

  void record(std::size_t node, double margin) {
    ++checked;
    if (margin < worst_margin) {
      worst_margin = margin;
      worst_node = node;
    }
    if (!(margin >= 0.0)) {
      ++failed;
      if (failures.size() < max_listed) failures.push_back({node, margin});
    }
  }
  double pass_fraction() const {
    return checked == 0 ? 1.0 : static_cast<double>(checked - failed) / static_cast<double>(checked);
  }
  /// Nothing was eligible, so the pass says nothing.
  bool vacuous() const { return checked == 0; }
  CheckReport& finish() {
    pass = pass_fraction() >= required_fraction;
    if (vacuous()) notes.push_back("vacuous: no eligible nodes");
    return *this;
  }
};

inline void to_json(nlohmann::json& j, const CheckReport& r) {
  j = {{"name", r.name},           {"pass", r.pass},
       {"checked", r.checked},     {"failed", r.failed},
       {"skipped", r.skipped},     {"tolerance", r.tolerance},
       {"required_fraction", r.required_fraction}, {"vacuous", r.vacuous()}};
  j["worst_margin"] = std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json(nullptr);
  j["worst_node"] = r.checked ? nlohmann::json(r.worst_node) : nlohmann::json(nullptr);
  auto& f = j["failures"] = nlohmann::json::array();
  for (const auto& x : r.failures) f.push_back({{"node", x.node}, {"margin", x.margin}});
  if (!r.notes.empty()) j["notes"] = r.notes;
}

namespace detail {

inline double min_eigenvalue(const Mat& H) {
  if (H.rows() == 1) return H(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Discrete a.e. filter: the Hessian stays below 1/h entrywise.
inline bool twice_differentiable(const Mat& H, double h) { return H.cwiseAbs().maxCoeff() <= 1.0 / h; }

// The filter at k and at its interior axis neighbours, whose values enter the
// centred stencils at k; a kink one cell away otherwise leaks into Du(k).
inline bool smooth_node(const SampledFunction& w, std::size_t k) {
  const double h = w.h_max();
  if (!twice_differentiable(hessian(w, k), h)) return false;
  for (int d = 0; d < w.dim(); ++d) {
    const std::size_t s = w.stride(d);
    for (const std::size_t nb : {k - s, k + s})
      if (!w.on_boundary(nb) && !twice_differentiable(hessian(w, nb), h)) return false;
  }
  return true;
}

// Smallest second difference along the lattice directions through k (axes,
// and both diagonals in 2D). A function with D^2 >= -c I satisfies every one
// of these exactly; the eigenvalues of the stencil Hessian need not at kinks.
inline double min_directional_second_difference(const SampledFunction& w, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  auto line = [&](std::size_t s, double len2) { best = std::min(best, (w[k + s] - 2.0 * w[k] + w[k - s]) / len2); };
  for (int d = 0; d < w.dim(); ++d) line(w.stride(d), w.h(d) * w.h(d));
  if (w.dim() == 2) {
    const double diag2 = w.h(0) * w.h(0) + w.h(1) * w.h(1);
    line(w.stride(0) + w.stride(1), diag2);
    line(w.stride(1) - w.stride(0), diag2);
  }
  return best;
}

// The grid maximiser moves by at most `jump` between k and its axis
// neighbours. A larger move means the stencil at k straddles a switch of the
// maximiser, i.e. a kink of u^eps, even when the Hessian filter misses it.
inline bool coherent_argmax(const ConvolutionResult& res, std::size_t k, double jump) {
  const auto& w = res.u_eps;
  const Vec xk = w.coord(res.argmax[k]);
  for (int d = 0; d < w.dim(); ++d) {
    const std::size_t s = w.stride(d);
    for (const std::size_t nb : {k - s, k + s})
      if ((w.coord(res.argmax[nb]) - xk).norm() > jump) return false;
  }
  return true;
}

// Gradients below this size are rounding noise of the centred difference.
inline double gradient_noise(const SampledFunction& w) {
  double hmin = w.h(0);
  for (int d = 1; d < w.dim(); ++d) hmin = std::min(hmin, w.h(d));
  return 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, w.sup_norm()) / hmin;
}

// One cell diagonal: how far the grid maximiser may sit from the true one
// (the true one can lie on a ridge of u between grid lines).
inline double argmax_quantum(const SampledFunction& w) {
  double s = 0.0;
  for (int d = 0; d < w.dim(); ++d) s += w.h(d) * w.h(d);
  return std::sqrt(s);
}

// Sign flip turning an inf-convolution into the sup-convolution of -u.
inline SampledFunction oriented(const ConvolutionResult& res) { return res.inf ? -res.u_eps : res.u_eps; }

}  // namespace detail

/// u^eps >= u (u_eps <= u) at every node.
inline CheckReport check_dominance(const ConvolutionResult& res, const SampledFunction& u, double tol = 0.0) {
  CheckReport r;
  r.name = "dominance";
  r.tolerance = tol;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double gap = res.inf ? u[k] - res.u_eps[k] : res.u_eps[k] - u[k];
    r.record(k, gap + tol);
  }
  return r.finish();
}

/// |x - x^eps| <= rho(eps) + h at every node.
inline CheckReport check_localization(const ConvolutionResult& res) {
  CheckReport r;
  r.name = "localization";
  const auto& u = res.u_eps;
  r.tolerance = u.h_max();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double dist = (u.coord(res.argmax[k]) - u.coord(k)).norm();
    r.record(k, res.loc_radius + u.h_max() - dist);
  }
  return r.finish();
}

/// Largest |u(y) - u(x)| over node pairs with |x - y| <= radius.
inline double modulus_of_continuity(const SampledFunction& u, double radius) {
  if (radius >= u.diam()) return u.max() - u.min();
  double best = 0.0;
  for (const auto& w : {u, -u}) {
    const int n = w.dim();
    const double hx = w.h(0), hy = n == 2 ? w.h(1) : 1.0;
    const int nx = w.nodes(0), ny = n == 2 ? w.nodes(1) : 1;
    const int Rx = std::min(nx - 1, static_cast<int>(std::floor(radius / hx + 1e-9)));
    const int Ry = n == 2 ? std::min(ny - 1, static_cast<int>(std::floor(radius / hy + 1e-9))) : 0;
    for (int oy = 0; oy <= Ry; ++oy) {
      for (int ox = -Rx; ox <= Rx; ++ox) {
        if ((ox * hx) * (ox * hx) + (oy * hy) * (oy * hy) > radius * radius * (1.0 + 1e-12)) continue;
        for (int j = 0; j + oy < ny; ++j) {
          for (int i = std::max(0, -ox); i < nx && i + ox < nx; ++i) {
            const std::size_t a = static_cast<std::size_t>(j * nx + i);
            const std::size_t b = static_cast<std::size_t>((j + oy) * nx + i + ox);
            best = std::max(best, w[b] - w[a]);
          }
        }
      }
    }
  }
  return best;
}

struct ConvergenceReport {
  std::vector<double> eps, gaps, bounds;
  CheckReport monotone;  ///< u <= u^{eps_{k+1}} <= u^{eps_k}
  CheckReport gap_bound; ///< gap_k <= omega_u(rho(eps_k) + h) + tol
  bool gaps_decreasing = true;
  bool pass = true;
};

/// u^eps decreases to u along a decreasing eps sequence.
inline ConvergenceReport check_convergence(const SampledFunction& u, std::shared_ptr<const FlatKernel> kernel,
                                           std::vector<double> eps_sequence, double tol) {
  std::sort(eps_sequence.begin(), eps_sequence.end(), std::greater<>());
  ConvergenceReport rep;
  rep.monotone.name = "convergence_monotone";
  rep.gap_bound.name = "convergence_gap";
  rep.monotone.tolerance = rep.gap_bound.tolerance = tol;
  std::vector<double> prev;
  for (std::size_t s = 0; s < eps_sequence.size(); ++s) {
    const auto res = sup_convolve(u, kernel, eps_sequence[s]);
    double gap = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      gap = std::max(gap, res.u_eps[k] - u[k]);
      double margin = res.u_eps[k] - u[k];
      if (!prev.empty()) margin = std::min(margin, prev[k] - res.u_eps[k]);
      rep.monotone.record(k, margin + tol);
    }
    const double bound = modulus_of_continuity(u, res.loc_radius + u.h_max());
    rep.gap_bound.record(s, bound + tol - gap);
    if (!rep.gaps.empty() && gap > rep.gaps.back() + tol) rep.gaps_decreasing = false;
    rep.eps.push_back(eps_sequence[s]);
    rep.gaps.push_back(gap);
    rep.bounds.push_back(bound);
    prev = res.u_eps.values();
  }
  rep.monotone.finish();
  rep.gap_bound.finish();
  rep.pass = rep.monotone.pass && rep.gap_bound.pass && rep.gaps_decreasing;
  return rep;
}

/// D^2 u^eps >= -T'(d)/eps at interior nodes, along every lattice direction.
inline CheckReport check_semiconvexity(const ConvolutionResult& res, double tol) {
  CheckReport r;
  r.name = "semiconvexity";
  r.tolerance = tol;
  const auto w = detail::oriented(res);
  const double bound = -res.kernel->semiconvexity_constant() / res.eps;
  r.notes.push_back("lower bound " + std::to_string(bound));
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.on_boundary(k)) continue;
    r.record(k, detail::min_directional_second_difference(w, k) - bound + tol);
  }
  return r.finish();
}

/// Flatness: D^2 u^eps >= -Phi(|D u^eps|)/eps at interior, discretely twice
/// differentiable nodes with |D u^eps| > h. Only for flat kernels.
inline CheckReport check_flatness(const ConvolutionResult& res, double tol, double required_fraction = 1.0) {
  if (!res.kernel->flat) throw std::invalid_argument("check_flatness: kernel is not flat (Phi(0+) != 0)");
  CheckReport r;
  r.name = "flatness";
  r.tolerance = tol;
  r.required_fraction = required_fraction;
  const auto w = detail::oriented(res);
  const double h = w.h_max();
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.on_boundary(k)) continue;
    const Vec p = nodal_gradient(w, k);
    if (!detail::smooth_node(w, k) || !(p.norm() > h)) {
      ++r.skipped;
      continue;
    }
    r.record(k, detail::min_directional_second_difference(w, k) + res.kernel->phi(p.norm()) / res.eps + tol);
  }
  return r.finish();
}

namespace detail {

// Predicted maximiser x + T^{-1}(eps |p|) p/|p|.
inline Vec magic_point(const ConvolutionResult& res, const Vec& x, const Vec& p) {
  const double np = p.norm();
  if (np == 0.0) return x;
  return x + res.kernel->Tinv(res.eps * np) * (p / np);
}

}  // namespace detail

/// Magic point: x^eps = x + T^{-1}(eps D u^eps(x)) within tol at twice
/// differentiable interior nodes with a unique, interior grid maximiser.
inline CheckReport check_magic(const ConvolutionResult& res, double tol) {
  CheckReport r;
  r.name = "magic";
  r.tolerance = tol;
  const auto w = detail::oriented(res);
  const double noise = detail::gradient_noise(w), jump = 4.0 * w.h_max();
  std::size_t noisy = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.on_boundary(k)) continue;
    if (res.tied[k] || w.on_boundary(res.argmax[k]) || !detail::smooth_node(w, k) ||
        !detail::coherent_argmax(res, k, jump)) {
      ++r.skipped;
      continue;
    }
    const Vec p = nodal_gradient(w, k);
    const Vec x = w.coord(k);
    const double dist = (w.coord(res.argmax[k]) - x).norm();
    if (p.norm() <= noise) {
      // Direction undefined: any move whose T stays below eps times the noise is consistent.
      ++noisy;
      r.record(k, tol * (1.0 + 1e-9) - std::max(0.0, dist - res.kernel->Tinv(res.eps * (p.norm() + noise))));
      continue;
    }
    const Vec err = w.coord(res.argmax[k]) - detail::magic_point(res, x, p);
    r.record(k, tol * (1.0 + 1e-9) - err.norm());
  }
  r.notes.push_back("grid ties: " + std::to_string(res.tie_count()));
  r.notes.push_back("gradient at rounding level (magnitude only): " + std::to_string(noisy));
  return r.finish();
}

/// |D u^eps(x)| >= T(|x - x^eps|)/eps - tol at twice differentiable
/// nodes whose maximiser is interior and locally stable. The grid maximiser
/// is only known to a cell diagonal, which is taken off |x - x^eps|.
inline CheckReport check_gradient_bound(const ConvolutionResult& res, double tol) {
  CheckReport r;
  r.name = "gradient_bound";
  r.tolerance = tol;
  const auto w = detail::oriented(res);
  const double q = detail::argmax_quantum(w), jump = 4.0 * w.h_max();
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.on_boundary(k)) continue;
    if (w.on_boundary(res.argmax[k]) || !detail::smooth_node(w, k) || !detail::coherent_argmax(res, k, jump)) {
      ++r.skipped;
      continue;
    }
    const double dist = std::max((w.coord(res.argmax[k]) - w.coord(k)).norm() - q, 0.0);
    const double rhs = dist == 0.0 ? 0.0 : res.kernel->T(dist) / res.eps;
    r.record(k, nodal_gradient(w, k).norm() - rhs + tol);
  }
  return r.finish();
}

/// Sup |D u^eps| over nodes at distance > inner_margin from the boundary
/// whose maximiser lies off the boundary is at most sup |D u| + tol.
inline CheckReport check_lipschitz(const ConvolutionResult& res, const SampledFunction& u, double inner_margin,
                                   double tol) {
  CheckReport r;
  r.name = "lipschitz";
  r.tolerance = tol;
  double lip = 0.0;
  for (const auto& g : gradient(u)) lip = std::max(lip, g.norm());
  r.notes.push_back("sup |Du| = " + std::to_string(lip));
  const auto w = detail::oriented(res);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.on_boundary(k) || w.boundary_distance(k) <= inner_margin || w.on_boundary(res.argmax[k])) {
      ++r.skipped;
      continue;
    }
    r.record(k, lip + tol - nodal_gradient(w, k).norm());
  }
  return r.finish();
}

/// P1 interpolant of seeded uniform values in [-amp, amp] on a coarse grid
/// with `cells` cells per axis; Lipschitz with constant about 2 amp cells / side.
inline SampledFunction random_lipschitz(const Box& box, double h, int cells, std::uint64_t seed, double amp = 0.5) {
  if (cells < 1) throw std::invalid_argument("random_lipschitz: need at least one cell");
  const int n = box.dim();
  if (n > 2) throw std::invalid_argument("random_lipschitz: only 1D and 2D boxes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-amp, amp);
  const int m = cells + 1;
  std::vector<double> coarse(static_cast<std::size_t>(n == 1 ? m : m * m));
  for (double& c : coarse) c = U(rng);
  auto at = [&](int i, int j) { return coarse[static_cast<std::size_t>(i + m * j)]; };
  return SampledFunction::sample(box, h, [&](const Vec& x) {
    double s[2] = {0.0, 0.0};
    int c[2] = {0, 0};
    for (int d = 0; d < n; ++d) {
      const auto id = static_cast<std::size_t>(d);
      const double q = (x(d) - box.lo[id]) / (box.hi[id] - box.lo[id]) * cells;
      c[d] = std::clamp(static_cast<int>(std::floor(q)), 0, cells - 1);
      s[d] = q - c[d];
    }
    if (n == 1) return (1.0 - s[0]) * at(c[0], 0) + s[0] * at(c[0] + 1, 0);
    // Triangles split along the main diagonal, as in SimplexMesh.
    const double v00 = at(c[0], c[1]), v10 = at(c[0] + 1, c[1]), v01 = at(c[0], c[1] + 1),
                 v11 = at(c[0] + 1, c[1] + 1);
    if (s[0] >= s[1]) return v00 + s[0] * (v10 - v00) + s[1] * (v11 - v10);
    return v00 + s[0] * (v11 - v01) + s[1] * (v01 - v00);
  });
}

struct SuiteFunction {
  std::string name;
  SampledFunction u;
};

/// {affine, cone, sine, random Lipschitz}: on [-1, 1] in 1D, on [0, 1]^2
/// centred at (1/2, 1/2) in 2D.
inline std::vector<SuiteFunction> canonical_functions(int dim, double h, std::uint64_t seed = 1) {
  constexpr double pi = 3.14159265358979323846;
  if (dim == 1) {
    const Box b = Box::interval(-1.0, 1.0);
    return {{"affine", SampledFunction::sample(b, h, [](const Vec& x) { return 0.5 * x(0) + 0.25; })},
            {"abs", SampledFunction::sample(b, h, [](const Vec& x) { return std::abs(x(0)); })},
            {"sin", SampledFunction::sample(b, h, [&](const Vec& x) { return std::sin(pi * x(0)); })},
            {"random_lipschitz", random_lipschitz(b, h, 10, seed)}};
  }
  if (dim == 2) {
    const Box b = Box::square(0.0, 1.0);
    return {{"affine", SampledFunction::sample(b, h, [](const Vec& x) { return x(0) - 0.5 * x(1) + 0.1; })},
            {"abs", SampledFunction::sample(b, h, [](const Vec& x) { return std::hypot(x(0) - 0.5, x(1) - 0.5); })},
            {"sin", SampledFunction::sample(b, h, [&](const Vec& x) { return std::sin(pi * x(0)) * std::sin(pi * x(1)); })},
            {"random_lipschitz", random_lipschitz(b, h, 6, seed)}};
  }
  throw std::invalid_argument("canonical_functions: dim must be 1 or 2");
}

}  // namespace flatvisc
