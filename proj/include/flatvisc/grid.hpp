#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamiltonian.hpp"
#include "types.hpp"

namespace flatvisc {

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.empty() || lo.size() > static_cast<std::size_t>(kMaxDim))
      throw std::invalid_argument("Box: lo/hi must have the same length 1..3");
    for (std::size_t d = 0; d < lo.size(); ++d)
      if (!(hi[d] > lo[d])) throw std::invalid_argument("Box: need hi > lo on every axis");
  }
  static Box interval(double a, double b) { return Box({a}, {b}); }
  static Box square(double a, double b) { return Box({a, a}, {b, b}); }

  int dim() const { return static_cast<int>(lo.size()); }
  double diam() const {
    double s = 0.0;
    for (std::size_t d = 0; d < lo.size(); ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
    return std::sqrt(s);
  }
  double volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < lo.size(); ++d) v *= hi[d] - lo[d];
    return v;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Nodal values on a uniform rectangular grid. Index i along x varies fastest.
class SampledFunction {
 public:
  SampledFunction() = default;

  SampledFunction(Box box, std::vector<int> nodes, std::vector<double> values)
      : box_(std::move(box)), n_(std::move(nodes)), values_(std::move(values)) {
    if (static_cast<int>(n_.size()) != box_.dim())
      throw std::invalid_argument("SampledFunction: node counts must match the box dimension");
    std::size_t total = 1;
    for (std::size_t d = 0; d < n_.size(); ++d) {
      if (n_[d] < 3) throw std::invalid_argument("SampledFunction: need at least 3 nodes per axis");
      h_.push_back((box_.hi[d] - box_.lo[d]) / (n_[d] - 1));
      total *= static_cast<std::size_t>(n_[d]);
    }
    if (values_.size() != total) throw std::invalid_argument("SampledFunction: wrong number of values");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("SampledFunction: non-finite nodal value");
  }

  /// Grid with spacing as close to h as divides each axis.
  static std::vector<int> nodes_for(const Box& box, double h) {
    std::vector<int> n;
    for (int d = 0; d < box.dim(); ++d)
      n.push_back(static_cast<int>(std::lround((box.hi[d] - box.lo[d]) / h)) + 1);
    return n;
  }

  static SampledFunction sample(const Box& box, const std::vector<int>& nodes,
                                const std::function<double(const Vec&)>& f) {
    SampledFunction shape(box, nodes, std::vector<double>(count(nodes), 0.0));
    std::vector<double> v(shape.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(shape.coord(k));
    return shape.with_values(std::move(v));
  }
  static SampledFunction sample(const Box& box, double h, const std::function<double(const Vec&)>& f) {
    return sample(box, nodes_for(box, h), f);
  }

  SampledFunction with_values(std::vector<double> v) const { return SampledFunction(box_, n_, std::move(v)); }

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<int>& nodes() const { return n_; }
  int nodes(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double h(int axis = 0) const { return h_[static_cast<std::size_t>(axis)]; }
  double h_max() const { return *std::max_element(h_.begin(), h_.end()); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double diam() const { return box_.diam(); }

  std::array<int, kMaxDim> multi_index(std::size_t k) const {
    std::array<int, kMaxDim> m{0, 0, 0};
    for (std::size_t d = 0; d < n_.size(); ++d) {
      m[d] = static_cast<int>(k % static_cast<std::size_t>(n_[d]));
      k /= static_cast<std::size_t>(n_[d]);
    }
    return m;
  }
  std::size_t index(const std::array<int, kMaxDim>& m) const {
    std::size_t k = 0;
    for (std::size_t d = n_.size(); d-- > 0;) k = k * static_cast<std::size_t>(n_[d]) + static_cast<std::size_t>(m[d]);
    return k;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int d = 0; d < axis; ++d) s *= static_cast<std::size_t>(n_[static_cast<std::size_t>(d)]);
    return s;
  }

  Vec coord(std::size_t k) const {
    const auto m = multi_index(k);
    Vec x(dim());
    for (int d = 0; d < dim(); ++d) x(d) = box_.lo[static_cast<std::size_t>(d)] + m[static_cast<std::size_t>(d)] * h_[static_cast<std::size_t>(d)];
    return x;
  }

  bool on_boundary(std::size_t k) const {
    const auto m = multi_index(k);
    for (std::size_t d = 0; d < n_.size(); ++d)
      if (m[d] == 0 || m[d] == n_[d] - 1) return true;
    return false;
  }
  std::vector<bool> boundary_mask() const {
    std::vector<bool> mask(size());
    for (std::size_t k = 0; k < size(); ++k) mask[k] = on_boundary(k);
    return mask;
  }

  /// Distance from node k to the boundary of the box.
  double boundary_distance(std::size_t k) const {
    const Vec x = coord(k);
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim(); ++a) {
      const auto ia = static_cast<std::size_t>(a);
      d = std::min({d, x(a) - box_.lo[ia], box_.hi[ia] - x(a)});
    }
    return std::max(d, 0.0);
  }

  double sup_norm() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
  }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  friend SampledFunction operator-(const SampledFunction& u) {
    std::vector<double> v(u.values_);
    for (double& x : v) x = -x;
    return u.with_values(std::move(v));
  }

 private:
  static std::size_t count(const std::vector<int>& n) {
    std::size_t c = 1;
    for (int k : n) c *= static_cast<std::size_t>(std::max(k, 0));
    return c;
  }

  Box box_;
  std::vector<int> n_;
  std::vector<double> h_;
  std::vector<double> values_;
};

enum class Diagonal { main, anti };

/// P1 simplices on the grid: intervals in 1D, two triangles per cell in 2D.
/// Each simplex has gradient component d = (u[plus[d]] - u[minus[d]]) / h_d.
class SimplexMesh {
 public:
  struct Simplex {
    std::array<std::size_t, kMaxDim> plus{}, minus{};
    double vol = 0.0;
  };

  explicit SimplexMesh(const SampledFunction& shape, Diagonal diag = Diagonal::main)
      : dim_(shape.dim()), diag_(diag) {
    for (int d = 0; d < dim_; ++d) {
      inv_h_[static_cast<std::size_t>(d)] = 1.0 / shape.h(d);
      cells_[static_cast<std::size_t>(d)] = shape.nodes(d) - 1;
    }
    if (dim_ == 1) {
      const int n = shape.nodes(0);
      for (int i = 0; i + 1 < n; ++i) {
        Simplex s;
        s.plus[0] = static_cast<std::size_t>(i + 1);
        s.minus[0] = static_cast<std::size_t>(i);
        s.vol = shape.h(0);
        simplices_.push_back(s);
      }
    } else if (dim_ == 2) {
      const int nx = shape.nodes(0), ny = shape.nodes(1);
      const double vol = 0.5 * shape.h(0) * shape.h(1);
      auto id = [nx](int i, int j) { return static_cast<std::size_t>(i + nx * j); };
      for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
          const auto n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
          Simplex a, b;
          a.vol = b.vol = vol;
          if (diag == Diagonal::main) {
            a.plus = {n10, n11, 0}; a.minus = {n00, n10, 0};
            b.plus = {n11, n01, 0}; b.minus = {n01, n00, 0};
          } else {
            a.plus = {n10, n01, 0}; a.minus = {n00, n00, 0};
            b.plus = {n11, n11, 0}; b.minus = {n01, n10, 0};
          }
          simplices_.push_back(a);
          simplices_.push_back(b);
        }
      }
    } else {
      throw std::invalid_argument("SimplexMesh: only 1D and 2D grids are meshed");
    }
  }

  int dim() const { return dim_; }
  Diagonal diagonal() const { return diag_; }

  /// Simplices of the cells whose lower corner index lies in [lo, hi], clamped to the grid.
  std::vector<std::size_t> simplices_in_box(std::array<int, kMaxDim> lo, std::array<int, kMaxDim> hi) const {
    std::vector<std::size_t> out;
    for (int d = 0; d < dim_; ++d) {
      const auto id = static_cast<std::size_t>(d);
      lo[id] = std::max(lo[id], 0);
      hi[id] = std::min(hi[id], cells_[id] - 1);
      if (lo[id] > hi[id]) return out;
    }
    if (dim_ == 1) {
      for (int i = lo[0]; i <= hi[0]; ++i) out.push_back(static_cast<std::size_t>(i));
    } else {
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const auto c = static_cast<std::size_t>(i + cells_[0] * j);
          out.push_back(2 * c);
          out.push_back(2 * c + 1);
        }
    }
    return out;
  }
  std::size_t size() const { return simplices_.size(); }
  const Simplex& operator[](std::size_t k) const { return simplices_[k]; }
  const std::vector<Simplex>& simplices() const { return simplices_; }

  double total_volume() const {
    double v = 0.0;
    for (const auto& s : simplices_) v += s.vol;
    return v;
  }

  Vec gradient(const std::vector<double>& u, std::size_t k) const {
    const auto& s = simplices_[k];
    Vec g(dim_);
    for (int d = 0; d < dim_; ++d) {
      const auto id = static_cast<std::size_t>(d);
      g(d) = (u[s.plus[id]] - u[s.minus[id]]) * inv_h_[id];
    }
    return g;
  }

  /// Adds w * (d grad_k / d u)^T v to out.
  void scatter(std::size_t k, const Vec& v, double w, std::vector<double>& out) const {
    const auto& s = simplices_[k];
    for (int d = 0; d < dim_; ++d) {
      const auto id = static_cast<std::size_t>(d);
      const double c = w * v(d) * inv_h_[id];
      out[s.plus[id]] += c;
      out[s.minus[id]] -= c;
    }
  }

 private:
  int dim_;
  Diagonal diag_;
  std::array<double, kMaxDim> inv_h_{};
  std::array<int, kMaxDim> cells_{};
  std::vector<Simplex> simplices_;
};

/// Constant gradient of u on every simplex.
inline std::vector<Vec> gradient(const SampledFunction& u, const SimplexMesh& mesh) {
  std::vector<Vec> g(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) g[k] = mesh.gradient(u.values(), k);
  return g;
}
inline std::vector<Vec> gradient(const SampledFunction& u) { return gradient(u, SimplexMesh(u)); }

/// Centred-difference gradient at an interior node.
inline Vec nodal_gradient(const SampledFunction& u, std::size_t k) {
  if (u.on_boundary(k)) throw std::domain_error("nodal_gradient: boundary node");
  Vec g(u.dim());
  for (int d = 0; d < u.dim(); ++d) {
    const std::size_t s = u.stride(d);
    g(d) = (u[k + s] - u[k - s]) / (2.0 * u.h(d));
  }
  return g;
}

/// Centred second differences at an interior node; exact for quadratics.
inline Mat hessian(const SampledFunction& u, std::size_t k) {
  if (u.on_boundary(k)) throw std::domain_error("hessian: boundary node");
  const int n = u.dim();
  Mat H(n, n);
  for (int a = 0; a < n; ++a) {
    const std::size_t sa = u.stride(a);
    const double ha = u.h(a);
    H(a, a) = (u[k + sa] - 2.0 * u[k] + u[k - sa]) / (ha * ha);
    for (int b = a + 1; b < n; ++b) {
      const std::size_t sb = u.stride(b);
      const double m = (u[k + sa + sb] - u[k + sa - sb] - u[k - sa + sb] + u[k - sa - sb]) / (4.0 * ha * u.h(b));
      H(a, b) = H(b, a) = m;
    }
  }
  return H;
}

/// Discrete energy sum_simplices F(grad u) vol.
inline double energy(const std::vector<double>& u, const SimplexMesh& mesh, const Hamiltonian& H) {
  double e = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) e += mesh[k].vol * H.eval(mesh.gradient(u, k));
  return e;
}
inline double energy(const SampledFunction& u, const Hamiltonian& H) {
  return energy(u.values(), SimplexMesh(u), H);
}

/// Energy and its gradient with respect to the nodal values.
inline double energy_and_gradient(const std::vector<double>& u, const SimplexMesh& mesh, const Hamiltonian& H,
                                  std::vector<double>& grad) {
  grad.assign(u.size(), 0.0);
  double e = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    Vec FA;
    e += mesh[k].vol * H.value_and_grad(mesh.gradient(u, k), FA);
    mesh.scatter(k, FA, mesh[k].vol, grad);
  }
  return e;
}

// CSV: "# dim=.. lo=.. hi=.. nodes=.. h=.." then "i[,j],x[,y],value".

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + f(xs[i]);
  return s;
}
inline std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}
}  // namespace detail

inline void write_csv(std::ostream& os, const SampledFunction& u) {
  const int n = u.dim();
  std::vector<double> hs;
  for (int d = 0; d < n; ++d) hs.push_back(u.h(d));
  os << "# dim=" << n << " lo=" << detail::join(u.box().lo, detail::fmt17)
     << " hi=" << detail::join(u.box().hi, detail::fmt17)
     << " nodes=" << detail::join(u.nodes(), [](int v) { return std::to_string(v); })
     << " h=" << detail::join(hs, detail::fmt17) << "\n";
  static const char* idx[] = {"i", "j", "k"};
  static const char* crd[] = {"x", "y", "z"};
  for (int d = 0; d < n; ++d) os << idx[d] << ",";
  for (int d = 0; d < n; ++d) os << crd[d] << ",";
  os << "value\n";
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto m = u.multi_index(k);
    const Vec x = u.coord(k);
    for (int d = 0; d < n; ++d) os << m[static_cast<std::size_t>(d)] << ",";
    for (int d = 0; d < n; ++d) os << detail::fmt17(x(d)) << ",";
    os << detail::fmt17(u[k]) << "\n";
  }
}

inline SampledFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0) throw std::runtime_error("read_csv: missing metadata line");
  std::stringstream meta(line.substr(1));
  std::string tok;
  int dim = 0;
  std::vector<double> lo, hi;
  std::vector<int> nodes;
  while (meta >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "dim") dim = std::stoi(val);
    else if (key == "lo") lo = detail::split_doubles(val);
    else if (key == "hi") hi = detail::split_doubles(val);
    else if (key == "nodes") for (double v : detail::split_doubles(val)) nodes.push_back(static_cast<int>(v));
  }
  if (dim < 1 || static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim ||
      static_cast<int>(nodes.size()) != dim)
    throw std::runtime_error("read_csv: incomplete metadata");
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing column header");

  std::size_t total = 1;
  for (int v : nodes) total *= static_cast<std::size_t>(v);
  std::vector<double> values(total);
  std::vector<bool> seen(total, false);
  SampledFunction shape(Box(lo, hi), nodes, std::vector<double>(total, 0.0));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = detail::split_doubles(line);
    if (cols.size() != static_cast<std::size_t>(2 * dim + 1)) throw std::runtime_error("read_csv: bad row '" + line + "'");
    std::array<int, kMaxDim> m{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      m[static_cast<std::size_t>(d)] = static_cast<int>(cols[static_cast<std::size_t>(d)]);
      if (m[static_cast<std::size_t>(d)] < 0 || m[static_cast<std::size_t>(d)] >= nodes[static_cast<std::size_t>(d)])
        throw std::runtime_error("read_csv: index out of range");
    }
    const std::size_t k = shape.index(m);
    values[k] = cols.back();
    seen[k] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw std::runtime_error("read_csv: missing nodes");
  return shape.with_values(std::move(values));
}

}  // namespace flatvisc
