#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include <flatvisc/grid.hpp>

#include "oracles.hpp"

using namespace flatvisc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Gradient of the plane through three points (x_i, y_i, z_i).
Eigen::Vector2d plane_gradient(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                               double z0, double z1, double z2) {
  Eigen::Matrix2d A;
  A.row(0) = (p1 - p0).transpose();
  A.row(1) = (p2 - p0).transpose();
  return A.fullPivLu().solve(Eigen::Vector2d(z1 - z0, z2 - z0));
}

}  // namespace

TEST_CASE("box and sampled function basics", "[grid]") {
  const Box b = Box::square(0.0, 1.0);
  CHECK(b.dim() == 2);
  CHECK_THAT(b.diam(), WithinRel(std::sqrt(2.0), 1e-15));
  const auto u = SampledFunction::sample(b, 0.25, [](const Vec& x) { return x(0) - 3.0 * x(1); });
  CHECK(u.size() == 25);
  CHECK(u.nodes(0) == 5);
  CHECK(u.h(1) == 0.25);
  CHECK(u.sup_norm() == 3.0);
  CHECK(u.index(u.multi_index(17)) == 17);
  std::size_t boundary = 0;
  for (bool m : u.boundary_mask()) boundary += m;
  CHECK(boundary == 16);
  CHECK_THROWS_AS(Box::interval(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SampledFunction(Box::interval(0, 1), {2}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SampledFunction(Box::interval(0, 1), {3}, {0.0, NAN, 1.0}), std::invalid_argument);
}

TEST_CASE("mesh volumes sum to the box volume", "[grid]") {
  for (auto d : {Diagonal::main, Diagonal::anti}) {
    const auto u = SampledFunction::sample(Box({-1.0, 0.0}, {2.0, 0.5}), 1.0 / 64, [](const Vec&) { return 0.0; });
    const SimplexMesh m(u, d);
    CHECK(m.size() == 2 * 192 * 32);
    CHECK_THAT(m.total_volume(), WithinRel(1.5, 1e-12));
  }
  const auto v = SampledFunction::sample(Box::interval(0.0, 1.0), 0.01, [](const Vec&) { return 0.0; });
  CHECK_THAT(SimplexMesh(v).total_volume(), WithinRel(1.0, 1e-12));
}

TEST_CASE("simplex gradients", "[grid]") {
  const auto u = SampledFunction::sample(Box::interval(0.0, 1.0), 0.1, [](const Vec& x) { return x(0); });
  for (const Vec& g : gradient(u)) CHECK_THAT(g(0), WithinAbs(1.0, 1e-12));

  const auto q = SampledFunction::sample(Box::interval(0.0, 1.0), 0.1, [](const Vec& x) { return x(0) * x(0); });
  const auto gq = gradient(q);
  for (std::size_t i = 0; i < gq.size(); ++i) {
    const double a = q.coord(i)(0), b = q.coord(i + 1)(0);
    CHECK_THAT(gq[i](0), WithinAbs(a + b, 1e-12));
  }

  for (auto d : {Diagonal::main, Diagonal::anti}) {
    const auto w = SampledFunction::sample(Box::square(0.0, 1.0), 0.125, [](const Vec& x) { return x(0) - 2.0 * x(1); });
    for (const Vec& g : gradient(w, SimplexMesh(w, d))) {
      CHECK_THAT(g(0), WithinAbs(1.0, 1e-12));
      CHECK_THAT(g(1), WithinAbs(-2.0, 1e-12));
    }
  }
}

TEST_CASE("2D simplex gradient matches the plane through its vertices", "[grid]") {
  auto f = [](const Vec& x) { return std::sin(3.0 * x(0)) * std::exp(x(1)); };
  const auto u = SampledFunction::sample(Box::square(0.0, 1.0), 0.125, f);
  const SimplexMesh m(u, Diagonal::main);
  const int nx = u.nodes(0);
  auto P = [&](std::size_t k) { const Vec c = u.coord(k); return Eigen::Vector2d(c(0), c(1)); };
  for (int j = 0; j + 1 < u.nodes(1); ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t c = static_cast<std::size_t>(i + (nx - 1) * j);
      const std::size_t n00 = i + nx * j, n10 = n00 + 1, n01 = n00 + nx, n11 = n01 + 1;
      const auto ga = plane_gradient(P(n00), P(n10), P(n11), u[n00], u[n10], u[n11]);
      const auto gb = plane_gradient(P(n00), P(n11), P(n01), u[n00], u[n11], u[n01]);
      const Vec a = m.gradient(u.values(), 2 * c), b = m.gradient(u.values(), 2 * c + 1);
      CHECK((Eigen::Vector2d(a(0), a(1)) - ga).norm() < 1e-12);
      CHECK((Eigen::Vector2d(b(0), b(1)) - gb).norm() < 1e-12);
    }
}

TEST_CASE("nodal hessian", "[grid]") {
  const auto u = SampledFunction::sample(Box::square(-1.0, 1.0), 0.1, [](const Vec& x) { return x(0) * x(0) - x(1) * x(1); });
  const auto a = SampledFunction::sample(Box::square(-1.0, 1.0), 0.1, [](const Vec& x) { return 0.3 + x(0) - 5.0 * x(1); });
  const auto c = SampledFunction::sample(Box::square(-1.0, 1.0), 0.1, [](const Vec& x) { return x(0) * x(1); });
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u.on_boundary(k)) {
      CHECK_THROWS_AS(hessian(u, k), std::domain_error);
      continue;
    }
    const Mat H = hessian(u, k);
    CHECK_THAT(H(0, 0), WithinAbs(2.0, 1e-9));
    CHECK_THAT(H(1, 1), WithinAbs(-2.0, 1e-9));
    CHECK_THAT(H(0, 1), WithinAbs(0.0, 1e-9));
    CHECK(hessian(a, k).norm() < 1e-9);
    const Mat C = hessian(c, k);
    CHECK(C == C.transpose());
    CHECK_THAT(C(0, 1), WithinAbs(1.0, 1e-9));
  }
  for (double h : {0.1, 0.01}) {
    const auto v = SampledFunction::sample(Box::interval(-1.0, 1.0), h, [](const Vec& x) { return std::abs(x(0)); });
    const std::size_t mid = static_cast<std::size_t>(v.nodes(0) / 2);
    REQUIRE(v.coord(mid)(0) == Catch::Approx(0.0).margin(1e-14));
    CHECK_THAT(hessian(v, mid)(0, 0), WithinRel(2.0 / h, 1e-9));
  }
}

TEST_CASE("energy examples", "[grid]") {
  const auto H2 = Hamiltonian::p_dirichlet(2.0, 1);
  const auto u = SampledFunction::sample(Box::interval(0.0, 1.0), 0.01, [](const Vec& x) { return x(0); });
  CHECK_THAT(energy(u, H2), WithinRel(1.0, 1e-12));

  const auto w = SampledFunction::sample(Box::square(0.0, 1.0), 1.0 / 32, [](const Vec& x) { return x(0); });
  CHECK_THAT(energy(w, Hamiltonian::p_dirichlet(3.0, 2)), WithinRel(1.0, 1e-12));

  // Interval [a, a+h] contributes h (a+b)^2 versus 4 (b^3 - a^3)/3, a deficit of h^3/3.
  for (int k = 3; k <= 9; ++k) {
    const double h = std::ldexp(1.0, -k);
    const auto q = SampledFunction::sample(Box::interval(0.0, 1.0), h, [](const Vec& x) { return x(0) * x(0); });
    CHECK_THAT(energy(q, H2), WithinAbs(4.0 / 3.0 - h * h / 3.0, 1e-12));
  }
}

TEST_CASE("energy invariances and convexity", "[grid]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double p : {1.2, 2.0, 3.0}) {
    const auto H = Hamiltonian::p_dirichlet(p, 2);
    const auto shape = SampledFunction::sample(Box::square(0.0, 1.0), 1.0 / 16, [](const Vec&) { return 0.0; });
    const SimplexMesh mesh(shape);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(shape.size()), w(shape.size()), mid(shape.size()), shifted(shape.size());
      for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = U(rng);
        w[k] = U(rng);
        mid[k] = 0.5 * (v[k] + w[k]);
        shifted[k] = v[k] + 0.75;
      }
      const double Ev = energy(v, mesh, H), Ew = energy(w, mesh, H);
      CHECK(energy(mid, mesh, H) <= 0.5 * (Ev + Ew) + 1e-12);
      // 0.75 is exact in binary, so the differences are unchanged.
      CHECK(energy(shifted, mesh, H) == Ev);
    }
  }
}

TEST_CASE("energy gradient matches finite differences", "[grid]") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto H = Hamiltonian::p_dirichlet(p, 2);
    const auto shape = SampledFunction::sample(Box::square(0.0, 1.0), 0.125, [](const Vec&) { return 0.0; });
    const SimplexMesh mesh(shape);
    std::vector<double> v(shape.size());
    for (double& x : v) x = U(rng);
    std::vector<double> g;
    const double E = energy_and_gradient(v, mesh, H, g);
    CHECK_THAT(E, WithinRel(energy(v, mesh, H), 1e-13));
    for (std::size_t k = 0; k < v.size(); k += 3) {
      const double s = 1e-6;
      auto vp = v, vm = v;
      vp[k] += s;
      vm[k] -= s;
      const double fd = (energy(vp, mesh, H) - energy(vm, mesh, H)) / (2.0 * s);
      CHECK_THAT(g[k], WithinAbs(fd, 1e-6 * std::max(1.0, std::abs(fd))));
    }
  }
}

TEST_CASE("simplices_in_box selects whole cells", "[grid]") {
  const auto u = SampledFunction::sample(Box::square(0.0, 1.0), 0.125, [](const Vec&) { return 0.0; });
  const SimplexMesh m(u);
  const auto s = m.simplices_in_box({2, 3, 0}, {4, 3, 0});
  REQUIRE(s.size() == 6);
  CHECK(s[0] == 2 * (2 + 8 * 3));
  CHECK(s[5] == 2 * (4 + 8 * 3) + 1);
  CHECK(m.simplices_in_box({-5, -5, 0}, {100, 100, 0}).size() == m.size());
  CHECK(m.simplices_in_box({9, 0, 0}, {12, 2, 0}).empty());
}

TEST_CASE("csv round trip is exact", "[grid]") {
  const auto u = SampledFunction::sample(Box({-0.3, 0.1}, {0.7, 1.1}), 0.1,
                                         [](const Vec& x) { return std::sin(x(0)) / 3.0 + x(1) * 1e-17; });
  std::stringstream ss;
  write_csv(ss, u);
  const std::string text = ss.str();
  CHECK(text.rfind("# dim=2", 0) == 0);
  const auto back = read_csv(ss);
  CHECK(back.box() == u.box());
  CHECK(back.nodes() == u.nodes());
  CHECK(back.values() == u.values());
  std::stringstream again;
  write_csv(again, back);
  CHECK(again.str() == text);

  std::stringstream bad("# dim=1 lo=0 hi=1 nodes=3 h=0.5\ni,x,value\n0,0,1\n");
  CHECK_THROWS(read_csv(bad));
}
