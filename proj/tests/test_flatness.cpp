#include <catch_amalgamated.hpp>

#include <cmath>

#include <flatvisc/flatness.hpp>

#include "oracles.hpp"

using namespace flatvisc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MonotoneMap tabulate(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
  const auto ts = log_space(lo, hi, n);
  std::vector<double> vs;
  for (double t : ts) vs.push_back(f(t));
  return MonotoneMap(ts, vs);
}

}  // namespace

TEST_CASE("omega for p = 2 is sqrt(t) + 4t", "[flatness]") {
  const auto w = build_omega(Hamiltonian::p_dirichlet(2.0, 2), 512);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = w.knots()[i];
    CHECK_THAT(w.values()[i], WithinAbs(std::sqrt(t) + 4.0 * t, 1e-9));
  }
  CHECK(w(1e-12) <= 2e-6);
}

TEST_CASE("omega for p = 1.5 in the plane is 5.5 sqrt(t)", "[flatness]") {
  // sup Laplacian on (s, 1) is 2.25 s^{-1/2}; its integral from 0 is 4.5 sqrt(t).
  const auto H = Hamiltonian::p_dirichlet(1.5, 2);
  const auto w = build_omega(H, 512);
  const double quad = oracle::simpson_log([](double s) { return 2.25 / std::sqrt(s); }, 1e-14, 0.3, 20000) +
                      2.25 * 2.0 * std::sqrt(1e-14);
  CHECK_THAT(w(0.3) - std::sqrt(0.3), WithinRel(quad, 1e-8));
  for (double t : {1e-9, 1e-4, 0.25, 1.0}) CHECK_THAT(w(t), WithinRel(5.5 * std::sqrt(t), 1e-9));
}

TEST_CASE("omega is increasing, concave, with omega(t)/t decreasing", "[flatness]") {
  for (double p : {1.2, 1.5, 1.8, 2.0}) {
    const auto w = build_omega(Hamiltonian::p_dirichlet(p, 2), 256);
    const auto& k = w.knots();
    for (std::size_t i = 1; i < k.size(); ++i) {
      CHECK(w.values()[i] > w.values()[i - 1]);
      CHECK(w.values()[i] / k[i] < w.values()[i - 1] / k[i - 1]);
    }
    for (std::size_t i = 0; i + 1 < k.size(); i += 7) {
      const double a = k[i], b = k[i + 1];
      CHECK(w(0.5 * (a + b)) >= 0.5 * (w(a) + w(b)) * (1.0 - 1e-12));
    }
    // omega(0+) = 0 along a decreasing sequence.
    CHECK(w(1e-10) < w(1e-6));
    CHECK(w(1e-10) <= 0.11 * w(1e-5));  // at worst t^{1/5} decay (p = 1.2)
  }
}

TEST_CASE("divergent Laplacian envelope is rejected", "[flatness]") {
  // Laplacian 1/r is not integrable at 0.
  CustomRadial m{[](double r) { return r * r; }, [](double r) { return 2.0 * r; },
                 [](double r) { return 1.0 / r; }, "log_singular", true};
  const Hamiltonian H(1, m, SingularSet::origin());
  CHECK_THROWS_AS(build_omega(H, 512), IntegrabilityError);
}

TEST_CASE("rho is continuous at 1 and strictly decreasing", "[flatness]") {
  const auto w = build_omega(Hamiltonian::p_dirichlet(1.5, 2), 512);
  const auto rho = build_rho(w, 1.0);
  CHECK_THAT(rho(1.0 - 1e-12), WithinRel(w(1.0), 1e-9));
  CHECK_THAT(rho(1.0 + 1e-12), WithinRel(w(1.0), 1e-9));
  CHECK_THAT(rho(0.25), WithinRel(5.5 * 0.5 / 0.25, 1e-9));
  CHECK_THAT(rho.at_infinity(), WithinRel(0.5 * w(1.0), 1e-14));
  CHECK(rho(1e-10) > 1e5);
  double prev = INFINITY;
  for (double t : log_space(1e-9, 20.0, 400)) {
    CHECK(rho(t) < prev);
    CHECK(rho(t) > rho.at_infinity());
    prev = rho(t);
  }
  CHECK_THROWS_AS(build_rho(w, 0.0), std::invalid_argument);
}

TEST_CASE("Phi for p = 2 equals 1/(rho + 4)", "[flatness]") {
  const auto H = Hamiltonian::p_dirichlet(2.0, 2);
  const Rho rho(build_omega(H, 512), 1.0);
  const auto ts = log_space(1e-9, 3.0, 300);
  const auto phi = build_phi(H, rho, INFINITY, ts);
  // Direct minimisation over the annulus with the closed-form omega.
  auto closed_rho = [](double r) {
    const double w1 = 5.0;
    return r < 1.0 ? (std::sqrt(r) + 4.0 * r) / r : 0.5 * w1 * (std::exp(1.0 - r) + 1.0);
  };
  for (std::size_t j : {10, 100, 200, 250, 290}) {
    const double t = ts[j];
    double best = INFINITY;
    for (double r : log_space(t * (1.0 + 1e-12), 1e4, 20000)) best = std::min(best, 1.0 / (closed_rho(r) + 4.0));
    CHECK_THAT(phi(t), WithinRel(1.0 / (closed_rho(t) + 4.0), 1e-6));
    CHECK(phi(t) <= best * (1.0 + 1e-6));
  }
}

TEST_CASE("Phi vanishes at 0 and passes the Osgood test", "[flatness]") {
  const auto H = Hamiltonian::p_dirichlet(1.5, 2);
  const Rho rho(build_omega(H, 512), H.dimensional_constant());
  const auto phi = build_phi(H, rho, INFINITY, log_space(1e-12, 2.0, 1024));
  CHECK(phi(1e-9) <= 1e-4);
  CHECK(phi.direction() == Monotonicity::increasing);
  const auto coarse = osgood_check(phi);
  REQUIRE(coarse.converged);
  const auto fine = osgood_check(build_phi(H, rho, INFINITY, log_space(1e-12, 2.0, 4096)));
  REQUIRE(fine.converged);
  CHECK(oracle::rel(coarse.value, fine.value) <= 5e-5);

  CHECK_THROWS_AS(build_phi(Hamiltonian::p_dirichlet(3.0, 2), rho, INFINITY, log_space(1e-6, 1.0, 64)),
                  std::domain_error);
  CHECK_NOTHROW(build_phi(Hamiltonian::p_dirichlet(3.0, 2), rho, 10.0, log_space(1e-6, 1.0, 64)));
  CHECK_THROWS_AS(build_phi(H, rho, 1.0, log_space(1e-6, 0.5, 64)), std::invalid_argument);
}

TEST_CASE("T for Phi = sqrt(t) is t^2/4", "[flatness]") {
  const auto phi = tabulate([](double t) { return std::sqrt(t); }, 1e-30, 10.0, 600);
  const auto [T, Tp] = build_T(phi, 2.0, 1024);
  for (double t : log_space(1e-6, 2.0, 50)) {
    CHECK_THAT(T(t), WithinRel(t * t / 4.0, 1e-7));
    CHECK_THAT(Tp(t), WithinRel(t / 2.0, 1e-7));
  }
}

TEST_CASE("T for power Phi follows the p-Laplacian profile", "[flatness]") {
  for (double p : {1.2, 1.5, 1.8}) {
    const double c = 0.7;
    const auto phi = tabulate([&](double t) { return c * std::pow(t, 2.0 - p); }, 1e-200, 1e3, 2000);
    const auto [T, Tp] = build_T(phi, 2.0, 1024);
    for (double t : log_space(1e-6, 2.0, 30))
      CHECK_THAT(T(t), WithinRel(std::pow(c * (p - 1.0) * t, 1.0 / (p - 1.0)), 1e-7));
  }
}

TEST_CASE("Osgood gate rejects non-integrable reciprocals", "[flatness]") {
  const auto linear = tabulate([](double t) { return t; }, 1e-200, 10.0, 2000);
  CHECK_THROWS_AS(build_T(linear, 1.0), IntegrabilityError);
  // t (1 + |log t|) is increasing on (0, 1) and 1/Phi diverges like log log.
  const auto slow = tabulate([](double t) { return t * (1.0 + std::abs(std::log(t))); }, 1e-300, 0.99, 4000);
  CHECK_THROWS_AS(build_T(slow, 0.5), IntegrabilityError);
}

TEST_CASE("T solves the ODE T' = Phi(T)", "[flatness]") {
  const auto k = build_kernel(Hamiltonian::p_dirichlet(1.5, 2), std::sqrt(2.0));
  const auto& ts = k.T.knots();
  for (std::size_t j = 3; j + 3 < ts.size(); j += 5) {
    const double t = ts[j];
    const double fd = (k.T(ts[j + 1]) - k.T(ts[j - 1])) / (ts[j + 1] - ts[j - 1]);
    const double want = k.phi(k.T(t));
    CHECK(std::abs(fd - want) <= 1e-4 * want);
  }
}

TEST_CASE("Theta from T = t^2/4 is t^{3/2}/6", "[flatness]") {
  const auto phi = tabulate([](double t) { return std::sqrt(t); }, 1e-30, 10.0, 600);
  const auto [T, Tp] = build_T(phi, 2.0, 1024);
  const auto [th, thp] = build_theta(T);
  for (double s : log_space(1e-10, 3.9, 40)) {
    CHECK_THAT(th(s), WithinRel(std::pow(s, 1.5) / 6.0, 1e-7));
    CHECK_THAT(thp(s), WithinRel(std::sqrt(s) / 4.0, 1e-7));
  }
  CHECK(th(1e-12) <= 1e-9);
}

TEST_CASE("Theta for power Phi has exponent p/(2(p-1))", "[flatness]") {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto phi = tabulate([&](double t) { return std::pow(t, 2.0 - p); }, 1e-200, 1e3, 2000);
    const auto [T, Tp] = build_T(phi, 2.0, 1024);
    const auto [th, thp] = build_theta(T);
    const double slope = std::log(th(1.0) / th(1e-4)) / std::log(1e4);
    CHECK_THAT(slope, WithinRel(p / (2.0 * (p - 1.0)), 1e-8));
  }
}

TEST_CASE("full chain for p in {1.2, 1.5, 1.8}", "[flatness]") {
  for (double p : {1.2, 1.5, 1.8}) {
    const auto k = build_kernel(Hamiltonian::p_dirichlet(p, 2), std::sqrt(2.0));
    CHECK(k.flat);
    const auto ts = log_space(1e-6 * k.diam, k.diam, 100);
    CHECK(k.theta_prime_identity_error(ts) <= 1e-6);
    CHECK(k.theta_second_identity_error(ts) <= 1e-5);
    const auto L = k.theta_limits();
    CHECK(L.pass);
    CHECK(k.theta(1e-8) <= 1e-4 * k.theta(1e-2));
    // Theta' decays like sqrt(s) near 0 once rho dominates, so the ratio test needs smaller s.
    CHECK(k.thetaprime(1e-16) <= 1e-4 * k.thetaprime(1e-2));
    CHECK(k.thetaprime(1e-8) < k.thetaprime(1e-4));
    double prev = 0.0;
    for (double t : log_space(1e-8, k.diam, 400)) {
      const double v = k.Tprime(t);
      CHECK(v > 0.0);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(k.Tprime(1e-9) < 1e-3);
  }
}

TEST_CASE("classical kernel", "[flatness]") {
  const auto k = classical_kernel(2.0);
  CHECK_FALSE(k.flat);
  CHECK_THAT(k.T(0.3), WithinRel(0.3, 1e-14));
  CHECK_THAT(k.theta.invert(0.7), WithinRel(0.7, 1e-14));
  CHECK_THAT(k.Tprime(0.01), WithinRel(1.0, 1e-14));
  CHECK(k.theta_prime_identity_error(log_space(1e-4, 2.0, 50)) <= 1e-14);
  CHECK_THROWS_AS(classical_kernel(0.0), std::invalid_argument);
}

TEST_CASE("kernel json is bit stable", "[flatness]") {
  const auto H = Hamiltonian::p_dirichlet(1.5, 1);
  KernelOptions opt;
  opt.resolution = 256;
  const nlohmann::json a = build_kernel(H, 2.0, opt), b = build_kernel(H, 2.0, opt);
  CHECK(a.dump() == b.dump());
  const auto back = a.get<FlatKernel>();
  CHECK(nlohmann::json(back).dump() == a.dump());
}
