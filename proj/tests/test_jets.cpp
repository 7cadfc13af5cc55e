#include <catch_amalgamated.hpp>

#include <cmath>

#include <flatvisc/jets.hpp>

using namespace flatvisc;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = 3.14159265358979323846;

Mat m1(double x) {
  Mat X(1, 1);
  X(0, 0) = x;
  return X;
}

SampledFunction line(double h, const std::function<double(double)>& f) {
  return SampledFunction::sample(Box::interval(-1.0, 1.0), h, [&](const Vec& x) { return f(x(0)); });
}

SampledFunction square(double h, const std::function<double(double, double)>& f) {
  return SampledFunction::sample(Box::square(-1.0, 1.0), h, [&](const Vec& x) { return f(x(0), x(1)); });
}

std::size_t middle(const SampledFunction& u) { return u.size() / 2; }

}  // namespace

TEST_CASE("jets are symmetrised and sized", "[jets]") {
  Mat X(2, 2);
  X << 1.0, 2.0, 0.0, 3.0;
  const Jet j(make_vec({0.0, 1.0}), X);
  CHECK(j.X(0, 1) == 1.0);
  CHECK(j.X(1, 0) == 1.0);
  CHECK_THROWS_AS(Jet(make_vec({0.0}), X), std::invalid_argument);
}

TEST_CASE("touch tests on affine, quadratic and cone data", "[jets]") {
  const double h = 1.0 / 100, r = 4.0 * h;
  const auto aff = line(h, [](double x) { return 0.3 * x - 0.2; });
  const Jet flat_jet(make_vec({0.3}), m1(0.0));
  for (std::size_t k : {std::size_t{50}, middle(aff), std::size_t{150}}) {
    CHECK(touch_test_upper(aff, k, flat_jet, r, 0.0));
    CHECK(touch_test_lower(aff, k, flat_jet, r, 0.0));
  }

  const auto sq = line(h, [](double x) { return x * x; });
  const std::size_t o = middle(sq);
  REQUIRE(sq.coord(o)(0) == 0.0);
  for (double eta : {0.0, 0.05, 0.5}) {
    CHECK(touch_test_upper(sq, o, Jet(make_vec({0.0}), m1(2.0 + 2.0 * eta)), r, eta));
    CHECK(touch_test_upper(sq, o, Jet(make_vec({0.0}), m1(2.0 - 2.0 * eta)), r, eta));
    CHECK_FALSE(touch_test_upper(sq, o, Jet(make_vec({0.0}), m1(2.0 - 2.0 * eta - 0.01)), r, eta));
    CHECK(touch_test_lower(sq, o, Jet(make_vec({0.0}), m1(2.0 + 2.0 * eta)), r, eta));
    CHECK_FALSE(touch_test_lower(sq, o, Jet(make_vec({0.0}), m1(2.0 + 2.0 * eta + 0.01)), r, eta));
  }

  const auto cone = line(h, [](double x) { return std::abs(x); });
  CHECK_FALSE(touch_test_upper(cone, o, Jet(make_vec({0.0}), m1(0.0)), r, 10.0 * h));
  // |z| <= X z^2 / 2 on the ball needs X >= 2 / h.
  CHECK(touch_test_upper(cone, o, Jet(make_vec({0.0}), m1(2.0 / h)), r, 0.0));
  CHECK_FALSE(touch_test_upper(cone, o, Jet(make_vec({0.0}), m1(1.9 / h)), r, 0.0));
  // On a ball of radius h a subjet needs X <= 2 (1 - |p|) / h.
  for (double p : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
    CHECK(touch_test_lower(cone, o, Jet(make_vec({p}), m1(2.0 * (1.0 - std::abs(p)) / h)), h, 0.0));
    CHECK_FALSE(touch_test_lower(cone, o, Jet(make_vec({p}), m1(2.1 * (1.0 - std::abs(p)) / h + 1.0)), h, 0.0));
  }
  CHECK_FALSE(touch_test_lower(cone, o, Jet(make_vec({1.1}), m1(0.0)), r, 0.0));
}

TEST_CASE("touch tests reject balls that do not fit", "[jets]") {
  const double h = 1.0 / 50;
  const auto u = line(h, [](double x) { return x; });
  const Jet j(make_vec({1.0}), m1(0.0));
  CHECK_THROWS_AS(touch_test_upper(u, 2, j, 4.0 * h, 0.0), std::domain_error);
  CHECK_THROWS_AS(touch_test_upper(u, middle(u), j, 0.5 * h, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(touch_test_upper(u, middle(u), Jet(make_vec({1.0, 0.0}), Mat::Zero(2, 2)), h, 0.0),
                  std::invalid_argument);
}

TEST_CASE("probes on quadratic data recover the exact jet", "[jets]") {
  const double h = 1.0 / 32;
  const auto u = square(h, [](double x, double y) { return 1.0 + 0.5 * x - y + 1.5 * x * x + 0.7 * x * y - 0.4 * y * y; });
  const std::size_t k = u.index({40, 24, 0});
  const Vec x = u.coord(k);
  const auto set = generate_probes(u, k, SingularSet::empty());
  REQUIRE_FALSE(set.probes.empty());
  const Jet& base = set.probes.front().jet;
  CHECK_THAT(base.p(0), WithinAbs(0.5 + 3.0 * x(0) + 0.7 * x(1), 1e-11));
  CHECK_THAT(base.p(1), WithinAbs(-1.0 + 0.7 * x(0) - 0.8 * x(1), 1e-11));
  CHECK_THAT(base.X(0, 0), WithinAbs(3.0, 1e-9));
  CHECK_THAT(base.X(0, 1), WithinAbs(0.7, 1e-9));
  CHECK_THAT(base.X(1, 1), WithinAbs(-0.8, 1e-9));
  CHECK(set.fit_radii.front() == 4.0 * h);
  CHECK(set.slack == default_slack(u));
}

TEST_CASE("probes flag gradients near K", "[jets]") {
  const double h = 1.0 / 100;
  const auto zero = line(h, [](double) { return 0.0; });
  const auto set = generate_probes(zero, middle(zero), SingularSet::origin());
  for (const auto& pr : set.probes) {
    if (pr.origin == "shift") continue;
    CHECK(pr.jet.p(0) == 0.0);
    CHECK(pr.k_excluded);
  }

  const auto s = line(h, [](double x) { return std::sin(pi * x); });
  const auto at = [&](double x) { return static_cast<std::size_t>(std::lround((x + 1.0) / h)); };
  const auto top = generate_probes(s, at(0.5), SingularSet::origin());
  CHECK(std::abs(top.probes.front().jet.p(0)) <= 1e-6);
  CHECK(top.probes.front().k_excluded);
  const auto slope = generate_probes(s, at(0.25), SingularSet::origin());
  // The quadratic fit is off by the cubic term, about pi^3 r^2 / 10.
  CHECK_THAT(slope.probes.front().jet.p(0), WithinAbs(pi / std::sqrt(2.0), 1e-2));
  CHECK_FALSE(slope.probes.front().k_excluded);

  CHECK_THROWS_AS(generate_probes(s, 1, SingularSet::origin()), std::domain_error);
}

TEST_CASE("feeble check on harmonic and subharmonic quadratics", "[jets]") {
  const double h = 1.0 / 32;
  const auto H = Hamiltonian::p_dirichlet(2.0, 2);
  const auto harm = square(h, [](double x, double y) { return x * x - y * y; });
  const std::size_t k = harm.index({40, 24, 0});
  const auto v = feeble_check(harm, H, k, generate_probes(harm, k, H.singular_set()), 1e-8);
  CHECK(v.kind == VerdictKind::pass);
  CHECK(v.sub.kind == VerdictKind::pass);
  CHECK(v.super.kind == VerdictKind::pass);
  CHECK(G(H, Jet(make_vec({1.0, 0.0}), (Mat(2, 2) << 2.0, 0.0, 0.0, -2.0).finished())) == 0.0);

  const auto bowl = square(h, [](double x, double y) { return x * x + y * y; });
  const auto w = feeble_check(bowl, H, k, generate_probes(bowl, k, H.singular_set()), 1e-8);
  CHECK(w.kind == VerdictKind::fail);
  CHECK(w.sub.kind == VerdictKind::pass);
  CHECK(w.super.kind == VerdictKind::fail);
  REQUIRE(w.super.witness.has_value());
  // F_AA = 2I for p = 2, so the witness has G = 2 tr X > 0.
  CHECK(G(H, *w.super.witness) > 1e-8);
  CHECK_THAT(G(H, Jet(make_vec({0.3, 0.1}), 2.0 * Mat::Identity(2, 2))), WithinAbs(8.0, 1e-12));
}

TEST_CASE("verify_region on exact solutions", "[jets]") {
  const auto H2 = Hamiltonian::p_dirichlet(2.0, 2);
  const auto harm = square(1.0 / 32, [](double x, double y) { return std::exp(x) * std::sin(y); });
  const auto rep = verify_region(harm, H2, 0.0, 1e-8);
  CHECK(rep.ok());
  CHECK(rep.pass > 3000);
  const auto aff = line(1.0 / 100, [](double x) { return 0.3 * x + 0.1; });
  for (double p : {1.2, 1.5, 3.0}) {
    const auto r = verify_region(aff, Hamiltonian::p_dirichlet(p, 1), 0.0, 1e-8);
    CHECK(r.ok());
    CHECK(r.vacuous == 0);
  }
  // Zero gradient everywhere is K for p = 2: nothing to test.
  const auto c = line(1.0 / 100, [](double) { return 0.7; });
  const auto rc = verify_region(c, Hamiltonian::p_dirichlet(2.0, 1), 0.0, 1e-8);
  CHECK(rc.pass == 0);
  CHECK(rc.fail == 0);
  CHECK(rc.vacuous > 0);
}

TEST_CASE("verify_region locates the cone kinks", "[jets]") {
  const double h = 1.0 / 100;
  const auto H = Hamiltonian::p_dirichlet(2.0, 1);
  const auto up = line(h, [](double x) { return std::abs(x); });
  const auto r = verify_region(up, H, 0.0, 1e-8);
  CHECK(r.fail == 1);
  CHECK(r.super_fail == 1);
  CHECK(r.sub_fail == 0);
  REQUIRE_FALSE(r.witnesses.empty());
  CHECK(r.witnesses.front().node == middle(up));
  CHECK(r.witnesses.front().side == "super");
  CHECK(r.verdicts[middle(up)] == VerdictKind::fail);

  const auto down = line(h, [](double x) { return -std::abs(x); });
  const auto d = verify_region(down, H, 0.0, 1e-8);
  CHECK(d.fail == 1);
  CHECK(d.sub_fail == 1);
  CHECK(d.super_fail == 0);

  const auto j = nlohmann::json(d);
  CHECK(j.at("fail").get<std::size_t>() == 1);
  CHECK(j.at("witnesses").at(0).at("side") == "sub");
}

TEST_CASE("verify_region honours the inner margin and dimension", "[jets]") {
  const double h = 1.0 / 100;
  const auto u = line(h, [](double x) { return std::abs(x); });
  const auto r = verify_region(u, Hamiltonian::p_dirichlet(2.0, 1), 0.5, 1e-8);
  CHECK(r.pass + r.fail + r.vacuous == 101);
  CHECK_THROWS_AS(verify_region(u, Hamiltonian::p_dirichlet(2.0, 2), 0.0, 1e-8), std::invalid_argument);
}
