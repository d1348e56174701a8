#include "bianchi/curvature.hpp"
#include "bianchi/einstein.hpp"
#include "bianchi/errors.hpp"
#include "bianchi/symspace.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace bianchi;

namespace {

IntegrationConfig span(double t0, double t1, double rtol = 1e-10, double atol = 1e-12) {
  IntegrationConfig c;
  c.t0 = t0;
  c.t1 = t1;
  c.rtol = rtol;
  c.atol = atol;
  return c;
}

// d/dt of the exact Kasner family at time t
FlatADMState kasner_derivative(const KasnerParams& p, double t) {
  const double ps[3] = {p.p1, p.p2, p.p3};
  double g[3], k[3];
  for (int i = 0; i < 3; ++i) {
    g[i] = 2 * ps[i] * std::pow(t, 2 * ps[i] - 1);
    k[i] = -ps[i] * (2 * ps[i] - 1) * std::pow(t, 2 * ps[i] - 2);
  }
  return {g[0], g[1], g[2], k[0], k[1], k[2]};
}

double max_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

FlatADMState random_valid_flat(std::mt19937& rng, const MilnorParams& m) {
  std::uniform_real_distribution<double> pos(0.5, 2.0), dir(-1.0, 1.0);
  for (;;) {
    const double x = pos(rng), y = pos(rng), z = pos(rng);
    const auto roots = scale_flat_data(m, x, y, z, {dir(rng), dir(rng), dir(rng)});
    if (!roots.empty() && std::abs(roots.front().kx) < 5 && std::abs(roots.front().kz) < 5) return roots.front();
  }
}

}  // namespace

TEST_CASE("adm_rhs examples") {
  const ADMState flat{SymMatrix::identity(3), SymMatrix(3)};
  const ADMState d0 = adm_rhs(preset("abelian"), flat);
  CHECK(d0.g.max_abs() == 0.0);
  CHECK(d0.k.max_abs() == 0.0);

  for (const KasnerParams p : {KasnerParams{1, 0, 0}, KasnerParams{2. / 3, 2. / 3, -1. / 3}}) {
    const ADMState d = adm_rhs(preset("abelian"), kasner_exact(p, 1.0).embed());
    CHECK(max_diff(d.pack(), kasner_derivative(p, 1.0).embed().pack()) < 1e-12);
    const ADMState d2 = adm_rhs(preset("abelian"), kasner_exact(p, 2.5).embed());
    CHECK(max_diff(d2.pack(), kasner_derivative(p, 2.5).embed().pack()) < 1e-12);
  }
  // a non-vacuum power law is not a solution
  const KasnerParams bad{0.5, 0.5, 0.5};
  CHECK(max_diff(adm_rhs(preset("abelian"), kasner_exact(bad, 1.0).embed()).pack(),
                 kasner_derivative(bad, 1.0).embed().pack()) > 0.1);

  // de Sitter: g = e^{2Ht} I, k = -H g, Lambda = 3H^2
  const double h = 0.7, t = 0.4, e = std::exp(2 * h * t);
  const ADMState ds{SymMatrix::identity(3) * e, SymMatrix::identity(3) * (-h * e)};
  const ADMState dd = adm_rhs(preset("abelian"), ds, 3 * h * h);
  CHECK((dd.g.dense() - 2 * h * e * Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK((dd.k.dense() + 2 * h * h * e * Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(std::abs(hamiltonian_residual(preset("abelian"), ds, 3 * h * h)) < 1e-12);
  CHECK_THROWS_AS(adm_rhs(preset("so3"), ADMState{SymMatrix::diagonal({1, 0, 1}), SymMatrix(3)}), NotPositiveDefinite);
}

TEST_CASE("hamiltonian residual examples") {
  CHECK(hamiltonian_residual(preset("abelian"), {SymMatrix::identity(3), SymMatrix(3)}) == 0.0);
  CHECK(hamiltonian_residual(preset("so3"), {SymMatrix::identity(3), SymMatrix(3)}) == doctest::Approx(1.5));
  const KasnerParams k{2. / 3, 2. / 3, -1. / 3};
  CHECK(std::abs(hamiltonian_residual(preset("abelian"), kasner_exact(k, 1.0).embed())) < 1e-14);
  CHECK(std::abs(flat_hamiltonian_residual({0, 0, 0}, kasner_exact(k, 1.0))) < 1e-14);
  CHECK(flat_hamiltonian_residual({1, 1, 1}, FlatADMState{}) == doctest::Approx(1.5));
  CHECK(flat_hamiltonian_residual({0, 0, 0}, FlatADMState{}) == 0.0);

  std::mt19937 rng(71);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const MilnorParams m{u(rng), u(rng), u(rng)};
    const FlatADMState s{pos(rng), pos(rng), pos(rng), u(rng), u(rng), u(rng)};
    const double lam = u(rng);
    CHECK(std::abs(flat_hamiltonian_residual(m, s, lam) - hamiltonian_residual(from_milnor(m), s.embed(), lam)) <
          1e-11);
  }
}

TEST_CASE("momentum residual") {
  std::mt19937 rng(72);
  const auto c = transport(preset("sl2"), oracle::random_gl(rng, 3));
  const SymMatrix g = oracle::random_spd(rng, 3);
  CHECK(momentum_residual(c, {g, g * 0.7}).norm() < 1e-12);
  const MilnorParams m{1.5, -0.5, 2};
  CHECK(momentum_residual(from_milnor(m), {SymMatrix::diagonal({1, 2, 3}), SymMatrix::diagonal({-1, 4, 0.5})})
            .norm() < 1e-12);
  SymMatrix p12(3);
  p12.set(0, 1, 1.0);
  const Eigen::VectorXd w = momentum_residual(from_milnor(m), {SymMatrix::identity(3), p12});
  CHECK(std::abs(w(0)) < 1e-15);
  CHECK(std::abs(w(1)) < 1e-15);
  CHECK(w(2) == doctest::Approx(m.c - m.b));
}

TEST_CASE("flat equations agree with the full system") {
  std::mt19937 rng(73);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const MilnorParams m{u(rng), u(rng), u(rng)};
    const FlatADMState s{pos(rng), pos(rng), pos(rng), u(rng), u(rng), u(rng)};
    const double lam = u(rng);
    const ADMState full = adm_rhs(from_milnor(m), s.embed(), lam);
    CHECK(max_diff(flat_einstein_rhs(m, s, lam).embed().pack(), full.pack()) < 1e-12 * std::max(1.0, full.pack().lpNorm<Eigen::Infinity>()));
    // diagonal data on a Milnor frame stays diagonal
    CHECK(full.g.max_abs_offdiag() == 0.0);
    CHECK(full.k.max_abs_offdiag() < 1e-14);
  }
  CHECK_THROWS_AS(flat_einstein_rhs({1, 1, 1}, FlatADMState{1, -1, 1, 0, 0, 0}), ValidationError);
}

TEST_CASE("symmetric data on so3 keeps its symmetry slots") {
  const FlatADMState s{1.3, 1.3, 0.4, 0.2, 0.2, -0.7};
  const FlatADMState d = flat_einstein_rhs({1, 1, 1}, s);
  CHECK(d.x == d.y);
  CHECK(d.kx == d.ky);
}

TEST_CASE("kasner family") {
  CHECK(kasner_check({1, 0, 0}));
  CHECK(kasner_check({2. / 3, 2. / 3, -1. / 3}));
  CHECK_FALSE(kasner_check({1. / 3, 1. / 3, 1. / 3}));
  CHECK_FALSE(kasner_check({0, 0, 0}));
  // the trivial exponents are still static vacuum data
  CHECK(hamiltonian_residual(preset("abelian"), kasner_exact({0, 0, 0}, 3.0).embed()) == 0.0);
  const FlatADMState s = kasner_exact({1, 0, 0}, 2.0);
  CHECK(s.x == 4.0);
  CHECK(s.y == 1.0);
  CHECK(s.kx == -2.0);
  CHECK(s.ky == 0.0);
  CHECK_THROWS_AS(kasner_exact({1, 0, 0}, 0.0), ValidationError);
}

TEST_CASE("wick variant") {
  std::mt19937 rng(74);
  const auto c = transport(preset("so3"), oracle::random_gl(rng, 3));
  const ADMState s{oracle::random_spd(rng, 3), oracle::random_sym(rng, 3)};
  const ADMState w = wick_rhs(c, s), a = adm_rhs(c, s);
  CHECK(oracle::rel_err(w.g.dense(), a.g.dense()) == 0.0);
  CHECK(oracle::rel_err((w.k - a.k).dense(), -2.0 * ricci_general(c, s.g).dense()) < 1e-12);
  const ADMState st = wick_rhs(preset("abelian"), {SymMatrix::identity(3), SymMatrix(3)});
  CHECK(st.g.max_abs() == 0.0);
  CHECK(st.k.max_abs() == 0.0);
  CHECK(wick_residual(preset("so3"), {SymMatrix::identity(3), SymMatrix(3)}) == doctest::Approx(1.5));
  CHECK(std::abs(wick_residual(c, s) + hamiltonian_residual(c, s) - 2 * scalar_curvature(c, s.g)) < 1e-10);
}

TEST_CASE("(q, p) conversion") {
  const ADMState s{SymMatrix::diagonal({1, 2, 3}), SymMatrix::diagonal({0.5, -1, 2})};
  const auto [q, p] = to_qp(s);
  CHECK(q == s.g);
  CHECK(p == s.k * -2.0);
  const ADMState back = from_qp(q, p);
  CHECK(back.k == s.k);
}

TEST_CASE("initial data generators") {
  std::mt19937 rng(75);
  std::uniform_real_distribution<double> u(-1.5, 1.5), pos(0.3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const MilnorParams m{u(rng), u(rng), u(rng)};
    const double x = pos(rng), y = pos(rng), z = pos(rng), kx = u(rng), ky = u(rng), lam = u(rng);
    const double kz = complete_flat_kz(m, x, y, z, kx, ky, lam);
    CHECK(std::abs(flat_hamiltonian_residual(m, {x, y, z, kx, ky, kz}, lam)) < 1e-10 * std::max(1.0, std::abs(kz)));

    const auto roots = scale_flat_data(m, x, y, z, {u(rng), u(rng), u(rng)}, lam);
    for (const auto& s : roots) CHECK(std::abs(flat_hamiltonian_residual(m, s, lam)) < 1e-10);
    if (roots.size() == 2) {
      CHECK(roots[0].kx / x + roots[0].ky / y + roots[0].kz / z <= 0.0);
      CHECK(roots[1].kx / x + roots[1].ky / y + roots[1].kz / z >= 0.0);
    }
  }
  CHECK_THROWS_AS(complete_flat_kz({0, 0, 0}, 1, 1, 1, 1, -1), ValidationError);
  // r > 0 and an isotropic direction: r + 6 s^2 has no root
  CHECK(scale_flat_data({1, 1, 1}, 1, 1, 1, {1, 1, 1}).empty());
  const auto shear = scale_flat_data({1, 1, 1}, 1, 1, 1, {1, -1, 0});
  REQUIRE(shear.size() == 2);
  CHECK(std::abs(shear[0].kx) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("run_einstein reproduces Kasner") {
  for (const KasnerParams p : {KasnerParams{2. / 3, 2. / 3, -1. / 3}, KasnerParams{1, 0, 0}}) {
    IntegrationConfig cfg = span(1, 10);
    cfg.sample_times = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    const Trajectory t = run_einstein(preset("abelian"), kasner_exact(p, 1.0).embed(), cfg);
    REQUIRE(t.completed());
    REQUIRE(t.size() == 10);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Eigen::VectorXd want = kasner_exact(p, t.times[i]).embed().pack();
      for (int j = 0; j < want.size(); ++j)
        CHECK(std::abs(t.states[i](j) - want(j)) <= 1e-6 * std::max(std::abs(want(j)), 1e-3));
    }
    CHECK(t.max_abs_channel("ham_residual") < 1e-9);
    CHECK(t.max_abs_channel("mom_residual_max") < 1e-12);

    const Trajectory f = run_einstein_flat({0, 0, 0}, kasner_exact(p, 1.0), cfg);
    REQUIRE(f.completed());
    CHECK(std::abs(f.states.back()(0) - std::pow(10.0, 2 * p.p1)) < 1e-6 * std::pow(10.0, 2 * p.p1));
  }
}

TEST_CASE("Minkowski data is constant") {
  const ADMState s{SymMatrix::diagonal({1, 2, 3}), SymMatrix(3)};
  const Trajectory t = run_einstein(preset("abelian"), s, span(0, 5));
  CHECK(t.completed());
  for (const auto& v : t.states) CHECK(v == s.pack());
}

TEST_CASE("invalid data is rejected unless allowed") {
  const ADMState round{SymMatrix::identity(3), SymMatrix(3)};
  CHECK_THROWS_AS(run_einstein(preset("so3"), round, span(0, 1)), ValidationError);
  CHECK_THROWS_AS(run_einstein_flat({1, 1, 1}, FlatADMState{}, span(0, 1)), ValidationError);
  EinsteinOptions opt;
  opt.allow_invalid = true;
  const Trajectory t = run_einstein(preset("so3"), round, span(0, 0.5), opt);
  CHECK(t.size() > 1);
  CHECK(t.channel("ham_residual").front() == doctest::Approx(1.5));

  const ConstraintReport rep = check_constraints(preset("so3"), round, 0.0);
  CHECK_FALSE(rep.valid);
  CHECK(rep.hamiltonian == doctest::Approx(1.5));
  CHECK(check_constraints(preset("abelian"), kasner_exact({1, 0, 0}, 1).embed(), 0.0).valid);
}

TEST_CASE("constraints propagate on so3 and SOL flats") {
  std::mt19937 rng(76);
  for (const MilnorParams m : {MilnorParams{1, 1, 1}, MilnorParams{0, -1, 1}})
    for (int trial = 0; trial < 3; ++trial) {
      const FlatADMState s0 = random_valid_flat(rng, m);
      const Trajectory t = run_einstein(from_milnor(m), s0.embed(), span(0, 2));
      REQUIRE(t.size() > 1);
      // bound relative to the size of the terms the residual is made of
      const double h0 = std::abs(t.channel("ham_residual").front());
      const auto& r = t.channel("r");
      for (std::size_t i = 0; i < t.size(); ++i) {
        const ADMState s = ADMState::unpack(3, t.states[i]);
        const Eigen::MatrixXd a = s.g.dense().inverse() * s.k.dense();
        const double terms = std::abs(r[i]) + a.trace() * a.trace() + (a * a).trace();
        CHECK(std::abs(t.channel("ham_residual")[i]) < 100 * (h0 + 1e-10 * std::max(1.0, terms)));
        CHECK(t.channel("mom_residual_max")[i] < 1e-10 * std::max(1.0, terms));
      }
    }
}

TEST_CASE("Taub-NUT set is invariant") {
  const MilnorParams m{1, 1, 1};
  const double x = 1.2, z = 0.7, kx = -0.3;
  const FlatADMState s0{x, x, z, kx, kx, complete_flat_kz(m, x, x, z, kx, kx)};
  const Trajectory t = run_einstein_flat(m, s0, span(0, 5));
  REQUIRE(t.size() > 1);
  CHECK(taubnut_deviation(t, m) < 1e-9);

  FlatADMState off = s0;
  off.y = 1.5;
  EinsteinOptions opt;
  opt.allow_invalid = true;
  const Trajectory t2 = run_einstein_flat(m, off, span(0, 0.1), opt);
  CHECK(taubnut_deviation(t2, m) >= 0.3 - 1e-12);
  CHECK_THROWS_AS(taubnut_deviation(t, {1, 1, -1}), ValidationError);
}

TEST_CASE("valid diagonal data survives a change of basis") {
  std::mt19937 rng(77);
  for (const MilnorParams m : {MilnorParams{1, 1, 1}, MilnorParams{1, 1, -1}, MilnorParams{0, -1, 1},
                               MilnorParams{0, 1, 1}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const FlatADMState s = random_valid_flat(rng, m);
      const Eigen::MatrixXd gl = oracle::random_gl(rng, 3);
      const auto c = transport(from_milnor(m), gl);
      const ADMState moved{congruence(gl.transpose(), s.embed().g), congruence(gl.transpose(), s.embed().k)};
      CHECK(std::abs(hamiltonian_residual(c, moved)) < 1e-9);
      CHECK(momentum_residual(c, moved).norm() < 1e-9);

      const MilnorFrame f = milnor_frame(c, moved.g);
      const Eigen::MatrixXd k = congruence(f.basis.transpose(), moved.k).dense();
      CHECK(k.norm() > 0.0);
      const double off = std::max({std::abs(k(0, 1)), std::abs(k(0, 2)), std::abs(k(1, 2))});
      CHECK(off < 1e-8 * std::max(1.0, k.norm()));
      std::array<double, 3> got{k(0, 0), k(1, 1), k(2, 2)}, want{s.kx / s.x, s.ky / s.y, s.kz / s.z};
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      for (int i = 0; i < 3; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-8);
    }
  }
}
