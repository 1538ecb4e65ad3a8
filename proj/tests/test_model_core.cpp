#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfg/errors.hpp"
#include "mfg/instance.hpp"
#include "mfg/prob.hpp"
#include "mfg/profile.hpp"

using namespace mfg;

namespace {

MFGInstance decoupled_instance() {
  MFGInstance inst;
  inst.n_states = 2;
  inst.n_actions = 2;
  inst.beta = 0.5;
  inst.tau = 1.0;
  inst.eta_p = 0.0;
  inst.c0 = {{1.0, 1.0}, {1.0, 1.0}};
  inst.wc = {{{0.0, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.0, 0.0}}};
  Vec row = {0.5, 0.5};
  inst.p0 = {{row, row}, {row, row}};
  inst.p1 = {{{row, row}, {row, row}}, {{row, row}, {row, row}}};
  inst.mu0 = {0.5, 0.5};
  inst.validate();
  return inst;
}

Vec random_measure(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Vec v(n);
  double s = 0.0;
  for (double& w : v) {
    w = u(rng);
    s += w;
  }
  for (double& w : v) w /= s;
  return v;
}

}  // namespace

TEST_CASE("tv_distance basic values") {
  CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tv_distance({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK(tv_distance({0.7, 0.3}, {0.5, 0.5}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(tv_distance({1.0}, {0.5, 0.5}), InputError);
}

TEST_CASE("tv_distance is a metric on sampled triples") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    Vec a = random_measure(rng, 4), b = random_measure(rng, 4), c = random_measure(rng, 4);
    CHECK(tv_distance(a, b) == tv_distance(b, a));  // symmetric exactly
    CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
    CHECK(tv_distance(a, b) >= 0.0);
    CHECK(tv_distance(a, b) <= 1.0);
  }
}

TEST_CASE("simplex validation rejects rather than renormalizes") {
  CHECK(is_simplex({0.25, 0.75}));
  CHECK(!is_simplex({0.3, 0.8}));
  CHECK(!is_simplex({-0.1, 1.1}));
  CHECK_THROWS_AS(validate_simplex({0.5, 0.5 + 1e-6}), InputError);
  CHECK_NOTHROW(validate_simplex({0.5, 0.5 + 1e-13}));
  CHECK(uniform_vec(4) == Vec{0.25, 0.25, 0.25, 0.25});
  CHECK(delta_vec(3, 1) == Vec{0.0, 1.0, 0.0});
}

TEST_CASE("eval_cost affine form") {
  MFGInstance inst = decoupled_instance();
  inst.wc[0][1] = {0.5, -0.5};
  SUBCASE("no coupling returns c0") {
    CHECK(eval_cost(inst, 0, 0, {0.4, 0.6}) == 1.0);
  }
  SUBCASE("point mass picks one weight") {
    CHECK(eval_cost(inst, 0, 1, delta_vec(2, 0)) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(eval_cost(inst, 0, 1, delta_vec(2, 1)) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("hand evaluation") {
    // 1 + 0.5*0.4 - 0.5*0.6 = 0.9
    CHECK(eval_cost(inst, 0, 1, {0.4, 0.6}) == doctest::Approx(0.9).epsilon(1e-15));
  }
  SUBCASE("index range") {
    CHECK_THROWS_AS(eval_cost(inst, 2, 0, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(eval_cost(inst, 0, 0, {0.5, 0.5, 0.0}), InputError);
  }
}

TEST_CASE("eval_transition mixture form") {
  MFGInstance inst = decoupled_instance();
  inst.eta_p = 0.5;
  inst.p0[0][0] = {1.0, 0.0};
  inst.p1[0][0][0] = {0.0, 1.0};
  inst.p1[0][0][1] = {0.0, 1.0};
  SUBCASE("hand evaluation of the mixture") {
    Vec out = eval_transition(inst, 0, 0, delta_vec(2, 0));
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("eta_p zero returns p0") {
    inst.eta_p = 0.0;
    CHECK(eval_transition(inst, 0, 0, {0.3, 0.7}) == inst.p0[0][0]);
  }
  SUBCASE("output is a simplex for random mu") {
    std::mt19937_64 rng(17);
    MFGInstance g = make_contractive_instance(4, 3, 23, ContractionTarget::finite_horizon);
    for (int k = 0; k < 100; ++k) {
      Vec mu = random_measure(rng, 4);
      Vec out = eval_transition(g, k % 4, k % 3, mu);
      double s = 0.0;
      for (double v : out) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("instance validation catches shape and simplex errors") {
  MFGInstance inst = decoupled_instance();
  CHECK_NOTHROW(inst.validate());
  SUBCASE("bad discount") {
    inst.beta = 1.0;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("bad transition row") {
    inst.p0[1][0] = {0.6, 0.6};
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("bad mu0") {
    inst.mu0 = {0.9, 0.2};
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("cost bound") {
    inst.c0[0][0] = -2.0;
    inst.wc[0][0] = {0.5, -0.25};
    CHECK(inst.cost_bound() == doctest::Approx(2.75).epsilon(1e-15));
  }
}

TEST_CASE("profile from raw constants") {
  SUBCASE("barL closed form") {
    LipschitzProfile p = profile_from_raw(0.1, 0.5, 0.9, 1.0);
    // 0.1 * (1 + 0.225) / (1 - 0.225)
    CHECK(p.bar_l == doctest::Approx(0.1 * 1.225 / 0.775).epsilon(1e-12));
    CHECK(p.bar_l == doctest::Approx(0.158065).epsilon(1e-5));
    CHECK(p.has_raw);
  }
  SUBCASE("small variant is smaller") {
    LipschitzProfile big = profile_from_raw(0.1, 0.5, 0.9, 1.0, false);
    LipschitzProfile small = profile_from_raw(0.1, 0.5, 0.9, 1.0, true);
    CHECK(small.bar_l == doctest::Approx(0.1 / 0.775).epsilon(1e-12));
    CHECK(small.bar_l < big.bar_l);
  }
  SUBCASE("derived-constant identities") {
    LipschitzProfile p = profile_from_raw(0.3, 0.4, 0.8, 2.0);
    CHECK(p.blk == doctest::Approx(p.bar_l * p.k1 / p.rho).epsilon(1e-15));
    CHECK(p.hat_k == doctest::Approx(p.bar_k + p.blk).epsilon(1e-15));
    CHECK(p.l1k == doctest::Approx(p.l1 * p.k1 / p.rho).epsilon(1e-15));
    CHECK(p.r_const == doctest::Approx(p.beta * (p.bar_k + p.l1k)).epsilon(1e-15));
    CHECK(p.bar_k == doctest::Approx(1.5 * p.k1 + p.k1 * p.bar_l / (2.0 * p.rho * (1.0 - p.beta)))
                         .epsilon(1e-12));
    CHECK(p.hat_k >= p.bar_k);
  }
  SUBCASE("degenerate regularization rejected") {
    CHECK_THROWS_AS(profile_from_raw(0.1, 3.0, 0.9, 1.0), ConditionError);  // beta*K1/2 >= 1
  }
}

TEST_CASE("composite profile carries only products") {
  LipschitzProfile p = profile_from_composite(0.9, 0.2, 0.08, 0.04);
  CHECK(!p.has_raw);
  CHECK(std::isnan(p.l1));
  CHECK(std::isnan(p.k1));
  CHECK(p.hat_k == doctest::Approx(0.28).epsilon(1e-15));
  CHECK(p.blk == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(p.l1k == doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("compute_lipschitz_profile on the decoupled instance") {
  MFGInstance inst = decoupled_instance();
  LipschitzProfile p = compute_lipschitz_profile(inst);
  CHECK(p.l1 == 0.0);
  CHECK(p.k1 == 0.0);
  CHECK(p.bar_l == 0.0);
  CHECK(p.bar_k == 0.0);
  CHECK(p.zero_coupling());
}

TEST_CASE("one-step Lipschitz inequalities hold for computed constants") {
  for (std::uint64_t seed : {7ull, 23ull}) {
    MFGInstance inst = make_contractive_instance(4, 3, seed, ContractionTarget::finite_horizon);
    LipschitzProfile p = compute_lipschitz_profile(inst);
    std::mt19937_64 rng(seed * 31 + 1);
    std::uniform_int_distribution<int> sx(0, inst.n_states - 1), sa(0, inst.n_actions - 1);
    double worst = 1e300;
    for (int k = 0; k < 1000; ++k) {
      int x = sx(rng), a = sa(rng), x2 = sx(rng), a2 = sa(rng);
      Vec mu = random_measure(rng, 4), nu = random_measure(rng, 4);
      const double bracket =
          (x != x2 ? 1.0 : 0.0) + (a != a2 ? 2.0 : 0.0) + 2.0 * tv_distance(mu, nu);
      const double dc = std::fabs(eval_cost(inst, x, a, mu) - eval_cost(inst, x2, a2, nu));
      const double dp = tv_distance(eval_transition(inst, x, a, mu), eval_transition(inst, x2, a2, nu));
      worst = std::min(worst, p.l1 * bracket - dc);
      worst = std::min(worst, (p.k1 / 2.0) * bracket - dp);
    }
    CHECK(worst >= -1e-10);
  }
}

TEST_CASE("generator determinism and contraction targets") {
  MFGInstance a = make_contractive_instance(4, 3, 7, ContractionTarget::finite_horizon);
  MFGInstance b = make_contractive_instance(4, 3, 7, ContractionTarget::finite_horizon);
  CHECK(instance_to_json(a) == instance_to_json(b));

  LipschitzProfile pf = compute_lipschitz_profile(a);
  CHECK(std::sqrt(pf.hat_k * pf.beta) + std::sqrt((pf.hat_k - pf.bar_k) * pf.beta) < 1.0);

  MFGInstance c = make_contractive_instance(4, 3, 7, ContractionTarget::infinite_horizon);
  LipschitzProfile pc = compute_lipschitz_profile(c);
  CHECK(pc.bar_k + pc.k1 * pc.bar_l / (pc.rho * (1.0 - pc.beta)) < 1.0);

  MFGInstance single = make_contractive_instance(1, 1, 3, ContractionTarget::finite_horizon);
  LipschitzProfile ps = compute_lipschitz_profile(single);
  CHECK(ps.zero_coupling());
}

TEST_CASE("perturb_cost alternates signs and leaves everything else intact") {
  MFGInstance a = make_contractive_instance(3, 2, 5, ContractionTarget::infinite_horizon);
  MFGInstance b = perturb_cost(a, 1e-3);
  CHECK(b.c0[0][0] == doctest::Approx(a.c0[0][0] + 1e-3).epsilon(1e-15));
  CHECK(b.c0[0][1] == doctest::Approx(a.c0[0][1] - 1e-3).epsilon(1e-15));
  CHECK(b.c0[1][1] == doctest::Approx(a.c0[1][1] + 1e-3).epsilon(1e-15));
  CHECK(b.p0 == a.p0);
  CHECK(b.wc == a.wc);
  CHECK(b.mu0 == a.mu0);
}

TEST_CASE("instance JSON round trip is bit exact") {
  MFGInstance a = make_contractive_instance(3, 2, 41, ContractionTarget::finite_horizon);
  std::string j1 = instance_to_json(a);
  MFGInstance b = instance_from_json(j1);
  CHECK(instance_to_json(b) == j1);
  CHECK_THROWS_AS(instance_from_json("{not json"), InputError);
  CHECK_THROWS_AS(instance_from_json("{\"n_states\": 1}"), InputError);
}

TEST_CASE("profile JSON forms") {
  LipschitzProfile raw = profile_from_json(R"({"l1":0.1,"k1":0.5,"beta":0.9,"rho":1.0})");
  CHECK(raw.has_raw);
  CHECK(raw.bar_l == doctest::Approx(0.1 * 1.225 / 0.775).epsilon(1e-12));

  LipschitzProfile fig = profile_from_json(
      R"({"beta":0.9,"bar_k":0.2,"k1_over_rho":1.0,"bar_l":0.08,"l1_k1_over_rho":0.04})");
  CHECK(fig.blk == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(fig.l1k == doctest::Approx(0.04).epsilon(1e-15));

  LipschitzProfile rem = profile_from_json(R"({"beta":0.9833,"bar_k":0.6,"bar_l_k1_over_rho":0.01})");
  CHECK(rem.blk == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(rem.hat_k == doctest::Approx(0.61).epsilon(1e-15));

  std::string out = profile_to_json(fig);
  LipschitzProfile back = profile_from_json(out);
  CHECK(back.blk == fig.blk);
  CHECK(back.bar_k == fig.bar_k);
}
