#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mfg/errors.hpp"
#include "mfg/instance.hpp"
#include "mfg/prob.hpp"
#include "mfg/profile.hpp"
#include "mfg/regdp.hpp"

using namespace mfg;

namespace {

double l1_norm_diff(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

MeasureFlow random_flow(std::mt19937_64& rng, const MFGInstance& inst, int T) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  MeasureFlow f = MeasureFlow::constant(T, inst.mu0);
  for (int t = 1; t <= T; ++t) {
    double s = 0.0;
    for (double& v : f.mu[t]) {
      v = u(rng);
      s += v;
    }
    for (double& v : f.mu[t]) v /= s;
  }
  return f;
}

}  // namespace

TEST_CASE("soft_min closed forms and sandwich") {
  SUBCASE("constant row") {
    CHECK(soft_min({2.0, 2.0, 2.0}, 0.5) == doctest::Approx(2.0 - 0.5 * std::log(3.0)).epsilon(1e-15));
  }
  SUBCASE("two-entry hand computation") {
    // weights 1 and 1/9: -log(10/9)
    CHECK(soft_min({0.0, std::log(9.0)}, 1.0) ==
          doctest::Approx(-std::log(10.0 / 9.0)).epsilon(1e-14));
    CHECK(soft_min({0.0, std::log(9.0)}, 1.0) == doctest::Approx(-0.105361).epsilon(1e-5));
  }
  SUBCASE("hard-min limit") {
    CHECK(soft_min({3.0, 5.0}, 1e-8) == doctest::Approx(3.0).epsilon(1e-6));
  }
  SUBCASE("sandwich on random rows") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 500; ++k) {
      Vec h(5);
      for (double& v : h) v = u(rng);
      const double m = *std::min_element(h.begin(), h.end());
      const double sm = soft_min(h, 0.7);
      CHECK(sm <= m);
      CHECK(sm >= m - 0.7 * std::log(5.0));
    }
  }
  SUBCASE("overflow safety via max shift") {
    CHECK(std::isfinite(soft_min({-5000.0, -4999.0}, 1.0)));
  }
  SUBCASE("NaN rejected") {
    CHECK_THROWS_AS(soft_min({0.0, std::nan("")}, 1.0), InputError);
  }
}

TEST_CASE("softmax_policy closed forms") {
  SUBCASE("constant row gives uniform") {
    Vec p = softmax_policy({1.0, 1.0, 1.0, 1.0}, 2.0);
    for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("hand computation") {
    Vec p = softmax_policy({0.0, std::log(9.0)}, 1.0);
    CHECK(p[0] == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-14));
  }
  SUBCASE("shift invariance is exact") {
    Vec h = {0.3, -1.2, 4.0};
    Vec a = softmax_policy(h, 0.5);
    for (double& v : h) v += 7.25;
    Vec b = softmax_policy(h, 0.5);
    CHECK(a == b);
  }
  SUBCASE("rows sum to one") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
      Vec h(6);
      for (double& v : h) v = u(rng);
      Vec p = softmax_policy(h, 0.3);
      double s = 0.0;
      for (double v : p) s += v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("NaN rejected") {
    CHECK_THROWS_AS(softmax_policy({std::nan(""), 1.0}, 1.0), InputError);
  }
}

TEST_CASE("softmax minimizer is (1/tau)-Lipschitz in sup norm") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), du(-0.5, 0.5);
  for (double tau : {0.5, 1.0, 2.0}) {
    double worst = 1e300;
    for (int k = 0; k < 3000; ++k) {
      Vec h(4), g(4);
      double dinf = 0.0;
      for (int i = 0; i < 4; ++i) {
        h[i] = u(rng);
        g[i] = h[i] + du(rng);
        dinf = std::max(dinf, std::fabs(h[i] - g[i]));
      }
      const double l1 = l1_norm_diff(softmax_policy(h, tau), softmax_policy(g, tau));
      worst = std::min(worst, (1.0 / tau) * dinf - l1);
    }
    CHECK(worst >= -1e-10);
  }
}

TEST_CASE("backward_induction recursion") {
  SUBCASE("myopic case beta = 0") {
    MFGInstance inst = make_contractive_instance(3, 2, 9, ContractionTarget::finite_horizon);
    inst.beta = 0.0;
    std::mt19937_64 rng(4);
    MeasureFlow f = random_flow(rng, inst, 4);
    BackwardResult r = backward_induction(inst, f);
    for (int t = 0; t <= 4; ++t)
      for (int x = 0; x < inst.n_states; ++x)
        for (int a = 0; a < inst.n_actions; ++a)
          CHECK(r.q.h[t][x][a] == doctest::Approx(eval_cost(inst, x, a, f.mu[t])).epsilon(1e-14));
  }
  SUBCASE("T=1 single state two actions hand computation") {
    MFGInstance inst;
    inst.n_states = 1;
    inst.n_actions = 2;
    inst.beta = 0.5;
    inst.tau = 1.0;
    inst.eta_p = 0.0;
    inst.c0 = {{0.0, 1.0}};
    inst.wc = {{{0.0}, {0.0}}};
    inst.p0 = {{{1.0}, {1.0}}};
    inst.p1 = {{{{1.0}}, {{1.0}}}};
    inst.mu0 = {1.0};
    inst.validate();
    MeasureFlow f = MeasureFlow::constant(1, inst.mu0);
    BackwardResult r = backward_induction(inst, f);
    CHECK(r.q.h[1][0][0] == 0.0);
    CHECK(r.q.h[1][0][1] == 1.0);
    const double v1 = -std::log(1.0 + std::exp(-1.0));
    CHECK(r.value[1][0] == doctest::Approx(v1).epsilon(1e-14));
    CHECK(r.q.h[0][0][0] == doctest::Approx(0.0 + 0.5 * v1).epsilon(1e-14));
    CHECK(r.q.h[0][0][1] == doctest::Approx(1.0 + 0.5 * v1).epsilon(1e-14));
  }
  SUBCASE("decoupled instance ignores the flow") {
    MFGInstance inst = make_contractive_instance(3, 2, 9, ContractionTarget::finite_horizon);
    inst.eta_p = 0.0;
    for (auto& xa : inst.wc)
      for (auto& row : xa) row.assign(inst.n_states, 0.0);
    std::mt19937_64 rng(6);
    MeasureFlow f1 = random_flow(rng, inst, 5), f2 = random_flow(rng, inst, 5);
    BackwardResult r1 = backward_induction(inst, f1), r2 = backward_induction(inst, f2);
    for (int t = 0; t <= 5; ++t)
      CHECK(r1.q.h[t] == r2.q.h[t]);
  }
  SUBCASE("policies are the softmax of each row, values the soft-min") {
    MFGInstance inst = make_contractive_instance(4, 3, 13, ContractionTarget::finite_horizon);
    std::mt19937_64 rng(8);
    MeasureFlow f = random_flow(rng, inst, 3);
    BackwardResult r = backward_induction(inst, f);
    for (int t = 0; t <= 3; ++t)
      for (int x = 0; x < inst.n_states; ++x) {
        CHECK(r.policy.pi[t][x] == softmax_policy(r.q.h[t][x], inst.tau));
        CHECK(r.value[t][x] == doctest::Approx(soft_min(r.q.h[t][x], inst.tau)).epsilon(1e-15));
      }
  }
  SUBCASE("q values respect the boundedness invariant") {
    MFGInstance inst = make_contractive_instance(4, 3, 13, ContractionTarget::finite_horizon);
    const double bound = inst.cost_bound() / (1.0 - inst.beta) + inst.tau * std::log(inst.n_actions);
    std::mt19937_64 rng(9);
    MeasureFlow f = random_flow(rng, inst, 6);
    BackwardResult r = backward_induction(inst, f);
    for (const auto& table : r.q.h)
      for (const auto& row : table)
        for (double v : row) CHECK(std::fabs(v) <= bound + 1e-12);
  }
}

TEST_CASE("per-step value-gap propagation inequality on random flow pairs") {
  MFGInstance inst = make_contractive_instance(4, 3, 17, ContractionTarget::finite_horizon);
  LipschitzProfile p = compute_lipschitz_profile(inst);
  std::mt19937_64 rng(21);
  const int T = 5;
  double worst = 1e300;
  for (int k = 0; k < 100; ++k) {
    MeasureFlow f1 = random_flow(rng, inst, T), f2 = random_flow(rng, inst, T);
    BackwardResult r1 = backward_induction(inst, f1), r2 = backward_induction(inst, f2);
    std::vector<double> dh(T + 1, 0.0);
    for (int t = 0; t <= T; ++t)
      for (int x = 0; x < inst.n_states; ++x)
        for (int a = 0; a < inst.n_actions; ++a)
          dh[t] = std::max(dh[t], std::fabs(r1.q.h[t][x][a] - r2.q.h[t][x][a]));
    worst = std::min(worst, 2.0 * p.l1 * tv_distance(f1.mu[T], f2.mu[T]) + 1e-10 - dh[T]);
    for (int t = T - 1; t >= 0; --t) {
      const Vec& mu1 = f1.mu[t];
      const Vec& mu2 = f2.mu[t];
      worst = std::min(worst, 2.0 * p.bar_l * tv_distance(mu1, mu2) + p.beta * dh[t + 1] + 1e-10 -
                                  dh[t]);
    }
  }
  CHECK(worst >= 0.0);
}

TEST_CASE("value_iteration_stationary") {
  SUBCASE("beta = 0 converges to the myopic table") {
    MFGInstance inst = make_contractive_instance(3, 2, 25, ContractionTarget::finite_horizon);
    inst.beta = 0.0;
    StationaryDPResult r = value_iteration_stationary(inst, inst.mu0, 1e-12, 1000);
    for (int x = 0; x < inst.n_states; ++x)
      for (int a = 0; a < inst.n_actions; ++a)
        CHECK(r.h[x][a] == doctest::Approx(eval_cost(inst, x, a, inst.mu0)).epsilon(1e-12));
  }
  SUBCASE("single state single action geometric series") {
    MFGInstance inst;
    inst.n_states = 1;
    inst.n_actions = 1;
    inst.beta = 0.5;
    inst.tau = 1.0;
    inst.eta_p = 0.0;
    inst.c0 = {{1.0}};
    inst.wc = {{{0.0}}};
    inst.p0 = {{{1.0}}};
    inst.p1 = {{{{1.0}}}};
    inst.mu0 = {1.0};
    StationaryDPResult r = value_iteration_stationary(inst, inst.mu0, 1e-12, 1000);
    CHECK(r.h[0][0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.value[0] == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("residual below tolerance and recomputable") {
    MFGInstance inst = make_contractive_instance(4, 3, 29, ContractionTarget::finite_horizon);
    StationaryDPResult r = value_iteration_stationary(inst, inst.mu0, 1e-10, 100000);
    CHECK(r.residual <= 1e-10);
    // one more Bellman application must move h by at most the residual
    double moved = 0.0;
    for (int x = 0; x < inst.n_states; ++x) {
      for (int a = 0; a < inst.n_actions; ++a) {
        double nh = eval_cost(inst, x, a, inst.mu0);
        Vec pr = eval_transition(inst, x, a, inst.mu0);
        for (int y = 0; y < inst.n_states; ++y) nh += inst.beta * pr[y] * soft_min(r.h[y], inst.tau);
        moved = std::max(moved, std::fabs(nh - r.h[x][a]));
      }
    }
    CHECK(moved <= r.residual + 1e-12);
  }
  SUBCASE("iteration budget enforced") {
    MFGInstance inst = make_contractive_instance(4, 3, 29, ContractionTarget::finite_horizon);
    CHECK_THROWS_AS(value_iteration_stationary(inst, inst.mu0, 1e-12, 2), NoConvergenceError);
  }
}
