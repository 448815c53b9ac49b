#include <doctest.h>

#include <cmath>
#include <random>

#include "seudep/engine.hpp"
#include "seudep/poisson.hpp"
#include "support/fixtures.hpp"

using namespace seudep;

namespace {

// up/down chain: up fails at `lam`, down repairs at `mu`; optional
// self-loop at up with rate `loop`.
MarkovRewardModel two_state(double lam, double mu, double loop = 0.0) {
  MarkovRewardModel m;
  m.states.resize(2);
  m.initial = 0;
  m.rates.resize(2);
  m.rates[0].push_back({1, lam});
  if (loop > 0.0) m.rates[0].push_back({0, loop});
  std::sort(m.rates[0].begin(), m.rates[0].end());
  m.rates[1].push_back({0, mu});
  m.label = {StateClass::Operational, StateClass::FailedSafe};
  m.rewards["up"] = {1.0, 0.0};
  m.rewards["one"] = {1.0, 1.0};
  return m;
}

double p_up_closed_form(double lam, double mu, double t) {
  double pi = mu / (lam + mu);
  return pi + (1.0 - pi) * std::exp(-(lam + mu) * t);
}

}  // namespace

TEST_CASE("poisson window: exact mass for small means") {
  auto w = detail::poisson_window(3.7, 1e-12);
  CHECK(w.left == 0);  // everything below the mode survives at this epsilon
  double sum = 0.0;
  for (double p : w.pmf) sum += p;
  CHECK(std::fabs(sum - 1.0) <= 1e-15);
  for (std::int64_t k = w.left; k <= w.right && k <= 25; ++k) {
    double exact = std::exp(-3.7 + k * std::log(3.7) - std::lgamma(double(k) + 1.0));
    CHECK(std::fabs(w.pmf[std::size_t(k - w.left)] - exact) <= 1e-10);
  }
}

TEST_CASE("poisson window: large means stay normalized and centered") {
  const double m = 4500.0;
  auto w = detail::poisson_window(m, 1e-10);
  double sum = 0.0;
  for (double p : w.pmf) sum += p;
  CHECK(std::fabs(sum - 1.0) <= 1e-14);
  CHECK(w.left > 0);
  CHECK(w.left < std::int64_t(m));
  CHECK(w.right > std::int64_t(m));
  // both truncation points sit several standard deviations out
  double sigma = std::sqrt(m);
  CHECK(double(w.left) < m - 5 * sigma);
  CHECK(double(w.right) > m + 5 * sigma);
  CHECK(w.mass_below_left <= 1e-10);
  // mode density ~ 1/sqrt(2 pi m)
  double at_mode = w.pmf[std::size_t(std::int64_t(m) - w.left)];
  CHECK(at_mode == doctest::Approx(1.0 / std::sqrt(2 * 3.14159265358979 * m)).epsilon(0.01));

  auto tail = w.tail_greater();
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) CHECK(tail[i] >= tail[i + 1]);
  CHECK(tail.back() == 0.0);
}

TEST_CASE("poisson window: degenerate mean") {
  auto w = detail::poisson_window(0.0, 1e-10);
  CHECK(w.left == 0);
  CHECK(w.right == 0);
  CHECK(w.pmf == std::vector<double>{1.0});
}

TEST_CASE("negative horizons are rejected") {
  testing::Fixture fx;
  auto m = fx.model("c1");
  Distribution p0(m.size(), 0.0);
  p0[m.initial] = 1.0;
  CHECK_THROWS_AS(transient(m, p0, -1.0), error);
  CHECK_THROWS_AS(cumulative_reward(m, "operational", -2.0), error);
  CHECK_THROWS_AS(invariance_prob(m, StateSet(m.size(), 1), -0.5), error);
  CHECK_THROWS_AS(bounded_until(m, StateSet(m.size(), 1), StateSet(m.size(), 1), -3.0), error);
}

TEST_CASE("two-state chain: stationary and transient against closed forms") {
  double lam = 0.3, mu = 0.7;
  auto m = two_state(lam, mu);

  auto pi = steady_state(m);
  CHECK(std::fabs(pi[0] - mu / (lam + mu)) <= 1e-12);
  CHECK(std::fabs(pi[1] - lam / (lam + mu)) <= 1e-12);

  Distribution p0{1.0, 0.0};
  for (double t : {0.1, 1.0, 10.0}) {
    auto pt = transient(m, p0, t);
    CHECK(std::fabs(pt[0] - p_up_closed_form(lam, mu, t)) <= 1e-9);
  }

  // self-loops change neither result
  auto mloop = two_state(lam, mu, 5.0);
  auto piloop = steady_state(mloop);
  CHECK(std::fabs(piloop[0] - pi[0]) <= 1e-12);
  auto ptloop = transient(mloop, p0, 2.5);
  CHECK(std::fabs(ptloop[0] - p_up_closed_form(lam, mu, 2.5)) <= 1e-9);
}

TEST_CASE("pure death: survival is exp(-lambda t)") {
  MarkovRewardModel m;
  m.states.resize(2);
  m.initial = 0;
  m.rates.resize(2);
  double lam = 1.0 / 11.85;
  m.rates[0].push_back({1, lam});
  m.label = {StateClass::Operational, StateClass::FailedSafe};
  m.rewards["up"] = {1.0, 0.0};

  Distribution p0{1.0, 0.0};
  auto pt = transient(m, p0, 11.85);
  CHECK(std::fabs(pt[0] - std::exp(-1.0)) <= 1e-9);

  auto same = transient(m, p0, 0.0);
  CHECK(same == p0);
}

TEST_CASE("steady state on the fixture: operational mass is mu/(mu + 2lA + 2lM)") {
  testing::Fixture fx;
  double lam = 2 * fx.lambda("Kogge-Stone Adder") + 2 * fx.lambda("Wallace Tree Multiplier");
  for (double I : {1.0, 9.0}) {
    auto m = fx.model("c1", I);
    auto pi = steady_state(m);
    double mu = 1.0 / I;
    // Every state scrubs straight back to the initial state, so the
    // operational indicator is itself a two-state chain.
    CHECK(std::fabs(pi[m.initial] - mu / (mu + lam)) <= 1e-12);
  }
}

TEST_CASE("steady failure probability endpoints") {
  testing::Fixture fx;
  double p1 = expected_steady_reward(fx.model("c1", 1.0), "failed");
  double p9 = expected_steady_reward(fx.model("c1", 9.0), "failed");
  CHECK(std::fabs(p1 - 0.014) <= 0.001);
  CHECK(std::fabs(p9 - 0.288) <= 0.005);
}

TEST_CASE("cumulative rewards against the published residency table") {
  testing::Fixture fx;
  const double T = 3650.0;
  auto m1 = fx.model("c1", 1.0);
  CHECK(cumulative_reward(m1, "operational", 0.0) == 0.0);
  CHECK_THROWS_WITH_AS(cumulative_reward(m1, "no_such_reward", 1.0),
                       doctest::Contains("unknown reward"), error);

  CHECK(std::fabs(cumulative_reward(m1, "operational", T) - 2989.0) <= 1.0);
  auto m9 = fx.model("c1", 9.0);
  CHECK(std::fabs(cumulative_reward(m9, "operational", T) - 1222.40) <= 1.0);
  CHECK(std::fabs(cumulative_reward(m9, "failed", T) - 1049.31) <= 2.0);
}

TEST_CASE("cumulative reward of the constant 1 is the horizon") {
  testing::Fixture fx;
  auto m = fx.model("c2", 4.0);
  m.rewards["one"] = std::vector<double>(m.size(), 1.0);
  for (double T : {1.0, 365.0, 3650.0})
    CHECK(std::fabs(cumulative_reward(m, "one", T) - T) <= 1e-8 * T);
}

TEST_CASE("class-time additivity: residencies sum to the mission time") {
  testing::Fixture fx;
  const double T = 3650.0;
  for (const char* name : {"c1", "c3"}) {
    auto m = fx.model(name, 4.0);
    double total = cumulative_reward(m, "operational", T) + cumulative_reward(m, "degraded", T) +
                   cumulative_reward(m, "failed_safe", T) +
                   cumulative_reward(m, "failed_unsafe", T);
    CHECK(std::fabs(total - T) <= 1e-6 * T);
  }
}

TEST_CASE("expected steady reward of a constant is that constant") {
  testing::Fixture fx;
  auto m = fx.model("c3", 2.0);
  for (double c : {0.25, 1.0, 7.5}) {
    m.rewards["const"] = std::vector<double>(m.size(), c);
    CHECK(expected_steady_reward(m, "const") == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("next_prob rejects states without outgoing rate") {
  MarkovRewardModel m;
  m.states.resize(2);
  m.initial = 0;
  m.rates.resize(2);
  m.rates[0].push_back({1, 1.0});  // state 1 is absorbing with no rates at all
  m.label = {StateClass::Operational, StateClass::FailedSafe};
  StateSet any(2, 1);
  CHECK_THROWS_WITH_AS(next_prob(m, any), doctest::Contains("no outgoing rate"), error);
}

TEST_CASE("expected transient reward") {
  testing::Fixture fx;
  auto m = fx.model("c1", 1.0);
  CHECK(expected_transient_reward(m, "throughput", 0.0) == doctest::Approx(1.0));

  m.rewards["one"] = std::vector<double>(m.size(), 1.0);
  for (double t : {0.5, 10.0, 500.0})
    CHECK(expected_transient_reward(m, "one", t) == doctest::Approx(1.0).epsilon(1e-9));

  double steady = expected_steady_reward(m, "throughput");
  CHECK(std::fabs(expected_transient_reward(m, "throughput", 200.0) - steady) <= 1e-6);
}

TEST_CASE("invariance probabilities") {
  testing::Fixture fx;
  auto m = fx.model("c1", 1.0);
  StateSet all(m.size(), 1);
  CHECK(invariance_prob(m, all, 123.0) == doctest::Approx(1.0).epsilon(1e-9));

  StateSet good(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s)
    good[s] = m.label[s] == StateClass::Operational || m.label[s] == StateClass::Degraded;
  CHECK(invariance_prob(m, good, 0.0) == doctest::Approx(1.0));

  double prev = 1.0;
  for (double T : {10.0, 30.0, 60.0, 90.0}) {
    double rel = invariance_prob(m, good, T);
    CHECK(rel < prev);
    prev = rel;

    StateSet safe = good;
    for (std::size_t s = 0; s < m.size(); ++s)
      if (m.label[s] == StateClass::FailedSafe) safe[s] = 1;
    CHECK(invariance_prob(m, safe, T) >= rel);
  }
}

TEST_CASE("bounded until") {
  testing::Fixture fx;
  auto m = fx.model("c1", 1.0);
  StateSet all(m.size(), 1), none(m.size(), 0);
  StateSet init_only(m.size(), 0);
  init_only[m.initial] = 1;

  CHECK(bounded_until(m, all, init_only, 5.0)[m.initial] == doctest::Approx(1.0));
  CHECK(bounded_until(m, all, none, 5.0)[m.initial] == doctest::Approx(0.0));

  // duality against invariance
  StateSet good(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s) good[s] = !is_failed(m.label[s]);
  StateSet bad(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s) bad[s] = !good[s];
  for (double T : {1.0, 30.0, 90.0}) {
    double g = invariance_prob(m, good, T);
    double f = bounded_until(m, all, bad, T)[m.initial];
    CHECK(std::fabs(g + f - 1.0) <= 1e-9);
  }
}

TEST_CASE("next-step probabilities") {
  testing::Fixture fx;
  auto m = fx.model("c1", 1.0);
  StateSet init_only(m.size(), 0);
  init_only[m.initial] = 1;
  auto probs = next_prob(m, init_only);
  for (double p : probs) CHECK(p > 0.0);  // the scrub edge reaches back from everywhere

  StateSet all(m.size(), 1);
  for (double p : next_prob(m, all)) CHECK(p == doctest::Approx(1.0));

  double lam = 0.4, mu = 2.0, loop = 3.0;
  auto chain = two_state(lam, mu, loop);
  StateSet down{0, 1};
  auto np = next_prob(chain, down);
  CHECK(np[0] == doctest::Approx(lam / (lam + loop)));  // self-loop counts in the race
}

TEST_CASE("unbounded until") {
  testing::Fixture fx;
  auto m = fx.model("c1", 2.0);
  StateSet all(m.size(), 1), none(m.size(), 0);
  StateSet init_only(m.size(), 0);
  init_only[m.initial] = 1;

  auto to_init = unbounded_until(m, all, init_only);
  for (double p : to_init) CHECK(p == doctest::Approx(1.0).epsilon(1e-10));

  StateSet failed(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s) failed[s] = is_failed(m.label[s]);
  auto never = unbounded_until(m, none, failed);
  CHECK(never[m.initial] == 0.0);

  auto bounded = bounded_until(m, all, failed, 1e5);
  auto unbounded = unbounded_until(m, all, failed);
  CHECK(std::fabs(bounded[m.initial] - unbounded[m.initial]) <= 1e-6);
}

TEST_CASE("reach rewards") {
  double lam = 0.25, mu = 1.5;
  auto chain = two_state(lam, mu);
  StateSet down{0, 1};
  StateSet initset{1, 0};
  CHECK(reach_reward(chain, "up", initset) == 0.0);
  CHECK(reach_reward(chain, "up", down) == doctest::Approx(1.0 / lam).epsilon(1e-12));

  testing::Fixture fx;
  auto m = fx.model("c1", 1.0);
  m.rewards["one"] = std::vector<double>(m.size(), 1.0);
  StateSet failed(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s) failed[s] = is_failed(m.label[s]);
  double mttf = reach_reward(m, "one", failed);
  CHECK(mttf > 0.0);

  StateSet unreachable(m.size(), 0);
  CHECK_THROWS_WITH_AS(reach_reward(m, "one", unreachable), doctest::Contains("infinite"), error);
}

TEST_CASE("scaling consistency: rates times k, times over k") {
  testing::Fixture fx;
  auto m = fx.model("c3", 4.0, 0.95);
  const double k = 24.0;
  MarkovRewardModel scaled = m;
  for (auto& row : scaled.rates)
    for (auto& [to, r] : row) r *= k;

  StateSet good(m.size(), 0);
  for (std::size_t s = 0; s < m.size(); ++s) good[s] = !is_failed(m.label[s]);
  for (double T : {9.0, 90.0}) {
    CHECK(std::fabs(invariance_prob(m, good, T) - invariance_prob(scaled, good, T / k)) <= 1e-9);
    Distribution p0(m.size(), 0.0);
    p0[m.initial] = 1.0;
    auto a = transient(m, p0, T);
    auto b = transient(scaled, p0, T / k);
    for (std::size_t s = 0; s < m.size(); ++s) CHECK(std::fabs(a[s] - b[s]) <= 1e-9);
  }
  auto pa = steady_state(m);
  auto pb = steady_state(scaled);
  for (std::size_t s = 0; s < m.size(); ++s) CHECK(std::fabs(pa[s] - pb[s]) <= 1e-9);
}

TEST_CASE("distributions are clean") {
  testing::Fixture fx;
  auto m = fx.model("c4", 9.0);
  Distribution p0(m.size(), 0.0);
  p0[m.initial] = 1.0;
  for (double t : {1.0, 100.0, 3650.0}) {
    auto pt = transient(m, p0, t);
    double sum = 0.0;
    for (double v : pt) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("random chains: Chapman-Kolmogorov, duality, steady limits") {
  // Random strongly connected chains (every state gets a reset edge to
  // state 0), random sizes and rate scales.
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 rng(seed * 1299709);
    std::uniform_int_distribution<int> size_dist(2, 12);
    std::uniform_real_distribution<double> rate_dist(0.01, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = size_dist(rng);
    MarkovRewardModel m;
    m.states.resize(n);
    m.initial = 0;
    m.rates.resize(n);
    m.label.assign(n, StateClass::Degraded);
    m.label[0] = StateClass::Operational;
    for (int s = 0; s < n; ++s) {
      for (int t = 0; t < n; ++t)
        if (t != s && unit(rng) < 0.3) m.rates[s].push_back({t, rate_dist(rng)});
      bool has_reset = false;
      for (auto [to, r] : m.rates[s]) {
        (void)r;
        if (to == 0) has_reset = true;
      }
      if (!has_reset || s == 0) m.rates[s].push_back({0, rate_dist(rng)});
      std::sort(m.rates[s].begin(), m.rates[s].end());
    }

    Distribution p0(n, 0.0);
    p0[0] = 1.0;

    // p(t+s) must equal the transient of the transient.
    double t1 = 0.7, t2 = 2.3;
    auto via_two = transient(m, transient(m, p0, t1), t2);
    auto direct = transient(m, p0, t1 + t2);
    for (int s = 0; s < n; ++s) CHECK(std::fabs(via_two[s] - direct[s]) <= 1e-9);

    // steady state is the long-time limit
    auto pi = steady_state(m);
    auto late = transient(m, p0, 2000.0);
    for (int s = 0; s < n; ++s) CHECK(std::fabs(pi[s] - late[s]) <= 1e-6);

    // duality on a random predicate
    StateSet good(n, 0);
    int marked = 0;
    for (int s = 0; s < n; ++s) {
      good[s] = unit(rng) < 0.6;
      marked += good[s];
    }
    if (marked == 0) good[0] = 1;
    StateSet all(n, 1), bad(n, 0);
    for (int s = 0; s < n; ++s) bad[s] = !good[s];
    double g = invariance_prob_all(m, good, 1.5)[0];
    double f = bounded_until(m, all, bad, 1.5)[0];
    CHECK(std::fabs(g + f - 1.0) <= 1e-9);

    // unbounded until is the limit of bounded until
    auto ub = unbounded_until(m, all, bad);
    auto bu = bounded_until(m, all, bad, 5000.0);
    for (int s = 0; s < n; ++s) CHECK(std::fabs(ub[s] - bu[s]) <= 1e-6);
  }
}

TEST_CASE("iterative steady-state fallback agrees with the direct solve") {
  testing::Fixture fx;
  auto m = fx.model("c2", 4.0);
  EngineOptions direct;
  EngineOptions iterative;
  iterative.direct_solve_limit = 1;  // force successive substitution
  auto a = steady_state(m, direct);
  auto b = steady_state(m, iterative);
  for (std::size_t s = 0; s < m.size(); ++s) CHECK(std::fabs(a[s] - b[s]) <= 1e-10);
}

TEST_CASE("steady state detects a broken chain") {
  // two disconnected closed classes: initial cannot be re-reached once left
  MarkovRewardModel m;
  m.states.resize(2);
  m.initial = 0;
  m.rates.resize(2);
  m.rates[0].push_back({1, 1.0});
  m.rates[1].push_back({1, 1.0});  // absorbing self-loop
  m.label = {StateClass::Operational, StateClass::FailedSafe};
  CHECK_THROWS_WITH_AS(steady_state(m), doctest::Contains("not ergodic"), error);
}
