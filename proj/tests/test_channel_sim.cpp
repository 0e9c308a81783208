#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "snc/analytic.hpp"
#include "snc/channel_sim.hpp"

using namespace snc;
using doctest::Approx;

namespace {

SimOptions opts(std::uint64_t trials, std::uint64_t seed = 42, unsigned threads = 0) {
  SimOptions o;
  o.trials = trials;
  o.seed = seed;
  o.threads = threads;
  return o;
}

void within_4se(const Estimate& est, double expected) {
  INFO("estimate " << est.value << " +- " << est.std_error << " vs " << expected);
  CHECK(std::isfinite(est.std_error));
  CHECK(std::abs(est.value - expected) <= 4.0 * est.std_error + 1e-12);
}

oracle::Scheme scheme(Mode m) {
  return m == Mode::M1 ? oracle::Scheme::M1 : m == Mode::M2 ? oracle::Scheme::M2 : oracle::Scheme::M3;
}

}  // namespace

TEST_CASE("erasure masks") {
  TrialRng rng = seed_schedule(1, 0);
  for (bool b : erase(50, 0.0, rng)) CHECK_FALSE(b);
  for (bool b : erase(50, 1.0, rng)) CHECK(b);
  CHECK_THROWS_AS(erase(3, -0.1, rng), std::domain_error);

  std::uint64_t lost = 0;
  const int draws = 1'000'000;
  for (bool b : erase(draws, 0.2, rng)) lost += b;
  CHECK(static_cast<double>(lost) / draws == Approx(0.2).epsilon(0.002 / 0.2));
}

TEST_CASE("seed schedule is reproducible and injective") {
  TrialRng a = seed_schedule(7, 3), b = seed_schedule(7, 3);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  std::set<std::uint64_t> states;
  for (std::uint64_t s : {0ull, 1ull, 7ull})
    for (std::uint64_t i = 0; i < 1000; ++i) states.insert(seed_schedule(s, i).state());
  CHECK(states.size() == 3000);
}

TEST_CASE("first outputs across trial indices are uniform") {
  const int N = 100'000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) sum += seed_schedule(99, i).uniform();
  const double sigma = std::sqrt(1.0 / 12.0 / N);
  CHECK(std::abs(sum / N - 0.5) <= 3 * sigma);
}

TEST_CASE("zero erasure probability gives no errors and no latency") {
  const auto r = sim_snc_first_block({12, 8, 2}, 0.0, opts(1000));
  CHECK(r.error_rate.value == 0.0);
  CHECK(r.avg_latency.value == 0.0);
  for (Mode m : {Mode::M1, Mode::M2, Mode::M3}) {
    const ModeConfig cfg{m, 8, m == Mode::M1 ? 0 : 2, 8};
    const auto s = sim_mode({12, 8, 1}, cfg, 0.0, opts(1000));
    CHECK(s.error_rate.value == 0.0);
    CHECK(s.avg_code_length.value == (m == Mode::M3 ? 10.0 : 8.0));
    CHECK(s.avg_latency.value == 0.0);
  }
}

TEST_CASE("first-block error matches exact analysis") {
  const auto r = sim_snc_first_block({3, 2, 1}, 0.1, opts(200'000));
  within_4se(r.error_rate, 1.0 - 0.991683);
  CHECK(r.error_rate.std_error ==
        Approx(std::sqrt(r.error_rate.value * (1 - r.error_rate.value) / 200'000)).epsilon(1e-12));
  for (double e : {0.1, 0.2, 0.3}) {
    const CodeParams p{12, 8, 1};
    within_4se(sim_snc_first_block(p, e, opts(100'000, 5)).error_rate, 1.0 - snc_success_lower_bound(p, e));
  }
  within_4se(sim_snc_first_block({12, 8, 2}, 0.25, opts(100'000, 6)).error_rate,
             1.0 - snc_success_exact({12, 8, 2}, 0.25).total);
}

TEST_CASE("algebraic cross-check finds no disagreements") {
  for (const CodeParams p : {CodeParams{3, 2, 1, 16}, CodeParams{3, 2, 2, 16}}) {
    SimOptions o = opts(20'000, 8);
    o.decoder_check_every = 7;
    const auto r = sim_snc_first_block(p, 0.3, o);
    CHECK(r.decoder_checks == (20'000 + 6) / 7);
    CHECK(r.decoder_disagreements == 0);
  }
}

TEST_CASE("simulated latency matches exact pattern enumeration") {
  for (const CodeParams p : {CodeParams{3, 2, 1}, CodeParams{3, 2, 2}, CodeParams{4, 2, 2}}) {
    const double e = 0.1;
    const auto r = sim_snc_latency(p, e, opts(200'000, 12));
    const auto oracle = oracle::enumerate_patterns(p.n, p.k, p.memory, e);
    REQUIRE(r.packet_latency.size() == static_cast<std::size_t>(p.k));
    for (int i = 0; i < p.k; ++i) within_4se(r.packet_latency[i], oracle.lost_latency_mean[i]);
  }
}

TEST_CASE("latency pmf built from unconditional window terms understates the conditional mean") {
  // The window in which a lost packet is recovered depends on that loss; the
  // pmf weights windows by unconditional terms instead.
  const auto oracle = oracle::enumerate_patterns(3, 2, 1, 0.1);
  CHECK(snc_latency_dist({3, 2, 1}, 0.1, 1).mean() == Approx(0.2084));
  CHECK(oracle.lost_latency_mean[0] > 0.25);
}

TEST_CASE("simulated latency lies between short and long block codes") {
  const CodeParams p{12, 8, 2};
  const auto r = sim_snc_latency(p, 0.25, opts(100'000, 3));
  CHECK(r.avg_latency.value > bc_avg_latency(12, 8, 0.25));
  CHECK(r.avg_latency.value < bc_avg_latency(36, 24, 0.25));
}

TEST_CASE("error rate is nondecreasing along an epsilon sweep") {
  double prev_v = 0.0, prev_se = 0.0;
  for (double e = 0.1; e <= 0.3 + 1e-9; e += 0.025) {
    const auto r = sim_snc_first_block({12, 8, 1}, e, opts(50'000, 21));
    CHECK(r.error_rate.value >= prev_v - 4 * std::hypot(prev_se, r.error_rate.std_error));
    prev_v = r.error_rate.value;
    prev_se = r.error_rate.std_error;
  }
}

TEST_CASE("mode simulation at L = 0 matches exact protocol enumeration") {
  for (Mode m : {Mode::M1, Mode::M2, Mode::M3})
    for (int delta : {0, 2}) {
      if (m == Mode::M1 && delta) continue;
      for (int n_re : {1, 8}) {
        const int k = 4;
        const ModeConfig cfg{m, k, delta, n_re};
        const double e = 0.2;
        const auto r = sim_mode({k + 2, k, 0}, cfg, e, opts(100'000, 17));
        const auto o = oracle::enumerate_protocol(scheme(m), k, delta, n_re, e);
        within_4se(r.error_rate, 1.0 - o.success);
        within_4se(r.avg_code_length, o.length);
        for (int p = 0; p < k; ++p) within_4se(r.packet_latency[p], o.latency[p]);
      }
    }
}

TEST_CASE("mode simulation at k = 8 matches the closed forms") {
  const double e = 0.2;
  const auto m1 = sim_mode({12, 8, 0}, {Mode::M1, 8, 0, 8}, e, opts(100'000, 1));
  within_4se(m1.error_rate, 1.0 - 0.721390421016);
  within_4se(m1.avg_code_length, 9.6);
  within_4se(m1.avg_latency, mode_avg_latency({Mode::M1, 8, 0, 8}, e));
  const auto m2 = sim_mode({12, 8, 0}, {Mode::M2, 8, 2, 8}, e, opts(100'000, 2));
  within_4se(m2.error_rate, 1.0 - mode_success({Mode::M2, 8, 2, 8}, e));
  within_4se(m2.avg_code_length, 11.264456);
  within_4se(m2.avg_latency, mode_avg_latency({Mode::M2, 8, 2, 8}, e));
  const auto m3 = sim_mode({12, 8, 0}, {Mode::M3, 8, 2, 8}, e, opts(100'000, 3));
  within_4se(m3.error_rate, 1.0 - mode_success({Mode::M3, 8, 2, 8}, e));
  within_4se(m3.avg_code_length, mode_avg_code_length({Mode::M3, 8, 2, 8}, e));
}

TEST_CASE("window decoding helps modes that carry redundancy") {
  const double e = 0.2;
  const auto l0 = sim_mode({12, 8, 0}, {Mode::M2, 8, 2, 1}, e, opts(100'000, 4));
  const auto l1 = sim_mode({12, 8, 1}, {Mode::M2, 8, 2, 1}, e, opts(100'000, 4));
  CHECK(l1.error_rate.value < l0.error_rate.value);
  // M1 never receives more than k packets, so its residual count never leaves
  // spare capacity for later blocks.
  const auto m1_0 = sim_mode({12, 8, 0}, {Mode::M1, 8, 0, 1}, e, opts(100'000, 4));
  const auto m1_1 = sim_mode({12, 8, 1}, {Mode::M1, 8, 0, 1}, e, opts(100'000, 4));
  CHECK(m1_1.error_rate.value == m1_0.error_rate.value);
}

TEST_CASE("sim_mode rejects inconsistent shapes") {
  CHECK_THROWS_AS(sim_mode({12, 7, 0}, {Mode::M1, 8, 0, 1}, 0.1, opts(10)), std::domain_error);
  CHECK_THROWS_AS(sim_mode({10, 8, 0}, {Mode::M2, 8, 3, 1}, 0.1, opts(10)), std::domain_error);
  CHECK_THROWS_AS(sim_snc_first_block({12, 8, 1}, 0.1, opts(0)), std::domain_error);
}

TEST_CASE("reports are identical for any number of worker threads") {
  const CodeParams p{12, 8, 2};
  const auto a = sim_snc_first_block(p, 0.2, opts(30'001, 9, 1));
  for (unsigned t : {2u, 3u, 8u}) {
    const auto b = sim_snc_first_block(p, 0.2, opts(30'001, 9, t));
    CHECK(a.error_rate.value == b.error_rate.value);
    CHECK(a.error_rate.std_error == b.error_rate.std_error);
    CHECK(a.avg_latency.value == b.avg_latency.value);
    for (std::size_t i = 0; i < a.packet_latency.size(); ++i)
      CHECK(a.packet_latency[i].value == b.packet_latency[i].value);
  }
  const auto m1 = sim_mode({12, 8, 1}, {Mode::M3, 8, 2, 8}, 0.2, opts(20'000, 9, 1));
  const auto m4 = sim_mode({12, 8, 1}, {Mode::M3, 8, 2, 8}, 0.2, opts(20'000, 9, 4));
  CHECK(m1.error_rate.value == m4.error_rate.value);
  CHECK(m1.avg_code_length.value == m4.avg_code_length.value);
  CHECK(m1.avg_latency.value == m4.avg_latency.value);
  CHECK(m1.config == m4.config);
}

TEST_CASE("report echoes its configuration") {
  const auto r = sim_mode({12, 8, 1}, {Mode::M2, 8, 2, 8}, 0.2, opts(100, 77));
  CHECK(r.trials == 100);
  CHECK(r.seed == 77);
  CHECK(r.config.at("mode") == "m2");
  CHECK(r.config.at("L") == 1);
}
