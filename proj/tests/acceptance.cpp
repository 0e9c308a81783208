// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snc/analytic.hpp"
#include "snc/channel_sim.hpp"
#include "snc/code.hpp"
#include "snc/experiments.hpp"
#include "snc/modes.hpp"

using namespace snc;

namespace {

constexpr std::uint64_t kTrials = 1'000'000;
constexpr double kSigmas = 4.0;
constexpr double kExactTol = 1e-12;

// Collects sub-check failures for one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }

  // |est - expected| <= 4 se
  void within(const Estimate& est, double expected, const std::string& what) {
    const double z = std::abs(est.value - expected) / est.std_error;
    const bool ok = std::isfinite(est.std_error) && (est.value == expected || z <= kSigmas);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: sim %.6g vs %.6g (%.1f se)", what.c_str(), est.value, expected, z);
    expect(ok, buf);
    worst_z_ = std::max(worst_z_, std::isfinite(z) ? z : 0.0);
  }

  bool passed() const { return failures_.empty(); }
  std::size_t checks() const { return checks_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }
  double worst_z() const { return worst_z_; }

 private:
  std::size_t checks_ = 0;
  double worst_z_ = 0.0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

SimOptions sim_opts(std::uint64_t seed) {
  SimOptions o;
  o.trials = kTrials;
  o.seed = seed;
  return o;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> grid(double lo, double hi, double step) { return experiments::EpsilonGrid{lo, hi, step}.values(); }

void bound_tightness(Criterion& c) {
  std::uint64_t seed = 100;
  for (const CodeParams p : {CodeParams{12, 8, 1}, CodeParams{3, 2, 1}})
    for (double e : {0.10, 0.15, 0.20, 0.25, 0.30}) {
      const double exact = snc_success_exact(p, e).total;
      const double bound = snc_success_lower_bound(p, e);
      c.expect(std::abs(exact - bound) <= kExactTol, to_string(p) + " eps=" + fmt(e) + ": exact != bound");
      const auto t0 = std::chrono::steady_clock::now();
      c.within(sim_snc_first_block(p, e, sim_opts(seed++)).error_rate, 1.0 - bound,
               to_string(p) + " eps=" + fmt(e) + " error");
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      c.expect(secs < 60.0, "runtime per point " + fmt(secs) + " s");
    }
}

void bound_validity(Criterion& c) {
  double max_gap = 0.0;
  for (const CodeParams p : {CodeParams{3, 2, 2}, CodeParams{4, 2, 2}})
    for (double e : grid(0.05, 0.5, 0.05)) {
      const double exact = snc_success_exact(p, e).total;
      const double bound = snc_success_lower_bound(p, e);
      c.expect(bound <= exact + kExactTol, to_string(p) + " eps=" + fmt(e) + ": bound exceeds exact");
      max_gap = std::max(max_gap, exact - bound);
    }
  c.expect(max_gap > 1e-6, "no strictly positive gap at L=2");
  const double bound = snc_success_lower_bound({3, 2, 2}, 0.1);
  const auto nested = oracle::nested_success_terms(3, 2, 2, 0.1);
  const double oracle_exact = nested[0] + nested[1] + nested[2];
  c.expect(std::abs(bound - 0.996446) < 5e-7, "(3,2,2) eps=0.1 bound " + fmt(bound));
  c.expect(oracle_exact >= bound, "(3,2,2) eps=0.1 enumeration below bound");
  c.expect(std::abs(snc_success_exact({3, 2, 2}, 0.1).total - oracle_exact) < kExactTol, "exact vs enumeration");
  c.note("bound " + fmt(bound) + ", exact " + fmt(oracle_exact) + ", max gap " + fmt(max_gap));
}

void ordering(Criterion& c) {
  std::uint64_t seed = 300;
  for (const CodeParams p : {CodeParams{12, 8, 1}, CodeParams{12, 8, 2}, CodeParams{18, 12, 2}})
    for (double e : grid(0.1, 0.3, 0.025)) {
      const std::string tag = to_string(p) + " eps=" + fmt(e);
      const double exact = snc_success_exact(p, e).total;
      const double lng = comparable_long_bc_success(p, e);
      const double shrt = short_bc_success(p, e);
      c.expect(exact >= lng - kExactTol, tag + ": exact < long BC");
      c.expect(lng >= shrt - kExactTol, tag + ": long BC < short BC");

      const double lat_short = bc_avg_latency(p.n, p.k, e);
      const double lat_long = bc_avg_latency(p.window_blocks() * p.n, p.window_blocks() * p.k, e);
      const double lat = snc_avg_latency(p, e);
      c.expect(lat_short <= lat + kExactTol && lat <= lat_long + kExactTol, tag + ": analytic latency ordering");

      const auto sim = sim_snc_first_block(p, e, sim_opts(seed++));
      const auto& se = sim.avg_latency;
      c.expect(lat_short <= se.value + kSigmas * se.std_error && se.value <= lat_long + kSigmas * se.std_error,
               tag + ": simulated latency " + fmt(se.value) + " outside [" + fmt(lat_short) + ", " + fmt(lat_long) + "]");
      const auto& err = sim.error_rate;
      c.expect(err.value <= 1.0 - lng + kSigmas * err.std_error, tag + ": simulated error above long BC");
    }
}

void modes_vs_sim(Criterion& c) {
  std::uint64_t seed = 400;
  c.expect(std::abs(mode_success({Mode::M1, 8, 0, 1}, 0.2) - 0.721390) < 5e-7, "M1 success spot value");
  c.expect(std::abs(mode_avg_code_length({Mode::M2, 8, 2, 1}, 0.2) - 11.264456) < 5e-7, "n_M2 spot value");
  for (double e : {0.15, 0.2, 0.25, 0.3})
    for (Mode m : {Mode::M1, Mode::M2, Mode::M3})
      for (int delta : {0, 2})
        for (int n_re : {1, 8}) {
          if (m == Mode::M1 && delta) continue;
          const ModeConfig cfg{m, 8, delta, n_re};
          const auto r = sim_mode({12, 8, 0}, cfg, e, sim_opts(seed++));
          const std::string tag = to_string(cfg) + " eps=" + fmt(e);
          c.within(r.error_rate, 1.0 - mode_success(cfg, e), tag + " error");
          c.within(r.avg_code_length, mode_avg_code_length(cfg, e), tag + " length");
          c.within(r.avg_latency, mode_avg_latency(cfg, e), tag + " latency");
        }
}

void delta_zero(Criterion& c) {
  double worst = 0.0;
  for (int k : {1, 2, 8, 16})
    for (int n_re : {0, 1, 8})
      for (double e : grid(0.0, 1.0, 0.05)) {
        const ModeConfig m1{Mode::M1, k, 0, n_re};
        for (Mode m : {Mode::M2, Mode::M3}) {
          const ModeConfig mx{m, k, 0, n_re};
          worst = std::max(worst, std::abs(mode_success(mx, e) - mode_success(m1, e)));
          worst = std::max(worst, std::abs(mode_avg_code_length(mx, e) - mode_avg_code_length(m1, e)));
          worst = std::max(worst, std::abs(mode_avg_latency(mx, e) - mode_avg_latency(m1, e)));
          for (int p = 1; p <= k; ++p) {
            const auto a = mode_latency_dist(mx, e, p), b = mode_latency_dist(m1, e, p);
            for (const auto& [d, mass] : b.mass()) worst = std::max(worst, std::abs(a.at(d) - mass));
            for (const auto& [d, mass] : a.mass()) worst = std::max(worst, std::abs(b.at(d) - mass));
          }
        }
      }
  c.expect(worst <= kExactTol, "max deviation " + fmt(worst));
  c.note("max deviation " + fmt(worst));
}

void qualitative(Criterion& c) {
  std::uint64_t seed = 600;
  for (double e : grid(0.15, 0.3, 0.025)) {
    const ModeConfig m2{Mode::M2, 8, 2, 8}, m3{Mode::M3, 8, 2, 8};
    c.expect(1.0 - mode_success(m2, e) <= 1.0 - mode_success(m3, e), "analytic M2 error > M3 error at eps=" + fmt(e));
    const auto s2 = sim_mode({12, 8, 0}, m2, e, sim_opts(seed++)).error_rate;
    const auto s3 = sim_mode({12, 8, 0}, m3, e, sim_opts(seed++)).error_rate;
    c.expect(s2.value <= s3.value + kSigmas * std::hypot(s2.std_error, s3.std_error),
             "simulated M2 error > M3 error at eps=" + fmt(e));
  }
  const double e = 0.15;
  const ModeConfig m1{Mode::M1, 8, 0, 8}, m2{Mode::M2, 8, 2, 8}, m3{Mode::M3, 8, 2, 8};
  const double a1 = mode_avg_latency(m1, e), a2 = mode_avg_latency(m2, e), a3 = mode_avg_latency(m3, e);
  c.expect(a3 <= a1 && a3 <= a2, "analytic M3 latency not lowest");
  const auto l1 = sim_mode({12, 8, 0}, m1, e, sim_opts(seed++)).avg_latency;
  const auto l2 = sim_mode({12, 8, 0}, m2, e, sim_opts(seed++)).avg_latency;
  const auto l3 = sim_mode({12, 8, 0}, m3, e, sim_opts(seed++)).avg_latency;
  c.expect(l3.value <= l1.value + kSigmas * std::hypot(l1.std_error, l3.std_error) &&
               l3.value <= l2.value + kSigmas * std::hypot(l2.std_error, l3.std_error),
           "simulated M3 latency not lowest");
  c.note("latency at N_Re=8, eps=0.15: analytic M1 " + fmt(a1) + " M2 " + fmt(a2) + " M3 " + fmt(a3) + "; simulated M1 " +
         fmt(l1.value) + " M2 " + fmt(l2.value) + " M3 " + fmt(l3.value));
}

void codec(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const CodeParams p : {CodeParams{3, 2, 1, 16}, CodeParams{3, 2, 2, 16}}) {
    const auto g = build_generators(p, 0);
    const auto mdp = is_mdp(g);
    c.expect(mdp.mdp, to_string(p) + " is_mdp failed" +
                          (mdp.counterexample ? " on " + mdp.counterexample->describe() : std::string()));
    const auto agree = compare_decoder_with_count_rule(g);
    c.expect(agree.patterns == (std::size_t{1} << (p.window_blocks() * p.n)), to_string(p) + " pattern count");
    c.expect(agree.disagreements == 0, to_string(p) + ": " + std::to_string(agree.disagreements) + " disagreements");
    c.note(to_string(p) + " seed " + std::to_string(g.seed) + ", " + std::to_string(agree.patterns) + " patterns");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 10.0, "runtime " + fmt(secs) + " s");
}

void vandermonde_identity(Criterion& c) {
  auto choose = [](int n, int r) -> std::uint64_t {
    if (r < 0 || r > n) return 0;
    std::uint64_t v = 1;
    for (int i = 1; i <= r; ++i) v = v * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
    return v;
  };
  for (int n = 0; n <= 20; ++n)
    for (int d = 0; d <= 2 * n; ++d) {
      std::uint64_t lhs = 0;
      for (int a = 0; a <= d; ++a) lhs += choose(n, a) * choose(n, d - a);
      c.expect(lhs == choose(2 * n, d), "n=" + std::to_string(n) + " d=" + std::to_string(d));
    }
}

void determinism(Criterion& c) {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "snc_acceptance_fig3";
  fs::remove_all(root);
  std::vector<std::string> outputs;
  for (unsigned threads : {1u, 4u, 0u}) {
    auto cfg = experiments::preset("fig3");
    cfg.seed = 2024;
    cfg.threads = threads;
    cfg.out_dir = root / std::to_string(threads);
    const auto r = experiments::run(cfg);
    std::ifstream in(*r.csv_path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    outputs.push_back(s.str());
  }
  c.expect(!outputs[0].empty(), "empty CSV");
  for (std::size_t i = 1; i < outputs.size(); ++i) c.expect(outputs[i] == outputs[0], "CSV differs between runs");
  c.note(std::to_string(outputs[0].size()) + " bytes, threads 1/4/all");
  fs::remove_all(root);
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    std::function<void(Criterion&)> run;
  };
  const std::vector<Entry> entries{
      {1, "bound tightness at L=1 (exact, bound, 1e6-trial simulation)", bound_tightness},
      {2, "lower bound never exceeds exact success at L=2", bound_validity},
      {3, "short BC <= SNC <= long BC (success and latency)", ordering},
      {4, "mode formulas vs simulation at L=0 (success, length, latency)", modes_vs_sim},
      {5, "delta=0 collapses M2/M3 onto M1", delta_zero},
      {6, "M2 beats M3 on error; M3 lowest latency at N_Re=8", qualitative},
      {7, "exhaustive codec verification over GF(16)", codec},
      {8, "Vandermonde convolution identity for n <= 20", vandermonde_identity},
      {9, "fig3 CSV byte-identical across runs and thread counts", determinism},
  };

  int failed = 0;
  for (const auto& e : entries) {
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    e.run(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s [%zu checks, %.1f s", c.passed() ? "PASS" : "FAIL", e.id, e.title, c.checks(),
                secs);
    if (c.worst_z() > 0) std::printf(", worst %.2f se", c.worst_z());
    std::printf("]\n");
    for (const auto& n : c.notes()) std::printf("    %s\n", n.c_str());
    const std::size_t shown = std::min<std::size_t>(c.failures().size(), 40);
    for (std::size_t i = 0; i < shown; ++i) std::printf("    failed: %s\n", c.failures()[i].c_str());
    if (c.failures().size() > shown) std::printf("    ... %zu more\n", c.failures().size() - shown);
    std::fflush(stdout);
    failed += !c.passed();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failed, entries.size());
  return failed ? 1 : 0;
}
