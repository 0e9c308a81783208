#include "snc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "snc/analytic.hpp"
#include "snc/channel_sim.hpp"
#include "snc/error.hpp"

#ifndef SNC_VERSION
#define SNC_VERSION "unknown"
#endif

namespace snc::experiments {

std::string_view version() { return SNC_VERSION; }

namespace {

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Error: return "error";
    case Metric::Latency: return "latency";
    case Metric::Length: return "length";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "error") return Metric::Error;
  if (s == "latency") return Metric::Latency;
  if (s == "length") return Metric::Length;
  throw ConfigError("unknown metric '" + s + "' (expected error, latency or length)");
}

bool wants(const SweepConfig& cfg, Metric m) {
  return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent, reproducible seed per simulated point.
std::uint64_t point_seed(std::uint64_t master, std::string_view key, std::size_t eps_index) {
  return seed_schedule(master ^ fnv1a(key), eps_index)();
}

std::string code_tag(const CodeParams& c) {
  return "n" + std::to_string(c.n) + "_k" + std::to_string(c.k) + "_L" + std::to_string(c.memory);
}

std::string bc_tag(int n, int k) { return "bc_n" + std::to_string(n) + "_k" + std::to_string(k); }

std::string mode_tag(const ModeConfig& m, int memory, bool with_n_re) {
  std::string s = std::string(to_string(m.mode)) + "_k" + std::to_string(m.k) + "_d" + std::to_string(m.delta);
  if (with_n_re) s += "_nre" + std::to_string(m.n_re);
  return s + "_L" + std::to_string(memory);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Series {
  std::string name;
  std::function<std::pair<double, std::optional<double>>(std::size_t, double)> eval;
};

class SeriesSet {
 public:
  void add(std::string name, decltype(Series::eval) eval) {
    if (!seen_.insert(name).second) return;
    series_.push_back({std::move(name), std::move(eval)});
  }
  const std::vector<Series>& series() const { return series_; }

 private:
  std::set<std::string> seen_;
  std::vector<Series> series_;
};

// Simulation results shared between metrics of the same configuration.
class SimCache {
 public:
  explicit SimCache(const SweepConfig& cfg) : cfg_(cfg) {}

  const SimReport& snc(const CodeParams& code, std::size_t i, double eps) {
    const std::string key = "snc_" + code_tag(code);
    return lookup(key, i, [&](const SimOptions& o) { return sim_snc_first_block(code, eps, o); });
  }

  const SimReport& mode(const ModeConfig& m, int memory, std::size_t i, double eps) {
    const std::string key = mode_tag(m, memory, true);
    const CodeParams code{cfg_.mode_n, m.k, memory, 256};
    return lookup(key, i, [&](const SimOptions& o) { return sim_mode(code, m, eps, o); });
  }

 private:
  template <class F>
  const SimReport& lookup(const std::string& key, std::size_t i, F&& simulate) {
    const auto full = key + "@" + std::to_string(i);
    auto it = cache_.find(full);
    if (it == cache_.end()) {
      SimOptions o;
      o.trials = cfg_.trials;
      o.threads = cfg_.threads;
      o.seed = point_seed(cfg_.seed, key, i);
      it = cache_.emplace(full, simulate(o)).first;
    }
    return it->second;
  }

  const SweepConfig& cfg_;
  std::map<std::string, SimReport> cache_;
};

}  // namespace

std::vector<double> EpsilonGrid::values() const {
  std::vector<double> out;
  if (step <= 0.0) {
    if (min == max) out.push_back(min);
    return out;
  }
  for (int i = 0;; ++i) {
    const double v = std::round((min + i * step) * 1e9) / 1e9;
    if (v > max + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

void SweepConfig::validate() const {
  if (epsilons.empty()) throw ConfigError("epsilon grid is empty");
  for (double e : epsilons)
    if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("epsilon " + format_double(e) + " outside [0, 1]");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (metrics.empty()) throw ConfigError("no metrics selected");
  if (codes.empty() && modes.empty()) throw ConfigError("nothing to evaluate: no codes and no modes");
  for (const auto& c : codes) {
    if (c.k < 1 || c.k > c.n || c.memory < 0) throw ConfigError("invalid code " + to_string(c));
  }
  for (const auto& m : modes) {
    try {
      m.validate();
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
    if (m.delta > mode_n - m.k) throw ConfigError("mode " + to_string(m) + ": delta exceeds mode_n - k");
  }
  if (!modes.empty() && mode_memories.empty()) throw ConfigError("modes given without mode_memories");
  for (int l : mode_memories)
    if (l < 0) throw ConfigError("mode memory must be >= 0");
  if (experiment.empty() || experiment.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("experiment id must be a plain file stem");
  }
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4"}; }

SweepConfig preset(std::string_view name) {
  SweepConfig cfg;
  cfg.experiment = std::string(name);
  if (name == "fig1") {
    // first-block error: short/long block codes, lower bound, simulation
    cfg.epsilons = EpsilonGrid{0.1, 0.3, 0.025}.values();
    cfg.codes = {{12, 8, 1, 256}, {12, 8, 2, 256}, {18, 12, 2, 256}};
    cfg.metrics = {Metric::Error};
  } else if (name == "fig2") {
    // average packet latency of block codes and sliding-window codes
    cfg.epsilons = EpsilonGrid{0.1, 0.3, 0.025}.values();
    cfg.codes = {{12, 8, 0, 256}, {12, 8, 1, 256}, {12, 8, 2, 256}};
    cfg.metrics = {Metric::Latency};
  } else if (name == "fig3" || name == "fig4") {
    cfg.epsilons = EpsilonGrid{0.15, 0.3, 0.025}.values();
    cfg.codes = {{12, 8, 1, 256}};
    cfg.mode_n = 12;
    cfg.mode_memories = {0, 1};
    if (name == "fig3") {
      cfg.modes = {{Mode::M1, 8, 0, 1}, {Mode::M2, 8, 2, 1}, {Mode::M3, 8, 2, 1}};
      cfg.metrics = {Metric::Error, Metric::Length};
    } else {
      for (int n_re : {1, 8}) {
        cfg.modes.push_back({Mode::M1, 8, 0, n_re});
        cfg.modes.push_back({Mode::M2, 8, 2, n_re});
        cfg.modes.push_back({Mode::M3, 8, 2, n_re});
      }
      cfg.metrics = {Metric::Latency};
    }
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig1, fig2, fig3 or fig4)");
  }
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) cfg.out_dir = dir;
  return cfg;
}

SweepConfig apply_json(SweepConfig cfg, const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
    if (j.contains("epsilon")) {
      const auto& e = j["epsilon"];
      if (e.is_array()) {
        cfg.epsilons = e.get<std::vector<double>>();
      } else if (e.is_number()) {
        cfg.epsilons = {e.get<double>()};
      } else {
        cfg.epsilons = EpsilonGrid{e.at("min").get<double>(), e.at("max").get<double>(), e.at("step").get<double>()}.values();
      }
    }
    if (j.contains("codes")) {
      cfg.codes.clear();
      for (const auto& c : j["codes"])
        cfg.codes.push_back({c.at("n").get<int>(), c.at("k").get<int>(), c.value("L", 0), c.value("q", 256u)});
    }
    if (j.contains("modes")) {
      cfg.modes.clear();
      for (const auto& m : j["modes"]) {
        cfg.modes.push_back({parse_mode(m.at("mode").get<std::string>()), m.at("k").get<int>(), m.value("delta", 0),
                             m.value("n_re", 0)});
      }
    }
    if (j.contains("mode_n")) cfg.mode_n = j["mode_n"].get<int>();
    if (j.contains("mode_memories")) cfg.mode_memories = j["mode_memories"].get<std::vector<int>>();
    if (j.contains("metrics")) {
      cfg.metrics.clear();
      for (const auto& m : j["metrics"]) cfg.metrics.push_back(parse_metric(m.get<std::string>()));
    }
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::uint64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("emit")) {
      const auto emit = j["emit"].get<std::vector<std::string>>();
      cfg.emit_csv = std::find(emit.begin(), emit.end(), "csv") != emit.end();
      cfg.emit_json = std::find(emit.begin(), emit.end(), "json") != emit.end();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

nlohmann::json to_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = cfg.experiment;
  j["epsilon"] = cfg.epsilons;
  auto& codes = j["codes"] = nlohmann::json::array();
  for (const auto& c : cfg.codes) codes.push_back({{"n", c.n}, {"k", c.k}, {"L", c.memory}, {"q", c.q}});
  auto& modes = j["modes"] = nlohmann::json::array();
  for (const auto& m : cfg.modes) {
    modes.push_back({{"mode", std::string(to_string(m.mode))}, {"k", m.k}, {"delta", m.delta}, {"n_re", m.n_re}});
  }
  j["mode_n"] = cfg.mode_n;
  j["mode_memories"] = cfg.mode_memories;
  auto& metrics = j["metrics"] = nlohmann::json::array();
  for (auto m : cfg.metrics) metrics.push_back(metric_name(m));
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir.string();
  auto& emit = j["emit"] = nlohmann::json::array();
  if (cfg.emit_csv) emit.push_back("csv");
  if (cfg.emit_json) emit.push_back("json");
  return j;
}

std::vector<Row> evaluate(const SweepConfig& cfg) {
  cfg.validate();
  SimCache sims(cfg);
  SeriesSet set;
  using Value = std::pair<double, std::optional<double>>;
  auto analytic = [](double v) { return Value{v, std::nullopt}; };
  auto simulated = [](const Estimate& e) { return Value{e.value, e.std_error}; };

  for (const auto& code : cfg.codes) {
    const std::string snc = "snc_" + code_tag(code);
    const int long_n = code.window_blocks() * code.n;
    const int long_k = code.window_blocks() * code.k;
    if (wants(cfg, Metric::Error)) {
      set.add(bc_tag(code.n, code.k) + "_analytic_error",
              [=](std::size_t, double e) { return analytic(1.0 - short_bc_success(code, e)); });
      if (code.memory > 0) {
        set.add(bc_tag(long_n, long_k) + "_analytic_error",
                [=](std::size_t, double e) { return analytic(1.0 - comparable_long_bc_success(code, e)); });
        set.add(snc + "_bound_error",
                [=](std::size_t, double e) { return analytic(1.0 - snc_success_lower_bound(code, e)); });
        if (code.memory <= kExactMaxMemory && code.n <= kExactMaxBlockLength) {
          set.add(snc + "_exact_error",
                  [=](std::size_t, double e) { return analytic(1.0 - snc_success_exact(code, e).total); });
        }
        set.add(snc + "_sim_error",
                [=, &sims](std::size_t i, double e) { return simulated(sims.snc(code, i, e).error_rate); });
      }
    }
    if (wants(cfg, Metric::Latency)) {
      set.add(bc_tag(code.n, code.k) + "_analytic_latency",
              [=](std::size_t, double e) { return analytic(bc_avg_latency(code.n, code.k, e)); });
      set.add(bc_tag(long_n, long_k) + "_analytic_latency",
              [=](std::size_t, double e) { return analytic(bc_avg_latency(long_n, long_k, e)); });
      // A block code is the L = 0 case of the sliding-window simulation.
      const CodeParams long_bc{long_n, long_k, 0, 256};
      set.add(bc_tag(long_n, long_k) + "_sim_latency",
              [=, &sims](std::size_t i, double e) { return simulated(sims.snc(long_bc, i, e).avg_latency); });
      if (code.memory > 0) {
        if (code.memory <= kExactMaxMemory && code.n <= kExactMaxBlockLength) {
          set.add(snc + "_analytic_latency",
                  [=](std::size_t, double e) { return analytic(snc_avg_latency(code, e)); });
        }
        set.add(snc + "_sim_latency",
                [=, &sims](std::size_t i, double e) { return simulated(sims.snc(code, i, e).avg_latency); });
      }
    }
  }

  for (const auto& m : cfg.modes) {
    for (int memory : cfg.mode_memories) {
      const std::string base = mode_tag(m, memory, false);
      const std::string timed = mode_tag(m, memory, true);
      if (wants(cfg, Metric::Error)) {
        if (memory == 0) {
          set.add(base + "_analytic_error", [=](std::size_t, double e) { return analytic(1.0 - mode_success(m, e)); });
        }
        set.add(base + "_sim_error",
                [=, &sims](std::size_t i, double e) { return simulated(sims.mode(m, memory, i, e).error_rate); });
      }
      if (wants(cfg, Metric::Length)) {
        if (memory == 0) {
          set.add(base + "_analytic_length",
                  [=](std::size_t, double e) { return analytic(mode_avg_code_length(m, e)); });
          set.add(base + "_analytic_length_ceil",
                  [=](std::size_t, double e) { return analytic(std::ceil(mode_avg_code_length(m, e) - 1e-12)); });
        }
        set.add(base + "_sim_length",
                [=, &sims](std::size_t i, double e) { return simulated(sims.mode(m, memory, i, e).avg_code_length); });
      }
      if (wants(cfg, Metric::Latency)) {
        if (memory == 0) {
          set.add(timed + "_analytic_latency",
                  [=](std::size_t, double e) { return analytic(mode_avg_latency(m, e)); });
        }
        set.add(timed + "_sim_latency",
                [=, &sims](std::size_t i, double e) { return simulated(sims.mode(m, memory, i, e).avg_latency); });
      }
    }
  }

  std::vector<Row> rows;
  for (const auto& s : set.series()) {
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
      const double eps = cfg.epsilons[i];
      const auto [value, err] = s.eval(i, eps);
      rows.push_back({eps, s.name, value, err});
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << "epsilon,series,value,stderr\n";
  for (const auto& r : rows) {
    os << format_double(r.epsilon) << ',' << r.series << ',' << format_double(r.value) << ',';
    if (r.std_error) os << format_double(*r.std_error);
    os << '\n';
  }
}

RunResult run(const SweepConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.rows = evaluate(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string() + ": " + ec.message());

  if (cfg.emit_csv) {
    const auto path = cfg.out_dir / (cfg.experiment + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_csv(os, result.rows);
    if (!os.flush()) throw IoError("write failed for " + path.string());
    result.csv_path = path;
  }
  if (cfg.emit_json) {
    const auto path = cfg.out_dir / (cfg.experiment + ".json");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");

    const std::time_t tt = std::chrono::system_clock::to_time_t(started);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    std::vector<std::string> names;
    for (const auto& r : result.rows)
      if (names.empty() || names.back() != r.series) names.push_back(r.series);

    nlohmann::json side;
    side["experiment"] = cfg.experiment;
    side["config"] = to_json(cfg);
    side["seed"] = cfg.seed;
    side["version"] = std::string(version());
    side["started_at"] = stamp;
    side["wall_clock_seconds"] = seconds;
    side["series"] = names;
    side["csv"] = cfg.emit_csv ? (cfg.experiment + ".csv") : "";
    side["conventions"] = {
        {"classifier", "window l decodes block 0 iff erasures in blocks 0..l <= (l+1)(n-k); earlier blocks known"},
        {"snc_latency", "lost packet p waits until window l* completes: (l*+1)n - p; undecodable counts as l* = L"},
        {"mode_timing",
         "first transmission slots 1..F, feedback N_Re after slot F, retransmission back to back; latency is the "
         "decision slot minus p"},
        {"mode_window", "each block runs the protocol; residual erasures n - received feed the count rule"},
        {"point_seed", "seed_schedule(master ^ fnv1a(series key), epsilon index)"}};
    os << side.dump(2) << '\n';
    if (!os.flush()) throw IoError("write failed for " + path.string());
    result.json_path = path;
  }
  return result;
}

// ---------------------------------------------------------------------------
// verify

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

std::uint64_t choose(int n, int r) {
  if (r < 0 || r > n) return 0;
  std::uint64_t c = 1;
  for (int i = 1; i <= r; ++i) c = c * static_cast<std::uint64_t>(n - r + i) / static_cast<std::uint64_t>(i);
  return c;
}

struct Checker {
  VerifyReport& report;
  std::ostream* progress;

  void add(std::string name, bool passed, double deviation, std::string detail = {}) {
    if (progress) {
      *progress << (passed ? "[PASS] " : "[FAIL] ") << name << "  deviation=" << format_double(deviation);
      if (!detail.empty()) *progress << "  " << detail;
      *progress << '\n';
    }
    report.checks.push_back({std::move(name), passed, deviation, std::move(detail)});
  }
};

void check_field_axioms(Checker& c) {
  for (unsigned bits : {4u, 8u}) {
    const gf::Field f(bits);
    const unsigned q = f.size();
    std::size_t failures = 0;
    for (unsigned a = 0; a < q; ++a) {
      const gf::FieldElem x{static_cast<std::uint8_t>(a)};
      if (f.add(x, x) != f.zero() || f.mul(f.one(), x) != x) ++failures;
      if (a != 0 && f.mul(f.inv(x), x) != f.one()) ++failures;
      for (unsigned b = 0; b < q; ++b) {
        const gf::FieldElem y{static_cast<std::uint8_t>(b)};
        if (f.mul(x, y) != f.mul(y, x)) ++failures;
        if (bits == 4) {
          for (unsigned d = 0; d < q; ++d) {
            const gf::FieldElem z{static_cast<std::uint8_t>(d)};
            if (f.mul(f.mul(x, y), z) != f.mul(x, f.mul(y, z))) ++failures;
            if (f.mul(x, f.add(y, z)) != f.add(f.mul(x, y), f.mul(x, z))) ++failures;
          }
        }
      }
    }
    c.add("field axioms GF(" + std::to_string(q) + ")", failures == 0, static_cast<double>(failures));
  }
}

void check_reductions(Checker& c) {
  double worst = 0.0;
  for (int k : {1, 4, 8, 16})
    for (double e : {0.05, 0.15, 0.3, 0.6})
      for (int n_re : {0, 1, 8}) {
        const ModeConfig m1{Mode::M1, k, 0, n_re};
        for (Mode mode : {Mode::M2, Mode::M3}) {
          const ModeConfig mx{mode, k, 0, n_re};
          worst = std::max(worst, std::abs(mode_success(mx, e) - mode_success(m1, e)));
          worst = std::max(worst, std::abs(mode_avg_code_length(mx, e) - mode_avg_code_length(m1, e)));
          worst = std::max(worst, std::abs(mode_avg_latency(mx, e) - mode_avg_latency(m1, e)));
        }
      }
  c.add("delta=0 reduces M2/M3 to M1", worst <= 1e-12, worst);

  double l0 = 0.0;
  for (const CodeParams p : {CodeParams{3, 2, 0}, CodeParams{12, 8, 0}, CodeParams{18, 12, 0}})
    for (double e : {0.1, 0.2, 0.3}) {
      l0 = std::max(l0, std::abs(snc_success_exact(p, e).total - short_bc_success(p, e)));
      l0 = std::max(l0, std::abs(comparable_long_bc_success(p, e) - short_bc_success(p, e)));
    }
  c.add("L=0 reduces to the (n,k) block code", l0 <= 1e-12, l0);
}

void check_normalization(Checker& c) {
  double worst = 0.0;
  for (double e : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    for (const CodeParams p : {CodeParams{3, 2, 1}, CodeParams{12, 8, 2}, CodeParams{18, 12, 2}})
      for (int pkt = 1; pkt <= p.k; ++pkt) worst = std::max(worst, std::abs(snc_latency_dist(p, e, pkt).total() - 1.0));
    for (int pkt = 1; pkt <= 8; ++pkt) worst = std::max(worst, std::abs(bc_latency_dist(12, 8, e, pkt).total() - 1.0));
    for (Mode mode : {Mode::M1, Mode::M2, Mode::M3})
      for (int delta : {0, 2, 5}) {
        if (mode == Mode::M1 && delta != 0) continue;
        const ModeConfig m{mode, 8, delta, 8};
        for (int pkt = 1; pkt <= 8; ++pkt)
          worst = std::max(worst, std::abs(mode_latency_dist(m, e, pkt).total() - 1.0));
      }
  }
  c.add("latency distributions sum to 1", worst <= 1e-12, worst);
}

void check_vandermonde_identity(Checker& c) {
  std::size_t failures = 0;
  for (int n = 1; n <= 20; ++n)
    for (int d = 0; d <= 2 * n; ++d) {
      std::uint64_t lhs = 0;
      for (int a = 0; a <= d; ++a) lhs += choose(n, a) * choose(n, d - a);
      if (lhs != choose(2 * n, d)) ++failures;
    }
  c.add("sum C(n,a)C(n,d-a) == C(2n,d) for n <= 20", failures == 0, static_cast<double>(failures));
}

void check_bounds(Checker& c) {
  double tight = 0.0;
  for (const CodeParams p : {CodeParams{3, 2, 1}, CodeParams{12, 8, 1}, CodeParams{18, 12, 1}})
    for (double e = 0.05; e <= 0.5 + 1e-9; e += 0.05)
      tight = std::max(tight, std::abs(snc_success_exact(p, e).total - snc_success_lower_bound(p, e)));
  c.add("lower bound is tight at L=1", tight <= 1e-12, tight);

  double violation = 0.0;
  for (const CodeParams p : {CodeParams{3, 2, 2}, CodeParams{4, 2, 2}, CodeParams{12, 8, 2}, CodeParams{12, 8, 3}})
    for (double e = 0.05; e <= 0.5 + 1e-9; e += 0.05) {
      const double exact = snc_success_exact(p, e).total;
      violation = std::max(violation, snc_success_lower_bound(p, e) - exact);
      violation = std::max(violation, comparable_long_bc_success(p, e) - exact);
    }
  c.add("bound <= exact and long BC <= exact", violation <= 1e-12, std::max(violation, 0.0));

  // The long block code only beats the short one well below the redundancy
  // fraction, so this ordering is checked on the figure grid.
  double order = 0.0;
  for (const CodeParams p : {CodeParams{12, 8, 1}, CodeParams{12, 8, 2}, CodeParams{18, 12, 2}})
    for (double e : EpsilonGrid{0.1, 0.3, 0.025}.values())
      order = std::max(order, short_bc_success(p, e) - comparable_long_bc_success(p, e));
  c.add("short BC <= long BC for eps in [0.1, 0.3]", order <= 1e-12, std::max(order, 0.0));

  double m3 = 0.0;
  for (int k = 1; k <= 32; k += 3)
    for (int delta = 0; delta <= 8; ++delta)
      for (double e : {0.01, 0.1, 0.3, 0.6, 0.9}) {
        const double direct = mode_success({Mode::M3, k, delta, 0}, e);
        m3 = std::max(m3, std::abs(direct - m3_success_closed_form(k, delta, e)) / direct);
      }
  c.add("M3 closed form equals direct sum (relative)", m3 <= 1e-9, m3);
}

void check_codec(Checker& c, bool inject_fault) {
  for (const CodeParams p : {CodeParams{3, 2, 1, 16}, CodeParams{3, 2, 2, 16}}) {
    auto gens = build_generators(p, 0);
    std::string label = "is_mdp " + to_string(p) + " seed " + std::to_string(gens.seed);
    if (inject_fault) {
      gens.parity[1] = gens.parity[0];
      label += " with P_1 := P_0";
    }
    const auto mdp = is_mdp(gens);
    c.add(label, mdp.mdp, mdp.mdp ? 0.0 : 1.0,
          mdp.counterexample ? "counterexample window " + std::to_string(mdp.failing_window) + ": " +
                                   mdp.counterexample->describe()
                             : std::to_string(mdp.patterns_checked) + " patterns");
    const auto agree = compare_decoder_with_count_rule(gens);
    c.add("decoder vs count rule " + to_string(p), agree.disagreements == 0, static_cast<double>(agree.disagreements),
          std::to_string(agree.patterns) + " patterns" +
              (agree.first_disagreement ? ", first disagreement " + agree.first_disagreement->describe() : ""));
  }
}

void check_simulation(Checker& c, unsigned threads) {
  SimOptions o;
  o.trials = 100'000;
  o.seed = 20240101;
  o.threads = threads;
  auto within = [&](const std::string& name, const Estimate& est, double expected) {
    const double z = est.std_error > 0 ? std::abs(est.value - expected) / est.std_error
                                       : (est.value == expected ? 0.0 : INFINITY);
    c.add(name, z <= 4.0, z, "sim " + format_double(est.value) + " vs " + format_double(expected) + " (z-score)");
  };
  const CodeParams small{3, 2, 1, 16};
  o.decoder_check_every = 97;
  const auto snc = sim_snc_first_block(small, 0.1, o);
  within("sim error (3,2,1) eps=0.1", snc.error_rate, 1.0 - snc_success_exact(small, 0.1).total);
  c.add("sim decoder cross-check (3,2,1)", snc.decoder_disagreements == 0, static_cast<double>(snc.decoder_disagreements),
        std::to_string(snc.decoder_checks) + " checked trials");
  o.decoder_check_every = 0;
  const CodeParams twelve{12, 8, 1, 256};
  within("sim error (12,8,1) eps=0.2", sim_snc_first_block(twelve, 0.2, o).error_rate,
         1.0 - snc_success_lower_bound(twelve, 0.2));
  const CodeParams mode_code{12, 8, 0, 256};
  for (const ModeConfig m : {ModeConfig{Mode::M1, 8, 0, 8}, ModeConfig{Mode::M2, 8, 2, 8}, ModeConfig{Mode::M3, 8, 2, 8}}) {
    const auto r = sim_mode(mode_code, m, 0.2, o);
    within("sim success " + to_string(m) + " eps=0.2", r.error_rate, 1.0 - mode_success(m, 0.2));
    within("sim length " + to_string(m) + " eps=0.2", r.avg_code_length, mode_avg_code_length(m, 0.2));
  }
}

}  // namespace

VerifyReport verify(const VerifyOptions& options, std::ostream* progress) {
  VerifyReport report;
  Checker c{report, progress};
  check_field_axioms(c);
  check_reductions(c);
  check_normalization(c);
  check_vandermonde_identity(c);
  check_bounds(c);
  if (options.level == VerifyLevel::Exhaustive || options.inject_fault) check_codec(c, options.inject_fault);
  if (options.level == VerifyLevel::Exhaustive) check_simulation(c, options.threads);
  return report;
}

}  // namespace snc::experiments
