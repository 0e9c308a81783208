#include "snc/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "snc/analytic.hpp"

namespace snc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Integer tallies; merging is exact, so results do not depend on the split.
struct Tally {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t length_sum = 0;
  std::uint64_t length_sq = 0;
  std::uint64_t latency_sum = 0;  // per-trial sum over the k data packets
  std::uint64_t latency_sq = 0;
  std::vector<std::uint64_t> packet_sum;
  std::vector<std::uint64_t> packet_sq;
  std::uint64_t checks = 0;
  std::uint64_t disagreements = 0;

  explicit Tally(int k) : packet_sum(k), packet_sq(k) {}

  void merge(const Tally& o) {
    trials += o.trials;
    failures += o.failures;
    length_sum += o.length_sum;
    length_sq += o.length_sq;
    latency_sum += o.latency_sum;
    latency_sq += o.latency_sq;
    for (std::size_t i = 0; i < packet_sum.size(); ++i) {
      packet_sum[i] += o.packet_sum[i];
      packet_sq[i] += o.packet_sq[i];
    }
    checks += o.checks;
    disagreements += o.disagreements;
  }
};

struct TrialOutcome {
  std::optional<int> window_used;  // l*, or nullopt when undecodable
  int packets_sent = 0;
  std::vector<int> latency;        // per data packet p = 1..k
  bool checked = false;
  bool disagreement = false;
};

void record(Tally& t, const TrialOutcome& o) {
  ++t.trials;
  if (!o.window_used) ++t.failures;
  const auto len = static_cast<std::uint64_t>(o.packets_sent);
  t.length_sum += len;
  t.length_sq += len * len;
  std::uint64_t sum = 0;
  for (std::size_t p = 0; p < o.latency.size(); ++p) {
    const auto d = static_cast<std::uint64_t>(o.latency[p]);
    t.packet_sum[p] += d;
    t.packet_sq[p] += d * d;
    sum += d;
  }
  t.latency_sum += sum;
  t.latency_sq += sum * sum;
  if (o.checked) {
    ++t.checks;
    if (o.disagreement) ++t.disagreements;
  }
}

Estimate mean_estimate(std::uint64_t sum, std::uint64_t sq, std::uint64_t n, double scale = 1.0) {
  if (n == 0) return {};
  const double dn = static_cast<double>(n);
  const double mean = static_cast<double>(sum) / dn;
  double var = 0.0;
  if (n > 1) var = std::max(0.0, (static_cast<double>(sq) / dn - mean * mean) * dn / (dn - 1.0));
  return {mean * scale, std::sqrt(var / dn) * scale};
}

Estimate rate_estimate(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

template <class TrialFn>
Tally run_trials(const SimOptions& options, int k, TrialFn&& trial) {
  if (options.trials < 1) throw std::domain_error("simulation requires at least one trial");
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, options.trials));

  std::vector<Tally> partial(threads, Tally(k));
  auto worker = [&](unsigned w) {
    const std::uint64_t begin = options.trials * w / threads;
    const std::uint64_t end = options.trials * (w + 1) / threads;
    for (std::uint64_t i = begin; i < end; ++i) {
      TrialRng rng = seed_schedule(options.seed, i);
      record(partial[w], trial(rng, i));
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  Tally total(k);
  for (const auto& t : partial) total.merge(t);
  return total;
}

SimReport make_report(const Tally& t, const SimOptions& options, int k) {
  SimReport r;
  r.trials = t.trials;
  r.seed = options.seed;
  r.error_rate = rate_estimate(t.failures, t.trials);
  r.avg_code_length = mean_estimate(t.length_sum, t.length_sq, t.trials);
  r.avg_latency = mean_estimate(t.latency_sum, t.latency_sq, t.trials, 1.0 / k);
  for (int p = 0; p < k; ++p) r.packet_latency.push_back(mean_estimate(t.packet_sum[p], t.packet_sq[p], t.trials));
  r.decoder_checks = t.checks;
  r.decoder_disagreements = t.disagreements;
  return r;
}

void check_shape(const CodeParams& p) {
  if (p.k < 1 || p.k > p.n || p.memory < 0) throw std::domain_error("invalid code shape " + to_string(p));
}

// Runs the algebraic decoder on the drawn pattern and compares with the count rule.
bool decoder_disagrees(const GeneratorSet& gens, const ErasurePattern& pattern, bool count_rule_success,
                       TrialRng& data_rng) {
  const auto& p = gens.params;
  const unsigned q = p.q;
  auto random_block = [&] {
    Block b(p.k, Packet(1));
    for (auto& pkt : b) pkt[0] = {static_cast<std::uint8_t>(data_rng() % q)};
    return b;
  };
  std::vector<Block> history(p.memory);
  for (auto& b : history) b = random_block();
  std::vector<Block> sources(p.window_blocks());
  for (auto& b : sources) b = random_block();

  std::vector<Block> coded;
  for (int j = 0; j < p.window_blocks(); ++j) {
    std::vector<Block> h;
    for (int l = 0; l <= p.memory; ++l) {
      const int src = j - l;
      h.push_back(src >= 0 ? sources[src] : history[-src - 1]);
    }
    coded.push_back(encode_block(h, gens));
  }
  const auto decoded = window_decode(coded, pattern, gens, history);
  const bool algebraic_success = decoded && *decoded == sources[0];
  return algebraic_success != count_rule_success;
}

SimReport simulate_snc(const CodeParams& params, double epsilon, const SimOptions& options) {
  check_shape(params);
  check_erasure_probability(epsilon);
  std::optional<GeneratorSet> gens;
  if (options.decoder_check_every > 0) gens = build_generators(params, options.seed);

  const int n = params.n;
  const int blocks = params.window_blocks();
  auto trial = [&](TrialRng& rng, std::uint64_t index) {
    ErasurePattern pattern(n, blocks);
    for (int j = 0; j < blocks; ++j) {
      const auto mask = erase(n, epsilon, rng);
      for (int i = 0; i < n; ++i)
        if (mask[i]) pattern.set(j, i);
    }
    const auto counts = pattern.counts();
    TrialOutcome o;
    o.window_used = decodable_by_count(counts, params);
    o.packets_sent = n;
    const int window = o.window_used.value_or(params.memory);
    o.latency.resize(params.k);
    for (int p = 1; p <= params.k; ++p) o.latency[p - 1] = pattern.erased(0, p - 1) ? (window + 1) * n - p : 0;
    if (gens && index % options.decoder_check_every == 0) {
      TrialRng data_rng = seed_schedule(~options.seed, index);
      o.checked = true;
      o.disagreement = decoder_disagrees(*gens, pattern, o.window_used.has_value(), data_rng);
    }
    return o;
  };
  auto report = make_report(run_trials(options, params.k, trial), options, params.k);
  report.config = {{"kind", "snc"},
                   {"n", params.n},
                   {"k", params.k},
                   {"L", params.memory},
                   {"epsilon", epsilon},
                   {"trials", options.trials},
                   {"seed", options.seed},
                   {"decoder_check_every", options.decoder_check_every},
                   {"classifier", "count rule: window l decodes iff erasures in blocks 0..l <= (l+1)(n-k)"}};
  return report;
}

struct BlockRun {
  int received = 0;
  int sent = 0;
  int completion = 0;  // slot of the block's decode decision, relative to its start
  std::vector<bool> first;
};

BlockRun run_block(const ModeConfig& cfg, double epsilon, TrialRng& rng) {
  const int k = cfg.k;
  const int first_len = cfg.mode == Mode::M3 ? k + cfg.delta : k;
  BlockRun b;
  b.first = erase(first_len, epsilon, rng);
  const int data_lost = static_cast<int>(std::count(b.first.begin(), b.first.begin() + k, true));
  const int all_lost = static_cast<int>(std::count(b.first.begin(), b.first.end(), true));

  int retx = 0;
  switch (cfg.mode) {
    case Mode::M1: retx = data_lost; break;
    case Mode::M2: retx = data_lost > 0 ? data_lost + cfg.delta : 0; break;
    case Mode::M3: retx = std::max(0, all_lost - cfg.delta); break;
  }
  b.sent = first_len + retx;
  b.received = first_len - all_lost;
  b.completion = first_len;
  if (retx > 0) {
    const auto again = erase(retx, epsilon, rng);
    b.received += retx - static_cast<int>(std::count(again.begin(), again.end(), true));
    b.completion = first_len + cfg.n_re + retx;
  }
  return b;
}

}  // namespace

TrialRng seed_schedule(std::uint64_t master_seed, std::uint64_t trial_index) {
  const std::uint64_t anchor = mix64(master_seed + TrialRng::kGamma);
  return TrialRng(anchor + (trial_index << 32) * TrialRng::kGamma);
}

std::vector<bool> erase(int count, double epsilon, TrialRng& rng) {
  check_erasure_probability(epsilon);
  std::vector<bool> mask(std::max(count, 0));
  for (auto&& e : mask) e = rng.uniform() < epsilon;
  return mask;
}

SimReport sim_snc_first_block(const CodeParams& params, double epsilon, const SimOptions& options) {
  return simulate_snc(params, epsilon, options);
}

SimReport sim_snc_latency(const CodeParams& params, double epsilon, const SimOptions& options) {
  SimOptions no_check = options;
  no_check.decoder_check_every = 0;
  return simulate_snc(params, epsilon, no_check);
}

SimReport sim_mode(const CodeParams& params, const ModeConfig& cfg, double epsilon, const SimOptions& options) {
  check_shape(params);
  cfg.validate();
  check_erasure_probability(epsilon);
  if (params.k != cfg.k) throw std::domain_error("sim_mode: code and mode disagree on k");
  if (cfg.delta > params.redundancy()) throw std::domain_error("sim_mode: delta exceeds n - k");

  const int k = cfg.k;
  const int n = params.n;
  const int blocks = params.window_blocks();
  const int first_len = cfg.mode == Mode::M3 ? k + cfg.delta : k;

  auto trial = [&](TrialRng& rng, std::uint64_t) {
    std::vector<BlockRun> runs;
    std::vector<int> residual;
    for (int j = 0; j < blocks; ++j) {
      runs.push_back(run_block(cfg, epsilon, rng));
      residual.push_back(n - runs.back().received);
    }
    TrialOutcome o;
    o.window_used = decodable_by_count(residual, params);
    o.packets_sent = runs[0].sent;
    const int window = o.window_used.value_or(params.memory);
    int decision = 0;
    for (int j = 0; j <= window; ++j) decision = std::max(decision, j * first_len + runs[j].completion);
    o.latency.resize(k);
    for (int p = 1; p <= k; ++p) o.latency[p - 1] = runs[0].first[p - 1] ? decision - p : 0;
    return o;
  };
  auto report = make_report(run_trials(options, k, trial), options, k);
  report.config = {{"kind", "mode"},
                   {"mode", std::string(to_string(cfg.mode))},
                   {"n", n},
                   {"k", k},
                   {"L", params.memory},
                   {"delta", cfg.delta},
                   {"n_re", cfg.n_re},
                   {"epsilon", epsilon},
                   {"trials", options.trials},
                   {"seed", options.seed},
                   {"composition",
                    "each block runs the protocol; residual erasures n - received feed the count rule over L+1 blocks"}};
  return report;
}

}  // namespace snc
