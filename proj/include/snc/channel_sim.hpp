#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "snc/code.hpp"
#include "snc/modes.hpp"

namespace snc {

/// SplitMix64 stream; satisfies UniformRandomBitGenerator.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  explicit TrialRng(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += kGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const { return state_; }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

 private:
  std::uint64_t state_;
};

/// Stream for one trial. Trial i starts 2^32 steps after trial i-1 on the Weyl
/// sequence anchored at a hash of the master seed, so streams of one master seed
/// are disjoint while each trial draws fewer than 2^32 values.
TrialRng seed_schedule(std::uint64_t master_seed, std::uint64_t trial_index);

/// i.i.d. Bernoulli(epsilon) erasure mask (true = erased).
std::vector<bool> erase(int count, double epsilon, TrialRng& rng);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct SimOptions {
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  // Cross-run the algebraic decoder on every N-th trial (0 disables).
  std::uint64_t decoder_check_every = 0;
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Estimate error_rate;
  Estimate avg_code_length;
  Estimate avg_latency;                 // mean over data packets of the block
  std::vector<Estimate> packet_latency;  // index p-1
  std::uint64_t decoder_checks = 0;
  std::uint64_t decoder_disagreements = 0;
  nlohmann::json config;  // echo of the simulated configuration
};

/// First-block error probability of plain sliding-window coding. Each trial draws
/// L+1 blocks of erasures and classifies block 0 with decodable_by_count; blocks
/// before the window are taken as correctly decoded.
SimReport sim_snc_first_block(const CodeParams& params, double epsilon, const SimOptions& options);

/// Packet latency of plain sliding-window coding: 0 for a received data packet,
/// otherwise (l*+1)n - p for the smallest successful window l*, or (L+1)n - p when
/// no window up to L decodes.
SimReport sim_snc_latency(const CodeParams& params, double epsilon, const SimOptions& options);

/// Retransmission protocol simulation for block 0 of a window of L+1 blocks.
///
/// Timing: the first transmission of a block occupies slots 1..F (F = k, or k+delta
/// for M3); feedback arrives N_Re slots after slot F, and retransmitted parities
/// follow back to back. A lost data packet's latency is the slot at which the
/// decision for its block is made (end of the retransmission burst, or end of the
/// first transmission if none) minus its own slot p.
///
/// Window composition for L >= 1: every block runs the protocol independently and
/// contributes residual erasures n - received to decodable_by_count. If block 0
/// only decodes with window l*, its packets wait for blocks 0..l* to complete
/// (block j starts j*F slots after block 0). Undecodable blocks are charged the
/// completion time of the full window.
///
/// Throws std::domain_error when params.k != cfg.k or delta > n - k.
SimReport sim_mode(const CodeParams& params, const ModeConfig& cfg, double epsilon, const SimOptions& options);

}  // namespace snc
