#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "snc/galois.hpp"

namespace snc {

/// Parameters of an (n, k, L) systematic sliding-window RS code over GF(q).
///
/// Each coded block carries n packets: the k source packets of the block followed by
/// n - k parity packets that combine the current block with the previous `memory`
/// source blocks. A decoding window therefore spans (memory + 1) * n packets.
struct CodeParams {
  int n = 0;
  int k = 0;
  int memory = 0;
  unsigned q = 256;

  int redundancy() const { return n - k; }
  int window_blocks() const { return memory + 1; }

  // Throws ConstructionError unless 1 <= k <= n, memory >= 0, q = 2^m and
  // q >= (memory + 1) * n + 1.
  void validate() const;

  friend bool operator==(const CodeParams&, const CodeParams&) = default;
};

std::string to_string(const CodeParams& p);

/// Parity matrices P_0..P_L of a systematic code, G_0 = [I_k P_0], G_l = [0 P_l].
///
/// The parity matrices come from one Vandermonde matrix with k rows: the first k
/// evaluation points form the basis A, each P_l then takes n - k fresh points B_l
/// and is stored as A^{-1} B_l (so [I_k P_0] is the systematic form of an RS code).
struct GeneratorSet {
  CodeParams params;
  std::vector<gf::Matrix> parity;
  std::vector<gf::FieldElem> points;
  std::uint64_t seed = 0;  // accepted seed after retries
  bool verified = false;   // is_mdp was run and passed

  gf::Field field() const { return gf::Field::with_size(params.q); }
};

void to_json(nlohmann::json& j, const GeneratorSet& g);
void from_json(const nlohmann::json& j, GeneratorSet& g);

using Packet = std::vector<gf::FieldElem>;
using Block = std::vector<Packet>;

/// Per-block erasure masks over a decoding window (true = erased).
class ErasurePattern {
 public:
  ErasurePattern(int n, int blocks);

  // Bit b of `bits` erases packet b % n of block b / n.
  static ErasurePattern from_bits(int n, int blocks, std::uint64_t bits);

  int packets_per_block() const { return n_; }
  int blocks() const { return static_cast<int>(masks_.size()); }

  bool erased(int block, int pos) const { return masks_.at(block).at(pos); }
  void set(int block, int pos, bool erased = true) { masks_.at(block).at(pos) = erased; }

  int count(int block) const;
  std::vector<int> counts() const;

  // Same pattern restricted to the first `blocks` blocks.
  ErasurePattern prefix(int blocks) const;

  std::string describe() const;

  friend bool operator==(const ErasurePattern&, const ErasurePattern&) = default;

 private:
  int n_;
  std::vector<std::vector<bool>> masks_;
};

constexpr std::uint64_t kMaxSeedRetries = 64;
constexpr int kMdpExhaustiveBudget = 20;  // max (L+1) * n for exhaustive checks

/// Systematic generators drawn from a shuffled set of nonzero evaluation points.
///
/// The point order is a Fisher-Yates shuffle driven by std::mt19937_64(seed). When
/// (L+1)*n is within kMdpExhaustiveBudget the candidate is checked with is_mdp and
/// the seed is advanced until a candidate passes (at most kMaxSeedRetries tries);
/// larger codes are returned unverified.
GeneratorSet build_generators(const CodeParams& params, std::uint64_t point_seed);

/// Encode the current block. `history[0]` is the current source block, `history[l]`
/// the block l steps back; missing history is treated as all-zero.
Block encode_block(std::span<const Block> history, const GeneratorSet& gens);

/// Smallest window index l such that the first l+1 erasure counts sum to at most
/// (l+1)(n-k), or nullopt when no window up to counts.size() qualifies.
std::optional<int> decodable_by_count(std::span<const int> counts, const CodeParams& params);

/// Recover source block 0 of the window from the non-erased packets.
///
/// `known_history` holds the source blocks preceding the window (most recent first);
/// they are taken as correct and subtracted out of the parity equations. Absent
/// history is zero. Returns nullopt when the linear system leaves any erased source
/// symbol of the target block undetermined.
std::optional<Block> window_decode(std::span<const Block> received, const ErasurePattern& erasures,
                                   const GeneratorSet& gens, std::span<const Block> known_history = {});

struct MdpReport {
  bool mdp = true;
  std::optional<ErasurePattern> counterexample;
  int failing_window = -1;
  std::size_t patterns_checked = 0;
};

/// Exhaustive maximum-distance-profile check: for every window length l+1 <= L+1 and
/// every erasure pattern with at most (l+1)(n-k) erasures in the window, window_decode
/// must recover the target block. Throws BudgetExceeded when (L+1)*n > kMdpExhaustiveBudget.
MdpReport is_mdp(const GeneratorSet& gens);

struct AgreementReport {
  std::size_t patterns = 0;
  std::size_t count_decodable = 0;
  std::size_t disagreements = 0;
  std::optional<ErasurePattern> first_disagreement;
};

/// Runs window_decode over the full L+1 block window for every one of the 2^((L+1)n)
/// erasure patterns and compares its success with decodable_by_count. Same budget
/// as is_mdp.
AgreementReport compare_decoder_with_count_rule(const GeneratorSet& gens);

}  // namespace snc
