#include "snc/code.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "snc/error.hpp"

namespace snc {

using gf::Field;
using gf::FieldElem;
using gf::Matrix;

void CodeParams::validate() const {
  if (k < 1 || k > n) throw ConstructionError("code requires 1 <= k <= n: " + to_string(*this));
  if (memory < 0) throw ConstructionError("memory length must be >= 0: " + to_string(*this));
  const Field f = Field::with_size(q);
  const long needed = static_cast<long>(memory + 1) * n + 1;
  if (static_cast<long>(f.size()) < needed) {
    throw ConstructionError("field GF(" + std::to_string(q) + ") too small for " + to_string(*this) +
                            ": need q >= " + std::to_string(needed));
  }
}

std::string to_string(const CodeParams& p) {
  std::ostringstream os;
  os << "(n=" << p.n << ", k=" << p.k << ", L=" << p.memory << ", q=" << p.q << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// ErasurePattern

ErasurePattern::ErasurePattern(int n, int blocks) : n_(n) {
  if (n < 1 || blocks < 0) throw std::domain_error("ErasurePattern: invalid shape");
  masks_.assign(blocks, std::vector<bool>(n, false));
}

ErasurePattern ErasurePattern::from_bits(int n, int blocks, std::uint64_t bits) {
  ErasurePattern p(n, blocks);
  for (int b = 0; b < n * blocks; ++b)
    if ((bits >> b) & 1u) p.set(b / n, b % n);
  return p;
}

int ErasurePattern::count(int block) const {
  const auto& m = masks_.at(block);
  return static_cast<int>(std::count(m.begin(), m.end(), true));
}

std::vector<int> ErasurePattern::counts() const {
  std::vector<int> out(masks_.size());
  for (int j = 0; j < blocks(); ++j) out[j] = count(j);
  return out;
}

ErasurePattern ErasurePattern::prefix(int blocks) const {
  ErasurePattern p(n_, blocks);
  for (int j = 0; j < blocks; ++j) p.masks_[j] = masks_.at(j);
  return p;
}

std::string ErasurePattern::describe() const {
  std::string s;
  for (int j = 0; j < blocks(); ++j) {
    if (j) s += ' ';
    for (bool e : masks_[j]) s += e ? 'x' : '.';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

std::vector<FieldElem> shuffled_points(const Field& f, std::uint64_t seed) {
  std::vector<FieldElem> pts(f.size() - 1);
  for (unsigned i = 0; i < pts.size(); ++i) pts[i] = {static_cast<std::uint8_t>(i + 1)};
  // Fisher-Yates with raw engine output; std::shuffle is not portable across libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[rng() % i]);
  return pts;
}

GeneratorSet candidate_generators(const CodeParams& params, std::uint64_t seed) {
  const Field f = Field::with_size(params.q);
  const auto pool = shuffled_points(f, seed);
  const std::size_t k = params.k;
  const std::size_t r = params.redundancy();

  GeneratorSet g;
  g.params = params;
  g.seed = seed;
  g.points.assign(pool.begin(), pool.begin() + k + (params.memory + 1) * r);

  const Matrix basis = gf::vandermonde(f, std::span(g.points).first(k), k);
  const auto basis_inv = gf::inverse(f, basis);
  if (!basis_inv) throw ConstructionError("Vandermonde basis unexpectedly singular");

  for (int l = 0; l <= params.memory; ++l) {
    const auto cols = std::span(g.points).subspan(k + l * r, r);
    g.parity.push_back(gf::multiply(f, *basis_inv, gf::vandermonde(f, cols, k)));
  }
  return g;
}

}  // namespace

GeneratorSet build_generators(const CodeParams& params, std::uint64_t point_seed) {
  params.validate();
  const bool verifiable = params.window_blocks() * params.n <= kMdpExhaustiveBudget;
  if (!verifiable) return candidate_generators(params, point_seed);

  for (std::uint64_t attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
    auto g = candidate_generators(params, point_seed + attempt);
    if (is_mdp(g).mdp) {
      g.verified = true;
      return g;
    }
  }
  throw ConstructionError("no MDP generator set found for " + to_string(params) + " within " +
                          std::to_string(kMaxSeedRetries) + " seeds starting at " + std::to_string(point_seed));
}

// ---------------------------------------------------------------------------
// Encoding

Block encode_block(std::span<const Block> history, const GeneratorSet& gens) {
  const auto& p = gens.params;
  if (history.empty() || static_cast<int>(history.size()) > p.window_blocks()) {
    throw std::domain_error("encode_block: history must hold 1..L+1 source blocks");
  }
  const std::size_t payload = history[0].empty() ? 0 : history[0][0].size();
  for (const auto& blk : history) {
    if (static_cast<int>(blk.size()) != p.k) throw std::domain_error("encode_block: source block must have k packets");
    for (const auto& pkt : blk)
      if (pkt.size() != payload) throw std::domain_error("encode_block: packet payload lengths differ");
  }

  const Field f = gens.field();
  Block out(history[0]);
  out.resize(p.n, Packet(payload));
  for (std::size_t l = 0; l < history.size(); ++l) {
    const Matrix& pl = gens.parity[l];
    for (int t = 0; t < p.k; ++t) {
      const Packet& src = history[l][t];
      for (int c = 0; c < p.redundancy(); ++c) {
        const FieldElem coef = pl.at(t, c);
        if (coef.value == 0) continue;
        Packet& dst = out[p.k + c];
        for (std::size_t s = 0; s < payload; ++s) dst[s] = f.add(dst[s], f.mul(coef, src[s]));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

std::optional<int> decodable_by_count(std::span<const int> counts, const CodeParams& params) {
  if (static_cast<int>(counts.size()) > params.window_blocks()) {
    throw std::domain_error("decodable_by_count: more than L+1 erasure counts");
  }
  int total = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] < 0 || counts[l] > params.n) throw std::domain_error("decodable_by_count: count outside [0, n]");
    total += counts[l];
    if (total <= static_cast<int>(l + 1) * params.redundancy()) return static_cast<int>(l);
  }
  return std::nullopt;
}

std::optional<Block> window_decode(std::span<const Block> received, const ErasurePattern& erasures,
                                   const GeneratorSet& gens, std::span<const Block> known_history) {
  const auto& p = gens.params;
  const int window = static_cast<int>(received.size());
  if (window < 1 || window > p.window_blocks()) throw std::domain_error("window_decode: window must span 1..L+1 blocks");
  if (erasures.blocks() != window || erasures.packets_per_block() != p.n) {
    throw std::domain_error("window_decode: erasure pattern does not match window");
  }
  for (const auto& blk : received)
    if (static_cast<int>(blk.size()) != p.n) throw std::domain_error("window_decode: coded block must have n packets");

  const std::size_t payload = [&]() -> std::size_t {
    for (int j = 0; j < window; ++j)
      for (int i = 0; i < p.n; ++i)
        if (!erasures.erased(j, i)) return received[j][i].size();
    return 0;
  }();

  Block target(p.k);
  bool target_complete = true;
  for (int t = 0; t < p.k; ++t) {
    if (erasures.erased(0, t)) {
      target_complete = false;
    } else {
      target[t] = received[0][t];
    }
  }
  if (target_complete) return target;

  // Unknowns: erased source symbols anywhere in the window; target ones come first.
  std::vector<std::vector<int>> unknown_id(window, std::vector<int>(p.k, -1));
  int unknowns = 0;
  for (int j = 0; j < window; ++j)
    for (int t = 0; t < p.k; ++t)
      if (erasures.erased(j, t)) unknown_id[j][t] = unknowns++;
  const Field f = gens.field();
  const Packet zero_packet(payload);
  auto source_symbol = [&](int block, int t) -> const Packet& {
    if (block >= 0) return received[block][t];
    const std::size_t back = static_cast<std::size_t>(-block - 1);
    if (back < known_history.size()) return known_history[back].at(t);
    return zero_packet;
  };

  std::vector<std::vector<FieldElem>> rows;
  for (int j = 0; j < window; ++j) {
    for (int c = 0; c < p.redundancy(); ++c) {
      if (erasures.erased(j, p.k + c)) continue;
      std::vector<FieldElem> row(unknowns + payload);
      const Packet& value = received[j][p.k + c];
      if (value.size() != payload) throw std::domain_error("window_decode: packet payload lengths differ");
      std::copy(value.begin(), value.end(), row.begin() + unknowns);
      for (int l = 0; l <= p.memory; ++l) {
        const int src = j - l;
        for (int t = 0; t < p.k; ++t) {
          const FieldElem coef = gens.parity[l].at(t, c);
          if (coef.value == 0) continue;
          if (src >= 0 && unknown_id[src][t] >= 0) {
            row[unknown_id[src][t]] = f.add(row[unknown_id[src][t]], coef);
          } else {
            const Packet& known = source_symbol(src, t);
            for (std::size_t s = 0; s < payload; ++s) row[unknowns + s] = f.sub(row[unknowns + s], f.mul(coef, known[s]));
          }
        }
      }
      rows.push_back(std::move(row));
    }
  }

  Matrix system(rows.size(), unknowns + payload);
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].begin(), rows[r].end(), system.row(r).begin());
  const auto ech = gf::row_reduce(f, std::move(system), unknowns);

  // Target unknown u is determined iff some reduced row equals the unit vector e_u.
  // Target ids are numbered first and pivots increase, so id u must pivot row u.
  Block decoded = target;
  for (int t = 0; t < p.k; ++t) {
    const int u = unknown_id[0][t];
    if (u < 0) continue;
    if (u >= static_cast<int>(ech.pivots.size()) || static_cast<int>(ech.pivots[u]) != u) return std::nullopt;
    const auto row = ech.reduced.row(u);
    for (int c = u + 1; c < unknowns; ++c)
      if (row[c].value != 0) return std::nullopt;
    decoded[t].assign(row.begin() + unknowns, row.end());
  }
  return decoded;
}

// ---------------------------------------------------------------------------
// MDP verification

namespace {

// Deterministic random source window (with nonzero prior history) and its encoding.
struct ReferenceWindow {
  std::vector<Block> history;  // most recent first
  std::vector<Block> sources;
  std::vector<Block> coded;
};

ReferenceWindow reference_window(const GeneratorSet& gens) {
  const auto& p = gens.params;
  std::mt19937_64 rng(0x5eed0f3d9ULL ^ gens.seed);
  auto random_block = [&] {
    Block b(p.k, Packet(1));
    for (auto& pkt : b) pkt[0] = {static_cast<std::uint8_t>(rng() % p.q)};
    return b;
  };
  ReferenceWindow w;
  w.history.resize(p.memory);
  for (auto& b : w.history) b = random_block();
  w.sources.resize(p.window_blocks());
  for (auto& b : w.sources) b = random_block();
  for (int j = 0; j < p.window_blocks(); ++j) {
    std::vector<Block> h;
    for (int l = 0; l <= p.memory; ++l) {
      const int src = j - l;
      h.push_back(src >= 0 ? w.sources[src] : w.history[-src - 1]);
    }
    w.coded.push_back(encode_block(h, gens));
  }
  return w;
}

void check_budget(const CodeParams& p, const char* what) {
  if (p.window_blocks() * p.n > kMdpExhaustiveBudget) {
    throw BudgetExceeded(std::string(what) + ": (L+1)*n = " + std::to_string(p.window_blocks() * p.n) +
                         " exceeds exhaustive budget of " + std::to_string(kMdpExhaustiveBudget));
  }
}

}  // namespace

MdpReport is_mdp(const GeneratorSet& gens) {
  const auto& p = gens.params;
  check_budget(p, "is_mdp");
  const auto ref = reference_window(gens);

  MdpReport report;
  for (int l = 0; l <= p.memory; ++l) {
    const int blocks = l + 1;
    const int capacity = blocks * p.redundancy();
    const std::span<const Block> window(ref.coded.data(), blocks);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (blocks * p.n)); ++mask) {
      if (std::popcount(mask) > capacity) continue;
      ++report.patterns_checked;
      const auto pattern = ErasurePattern::from_bits(p.n, blocks, mask);
      const auto decoded = window_decode(window, pattern, gens, ref.history);
      if (!decoded || *decoded != ref.sources[0]) {
        report.mdp = false;
        report.counterexample = pattern;
        report.failing_window = l;
        return report;
      }
    }
  }
  return report;
}

AgreementReport compare_decoder_with_count_rule(const GeneratorSet& gens) {
  const auto& p = gens.params;
  check_budget(p, "compare_decoder_with_count_rule");
  const auto ref = reference_window(gens);

  AgreementReport report;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (p.window_blocks() * p.n)); ++mask) {
    const auto pattern = ErasurePattern::from_bits(p.n, p.window_blocks(), mask);
    const bool by_count = decodable_by_count(pattern.counts(), p).has_value();
    const auto decoded = window_decode(ref.coded, pattern, gens, ref.history);
    const bool algebraic = decoded && *decoded == ref.sources[0];
    ++report.patterns;
    if (by_count) ++report.count_decodable;
    if (by_count != algebraic) {
      if (!report.first_disagreement) report.first_disagreement = pattern;
      ++report.disagreements;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON archive

void to_json(nlohmann::json& j, const GeneratorSet& g) {
  j = nlohmann::json::object();
  j["n"] = g.params.n;
  j["k"] = g.params.k;
  j["L"] = g.params.memory;
  j["q"] = g.params.q;
  j["field_polynomial"] = g.field().polynomial();
  j["seed"] = g.seed;
  j["verified"] = g.verified;
  auto& pts = j["points"] = nlohmann::json::array();
  for (auto e : g.points) pts.push_back(e.value);
  auto& par = j["parity"] = nlohmann::json::array();
  for (const auto& m : g.parity) {
    auto rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = nlohmann::json::array();
      for (auto e : m.row(r)) row.push_back(e.value);
      rows.push_back(std::move(row));
    }
    par.push_back(std::move(rows));
  }
}

void from_json(const nlohmann::json& j, GeneratorSet& g) {
  g.params = CodeParams{j.at("n").get<int>(), j.at("k").get<int>(), j.at("L").get<int>(), j.at("q").get<unsigned>()};
  g.params.validate();
  g.seed = j.value("seed", std::uint64_t{0});
  g.verified = j.value("verified", false);
  const Field f = g.field();
  auto elem = [&](const nlohmann::json& v) {
    const auto x = v.get<unsigned>();
    if (x >= f.size()) throw ConstructionError("generator archive: entry outside field");
    return FieldElem{static_cast<std::uint8_t>(x)};
  };
  g.points.clear();
  for (const auto& v : j.at("points")) g.points.push_back(elem(v));
  g.parity.clear();
  const auto& par = j.at("parity");
  if (static_cast<int>(par.size()) != g.params.window_blocks()) {
    throw ConstructionError("generator archive: expected L+1 parity matrices");
  }
  for (const auto& rows : par) {
    if (static_cast<int>(rows.size()) != g.params.k) throw ConstructionError("generator archive: parity must have k rows");
    Matrix m(g.params.k, g.params.redundancy());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(rows[r].size()) != g.params.redundancy()) {
        throw ConstructionError("generator archive: parity must have n-k columns");
      }
      for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = elem(rows[r][c]);
    }
    g.parity.push_back(std::move(m));
  }
}

}  // namespace snc
