#pragma once

#include <string>
#include <string_view>

#include "snc/analytic.hpp"

namespace snc {

/// Retransmission scheme for a block of k data packets, at most one retransmission.
///
///   M1  first transmission: k data; retransmission: one parity per missing data packet.
///   M2  first transmission: k data; retransmission: missing + delta parities.
///   M3  first transmission: k data + delta parities; retransmission: the shortfall.
enum class Mode { M1, M2, M3 };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);  // "m1"/"M1", ...; throws std::invalid_argument

struct ModeConfig {
  Mode mode = Mode::M1;
  int k = 1;
  int delta = 0;  // extra redundant packets; must be 0 for M1
  int n_re = 0;   // feedback (round-trip) latency in packet slots
  int max_retx = 1;

  // Throws std::domain_error on k < 1, delta < 0, n_re < 0, delta != 0 under M1,
  // or max_retx != 1.
  void validate() const;

  friend bool operator==(const ModeConfig&, const ModeConfig&) = default;
};

std::string to_string(const ModeConfig& cfg);

/// Probability that the block is recovered without sliding-window help.
/// M3 uses the direct sum over the number of first-transmission losses.
double mode_success(const ModeConfig& cfg, double epsilon);

/// M3 success in its closed form
/// F(delta; k+delta, eps) + (1-eps)^k (1+eps)^(k+delta) F(k-1; k+delta, 1/(1+eps)).
double m3_success_closed_form(int k, int delta, double epsilon);

/// Expected number of packets sent per block (first transmission + retransmission).
double mode_avg_code_length(const ModeConfig& cfg, double epsilon);

/// Latency pmf of data packet p (1-based) given the other k-1 data packets' losses.
LatencyDistribution mode_latency_dist(const ModeConfig& cfg, double epsilon, int p);

double mode_avg_latency(const ModeConfig& cfg, double epsilon);

}  // namespace snc
