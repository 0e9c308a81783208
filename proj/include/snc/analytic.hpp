#pragma once

#include <map>
#include <span>
#include <vector>

#include "snc/code.hpp"

namespace snc {

// Throws std::domain_error unless 0 <= epsilon <= 1.
void check_erasure_probability(double epsilon);

/// Finite probability mass function over integer latencies, in packet slots.
class LatencyDistribution {
 public:
  // Adds `p` to the mass at latency `d`. Coinciding support points merge and zero
  // masses are not stored.
  void add(int d, double p);

  double at(int d) const;
  double mean() const;
  double total() const;

  const std::map<int, double>& mass() const { return mass_; }

 private:
  std::map<int, double> mass_;
};

/// Per-window increments of the first-block success probability: terms[l] is the
/// probability that the smallest decoding window is l + 1 blocks.
struct WindowSuccessTerms {
  std::vector<double> terms;
  double total = 0.0;
};

/// f(r; n, eps) = C(n, r) (1-eps)^(n-r) eps^r, evaluated in the log domain.
/// Returns 0 for r outside [0, n]; throws std::domain_error for n < 0.
double binom_pmf(int r, int n, double epsilon);

/// F(m; n, eps) = sum_{r <= m} f(r; n, eps); 0 for m < 0 and 1 for m >= n.
double binom_cdf(int m, int n, double epsilon);

constexpr int kExactMaxMemory = 4;
constexpr int kExactMaxBlockLength = 30;

/// Exact first-block success probability of an (n, k, L) code under the count rule.
///
/// Evaluated by dynamic programming over (window index, cumulative erasures): the
/// state after block l holds the mass of erasure sequences that failed every shorter
/// window. Throws BudgetExceeded for L > kExactMaxMemory or n > kExactMaxBlockLength.
WindowSuccessTerms snc_success_exact(const CodeParams& params, double epsilon);

/// F(n-k; n) + sum_{d0 = n-k+1..n} f(d0; n) F((L+1)(n-k) - d0; L n).
double snc_success_lower_bound(const CodeParams& params, double epsilon);

/// Block success of the ((L+1)n, (L+1)k) RS block code: F((L+1)(n-k); (L+1)n).
double comparable_long_bc_success(const CodeParams& params, double epsilon);

/// Block success of the (n, k) RS block code: F(n-k; n).
double short_bc_success(const CodeParams& params, double epsilon);

/// Latency of data packet p (1-based) of a systematic sliding-window code.
///
/// Mass 1-eps at 0, eps*terms[l] at (l+1)n - p for l < L, and the remainder
/// eps*(1 - sum_{l<L} terms[l]) at (L+1)n - p. The last support point therefore
/// also carries the undecodable events.
LatencyDistribution snc_latency_dist(const CodeParams& params, double epsilon, int p);

/// Latency of data packet p of an (n_bc, k_bc) block code: 1-eps at 0, eps at n_bc - p.
LatencyDistribution bc_latency_dist(int n_bc, int k_bc, double epsilon, int p);

/// Mean of the per-packet mean latencies.
double avg_packet_latency(std::span<const LatencyDistribution> dists);

double snc_avg_latency(const CodeParams& params, double epsilon);
double bc_avg_latency(int n_bc, int k_bc, double epsilon);

}  // namespace snc
