#include "snc/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "snc/error.hpp"

namespace snc {

namespace {

void check_shape(const CodeParams& p) {
  if (p.k < 1 || p.k > p.n || p.memory < 0) throw std::domain_error("invalid code shape " + to_string(p));
}

}  // namespace

void check_erasure_probability(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("erasure probability must lie in [0, 1], got " + std::to_string(epsilon));
  }
}

void LatencyDistribution::add(int d, double p) {
  if (p != 0.0) mass_[d] += p;
}

double LatencyDistribution::at(int d) const {
  const auto it = mass_.find(d);
  return it == mass_.end() ? 0.0 : it->second;
}

double LatencyDistribution::mean() const {
  double m = 0.0;
  for (const auto& [d, p] : mass_) m += d * p;
  return m;
}

double LatencyDistribution::total() const {
  double t = 0.0;
  for (const auto& [d, p] : mass_) t += p;
  return t;
}

double binom_pmf(int r, int n, double epsilon) {
  if (n < 0) throw std::domain_error("binom_pmf: negative trial count");
  check_erasure_probability(epsilon);
  if (r < 0 || r > n) return 0.0;
  if (epsilon == 0.0) return r == 0 ? 1.0 : 0.0;
  if (epsilon == 1.0) return r == n ? 1.0 : 0.0;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
  return std::exp(log_choose + r * std::log(epsilon) + (n - r) * std::log1p(-epsilon));
}

double binom_cdf(int m, int n, double epsilon) {
  if (n < 0) throw std::domain_error("binom_cdf: negative trial count");
  check_erasure_probability(epsilon);
  if (m < 0) return 0.0;
  if (m >= n) return 1.0;
  double s = 0.0;
  for (int r = 0; r <= m; ++r) s += binom_pmf(r, n, epsilon);
  return s;
}

WindowSuccessTerms snc_success_exact(const CodeParams& params, double epsilon) {
  check_shape(params);
  check_erasure_probability(epsilon);
  if (params.memory > kExactMaxMemory || params.n > kExactMaxBlockLength) {
    throw BudgetExceeded("snc_success_exact: exact evaluation limited to L <= " + std::to_string(kExactMaxMemory) +
                         " and n <= " + std::to_string(kExactMaxBlockLength) + ", got " + to_string(params));
  }
  const int n = params.n;
  const int r = params.redundancy();
  std::vector<double> pmf(n + 1);
  for (int d = 0; d <= n; ++d) pmf[d] = binom_pmf(d, n, epsilon);

  // alive[s]: probability that every window so far failed with s cumulative erasures.
  std::vector<double> alive(1, 1.0);
  WindowSuccessTerms out;
  for (int l = 0; l <= params.memory; ++l) {
    const int capacity = (l + 1) * r;
    std::vector<double> next(alive.size() + n, 0.0);
    double term = 0.0;
    for (std::size_t s = 0; s < alive.size(); ++s) {
      if (alive[s] == 0.0) continue;
      for (int d = 0; d <= n; ++d) {
        const double m = alive[s] * pmf[d];
        if (static_cast<int>(s) + d <= capacity) {
          term += m;
        } else {
          next[s + d] += m;
        }
      }
    }
    out.terms.push_back(term);
    out.total += term;
    alive = std::move(next);
  }
  return out;
}

double snc_success_lower_bound(const CodeParams& params, double epsilon) {
  check_shape(params);
  const int n = params.n;
  const int r = params.redundancy();
  const int window_capacity = params.window_blocks() * r;
  double s = binom_cdf(r, n, epsilon);
  for (int d0 = r + 1; d0 <= n; ++d0) {
    s += binom_pmf(d0, n, epsilon) * binom_cdf(window_capacity - d0, params.memory * n, epsilon);
  }
  return s;
}

double comparable_long_bc_success(const CodeParams& params, double epsilon) {
  check_shape(params);
  return binom_cdf(params.window_blocks() * params.redundancy(), params.window_blocks() * params.n, epsilon);
}

double short_bc_success(const CodeParams& params, double epsilon) {
  check_shape(params);
  return binom_cdf(params.redundancy(), params.n, epsilon);
}

LatencyDistribution snc_latency_dist(const CodeParams& params, double epsilon, int p) {
  check_shape(params);
  if (p < 1 || p > params.k) throw std::domain_error("snc_latency_dist: packet index outside [1, k]");
  const auto terms = snc_success_exact(params, epsilon);
  const int L = params.memory;
  LatencyDistribution dist;
  dist.add(0, 1.0 - epsilon);
  double decoded = 0.0;
  for (int l = 0; l < L; ++l) {
    dist.add((l + 1) * params.n - p, epsilon * terms.terms[l]);
    decoded += terms.terms[l];
  }
  dist.add((L + 1) * params.n - p, epsilon * (1.0 - decoded));
  return dist;
}

LatencyDistribution bc_latency_dist(int n_bc, int k_bc, double epsilon, int p) {
  check_erasure_probability(epsilon);
  if (k_bc < 1 || k_bc > n_bc) throw std::domain_error("bc_latency_dist: invalid block code shape");
  if (p < 1 || p > k_bc) throw std::domain_error("bc_latency_dist: packet index outside [1, k]");
  LatencyDistribution dist;
  dist.add(0, 1.0 - epsilon);
  dist.add(n_bc - p, epsilon);
  return dist;
}

double avg_packet_latency(std::span<const LatencyDistribution> dists) {
  if (dists.empty()) throw std::domain_error("avg_packet_latency: no distributions");
  double s = 0.0;
  for (const auto& d : dists) s += d.mean();
  return s / static_cast<double>(dists.size());
}

double snc_avg_latency(const CodeParams& params, double epsilon) {
  std::vector<LatencyDistribution> dists;
  for (int p = 1; p <= params.k; ++p) dists.push_back(snc_latency_dist(params, epsilon, p));
  return avg_packet_latency(dists);
}

double bc_avg_latency(int n_bc, int k_bc, double epsilon) {
  std::vector<LatencyDistribution> dists;
  for (int p = 1; p <= k_bc; ++p) dists.push_back(bc_latency_dist(n_bc, k_bc, epsilon, p));
  return avg_packet_latency(dists);
}

}  // namespace snc
