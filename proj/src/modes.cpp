#include "snc/modes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace snc {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::M1: return "m1";
    case Mode::M2: return "m2";
    case Mode::M3: return "m3";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "m1" || s == "M1") return Mode::M1;
  if (s == "m2" || s == "M2") return Mode::M2;
  if (s == "m3" || s == "M3") return Mode::M3;
  throw std::invalid_argument("unknown retransmission mode '" + std::string(s) + "'");
}

void ModeConfig::validate() const {
  if (k < 1) throw std::domain_error("mode config: k must be >= 1");
  if (delta < 0) throw std::domain_error("mode config: delta must be >= 0");
  if (n_re < 0) throw std::domain_error("mode config: N_Re must be >= 0");
  if (mode == Mode::M1 && delta != 0) throw std::domain_error("mode config: M1 carries no extra redundancy (delta = 0)");
  if (max_retx != 1) throw std::domain_error("mode config: exactly one retransmission round is supported");
}

std::string to_string(const ModeConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.mode) << "(k=" << cfg.k << ", delta=" << cfg.delta << ", N_Re=" << cfg.n_re << ")";
  return os.str();
}

double mode_success(const ModeConfig& cfg, double epsilon) {
  cfg.validate();
  check_erasure_probability(epsilon);
  const int k = cfg.k;
  const int delta = cfg.delta;
  switch (cfg.mode) {
    case Mode::M1:
      return std::pow(1.0 - epsilon * epsilon, k);
    case Mode::M2: {
      // r data lost, r + delta parities resent, at most delta of them may be lost
      double s = 0.0;
      for (int r = 0; r <= k; ++r) s += binom_pmf(r, k, epsilon) * binom_cdf(delta, r + delta, epsilon);
      return s;
    }
    case Mode::M3: {
      const int sent = k + delta;
      double s = 0.0;
      for (int r = 0; r <= sent; ++r) {
        const double lost = binom_pmf(r, sent, epsilon);
        s += r <= delta ? lost : std::pow(1.0 - epsilon, r - delta) * lost;
      }
      return s;
    }
  }
  return 0.0;
}

double m3_success_closed_form(int k, int delta, double epsilon) {
  check_erasure_probability(epsilon);
  const double eps_hat = 1.0 / (1.0 + epsilon);
  return binom_cdf(delta, k + delta, epsilon) +
         std::pow(1.0 - epsilon, k) * std::pow(1.0 + epsilon, k + delta) * binom_cdf(k - 1, k + delta, eps_hat);
}

double mode_avg_code_length(const ModeConfig& cfg, double epsilon) {
  cfg.validate();
  check_erasure_probability(epsilon);
  const double k = cfg.k;
  const double delta = cfg.delta;
  switch (cfg.mode) {
    case Mode::M1:
      return k + epsilon * k;
    case Mode::M2:
      return k + delta + epsilon * k - delta * std::pow(1.0 - epsilon, cfg.k);
    case Mode::M3: {
      double s = k + epsilon * (k + delta);
      for (int r = 0; r <= cfg.delta; ++r) s += (cfg.delta - r) * binom_pmf(r, cfg.k + cfg.delta, epsilon);
      return s;
    }
  }
  return 0.0;
}

LatencyDistribution mode_latency_dist(const ModeConfig& cfg, double epsilon, int p) {
  cfg.validate();
  check_erasure_probability(epsilon);
  const int k = cfg.k;
  if (p < 1 || p > k) throw std::domain_error("mode_latency_dist: packet index outside [1, k]");
  LatencyDistribution dist;
  dist.add(0, 1.0 - epsilon);
  for (int r = 0; r <= k - 1; ++r) {
    const double m = epsilon * binom_pmf(r, k - 1, epsilon);
    switch (cfg.mode) {
      case Mode::M1:
        dist.add(k + r + 1 + cfg.n_re - p, m);
        break;
      case Mode::M2:
        dist.add(k + cfg.delta + r + 1 + cfg.n_re - p, m);
        break;
      case Mode::M3:
        if (r < cfg.delta) {
          dist.add(k + cfg.delta - p, m);
        } else {
          dist.add(k + r + 1 + cfg.n_re - p - cfg.delta, m);
        }
        break;
    }
  }
  return dist;
}

double mode_avg_latency(const ModeConfig& cfg, double epsilon) {
  std::vector<LatencyDistribution> dists;
  for (int p = 1; p <= cfg.k; ++p) dists.push_back(mode_latency_dist(cfg, epsilon, p));
  return avg_packet_latency(dists);
}

}  // namespace snc
