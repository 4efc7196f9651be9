#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace fvn {

// Relative tolerance for power comparisons; absorbs accumulation error in
// denominator sums.
inline constexpr double kRelTol = 1e-9;

// a >= b within relative tolerance.
inline bool approx_ge(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return a >= b - kRelTol * scale;
}

// Received powers in decode order (descending), with the noise floor and the
// SINR threshold they are judged against.
struct OrderedPowers {
  std::vector<double> powers;
  double noise_power = 0.0;
  double gamma = 0.0;
};

struct DecodeOutcome {
  std::vector<double> sinrs;
  std::vector<bool> decoded;  // always a prefix of the decode order
  int m_t = 0;
};

// Successive interference cancellation down the decode order. Signal n sees
// all later signals plus any earlier undecoded signals as interference; it is
// decoded iff every earlier signal decoded and its SINR meets gamma.
DecodeOutcome sic_decode(const OrderedPowers& op);

// Sufficient conditions for the whole chain to decode: every consecutive
// power ratio >= 1+gamma, the second-to-last signal clears the last plus
// noise, and the last signal alone clears the noise floor.
bool chain_feasible(const OrderedPowers& op);

// Minimal received powers meeting SINR >= gamma for a fixed decode order,
// assigned back to front: p_M = noise*gamma, p_n = gamma*(sum of later + noise).
// Empty when any minimal power exceeds its cap in p_max_desc.
std::optional<std::vector<double>> min_power_assignment(
    const std::vector<double>& p_max_desc, double noise_power, double gamma);

// Largest number of signals that can decode simultaneously when the strongest
// received power is p_r_1: floor(log(p_r_1/(noise*gamma)) / log(1+gamma) + 1),
// zero when even a lone signal falls below the noise floor requirement.
int max_decodable_count(double p_r_1, double noise_power, double gamma);

double joining_ratio_upper_bound(double p_r_1, double noise_power, double gamma,
                                 int n_total);

}  // namespace fvn
