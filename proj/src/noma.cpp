#include "fvn/noma.hpp"

#include <numeric>
#include <stdexcept>

namespace fvn {

namespace {

void validate(const OrderedPowers& op) {
  if (op.noise_power <= 0.0)
    throw std::invalid_argument("OrderedPowers: noise_power must be > 0");
  if (op.gamma <= 0.0) throw std::invalid_argument("OrderedPowers: gamma must be > 0");
  for (std::size_t i = 0; i < op.powers.size(); ++i) {
    if (op.powers[i] <= 0.0)
      throw std::invalid_argument("OrderedPowers: powers must be > 0");
    if (i > 0 && !approx_ge(op.powers[i - 1], op.powers[i]))
      throw std::invalid_argument("OrderedPowers: powers must be nonincreasing");
  }
}

}  // namespace

DecodeOutcome sic_decode(const OrderedPowers& op) {
  validate(op);
  const std::size_t m = op.powers.size();
  DecodeOutcome out;
  out.sinrs.resize(m);
  out.decoded.assign(m, false);

  double tail = std::accumulate(op.powers.begin(), op.powers.end(), 0.0);
  double undecoded_before = 0.0;
  bool prefix_clean = true;
  for (std::size_t n = 0; n < m; ++n) {
    tail -= op.powers[n];
    double denom = tail + undecoded_before + op.noise_power;
    double sinr = op.powers[n] / denom;
    out.sinrs[n] = sinr;
    bool ok = prefix_clean && approx_ge(sinr, op.gamma);
    out.decoded[n] = ok;
    if (ok) {
      ++out.m_t;
    } else {
      prefix_clean = false;
      undecoded_before += op.powers[n];
    }
  }
  return out;
}

bool chain_feasible(const OrderedPowers& op) {
  validate(op);
  const std::size_t m = op.powers.size();
  if (m == 0) return false;
  double noise_floor = op.noise_power * op.gamma;
  if (!approx_ge(op.powers[m - 1], noise_floor)) return false;
  if (m == 1) return true;
  if (!approx_ge(op.powers[m - 2],
                 (op.powers[m - 1] + op.noise_power) * op.gamma))
    return false;
  for (std::size_t n = 0; n + 1 < m; ++n) {
    if (!approx_ge(op.powers[n], op.powers[n + 1] * (1.0 + op.gamma))) return false;
  }
  return true;
}

std::optional<std::vector<double>> min_power_assignment(
    const std::vector<double>& p_max_desc, double noise_power, double gamma) {
  for (double p : p_max_desc)
    if (p <= 0.0)
      throw std::invalid_argument("min_power_assignment: caps must be > 0");
  if (noise_power <= 0.0 || gamma <= 0.0)
    throw std::invalid_argument("min_power_assignment: noise/gamma must be > 0");

  const std::size_t m = p_max_desc.size();
  std::vector<double> assigned(m);
  double tail = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    double need = gamma * (tail + noise_power);
    if (!approx_ge(p_max_desc[k], need)) return std::nullopt;
    assigned[k] = need;
    tail += need;
  }
  return assigned;
}

int max_decodable_count(double p_r_1, double noise_power, double gamma) {
  if (p_r_1 <= 0.0) throw std::invalid_argument("max_decodable_count: p_r_1 must be > 0");
  double noise_floor = noise_power * gamma;
  if (!approx_ge(p_r_1, noise_floor)) return 0;
  double levels = std::log(p_r_1 / noise_floor) / std::log1p(gamma) + 1.0;
  return static_cast<int>(std::floor(levels + kRelTol * levels));
}

double joining_ratio_upper_bound(double p_r_1, double noise_power, double gamma,
                                 int n_total) {
  if (n_total < 1)
    throw std::invalid_argument("joining_ratio_upper_bound: n_total must be >= 1");
  int count = max_decodable_count(p_r_1, noise_power, gamma);
  return std::min(1.0, static_cast<double>(count) / static_cast<double>(n_total));
}

}  // namespace fvn
