#include "fvn/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fvn {

namespace {

std::vector<int> decode_order(const ChannelSnapshot& snap) {
  std::vector<int> order(static_cast<std::size_t>(snap.p_r_max.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (snap.p_r_max[a] != snap.p_r_max[b]) return snap.p_r_max[a] > snap.p_r_max[b];
    return a < b;
  });
  return order;
}

SelectionResult empty_result() { return SelectionResult{}; }

SelectionResult finalize(const ChannelSnapshot& snap, std::vector<int> ids,
                         std::vector<double> received, std::vector<double> surplus) {
  SelectionResult res;
  res.allocation.order = ids;
  res.allocation.received = std::move(received);
  res.allocation.surplus = std::move(surplus);
  res.allocation.transmit.resize(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k)
    res.allocation.transmit[k] =
        res.allocation.received[k] / snap.gains[ids[k]];
  res.selected = std::move(ids);
  res.m_t = static_cast<int>(res.selected.size());
  res.joining_ratio =
      static_cast<double>(res.m_t) / static_cast<double>(snap.p_r_max.size());
  return res;
}

bool fully_decodes(const std::vector<double>& received, double noise_power,
                   double gamma) {
  if (received.empty()) return true;
  std::vector<double> sorted = received;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  DecodeOutcome out = sic_decode(OrderedPowers{sorted, noise_power, gamma});
  return out.m_t == static_cast<int>(sorted.size());
}

}  // namespace

SelectionResult select_and_allocate(const ChannelSnapshot& snap, double gamma,
                                    bool redistribute) {
  if (gamma <= 0.0)
    throw std::invalid_argument("select_and_allocate: gamma must be > 0");
  const double noise_floor = snap.noise_power * gamma;
  const double zero_tol = 1e-12 * snap.noise_power;
  std::vector<int> order = decode_order(snap);
  if (order.empty() || !approx_ge(snap.p_r_max[order[0]], noise_floor))
    return empty_result();

  std::vector<int> ids{order[0]};
  std::vector<double> received{snap.p_r_max[order[0]]};
  std::vector<double> surplus{0.0};
  std::vector<std::size_t> holders;  // FIFO indices into the arrays above
  std::size_t head = 0;

  for (std::size_t k = 1; k < order.size(); ++k) {
    double target = received.back() / (gamma + 1.0);
    if (target <= noise_floor) break;
    double cap = snap.p_r_max[order[k]];
    if (target < cap) {
      // Headroom left; record it for later redistribution.
      ids.push_back(order[k]);
      received.push_back(target);
      surplus.push_back(cap - target);
      if (surplus.back() > zero_tol) holders.push_back(ids.size() - 1);
    } else {
      if (!approx_ge(cap, noise_floor)) break;  // admission guard
      ids.push_back(order[k]);
      received.push_back(cap);
      surplus.push_back(0.0);
      double deficit = target - cap;
      if (redistribute) {
        // Offer the deficit to earlier surplus holders, FIFO. Each absorbs up
        // to its own headroom, capped at deficit*(1+1/gamma) in one shot.
        while (head < holders.size() && deficit > zero_tol) {
          std::size_t j = holders[head];
          double absorb_cap = deficit * (1.0 + 1.0 / gamma);
          if (surplus[j] > absorb_cap) {
            received[j] += absorb_cap;
            surplus[j] -= absorb_cap;
            deficit = 0.0;
          } else {
            received[j] += surplus[j];
            deficit -= surplus[j] * gamma / (1.0 + gamma);
            surplus[j] = 0.0;
            ++head;
          }
        }
      }
    }
  }

  SelectionResult res = finalize(snap, std::move(ids), std::move(received),
                                 std::move(surplus));
  if (!fully_decodes(res.allocation.received, snap.noise_power, gamma))
    throw std::logic_error("select_and_allocate: allocation failed SIC check");
  return res;
}

SelectionResult oma_select(const ChannelSnapshot& snap, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("oma_select: gamma must be > 0");
  std::vector<int> order = decode_order(snap);
  if (order.empty() ||
      !approx_ge(snap.p_r_max[order[0]], snap.noise_power * gamma))
    return empty_result();
  return finalize(snap, {order[0]}, {snap.p_r_max[order[0]]}, {0.0});
}

SelectionResult full_set_allocate(const ChannelSnapshot& snap, double gamma) {
  if (gamma <= 0.0)
    throw std::invalid_argument("full_set_allocate: gamma must be > 0");
  std::vector<int> order = decode_order(snap);
  std::vector<double> caps;
  caps.reserve(order.size());
  for (int id : order) caps.push_back(snap.p_r_max[id]);
  auto assigned = min_power_assignment(caps, snap.noise_power, gamma);
  if (!assigned) return empty_result();
  std::vector<double> surplus(order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    surplus[k] = caps[k] - (*assigned)[k];
  return finalize(snap, std::move(order), std::move(*assigned), std::move(surplus));
}

SelectionResult oracle_max_selection(const ChannelSnapshot& snap, double gamma,
                                     int n_limit) {
  if (gamma <= 0.0)
    throw std::invalid_argument("oracle_max_selection: gamma must be > 0");
  const int n = static_cast<int>(snap.p_r_max.size());
  if (n > n_limit)
    throw std::invalid_argument("oracle_max_selection: instance exceeds n_limit");

  std::vector<int> best_ids;
  std::vector<double> best_powers;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) subset.push_back(i);
    if (static_cast<int>(subset.size()) < static_cast<int>(best_ids.size()))
      continue;
    std::stable_sort(subset.begin(), subset.end(), [&](int a, int b) {
      if (snap.p_r_max[a] != snap.p_r_max[b])
        return snap.p_r_max[a] > snap.p_r_max[b];
      return a < b;
    });
    std::vector<double> caps;
    caps.reserve(subset.size());
    for (int id : subset) caps.push_back(snap.p_r_max[id]);
    auto assigned = min_power_assignment(caps, snap.noise_power, gamma);
    if (!assigned) continue;
    bool better = subset.size() > best_ids.size();
    if (!better && subset.size() == best_ids.size()) {
      std::vector<int> a = subset, b = best_ids;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      better = a < b;
    }
    if (better) {
      best_ids = std::move(subset);
      best_powers = std::move(*assigned);
    }
  }
  if (best_ids.empty()) return empty_result();
  std::vector<double> surplus(best_ids.size());
  for (std::size_t k = 0; k < best_ids.size(); ++k)
    surplus[k] = snap.p_r_max[best_ids[k]] - best_powers[k];
  return finalize(snap, std::move(best_ids), std::move(best_powers),
                  std::move(surplus));
}

}  // namespace fvn
