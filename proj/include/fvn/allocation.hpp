#pragma once

#include <vector>

#include "fvn/channel.hpp"
#include "fvn/noma.hpp"

namespace fvn {

// Powers for the selected vehicles, kept in decode order (descending received
// power; ties broken by ascending vehicle id).
struct PowerAllocation {
  std::vector<int> order;        // vehicle ids in decode order
  std::vector<double> received;  // assigned p^r, watts
  std::vector<double> transmit;  // p^t = p^r / gain, watts
  std::vector<double> surplus;   // unused headroom recorded during selection
};

struct SelectionResult {
  std::vector<int> selected;  // = allocation.order
  PowerAllocation allocation;
  int m_t = 0;
  double joining_ratio = 0.0;
};

// Greedy selection with power control: the strongest vehicle transmits at full
// power, each subsequent vehicle aims for the chain target p_prev/(1+gamma),
// and budget shortfalls are redistributed to earlier surplus holders when
// `redistribute` is on. The returned selection always decodes fully under SIC.
SelectionResult select_and_allocate(const ChannelSnapshot& snap, double gamma,
                                    bool redistribute = true);

// Single strongest vehicle at full power, or nobody.
SelectionResult oma_select(const ChannelSnapshot& snap, double gamma);

// All-or-nothing: the minimal assignment over the full vehicle set, or outage.
SelectionResult full_set_allocate(const ChannelSnapshot& snap, double gamma);

// Exhaustive maximum-cardinality feasible subset; ties resolved toward the
// lexicographically smallest id set. Desk-scale ground truth only.
SelectionResult oracle_max_selection(const ChannelSnapshot& snap, double gamma,
                                     int n_limit = 8);

}  // namespace fvn
