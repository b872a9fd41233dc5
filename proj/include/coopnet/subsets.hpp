#pragma once

#include <cstdint>
#include <vector>

#include "coopnet/scenario.hpp"

namespace coopnet {

// A subset of the N+1 success events {direct, relay 1, ..., relay N} used by
// the inclusion-exclusion sum. The empty subset has probability 1 by
// convention.
struct SubsetMask {
  bool includes_direct = false;
  std::uint32_t relay_bits = 0;

  int cardinality() const { return (includes_direct ? 1 : 0) + __builtin_popcount(relay_bits); }
  bool empty() const { return !includes_direct && relay_bits == 0; }
  bool has_relay(int k) const { return (relay_bits >> k) & 1u; }

  std::vector<int> relay_indices() const {
    std::vector<int> out;
    for (int k = 0; k < 32; ++k)
      if (has_relay(k)) out.push_back(k);
    return out;
  }

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;
  friend bool operator<(const SubsetMask& a, const SubsetMask& b) {
    if (a.includes_direct != b.includes_direct) return b.includes_direct;
    return a.relay_bits < b.relay_bits;
  }
};

// Relays sharing a position are interchangeable in every joint-probability
// formula, so subsets are enumerated per (group, count) and weighted by the
// number of index subsets collapsing onto each representative. This is what
// keeps the clustered-relay sweeps cheap and exact.
struct RelayGroup {
  Position pos;
  int multiplicity = 0;
  std::vector<int> member_indices;
};

std::vector<RelayGroup> group_relays(const Scenario& scenario);

struct GroupedSubset {
  bool includes_direct = false;
  std::vector<int> counts;    // aligned with the group list
  double multiplicity = 1.0;  // product of binomial coefficients

  int total_relays() const;
  int cardinality() const { return (includes_direct ? 1 : 0) + total_relays(); }
  // Lowest-index representative: the first `count` members of each group.
  SubsetMask representative(const std::vector<RelayGroup>& groups) const;
};

// All distinct subsets (by symmetry class), optionally including the empty
// one. Deterministic order: direct flag ascending, then counts in odometer
// order.
std::vector<GroupedSubset> enumerate_grouped_subsets(const std::vector<RelayGroup>& groups,
                                                     bool include_empty = false);

// Multiplicity-aware counts for a concrete index subset.
std::vector<int> counts_for_mask(const std::vector<RelayGroup>& groups, const SubsetMask& mask);

}  // namespace coopnet
