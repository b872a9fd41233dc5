#include "coopnet/subsets.hpp"

#include <numeric>

#include "coopnet/errors.hpp"

namespace coopnet {

std::vector<RelayGroup> group_relays(const Scenario& scenario) {
  std::vector<RelayGroup> groups;
  for (int k = 0; k < scenario.relay_count(); ++k) {
    const Position pos = scenario.relays[k];
    bool found = false;
    for (RelayGroup& g : groups) {
      if (g.pos == pos) {
        ++g.multiplicity;
        g.member_indices.push_back(k);
        found = true;
        break;
      }
    }
    if (!found) groups.push_back({pos, 1, {k}});
  }
  return groups;
}

int GroupedSubset::total_relays() const { return std::accumulate(counts.begin(), counts.end(), 0); }

SubsetMask GroupedSubset::representative(const std::vector<RelayGroup>& groups) const {
  SubsetMask mask;
  mask.includes_direct = includes_direct;
  for (std::size_t g = 0; g < counts.size(); ++g)
    for (int i = 0; i < counts[g]; ++i) mask.relay_bits |= 1u << groups[g].member_indices[i];
  return mask;
}

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

}  // namespace

std::vector<GroupedSubset> enumerate_grouped_subsets(const std::vector<RelayGroup>& groups,
                                                     bool include_empty) {
  std::vector<GroupedSubset> out;
  const std::size_t n_groups = groups.size();
  for (int direct = 0; direct <= 1; ++direct) {
    std::vector<int> counts(n_groups, 0);
    for (;;) {
      GroupedSubset subset;
      subset.includes_direct = direct == 1;
      subset.counts = counts;
      subset.multiplicity = 1.0;
      for (std::size_t g = 0; g < n_groups; ++g)
        subset.multiplicity *= binomial(groups[g].multiplicity, counts[g]);
      if (include_empty || subset.cardinality() > 0) out.push_back(std::move(subset));

      // odometer over group counts
      std::size_t g = 0;
      while (g < n_groups) {
        if (++counts[g] <= groups[g].multiplicity) break;
        counts[g] = 0;
        ++g;
      }
      if (g == n_groups) break;
    }
  }
  return out;
}

std::vector<int> counts_for_mask(const std::vector<RelayGroup>& groups, const SubsetMask& mask) {
  std::vector<int> counts(groups.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int idx : groups[g].member_indices)
      if (mask.has_relay(idx)) ++counts[g];
  return counts;
}

}  // namespace coopnet
