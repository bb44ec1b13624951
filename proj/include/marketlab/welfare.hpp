#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The marketlab authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "marketlab/types.hpp"

namespace marketlab {

struct WelfareResult {
  long long best_value = 0;
  Allocation allocation;
};

// Tie-breaking among welfare-equal allocations is fixed everywhere in
// this library: encode an allocation as the per-buyer vector of
// assigned item indices with "unmatched" sorting after every item, and
// pick the lexicographically smallest optimal vector.  Payments can
// depend on which optimum is chosen, so determinism here is what keeps
// golden outputs stable.

inline long long matching_welfare(const MatchingInstance& inst,
                                  const Matching& m) {
  long long w = 0;
  for (int i = 0; i < m.size(); ++i)
    if (m.matched(i)) w += inst.value(i, m.item_of[i]);
  return w;
}

inline long long allocation_value(const SingleMindedInstance& inst,
                                  const BundleAllocation& a) {
  long long w = 0;
  for (int b : a.winners) w += inst.bids[b].value;
  return w;
}

inline long long allocation_value(const Instance& inst, const Allocation& a) {
  if (const auto* m = std::get_if<MatchingInstance>(&inst))
    return matching_welfare(*m, std::get<Matching>(a));
  return allocation_value(std::get<SingleMindedInstance>(inst),
                          std::get<BundleAllocation>(a));
}

namespace detail {

inline std::uint32_t buyer_mask(const std::vector<int>& buyers, int n,
                                const char* what) {
  std::uint32_t mask = 0;
  for (int i : buyers) {
    if (i < 0 || i >= n)
      throw std::invalid_argument(std::string(what) + " index out of range");
    mask |= 1u << i;
  }
  return mask;
}

}  // namespace detail

// Exact maximum-weight matching, excluded buyers deleted outright.
// DP over the set of used items: g[i][S] is the best welfare buyers
// i..n-1 can add when the items in S are gone.  m <= 16 keeps the
// table at most 2^16 wide.
inline WelfareResult max_welfare_matching(const MatchingInstance& inst,
                                          const std::vector<int>& excluded = {}) {
  const int n = inst.n_buyers;
  const int m = inst.n_items;
  if (m > kMaxMatchingSide || n > kMaxMatchingSide)
    throw std::invalid_argument("matching instance exceeds size cap");
  const std::uint32_t excl = detail::buyer_mask(excluded, n, "excluded buyer");

  const std::uint32_t full = 1u << m;
  std::vector<long long> g(static_cast<std::size_t>(n + 1) * full, 0);
  auto at = [&](int i, std::uint32_t s) -> long long& {
    return g[static_cast<std::size_t>(i) * full + s];
  };

  for (int i = n - 1; i >= 0; --i) {
    for (std::uint32_t s = 0; s < full; ++s) {
      long long best = at(i + 1, s);
      if (!(excl & (1u << i))) {
        for (int j = 0; j < m; ++j) {
          if (s & (1u << j)) continue;
          long long cand = inst.value(i, j) + at(i + 1, s | (1u << j));
          best = std::max(best, cand);
        }
      }
      at(i, s) = best;
    }
  }

  Matching matching;
  matching.item_of.assign(n, Matching::kUnmatched);
  std::uint32_t used = 0;
  for (int i = 0; i < n; ++i) {
    if (excl & (1u << i)) continue;
    const long long need = at(i, used);
    for (int j = 0; j < m; ++j) {
      if (used & (1u << j)) continue;
      if (inst.value(i, j) + at(i + 1, used | (1u << j)) == need) {
        matching.item_of[i] = j;
        used |= 1u << j;
        break;
      }
    }
    // falls through to unmatched only when no item preserves optimality
  }

  WelfareResult res;
  res.best_value = at(0, 0);
  res.allocation = std::move(matching);
  return res;
}

namespace detail {

// Branch and bound for single-minded winner determination.  Bids are
// visited in descending-value order; the bound is the sum of the values
// still reachable below the current node.
class BundleSearch {
 public:
  explicit BundleSearch(const SingleMindedInstance& inst) : inst_(inst) {
    order_.resize(inst.bids.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return inst.bids[a].value > inst.bids[b].value;
    });
  }

  // Best total value over winner sets drawn from `allowed` bids that
  // avoid the items in `used`.
  long long best(std::uint32_t allowed, std::uint32_t used) const {
    std::vector<int> live;
    live.reserve(order_.size());
    std::vector<long long> suffix;
    for (int b : order_)
      if (allowed & (1u << b)) live.push_back(b);
    suffix.assign(live.size() + 1, 0);
    for (int k = static_cast<int>(live.size()) - 1; k >= 0; --k)
      suffix[k] = suffix[k + 1] + inst_.bids[live[k]].value;
    long long best_value = 0;
    dfs(live, suffix, 0, used, 0, best_value);
    return best_value;
  }

 private:
  void dfs(const std::vector<int>& live, const std::vector<long long>& suffix,
           std::size_t pos, std::uint32_t used, long long acc,
           long long& best_value) const {
    best_value = std::max(best_value, acc);
    if (pos == live.size()) return;
    if (acc + suffix[pos] <= best_value) return;
    const Bid& bid = inst_.bids[live[pos]];
    if ((bid.bundle & used) == 0)
      dfs(live, suffix, pos + 1, used | bid.bundle, acc + bid.value,
          best_value);
    dfs(live, suffix, pos + 1, used, acc, best_value);
  }

  const SingleMindedInstance& inst_;
  std::vector<int> order_;
};

}  // namespace detail

inline WelfareResult max_welfare_single_minded(
    const SingleMindedInstance& inst, const std::vector<int>& excluded = {}) {
  const int nbids = static_cast<int>(inst.bids.size());
  if (nbids > 31)
    throw std::invalid_argument("single-minded instance exceeds bid cap");
  const std::uint32_t excl =
      detail::buyer_mask(excluded, std::max(nbids, 1), "excluded bid");
  const std::uint32_t all = nbids == 0 ? 0 : (1u << nbids) - 1;

  detail::BundleSearch search(inst);
  const long long opt = search.best(all & ~excl, 0);

  // Extract the lexicographically smallest optimal winner set: walk the
  // bids in index order, keep bid i iff winning it still allows the
  // optimum to be completed.
  BundleAllocation alloc;
  std::uint32_t used = 0;
  std::uint32_t undecided = all & ~excl;
  long long acc = 0;
  for (int b = 0; b < nbids; ++b) {
    if (!(undecided & (1u << b))) continue;
    undecided &= ~(1u << b);
    const Bid& bid = inst.bids[b];
    if (bid.bundle & used) continue;
    if (acc + bid.value + search.best(undecided, used | bid.bundle) == opt) {
      alloc.winners.push_back(b);
      used |= bid.bundle;
      acc += bid.value;
    }
  }

  WelfareResult res;
  res.best_value = opt;
  res.allocation = std::move(alloc);
  return res;
}

inline WelfareResult max_welfare(const Instance& inst,
                                 const std::vector<int>& excluded = {}) {
  if (const auto* m = std::get_if<MatchingInstance>(&inst))
    return max_welfare_matching(*m, excluded);
  return max_welfare_single_minded(std::get<SingleMindedInstance>(inst),
                                   excluded);
}

// ---------------------------------------------------------------------------
// Enumeration oracle.  Lists every feasible partial matching of an
// n x m market; the solvers above are checked against it everywhere.

inline constexpr int kMaxEnumerationSide = 6;

inline void enumerate_matchings_rec(int buyer, int n, int m,
                                    std::uint32_t used, Matching& cur,
                                    std::vector<Matching>& out) {
  if (buyer == n) {
    out.push_back(cur);
    return;
  }
  cur.item_of[buyer] = Matching::kUnmatched;
  enumerate_matchings_rec(buyer + 1, n, m, used, cur, out);
  for (int j = 0; j < m; ++j) {
    if (used & (1u << j)) continue;
    cur.item_of[buyer] = j;
    enumerate_matchings_rec(buyer + 1, n, m, used | (1u << j), cur, out);
  }
  cur.item_of[buyer] = Matching::kUnmatched;
}

inline std::vector<Matching> enumerate_matchings(int n_buyers, int n_items) {
  std::vector<Matching> out;
  Matching cur;
  cur.item_of.assign(n_buyers, Matching::kUnmatched);
  enumerate_matchings_rec(0, n_buyers, n_items, 0, cur, out);
  return out;
}

inline std::vector<std::pair<Matching, long long>> oracle_enumerate_matchings(
    const MatchingInstance& inst) {
  if (inst.n_buyers > kMaxEnumerationSide || inst.n_items > kMaxEnumerationSide)
    throw std::invalid_argument("instance too large for enumeration");
  std::vector<std::pair<Matching, long long>> out;
  for (Matching& m : enumerate_matchings(inst.n_buyers, inst.n_items)) {
    long long w = matching_welfare(inst, m);
    out.emplace_back(std::move(m), w);
  }
  return out;
}

}  // namespace marketlab
