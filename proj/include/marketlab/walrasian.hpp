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

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "marketlab/types.hpp"
#include "marketlab/vcg.hpp"
#include "marketlab/welfare.hpp"

namespace marketlab {

// Walrasian equilibrium of a matching market: item prices plus a
// matching where (a) every buyer ends up with a maximizer of
// value-minus-price at nonnegative utility (unmatched buyers must see
// no positive utility anywhere) and (b) unsold items cost 0.
//
// Prices of integer-valued instances are extremized with pure integer
// arithmetic: the extreme points of the feasible price region are
// integral for integer values (assignment-market dual integrality),
// which the grid oracle below re-validates empirically.

struct WalrasianCertificate {
  PriceVector prices;
  Matching matching;
  std::vector<Rational> demand_slack;  // favorite minus assigned utility
};

struct WalrasianCheck {
  std::vector<std::string> violations;
  std::optional<WalrasianCertificate> certificate;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

struct WalrasianSolution {
  PriceVector prices;
  Matching matching;
};

inline Rational price_revenue(const PriceVector& prices) {
  Rational s;
  for (const auto& p : prices) s += p;
  return s;
}

inline WalrasianCheck check_walrasian(const MatchingInstance& inst,
                                      const PriceVector& prices,
                                      const Matching& matching) {
  WalrasianCheck res;
  auto& bad = res.violations;

  if (static_cast<int>(prices.size()) != inst.n_items)
    bad.push_back("price vector has " + std::to_string(prices.size()) +
                  " entries, expected " + std::to_string(inst.n_items));
  for (std::size_t j = 0; j < prices.size(); ++j)
    if (prices[j] < Rational(0))
      bad.push_back("item " + item_label(static_cast<int>(j)) +
                    ": negative price " + prices[j].str());
  for (auto& v : validate(inst, matching)) bad.push_back(std::move(v));
  if (!bad.empty()) return res;

  std::vector<Rational> slack;
  slack.reserve(inst.n_buyers);
  for (int i = 0; i < inst.n_buyers; ++i) {
    Rational favorite(0);  // not buying is always on the menu
    for (int j = 0; j < inst.n_items; ++j)
      favorite = max(favorite, Rational(inst.value(i, j)) - prices[j]);
    Rational assigned(0);
    if (matching.matched(i)) {
      int j = matching.item_of[i];
      assigned = Rational(inst.value(i, j)) - prices[j];
      if (assigned < Rational(0))
        bad.push_back("buyer " + buyer_label(i) + ": negative utility " +
                      assigned.str() + " at assigned item " + item_label(j));
    }
    if (favorite > assigned)
      bad.push_back("buyer " + buyer_label(i) +
                    (matching.matched(i)
                         ? ": assigned item " + item_label(matching.item_of[i]) +
                               " is not a favorite"
                         : ": unmatched but demands an item") +
                    " (best utility " + favorite.str() + " > " +
                    assigned.str() + ")");
    slack.push_back(favorite - assigned);
  }
  for (int j = 0; j < inst.n_items; ++j)
    if (!matching.item_sold(j) && !prices[j].is_zero())
      bad.push_back("item " + item_label(j) + ": unsold but price " +
                    prices[j].str() + " != 0");

  if (bad.empty())
    res.certificate =
        WalrasianCertificate{prices, matching, std::move(slack)};
  return res;
}

namespace detail {

// Conditions (a)/(b) for a fixed support matching, written as bounds
// and difference constraints on integer prices:
//
//   l_k <= p_k <= u_k            bounds
//   p_k >= p_j + c               one edge per (matched buyer, other item)
//
// The least solution (coordinatewise, hence also in total sum) is the
// least fixed point reached from the lower bounds; the greatest is
// reached from the upper bounds.  Either exists whenever the system is
// feasible, which for a welfare-optimal support it always is.
struct PriceSystem {
  std::vector<long long> lower, upper;
  struct Edge {
    int from, to;
    long long gain;  // p_to >= p_from + gain
  };
  std::vector<Edge> edges;
};

inline PriceSystem build_price_system(const MatchingInstance& inst,
                                      const Matching& support) {
  const int m = inst.n_items;
  PriceSystem sys;
  sys.lower.assign(m, 0);
  sys.upper.assign(m, 0);

  std::vector<int> owner(m, -1);
  for (int i = 0; i < inst.n_buyers; ++i)
    if (support.matched(i)) owner[support.item_of[i]] = i;

  for (int j = 0; j < m; ++j)
    sys.upper[j] = owner[j] >= 0 ? inst.value(owner[j], j) : 0;

  for (int i = 0; i < inst.n_buyers; ++i) {
    if (support.matched(i)) {
      int j = support.item_of[i];
      for (int k = 0; k < m; ++k)
        if (k != j)
          sys.edges.push_back(
              {j, k, inst.value(i, k) - inst.value(i, j)});
    } else {
      for (int k = 0; k < m; ++k)
        sys.lower[k] = std::max(sys.lower[k], inst.value(i, k));
    }
  }
  return sys;
}

enum class Extreme { Min, Max };

inline std::optional<std::vector<long long>> solve_price_system(
    const PriceSystem& sys, Extreme which) {
  const int m = static_cast<int>(sys.lower.size());
  std::vector<long long> p =
      which == Extreme::Min ? sys.lower : sys.upper;
  for (int round = 0; round <= m; ++round) {
    bool changed = false;
    for (const auto& e : sys.edges) {
      if (which == Extreme::Min) {
        long long want = p[e.from] + e.gain;
        if (p[e.to] < want) {
          p[e.to] = want;
          changed = true;
        }
      } else {
        long long cap = p[e.to] - e.gain;
        if (p[e.from] > cap) {
          p[e.from] = cap;
          changed = true;
        }
      }
    }
    if (!changed) {
      for (int j = 0; j < m; ++j)
        if (p[j] < sys.lower[j] || p[j] > sys.upper[j]) return std::nullopt;
      return p;
    }
  }
  return std::nullopt;  // positive cycle: no equilibrium for this support
}

inline WalrasianSolution extreme_prices(const MatchingInstance& inst,
                                        const Matching& support,
                                        Extreme which) {
  auto solved = solve_price_system(build_price_system(inst, support), which);
  if (!solved)
    throw std::invalid_argument(
        "support matching admits no Walrasian prices (not welfare-optimal?)");
  PriceVector prices;
  prices.reserve(solved->size());
  for (long long v : *solved) prices.emplace_back(v);
  if (!check_walrasian(inst, prices, support).ok())
    throw std::logic_error("computed extreme prices failed verification");
  return WalrasianSolution{std::move(prices), support};
}

}  // namespace detail

// Extremes over the equilibrium price region, holding a caller-chosen
// welfare-optimal support fixed.  The region does not depend on which
// optimal matching supports it, so these agree across all optima.
inline WalrasianSolution min_walrasian_with_support(
    const MatchingInstance& inst, const Matching& support) {
  return detail::extreme_prices(inst, support, detail::Extreme::Min);
}

inline WalrasianSolution max_walrasian_with_support(
    const MatchingInstance& inst, const Matching& support) {
  return detail::extreme_prices(inst, support, detail::Extreme::Max);
}

inline WalrasianSolution min_walrasian(const MatchingInstance& inst) {
  auto best = max_welfare_matching(inst);
  return min_walrasian_with_support(inst, std::get<Matching>(best.allocation));
}

inline WalrasianSolution max_walrasian(const MatchingInstance& inst) {
  auto best = max_welfare_matching(inst);
  return max_walrasian_with_support(inst, std::get<Matching>(best.allocation));
}

// The classic equivalence: VCG payments, read as prices of the items
// the payers received (unsold items at 0), are the minimum Walrasian
// prices.  The acceptance suite checks this exhaustively.
inline PriceVector vcg_payments_as_item_prices(const MatchingInstance& inst,
                                               const VcgOutcome& vcg) {
  PriceVector prices(inst.n_items, Rational(0));
  const auto& matching = std::get<Matching>(vcg.outcome.allocation);
  for (int i = 0; i < inst.n_buyers; ++i)
    if (matching.matched(i))
      prices[matching.item_of[i]] = vcg.outcome.payments[i];
  return prices;
}

// ---------------------------------------------------------------------------
// Grid oracle: every integer price vector in [0, price_bound]^m that
// some matching supports as an equilibrium.  Output is ordered by
// price vector, lexicographically ascending.

inline constexpr int kMaxOracleSide = 4;

inline std::vector<std::pair<PriceVector, Matching>> oracle_walrasian_set(
    const MatchingInstance& inst, long long price_bound) {
  const int n = inst.n_buyers;
  const int m = inst.n_items;
  if (n > kMaxOracleSide || m > kMaxOracleSide)
    throw std::invalid_argument("instance too large for the price grid oracle");
  long long max_value = 0;
  for (const auto& row : inst.values)
    for (long long v : row) max_value = std::max(max_value, v);
  if (price_bound < max_value)
    throw std::invalid_argument("price_bound below the maximum value");

  const std::vector<Matching> matchings = enumerate_matchings(n, m);
  std::vector<std::pair<PriceVector, Matching>> out;
  std::vector<long long> p(m, 0);
  std::vector<long long> favorite(n);

  while (true) {
    for (int i = 0; i < n; ++i) {
      long long best = 0;
      for (int j = 0; j < m; ++j)
        best = std::max(best, inst.value(i, j) - p[j]);
      favorite[i] = best;
    }
    for (const Matching& mu : matchings) {
      bool good = true;
      std::uint32_t sold = 0;
      for (int i = 0; i < n && good; ++i) {
        if (mu.matched(i)) {
          int j = mu.item_of[i];
          sold |= 1u << j;
          good = inst.value(i, j) - p[j] == favorite[i] && favorite[i] >= 0;
        } else {
          good = favorite[i] <= 0;
        }
      }
      for (int j = 0; j < m && good; ++j)
        if (!(sold & (1u << j))) good = p[j] == 0;
      if (!good) continue;

      PriceVector prices;
      prices.reserve(m);
      for (long long v : p) prices.emplace_back(v);
      if (!check_walrasian(inst, prices, mu).ok())
        throw std::logic_error("grid oracle pre-filter disagrees with checker");
      out.emplace_back(std::move(prices), mu);
      break;  // one supporting matching per feasible price vector
    }

    int j = m - 1;
    while (j >= 0 && p[j] == price_bound) p[j--] = 0;
    if (j < 0) break;
    ++p[j];
  }
  return out;
}

}  // namespace marketlab
