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
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "marketlab/io.hpp"
#include "marketlab/rational.hpp"
#include "marketlab/types.hpp"

namespace marketlab {

// Posted item prices against one unit-demand buyer of random type.
// Unlike a Walrasian equilibrium there is no market-clearing side:
// unsold items may carry any price, which is exactly the relaxation
// that removes the unsold-items-at-zero constraint.

struct BuyerType {
  std::vector<long long> values;
  Rational prob;

  bool operator==(const BuyerType&) const = default;
};

struct TypeDistribution {
  int n_items = 0;
  std::vector<BuyerType> types;

  bool operator==(const TypeDistribution&) const = default;
};

struct PostedPriceResult {
  PriceVector prices;
  Rational expected_revenue;
  std::vector<std::optional<int>> per_type_choice;
};

inline std::vector<std::string> validate(const TypeDistribution& dist) {
  std::vector<std::string> out;
  if (dist.n_items < 1) out.push_back("items must be >= 1");
  if (dist.types.empty()) out.push_back("no types");
  Rational total;
  for (std::size_t t = 0; t < dist.types.size(); ++t) {
    const BuyerType& ty = dist.types[t];
    if (static_cast<int>(ty.values.size()) != dist.n_items)
      out.push_back("type " + std::to_string(t) + " has " +
                    std::to_string(ty.values.size()) + " values, expected " +
                    std::to_string(dist.n_items));
    for (std::size_t j = 0; j < ty.values.size(); ++j)
      if (ty.values[j] < 0)
        out.push_back("negative value at type " + std::to_string(t) +
                      " item " + std::to_string(j));
    if (ty.prob < Rational(0))
      out.push_back("type " + std::to_string(t) + ": negative probability");
    total += ty.prob;
  }
  if (!dist.types.empty() && total != Rational(1))
    out.push_back("probabilities sum to " + total.str() + ", expected 1");
  return out;
}

inline TypeDistribution parse_distribution(const json& doc) {
  const json& type = detail::field(doc, "type", "");
  if (!type.is_string() || type.get<std::string>() != "distribution")
    detail::fail("type", "expected \"distribution\"");
  TypeDistribution dist;
  dist.n_items = static_cast<int>(
      detail::to_int(detail::field(doc, "items", ""), "items"));
  const json& types = detail::field(doc, "types", "");
  if (!types.is_array() || types.empty())
    detail::fail("types", "expected a nonempty array");
  for (std::size_t t = 0; t < types.size(); ++t) {
    std::string tpath = "types[" + std::to_string(t) + "]";
    BuyerType ty;
    const json& values = detail::field(types[t], "values", tpath);
    if (!values.is_array()) detail::fail(tpath + ".values", "expected an array");
    for (std::size_t j = 0; j < values.size(); ++j)
      ty.values.push_back(detail::to_int(
          values[j], tpath + ".values[" + std::to_string(j) + "]"));
    ty.prob = rational_from_json(detail::field(types[t], "prob", tpath),
                                 tpath + ".prob");
    dist.types.push_back(std::move(ty));
  }
  if (auto errs = validate(dist); !errs.empty())
    detail::fail("types", errs.front());
  return dist;
}

inline TypeDistribution parse_distribution(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
  return parse_distribution(doc);
}

// String literals would otherwise be ambiguous between the json and
// std::string overloads.
inline TypeDistribution parse_distribution(const char* text) {
  return parse_distribution(std::string(text));
}

inline json to_json(const TypeDistribution& dist) {
  json types = json::array();
  for (const BuyerType& ty : dist.types)
    types.push_back(
        json{{"values", ty.values}, {"prob", rational_to_json(ty.prob)}});
  return json{{"type", "distribution"}, {"items", dist.n_items},
              {"types", types}};
}

// Demand of one buyer: a utility-maximizing item if the maximum
// utility is >= 0, otherwise nothing.  Ties go to the purchase, then
// to the higher-priced item, then to the lower index; without the
// buy-at-zero and higher-price rules the revenue supremum need not be
// attained.
inline std::optional<int> buyer_choice(const std::vector<long long>& values,
                                       const PriceVector& prices) {
  if (values.size() != prices.size())
    throw std::invalid_argument("values and prices differ in length");
  std::optional<int> best;
  Rational best_utility;
  for (std::size_t j = 0; j < values.size(); ++j) {
    Rational u = Rational(values[j]) - prices[j];
    if (u < Rational(0)) continue;
    if (!best || u > best_utility ||
        (u == best_utility && prices[j] > prices[*best])) {
      best = static_cast<int>(j);
      best_utility = u;
    }
  }
  return best;
}

namespace detail {

inline Rational expected_revenue_at(const TypeDistribution& dist,
                                    const PriceVector& prices,
                                    std::vector<std::optional<int>>* choices) {
  Rational rev;
  if (choices) choices->clear();
  for (const BuyerType& ty : dist.types) {
    std::optional<int> pick = buyer_choice(ty.values, prices);
    if (pick) rev += ty.prob * prices[*pick];
    if (choices) choices->push_back(pick);
  }
  return rev;
}

}  // namespace detail

// Exhaustive search over the candidate price grid
// {0, 1/D, 2/D, ..., V} + {V+1} per item, where D is the lcm of the
// probability denominators and V the largest value in the support.
// The level V+1 prices an item out entirely.  Grid sufficiency at this
// scale is validated against a denser grid in the test suite.
inline PostedPriceResult max_posted_revenue(const TypeDistribution& dist,
                                            long long budget = 4'000'000) {
  if (auto errs = validate(dist); !errs.empty())
    throw std::invalid_argument("invalid distribution: " + errs.front());
  const int m = dist.n_items;
  if (m > 4)
    throw std::invalid_argument("posted-price search caps at 4 items");

  long long denom_lcm = 1;
  long long max_value = 0;
  for (const BuyerType& ty : dist.types) {
    denom_lcm = std::lcm(denom_lcm, ty.prob.den());
    for (long long v : ty.values) max_value = std::max(max_value, v);
  }

  // levels 0/D .. (V*D)/D, then the priced-out level V+1
  const __int128 wide_levels = __int128(max_value) * denom_lcm + 2;
  if (wide_levels > budget)
    throw BudgetError("posted-price candidate grid exceeds budget of " +
                      std::to_string(budget));
  const long long levels = static_cast<long long>(wide_levels);
  long long grid_size = 1;
  for (int j = 0; j < m; ++j) {
    if (grid_size > budget / levels)
      throw BudgetError("posted-price candidate grid exceeds budget of " +
                        std::to_string(budget));
    grid_size *= levels;
  }

  auto level_price = [&](long long level) {
    return level == levels - 1 ? Rational(max_value + 1)
                               : Rational(level, denom_lcm);
  };

  PostedPriceResult best;
  bool have_best = false;
  std::vector<long long> level(m, 0);
  PriceVector prices(m, Rational(0));
  while (true) {
    for (int j = 0; j < m; ++j) prices[j] = level_price(level[j]);
    Rational rev = detail::expected_revenue_at(dist, prices, nullptr);
    // strict improvement only: the grid is scanned in lexicographic
    // order, so the kept optimum is the lexicographically smallest
    if (!have_best || rev > best.expected_revenue) {
      best.prices = prices;
      best.expected_revenue = rev;
      have_best = true;
    }
    int j = m - 1;
    while (j >= 0 && level[j] == levels - 1) level[j--] = 0;
    if (j < 0) break;
    ++level[j];
  }

  best.expected_revenue =
      detail::expected_revenue_at(dist, best.prices, &best.per_type_choice);
  return best;
}

}  // namespace marketlab
