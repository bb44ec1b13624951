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

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "marketlab/rational.hpp"

namespace marketlab {

// Desk-scale caps.  The exhaustive oracles in this library enumerate
// matchings and price grids, so instances are kept small enough that
// every such enumeration terminates quickly.
inline constexpr int kMaxMatchingSide = 16;   // buyers and items
inline constexpr int kMaxBundleItems = 30;    // single-minded item universe

// Errors that should abort a run rather than be reported as data.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Unit-demand unit-supply market: values[i][j] is buyer i's value for
// item j, a nonnegative integer in minor currency units.
struct MatchingInstance {
  int n_buyers = 0;
  int n_items = 0;
  std::vector<std::vector<long long>> values;

  [[nodiscard]] long long value(int buyer, int item) const {
    return values[buyer][item];
  }
  bool operator==(const MatchingInstance&) const = default;
};

// One all-or-nothing bid: a bundle of items (bitmask over the item
// universe) and the value for receiving the whole bundle.
struct Bid {
  std::uint32_t bundle = 0;
  long long value = 0;
  bool operator==(const Bid&) const = default;
};

struct SingleMindedInstance {
  int n_items = 0;
  std::vector<Bid> bids;  // one bid per buyer

  bool operator==(const SingleMindedInstance&) const = default;
};

using Instance = std::variant<MatchingInstance, SingleMindedInstance>;

// Partial injective buyer -> item assignment.  kUnmatched marks buyers
// without an item.
struct Matching {
  static constexpr int kUnmatched = -1;

  std::vector<int> item_of;  // indexed by buyer

  [[nodiscard]] bool matched(int buyer) const {
    return item_of[buyer] != kUnmatched;
  }
  [[nodiscard]] int size() const { return static_cast<int>(item_of.size()); }
  [[nodiscard]] bool item_sold(int item) const {
    for (int j : item_of)
      if (j == item) return true;
    return false;
  }

  bool operator==(const Matching&) const = default;
};

// Feasible outcome of a single-minded auction: winning bids with
// pairwise-disjoint bundles.
struct BundleAllocation {
  std::vector<int> winners;  // bid indices, ascending

  [[nodiscard]] bool wins(int bid) const {
    for (int w : winners)
      if (w == bid) return true;
    return false;
  }
  bool operator==(const BundleAllocation&) const = default;
};

using Allocation = std::variant<Matching, BundleAllocation>;

using PriceVector = std::vector<Rational>;

// Allocation plus payments.  revenue is always the exact sum of the
// payments; buyers that receive nothing pay zero.
struct MechanismOutcome {
  Allocation allocation;
  std::vector<Rational> payments;
  Rational revenue;
};

inline Rational sum(const std::vector<Rational>& xs) {
  Rational s;
  for (const auto& x : xs) s += x;
  return s;
}

// ---------------------------------------------------------------------------
// Validation.  Violations are data, not exceptions: a constructed
// instance can be checked wholesale and all problems reported at once.

inline std::vector<std::string> validate(const MatchingInstance& inst) {
  std::vector<std::string> out;
  if (inst.n_buyers < 1) out.push_back("n_buyers must be >= 1");
  if (inst.n_items < 1) out.push_back("n_items must be >= 1");
  if (inst.n_buyers > kMaxMatchingSide)
    out.push_back("n_buyers exceeds cap of " +
                  std::to_string(kMaxMatchingSide));
  if (inst.n_items > kMaxMatchingSide)
    out.push_back("n_items exceeds cap of " + std::to_string(kMaxMatchingSide));
  if (static_cast<int>(inst.values.size()) != inst.n_buyers)
    out.push_back("values has " + std::to_string(inst.values.size()) +
                  " rows, expected " + std::to_string(inst.n_buyers));
  for (std::size_t i = 0; i < inst.values.size(); ++i) {
    const auto& row = inst.values[i];
    if (static_cast<int>(row.size()) != inst.n_items) {
      out.push_back("row " + std::to_string(i) + " has " +
                    std::to_string(row.size()) + " entries, expected " +
                    std::to_string(inst.n_items));
      continue;
    }
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] < 0)
        out.push_back("negative value at (" + std::to_string(i) + "," +
                      std::to_string(j) + ")");
  }
  return out;
}

inline std::vector<std::string> validate(const SingleMindedInstance& inst) {
  std::vector<std::string> out;
  if (inst.n_items < 1) out.push_back("items must be >= 1");
  if (inst.n_items > kMaxBundleItems)
    out.push_back("items exceeds cap of " + std::to_string(kMaxBundleItems));
  for (std::size_t b = 0; b < inst.bids.size(); ++b) {
    const Bid& bid = inst.bids[b];
    if (bid.bundle == 0)
      out.push_back("bid " + std::to_string(b) + ": empty bundle");
    if (inst.n_items < 32 && (bid.bundle >> inst.n_items) != 0)
      out.push_back("bid " + std::to_string(b) + ": item index out of range");
    if (bid.value < 0)
      out.push_back("bid " + std::to_string(b) + ": negative value");
  }
  return out;
}

inline std::vector<std::string> validate(const Instance& inst) {
  return std::visit([](const auto& x) { return validate(x); }, inst);
}

// A matching is checked against the instance it is meant for.
inline std::vector<std::string> validate(const MatchingInstance& inst,
                                         const Matching& matching) {
  std::vector<std::string> out;
  if (matching.size() != inst.n_buyers)
    out.push_back("matching covers " + std::to_string(matching.size()) +
                  " buyers, expected " + std::to_string(inst.n_buyers));
  std::set<int> used;
  for (int i = 0; i < matching.size(); ++i) {
    int j = matching.item_of[i];
    if (j == Matching::kUnmatched) continue;
    if (j < 0 || j >= inst.n_items) {
      out.push_back("buyer " + std::to_string(i) + " assigned item " +
                    std::to_string(j) + " out of range");
      continue;
    }
    if (!used.insert(j).second)
      out.push_back("item " + std::to_string(j) + " assigned twice");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Human labels: letters for buyers and 1-based numbers for items,
// e.g. "A" wins item "1".

inline std::string buyer_label(int buyer) {
  return std::string(1, static_cast<char>('A' + buyer));
}
inline std::string item_label(int item) { return std::to_string(item + 1); }

}  // namespace marketlab
