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

#include <stdexcept>
#include <vector>

#include "marketlab/types.hpp"
#include "marketlab/welfare.hpp"

namespace marketlab {

// Clarke-pivot outcome: welfare-maximizing allocation, and each buyer
// pays the externality they impose on everyone else,
//
//   payment_i = W(others alone) - (W(all) - v_i(chosen allocation)).
//
// Removing a buyer means deleting them, not zeroing their values.
struct VcgOutcome {
  MechanismOutcome outcome;
  std::vector<Rational> per_buyer_externality;  // identical to payments
};

namespace detail {

inline long long buyer_value_in(const MatchingInstance& inst,
                                const Matching& m, int buyer) {
  return m.matched(buyer) ? inst.value(buyer, m.item_of[buyer]) : 0;
}

inline long long buyer_value_in(const SingleMindedInstance& inst,
                                const BundleAllocation& a, int buyer) {
  return a.wins(buyer) ? inst.bids[buyer].value : 0;
}

template <typename Inst, typename Alloc, typename Solve>
VcgOutcome run_vcg_impl(const Inst& inst, int n_buyers, Solve solve) {
  WelfareResult all = solve(std::vector<int>{});
  const Alloc& chosen = std::get<Alloc>(all.allocation);

  VcgOutcome out;
  out.outcome.allocation = chosen;
  out.outcome.payments.reserve(n_buyers);
  for (int i = 0; i < n_buyers; ++i) {
    long long without_i = solve(std::vector<int>{i}).best_value;
    long long value_i = buyer_value_in(inst, chosen, i);
    long long others_with_i = all.best_value - value_i;
    Rational pay(without_i - others_with_i);
    if (pay < Rational(0) || pay > Rational(value_i))
      throw std::logic_error("VCG payment outside [0, v_i]");
    out.outcome.payments.push_back(pay);
  }
  out.outcome.revenue = sum(out.outcome.payments);
  out.per_buyer_externality = out.outcome.payments;
  return out;
}

}  // namespace detail

inline VcgOutcome run_vcg(const MatchingInstance& inst) {
  return detail::run_vcg_impl<MatchingInstance, Matching>(
      inst, inst.n_buyers,
      [&](const std::vector<int>& excl) {
        return max_welfare_matching(inst, excl);
      });
}

inline VcgOutcome run_vcg(const SingleMindedInstance& inst) {
  return detail::run_vcg_impl<SingleMindedInstance, BundleAllocation>(
      inst, static_cast<int>(inst.bids.size()),
      [&](const std::vector<int>& excl) {
        return max_welfare_single_minded(inst, excl);
      });
}

inline VcgOutcome run_vcg(const Instance& inst) {
  return std::visit([](const auto& x) { return run_vcg(x); }, inst);
}

inline Rational revenue(const VcgOutcome& out) {
  return sum(out.outcome.payments);
}

}  // namespace marketlab
