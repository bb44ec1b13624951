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
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "marketlab/io.hpp"
#include "marketlab/types.hpp"
#include "marketlab/vcg.hpp"
#include "marketlab/walrasian.hpp"
#include "marketlab/welfare.hpp"

namespace marketlab {

enum class Mechanism { Vcg, MinWalrasian, MaxWalrasian };

inline std::string to_string(Mechanism mech) {
  switch (mech) {
    case Mechanism::Vcg: return "vcg";
    case Mechanism::MinWalrasian: return "min-walrasian";
    case Mechanism::MaxWalrasian: return "max-walrasian";
  }
  throw std::logic_error("unreachable");
}

inline Mechanism mechanism_from_string(const std::string& s) {
  if (s == "vcg") return Mechanism::Vcg;
  if (s == "min-walrasian") return Mechanism::MinWalrasian;
  if (s == "max-walrasian") return Mechanism::MaxWalrasian;
  throw std::invalid_argument("unknown mechanism '" + s + "'");
}

// A single value increase: one (buyer, item) cell of a matching market,
// or one single-minded buyer's bid for their own bundle.  Increases
// only; that is the direction in which revenue can surprise.
struct Perturbation {
  int buyer = 0;
  std::optional<int> item;  // nullopt: the buyer's own bundle
  long long delta = 1;

  bool operator==(const Perturbation&) const = default;
};

struct MonotonicityWitness {
  Instance instance;
  Perturbation perturbation;
  Mechanism mechanism;
  Rational revenue_before;
  Rational revenue_after;
};

inline Instance apply(const Instance& inst, const Perturbation& pert) {
  if (pert.delta <= 0) throw std::invalid_argument("delta must be positive");
  if (const auto* m = std::get_if<MatchingInstance>(&inst)) {
    if (pert.buyer < 0 || pert.buyer >= m->n_buyers)
      throw std::invalid_argument("perturbation buyer out of range");
    if (!pert.item)
      throw std::invalid_argument("matching perturbation needs an item");
    if (*pert.item < 0 || *pert.item >= m->n_items)
      throw std::invalid_argument("perturbation item out of range");
    MatchingInstance next = *m;
    next.values[pert.buyer][*pert.item] += pert.delta;
    return next;
  }
  const auto& sm = std::get<SingleMindedInstance>(inst);
  if (pert.buyer < 0 || pert.buyer >= static_cast<int>(sm.bids.size()))
    throw std::invalid_argument("perturbation buyer out of range");
  if (pert.item)
    throw std::invalid_argument(
        "single-minded perturbation targets the buyer's own bundle");
  SingleMindedInstance next = sm;
  next.bids[pert.buyer].value += pert.delta;
  return next;
}

inline Rational mechanism_revenue(const Instance& inst, Mechanism mech) {
  if (mech == Mechanism::Vcg) return run_vcg(inst).outcome.revenue;
  const auto* m = std::get_if<MatchingInstance>(&inst);
  if (!m)
    throw std::invalid_argument(to_string(mech) +
                                " requires a matching instance");
  return price_revenue(mech == Mechanism::MinWalrasian
                           ? min_walrasian(*m).prices
                           : max_walrasian(*m).prices);
}

inline std::pair<Rational, Rational> revenue_delta(const Instance& inst,
                                                   const Perturbation& pert,
                                                   Mechanism mech) {
  return {mechanism_revenue(inst, mech),
          mechanism_revenue(apply(inst, pert), mech)};
}

// ---------------------------------------------------------------------------
// Witness search over a grid of instances.

enum class MarketClass { Matching, SingleMinded };

struct GridSpec {
  int n = 2;       // buyers (matching) or bids (single-minded)
  int m = 2;       // items
  long long vmax = 2;
  long long dmax = 1;
  MarketClass market = MarketClass::Matching;
};

// "n=2,m=2,vmax=2,dmax=2" with optional "class=matching|single_minded"
inline GridSpec parse_grid_spec(const std::string& text) {
  GridSpec spec;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string part = text.substr(pos, end - pos);
    pos = end + 1;
    if (part.empty()) continue;
    std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("grid spec entry '" + part +
                                  "' is not key=value");
    std::string key = part.substr(0, eq);
    std::string value = part.substr(eq + 1);
    try {
      if (key == "n") spec.n = std::stoi(value);
      else if (key == "m") spec.m = std::stoi(value);
      else if (key == "vmax") spec.vmax = std::stoll(value);
      else if (key == "dmax") spec.dmax = std::stoll(value);
      else if (key == "class") {
        if (value == "matching") spec.market = MarketClass::Matching;
        else if (value == "single_minded")
          spec.market = MarketClass::SingleMinded;
        else
          throw std::invalid_argument("unknown market class '" + value + "'");
      } else {
        throw std::invalid_argument("unknown grid key '" + key + "'");
      }
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("grid value out of range in '" + part + "'");
    }
  }
  if (spec.n < 1 || spec.m < 1 || spec.vmax < 0 || spec.dmax < 1)
    throw std::invalid_argument("grid spec out of range");
  return spec;
}

struct SearchMode {
  bool random = false;
  std::uint64_t seed = 0;
  long long trials = 0;

  static SearchMode exhaustive() { return {}; }
  static SearchMode random_trials(std::uint64_t seed, long long trials) {
    return {true, seed, trials};
  }
};

namespace detail {

inline int worker_count() {
  if (const char* env = std::getenv("MARKETLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased bounded draw from the raw engine stream; avoids
// distribution classes whose output is not pinned by the standard.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Number of distinct instances in the grid.
inline __int128 grid_instance_count(const GridSpec& spec) {
  __int128 per_cell = spec.vmax + 1;
  __int128 total = 1;
  if (spec.market == MarketClass::Matching) {
    for (int c = 0; c < spec.n * spec.m; ++c) total *= per_cell;
  } else {
    __int128 per_bid = ((__int128(1) << spec.m) - 1) * per_cell;
    for (int b = 0; b < spec.n; ++b) total *= per_bid;
  }
  return total;
}

inline Instance decode_instance(const GridSpec& spec, __int128 index) {
  if (spec.market == MarketClass::Matching) {
    MatchingInstance inst;
    inst.n_buyers = spec.n;
    inst.n_items = spec.m;
    inst.values.assign(spec.n, std::vector<long long>(spec.m, 0));
    const __int128 base = spec.vmax + 1;
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.m; ++j) {
        inst.values[i][j] = static_cast<long long>(index % base);
        index /= base;
      }
    return inst;
  }
  SingleMindedInstance inst;
  inst.n_items = spec.m;
  const __int128 bundles = (__int128(1) << spec.m) - 1;
  const __int128 vbase = spec.vmax + 1;
  for (int b = 0; b < spec.n; ++b) {
    Bid bid;
    bid.value = static_cast<long long>(index % vbase);
    index /= vbase;
    bid.bundle = static_cast<std::uint32_t>(index % bundles) + 1;  // skip 0
    index /= bundles;
    inst.bids.push_back(bid);
  }
  return inst;
}

inline Instance random_instance(const GridSpec& spec, std::mt19937_64& rng) {
  if (spec.market == MarketClass::Matching) {
    MatchingInstance inst;
    inst.n_buyers = spec.n;
    inst.n_items = spec.m;
    inst.values.assign(spec.n, std::vector<long long>(spec.m, 0));
    for (auto& row : inst.values)
      for (auto& v : row)
        v = static_cast<long long>(uniform_below(rng, spec.vmax + 1));
    return inst;
  }
  SingleMindedInstance inst;
  inst.n_items = spec.m;
  for (int b = 0; b < spec.n; ++b) {
    Bid bid;
    bid.bundle = static_cast<std::uint32_t>(
                     uniform_below(rng, (1ull << spec.m) - 1)) +
                 1;
    bid.value = static_cast<long long>(uniform_below(rng, spec.vmax + 1));
    inst.bids.push_back(bid);
  }
  return inst;
}

inline std::vector<Perturbation> grid_perturbations(const GridSpec& spec) {
  std::vector<Perturbation> out;
  for (int buyer = 0; buyer < spec.n; ++buyer) {
    if (spec.market == MarketClass::Matching) {
      for (int item = 0; item < spec.m; ++item)
        for (long long d = 1; d <= spec.dmax; ++d)
          out.push_back({buyer, item, d});
    } else {
      for (long long d = 1; d <= spec.dmax; ++d)
        out.push_back({buyer, std::nullopt, d});
    }
  }
  return out;
}

// Sort/dedup key: the witness with buyers and items relabeled to the
// lexicographically smallest equivalent form.
using WitnessKey = std::vector<long long>;

inline WitnessKey witness_key(const Instance& inst, const Perturbation& pert) {
  if (const auto* m = std::get_if<MatchingInstance>(&inst)) {
    WitnessKey key{0, m->n_buyers, m->n_items};
    for (const auto& row : m->values)
      key.insert(key.end(), row.begin(), row.end());
    key.push_back(pert.buyer);
    key.push_back(*pert.item);
    key.push_back(pert.delta);
    return key;
  }
  const auto& sm = std::get<SingleMindedInstance>(inst);
  WitnessKey key{1, static_cast<long long>(sm.bids.size()), sm.n_items};
  for (const Bid& bid : sm.bids) {
    key.push_back(bid.bundle);
    key.push_back(bid.value);
  }
  key.push_back(pert.buyer);
  key.push_back(pert.delta);
  return key;
}

inline constexpr int kMaxCanonicalSide = 6;

template <typename Fn>
void for_each_permutation_pair(int n, int m, Fn&& fn) {
  std::vector<int> rows(n), cols(m);
  std::iota(rows.begin(), rows.end(), 0);
  do {
    std::iota(cols.begin(), cols.end(), 0);
    do {
      fn(rows, cols);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } while (std::next_permutation(rows.begin(), rows.end()));
}

inline std::pair<Instance, Perturbation> canonical_form(
    const Instance& inst, const Perturbation& pert) {
  std::pair<Instance, Perturbation> best{inst, pert};
  WitnessKey best_key = witness_key(inst, pert);

  if (const auto* mi = std::get_if<MatchingInstance>(&inst)) {
    if (mi->n_buyers > kMaxCanonicalSide || mi->n_items > kMaxCanonicalSide)
      return best;  // relabeling search is only worthwhile at desk scale
    for_each_permutation_pair(
        mi->n_buyers, mi->n_items,
        [&](const std::vector<int>& rows, const std::vector<int>& cols) {
          MatchingInstance cand;
          cand.n_buyers = mi->n_buyers;
          cand.n_items = mi->n_items;
          cand.values.assign(cand.n_buyers,
                             std::vector<long long>(cand.n_items, 0));
          Perturbation cpert = pert;
          for (int i = 0; i < cand.n_buyers; ++i)
            for (int j = 0; j < cand.n_items; ++j) {
              cand.values[i][j] = mi->values[rows[i]][cols[j]];
              if (rows[i] == pert.buyer && cols[j] == *pert.item) {
                cpert.buyer = i;
                cpert.item = j;
              }
            }
          WitnessKey key = witness_key(cand, cpert);
          if (key < best_key) {
            best_key = std::move(key);
            best = {std::move(cand), cpert};
          }
        });
    return best;
  }

  const auto& sm = std::get<SingleMindedInstance>(inst);
  const int nbids = static_cast<int>(sm.bids.size());
  if (nbids > kMaxCanonicalSide || sm.n_items > kMaxCanonicalSide) return best;
  for_each_permutation_pair(
      nbids, sm.n_items,
      [&](const std::vector<int>& bids, const std::vector<int>& items) {
        SingleMindedInstance cand;
        cand.n_items = sm.n_items;
        Perturbation cpert = pert;
        for (int b = 0; b < nbids; ++b) {
          const Bid& src = sm.bids[bids[b]];
          Bid bid;
          bid.value = src.value;
          for (int j = 0; j < sm.n_items; ++j)
            if (src.bundle & (1u << items[j])) bid.bundle |= 1u << j;
          cand.bids.push_back(bid);
          if (bids[b] == pert.buyer) cpert.buyer = b;
        }
        WitnessKey key = witness_key(cand, cpert);
        if (key < best_key) {
          best_key = std::move(key);
          best = {std::move(cand), cpert};
        }
      });
  return best;
}

}  // namespace detail

inline MonotonicityWitness canonical_witness(const MonotonicityWitness& w) {
  auto [inst, pert] = detail::canonical_form(w.instance, w.perturbation);
  return MonotonicityWitness{std::move(inst), pert, w.mechanism,
                             w.revenue_before, w.revenue_after};
}

// Exhaustive or seeded-random search for strict revenue drops.  Every
// candidate found is re-verified from scratch, canonicalized, and
// deduplicated; the result is sorted so output does not depend on the
// worker schedule.
inline std::vector<MonotonicityWitness> search(
    const GridSpec& spec, Mechanism mech, const SearchMode& mode,
    long long budget = 10'000'000) {
  if (spec.market == MarketClass::SingleMinded && mech != Mechanism::Vcg)
    throw std::invalid_argument(to_string(mech) +
                                " requires matching instances");
  if (spec.market == MarketClass::Matching &&
      (spec.n > kMaxMatchingSide || spec.m > kMaxMatchingSide))
    throw std::invalid_argument("grid spec exceeds matching size cap");
  if (spec.market == MarketClass::SingleMinded &&
      (spec.n > 31 || spec.m > kMaxBundleItems))
    throw std::invalid_argument("grid spec exceeds single-minded size cap");

  const std::vector<Perturbation> perts = detail::grid_perturbations(spec);
  __int128 evaluations;
  long long work_items;  // instances (exhaustive) or trials (random)
  if (mode.random) {
    if (mode.trials < 0) throw std::invalid_argument("negative trial count");
    evaluations = mode.trials;
    work_items = mode.trials;
  } else {
    __int128 instances = detail::grid_instance_count(spec);
    evaluations = instances * static_cast<__int128>(perts.size());
    if (instances > budget)
      throw BudgetError("search budget exceeded");
    work_items = static_cast<long long>(instances);
  }
  if (evaluations > budget) throw BudgetError("search budget exceeded");

  struct Found {
    detail::WitnessKey key;
    MonotonicityWitness witness;
  };

  auto evaluate = [&](const Instance& inst, const Perturbation& pert,
                      const Rational& before, std::vector<Found>& out) {
    Instance after_inst = apply(inst, pert);
    Rational after = mechanism_revenue(after_inst, mech);
    if (max_welfare(after_inst).best_value < max_welfare(inst).best_value)
      throw std::logic_error("welfare decreased under a value increase");
    if (!(after < before)) return;
    MonotonicityWitness w =
        canonical_witness({inst, pert, mech, before, after});
    // independent re-verification on the canonical labeling
    auto [b2, a2] = revenue_delta(w.instance, w.perturbation, mech);
    if (b2 != w.revenue_before || a2 != w.revenue_after || !(a2 < b2))
      throw std::logic_error("witness failed re-verification");
    out.push_back({detail::witness_key(w.instance, w.perturbation), w});
  };

  auto run_range = [&](long long lo, long long hi, std::vector<Found>& out) {
    if (mode.random) {
      for (long long t = lo; t < hi; ++t) {
        std::mt19937_64 rng(
            detail::splitmix64(mode.seed + static_cast<std::uint64_t>(t)));
        Instance inst = detail::random_instance(spec, rng);
        const Perturbation& pert =
            perts[detail::uniform_below(rng, perts.size())];
        evaluate(inst, pert, mechanism_revenue(inst, mech), out);
      }
    } else {
      for (long long k = lo; k < hi; ++k) {
        Instance inst = detail::decode_instance(spec, k);
        Rational before = mechanism_revenue(inst, mech);
        for (const Perturbation& pert : perts)
          evaluate(inst, pert, before, out);
      }
    }
  };

  const int workers =
      static_cast<int>(std::min<long long>(detail::worker_count(),
                                           std::max<long long>(work_items, 1)));
  std::vector<std::vector<Found>> found(workers);
  if (workers <= 1) {
    run_range(0, work_items, found[0]);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const long long chunk = (work_items + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      long long lo = w * chunk;
      long long hi = std::min(work_items, lo + chunk);
      pool.emplace_back([&, lo, hi, w] {
        try {
          run_range(lo, hi, found[w]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  std::map<detail::WitnessKey, MonotonicityWitness> unique;
  for (auto& bucket : found)
    for (auto& f : bucket) unique.emplace(std::move(f.key), std::move(f.witness));
  std::vector<MonotonicityWitness> out;
  out.reserve(unique.size());
  for (auto& [key, w] : unique) out.push_back(std::move(w));
  return out;
}

// JSON-lines form: one witness per line, 1-based labels, rationals as
// {num,den}.
inline json to_json(const MonotonicityWitness& w) {
  json pert{{"buyer", w.perturbation.buyer + 1},
            {"delta", w.perturbation.delta}};
  if (w.perturbation.item) pert["item"] = *w.perturbation.item + 1;
  return json{{"instance", to_json(w.instance)},
              {"perturbation", pert},
              {"mechanism", to_string(w.mechanism)},
              {"revenue_before", rational_to_json(w.revenue_before)},
              {"revenue_after", rational_to_json(w.revenue_after)}};
}

}  // namespace marketlab
