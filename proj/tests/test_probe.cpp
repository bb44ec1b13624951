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
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "marketlab/io.hpp"
#include "marketlab/probe.hpp"

using namespace marketlab;

namespace {

MatchingInstance make(std::vector<std::vector<long long>> values) {
  MatchingInstance inst;
  inst.n_buyers = static_cast<int>(values.size());
  inst.n_items = static_cast<int>(values[0].size());
  inst.values = std::move(values);
  return inst;
}

std::string fingerprint(const MonotonicityWitness& w) {
  return to_json(w).dump();
}

std::vector<std::string> fingerprints(
    const std::vector<MonotonicityWitness>& ws) {
  std::vector<std::string> out;
  out.reserve(ws.size());
  for (const auto& w : ws) out.push_back(fingerprint(w));
  return out;
}

// Straight-line re-derivation of the exhaustive 2x2 search, no
// threading, no decode helpers.
std::set<std::string> brute_force_2x2(Mechanism mech, long long vmax,
                                      long long dmax) {
  std::set<std::string> found;
  std::vector<long long> cell(4, 0);
  while (true) {
    MatchingInstance inst =
        make({{cell[0], cell[1]}, {cell[2], cell[3]}});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (long long d = 1; d <= dmax; ++d) {
          Perturbation pert{i, j, d};
          auto [before, after] = revenue_delta(inst, pert, mech);
          if (after < before) {
            MonotonicityWitness w{inst, pert, mech, before, after};
            found.insert(fingerprint(canonical_witness(w)));
          }
        }
    int k = 3;
    while (k >= 0 && cell[k] == vmax) cell[k--] = 0;
    if (k < 0) break;
    ++cell[k];
  }
  return found;
}

}  // namespace

TEST_CASE("perturbations apply to a single entry") {
  Instance inst = make({{2, 0}, {1, 0}});
  Instance bumped = marketlab::apply(inst, Perturbation{1, 1, 2});
  CHECK(std::get<MatchingInstance>(bumped).values ==
        std::vector<std::vector<long long>>{{2, 0}, {1, 2}});
  // The original is untouched.
  CHECK(std::get<MatchingInstance>(inst).values[1][1] == 0);

  CHECK_THROWS_AS(marketlab::apply(inst, Perturbation{1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(marketlab::apply(inst, Perturbation{1, 1, -1}), std::invalid_argument);
  CHECK_THROWS_AS(marketlab::apply(inst, Perturbation{2, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(marketlab::apply(inst, Perturbation{0, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(marketlab::apply(inst, Perturbation{0, std::nullopt, 1}),
                  std::invalid_argument);

  SingleMindedInstance sm;
  sm.n_items = 2;
  sm.bids = {Bid{0b01u, 1}, Bid{0b10u, 0}};
  Instance bumped_sm = marketlab::apply(Instance{sm}, Perturbation{1, std::nullopt, 1});
  CHECK(std::get<SingleMindedInstance>(bumped_sm).bids[1].value == 1);
  CHECK_THROWS_AS(marketlab::apply(Instance{sm}, Perturbation{1, 0, 1}),
                  std::invalid_argument);
}

TEST_CASE("revenue deltas reproduce the worked examples") {
  auto [b1, a1] =
      revenue_delta(make({{2, 0}, {1, 0}}), Perturbation{1, 1, 2},
                    Mechanism::Vcg);
  CHECK(b1 == Rational(1));
  CHECK(a1 == Rational(0));

  auto [b2, a2] =
      revenue_delta(make({{2, 0}, {1, 0}}), Perturbation{1, 1, 2},
                    Mechanism::MinWalrasian);
  CHECK(b2 == Rational(1));
  CHECK(a2 == Rational(0));

  auto [b3, a3] = revenue_delta(make({{0, 0}, {1, 0}}), Perturbation{1, 1, 1},
                                Mechanism::MaxWalrasian);
  CHECK(b3 == Rational(1));
  CHECK(a3 == Rational(0));
}

TEST_CASE("grid specs parse and validate") {
  GridSpec spec = parse_grid_spec("n=2,m=3,vmax=4,dmax=2");
  CHECK(spec.n == 2);
  CHECK(spec.m == 3);
  CHECK(spec.vmax == 4);
  CHECK(spec.dmax == 2);
  CHECK(spec.market == MarketClass::Matching);
  CHECK(parse_grid_spec("n=3,m=2,vmax=1,class=single_minded").market ==
        MarketClass::SingleMinded);
  CHECK_THROWS_AS(parse_grid_spec("n=2,m"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid_spec("n=2,zmax=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid_spec("n=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid_spec("class=other"), std::invalid_argument);
}

TEST_CASE("grid sizes count every decodable instance") {
  GridSpec spec;  // 2x2, vmax 2
  CHECK(detail::grid_instance_count(spec) == 81);
  GridSpec sm{2, 2, 1, 1, MarketClass::SingleMinded};
  CHECK(detail::grid_instance_count(sm) == 36);  // (3 bundles * 2 values)^2

  std::set<std::string> seen;
  for (__int128 k = 0; k < detail::grid_instance_count(sm); ++k)
    seen.insert(serialize_instance(detail::decode_instance(sm, k)));
  CHECK(seen.size() == 36);
}

TEST_CASE("exhaustive search equals a straight-line re-derivation") {
  for (Mechanism mech :
       {Mechanism::Vcg, Mechanism::MinWalrasian, Mechanism::MaxWalrasian}) {
    GridSpec spec{2, 2, 2, 2, MarketClass::Matching};
    auto got = search(spec, mech, SearchMode::exhaustive());
    auto want = brute_force_2x2(mech, 2, 2);
    auto got_prints = fingerprints(got);
    CHECK(std::set<std::string>(got_prints.begin(), got_prints.end()) == want);
    CHECK(got_prints.size() == want.size());  // output already deduped
    auto again = fingerprints(search(spec, mech, SearchMode::exhaustive()));
    CHECK(got_prints == again);
  }
}

TEST_CASE("the trivial one-by-one grid has no witnesses") {
  GridSpec spec{1, 1, 5, 5, MarketClass::Matching};
  for (Mechanism mech :
       {Mechanism::Vcg, Mechanism::MinWalrasian, Mechanism::MaxWalrasian})
    CHECK(search(spec, mech, SearchMode::exhaustive()).empty());
}

TEST_CASE("found witnesses re-verify and strictly drop revenue") {
  GridSpec spec{2, 2, 2, 2, MarketClass::Matching};
  auto found = search(spec, Mechanism::MaxWalrasian, SearchMode::exhaustive());
  REQUIRE_FALSE(found.empty());
  for (const auto& w : found) {
    CHECK(w.revenue_after < w.revenue_before);
    auto [before, after] = revenue_delta(w.instance, w.perturbation, w.mechanism);
    CHECK(before == w.revenue_before);
    CHECK(after == w.revenue_after);
  }
}

TEST_CASE("the textbook drops are rediscovered in canonical form") {
  GridSpec spec{2, 2, 2, 2, MarketClass::Matching};

  MonotonicityWitness vcg_case{make({{2, 0}, {1, 0}}), Perturbation{1, 1, 2},
                               Mechanism::Vcg, Rational(1), Rational(0)};
  auto vcg_found =
      fingerprints(search(spec, Mechanism::Vcg, SearchMode::exhaustive()));
  CHECK(std::find(vcg_found.begin(), vcg_found.end(),
                  fingerprint(canonical_witness(vcg_case))) != vcg_found.end());

  MonotonicityWitness max_case{make({{0, 0}, {1, 0}}), Perturbation{1, 1, 1},
                               Mechanism::MaxWalrasian, Rational(1),
                               Rational(0)};
  auto max_found = fingerprints(
      search(spec, Mechanism::MaxWalrasian, SearchMode::exhaustive()));
  CHECK(std::find(max_found.begin(), max_found.end(),
                  fingerprint(canonical_witness(max_case))) !=
        max_found.end());
}

TEST_CASE("the bundle-bid drop is rediscovered too") {
  SingleMindedInstance sm;
  sm.n_items = 2;
  sm.bids = {Bid{0b01u, 1}, Bid{0b10u, 0}, Bid{0b11u, 1}};
  MonotonicityWitness am06{Instance{sm}, Perturbation{1, std::nullopt, 1},
                           Mechanism::Vcg, Rational(1), Rational(0)};

  GridSpec spec{3, 2, 1, 1, MarketClass::SingleMinded};
  auto found = fingerprints(search(spec, Mechanism::Vcg, SearchMode::exhaustive()));
  CHECK(std::find(found.begin(), found.end(),
                  fingerprint(canonical_witness(am06))) != found.end());

  GridSpec bad = spec;
  CHECK_THROWS_AS(search(bad, Mechanism::MinWalrasian, SearchMode::exhaustive()),
                  std::invalid_argument);
}

TEST_CASE("canonicalization is idempotent and relabel-invariant") {
  MonotonicityWitness w{make({{2, 0}, {1, 0}}), Perturbation{1, 1, 2},
                        Mechanism::Vcg, Rational(1), Rational(0)};
  auto c1 = canonical_witness(w);
  auto c2 = canonical_witness(c1);
  CHECK(fingerprint(c1) == fingerprint(c2));

  // Swap both buyers and items by hand; the canonical form must agree.
  MonotonicityWitness relabeled{make({{0, 1}, {0, 2}}), Perturbation{0, 0, 2},
                                Mechanism::Vcg, Rational(1), Rational(0)};
  CHECK(fingerprint(canonical_witness(relabeled)) == fingerprint(c1));
}

TEST_CASE("random mode is deterministic and sound") {
  GridSpec spec{2, 2, 2, 2, MarketClass::Matching};
  auto a = search(spec, Mechanism::Vcg, SearchMode::random_trials(7, 400));
  auto b = search(spec, Mechanism::Vcg, SearchMode::random_trials(7, 400));
  CHECK(fingerprints(a) == fingerprints(b));

  auto exhaustive = brute_force_2x2(Mechanism::Vcg, 2, 2);
  for (const auto& w : a)
    CHECK(exhaustive.count(fingerprint(w)) == 1);
}

TEST_CASE("budgets fail loudly before any work is done") {
  GridSpec spec{2, 2, 2, 2, MarketClass::Matching};
  CHECK_THROWS_AS(search(spec, Mechanism::Vcg, SearchMode::exhaustive(), 10),
                  BudgetError);
  CHECK_THROWS_AS(
      search(spec, Mechanism::Vcg, SearchMode::random_trials(1, 1000), 10),
      BudgetError);
}

TEST_CASE("witness json uses one-based labels") {
  MonotonicityWitness w{make({{2, 0}, {1, 0}}), Perturbation{1, 1, 2},
                        Mechanism::Vcg, Rational(1), Rational(0)};
  json j = to_json(w);
  CHECK(j["perturbation"]["buyer"] == 2);
  CHECK(j["perturbation"]["item"] == 2);
  CHECK(j["perturbation"]["delta"] == 2);
  CHECK(j["mechanism"] == "vcg");
  CHECK(j["revenue_before"] == json::parse(R"({"num":1,"den":1})"));

  SingleMindedInstance sm;
  sm.n_items = 2;
  sm.bids = {Bid{0b01u, 1}, Bid{0b10u, 0}};
  MonotonicityWitness wsm{Instance{sm}, Perturbation{1, std::nullopt, 1},
                          Mechanism::Vcg, Rational(1), Rational(0)};
  json jsm = to_json(wsm);
  CHECK(jsm["perturbation"]["buyer"] == 2);
  CHECK_FALSE(jsm["perturbation"].contains("item"));
}
