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

#include <string>
#include <vector>

#include "marketlab/io.hpp"
#include "marketlab/pricing.hpp"
#include "marketlab/probe.hpp"

namespace marketlab {

// Golden before/after revenue cases, kept as data in
// data/repro_cases.json.  Each case is a base market, the same market
// with exactly one value raised, and the exact revenues a correct
// build must reproduce.

struct ReproCheck {
  std::string mechanism;  // vcg | min-walrasian | max-walrasian | posted-price
  Rational expected_before;
  Rational expected_after;
  bool expect_monotone = false;
  std::string note;
};

struct ReproCase {
  std::string id;
  std::string summary;
  json before;
  json after;
  std::vector<ReproCheck> checks;
};

namespace detail {

// A case is only well-formed if before -> after is a single increase.
inline void check_single_increase(const ReproCase& c) {
  auto bad = [&](const std::string& why) {
    throw ParseError("repro case " + c.id + ": " + why);
  };
  const std::string type = field(c.before, "type", "").get<std::string>();
  if (type != field(c.after, "type", "").get<std::string>())
    bad("before/after market types differ");

  if (type == "distribution") {
    TypeDistribution before = parse_distribution(c.before);
    TypeDistribution after = parse_distribution(c.after);
    if (before.n_items != after.n_items || before.types.size() != after.types.size())
      bad("before/after shapes differ");
    int changed = 0;
    for (std::size_t t = 0; t < before.types.size(); ++t) {
      if (before.types[t].prob != after.types[t].prob)
        bad("probabilities changed");
      if (before.types[t].values != after.types[t].values) ++changed;
    }
    if (changed != 1) bad("expected exactly one changed type vector");
    return;
  }

  Instance before = parse_instance(c.before);
  Instance after = parse_instance(c.after);
  if (const auto* mb = std::get_if<MatchingInstance>(&before)) {
    const auto& ma = std::get<MatchingInstance>(after);
    if (mb->n_buyers != ma.n_buyers || mb->n_items != ma.n_items)
      bad("before/after shapes differ");
    int raised = 0;
    for (int i = 0; i < mb->n_buyers; ++i)
      for (int j = 0; j < mb->n_items; ++j) {
        if (ma.value(i, j) > mb->value(i, j)) ++raised;
        else if (ma.value(i, j) < mb->value(i, j)) bad("a value decreased");
      }
    if (raised != 1) bad("expected exactly one raised value");
    return;
  }
  const auto& sb = std::get<SingleMindedInstance>(before);
  const auto& sa = std::get<SingleMindedInstance>(after);
  if (sb.n_items != sa.n_items || sb.bids.size() != sa.bids.size())
    bad("before/after shapes differ");
  int raised = 0;
  for (std::size_t b = 0; b < sb.bids.size(); ++b) {
    if (sb.bids[b].bundle != sa.bids[b].bundle) bad("a bundle changed");
    if (sa.bids[b].value > sb.bids[b].value) ++raised;
    else if (sa.bids[b].value < sb.bids[b].value) bad("a value decreased");
  }
  if (raised != 1) bad("expected exactly one raised value");
}

}  // namespace detail

inline std::vector<ReproCase> load_repro_cases(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("repro cases: ") + e.what());
  }
  const json& cases = detail::field(doc, "cases", "");
  if (!cases.is_array()) detail::fail("cases", "expected an array");
  std::vector<ReproCase> out;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    std::string path = "cases[" + std::to_string(k) + "]";
    const json& c = cases[k];
    ReproCase rc;
    rc.id = detail::field(c, "id", path).get<std::string>();
    rc.summary = c.value("summary", "");
    rc.before = detail::field(c, "before", path);
    rc.after = detail::field(c, "after", path);
    const json& checks = detail::field(c, "checks", path);
    for (std::size_t x = 0; x < checks.size(); ++x) {
      std::string cpath = path + ".checks[" + std::to_string(x) + "]";
      const json& chk = checks[x];
      ReproCheck rchk;
      rchk.mechanism = detail::field(chk, "mechanism", cpath).get<std::string>();
      rchk.expected_before = rational_from_json(
          detail::field(chk, "before", cpath), cpath + ".before");
      rchk.expected_after = rational_from_json(
          detail::field(chk, "after", cpath), cpath + ".after");
      rchk.expect_monotone = chk.value("expect_monotone", false);
      rchk.note = chk.value("note", "");
      rc.checks.push_back(std::move(rchk));
    }
    detail::check_single_increase(rc);
    out.push_back(std::move(rc));
  }
  return out;
}

struct ReproLine {
  std::string mechanism;
  Rational expected_before, expected_after;
  Rational actual_before, actual_after;
  bool monotone_checked = false;
  bool pass = false;
};

struct ReproOutcome {
  std::string id;
  std::vector<ReproLine> lines;
  bool pass = true;
};

inline ReproOutcome run_repro_case(const ReproCase& c) {
  ReproOutcome out;
  out.id = c.id;
  for (const ReproCheck& chk : c.checks) {
    ReproLine line;
    line.mechanism = chk.mechanism;
    line.expected_before = chk.expected_before;
    line.expected_after = chk.expected_after;
    if (chk.mechanism == "posted-price") {
      line.actual_before =
          max_posted_revenue(parse_distribution(c.before)).expected_revenue;
      line.actual_after =
          max_posted_revenue(parse_distribution(c.after)).expected_revenue;
    } else {
      Mechanism mech = mechanism_from_string(chk.mechanism);
      line.actual_before = mechanism_revenue(parse_instance(c.before), mech);
      line.actual_after = mechanism_revenue(parse_instance(c.after), mech);
    }
    line.monotone_checked = chk.expect_monotone;
    line.pass = line.actual_before == chk.expected_before &&
                line.actual_after == chk.expected_after;
    if (chk.expect_monotone && line.actual_after < line.actual_before)
      line.pass = false;
    out.pass = out.pass && line.pass;
    out.lines.push_back(std::move(line));
  }
  return out;
}

}  // namespace marketlab
