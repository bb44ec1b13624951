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

#include <json.hpp>

#include "marketlab/rational.hpp"
#include "marketlab/types.hpp"

// Instance file format.  Two document kinds share a "type" tag:
//
//   {"type":"matching","values":[[2,0],[1,0]]}
//   {"type":"single_minded","items":2,
//    "bids":[{"bundle":[1],"value":1},{"bundle":[2],"value":0}]}
//
// Item indices inside "bundle" are 1-based, matching the labels the CLI
// prints.  Rationals in output documents are {"num":n,"den":d} with
// den >= 1 and gcd(num,den) == 1.

namespace marketlab {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

inline const json& field(const json& j, const char* key,
                         const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline long long to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

}  // namespace detail

inline Rational rational_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  long long num = detail::to_int(detail::field(j, "num", path), path + ".num");
  long long den = detail::to_int(detail::field(j, "den", path), path + ".den");
  if (den < 1) detail::fail(path + ".den", "must be >= 1");
  return Rational(num, den);
}

inline json rational_to_json(const Rational& r) {
  return json{{"num", r.num()}, {"den", r.den()}};
}

inline json to_json(const MatchingInstance& inst) {
  json rows = json::array();
  for (const auto& row : inst.values) rows.push_back(row);
  return json{{"type", "matching"}, {"values", rows}};
}

inline json to_json(const SingleMindedInstance& inst) {
  json bids = json::array();
  for (const Bid& bid : inst.bids) {
    json bundle = json::array();
    for (int j = 0; j < inst.n_items; ++j)
      if (bid.bundle & (1u << j)) bundle.push_back(j + 1);
    bids.push_back(json{{"bundle", bundle}, {"value", bid.value}});
  }
  return json{{"type", "single_minded"},
              {"items", inst.n_items},
              {"bids", bids}};
}

inline json to_json(const Instance& inst) {
  return std::visit([](const auto& x) { return to_json(x); }, inst);
}

inline std::string serialize_instance(const Instance& inst) {
  return to_json(inst).dump();
}

namespace detail {

inline MatchingInstance parse_matching(const json& doc) {
  MatchingInstance inst;
  const json& rows = field(doc, "values", "");
  if (!rows.is_array() || rows.empty()) fail("values", "expected a nonempty array");
  inst.n_buyers = static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& row = rows[i];
    std::string rpath = "values[" + std::to_string(i) + "]";
    if (!row.is_array() || row.empty()) fail(rpath, "expected a nonempty array");
    if (i == 0) inst.n_items = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != inst.n_items)
      fail(rpath, "row length " + std::to_string(row.size()) +
                      " differs from first row length " +
                      std::to_string(inst.n_items));
    std::vector<long long> vals;
    vals.reserve(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::string vpath = rpath + "[" + std::to_string(j) + "]";
      long long v = to_int(row[j], vpath);
      if (v < 0) fail(vpath, "negative value");
      vals.push_back(v);
    }
    inst.values.push_back(std::move(vals));
  }
  if (auto errs = validate(inst); !errs.empty()) fail("values", errs.front());
  return inst;
}

inline SingleMindedInstance parse_single_minded(const json& doc) {
  SingleMindedInstance inst;
  inst.n_items =
      static_cast<int>(to_int(field(doc, "items", ""), "items"));
  if (inst.n_items < 1) fail("items", "must be >= 1");
  if (inst.n_items > kMaxBundleItems)
    fail("items", "exceeds cap of " + std::to_string(kMaxBundleItems));
  const json& bids = field(doc, "bids", "");
  if (!bids.is_array()) fail("bids", "expected an array");
  for (std::size_t b = 0; b < bids.size(); ++b) {
    std::string bpath = "bids[" + std::to_string(b) + "]";
    Bid bid;
    const json& bundle = field(bids[b], "bundle", bpath);
    if (!bundle.is_array() || bundle.empty())
      fail(bpath + ".bundle", "expected a nonempty array");
    for (std::size_t k = 0; k < bundle.size(); ++k) {
      std::string ipath = bpath + ".bundle[" + std::to_string(k) + "]";
      long long item = to_int(bundle[k], ipath);  // 1-based in the file
      if (item < 1 || item > inst.n_items)
        fail(ipath, "item index out of range");
      bid.bundle |= 1u << (item - 1);
    }
    bid.value = to_int(field(bids[b], "value", bpath), bpath + ".value");
    if (bid.value < 0) fail(bpath + ".value", "negative value");
    inst.bids.push_back(bid);
  }
  return inst;
}

}  // namespace detail

inline Instance parse_instance(const json& doc) {
  const json& type = detail::field(doc, "type", "");
  if (!type.is_string()) detail::fail("type", "expected a string");
  std::string tag = type.get<std::string>();
  if (tag == "matching") return detail::parse_matching(doc);
  if (tag == "single_minded") return detail::parse_single_minded(doc);
  detail::fail("type", "unknown instance type '" + tag + "'");
}

inline Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("document: ") + e.what());
  }
  return parse_instance(doc);
}

// String literals would otherwise be ambiguous between the json and
// std::string overloads.
inline Instance parse_instance(const char* text) {
  return parse_instance(std::string(text));
}

}  // namespace marketlab
