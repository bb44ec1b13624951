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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "marketlab/marketlab.hpp"
#include "marketlab/repro_cases_data.hpp"

namespace {

using namespace marketlab;

// Exit codes: 0 ok, 1 domain/validation error, 2 repro mismatch,
// 3 budget exceeded.
constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitBudget = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string assignment_table(const MatchingInstance& inst, const Matching& mu) {
  std::string out;
  for (int i = 0; i < inst.n_buyers; ++i) {
    if (i > 0) out += ", ";
    out += buyer_label(i);
    out += "→";
    if (mu.matched(i)) out += item_label(mu.item_of[i]);
    else out += "-";
  }
  return out;
}

std::string winners_table(const BundleAllocation& alloc) {
  if (alloc.winners.empty()) return "winners: none";
  std::string out = "winners: ";
  for (std::size_t k = 0; k < alloc.winners.size(); ++k) {
    if (k > 0) out += ", ";
    out += buyer_label(alloc.winners[k]);
  }
  return out;
}

std::string rational_list_table(const std::vector<Rational>& xs) {
  std::string out = "(";
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k > 0) out += ", ";
    out += xs[k].str();
  }
  return out + ")";
}

json allocation_json(const Instance& inst, const Allocation& alloc) {
  json out;
  if (const auto* mu = std::get_if<Matching>(&alloc)) {
    out["type"] = "matching";
    json assign = json::array();
    for (int item : mu->item_of) {
      if (item == Matching::kUnmatched) assign.push_back(nullptr);
      else assign.push_back(item + 1);
    }
    out["assignment"] = assign;
  } else {
    out["type"] = "single_minded";
    json winners = json::array();
    for (int b : std::get<BundleAllocation>(alloc).winners)
      winners.push_back(b + 1);
    out["winners"] = winners;
  }
  out["welfare"] = allocation_value(inst, alloc);
  return out;
}

int cmd_solve(const std::string& file, const std::string& format) {
  Instance inst = parse_instance(read_input(file));
  WelfareResult res = max_welfare(inst);
  if (format == "json") {
    std::cout << allocation_json(inst, res.allocation).dump() << "\n";
    return kExitOk;
  }
  std::cout << "welfare " << res.best_value;
  if (const auto* mu = std::get_if<Matching>(&res.allocation))
    std::cout << "; " << assignment_table(std::get<MatchingInstance>(inst), *mu);
  else
    std::cout << "; " << winners_table(std::get<BundleAllocation>(res.allocation));
  std::cout << "\n";
  return kExitOk;
}

int cmd_mechanism(const std::string& file, const std::string& mech_name,
                  const std::string& format) {
  Instance inst = parse_instance(read_input(file));
  Mechanism mech = mechanism_from_string(mech_name);

  Allocation alloc;
  std::vector<Rational> amounts;  // per buyer (vcg) or per item (walrasian)
  Rational revenue;
  if (mech == Mechanism::Vcg) {
    VcgOutcome out = run_vcg(inst);
    alloc = out.outcome.allocation;
    amounts = out.outcome.payments;
    revenue = out.outcome.revenue;
  } else {
    const auto* m = std::get_if<MatchingInstance>(&inst);
    if (m == nullptr)
      throw std::invalid_argument(
          "walrasian mechanisms require a matching instance");
    WalrasianSolution sol = mech == Mechanism::MinWalrasian
                                ? min_walrasian(*m)
                                : max_walrasian(*m);
    alloc = sol.matching;
    amounts = sol.prices;
    revenue = price_revenue(sol.prices);
  }

  const char* amounts_key = mech == Mechanism::Vcg ? "payments" : "prices";
  if (format == "json") {
    json out = allocation_json(inst, alloc);
    out["mechanism"] = to_string(mech);
    json xs = json::array();
    for (const Rational& r : amounts) xs.push_back(rational_to_json(r));
    out[amounts_key] = xs;
    out["revenue"] = rational_to_json(revenue);
    std::cout << out.dump() << "\n";
    return kExitOk;
  }
  std::cout << "welfare " << allocation_value(inst, alloc);
  if (const auto* mu = std::get_if<Matching>(&alloc))
    std::cout << "; " << assignment_table(std::get<MatchingInstance>(inst), *mu);
  else
    std::cout << "; " << winners_table(std::get<BundleAllocation>(alloc));
  std::cout << "\n"
            << amounts_key << ": " << rational_list_table(amounts) << "\n"
            << "revenue: " << revenue.str() << "\n";
  return kExitOk;
}

int cmd_probe(const std::string& grid, const std::string& mech_name,
              bool random, std::uint64_t seed, long long trials,
              long long budget) {
  GridSpec spec = parse_grid_spec(grid);
  Mechanism mech = mechanism_from_string(mech_name);
  SearchMode mode = random ? SearchMode::random_trials(seed, trials)
                           : SearchMode::exhaustive();
  std::vector<MonotonicityWitness> found = search(spec, mech, mode, budget);
  for (const MonotonicityWitness& w : found)
    std::cout << to_json(w).dump() << "\n";
  std::cerr << "witnesses: " << found.size() << "\n";
  return kExitOk;
}

std::string mechanism_display(const std::string& name) {
  if (name == "vcg") return "VCG";
  if (name == "min-walrasian") return "min-Walrasian";
  if (name == "max-walrasian") return "max-Walrasian";
  return name;
}

int cmd_repro(const std::string& case_id, const std::string& format) {
  std::vector<ReproCase> cases = load_repro_cases(kReproCasesJson);
  std::vector<ReproCase> selected;
  for (const ReproCase& c : cases)
    if (case_id == "all" || c.id == case_id) selected.push_back(c);
  if (selected.empty())
    throw std::invalid_argument("unknown repro case: " + case_id);

  bool all_pass = true;
  json report;
  report["cases"] = json::array();
  for (const ReproCase& c : selected) {
    ReproOutcome out = run_repro_case(c);
    all_pass = all_pass && out.pass;
    if (format == "json") {
      json jcase;
      jcase["id"] = out.id;
      jcase["pass"] = out.pass;
      jcase["checks"] = json::array();
      for (const ReproLine& line : out.lines) {
        json jline;
        jline["mechanism"] = line.mechanism;
        jline["expected_before"] = rational_to_json(line.expected_before);
        jline["expected_after"] = rational_to_json(line.expected_after);
        jline["actual_before"] = rational_to_json(line.actual_before);
        jline["actual_after"] = rational_to_json(line.actual_after);
        jline["monotone_checked"] = line.monotone_checked;
        jline["pass"] = line.pass;
        jcase["checks"].push_back(jline);
      }
      report["cases"].push_back(jcase);
      continue;
    }
    for (const ReproLine& line : out.lines) {
      std::cout << out.id << " " << mechanism_display(line.mechanism)
                << " revenue: " << line.expected_before.str() << " → "
                << line.expected_after.str();
      if (line.pass) {
        std::cout << " PASS";
        if (line.monotone_checked) std::cout << " (monotone)";
      } else {
        std::cout << " FAIL (got " << line.actual_before.str() << " → "
                  << line.actual_after.str() << ")";
      }
      std::cout << "\n";
    }
  }
  if (format == "json") {
    report["pass"] = all_pass;
    std::cout << report.dump() << "\n";
  }
  return all_pass ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact mechanisms and revenue probes for small markets"};
  app.require_subcommand(1);

  std::string format = "table";
  std::string file = "-";
  std::string mech_name = "vcg";
  std::string grid;
  std::string case_id = "all";
  bool random = false;
  std::uint64_t seed = 0;
  long long trials = 1000;
  long long budget = 10'000'000;

  CLI::App* solve = app.add_subcommand("solve", "compute a welfare-optimal allocation");
  solve->add_option("file", file, "instance file (JSON), - for stdin");
  solve->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "table"}));

  CLI::App* mechanism =
      app.add_subcommand("mechanism", "run a mechanism and report payments and revenue");
  mechanism->add_option("file", file, "instance file (JSON), - for stdin");
  mechanism->add_option("--mechanism", mech_name, "vcg | min-walrasian | max-walrasian")
      ->required();
  mechanism->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "table"}));

  CLI::App* probe =
      app.add_subcommand("probe", "search perturbations for revenue drops");
  probe->add_option("--grid", grid,
                    "grid spec, e.g. n=2,m=2,vmax=2,dmax=2[,class=matching]")
      ->required();
  probe->add_option("--mechanism", mech_name, "vcg | min-walrasian | max-walrasian")
      ->required();
  probe->add_flag("--random", random, "sample the grid instead of sweeping it");
  probe->add_option("--seed", seed, "seed for --random");
  probe->add_option("--trials", trials, "trial count for --random");
  probe->add_option("--budget", budget, "evaluation budget");
  probe->add_option("--format", format, "output format (witnesses are JSON lines)")
      ->check(CLI::IsMember({"json", "table"}));

  CLI::App* repro = app.add_subcommand("repro", "re-run the golden before/after cases");
  repro->add_option("case", case_id, "am06 | matching-min | matching-max | hr15-relaxed | all");
  repro->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(file, format);
    if (mechanism->parsed()) return cmd_mechanism(file, mech_name, format);
    if (probe->parsed())
      return cmd_probe(grid, mech_name, random, seed, trials, budget);
    if (repro->parsed()) return cmd_repro(case_id, format);
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::overflow_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}
