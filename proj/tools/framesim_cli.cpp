// Copyright 2026 The framesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "framesim/harness.hpp"

using framesim::RunConfig;

namespace {

struct Flags {
  std::uint64_t seed = 7;
  long long trials = 100000;
  int parties = 3;
  std::string restriction = "full";
  std::string out;
  std::string format = "json";
  bool no_timestamp = false;
  std::string config;
  unsigned threads = 0;
  bool refbits = false;
  double p_same = 0.5;
  int cycles = 100;
  int networks = 0;
  bool cheat = false;
  std::string resource = "all";
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--trials", f.trials, "Monte Carlo trials");
  sub->add_option("--parties", f.parties, "Number of parties");
  sub->add_option("--restriction", f.restriction, "Frame restriction")->check(CLI::IsMember({"full", "zrot"}));
  sub->add_option("--out", f.out, "Write the report to this path instead of stdout");
  sub->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_flag("--no-timestamp", f.no_timestamp, "Omit the timestamp field");
  sub->add_option("--config", f.config, "JSON run configuration; explicit flags override it");
  sub->add_option("--threads", f.threads, "Worker threads for sampling (0 = hardware)");
}

RunConfig resolve(const CLI::App& sub, const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw framesim::InputError("cannot read config '" + f.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw framesim::InputError(std::string("config is not valid JSON: ") + e.what());
    }
    c = framesim::config_from_json(j);
  }
  c.command = sub.get_name();
  auto given = [&](const char* name) {
    const CLI::Option* o = sub.get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (given("--seed") || f.config.empty()) c.seed = f.seed;
  if (given("--trials")) c.trials = f.trials;
  if (given("--parties")) c.parties = f.parties;
  if (given("--restriction")) c.restriction = framesim::restriction_from_string(f.restriction);
  if (given("--format")) c.format = f.format;
  if (given("--threads")) c.threads = f.threads;
  if (given("--refbits")) c.refbits = true;
  if (given("--p-same")) c.p_same = f.p_same;
  if (given("--cycles")) c.cycles = f.cycles;
  if (given("--networks")) c.networks = f.networks;
  if (given("--cheat")) c.cheat = true;
  if (given("--resource")) c.resource = f.resource;
  c.out = f.out;
  c.timestamp = !f.no_timestamp;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-frame-free quantum network simulator"};
  app.require_subcommand(1);
  Flags f;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, f);
    return s;
  };
  CLI::App* observables = sub("observables", "Frame and channel gauge checks of the basic observables");
  CLI::App* wilson = sub("wilson", "Wilson loop invariance suite");
  CLI::App* povm = sub("povm", "Gauge-invariant POVM suite");
  CLI::App* resources = sub("resources", "Ebit, GHZ and local-unitary equivalence checks");
  CLI::App* hiding = sub("datahiding", "Data hiding: forwarding and refbit unlocks");
  CLI::App* dense = sub("superdense", "Superdense coding without a shared frame");
  CLI::App* commit = sub("commit", "Bit commitment and the cheating opening");
  for (CLI::App* s : {observables, wilson, povm}) s->add_option("--cycles", f.cycles, "Random transforms per check");
  resources->add_option("--networks", f.networks, "Random networks for the GHZ class check");
  hiding->add_option("--networks", f.networks, "Random networks for the forwarding unlock");
  hiding->add_flag("--refbits", f.refbits, "Also run the refbit unlock");
  hiding->add_option("--p-same", f.p_same, "Probability of the same-state refbit configuration");
  dense->add_option("--resource", f.resource, "Resource level")->check(CLI::IsMember({"all", "none", "pair", "refbits"}));
  commit->add_flag("--cheat", f.cheat, "Also run Alice's cheating opening");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const CLI::App* chosen = app.get_subcommands().front();

  framesim::Report report;
  RunConfig cfg;
  try {
    cfg = resolve(*chosen, f);
    report = framesim::run(cfg);
  } catch (const framesim::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    if (cfg.out.empty())
      std::cout << framesim::report_text(report, cfg.format);
    else
      framesim::report_write(report, cfg.out, cfg.format);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  for (const auto& q : report.quantities)
    if (!q.pass) std::cerr << "FAIL " << q.name << "\n";
  return report.all_pass() ? 0 : 1;
}
