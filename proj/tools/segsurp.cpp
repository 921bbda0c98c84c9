// Copyright 2026 The segsurp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// segsurp: train, evaluate, tokenize, report.
//
// Exit codes: 0 success, 1 stage failure, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "segsurp/config.hpp"
#include "segsurp/error.hpp"
#include "segsurp/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::string schemes;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string input;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--schemes", o.schemes, "comma-separated schemes (orthographic, bpe, morphological)");
  cmd->add_option("--seed", o.seed, "fold-assignment seed");
  cmd->add_option("--out", o.out, "output directory");
}

segsurp::RunConfig resolve_config(const Options& o) {
  auto cfg = segsurp::load_config(o.config);
  if (!o.schemes.empty()) {
    cfg.schemes = segsurp::parse_scheme_list(o.schemes);
    if (cfg.item_diff && (!cfg.has_scheme(cfg.item_diff->first) || !cfg.has_scheme(cfg.item_diff->second))) {
      cfg.item_diff.reset();
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out_dir = std::filesystem::absolute(o.out);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subword surprisal and reading-time evaluation"};
  app.require_subcommand(1);
  Options opts;

  auto* train = app.add_subcommand("train", "train one n-gram model per scheme");
  auto* evaluate = app.add_subcommand("evaluate", "compute surprisal, fit regressions, write the report");
  auto* tokenize = app.add_subcommand("tokenize", "print each input sentence under every scheme");
  auto* report = app.add_subcommand("report", "print summary tables from a finished run");
  for (auto* cmd : {train, evaluate, tokenize, report}) add_common(cmd, opts);
  tokenize->add_option("--input", opts.input, "text file, one sentence per line (default: stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::string stage = app.get_subcommands().front()->get_name();
  segsurp::RunConfig cfg;
  try {
    cfg = resolve_config(opts);
  } catch (const segsurp::ConfigError& e) {
    std::cerr << "segsurp " << stage << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "segsurp " << stage << ": " << e.what() << '\n';
    return 2;
  }

  try {
    if (stage == "train") {
      segsurp::run_train(cfg, std::cerr);
    } else if (stage == "evaluate") {
      segsurp::run_evaluate(cfg, std::cerr);
    } else if (stage == "tokenize") {
      if (opts.input.empty()) {
        segsurp::run_tokenize(cfg, std::cin, std::cout);
      } else {
        std::ifstream in(opts.input, std::ios::binary);
        if (!in) throw segsurp::Error("cannot open " + opts.input);
        segsurp::run_tokenize(cfg, in, std::cout);
      }
    } else {
      std::cout << segsurp::run_report(cfg);
    }
  } catch (const segsurp::ConfigError& e) {
    std::cerr << "segsurp " << stage << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "segsurp " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
