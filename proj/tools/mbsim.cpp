// Copyright 2026 The mbsim Authors
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

// mbsim <experiment> --config <file> [--out <dir>] [--seed N] [--plots]
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 capacity error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mbsim/experiments.hpp"
#include "mbsim/plot.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Majorana braiding simulation experiments"};
  std::string experiment, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool plots = false, quiet = false;
  app.add_option("experiment", experiment, "move, braid, track, protect, errorsweep, qpt or pulse_compile")
      ->required();
  app.add_option("--config,-c", config_path, "JSON config file")->required();
  app.add_option("--out,-o", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 for all cores");
  app.add_flag("--plots", plots, "write SVG plots next to the CSV");
  app.add_flag("--quiet,-q", quiet, "no summary on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    mbsim::ExperimentConfig cfg = mbsim::load_config(config_path);
    if (cfg.experiment != experiment)
      throw mbsim::ValidationError("config is for '" + cfg.experiment + "', not '" + experiment + "'");
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.validate();
    mbsim::RunRecord rec = mbsim::run_experiment(cfg);
    mbsim::write_record(rec, cfg.out);
    if (plots)
      for (auto& spec : mbsim::default_plots(rec.experiment)) {
        std::string name = spec.y.front() + "_vs_" + spec.x + ".svg";
        std::ofstream(std::filesystem::path(cfg.out) / name) << mbsim::svg_plot(rec, spec);
      }
    if (!quiet)
      std::cout << rec.experiment << ": " << rec.rows.size() << " rows, hash " << rec.hash << ", "
                << mbsim::fmt(rec.wall_time_s) << " s -> " << cfg.out << "\n"
                << rec.summary.dump(2) << "\n";
    return 0;
  } catch (const mbsim::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const mbsim::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mbsim::NotSupportedError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
