// Copyright 2026 The civsim Authors
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

// civsim: run experiments, estimate payoff matrices and plot results.
//
// Exit codes:
//   0  success
//   2  bad configuration, bad arguments or malformed CSV
//   3  file system or IO failure
//   4  policy classification precondition failure (analyze)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "civsim/civsim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitClassification = 4;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
};

civsim::AppConfig load_config(const GlobalOptions& g) {
  civsim::AppConfig cfg;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    if (!in) throw IoError("cannot read config file " + g.config_path);
    cfg = civsim::parse_config(in);
  }
  if (g.seed) cfg.run.seed = *g.seed;
  return cfg;
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << contents;
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

int cmd_simulate(const GlobalOptions& g) {
  const civsim::AppConfig cfg = load_config(g);
  const fs::path dir = prepare_out_dir(g.out);
  const civsim::TrialSummary summary = civsim::run_trials(cfg.run);

  std::ostringstream curve, actions, manifest;
  civsim::write_learning_curve(curve, summary.trials);
  civsim::write_actions(actions, summary.trials);
  civsim::write_config(manifest, cfg);
  manifest << "# trial k uses seed " << cfg.run.seed << " + k\n";

  write_file(dir / "learning_curve.csv", curve.str());
  write_file(dir / "actions.csv", actions.str());
  write_file(dir / "run_manifest.txt", manifest.str());
  std::cout << "wrote " << summary.trials.size() << " trials x " << summary.aggregate.size()
            << " bins to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const GlobalOptions& g) {
  const civsim::AppConfig cfg = load_config(g);
  const fs::path dir = prepare_out_dir(g.out);
  const civsim::MatrixConfig mc = cfg.matrix_config();
  const std::vector<civsim::MatrixTrial> trials = civsim::run_matrix_trials(mc);

  std::ostringstream csv;
  civsim::write_matrix(csv, trials);
  write_file(dir / "matrix.csv", csv.str());

  int tally[4] = {0, 0, 0, 0};
  std::vector<civsim::PayoffMatrix> ms;
  bool failed = false;
  for (const civsim::MatrixTrial& t : trials) {
    if (t.estimate) {
      ++tally[static_cast<int>(t.estimate->matrix.classification)];
      ms.push_back(t.estimate->matrix);
    }
    if (t.failure) {
      failed = true;
      std::cerr << "trial " << t.trial << ": alpha_cooperator=" << t.failure->alpha_cooperator
                << " alpha_defector=" << t.failure->alpha_defector << " (" << t.failure->what()
                << ")\n";
    }
  }
  const civsim::MatrixAggregate agg = civsim::aggregate_matrices(ms);
  for (auto c : {civsim::DilemmaClass::StagHunt, civsim::DilemmaClass::PrisonersDilemma,
                 civsim::DilemmaClass::OtherDilemma, civsim::DilemmaClass::NotSocialDilemma}) {
    std::cout << civsim::dilemma_name(c) << ": " << tally[static_cast<int>(c)] << "\n";
  }
  std::cout << "stag_hunt_fraction: " << civsim::format_double(agg.stag_hunt_fraction) << "\n";
  return failed ? kExitClassification : kExitOk;
}

int cmd_plot(const GlobalOptions& g, const std::string& csv_path, int player) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot read " + csv_path);
  const civsim::CsvTable table = civsim::read_csv(in);
  const std::string svg = civsim::plot_csv(table, player);
  if (g.out.empty()) throw civsim::ConfigError("plot needs --out <file.svg>");
  const fs::path out(g.out);
  if (out.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + out.parent_path().string());
  }
  write_file(out, svg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Civilization Game simulator and payoff-matrix analysis"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--out", g.out, "output directory (simulate, analyze) or SVG file (plot)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed, overrides the config");

  auto* simulate = app.add_subcommand("simulate", "run trials and write learning curves");
  auto* analyze = app.add_subcommand("analyze", "estimate the empirical payoff matrix");
  auto* plot = app.add_subcommand("plot", "render a CSV as an SVG line chart");
  std::string csv_path;
  int player = 0;
  plot->add_option("csv", csv_path, "learning_curve.csv or actions.csv")->required();
  plot->add_option("--player", player, "player whose actions are plotted (actions.csv)");
  for (auto* sub : {simulate, analyze, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*simulate) return cmd_simulate(g);
    if (*analyze) return cmd_analyze(g);
    return cmd_plot(g, csv_path, player);
  } catch (const civsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const civsim::CsvError& e) {
    std::cerr << "csv error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}
