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

// Flat key=value configuration files. One pair per line, '#' starts a
// comment, unknown keys are rejected, missing keys keep their defaults.

#pragma once

#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "civsim/csv.hpp"
#include "civsim/experiment.hpp"
#include "civsim/matrix_analysis.hpp"

namespace civsim {

struct AppConfig {
  RunConfig run;

  // Matrix analysis. Training reuses total_steps and the game settings
  // above; matchups are played on `matrix_players` seats.
  int matrix_players = 2;
  int matrix_trials = 15;
  std::uint64_t matchup_steps = 100'000;
  PolicyThresholds thresholds;
  bool discounted_payoff = false;
  bool require_policy_classes = true;

  MatrixConfig matrix_config() const {
    MatrixConfig mc;
    mc.game = run;
    mc.game.players = matrix_players;
    mc.game.agents.assign(matrix_players, AgentKind::HQLearner);
    mc.game.variant = Variant::Sovereign;
    mc.training_steps = run.total_steps;
    mc.matchup_steps = matchup_steps;
    mc.trials = matrix_trials;
    mc.thresholds = thresholds;
    mc.discounted = discounted_payoff;
    mc.require_classes = require_policy_classes;
    mc.seed = run.seed;
    return mc;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("bad numeric value '" + std::string(v) + "'");
  }
  return out;
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean value '" + std::string(v) + "'");
}

}  // namespace detail

// Parses and validates. Errors carry the offending line number and text.
inline AppConfig parse_config(std::istream& is) {
  AppConfig cfg;
  std::optional<int> players;
  std::map<int, AgentKind> agent_keys;

  using Setter = std::function<void(std::string_view)>;
  auto& run = cfg.run;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"board_size", [&](auto v) { run.board_size = detail::parse_number<int>(v); }},
      {"players", [&](auto v) { players = detail::parse_number<int>(v); }},
      {"total_steps", [&](auto v) { run.total_steps = detail::parse_number<std::uint64_t>(v); }},
      {"bin", [&](auto v) { run.bin = detail::parse_number<std::uint64_t>(v); }},
      {"trials", [&](auto v) { run.trials = detail::parse_number<int>(v); }},
      {"seed", [&](auto v) { run.seed = detail::parse_number<std::uint64_t>(v); }},
      {"variant", [&](auto v) { run.variant = parse_variant(v); }},
      {"agent0", [&](auto v) { agent_keys[0] = parse_agent_kind(v); }},
      {"agent1", [&](auto v) { agent_keys[1] = parse_agent_kind(v); }},
      {"agent2", [&](auto v) { agent_keys[2] = parse_agent_kind(v); }},
      {"agent3", [&](auto v) { agent_keys[3] = parse_agent_kind(v); }},
      {"invasion_bonus", [&](auto v) { run.rewards.invasion_bonus = detail::parse_number<Points>(v); }},
      {"invasion_penalty", [&](auto v) { run.rewards.invasion_penalty = detail::parse_number<Points>(v); }},
      {"vote_bonus", [&](auto v) { run.rewards.vote_bonus = detail::parse_number<Points>(v); }},
      {"vote_penalty", [&](auto v) { run.rewards.vote_penalty = detail::parse_number<Points>(v); }},
      {"alpha", [&](auto v) { run.hp.alpha = detail::parse_number<double>(v); }},
      {"gamma", [&](auto v) { run.hp.gamma = detail::parse_number<double>(v); }},
      {"eps0", [&](auto v) { run.hp.eps0 = detail::parse_number<double>(v); }},
      {"eps_decay", [&](auto v) { run.hp.eps_decay = detail::parse_number<double>(v); }},
      {"q_init_noise", [&](auto v) { run.hp.q_init_noise = detail::parse_number<double>(v); }},
      {"alpha_c", [&](auto v) { cfg.thresholds.alpha_c = detail::parse_number<double>(v); }},
      {"alpha_d", [&](auto v) { cfg.thresholds.alpha_d = detail::parse_number<double>(v); }},
      {"matrix_players", [&](auto v) { cfg.matrix_players = detail::parse_number<int>(v); }},
      {"matrix_trials", [&](auto v) { cfg.matrix_trials = detail::parse_number<int>(v); }},
      {"matchup_steps", [&](auto v) { cfg.matchup_steps = detail::parse_number<std::uint64_t>(v); }},
      {"discounted_payoff", [&](auto v) { cfg.discounted_payoff = detail::parse_bool(v); }},
      {"require_policy_classes", [&](auto v) { cfg.require_policy_classes = detail::parse_bool(v); }},
  };

  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto where = "line " + std::to_string(lineno) + " '" + raw + "': ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key=value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    try {
      it->second(value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }

  if (players) run.players = *players;
  run.agents.assign(run.players, AgentKind::HQLearner);
  for (const auto& [idx, kind] : agent_keys) {
    if (idx >= run.players) {
      throw ConfigError("agent" + std::to_string(idx) + " given but players=" +
                        std::to_string(run.players));
    }
    run.agents[idx] = kind;
  }
  run.validate();
  cfg.thresholds.validate();
  if (cfg.matrix_trials < 1) throw ConfigError("matrix_trials must be at least 1");
  if (cfg.matrix_players < 2 || cfg.matrix_players > kMaxPlayers) {
    throw ConfigError("matrix_players must be in [2, 4]");
  }
  if (cfg.matchup_steps == 0) throw ConfigError("matchup_steps must be positive");
  return cfg;
}

inline AppConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

// Resolved configuration in the same key=value syntax.
inline void write_config(std::ostream& os, const AppConfig& cfg) {
  const RunConfig& r = cfg.run;
  os << "board_size=" << r.board_size << '\n'
     << "players=" << r.players << '\n'
     << "total_steps=" << r.total_steps << '\n'
     << "bin=" << r.bin << '\n'
     << "trials=" << r.trials << '\n'
     << "seed=" << r.seed << '\n'
     << "variant=" << variant_name(r.variant) << '\n';
  for (int i = 0; i < r.players; ++i) os << "agent" << i << '=' << agent_kind_name(r.agents[i]) << '\n';
  os << "invasion_bonus=" << r.rewards.invasion_bonus << '\n'
     << "invasion_penalty=" << r.rewards.invasion_penalty << '\n'
     << "vote_bonus=" << r.rewards.vote_bonus << '\n'
     << "vote_penalty=" << r.rewards.vote_penalty << '\n'
     << "alpha=" << format_double(r.hp.alpha) << '\n'
     << "gamma=" << format_double(r.hp.gamma) << '\n'
     << "eps0=" << format_double(r.hp.eps0) << '\n'
     << "eps_decay=" << format_double(r.hp.eps_decay) << '\n'
     << "q_init_noise=" << format_double(r.hp.q_init_noise) << '\n'
     << "alpha_c=" << format_double(cfg.thresholds.alpha_c) << '\n'
     << "alpha_d=" << format_double(cfg.thresholds.alpha_d) << '\n'
     << "matrix_players=" << cfg.matrix_players << '\n'
     << "matrix_trials=" << cfg.matrix_trials << '\n'
     << "matchup_steps=" << cfg.matchup_steps << '\n'
     << "discounted_payoff=" << (cfg.discounted_payoff ? "true" : "false") << '\n'
     << "require_policy_classes=" << (cfg.require_policy_classes ? "true" : "false") << '\n';
}

}  // namespace civsim
