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

// Simulation loop, binned learning-curve metrics and multi-trial
// aggregation.

#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "civsim/agents.hpp"
#include "civsim/civ_game.hpp"
#include "civsim/rng.hpp"
#include "civsim/sovereign_env.hpp"

namespace civsim {

enum class Variant : std::uint8_t { Base, Sovereign };

constexpr std::string_view variant_name(Variant v) {
  return v == Variant::Base ? "base" : "sovereign";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "base") return Variant::Base;
  if (s == "sovereign") return Variant::Sovereign;
  throw ConfigError("unknown variant: " + std::string(s));
}

struct RunConfig {
  int board_size = 4;
  int players = 4;
  std::uint64_t total_steps = 250'000;
  std::uint64_t bin = 2'500;
  int trials = 3;
  std::vector<AgentKind> agents = std::vector<AgentKind>(4, AgentKind::HQLearner);
  RewardConfig rewards;
  Hyperparams hp;
  std::uint64_t seed = 0;
  Variant variant = Variant::Sovereign;

  void validate() const {
    if (players < 1 || players > kMaxPlayers) throw ConfigError("players must be in [1, 4]");
    if (board_size < 2) throw ConfigError("board_size must be at least 2");
    if (static_cast<int>(starting_corners(board_size, players).size()) != players ||
        board_size * board_size < players) {
      throw ConfigError("players do not fit on distinct corners");
    }
    if (bin == 0 || total_steps % bin != 0) throw ConfigError("bin must divide total_steps");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (static_cast<int>(agents.size()) != players) {
      throw ConfigError("need exactly one agent kind per player");
    }
    hp.validate();
  }
};

struct RunOptions {
  bool learn = true;
  std::optional<double> fixed_epsilon;  // overrides the annealing schedule
  bool keep_trace = true;
  bool record_keys = true;
};

// One turn: a player's move or a vote move.
struct TraceStep {
  std::uint64_t step = 0;
  int mover = 0;  // == players on a vote move
  bool is_vote = false;
  Action action = Action::Stay;  // player turns only
  std::array<Action, kMaxPlayers> ballot{};  // vote moves only
  std::array<Points, kMaxPlayers> rewards{};
  bool invasion = false;      // the move entered foreign territory
  bool vote_success = false;  // post-vote flag was +1
  int sampled_invaded = -1;   // invaded flags at a CI sampling point, else -1
  double delta = std::numeric_limits<double>::quiet_NaN();  // mover's Bellman increment
  StateKey key;  // pre-step state, when recorded

  Points total_reward() const {
    Points t = 0;
    for (Points r : rewards) t += r;
    return t;
  }
};

using ActionCounts = std::array<std::int64_t, kNumActions>;

struct MetricsBin {
  std::uint64_t bin_start = 0;
  std::uint64_t steps = 0;
  Points cs_sum = 0;
  double cs_avg = 0.0;
  std::int64_t invasions = 0;
  std::int64_t successful_defers = 0;
  std::vector<ActionCounts> action_counts;  // one row per player

  friend bool operator==(const MetricsBin&, const MetricsBin&) = default;
};

inline void fold_step(MetricsBin& bin, const TraceStep& st) {
  bin.steps += 1;
  bin.cs_sum += st.total_reward();
  if (st.sampled_invaded > 0) bin.invasions += st.sampled_invaded;
  if (st.is_vote) {
    if (st.vote_success) bin.successful_defers += 1;
  } else {
    bin.action_counts.at(st.mover)[action_index(st.action)] += 1;
  }
}

inline void finish_bin(MetricsBin& bin, std::uint64_t bin_size) {
  bin.cs_avg = static_cast<double>(bin.cs_sum) / static_cast<double>(bin_size);
}

inline MetricsBin bin_metrics(std::span<const TraceStep> slice, int players) {
  MetricsBin bin;
  bin.bin_start = slice.empty() ? 0 : slice.front().step;
  bin.action_counts.assign(players, ActionCounts{});
  for (const TraceStep& st : slice) fold_step(bin, st);
  finish_bin(bin, slice.size());
  return bin;
}

// Per-bin counts of each action taken by `player` on its own turns.
inline std::vector<ActionCounts> action_breakdown(std::span<const TraceStep> trace, int player,
                                                  std::uint64_t bin) {
  std::vector<ActionCounts> out;
  for (const TraceStep& st : trace) {
    const std::size_t b = st.step / bin;
    if (out.size() <= b) out.resize(b + 1, ActionCounts{});
    if (!st.is_vote && st.mover == player) out[b][action_index(st.action)] += 1;
  }
  return out;
}

struct GameResult {
  std::vector<TraceStep> trace;
  std::vector<MetricsBin> bins;
  std::vector<QTable> tables;
  std::array<Points, kMaxPlayers> player_totals{};
  std::array<double, kMaxPlayers> player_discounted{};
  std::array<std::int64_t, kMaxPlayers> moves{};
  std::array<std::int64_t, kMaxPlayers> invasions_committed{};
  Points total_paid = 0;
};

// One trial of the game, stepped one turn at a time.
class Simulation {
 public:
  Simulation(const RunConfig& cfg, std::uint64_t trial_seed, RunOptions opts = {},
             std::vector<QTable> tables = {})
      : cfg_(cfg), opts_(opts), tables_(std::move(tables)) {
    cfg_.validate();
    const int p = cfg_.players;
    state_ = initial_hobbes_state(cfg_.board_size, p);
    for (int i = 0; i < p; ++i) {
      modes_.push_back(AgentMode::for_kind(cfg_.agents[i]));
      rngs_.push_back(make_stream(trial_seed, static_cast<std::uint64_t>(i)));
    }
    if (tables_.empty()) {
      for (int i = 0; i < p; ++i) {
        tables_.emplace_back(derive_seed(trial_seed, kTableStreamBase + i), cfg_.hp.q_init_noise);
      }
    }
    if (static_cast<int>(tables_.size()) != p) throw ConfigError("need one Q-table per player");
  }

  const HobbesState& state() const { return state_; }
  std::vector<QTable>& tables() { return tables_; }
  const std::vector<QTable>& tables() const { return tables_; }
  std::span<const AgentMode> modes() const { return modes_; }
  std::uint64_t steps_taken() const { return t_; }

  double epsilon() const {
    return opts_.fixed_epsilon ? *opts_.fixed_epsilon : epsilon_at(t_, cfg_.hp);
  }

  StateKey key_of(const HobbesState& s) const { return encode_hobbes_state(s); }

  // Legal set for `player` at `s`. On the vote move every player has a ballot.
  ActionList legal_for(const HobbesState& s, int player) const {
    if (cfg_.variant == Variant::Base) return legal_actions(s.game, player);
    return hobbes_legal_actions(s, player);
  }

  TraceStep step() {
    TraceStep st = state_.at_vote() ? vote_step() : player_step();
    ++t_;
    return st;
  }

 private:
  ActionList legal_next_for(const HobbesState& next, int agent) const {
    return legal_for(next, next.at_vote() ? agent : next.game.move);
  }

  Action choose(int i, const StateKey& key, const ActionList& legal) {
    if (modes_[i].kind == AgentKind::Random) return select_random(legal, rngs_[i]);
    return select_action(tables_[i], key, legal, epsilon(), rngs_[i]);
  }

  int sample_invaded(const GameState& g) const {
    int n = 0;
    for (int i = 0; i < g.num_players; ++i) n += g.invaded[i] ? 1 : 0;
    return n;
  }

  TraceStep player_step() {
    const int i = state_.game.move;
    TraceStep st;
    st.step = t_;
    st.mover = i;
    StateKey key = key_of(state_);
    if (cfg_.variant == Variant::Base && i == 0) st.sampled_invaded = sample_invaded(state_.game);

    const ActionList legal = legal_for(state_, i);
    const Action a = choose(i, key, legal);
    st.action = a;
    st.invasion = is_invasion(state_.game, a);

    HobbesState next;
    Points r = 0;
    if (cfg_.variant == Variant::Base) {
      r = reward(state_.game, a, cfg_.rewards);
      next = {transition(state_.game, a), state_.phase};
    } else {
      r = hobbes_turn_reward(state_, a, cfg_.rewards);
      next = hobbes_transition(state_, a);
    }
    st.rewards[i] = r;

    if (opts_.learn && modes_[i].learns()) {
      const double delta = q_update(tables_[i], key, a, static_cast<double>(r), key_of(next),
                                    legal_next_for(next, i), cfg_.hp);
      st.delta = delta;
      if (modes_[i].ola) {
        ola_broadcast(std::span<QTable>(tables_), modes_, state_, a, delta, i, cfg_.hp);
      }
    }
    if (opts_.record_keys) st.key = std::move(key);
    state_ = std::move(next);
    return st;
  }

  TraceStep vote_step() {
    const int p = cfg_.players;
    TraceStep st;
    st.step = t_;
    st.mover = p;
    st.is_vote = true;
    st.sampled_invaded = sample_invaded(state_.game);
    StateKey key = key_of(state_);

    JointAction ballot(p);
    for (int j = 0; j < p; ++j) ballot[j] = choose(j, key, legal_for(state_, j));
    HobbesState next = hobbes_transition(state_, ballot);
    st.vote_success = next.game.sovereign_flag > 0;

    const StateKey next_key = key_of(next);
    for (int j = 0; j < p; ++j) {
      st.ballot[j] = ballot[j];
      st.rewards[j] = sovereign_reward(next.game, ballot[j], cfg_.rewards);
      if (!opts_.learn || !modes_[j].sovereign_update) continue;
      // Success: everyone learns as if it had deferred. Failure: only
      // defer-voters learn the penalty.
      if (st.vote_success || ballot[j] == Action::Defer) {
        q_update(tables_[j], key, Action::Defer, static_cast<double>(st.rewards[j]), next_key,
                 legal_next_for(next, j), cfg_.hp);
      }
    }
    if (opts_.record_keys) st.key = std::move(key);
    state_ = std::move(next);
    return st;
  }

  RunConfig cfg_;
  RunOptions opts_;
  HobbesState state_;
  std::vector<AgentMode> modes_;
  std::vector<Rng> rngs_;
  std::vector<QTable> tables_;
  std::uint64_t t_ = 0;
};

inline GameResult run_game(const RunConfig& cfg, std::uint64_t trial_seed, RunOptions opts = {},
                           std::vector<QTable> tables = {}) {
  Simulation sim(cfg, trial_seed, opts, std::move(tables));
  GameResult res;
  const int p = cfg.players;
  if (opts.keep_trace) res.trace.reserve(cfg.total_steps);
  MetricsBin current;
  double discount = 1.0;
  for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
    if (t % cfg.bin == 0) {
      current = MetricsBin{};
      current.bin_start = t;
      current.action_counts.assign(p, ActionCounts{});
    }
    TraceStep st = sim.step();
    fold_step(current, st);
    for (int i = 0; i < p; ++i) {
      res.player_totals[i] += st.rewards[i];
      res.player_discounted[i] += discount * static_cast<double>(st.rewards[i]);
    }
    discount *= cfg.hp.gamma;
    res.total_paid += st.total_reward();
    if (!st.is_vote) {
      res.moves[st.mover] += 1;
      if (st.invasion) res.invasions_committed[st.mover] += 1;
    }
    if ((t + 1) % cfg.bin == 0) {
      finish_bin(current, cfg.bin);
      res.bins.push_back(std::move(current));
    }
    if (opts.keep_trace) res.trace.push_back(std::move(st));
  }
  res.tables = std::move(sim.tables());
  return res;
}

struct Spread {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Spread&, const Spread&) = default;
};

inline Spread spread_of(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const double med = n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  return {med, xs.front(), xs.back()};
}

struct BinAggregate {
  std::uint64_t bin_start = 0;
  Spread cs_sum;
  Spread cs_avg;
  Spread invasions;
  Spread successful_defers;

  friend bool operator==(const BinAggregate&, const BinAggregate&) = default;
};

struct TrialSummary {
  std::vector<std::vector<MetricsBin>> trials;  // indexed by trial
  std::vector<BinAggregate> aggregate;
};

// Pure fold over per-trial bin series; the result does not depend on the
// order trials finished in.
inline TrialSummary summarize(std::vector<std::vector<MetricsBin>> trials) {
  TrialSummary out;
  out.trials = std::move(trials);
  if (out.trials.empty()) return out;
  const std::size_t nbins = out.trials.front().size();
  for (const auto& t : out.trials) {
    if (t.size() != nbins) throw ContractViolation("trials disagree on bin boundaries");
  }
  for (std::size_t b = 0; b < nbins; ++b) {
    std::vector<double> sum, avg, inv, sd;
    for (const auto& t : out.trials) {
      if (t[b].bin_start != out.trials.front()[b].bin_start) {
        throw ContractViolation("trials disagree on bin boundaries");
      }
      sum.push_back(static_cast<double>(t[b].cs_sum));
      avg.push_back(t[b].cs_avg);
      inv.push_back(static_cast<double>(t[b].invasions));
      sd.push_back(static_cast<double>(t[b].successful_defers));
    }
    out.aggregate.push_back({out.trials.front()[b].bin_start, spread_of(sum), spread_of(avg),
                             spread_of(inv), spread_of(sd)});
  }
  return out;
}

inline std::uint64_t trial_seed(std::uint64_t master, int trial) {
  return master + static_cast<std::uint64_t>(trial);
}

inline TrialSummary run_trials(const RunConfig& cfg, bool parallel = true) {
  cfg.validate();
  RunOptions opts;
  opts.keep_trace = false;
  opts.record_keys = false;
  std::vector<std::vector<MetricsBin>> bins(cfg.trials);
  if (parallel && cfg.trials > 1) {
    std::vector<std::future<std::vector<MetricsBin>>> jobs;
    for (int k = 0; k < cfg.trials; ++k) {
      jobs.push_back(std::async(std::launch::async, [&cfg, opts, k] {
        return run_game(cfg, trial_seed(cfg.seed, k), opts).bins;
      }));
    }
    for (int k = 0; k < cfg.trials; ++k) bins[k] = jobs[k].get();
  } else {
    for (int k = 0; k < cfg.trials; ++k) bins[k] = run_game(cfg, trial_seed(cfg.seed, k), opts).bins;
  }
  return summarize(std::move(bins));
}

}  // namespace civsim
