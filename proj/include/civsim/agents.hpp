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

// Tabular Q-learning agents and the opponent-learning-awareness (OLA)
// broadcast used by Hobbesian learners.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "civsim/civ_game.hpp"
#include "civsim/rng.hpp"
#include "civsim/sovereign_env.hpp"

namespace civsim {

struct Hyperparams {
  double alpha = 0.5;
  double gamma = 0.99;
  double eps0 = 0.9;
  double eps_decay = 0.9999;
  // Half-width of the uniform noise fresh Q-values are drawn from. Zero
  // leaves untouched actions tied, so greedy choices among them stay random.
  double q_init_noise = 0.0;

  void validate() const {
    auto unit = [](double x, const char* name) {
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    };
    unit(alpha, "alpha");
    unit(gamma, "gamma");
    unit(eps0, "eps0");
    unit(eps_decay, "eps_decay");
    if (!(q_init_noise >= 0.0)) throw ConfigError("q_init_noise must be non-negative");
  }

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// Exploration probability at global step t. No floor.
inline double epsilon_at(std::uint64_t t, const Hyperparams& hp) {
  return hp.eps0 * std::pow(hp.eps_decay, static_cast<double>(t));
}

enum class AgentKind : std::uint8_t { Random, QLearner, HQLearner };

constexpr std::string_view agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::Random: return "random";
    case AgentKind::QLearner: return "ql";
    case AgentKind::HQLearner: return "hql";
  }
  return "?";
}

inline AgentKind parse_agent_kind(std::string_view s) {
  if (s == "random") return AgentKind::Random;
  if (s == "ql") return AgentKind::QLearner;
  if (s == "hql") return AgentKind::HQLearner;
  throw ConfigError("unknown agent kind: " + std::string(s));
}

struct AgentMode {
  AgentKind kind = AgentKind::QLearner;
  bool ola = false;
  bool sovereign_update = false;

  static constexpr AgentMode for_kind(AgentKind k) {
    return {k, k == AgentKind::HQLearner, k == AgentKind::HQLearner};
  }

  bool learns() const { return kind != AgentKind::Random; }
};

// Q-values keyed by state, one slot per action. Rows are materialized on
// first touch, drawn uniformly from [-init_noise, init_noise] using the
// table's own stream.
class QTable {
 public:
  using Row = std::array<double, kNumActions>;

  QTable() : QTable(0) {}
  explicit QTable(std::uint64_t init_seed, double init_noise = 0.0)
      : init_rng_(init_seed), init_noise_(init_noise) {}

  Row& row(const StateKey& key) {
    auto it = rows_.find(key);
    if (it != rows_.end()) return it->second;
    Row fresh{};
    if (init_noise_ > 0.0) {
      for (double& v : fresh) v = uniform_real(init_rng_, -init_noise_, init_noise_);
    }
    return rows_.emplace(key, fresh).first->second;
  }

  double value(const StateKey& key, Action a) { return row(key)[action_index(a)]; }

  // Lookup without materialization.
  const Row* find(const StateKey& key) const {
    auto it = rows_.find(key);
    return it == rows_.end() ? nullptr : &it->second;
  }

  // Soft update Q <- (1 - alpha) Q + delta. The single mutation path, so
  // write_count() counts learning writes exactly.
  void blend(const StateKey& key, Action a, double alpha, double delta) {
    double& q = row(key)[action_index(a)];
    q = (1.0 - alpha) * q + delta;
    ++writes_;
  }

  void set(const StateKey& key, Action a, double v) { row(key)[action_index(a)] = v; }

  std::size_t size() const { return rows_.size(); }
  std::uint64_t write_count() const { return writes_; }

  const std::unordered_map<StateKey, Row>& rows() const { return rows_; }

  friend bool operator==(const QTable& x, const QTable& y) { return x.rows_ == y.rows_; }

 private:
  std::unordered_map<StateKey, Row> rows_;
  Rng init_rng_;
  double init_noise_ = 0.0;
  std::uint64_t writes_ = 0;
};

inline double max_value(QTable& q, const StateKey& key, const ActionList& legal) {
  const auto& row = q.row(key);
  double best = -std::numeric_limits<double>::infinity();
  for (Action a : legal) best = std::max(best, row[action_index(a)]);
  return best;
}

// Epsilon-greedy: explore uniformly over `legal` with probability eps,
// otherwise take an argmax with ties broken uniformly.
inline Action select_action(QTable& q, const StateKey& key, const ActionList& legal, double eps,
                            Rng& rng) {
  if (legal.empty()) throw ContractViolation("select_action on an empty legal set");
  if (uniform01(rng) < eps) return legal[uniform_index(rng, legal.size())];
  const auto& row = q.row(key);
  double best = -std::numeric_limits<double>::infinity();
  std::array<Action, kNumActions> ties{};
  std::size_t n_ties = 0;
  for (Action a : legal) {
    const double v = row[action_index(a)];
    if (v > best) {
      best = v;
      n_ties = 0;
    }
    if (v == best) ties[n_ties++] = a;
  }
  return n_ties == 1 ? ties[0] : ties[uniform_index(rng, n_ties)];
}

inline Action select_random(const ActionList& legal, Rng& rng) {
  if (legal.empty()) throw ContractViolation("select_random on an empty legal set");
  return legal[uniform_index(rng, legal.size())];
}

// Bellman soft update. Returns delta = alpha * (r + gamma * max Q(s', .)),
// the increment broadcast to observers under OLA.
inline double q_update(QTable& q, const StateKey& key, Action a, double r, const StateKey& next_key,
                       const ActionList& legal_next, const Hyperparams& hp) {
  const double target = r + hp.gamma * max_value(q, next_key, legal_next);
  const double delta = hp.alpha * target;
  q.blend(key, a, hp.alpha, delta);
  return delta;
}

// The state as seen by `observer` standing in the mover's shoes: positions
// and invaded flags of the two players swapped, move set to the observer.
inline GameState ola_state(const GameState& s, int observer, int mover) {
  GameState out = s;
  const int lo = position_of(s, observer);
  const int lm = position_of(s, mover);
  out.board[lo] = Cell::occupied(mover);
  out.board[lm] = Cell::occupied(observer);
  std::swap(out.invaded[observer], out.invaded[mover]);
  out.move = observer;
  return out;
}

inline HobbesState ola_state(const HobbesState& s, int observer, int mover) {
  return {ola_state(s.game, observer, mover), s.phase};
}

// Applies the mover's delta verbatim to every OLA-enabled observer at its
// swapped state.
inline void ola_broadcast(std::span<QTable> tables, std::span<const AgentMode> modes,
                          const HobbesState& s, Action a, double delta, int mover,
                          const Hyperparams& hp) {
  for (int i = 0; i < static_cast<int>(tables.size()); ++i) {
    if (i == mover || !modes[i].ola) continue;
    tables[i].blend(encode_hobbes_state(ola_state(s, i, mover)), a, hp.alpha, delta);
  }
}

// Text dump: "<key hex>\t<action>\t<value>" per entry, 17 significant
// digits, sorted lexicographically.
inline void dump_table(const QTable& q, std::ostream& os) {
  std::vector<std::string> lines;
  lines.reserve(q.size() * kNumActions);
  char buf[64];
  for (const auto& [key, row] : q.rows()) {
    const std::string hex = to_hex(key);
    for (Action a : kAllActions) {
      std::snprintf(buf, sizeof buf, "%.17g", row[action_index(a)]);
      lines.push_back(hex + '\t' + std::string(action_name(a)) + '\t' + buf);
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& line : lines) os << line << '\n';
}

// Rows are created zeroed, so entries absent from the dump read as zero.
inline QTable load_table(std::istream& is, std::uint64_t init_seed = 0) {
  QTable q(init_seed);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ConfigError("table line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    const std::string key = from_hex(std::string_view(line).substr(0, t1));
    const Action a = parse_action(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    double v = 0.0;
    const char* first = line.data() + t2 + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw ConfigError("table line " + std::to_string(lineno) + ": bad value");
    }
    q.set(key, a, v);
  }
  return q;
}

}  // namespace civsim
