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

// The base Civilization Game: a turn-based gridworld where players claim
// territory by walking over it, farm the territory they hold, and may invade
// the territory of others for a bonus while the victim pays a penalty.
//
// Everything here is a pure function over GameState values.

#pragma once

#include <array>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace civsim {

inline constexpr int kMaxPlayers = 4;
inline constexpr int kNumActions = 6;

using Points = std::int64_t;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a caller breaks a documented precondition (illegal action,
// missing ballot, empty legal set).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Action : std::uint8_t { Up, Down, Left, Right, Stay, Defer };

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay, Action::Defer};

inline constexpr std::array<Action, 4> kMovementActions = {Action::Up, Action::Down,
                                                           Action::Left, Action::Right};

constexpr int action_index(Action a) { return static_cast<int>(a); }

constexpr std::string_view action_name(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::Stay: return "stay";
    case Action::Defer: return "defer";
  }
  return "?";
}

inline Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  throw ConfigError("unknown action name: " + std::string(name));
}

inline std::ostream& operator<<(std::ostream& os, Action a) { return os << action_name(a); }

using ActionList = std::vector<Action>;

struct Cell {
  enum class Kind : std::uint8_t { Unowned, Territory, Occupied };

  Kind kind = Kind::Unowned;
  std::uint8_t player = 0;  // meaningful for Territory and Occupied only

  static constexpr Cell unowned() { return {}; }
  static constexpr Cell territory(int owner) {
    return {Kind::Territory, static_cast<std::uint8_t>(owner)};
  }
  static constexpr Cell occupied(int who) {
    return {Kind::Occupied, static_cast<std::uint8_t>(who)};
  }

  constexpr bool is_territory_of(int i) const { return kind == Kind::Territory && player == i; }
  constexpr bool is_occupied() const { return kind == Kind::Occupied; }

  friend constexpr bool operator==(const Cell&, const Cell&) = default;
};

struct RewardConfig {
  Points invasion_bonus = 10;
  Points invasion_penalty = -25;
  Points vote_bonus = 15;
  Points vote_penalty = -10;

  // Returns a human readable warning when the fear condition
  // |penalty| > bonus does not hold. Sweeps vary these on purpose, so this
  // never rejects.
  std::string fear_warning() const {
    if (invasion_penalty < 0 && -invasion_penalty > invasion_bonus) return {};
    return "invasion penalty magnitude does not exceed the invasion bonus";
  }

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

struct GameState {
  int board_size = 0;
  int num_players = 0;
  std::vector<Cell> board;  // row-major, board_size^2 cells
  std::array<bool, kMaxPlayers> invaded{};  // first num_players entries used
  int move = 0;
  int sovereign_flag = 0;  // -1, 0 or +1

  int cell_count() const { return board_size * board_size; }

  friend bool operator==(const GameState&, const GameState&) = default;
};

inline int position_of(const GameState& s, int player) {
  for (int l = 0; l < s.cell_count(); ++l) {
    const Cell& c = s.board[l];
    if (c.is_occupied() && c.player == player) return l;
  }
  throw ContractViolation("player " + std::to_string(player) + " is not on the board");
}

// Corner order: top-left, top-right, bottom-left, bottom-right. Two players
// take the diagonal corners.
inline std::vector<int> starting_corners(int b, int p) {
  const int n = b * b;
  if (p == 2) return {0, n - 1};
  std::vector<int> corners = {0, b - 1, b * (b - 1), n - 1};
  corners.resize(p);
  return corners;
}

inline GameState initial_state(int b, int p) {
  if (p < 1 || p > kMaxPlayers) {
    throw ConfigError("player count must be in [1, 4], got " + std::to_string(p));
  }
  if (b < 2) throw ConfigError("board size must be at least 2, got " + std::to_string(b));
  GameState s;
  s.board_size = b;
  s.num_players = p;
  s.board.assign(static_cast<std::size_t>(b) * b, Cell::unowned());
  const auto corners = starting_corners(b, p);
  for (int i = 0; i < p; ++i) s.board[corners[i]] = Cell::occupied(i);
  return s;
}

constexpr int move_dest(int l, Action a, int b) {
  switch (a) {
    case Action::Up: return l - b;
    case Action::Down: return l + b;
    case Action::Left: return l - 1;
    case Action::Right: return l + 1;
    default: return l;
  }
}

// On-board check including the row-wrap exclusion for Left/Right.
constexpr bool stays_on_board(int l, Action a, int b) {
  const int row = l / b;
  const int col = l % b;
  switch (a) {
    case Action::Up: return row > 0;
    case Action::Down: return row < b - 1;
    case Action::Left: return col > 0;
    case Action::Right: return col < b - 1;
    default: return true;
  }
}

// Legal moves for `player`: on-board movement onto a cell that is not
// occupied. Stay only when boxed in. Defer never appears here.
inline ActionList legal_actions(const GameState& s, int player) {
  const int b = s.board_size;
  const int l = position_of(s, player);
  ActionList out;
  for (Action a : kMovementActions) {
    if (!stays_on_board(l, a, b)) continue;
    if (s.board[move_dest(l, a, b)].is_occupied()) continue;
    out.push_back(a);
  }
  if (out.empty()) out.push_back(Action::Stay);
  return out;
}

inline bool contains(const ActionList& legal, Action a) {
  for (Action x : legal) {
    if (x == a) return true;
  }
  return false;
}

namespace detail {

// Steps (1)-(5) of the transition, followed by advancing the move counter
// modulo `move_modulus`. No legality check. Stay and Defer leave the board
// untouched apart from clearing the mover's invaded flag.
inline GameState apply_move(const GameState& s, Action a, int move_modulus) {
  GameState next = s;
  const int i = s.move;
  const int l = position_of(s, i);
  const bool moving = a != Action::Stay && a != Action::Defer;
  if (moving) {
    const int dest = move_dest(l, a, s.board_size);
    const Cell target = s.board[dest];
    if (target.kind == Cell::Kind::Territory && target.player != i) {
      next.invaded[target.player] = true;
    }
    next.board[dest] = Cell::occupied(i);
    next.board[l] = Cell::territory(i);
  }
  next.invaded[i] = false;
  next.move = (s.move + 1) % move_modulus;
  return next;
}

}  // namespace detail

inline GameState transition(const GameState& s, Action a) {
  if (a == Action::Defer) throw ContractViolation("defer is not an action of the base game");
  if (!contains(legal_actions(s, s.move), a)) {
    throw ContractViolation("illegal action " + std::string(action_name(a)) + " for player " +
                            std::to_string(s.move));
  }
  return detail::apply_move(s, a, s.num_players);
}

inline Points territory_count(const GameState& s, int player) {
  Points n = 0;
  for (const Cell& c : s.board) n += c.is_territory_of(player) ? 1 : 0;
  return n;
}

// True when `a` by the current mover lands on another player's territory.
inline bool is_invasion(const GameState& s, Action a) {
  if (a == Action::Stay || a == Action::Defer) return false;
  const int i = s.move;
  const int l = position_of(s, i);
  if (!stays_on_board(l, a, s.board_size)) return false;
  const Cell& target = s.board[move_dest(l, a, s.board_size)];
  return target.kind == Cell::Kind::Territory && target.player != i;
}

// Turn reward for `player`, evaluated against the pre-transition state.
// Zero for anyone but the mover.
inline Points reward(const GameState& s, Action a, const RewardConfig& cfg, int player) {
  if (player != s.move) return 0;
  Points r = territory_count(s, player);
  if (is_invasion(s, a)) r += cfg.invasion_bonus;
  if (s.invaded[player]) r += cfg.invasion_penalty;
  return r;
}

inline Points reward(const GameState& s, Action a, const RewardConfig& cfg) {
  return reward(s, a, cfg, s.move);
}

// Closed-form state count b^2!/(b^2-p)! * b*p*(b-1) * 2p * p. Throws on
// overflow, which cannot happen for b <= 8 and p <= 4.
inline std::uint64_t count_states(int b, int p) {
  if (b < 1 || p < 1 || p > b * b) throw ConfigError("count_states needs 1 <= p <= b^2");
  std::uint64_t acc = 1;
  auto mul = [&acc](std::uint64_t x) {
    if (__builtin_mul_overflow(acc, x, &acc)) throw std::overflow_error("count_states overflow");
  };
  const std::uint64_t cells = static_cast<std::uint64_t>(b) * b;
  for (int k = 0; k < p; ++k) mul(cells - k);
  mul(static_cast<std::uint64_t>(b) * p * (b - 1));
  mul(2ULL * p);
  mul(static_cast<std::uint64_t>(p));
  return acc;
}

using StateKey = std::string;

// Byte layout: b, p, one byte per cell (0 unowned, 0x10|i territory,
// 0x20|i occupied), invaded bitmask, move, flag + 1. Injective over valid
// states and independent of process or platform.
inline StateKey encode_state(const GameState& s) {
  StateKey key;
  key.reserve(static_cast<std::size_t>(s.cell_count()) + 5);
  key.push_back(static_cast<char>(s.board_size));
  key.push_back(static_cast<char>(s.num_players));
  for (const Cell& c : s.board) {
    std::uint8_t byte = 0;
    if (c.kind == Cell::Kind::Territory) byte = 0x10 | c.player;
    if (c.kind == Cell::Kind::Occupied) byte = 0x20 | c.player;
    key.push_back(static_cast<char>(byte));
  }
  std::uint8_t mask = 0;
  for (int i = 0; i < s.num_players; ++i) mask |= s.invaded[i] ? (1u << i) : 0u;
  key.push_back(static_cast<char>(mask));
  key.push_back(static_cast<char>(s.move));
  key.push_back(static_cast<char>(s.sovereign_flag + 1));
  return key;
}

inline std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char ch : bytes) {
    const auto u = static_cast<unsigned char>(ch);
    out.push_back(kDigits[u >> 4]);
    out.push_back(kDigits[u & 0xf]);
  }
  return out;
}

inline std::string from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ConfigError(std::string("bad hex digit '") + c + "'");
  };
  if (hex.size() % 2 != 0) throw ConfigError("odd-length hex string");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t k = 0; k < hex.size(); k += 2) {
    out.push_back(static_cast<char>(nibble(hex[k]) * 16 + nibble(hex[k + 1])));
  }
  return out;
}

// Structural validity: board length, exactly one occupied cell per player,
// indices in range.
inline bool is_valid(const GameState& s) {
  if (s.num_players < 1 || s.num_players > kMaxPlayers || s.board_size < 2) return false;
  if (static_cast<int>(s.board.size()) != s.cell_count()) return false;
  if (s.move < 0 || s.move > s.num_players) return false;
  if (s.sovereign_flag < -1 || s.sovereign_flag > 1) return false;
  std::array<int, kMaxPlayers> seen{};
  for (const Cell& c : s.board) {
    if (c.kind != Cell::Kind::Unowned && c.player >= s.num_players) return false;
    if (c.is_occupied()) ++seen[c.player];
  }
  for (int i = 0; i < s.num_players; ++i) {
    if (seen[i] != 1) return false;
  }
  for (int i = s.num_players; i < kMaxPlayers; ++i) {
    if (s.invaded[i]) return false;
  }
  return true;
}

}  // namespace civsim
