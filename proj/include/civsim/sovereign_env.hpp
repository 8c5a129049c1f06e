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

// Sovereign variant of the Civilization Game. Each cycle of p player moves is
// followed by a vote move (move == p) where every player casts a ballot. A
// strict majority of Defer ballots binds every player to Defer for the next
// cycle; a failed vote removes Defer until the next vote.

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "civsim/civ_game.hpp"

namespace civsim {

struct VotePhase {
  enum class Kind : std::uint8_t { Open, ForcedDefer, Suppressed };

  Kind kind = Kind::Open;
  int remaining = 0;  // forced turns left, ForcedDefer only

  static constexpr VotePhase open() { return {}; }
  static constexpr VotePhase forced(int turns) { return {Kind::ForcedDefer, turns}; }
  static constexpr VotePhase suppressed() { return {Kind::Suppressed, 0}; }

  friend constexpr bool operator==(const VotePhase&, const VotePhase&) = default;
};

// Game state plus the until-next-vote bookkeeping.
struct HobbesState {
  GameState game;
  VotePhase phase;

  bool at_vote() const { return game.move == game.num_players; }

  friend bool operator==(const HobbesState&, const HobbesState&) = default;
};

using JointAction = std::vector<Action>;

inline HobbesState initial_hobbes_state(int b, int p) { return {initial_state(b, p), VotePhase::open()}; }

inline int vote_count(std::span<const Action> ballot) {
  return static_cast<int>(std::count(ballot.begin(), ballot.end(), Action::Defer));
}

// Strict majority.
constexpr bool vote_succeeds(int defer_votes, int num_players) {
  return 2 * defer_votes > num_players;
}

inline ActionList hobbes_legal_actions(const HobbesState& s, int player) {
  if (s.at_vote()) {
    ActionList ballot = legal_actions(s.game, player);
    ballot.push_back(Action::Defer);
    return ballot;
  }
  if (s.phase.kind == VotePhase::Kind::ForcedDefer) return {Action::Defer};
  return legal_actions(s.game, player);
}

namespace detail {

// Phase bookkeeping once a player turn has been taken. Reaching the vote
// move reopens the ballot.
inline VotePhase advance_phase(VotePhase phase, int next_move, int num_players) {
  if (phase.kind == VotePhase::Kind::ForcedDefer) phase.remaining -= 1;
  if (next_move == num_players) return VotePhase::open();
  return phase;
}

}  // namespace detail

// Ordinary turn (move < p). Defer behaves as staying in place.
inline HobbesState hobbes_transition(const HobbesState& s, Action a) {
  if (s.at_vote()) throw ContractViolation("vote move requires a full ballot");
  if (!contains(hobbes_legal_actions(s, s.game.move), a)) {
    throw ContractViolation("illegal action " + std::string(action_name(a)) + " for player " +
                            std::to_string(s.game.move));
  }
  HobbesState next;
  next.game = detail::apply_move(s.game, a, s.game.num_players + 1);
  next.game.sovereign_flag = 0;  // consumed by the vote reward step
  next.phase = detail::advance_phase(s.phase, next.game.move, s.game.num_players);
  return next;
}

// Vote move (move == p).
inline HobbesState hobbes_transition(const HobbesState& s, std::span<const Action> ballot) {
  const int p = s.game.num_players;
  if (!s.at_vote()) throw ContractViolation("ballot supplied outside the vote move");
  if (static_cast<int>(ballot.size()) != p) {
    throw ContractViolation("ballot must contain one action per player");
  }
  HobbesState next = s;
  next.game.move = 0;
  if (vote_succeeds(vote_count(ballot), p)) {
    next.game.sovereign_flag = 1;
    next.phase = VotePhase::forced(p);
  } else {
    next.game.sovereign_flag = -1;
    next.phase = VotePhase::suppressed();
  }
  return next;
}

// Reward for an ordinary turn. A Defer turn farms territory and nothing else.
inline Points hobbes_turn_reward(const HobbesState& s, Action a, const RewardConfig& cfg) {
  if (a == Action::Defer) return territory_count(s.game, s.game.move);
  return reward(s.game, a, cfg);
}

// Sovereign payout for one player's ballot, read off the post-vote flag.
inline Points sovereign_reward(const GameState& s, Action ballot, const RewardConfig& cfg) {
  if (s.sovereign_flag > 0) return cfg.vote_bonus;
  if (s.sovereign_flag < 0) return ballot == Action::Defer ? cfg.vote_penalty : 0;
  return 0;
}

// Key used by learners: the game encoding plus the phase kind. The phase is
// needed for the key to be Markov since it decides the legal set; the
// remaining count is implied by the move counter.
inline StateKey encode_hobbes_state(const HobbesState& s) {
  StateKey key = encode_state(s.game);
  key.push_back(static_cast<char>(s.phase.kind));
  return key;
}

}  // namespace civsim
