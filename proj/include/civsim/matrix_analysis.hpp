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

// Empirical matrix game behind the Civilization Game. Learned policies are
// labelled cooperative or defecting by their invasion rate, played against
// each other with learning switched off, and the resulting long-term payoffs
// fill a 2x2 R/P/S/T matrix that is then classified by its fear and greed
// incentives.

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "civsim/experiment.hpp"

namespace civsim {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The policies handed to the payoff estimate are not cooperative/defecting
// according to the thresholds.
class PolicyPreconditionError : public std::runtime_error {
 public:
  PolicyPreconditionError(double alpha_cooperator, double alpha_defector, const std::string& what)
      : std::runtime_error(what), alpha_cooperator(alpha_cooperator), alpha_defector(alpha_defector) {}

  double alpha_cooperator;
  double alpha_defector;
};

enum class PolicyClass : std::uint8_t { Cooperative, Defecting, Neither };

struct PolicyThresholds {
  double alpha_c = 5.0;   // invasions per 100 moves
  double alpha_d = 15.0;

  void validate() const {
    if (!(alpha_c < alpha_d)) throw ConfigError("alpha_c must be below alpha_d");
  }
};

inline constexpr std::uint64_t kMinMovesForAlpha = 100;

// Invasions per hundred moves.
inline double social_metric(std::int64_t invasions, std::int64_t moves) {
  if (moves < static_cast<std::int64_t>(kMinMovesForAlpha)) {
    throw InsufficientData("social metric needs at least 100 moves, got " + std::to_string(moves));
  }
  return 100.0 * static_cast<double>(invasions) / static_cast<double>(moves);
}

inline double social_metric(std::span<const TraceStep> trace, int player) {
  std::int64_t moves = 0;
  std::int64_t invasions = 0;
  for (const TraceStep& st : trace) {
    if (st.is_vote || st.mover != player) continue;
    ++moves;
    invasions += st.invasion ? 1 : 0;
  }
  return social_metric(invasions, moves);
}

inline PolicyClass classify_policy(double alpha, const PolicyThresholds& th = {}) {
  if (alpha < th.alpha_c) return PolicyClass::Cooperative;
  if (alpha > th.alpha_d) return PolicyClass::Defecting;
  return PolicyClass::Neither;
}

enum class DilemmaClass : std::uint8_t { StagHunt, PrisonersDilemma, NotSocialDilemma, OtherDilemma };

constexpr std::string_view dilemma_name(DilemmaClass c) {
  switch (c) {
    case DilemmaClass::StagHunt: return "stag_hunt";
    case DilemmaClass::PrisonersDilemma: return "prisoners_dilemma";
    case DilemmaClass::NotSocialDilemma: return "not_social_dilemma";
    case DilemmaClass::OtherDilemma: return "other_dilemma";
  }
  return "?";
}

struct PayoffMatrix {
  double R = 0.0;
  double P = 0.0;
  double S = 0.0;
  double T = 0.0;
  double fear = 0.0;   // P - S
  double greed = 0.0;  // T - R
  // R > P, R > S, 2R > T + S, and greed or fear.
  std::array<bool, 4> inequalities{};
  DilemmaClass classification = DilemmaClass::NotSocialDilemma;
};

inline std::pair<double, double> fear_greed(const PayoffMatrix& m) { return {m.P - m.S, m.T - m.R}; }

inline PayoffMatrix make_payoff_matrix(double R, double P, double S, double T) {
  PayoffMatrix m{R, P, S, T};
  std::tie(m.fear, m.greed) = fear_greed(m);
  const bool has_fear = m.fear > 0.0;
  const bool has_greed = m.greed > 0.0;
  m.inequalities = {R > P, R > S, 2.0 * R > T + S, has_fear || has_greed};
  const bool dilemma = m.inequalities[0] && m.inequalities[1] && m.inequalities[2] && m.inequalities[3];
  if (!dilemma) {
    m.classification = DilemmaClass::NotSocialDilemma;
  } else if (has_fear && !has_greed) {
    m.classification = DilemmaClass::StagHunt;
  } else if (has_fear && has_greed) {
    m.classification = DilemmaClass::PrisonersDilemma;
  } else {
    m.classification = DilemmaClass::OtherDilemma;  // greed only (Chicken)
  }
  return m;
}

// Long-term payoff of `player` over `steps` turns, divided by `steps`.
// The discounted form weights turn t by gamma^t.
inline double long_term_payoff(std::span<const TraceStep> trace, int player, std::uint64_t steps,
                               std::optional<double> gamma = std::nullopt) {
  if (steps == 0) return 0.0;
  double total = 0.0;
  double w = 1.0;
  for (const TraceStep& st : trace) {
    total += w * static_cast<double>(st.rewards.at(player));
    if (gamma) w *= *gamma;
  }
  return total / static_cast<double>(steps);
}

enum class Role : std::uint8_t { Cooperator, Defector };

struct MatchupOutcome {
  std::vector<double> payoff;  // per seat, points per step
  std::vector<double> alpha;   // per seat, invasions per 100 moves
};

// Plays one matchup for the given seat roles.
using MatchupFn = std::function<MatchupOutcome(std::span<const Role>)>;

struct MatrixEstimate {
  PayoffMatrix matrix;
  double alpha_cooperator = 0.0;  // mean over seats of the all-cooperator matchup
  double alpha_defector = 0.0;    // mean over seats of the all-defector matchup
  bool policies_classified = false;
};

namespace detail {

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace detail

// R from all-cooperator play, P from all-defector play, S and T from the
// mixed matchup averaged over both seatings (first half of the seats
// cooperating, then the reverse).
inline MatrixEstimate estimate_payoff_matrix(const MatchupFn& play, int players,
                                             const PolicyThresholds& th = {},
                                             bool require_classes = true) {
  std::vector<Role> all_c(players, Role::Cooperator);
  std::vector<Role> all_d(players, Role::Defector);
  std::vector<Role> mix_a(players), mix_b(players);
  for (int i = 0; i < players; ++i) {
    const bool first_half = i < (players + 1) / 2;
    mix_a[i] = first_half ? Role::Cooperator : Role::Defector;
    mix_b[i] = first_half ? Role::Defector : Role::Cooperator;
  }

  const MatchupOutcome cc = play(all_c);
  const MatchupOutcome dd = play(all_d);

  MatrixEstimate est;
  est.alpha_cooperator = detail::mean(cc.alpha);
  est.alpha_defector = detail::mean(dd.alpha);
  est.policies_classified = classify_policy(est.alpha_cooperator, th) == PolicyClass::Cooperative &&
                            classify_policy(est.alpha_defector, th) == PolicyClass::Defecting;
  if (require_classes && !est.policies_classified) {
    throw PolicyPreconditionError(
        est.alpha_cooperator, est.alpha_defector,
        "policies fail classification: cooperator alpha=" + std::to_string(est.alpha_cooperator) +
            " (need < " + std::to_string(th.alpha_c) + "), defector alpha=" +
            std::to_string(est.alpha_defector) + " (need > " + std::to_string(th.alpha_d) + ")");
  }

  const MatchupOutcome a = play(mix_a);
  const MatchupOutcome b = play(mix_b);
  std::vector<double> sucker, temptation;
  for (int i = 0; i < players; ++i) {
    (mix_a[i] == Role::Cooperator ? sucker : temptation).push_back(a.payoff[i]);
    (mix_b[i] == Role::Cooperator ? sucker : temptation).push_back(b.payoff[i]);
  }
  est.matrix = make_payoff_matrix(detail::mean(cc.payoff), detail::mean(dd.payoff),
                                  detail::mean(sucker), detail::mean(temptation));
  return est;
}

struct MatrixConfig {
  // Game used for both training and matchups. Agent kinds are overridden.
  RunConfig game = [] {
    RunConfig g;
    g.players = 2;
    g.agents.assign(2, AgentKind::HQLearner);
    return g;
  }();
  std::uint64_t training_steps = 250'000;
  std::uint64_t matchup_steps = 100'000;
  int trials = 15;
  PolicyThresholds thresholds;
  bool discounted = false;
  bool require_classes = true;
  std::uint64_t seed = 0;
};

// Seat-specific tables from one training run per policy family.
struct TrainedPolicies {
  std::vector<QTable> cooperator;  // trained as Hobbesian learners
  std::vector<QTable> defector;    // trained as independent Q-learners
  double final_epsilon = 0.0;
};

inline TrainedPolicies train_policies(const MatrixConfig& mc, int trial) {
  RunConfig cfg = mc.game;
  cfg.total_steps = mc.training_steps;
  cfg.bin = mc.training_steps;
  RunOptions opts;
  opts.keep_trace = false;
  opts.record_keys = false;
  const std::uint64_t base = derive_seed(mc.seed, static_cast<std::uint64_t>(trial));
  TrainedPolicies out;
  cfg.agents.assign(cfg.players, AgentKind::HQLearner);
  out.cooperator = run_game(cfg, derive_seed(base, 0), opts).tables;
  cfg.agents.assign(cfg.players, AgentKind::QLearner);
  out.defector = run_game(cfg, derive_seed(base, 1), opts).tables;
  out.final_epsilon = epsilon_at(mc.training_steps, cfg.hp);
  return out;
}

// Matchups between frozen policies: learning off, exploration held at the
// final annealed value.
inline MatchupFn simulated_matchups(const MatrixConfig& mc, TrainedPolicies policies, int trial) {
  auto shared = std::make_shared<TrainedPolicies>(std::move(policies));
  auto counter = std::make_shared<std::uint64_t>(0);
  return [mc, shared, counter, trial](std::span<const Role> seats) {
    RunConfig cfg = mc.game;
    cfg.total_steps = mc.matchup_steps;
    cfg.bin = mc.matchup_steps;
    cfg.agents.clear();
    std::vector<QTable> tables;
    for (std::size_t i = 0; i < seats.size(); ++i) {
      const bool coop = seats[i] == Role::Cooperator;
      cfg.agents.push_back(coop ? AgentKind::HQLearner : AgentKind::QLearner);
      tables.push_back(coop ? shared->cooperator.at(i) : shared->defector.at(i));
    }
    RunOptions opts;
    opts.learn = false;
    opts.fixed_epsilon = shared->final_epsilon;
    opts.keep_trace = false;
    opts.record_keys = false;
    const std::uint64_t seed =
        derive_seed(derive_seed(mc.seed, static_cast<std::uint64_t>(trial)), 2 + (*counter)++);
    const GameResult res = run_game(cfg, seed, opts, std::move(tables));
    MatchupOutcome out;
    const double steps = static_cast<double>(mc.matchup_steps);
    for (std::size_t i = 0; i < seats.size(); ++i) {
      out.payoff.push_back(mc.discounted ? res.player_discounted[i] / steps
                                         : static_cast<double>(res.player_totals[i]) / steps);
      out.alpha.push_back(social_metric(res.invasions_committed[i], res.moves[i]));
    }
    return out;
  };
}

struct MatrixTrial {
  int trial = 0;
  std::optional<MatrixEstimate> estimate;
  std::optional<PolicyPreconditionError> failure;
};

inline MatrixTrial run_matrix_trial(const MatrixConfig& mc, int trial) {
  MatrixTrial out;
  out.trial = trial;
  const MatchupFn play = simulated_matchups(mc, train_policies(mc, trial), trial);
  try {
    out.estimate = estimate_payoff_matrix(play, mc.game.players, mc.thresholds, mc.require_classes);
  } catch (const PolicyPreconditionError& e) {
    out.failure = e;
  }
  return out;
}

inline std::vector<MatrixTrial> run_matrix_trials(const MatrixConfig& mc, bool parallel = true) {
  mc.game.validate();
  mc.thresholds.validate();
  if (mc.trials < 1) throw ConfigError("matrix trials must be at least 1");
  std::vector<MatrixTrial> out(mc.trials);
  if (parallel && mc.trials > 1) {
    std::vector<std::future<MatrixTrial>> jobs;
    for (int k = 0; k < mc.trials; ++k) {
      jobs.push_back(std::async(std::launch::async, [&mc, k] { return run_matrix_trial(mc, k); }));
    }
    for (int k = 0; k < mc.trials; ++k) out[k] = jobs[k].get();
  } else {
    for (int k = 0; k < mc.trials; ++k) out[k] = run_matrix_trial(mc, k);
  }
  return out;
}

struct MatrixAggregate {
  double R = 0.0, P = 0.0, S = 0.0, T = 0.0, fear = 0.0, greed = 0.0;
  double stag_hunt_fraction = 0.0;
  int counted = 0;
};

inline MatrixAggregate aggregate_matrices(std::span<const PayoffMatrix> ms) {
  MatrixAggregate agg;
  for (const PayoffMatrix& m : ms) {
    agg.R += m.R;
    agg.P += m.P;
    agg.S += m.S;
    agg.T += m.T;
    agg.fear += m.fear;
    agg.greed += m.greed;
    agg.stag_hunt_fraction += m.classification == DilemmaClass::StagHunt ? 1.0 : 0.0;
  }
  agg.counted = static_cast<int>(ms.size());
  if (agg.counted > 0) {
    const double n = agg.counted;
    agg.R /= n;
    agg.P /= n;
    agg.S /= n;
    agg.T /= n;
    agg.fear /= n;
    agg.greed /= n;
    agg.stag_hunt_fraction /= n;
  }
  return agg;
}

}  // namespace civsim
