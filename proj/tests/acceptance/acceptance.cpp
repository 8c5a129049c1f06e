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

// Acceptance suite. Prints one PASS/FAIL line per criterion, followed by
// indented detail lines, and exits non-zero when any selected criterion
// fails. `--only N` restricts the run to criterion N.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "civsim/civsim.hpp"

namespace fs = std::filesystem;
using namespace civsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    pass = pass && ok;
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

struct Context {
  std::string cli;
  fs::path workdir;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Breadth-first closure of the 3x3 two-player base game from the standard
// start position.
std::vector<GameState> enumerate_3x3_2p() {
  std::vector<GameState> states;
  std::unordered_set<StateKey> seen;
  std::deque<GameState> frontier{initial_state(3, 2)};
  seen.insert(encode_state(frontier.front()));
  while (!frontier.empty()) {
    GameState s = std::move(frontier.front());
    frontier.pop_front();
    for (Action a : legal_actions(s, s.move)) {
      GameState n = transition(s, a);
      if (seen.insert(encode_state(n)).second) frontier.push_back(std::move(n));
    }
    states.push_back(std::move(s));
  }
  return states;
}

Outcome criterion_1(const Context&) {
  Outcome out;
  const auto t0 = Clock::now();
  const std::uint64_t small = count_states(3, 2);
  const std::uint64_t large = count_states(4, 4);
  const double ms = ms_since(t0);
  out.check(small == 6'912, "count_states(3,2) = " + std::to_string(small) + " (expect 6912)");
  out.check(large == 67'092'480, "count_states(4,4) = " + std::to_string(large) + " (expect 67092480)");
  out.check(ms < 1.0, "runtime " + num(ms) + " ms < 1 ms");
  out.summary = "state-count exactness";
  return out;
}

Outcome criterion_2(const Context&) {
  Outcome out;
  const auto t0 = Clock::now();
  const std::vector<GameState> states = enumerate_3x3_2p();
  std::unordered_set<StateKey> keys;
  for (const GameState& s : states) keys.insert(encode_state(s));
  std::int64_t transitions = 0;
  std::int64_t escaped = 0;
  std::int64_t invalid = 0;
  for (const GameState& s : states) {
    invalid += is_valid(s) ? 0 : 1;
    for (Action a : legal_actions(s, s.move)) {
      ++transitions;
      if (!keys.count(encode_state(transition(s, a)))) ++escaped;
    }
  }
  const double ms = ms_since(t0);
  out.check(keys.size() == 6'912,
            "distinct encode_state keys = " + std::to_string(keys.size()) + " (expect 6912)");
  out.check(escaped == 0, std::to_string(transitions) + " transitions, " + std::to_string(escaped) +
                              " leave the enumerated set");
  out.check(invalid == 0, "every enumerated state is structurally valid");
  out.check(ms < 10'000.0, "runtime " + num(ms) + " ms < 10 s");
  out.summary = "enumeration oracle";
  return out;
}

// TERR, INVADE and INVADED recomputed from row/column coordinates.
Points naive_reward(const GameState& s, Action a, const RewardConfig& cfg) {
  const int b = s.board_size;
  const int me = s.move;
  Points terr = 0;
  int row = -1, col = -1;
  for (int r = 0; r < b; ++r) {
    for (int c = 0; c < b; ++c) {
      const Cell& cell = s.board[r * b + c];
      if (cell.kind == Cell::Kind::Territory && cell.player == me) ++terr;
      if (cell.kind == Cell::Kind::Occupied && cell.player == me) {
        row = r;
        col = c;
      }
    }
  }
  int dr = 0, dc = 0;
  if (a == Action::Up) dr = -1;
  if (a == Action::Down) dr = 1;
  if (a == Action::Left) dc = -1;
  if (a == Action::Right) dc = 1;
  bool invade = false;
  if (dr != 0 || dc != 0) {
    const int r2 = row + dr, c2 = col + dc;
    if (r2 >= 0 && r2 < b && c2 >= 0 && c2 < b) {
      const Cell& dest = s.board[r2 * b + c2];
      invade = dest.kind == Cell::Kind::Territory && dest.player != me;
    }
  }
  return terr + (invade ? cfg.invasion_bonus : 0) + (s.invaded[me] ? cfg.invasion_penalty : 0);
}

Outcome criterion_3(const Context&) {
  Outcome out;
  const std::vector<GameState> states = enumerate_3x3_2p();
  std::vector<RewardConfig> configs(2);
  configs[1].invasion_bonus = 25;
  configs[1].invasion_penalty = -10;
  std::int64_t pairs = 0, mismatches = 0, nonzero_others = 0;
  for (const RewardConfig& cfg : configs) {
    for (const GameState& s : states) {
      for (Action a : legal_actions(s, s.move)) {
        ++pairs;
        if (reward(s, a, cfg) != naive_reward(s, a, cfg)) ++mismatches;
        for (int i = 0; i < s.num_players; ++i) {
          if (i != s.move && reward(s, a, cfg, i) != 0) ++nonzero_others;
        }
      }
    }
  }
  out.check(mismatches == 0, std::to_string(pairs) + " (state, action, config) triples, " +
                                 std::to_string(mismatches) + " discrepancies");
  out.check(nonzero_others == 0, "non-movers always receive 0");
  out.summary = "reward oracle equivalence";
  return out;
}

Outcome criterion_4(const Context&) {
  Outcome out;
  Rng rng = make_stream(2024, 0);
  double worst = 0.0;
  for (int k = 0; k < 10'000; ++k) {
    Hyperparams hp;
    hp.alpha = uniform01(rng);
    hp.gamma = uniform01(rng);
    QTable q(0);
    const StateKey s = "s" + std::to_string(k % 17);
    const StateKey n = "n" + std::to_string(k % 13);
    for (Action a : kAllActions) {
      q.set(s, a, uniform_real(rng, -50, 50));
      q.set(n, a, uniform_real(rng, -50, 50));
    }
    ActionList legal;
    for (Action a : kAllActions) {
      if (uniform01(rng) < 0.6) legal.push_back(a);
    }
    if (legal.empty()) legal.push_back(Action::Stay);
    const Action a = kAllActions[uniform_index(rng, kNumActions)];
    const double r = uniform_real(rng, -40, 40);
    const double before = q.value(s, a);
    double best = -INFINITY;
    for (Action b : legal) best = std::max(best, q.value(n, b));
    const double expected = (1.0 - hp.alpha) * before + hp.alpha * (r + hp.gamma * best);
    q_update(q, s, a, r, n, legal, hp);
    worst = std::max(worst, std::abs(q.value(s, a) - expected));
  }
  out.check(worst <= 1e-12, "max |Q' - ((1-a)Q + a(r + g max Q(s',.)))| = " + num(worst));
  out.summary = "Bellman identity";
  return out;
}

Outcome criterion_5(const Context&) {
  Outcome out;
  RunConfig cfg;
  cfg.total_steps = 1'000;
  cfg.bin = 1'000;
  cfg.agents.assign(4, AgentKind::HQLearner);
  RunOptions opts;
  Simulation sim(cfg, 77, opts);
  std::int64_t turns = 0, bad_counts = 0, bad_locations = 0, votes = 0, bad_votes = 0;
  for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
    const HobbesState pre = sim.state();
    std::vector<std::uint64_t> before;
    for (const QTable& q : sim.tables()) before.push_back(q.write_count());
    // Observer rows at the swapped state, captured before the step.
    std::vector<StateKey> swapped(4);
    std::vector<double> old_values(4, 0.0);
    const int mover = pre.game.move;
    if (!pre.at_vote()) {
      for (int i = 0; i < 4; ++i) {
        if (i == mover) continue;
        swapped[i] = encode_hobbes_state(ola_state(pre, i, mover));
      }
    }
    std::vector<QTable> snapshot = sim.tables();
    const TraceStep st = sim.step();
    std::uint64_t writes = 0;
    for (int i = 0; i < 4; ++i) writes += sim.tables()[i].write_count() - before[i];
    if (st.is_vote) {
      ++votes;
      const std::uint64_t expect = st.vote_success ? 4u : static_cast<std::uint64_t>(vote_count(
                                                              std::span(st.ballot).first(4)));
      bad_votes += writes == expect ? 0 : 1;
      continue;
    }
    ++turns;
    bad_counts += writes == 4 ? 0 : 1;
    for (int i = 0; i < 4; ++i) {
      if (i == mover) continue;
      const auto* old_row = snapshot[i].find(swapped[i]);
      const double q0 = old_row ? (*old_row)[action_index(st.action)] : 0.0;
      const auto* new_row = sim.tables()[i].find(swapped[i]);
      const double expect = (1.0 - cfg.hp.alpha) * q0 + st.delta;
      if (!new_row || (*new_row)[action_index(st.action)] != expect) ++bad_locations;
    }
  }
  out.check(bad_counts == 0, std::to_string(turns) + " player turns, " + std::to_string(bad_counts) +
                                 " without exactly 4 writes");
  out.check(bad_locations == 0, std::to_string(bad_locations) +
                                    " observer writes off the swapped key or not blended with the mover's delta");
  out.check(bad_votes == 0, std::to_string(votes) + " vote moves, " + std::to_string(bad_votes) +
                                " with a write count other than p (success) or #defer (failure)");
  out.summary = "OLA write pattern";
  return out;
}

Outcome criterion_6(const Context&) {
  Outcome out;
  std::int64_t ballots = 0, wrong = 0;
  std::unordered_map<int, std::vector<int>> succeeding;
  for (int p = 2; p <= 4; ++p) {
    HobbesState s = initial_hobbes_state(4, p);
    while (!s.at_vote()) s = hobbes_transition(s, hobbes_legal_actions(s, s.game.move).front());
    std::vector<ActionList> options;
    for (int j = 0; j < p; ++j) options.push_back(hobbes_legal_actions(s, j));
    std::vector<std::size_t> idx(p, 0);
    std::unordered_set<int> counts_ok;
    for (;;) {
      JointAction ballot;
      for (int j = 0; j < p; ++j) ballot.push_back(options[j][idx[j]]);
      const int count = vote_count(ballot);
      const HobbesState n = hobbes_transition(s, ballot);
      ++ballots;
      const bool success = n.game.sovereign_flag == 1;
      if (success != (2 * count > p)) ++wrong;
      if (success) counts_ok.insert(count);
      int j = 0;
      while (j < p && ++idx[j] == options[j].size()) idx[j++] = 0;
      if (j == p) break;
    }
    std::vector<int> sorted(counts_ok.begin(), counts_ok.end());
    std::sort(sorted.begin(), sorted.end());
    succeeding[p] = sorted;
  }
  out.check(wrong == 0, std::to_string(ballots) + " exhaustive ballots, " + std::to_string(wrong) +
                            " disagree with count > p/2");
  out.check(succeeding[4] == std::vector<int>{3, 4}, "p=4 succeeds only for counts 3 and 4");
  out.check(succeeding[3] == std::vector<int>{2, 3}, "p=3 succeeds only for counts 2 and 3");
  out.check(succeeding[2] == std::vector<int>{2}, "p=2 succeeds only for count 2");
  out.summary = "vote semantics";
  return out;
}

int run_cli(const Context& ctx, const std::string& args) {
  const std::string cmd = ctx.cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_7(const Context& ctx) {
  Outcome out;
  out.summary = "determinism";
  if (ctx.cli.empty()) {
    out.check(false, "--cli path to the civsim binary is required");
    return out;
  }
  const fs::path root = ctx.workdir / "c7";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path a = root / "a", b = root / "b", c = root / "c";
  const int ra = run_cli(ctx, "--seed 11 simulate --out " + a.string());
  const int rb = run_cli(ctx, "--seed 11 simulate --out " + b.string());
  const int rc = run_cli(ctx, "--seed 12 simulate --out " + c.string());
  out.check(ra == 0 && rb == 0 && rc == 0, "three default-config simulate runs exit 0");
  for (const char* f : {"learning_curve.csv", "actions.csv"}) {
    const std::string fa = slurp(a / f), fb = slurp(b / f), fc = slurp(c / f);
    out.check(!fa.empty() && fa == fb, std::string(f) + " byte-identical for equal seeds");
    out.check(fa != fc, std::string(f) + " differs when only the seed changes");
  }
  return out;
}

double tail_mean(const TrialSummary& s, const std::function<double(const BinAggregate&)>& f) {
  const std::size_t n = s.aggregate.size();
  const std::size_t k = std::max<std::size_t>(1, n / 10);
  double total = 0.0;
  for (std::size_t b = n - k; b < n; ++b) total += f(s.aggregate[b]);
  return total / static_cast<double>(k);
}

Outcome criterion_8(const Context&) {
  Outcome out;
  out.summary = "learning reproduction";
  const auto t0 = Clock::now();
  RunConfig cfg;  // 4x4, p=4, T=250k, bin 2500, 3 trials, standard rewards and schedule
  cfg.seed = 0;
  cfg.agents.assign(4, AgentKind::Random);
  const TrialSummary rnd = run_trials(cfg);
  cfg.agents.assign(4, AgentKind::QLearner);
  const TrialSummary ql = run_trials(cfg);
  cfg.agents.assign(4, AgentKind::HQLearner);
  const TrialSummary hql = run_trials(cfg);
  const double secs = ms_since(t0) / 1000.0;

  std::size_t negative = 0;
  for (const BinAggregate& b : rnd.aggregate) negative += b.cs_avg.median < 0.0 ? 1 : 0;
  const double frac = static_cast<double>(negative) / static_cast<double>(rnd.aggregate.size());
  out.check(frac >= 0.9, "(a) random median CS negative in " + std::to_string(negative) + "/" +
                             std::to_string(rnd.aggregate.size()) + " bins (need >= 90%)");

  auto cs = [](const BinAggregate& b) { return b.cs_avg.median; };
  auto inv = [](const BinAggregate& b) { return b.invasions.median; };
  auto sd = [](const BinAggregate& b) { return b.successful_defers.median; };
  const double hql_cs = tail_mean(hql, cs), ql_cs = tail_mean(ql, cs);
  out.check(hql_cs > 0.0 && hql_cs > ql_cs,
            "(b) final-10% median CS: HQL " + num(hql_cs) + " vs QL " + num(ql_cs));
  const double hql_inv = tail_mean(hql, inv);
  out.check(hql_inv <= 2.0, "(c) HQL final-10% median invasions per bin " + num(hql_inv) + " <= 2");
  const double opportunities = static_cast<double>(cfg.bin) / (cfg.players + 1);
  const double hql_sd = tail_mean(hql, sd);
  out.check(hql_sd >= 0.8 * opportunities, "(d) HQL final-10% median successful defers " +
                                               num(hql_sd) + " of " + num(opportunities) +
                                               " vote opportunities (need >= 80%)");
  out.note("QL final-10% median successful defers " + num(tail_mean(ql, sd)) +
           ", invasions " + num(tail_mean(ql, inv)));
  out.check(secs <= 600.0, "runtime " + num(secs) + " s <= 10 min");
  return out;
}

Outcome criterion_9(const Context&) {
  Outcome out;
  out.summary = "matrix analysis reproduction";
  MatrixConfig mc;  // 2 players on 4x4, 250k training, T = 100k, 15 trials
  const std::vector<MatrixTrial> trials = run_matrix_trials(mc);
  int with_fear = 0, stag = 0, bounded = 0, estimated = 0;
  for (const MatrixTrial& t : trials) {
    if (t.failure) {
      out.note("trial " + std::to_string(t.trial) + ": precondition failed, cooperator alpha " +
               num(t.failure->alpha_cooperator) + ", defector alpha " +
               num(t.failure->alpha_defector));
      continue;
    }
    ++estimated;
    const PayoffMatrix& m = t.estimate->matrix;
    with_fear += m.fear > 0.0 ? 1 : 0;
    stag += m.classification == DilemmaClass::StagHunt ? 1 : 0;
    bounded += std::abs(m.fear) <= 0.1 && std::abs(m.greed) <= 0.1 ? 1 : 0;
    out.note("trial " + std::to_string(t.trial) + ": R=" + num(m.R) + " P=" + num(m.P) + " S=" +
             num(m.S) + " T=" + num(m.T) + " " + std::string(dilemma_name(m.classification)));
  }
  const int n = static_cast<int>(trials.size());
  out.note(std::to_string(estimated) + "/" + std::to_string(n) + " trials passed policy classification");
  out.check(with_fear >= 0.8 * n, "fear > 0 in " + std::to_string(with_fear) + "/" +
                                      std::to_string(n) + " trials (need >= 80%)");
  const double frac = static_cast<double>(stag) / n;
  out.check(frac >= 0.4 && frac <= 0.9, "Stag Hunt fraction " + num(frac) + " in [0.4, 0.9]");
  out.check(bounded == n, "|fear|, |greed| <= 0.1 in " + std::to_string(bounded) + "/" +
                              std::to_string(n) + " trials");
  if (estimated < n) {
    // Diagnostic only: the same trials with the classification gate off.
    MatrixConfig loose = mc;
    loose.require_classes = false;
    std::vector<PayoffMatrix> ms;
    int fear_loose = 0;
    for (const MatrixTrial& t : run_matrix_trials(loose)) {
      ms.push_back(t.estimate->matrix);
      fear_loose += t.estimate->matrix.fear > 0.0 ? 1 : 0;
    }
    const MatrixAggregate agg = aggregate_matrices(ms);
    out.note("ungated diagnostic: mean R=" + num(agg.R) + " P=" + num(agg.P) + " S=" + num(agg.S) +
             " T=" + num(agg.T) + ", fear > 0 in " + std::to_string(fear_loose) + "/" +
             std::to_string(n) + ", Stag Hunt fraction " + num(agg.stag_hunt_fraction));
  }
  out.check(make_payoff_matrix(4, 1, 0, 3).classification == DilemmaClass::StagHunt,
            "R=4 P=1 S=0 T=3 classifies as Stag Hunt");
  out.check(make_payoff_matrix(3, 1, 0, 4).classification == DilemmaClass::PrisonersDilemma,
            "R=3 P=1 S=0 T=4 classifies as Prisoner's Dilemma");
  return out;
}

Outcome criterion_10(const Context&) {
  Outcome out;
  out.summary = "metric conservation";
  int runs = 0, bad = 0;
  for (AgentKind kind : {AgentKind::Random, AgentKind::QLearner, AgentKind::HQLearner}) {
    for (Variant v : {Variant::Base, Variant::Sovereign}) {
      for (int p : {2, 3, 4}) {
        RunConfig cfg;
        cfg.players = p;
        cfg.agents.assign(p, kind);
        cfg.variant = v;
        cfg.total_steps = 20'000;
        cfg.bin = 1'000;
        const GameResult res = run_game(cfg, 1000 + runs, RunOptions{true, {}, false, false});
        Points sum = 0;
        for (const MetricsBin& b : res.bins) sum += b.cs_sum;
        ++runs;
        if (sum != res.total_paid) ++bad;
      }
    }
  }
  out.check(bad == 0, std::to_string(runs) + " runs, " + std::to_string(bad) +
                          " where the bin sum differs from the total paid");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"civsim acceptance suite"};
  int only = 0;
  Context ctx;
  std::string workdir = (fs::temp_directory_path() / "civsim_acceptance").string();
  app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--cli", ctx.cli, "path to the civsim binary");
  app.add_option("--workdir", workdir, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;

  const std::vector<std::function<Outcome(const Context&)>> criteria = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  bool all = true;
  for (int k = 1; k <= 10; ++k) {
    if (only != 0 && k != only) continue;
    Outcome o;
    try {
      o = criteria[k - 1](ctx);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = "aborted";
      o.details.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << ": " << o.summary << "\n";
    for (const auto& d : o.details) std::cout << "    " << d << "\n";
    std::cout.flush();
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
