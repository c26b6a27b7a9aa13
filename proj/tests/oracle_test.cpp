#include <gtest/gtest.h>

#include "cwb/oracle.hpp"
#include "support/generators.hpp"

using namespace cwb;

TEST(Oracle, PingPongLoopsWithPeriodTwo) {
  const auto m = machines::ping_pong();
  const auto o = run_with_oracle(m, {}, 10);
  ASSERT_TRUE(std::holds_alternative<LoopDetected>(o));
  EXPECT_EQ(std::get<LoopDetected>(o), (LoopDetected{0, 2}));
  EXPECT_TRUE(replay_verify(m, {}, o));
}

TEST(Oracle, LoopIsCaughtExactlyAtFirstIndexPlusPeriod) {
  const auto m = machines::ping_pong();
  EXPECT_TRUE(std::holds_alternative<LoopDetected>(run_with_oracle(m, {}, 2)));
  const auto one = run_with_oracle(m, {}, 1);
  ASSERT_TRUE(std::holds_alternative<BudgetExceeded>(one));
  EXPECT_EQ(std::get<BudgetExceeded>(one).steps, 1u);
}

TEST(Oracle, EmptyTableHaltsAtZero) {
  const auto m = machines::empty();
  const auto o = run_with_oracle(m, {}, 10);
  ASSERT_TRUE(std::holds_alternative<Halted>(o));
  EXPECT_EQ(std::get<Halted>(o).steps, 0u);
  EXPECT_TRUE(replay_verify(m, {}, o));
  EXPECT_TRUE(std::holds_alternative<Halted>(run_with_oracle(m, {}, 0)));
}

TEST(Oracle, RightRunnerNeverRepeats) {
  const auto m = machines::right_runner();
  for (std::uint64_t budget : {0, 1, 10, 100, 1000}) {
    OracleRun run(m, {});
    const auto v = run.advance(budget);
    EXPECT_FALSE(v.has_value());
    EXPECT_EQ(run.steps(), budget);
    EXPECT_EQ(run.history().size(), budget + 1);
  }
  const auto o = run_with_oracle(m, {}, 1000);
  ASSERT_TRUE(std::holds_alternative<BudgetExceeded>(o));
  EXPECT_EQ(std::get<BudgetExceeded>(o).steps, 1000u);
  EXPECT_EQ(std::get<BudgetExceeded>(o).last_id.tape.size(), 1000u);
  EXPECT_TRUE(replay_verify(m, {}, o));
}

TEST(Oracle, ReplayRejectsCorruptedOutcomes) {
  const auto m = machines::ping_pong();
  EXPECT_FALSE(replay_verify(m, {}, LoopDetected{0, 3}));
  EXPECT_FALSE(replay_verify(m, {}, LoopDetected{0, 1}));
  EXPECT_FALSE(replay_verify(m, {}, LoopDetected{0, 0}));
  EXPECT_FALSE(replay_verify(machines::empty(), {}, Halted{1, {}}));
  EXPECT_FALSE(replay_verify(m, {}, Halted{0, initial_id(m, {})}));
}

TEST(Oracle, HistoryCapEndsRunWithFlag) {
  const auto o = run_with_oracle(machines::right_runner(), {}, 1000, OracleOptions{50});
  ASSERT_TRUE(std::holds_alternative<BudgetExceeded>(o));
  EXPECT_TRUE(std::get<BudgetExceeded>(o).history_capped);
  EXPECT_EQ(std::get<BudgetExceeded>(o).steps, 50u);
}

TEST(Oracle, ResumedRunMatchesSingleRun) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen::random_machine(rng, 3, 2);
    const auto whole = run_with_oracle(m, {}, 500);
    OracleRun pieces(m, {});
    std::optional<RunOutcome> v;
    std::uint64_t granted = 0;
    while (!v && granted < 500) {
      const auto g = std::min<std::uint64_t>(gen::pick(rng, 1, 7), 500 - granted);
      v = pieces.advance(g);
      granted += g;
    }
    const RunOutcome got = v ? *v : RunOutcome{BudgetExceeded{pieces.steps(), pieces.simulator().id()}};
    ASSERT_EQ(got, whole);
  }
}

TEST(Oracle, FingerprintMatchesIncrementalUpdates) {
  // Every recorded fingerprint must equal the from-scratch fingerprint of the
  // ID at that step; otherwise repeats could be missed.
  gen::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = gen::random_machine(rng, 2, 3, 1.0);
    OracleRun run(m, {});
    for (int s = 0; s < 40 && !run.advance(1); ++s) {
      const auto fp = fingerprint(run.simulator().id());
      const auto* hits = run.history().candidates(fp);
      ASSERT_NE(hits, nullptr);
    }
  }
}

// Soundness against a brute-force oracle that stores full IDs.
TEST(Oracle, AgreesWithFullIdHistory) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 400; ++trial) {
    const auto m = gen::random_machine(rng, gen::pick(rng, 1, 3), gen::pick(rng, 2, 3));
    std::vector<ID> seen{initial_id(m, {})};
    std::optional<RunOutcome> expect;
    for (std::uint64_t s = 0; s < 300 && !expect; ++s) {
      const auto next = step(m, seen.back());
      if (std::holds_alternative<Halt>(next)) {
        expect = Halted{s, seen.back()};
        break;
      }
      const auto& id = std::get<ID>(next);
      for (std::uint64_t i = 0; i < seen.size(); ++i)
        if (seen[i] == id) expect = LoopDetected{i, s + 1 - i};
      seen.push_back(id);
    }
    if (!expect) {
      if (std::holds_alternative<Halt>(step(m, seen.back())))
        expect = Halted{300, seen.back()};
      else
        expect = BudgetExceeded{300, seen.back()};
    }
    const auto got = run_with_oracle(m, {}, 300);
    ASSERT_EQ(got, *expect) << "trial " << trial;
    ASSERT_TRUE(replay_verify(m, {}, got));
  }
}

TEST(Oracle, BoundedTapeMachinesNeverExhaustBudget) {
  gen::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cm = gen::confined_machine(rng, gen::pick(rng, 2, 3), 2, 2);
    const auto o = run_with_oracle(cm.machine, {}, cm.id_bound());
    EXPECT_FALSE(std::holds_alternative<BudgetExceeded>(o));
  }
}
