#include <gtest/gtest.h>

#include <random>

#include "cwb/tm.hpp"
#include "support/generators.hpp"

using namespace cwb;

namespace {

ID at_step(const Machine& m, std::uint64_t n) {
  ID id = initial_id(m, {});
  for (std::uint64_t i = 0; i < n; ++i) id = std::get<ID>(step(m, id));
  return id;
}

}  // namespace

TEST(Machine, RejectsOutOfRangeIndices) {
  EXPECT_THROW(Machine(0, 2), ValidationError);
  EXPECT_THROW(Machine(2, 0), ValidationError);
  EXPECT_THROW(Machine(2, 2, 2), ValidationError);
  Machine m(2, 2);
  EXPECT_THROW(m.set(2, 0, {0, Move::Left, 0}), ValidationError);
  EXPECT_THROW(m.set(0, 2, {0, Move::Left, 0}), ValidationError);
  EXPECT_THROW(m.set(0, 0, {2, Move::Left, 0}), ValidationError);
  EXPECT_THROW(m.set(0, 0, {0, Move::Left, 5}), ValidationError);
}

TEST(Machine, RejectsSecondTransitionForSamePair) {
  Machine m(1, 2);
  m.set(0, 0, {1, Move::Right, 0});
  EXPECT_THROW(m.set(0, 0, {0, Move::Left, 0}), ValidationError);
}

TEST(InitialId, EmptyInput) {
  const auto id = initial_id(machines::empty(3, 2), {});
  EXPECT_EQ(id.state, 0u);
  EXPECT_EQ(id.head, 0);
  EXPECT_TRUE(id.tape.empty());
}

TEST(InitialId, WritesInputAndTrimsBlanks) {
  Machine m(1, 2);
  const Symbol one[] = {1};
  EXPECT_EQ(initial_id(m, one).tape, (std::map<Position, Symbol>{{0, 1}}));
  const Symbol blank[] = {0};
  EXPECT_TRUE(initial_id(m, blank).tape.empty());
  const Symbol mixed[] = {1, 0, 1};
  EXPECT_EQ(initial_id(m, mixed).tape, (std::map<Position, Symbol>{{0, 1}, {2, 1}}));
  const Symbol bad[] = {2};
  EXPECT_THROW(initial_id(m, bad), ValidationError);
}

TEST(Step, EmptyTableHaltsImmediately) {
  const auto m = machines::empty(2, 2);
  EXPECT_TRUE(std::holds_alternative<Halt>(step(m, initial_id(m, {}))));
}

TEST(Step, PingPongReturnsToStartAfterTwoSteps) {
  const auto m = machines::ping_pong();
  const ID s0 = initial_id(m, {});
  const ID s1 = at_step(m, 1);
  EXPECT_EQ(s1.state, 1u);
  EXPECT_EQ(s1.head, 1);
  EXPECT_TRUE(s1.tape.empty());
  EXPECT_NE(s0, s1);
  EXPECT_EQ(at_step(m, 2), s0);
}

TEST(Step, RightRunnerIdsArePairwiseDistinct) {
  const auto m = machines::right_runner();
  std::vector<ID> ids;
  for (std::uint64_t n = 0; n <= 5; ++n) {
    ids.push_back(at_step(m, n));
    EXPECT_EQ(ids.back().tape.size(), n);
    EXPECT_EQ(ids.back().head, static_cast<Position>(n));
  }
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) EXPECT_NE(ids[i], ids[j]);
}

TEST(Step, WritingBlankRemovesCell) {
  Machine m(1, 2);
  m.set(0, 1, {0, Move::Left, 0});
  const Symbol in[] = {1};
  const auto next = std::get<ID>(step(m, initial_id(m, in)));
  EXPECT_TRUE(next.tape.empty());
  EXPECT_EQ(next.head, -1);
}

TEST(Run, Examples) {
  auto r = run(machines::empty(), {}, 10);
  EXPECT_EQ(r.status, PlainRun::Status::Halted);
  EXPECT_EQ(r.steps, 0u);

  r = run(machines::ping_pong(), {}, 10);
  EXPECT_EQ(r.status, PlainRun::Status::BudgetExceeded);
  EXPECT_EQ(r.steps, 10u);

  r = run(machines::right_runner(), {}, 100);
  EXPECT_EQ(r.status, PlainRun::Status::BudgetExceeded);
  EXPECT_EQ(r.last.tape.size(), 100u);
}

TEST(Tape, GrowsBothWays) {
  Tape t;
  t.write(-1000, 3);
  t.write(1000, 2);
  EXPECT_EQ(t.read(-1000), 3u);
  EXPECT_EQ(t.read(1000), 2u);
  EXPECT_EQ(t.read(5), kBlank);
  EXPECT_EQ(t.non_blank(), 2u);
  t.write(1000, kBlank);
  EXPECT_EQ(t.non_blank(), 1u);
  EXPECT_EQ(t.snapshot(), (std::map<Position, Symbol>{{-1000, 3}}));
}

// Properties over random machines: determinism, canonical closure,
// head-locality, agreement of the in-place simulator with step(), replay.
TEST(StepProperties, RandomMachines) {
  gen::Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = gen::random_machine(rng, gen::pick(rng, 1, 4), gen::pick(rng, 1, 3));
    ID id = initial_id(m, {});
    Simulator sim(m, {});
    std::uint64_t halted_at = 0;
    bool halted = false;
    for (int s = 0; s < 60; ++s) {
      ASSERT_EQ(sim.id(), id);
      const auto a = step(m, id);
      const auto b = step(m, id);
      ASSERT_EQ(a, b);
      if (std::holds_alternative<Halt>(a)) {
        ASSERT_TRUE(sim.halted());
        halted = true;
        halted_at = static_cast<std::uint64_t>(s);
        break;
      }
      const auto& next = std::get<ID>(a);
      ASSERT_TRUE(next.canonical());
      ASSERT_EQ(std::abs(next.head - id.head), 1);
      auto rest_a = id.tape, rest_b = next.tape;
      rest_a.erase(id.head);
      rest_b.erase(id.head);
      ASSERT_EQ(rest_a, rest_b);
      sim.advance();
      id = next;
    }
    if (halted) {
      for (std::uint64_t extra : {0, 1, 50}) {
        const auto r = run(m, {}, halted_at + extra);
        ASSERT_EQ(r.status, PlainRun::Status::Halted);
        ASSERT_EQ(r.steps, halted_at);
        ASSERT_EQ(r.last, id);
      }
    }
  }
}
