#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <actorgc/behavior.hpp>

#include "support/oracles.hpp"

using namespace actorgc;

namespace {

Event ev(std::string c, int hour, std::optional<std::string> actor, std::size_t seq = 0) {
    using namespace std::chrono;
    Event e;
    e.case_id = std::move(c);
    e.activity = "a";
    e.timestamp = time_point_cast<milliseconds>(sys_days{year{2022} / 1 / 1} + hours{hour});
    e.actor = std::move(actor);
    e.sequence_index = seq;
    return e;
}

EventLog log_of(std::vector<Event> events) {
    for (std::size_t i = 0; i < events.size(); ++i) events[i].sequence_index = i;
    return validate_and_sort(EventLog{std::move(events), {}, 0});
}

std::vector<oracle::Labeled> labels(const Classification& c) {
    std::vector<oracle::Labeled> out;
    for (const auto& t : c.transitions) out.emplace_back(t.from_event, t.to_event, std::string(behavior_code(t.behavior)));
    return out;
}

} // namespace

TEST(Classify, ContinuationWithNoOtherWork) {
    const auto log = log_of({ev("A", 1, "r1"), ev("A", 3, "r1")});
    const ActorIndex idx(log);
    EXPECT_EQ(classify_transition(log.events[0], log.events[1], idx), BehaviorType::continuation);
}

TEST(Classify, InterruptionByOtherCase) {
    const auto log = log_of({ev("A", 1, "r1"), ev("B", 2, "r1"), ev("A", 3, "r1")});
    const ActorIndex idx(log);
    EXPECT_EQ(classify_transition(log.events[0], log.events[2], idx), BehaviorType::interruption);
}

TEST(Classify, HandoverBusyThenIdle) {
    const auto busy = log_of({ev("A", 1, "r1"), ev("B", 2, "r2"), ev("A", 3, "r2")});
    EXPECT_EQ(classify_transition(busy.events[0], busy.events[2], ActorIndex(busy)), BehaviorType::handover_busy);
    const auto idle = log_of({ev("A", 1, "r1"), ev("A", 3, "r2")});
    EXPECT_EQ(classify_transition(idle.events[0], idle.events[1], ActorIndex(idle)), BehaviorType::handover_idle);
}

TEST(Classify, WitnessIntervalIsOpen) {
    // Other-case work exactly at t_i or t_j does not interpose.
    const auto log = log_of({ev("A", 1, "r1"), ev("B", 1, "r1"), ev("C", 3, "r1"), ev("A", 3, "r1")});
    const ActorIndex idx(log);
    const auto& from = *std::find_if(log.events.begin(), log.events.end(), [](const Event& e) { return e.case_id == "A"; });
    const auto& to = *std::find_if(log.events.rbegin(), log.events.rend(), [](const Event& e) { return e.case_id == "A"; });
    EXPECT_EQ(classify_transition(from, to, idx), BehaviorType::continuation);
}

TEST(Classify, ZeroDurationPairsNeverBusy) {
    const auto log = log_of({ev("A", 5, "r1"), ev("A", 5, "r2"), ev("B", 5, "r2")});
    const auto c = classify_log(log);
    ASSERT_EQ(c.transitions.size(), 1u);
    EXPECT_EQ(c.transitions[0].behavior, BehaviorType::handover_idle);
}

TEST(Classify, SameCaseWorkIsNotAWitness) {
    const auto log = log_of({ev("A", 1, "r1"), ev("A", 2, "r2"), ev("B", 3, "r2"), ev("A", 4, "r1")});
    const ActorIndex idx(log);
    const auto lo = log.events[0].timestamp, hi = log.events[3].timestamp;
    EXPECT_FALSE(idx.busy_elsewhere("r1", lo, hi, "A"));
    EXPECT_TRUE(idx.busy_elsewhere("r2", lo, hi, "A"));
    EXPECT_FALSE(idx.busy_elsewhere("r2", lo, log.events[2].timestamp, "A"));
    EXPECT_TRUE(idx.busy_elsewhere("r2", lo, log.events[2].timestamp, "B"));
}

TEST(Classify, MissingActorSkipsPair) {
    const auto log = log_of({ev("A", 1, "r1"), ev("A", 2, std::nullopt), ev("A", 3, "r1")});
    const auto c = classify_log(log);
    EXPECT_TRUE(c.transitions.empty());
    EXPECT_EQ(c.skipped_pairs, 2u);
    EXPECT_FALSE(classify_transition(log.events[0], log.events[1], ActorIndex(log)));
}

TEST(ClassifyLog, PairCounts) {
    const auto log = log_of({ev("solo", 0, "r1"), ev("A", 1, "r1"), ev("A", 2, "r2"), ev("A", 3, "r1"), ev("A", 4, "r3")});
    const auto c = classify_log(log);
    EXPECT_EQ(c.transitions.size(), 3u);
    for (std::size_t k = 1; k < c.transitions.size(); ++k) EXPECT_LT(c.transitions[k - 1].to_event, c.transitions[k].to_event);
}

TEST(ActorIndex, CoversActorEventsInLogOrder) {
    const auto one = log_of({ev("A", 1, "r"), ev("B", 2, "r"), ev("A", 3, "r")});
    const ActorIndex idx(one);
    EXPECT_EQ(idx.actor_count(), 1u);
    EXPECT_EQ(idx.events_of("r").size(), 3u);

    const auto partial = log_of({ev("A", 1, "r"), ev("A", 2, std::nullopt)});
    EXPECT_EQ(ActorIndex(partial).events_of("r").size(), 1u);
    EXPECT_TRUE(ActorIndex(partial).events_of("nobody").empty());
}

TEST(ActorIndex, BusyQueriesMatchLinearScan) {
    std::mt19937_64 rng(21);
    const auto log = validate_and_sort(oracle::random_log(rng, 2000, 150, 12, 0.0, 5000));
    const ActorIndex idx(log);
    std::uniform_int_distribution<std::size_t> pick(0, log.events.size() - 1);
    std::uniform_int_distribution<int> actor(0, 11);
    for (int q = 0; q < 100; ++q) {
        auto lo = log.events[pick(rng)].timestamp, hi = log.events[pick(rng)].timestamp;
        if (hi < lo) std::swap(lo, hi);
        const std::string r = "r" + std::to_string(actor(rng));
        const std::string c = log.events[pick(rng)].case_id;
        bool expected = false;
        for (const auto& e : log.events) expected = expected || (e.actor == r && e.case_id != c && lo < e.timestamp && e.timestamp < hi);
        ASSERT_EQ(idx.busy_elsewhere(r, lo, hi, c), expected) << "query " << q;
    }
}

TEST(ClassifyLog, MatchesBruteForcePredicates) {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        std::mt19937_64 rng(seed);
        const auto log = validate_and_sort(oracle::random_log(rng, 1500, 120, 9, 0.03, 4000));
        EXPECT_EQ(labels(classify_log(log)), oracle::brute_force_classify(log)) << "seed " << seed;
    }
}

TEST(ClassifyLog, ParallelEqualsSerial) {
    std::mt19937_64 rng(5);
    const auto log = validate_and_sort(oracle::random_log(rng, 3000, 200, 10));
    EXPECT_EQ(labels(classify_log(log, 1)), labels(classify_log(log, 4)));
}

TEST(ClassifyLog, InvariantUnderRowPermutationWithoutTies) {
    std::mt19937_64 rng(8);
    auto log = oracle::random_log(rng, 600, 50, 6, 0.0, 1000000);
    std::sort(log.events.begin(), log.events.end(), [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    log.events.erase(std::unique(log.events.begin(), log.events.end(),
                                 [](const Event& a, const Event& b) { return a.timestamp == b.timestamp; }),
                     log.events.end());
    auto shuffled = log;
    std::shuffle(shuffled.events.begin(), shuffled.events.end(), rng);
    for (std::size_t i = 0; i < shuffled.events.size(); ++i) shuffled.events[i].sequence_index = i;
    const auto a = classify_log(validate_and_sort(log));
    const auto b = classify_log(validate_and_sort(shuffled));
    ASSERT_EQ(a.transitions.size(), b.transitions.size());
    for (std::size_t k = 0; k < a.transitions.size(); ++k) {
        EXPECT_EQ(a.transitions[k].case_id, b.transitions[k].case_id);
        EXPECT_EQ(a.transitions[k].behavior, b.transitions[k].behavior);
        EXPECT_EQ(a.transitions[k].to_timestamp, b.transitions[k].to_timestamp);
    }
}

TEST(TransitionsCsv, RoundTrip) {
    std::mt19937_64 rng(3);
    const auto log = validate_and_sort(oracle::random_log(rng, 300, 30, 4));
    const auto c = classify_log(log);
    std::stringstream io;
    write_transitions_csv(io, c.transitions);
    const auto back = read_transitions_csv(io);
    ASSERT_EQ(back.size(), c.transitions.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        EXPECT_EQ(back[k].case_id, c.transitions[k].case_id);
        EXPECT_EQ(back[k].behavior, c.transitions[k].behavior);
        EXPECT_EQ(back[k].from_actor, c.transitions[k].from_actor);
        EXPECT_EQ(back[k].to_actor, c.transitions[k].to_actor);
        EXPECT_EQ(back[k].to_timestamp, c.transitions[k].to_timestamp);
        EXPECT_EQ(back[k].to_activity, c.transitions[k].to_activity);
    }
}

TEST(BehaviorCodes, RoundTrip) {
    for (auto b : kBehaviorTypes) EXPECT_EQ(behavior_from_code(behavior_code(b)), b);
    EXPECT_FALSE(behavior_from_code("X"));
}
