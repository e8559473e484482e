#include <doctest.h>

#include <set>

#include "psplit/errors.hpp"
#include "psplit/scheduler.hpp"

using namespace psplit;

TEST_CASE("select_blocks examples") {
    SUBCASE("full") {
        Scheduler s(SchedulePolicy{}, 4);
        for (long k = 1; k <= 5; ++k) CHECK(s.select_blocks(k) == std::vector<std::size_t>{0, 1, 2, 3});
    }
    SUBCASE("round robin") {
        SchedulePolicy p;
        p.kind = SelectionKind::round_robin;
        p.coverage_window = 3;
        Scheduler s(p, 3);
        CHECK(s.select_blocks(1) == std::vector<std::size_t>{0});
        CHECK(s.select_blocks(2) == std::vector<std::size_t>{1});
        CHECK(s.select_blocks(3) == std::vector<std::size_t>{2});
        CHECK(s.select_blocks(4) == std::vector<std::size_t>{0});
    }
    SUBCASE("calls must be consecutive") {
        Scheduler s(SchedulePolicy{}, 2);
        CHECK_THROWS_AS(s.select_blocks(2), ContractError);
    }
}

TEST_CASE("seeded random selection forces overdue blocks") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SchedulePolicy p;
        p.kind = SelectionKind::seeded_random;
        p.p_select = 0.5;
        p.seed = seed;
        p.coverage_window = 4;
        Scheduler s(p, 3);
        std::vector<long> last(3, 0);
        for (long k = 1; k <= 400; ++k) {
            const auto sel = s.select_blocks(k);
            CHECK_FALSE(sel.empty());
            for (auto i : sel) last[i] = k;
            for (std::size_t i = 0; i < 3; ++i) CHECK(k - last[i] < 4);
        }
    }
}

TEST_CASE("low selection probability still covers every window") {
    SchedulePolicy p;
    p.kind = SelectionKind::seeded_random;
    p.p_select = 0.01;
    p.seed = 3;
    p.coverage_window = 5;
    Scheduler s(p, 6);
    std::vector<long> last(6, 0);
    for (long k = 1; k <= 500; ++k) {
        for (auto i : s.select_blocks(k)) last[i] = k;
        for (auto l : last) CHECK(k - l < 5);
    }
}

TEST_CASE("delayed_index examples") {
    SUBCASE("zero") {
        Scheduler s(SchedulePolicy{}, 2);
        CHECK(s.delayed_index(0, 7) == 7);
    }
    SUBCASE("fixed") {
        SchedulePolicy p;
        p.delay_kind = DelayKind::fixed;
        p.fixed_delay = 2;
        p.max_delay = 2;
        Scheduler s(p, 2);
        CHECK(s.delayed_index(0, 10) == 8);
        CHECK(s.delayed_index(1, 1) == 1);
    }
    SUBCASE("seeded random stays in range and replays") {
        SchedulePolicy p;
        p.delay_kind = DelayKind::seeded_random;
        p.max_delay = 3;
        p.delay_seed = 77;
        Scheduler a(p, 2), b(p, 2);
        std::set<long> seen;
        for (int rep = 0; rep < 200; ++rep) {
            const long d = a.delayed_index(0, 5);
            CHECK(d >= 2);
            CHECK(d <= 5);
            CHECK(d == b.delayed_index(0, 5));
            seen.insert(d);
        }
        CHECK(seen.size() == 4);
        for (long k = 1; k <= 3; ++k) {
            const long d = a.delayed_index(1, k);
            CHECK(d >= 1);
            CHECK(d <= k);
        }
    }
}

TEST_CASE("identical policies replay identical schedules") {
    SchedulePolicy p;
    p.kind = SelectionKind::seeded_random;
    p.p_select = 0.3;
    p.seed = 12;
    p.coverage_window = 6;
    p.delay_kind = DelayKind::seeded_random;
    p.max_delay = 4;
    p.delay_seed = 8;
    Scheduler a(p, 5), b(p, 5);
    for (long k = 1; k <= 100; ++k) {
        const auto sa = a.select_blocks(k);
        CHECK(sa == b.select_blocks(k));
        for (auto i : sa) CHECK(a.delayed_index(i, k) == b.delayed_index(i, k));
    }
}

TEST_CASE("policy validation") {
    SchedulePolicy p;
    p.kind = SelectionKind::round_robin;
    p.block_size = 1;
    p.coverage_window = 2;
    CHECK_NOTHROW(p.validate(3));  // a tight window only forces extra blocks in
    {
        Scheduler s(p, 3);
        std::vector<long> last(3, 0);
        for (long k = 1; k <= 30; ++k) {
            for (auto i : s.select_blocks(k)) last[i] = k;
            for (auto l : last) CHECK(k - l < 2);
        }
    }
    p.coverage_window = 0;
    CHECK_NOTHROW(p.validate(3));
    CHECK(p.effective_window(3) == 3);

    SchedulePolicy q;
    q.delay_kind = DelayKind::fixed;
    q.fixed_delay = 3;
    q.max_delay = 2;
    CHECK_THROWS_AS(q.validate(2), ConfigError);

    SchedulePolicy r;
    r.kind = SelectionKind::seeded_random;
    r.p_select = 0.0;
    CHECK_THROWS_AS(r.validate(2), ConfigError);

    SchedulePolicy bs;
    bs.kind = SelectionKind::round_robin;
    bs.block_size = 4;
    CHECK_THROWS_AS(bs.validate(3), ConfigError);
}

TEST_CASE("history buffer") {
    auto point = [](double v) { return PrimalDualPoint{Vec{v}, {Vec{-v}}}; };
    SUBCASE("D = 0 keeps only the current point") {
        HistoryBuffer h(0);
        h.record(1, point(1));
        h.record(2, point(2));
        CHECK(h.read(2).z == Vec{2.0});
        CHECK_THROWS_AS(h.read(1), ContractError);
    }
    SUBCASE("D = 3 window") {
        HistoryBuffer h(3);
        for (long k = 1; k <= 5; ++k) h.record(k, point(double(k)));
        CHECK(h.read(2).z == Vec{2.0});
        CHECK(h.read(2).w[0] == Vec{-2.0});
        CHECK(h.read(5).z == Vec{5.0});
        CHECK_THROWS_AS(h.read(1), ContractError);
        CHECK_THROWS_AS(h.read(6), ContractError);
    }
    SUBCASE("records must be consecutive") {
        HistoryBuffer h(1);
        h.record(1, point(1));
        CHECK_THROWS_AS(h.record(3, point(3)), ContractError);
    }
}
