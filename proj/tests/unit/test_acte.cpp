#include <doctest.h>

#include "treeminer/acte.hpp"
#include "treeminer/error.hpp"
#include "treeminer/harness.hpp"

using namespace treeminer;

TEST_CASE("scheduler names") {
    CHECK(parse_scheduler("lopsided") == Scheduler::Lopsided);
    CHECK(std::string(to_string(Scheduler::Random)) == "random");
    CHECK_THROWS_AS(parse_scheduler("fifo"), InputError);
    RobotScheduler rr(Scheduler::RoundRobin, 3, 0);
    CHECK(rr.next() == 0);
    CHECK(rr.next() == 1);
    CHECK(rr.next() == 2);
    CHECK(rr.next() == 0);
}

TEST_CASE("single node tree needs only the closing probe") {
    RootedTree t(0);
    ActeReport r = run_acte(t, 3);
    CHECK(r.moves == 1);
    CHECK(r.probe_moves == 1);
    CHECK(r.fresh_moves == 0);
}

TEST_CASE("lone robot is a depth-first search") {
    RootedTree t = gen_tree(Family::RandRec, 200, 10, 4);
    ActeReport r = run_acte(t, 1);
    CHECK(r.fresh_moves == 199);
    CHECK(r.moves == 2 * 199 + 1);
}

TEST_CASE("star with one robot per leaf") {
    const int n = 9;
    RootedTree t = gen_tree(Family::Star, n, 1, 0);
    ActeReport r = run_acte(t, n - 1);
    CHECK(r.fresh_moves == n - 1);
    CHECK(r.moves <= r.bound);
    CHECK(r.moves <= 2 * n + r.retarget_distance);
}

TEST_CASE("bounds hold across schedulers with the shadow checked") {
    for (Family f : {Family::RandRec, Family::Broom, Family::Spider, Family::Binary}) {
        RootedTree t = gen_tree(f, 400, 12, 17);
        for (Scheduler s : {Scheduler::RoundRobin, Scheduler::Random, Scheduler::Lopsided})
            for (int k : {2, 5, 8}) {
                ActeOptions o;
                o.scheduler = s;
                o.seed = 3;
                o.verify_tm = true;
                ActeReport r = run_acte(t, k, o);
                CHECK(r.fresh_moves == 399);
                CHECK(r.within_bound);
                CHECK(r.within_ledger);
            }
    }
}

TEST_CASE("every edge is walked and robots only use tree edges") {
    RootedTree t = gen_tree(Family::RandRec, 300, 15, 2);
    std::vector<int> walked(300, 0);
    ActeOptions o;
    o.scheduler = Scheduler::Random;
    o.seed = 1;
    o.on_move = [&](const ActeMove& mv) {
        if (mv.from == mv.to) return;
        bool edge = t.parent(mv.to) == mv.from || t.parent(mv.from) == mv.to;
        CHECK(edge);
        ++walked[static_cast<std::size_t>(t.parent(mv.to) == mv.from ? mv.to : mv.from)];
    };
    run_acte(t, 4, o);
    for (int u = 1; u < 300; ++u) CHECK(walked[static_cast<std::size_t>(u)] >= 1);
}

TEST_CASE("granting a move after the end is an error") {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    Explorer ex(t, 2, PotentialParams::defaults(2));
    while (!ex.finished()) ex.step(0);
    CHECK_THROWS_AS(ex.step(1), RuleViolation);
    CHECK_THROWS_AS(Explorer(t, 2, PotentialParams::defaults(2)).step(5), InputError);
}
