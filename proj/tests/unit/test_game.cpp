#include <doctest.h>

#include <sstream>

#include "treeminer/error.hpp"
#include "treeminer/game.hpp"

using namespace treeminer;

TEST_CASE("initial game") {
    GameState g = initial_game(4);
    CHECK(g.tree.size() == 2);
    CHECK(g.config.at(1) == 4);
    CHECK(g.cost == 0.0);
}

TEST_CASE("random adversary runs clean with checks on") {
    for (int k : {2, 3, 5}) {
        GameState g = initial_game(k);
        RandomAdversary adv(static_cast<std::uint64_t>(k));
        RunOptions o;
        o.max_moves = 150;
        o.check = true;
        RunReport r = run_adversary(g, adv, PotentialParams::defaults(k), o);
        CHECK(r.clean());
        CHECK(r.events >= r.moves);
        CHECK(r.worst_master_ratio <= 1.0);
        CHECK(r.worst_depth_ratio <= 1.0);
        for (const auto& [leaf, x] : g.config.weights) CHECK(x >= 1);
        CHECK(g.tree.is_simple());
    }
}

TEST_CASE("master inequality fails with a tiny gamma") {
    PotentialParams p = PotentialParams::defaults(4);
    p.gamma = 0.5;
    GameState g = initial_game(4);
    RandomAdversary adv(9);
    RunOptions o;
    o.max_moves = 200;
    o.check = true;
    RunReport r = run_adversary(g, adv, p, o);
    CHECK(r.master_violations > 0);
}

TEST_CASE("moves leave the leaf the adversary touched") {
    GameState g = initial_game(5);
    RandomAdversary adv(4);
    RunOptions o;
    o.max_moves = 200;
    run_adversary(g, adv, PotentialParams::defaults(5), o);
    NodeId origin = kNoNode;
    bool elongation_or_delete = false;
    std::size_t moves = 0;
    for (const auto& ev : g.event_log) {
        if (ev.kind == EventKind::Move) {
            if (elongation_or_delete) CHECK(ev.leaf == origin);
            ++moves;
        } else {
            origin = ev.leaf;
            elongation_or_delete = ev.kind != EventKind::Fork;
        }
    }
    CHECK(moves > 0);
}

TEST_CASE("fork children get the even split") {
    PotentialParams p = PotentialParams::defaults(7);
    GameState g = initial_game(7);
    ctm_apply(g, CtmMove::fork(1, 3), p);
    int total = 0;
    for (const auto& [leaf, x] : g.config.weights) {
        CHECK(x >= 2);
        CHECK(x <= 3);
        total += x;
    }
    CHECK(total == 7);
    CHECK(g.config.weights.size() == 3);
}

TEST_CASE("deepest adversary stays within the mining bound") {
    const int k = 4;
    PotentialParams p = PotentialParams::defaults(k);
    GameState g = initial_game(k);
    DeepestAdversary adv(1.0);
    RunOptions o;
    o.max_moves = 400;
    RunReport r = run_adversary(g, adv, p, o);
    CHECK(r.worst_depth_ratio <= 1.0);
    double shallow = 1e18;
    for (const auto& [leaf, x] : g.config.weights) shallow = std::min(shallow, g.tree.root_distance(leaf));
    CHECK(g.cost <= 1200.0 * k * k * shallow);
}

TEST_CASE("scripted adversary and illegal moves") {
    std::istringstream in("# grow then split\nE 1 0.5\nF 1 2\n");
    ScriptAdversary s = ScriptAdversary::parse(in);
    GameState g = initial_game(4);
    RunOptions o;
    RunReport r = run_adversary(g, s, PotentialParams::defaults(4), o);
    CHECK(r.moves == 2);
    CHECK(g.config.weights.size() == 2);

    GameState h = initial_game(2);
    CHECK_THROWS_AS(ctm_apply(h, CtmMove::fork(1, 2), PotentialParams::defaults(2)), RuleViolation);
    CHECK_THROWS_AS(ctm_apply(h, CtmMove::remove(1), PotentialParams::defaults(2)), RuleViolation);
    std::istringstream bad("Q 1\n");
    CHECK_THROWS_AS(ScriptAdversary::parse(bad), InputError);
    CHECK_THROWS_AS(make_adversary("nope", 0), InputError);
}
