#include <doctest.h>

#include <sstream>

#include "treeminer/error.hpp"
#include "treeminer/game.hpp"
#include "treeminer/harness.hpp"
#include "treeminer/trace.hpp"

using namespace treeminer;

TEST_CASE("tree families") {
    CHECK(gen_tree(Family::Path, 10, 9, 0).height() == 9);
    CHECK(gen_tree(Family::Star, 10, 3, 0).height() == 1);
    CHECK(gen_tree(Family::Broom, 50, 7, 0).height() == 7);
    for (Family f : all_families()) {
        CHECK(parse_family(to_string(f)) == f);
        int n = f == Family::Path ? 21 : 200;
        RootedTree t = gen_tree(f, n, 20, 4);
        CHECK(t.size() == static_cast<std::size_t>(n));
        CHECK(t.height() <= 20);
    }
    CHECK_FALSE(feasible(Family::Path, 100, 5));
    CHECK_FALSE(feasible(Family::Binary, 100, 5));
    CHECK_THROWS_AS(gen_tree(Family::Path, 100, 5, 0), InputError);
    CHECK_THROWS_AS(parse_family("cycle"), InputError);
}

TEST_CASE("empty suite writes only the header") {
    SuiteConfig c;
    BenchResult r = bench(c);
    std::ostringstream out;
    write_csv(out, r);
    CHECK(out.str() == "family,n,D,depth,k,scheduler,seed,mode,value,bound,margin,wall,status\n");
}

TEST_CASE("bench is deterministic across thread counts") {
    SuiteConfig c;
    c.families = {Family::RandRec, Family::Spider};
    c.ns = {60};
    c.depths = {6};
    c.ks = {2, 3};
    c.seeds = 2;
    c.schedulers = {Scheduler::Random, Scheduler::Lopsided};
    c.threads = 1;
    std::ostringstream a, b;
    BenchResult r1 = bench(c);
    write_csv(a, r1);
    c.threads = 3;
    write_csv(b, bench(c));
    CHECK(a.str() == b.str());
    CHECK(r1.rows.size() == 2 * 2 * 2 * 3);
    CHECK(r1.failures == 0);
    CHECK(r1.bound_violations == 0);
}

TEST_CASE("trace replay") {
    const int k = 3;
    PotentialParams p = PotentialParams::defaults(k);
    GameState g = initial_game(k);
    std::ostringstream trace;
    write_line(trace, game_header(k, p, "random", 7));
    RandomAdversary adv(7);
    RunOptions o;
    o.max_moves = 40;
    std::size_t i = 0;
    run_adversary(g, adv, p, o, [&](const GameState& s, const GameEvent& ev) {
        write_line(trace, game_snapshot(i++, s, ev));
    });
    REQUIRE(i > 0);
    std::istringstream clean(trace.str());
    CheckAllReport ok = check_all(clean);
    CHECK(ok.events == i);
    CHECK(ok.clean);

    std::istringstream empty("");
    CHECK(check_all(empty).clean);

    // Pile every robot onto one leaf and drop the others: the bounds break.
    std::string text = trace.str();
    std::istringstream lines(text);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    Json snap = Json::parse(first);
    Json x = Json::array();
    for (const auto& e : snap["x"]) x.push_back(Json::array({e[0], 0}));
    x[0][1] = 1;
    snap["x"] = x;
    std::istringstream bad(header + "\n" + snap.dump() + "\n");
    CHECK_FALSE(check_all(bad).clean);

    std::istringstream junk(header + "\nnot json\n");
    CHECK_THROWS_AS(check_all(junk), InputError);
}
