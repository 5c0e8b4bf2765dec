#include <doctest.h>

#include "treeminer/error.hpp"
#include "treeminer/potential.hpp"

using namespace treeminer;

namespace {

RootedTree unit_pair() {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    t.add_child(0, 1.0, 2);
    return t;
}

PotentialParams worked_example() {
    PotentialParams p;
    p.a = 80;
    p.b = 5;
    return p;
}

} // namespace

TEST_CASE("default constants") {
    for (int k : {2, 3, 8, 32}) {
        PotentialParams p = PotentialParams::defaults(k);
        CHECK(p.admissible(k));
        CHECK(p.phi(k) == doctest::Approx(25.0 * k * k));
        CHECK(p.gamma * p.phi(k) == doctest::Approx(1200.0 * k * k));
    }
    PotentialParams bad;
    bad.a = 1;
    CHECK_FALSE(bad.admissible(4));
    CHECK_THROWS_AS(bad.validate(4), InputError);
    CHECK_THROWS(phi(PotentialParams::defaults(2), -1.0));
}

TEST_CASE("tension sign and stability") {
    PotentialParams p = worked_example();
    RootedTree t = unit_pair();
    DiscreteConfig even{{{1, 2}, {2, 2}}};
    CHECK(tension(t, even, 1, 2, p).tension < 0);
    CHECK(stable(t, even, p));

    DiscreteConfig lop{{{1, 4}, {2, 0}}};
    TensionReport r = tension(t, lop, 1, 2, p);
    CHECK(r.tension >= 2.0);
    CHECK_FALSE(stable(t, lop, p));

    RootedTree single(0);
    single.add_child(0, 1.0, 1);
    CHECK(stable(single, DiscreteConfig{{{1, 3}}}, p));
}

TEST_CASE("settle balances two unit leaves") {
    PotentialParams p = worked_example();
    RootedTree t = unit_pair();
    SettleResult s = settle(t, DiscreteConfig{{{1, 4}, {2, 0}}}, p);
    CHECK(s.config.at(1) == 2);
    CHECK(s.config.at(2) == 2);
    CHECK(s.moves.size() == 2);
    CHECK(s.cost == doctest::Approx(4.0));
    CHECK(stable(t, s.config, p));

    SettleResult again = settle(t, s.config, p);
    CHECK(again.moves.empty());
    CHECK(again.cost == 0.0);
}

TEST_CASE("elongation event in closed form") {
    PotentialParams p = worked_example();
    RootedTree t = unit_pair();
    DiscreteConfig x{{{1, 2}, {2, 2}}};
    ElongationEvent ev = next_elongation_event(t, x, 1, p);
    double rate = p.phi(2) - p.phi(1) - 1.0;
    CHECK(rate == doctest::Approx(94.0));
    CHECK(ev.dest == 2);
    CHECK(ev.delta == doctest::Approx(tension(t, x, 1, 2, p).slack / rate));

    RootedTree longer = t;
    longer.set_edge_length(1, 1.0 + ev.delta);
    CHECK(tension(longer, x, 1, 2, p).slack == doctest::Approx(0.0).epsilon(1e-9));

    // Fine steps: the first move happens within one step of the event.
    const double step = 1e-4;
    RootedTree fine = t;
    double grown = 0.0;
    while (settle(fine, x, p).moves.empty()) {
        grown += step;
        fine.set_edge_length(1, 1.0 + grown);
    }
    CHECK(std::abs(grown - ev.delta) <= step + 1e-9);

    CHECK_THROWS_AS(next_elongation_event(t, DiscreteConfig{{{1, 1}, {2, 3}}}, 1, p), RuleViolation);
}

TEST_CASE("fork splits evenly and stays stable") {
    PotentialParams p = PotentialParams::defaults(7);
    RootedTree t = unit_pair();
    DiscreteConfig x{{{1, 4}, {2, 3}}};
    REQUIRE(stable(t, x, p));
    double d = fork_delta(t, x, 1, {10, 11, 12}, p);
    CHECK(d > 0.0);
    CHECK(d <= 1.0);
    ForkedState f = apply_fork(t, x, 1, {10, 11, 12}, d);
    CHECK(stable(f.tree, f.config, p));
    CHECK(f.config.at(10) == 2);
    CHECK(f.config.at(11) == 1);
    CHECK(f.config.at(12) == 1);
    CHECK(f.config.at(2) == 3);
    CHECK(f.tree.edge_length(10) == doctest::Approx(d));
}

TEST_CASE("potential of a config") {
    PotentialParams p = worked_example();
    RootedTree t = unit_pair();
    DiscreteConfig x{{{1, 1}, {2, 1}}};
    CHECK(potential(t, x, p) == doctest::Approx(2 * p.phi(1)));
    FractionalConfig y{{{1, 1.5}, {2, 0.5}}};
    CHECK(potential(t, y, p) == doctest::Approx(p.phi(1.5) + p.phi(0.5)));
}

TEST_CASE("settle ends on edges shorter than the slack tolerance") {
    // Moving a robot either way has zero tension and slack below 1e-9.
    PotentialParams p = PotentialParams::defaults(3);
    RootedTree t(0);
    t.add_child(0, 5.0, 1);
    t.add_child(1, 4e-10, 2);
    t.add_child(1, 4e-10, 3);
    DiscreteConfig c{{{2, 2}, {3, 1}}};
    CHECK(stable(t, c, p));
    SettleResult s = settle(t, c, p);
    CHECK(s.moves.empty());
}
