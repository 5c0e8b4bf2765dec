#include <doctest.h>

#include <random>
#include <sstream>

#include "treeminer/error.hpp"
#include "treeminer/tree.hpp"

using namespace treeminer;

namespace {

// Root 0; leaves 1 (length 1) and 2 (length 2).
RootedTree two_leaves() {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    t.add_child(0, 2.0, 2);
    return t;
}

RootedTree random_tree(std::mt19937_64& rng, int n) {
    RootedTree t(0);
    std::uniform_real_distribution<double> len(0.5, 3.0);
    for (int i = 1; i < n; ++i) t.add_child(std::uniform_int_distribution<int>(0, i - 1)(rng), len(rng), i);
    return t;
}

} // namespace

TEST_CASE("lca and distance basics") {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    t.add_child(1, 2.0, 2);
    CHECK(lca(t, 2, 2) == 2);
    CHECK(lca(t, 2, 0) == 0);
    CHECK(lca(t, 1, 2) == 1);
    CHECK(distance(t, 2, 2) == 0.0);
    CHECK(distance(two_leaves(), 1, 2) == doctest::Approx(3.0));
    CHECK_THROWS_AS(lca(t, 0, 7), InputError);
}

TEST_CASE("distance matches all-pairs shortest paths") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        RootedTree t = random_tree(rng, 10);
        const double inf = 1e18;
        std::vector<std::vector<double>> d(10, std::vector<double>(10, inf));
        for (int i = 0; i < 10; ++i) d[i][i] = 0.0;
        for (int i = 1; i < 10; ++i) {
            int p = t.parent(i);
            d[i][p] = d[p][i] = t.edge_length(i);
        }
        for (int m = 0; m < 10; ++m)
            for (int i = 0; i < 10; ++i)
                for (int j = 0; j < 10; ++j) d[i][j] = std::min(d[i][j], d[i][m] + d[m][j]);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) {
                CHECK(distance(t, i, j) == doctest::Approx(d[i][j]));
                CHECK(distance(t, i, j) == doctest::Approx(distance(t, j, i)));
            }
    }
}

TEST_CASE("extend_config sums leaves") {
    RootedTree one(0);
    one.add_child(0, 1.0, 1);
    DiscreteConfig c{{{1, 4}}};
    auto v = extend_config(one, c);
    CHECK(v.at(0) == 4);
    CHECK(v.at(1) == 4);

    DiscreteConfig c2{{{1, 2}, {2, 3}}};
    CHECK(extend_config(two_leaves(), c2).at(0) == 5);
    CHECK(extend_config(two_leaves(), c).at(2) == 0);
    DiscreteConfig inner{{{0, 1}}};
    CHECK_THROWS_AS(extend_config(two_leaves(), inner), InputError);
}

TEST_CASE("ot_cost is a metric and matches plans") {
    RootedTree t = two_leaves();
    DiscreteConfig a{{{1, 2}, {2, 1}}}, b{{{1, 1}, {2, 2}}};
    CHECK(ot_cost(t, a, a) == 0.0);
    CHECK(ot_cost(t, a, b) == doctest::Approx(3.0));
    CHECK(ot_plan(t, a, a).empty());
    auto plan = ot_plan(t, a, b);
    REQUIRE(plan.size() == 1);
    CHECK(plan[0] == UnitMove{1, 2});
    DiscreteConfig bad{{{1, 1}, {2, 1}}};
    CHECK_THROWS_AS(ot_cost(t, a, bad), InputError);

    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        RootedTree r = random_tree(rng, 9);
        auto leaves = r.leaves();
        auto random_config = [&] {
            DiscreteConfig c;
            for (NodeId l : leaves) c.weights[l] = 0;
            for (int i = 0; i < 6; ++i) c.weights[leaves[rng() % leaves.size()]]++;
            return c;
        };
        DiscreteConfig x = random_config(), y = random_config(), z = random_config();
        CHECK(ot_cost(r, x, y) == doctest::Approx(ot_cost(r, y, x)));
        CHECK(ot_cost(r, x, z) <= ot_cost(r, x, y) + ot_cost(r, y, z) + 1e-9);
        CHECK((ot_cost(r, x, y) == 0.0) == (x == y));
        double pc = 0.0;
        for (const auto& mv : ot_plan(r, x, y)) pc += distance(r, mv.src, mv.dst);
        CHECK(pc == doctest::Approx(ot_cost(r, x, y)));
    }
}

TEST_CASE("fractional plan on node masses") {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    t.add_child(1, 1.0, 2);
    t.add_child(1, 1.0, 3);
    auto plan = ot_plan_nodes(t, {{1, 1.0}}, {{2, 0.5}, {3, 0.5}});
    CHECK(plan_cost(t, plan) == doctest::Approx(1.0));
    CHECK(plan_cost(t, ot_plan_nodes(t, {{0, 1.0}}, {{0, 1.0}})) == 0.0);
}

TEST_CASE("normalize_simple merges unary nodes") {
    RootedTree t(0);
    t.add_child(0, 1.0, 1);
    t.add_child(1, 2.0, 2);
    RootedTree s = normalize_simple(t);
    CHECK(s.is_simple());
    CHECK(s.size() == 2);
    CHECK(s.root_distance(2) == doctest::Approx(3.0));

    RootedTree already = two_leaves();
    CHECK(normalize_simple(already).size() == 3);

    // Delete one of two siblings below an internal node.
    RootedTree u(0);
    u.add_child(0, 1.0, 1);
    u.add_child(0, 1.5, 2);
    u.add_child(1, 2.0, 3);
    u.add_child(1, 0.5, 4);
    double before = u.root_distance(3);
    u.remove_leaf(4);
    normalize_simple_in_place(u);
    CHECK(u.is_simple());
    CHECK(u.root_distance(3) == doctest::Approx(before));
    CHECK(distance(u, 3, 2) == doctest::Approx(before + 1.5));
}

TEST_CASE("tree file round trip") {
    std::istringstream in("# comment\ntree 3 0\n1 0 1\n2 1 0.25\n");
    RootedTree t = read_tree(in);
    CHECK(t.size() == 3);
    CHECK(t.edge_length(2) == 0.25);
    std::ostringstream out;
    write_tree(out, t);
    std::istringstream back(out.str());
    RootedTree u = read_tree(back);
    CHECK(u.parent(2) == 1);
    std::istringstream bad("tree 3 0\n1 0 1\n");
    CHECK_THROWS_AS(read_tree(bad), InputError);
    std::istringstream neg("tree 2 0\n1 0 -1\n");
    CHECK_THROWS_AS(read_tree(neg), InputError);
}
