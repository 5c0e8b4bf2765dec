#include <doctest.h>

#include <cmath>
#include <sstream>

#include "treeminer/error.hpp"
#include "treeminer/ltt.hpp"

using namespace treeminer;

namespace {

// Source 0, layer 1 {1,2} with lengths 0 and 1, layer 2 {3,4} under 1 and 2, target 4.
LayeredTree small() {
    LayeredTree lt = LayeredTree::with_source(0);
    lt.add_node(1, 1, 0, 0);
    lt.add_node(1, 2, 0, 1);
    lt.add_node(2, 3, 1, 1);
    lt.add_node(2, 4, 2, 0);
    lt.target = 4;
    return lt;
}

LayeredTree path(int n) {
    LayeredTree lt = LayeredTree::with_source(0);
    for (int i = 1; i <= n; ++i) lt.add_node(i, i, i - 1, 1);
    lt.target = n;
    return lt;
}

} // namespace

TEST_CASE("layered instance basics") {
    LayeredTree lt = small();
    lt.validate();
    CHECK(lt.num_layers() == 2);
    CHECK(lt.width() == 2);
    CHECK(lt.total_length() == 2);
    CHECK(lt.depth() == 1);
    CHECK(lt.binary_lengths());

    std::stringstream io;
    write_layered(io, lt);
    LayeredTree back = read_layered(io);
    CHECK(back.layers == lt.layers);
    CHECK(back.parent == lt.parent);
    CHECK(back.length == lt.length);
    CHECK(back.target == lt.target);

    std::istringstream bad("layers 1\nlayer 1 5\nedge 9 5 1\ntarget 5\n");
    CHECK_THROWS_AS(read_layered(bad), InputError);
}

TEST_CASE("zero edges contract") {
    ContractedTree ct = contract_zero_edges(small());
    CHECK(ct.tree.size() == 3);
    CHECK(ct.rep.at(1) == ct.rep.at(0));
    CHECK(ct.rep.at(4) == ct.rep.at(2));
    CHECK(ct.rep.at(3) != ct.rep.at(0));
    CHECK(ct.reveal[static_cast<std::size_t>(ct.rep.at(2))] == 1);
    CHECK(ct.witness[2].at(ct.rep.at(4)) == 4);
}

TEST_CASE("long edges subdivide") {
    LayeredTree lt = LayeredTree::with_source(0);
    lt.add_node(1, 1, 0, 3);
    lt.add_node(2, 2, 1, 0);
    lt.target = 2;
    LayeredTree s = subdivide_lengths(lt);
    s.validate();
    CHECK(s.binary_lengths());
    CHECK(s.depth() == 3);
    CHECK(s.total_length() == 3);
}

TEST_CASE("a width one instance costs its depth") {
    LayeredTree lt = path(12);
    FractionalTraversal ft = fractional_traverse(lt, 2);
    CHECK(ft.transport_cost == doctest::Approx(12.0));
    CHECK(ft.within_bound);
    std::mt19937_64 rng(1);
    Rounding r(lt, ft);
    std::vector<NodeId> p;
    CHECK(r.sample(rng, &p) == doctest::Approx(12.0));
    CHECK(p.back() == 12);
    CHECK(rounded_traverse(lt, 2, 3) == doctest::Approx(12.0));
}

TEST_CASE("fractional traversal respects its bound and per-layer transport") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        LayeredTree lt = gen_average_case(6, 15, seed);
        FractionalTraversal ft = fractional_traverse(lt, 3);
        CHECK(ft.within_bound);
        CHECK(ft.expected_cost == doctest::Approx(double(ft.moves) / 3));
        for (std::size_t i = 0; i < ft.window_moves.size(); ++i)
            CHECK(ft.window_transport[i] <= double(ft.window_moves[i]) / 3 + 1e-9);
        MonteCarlo mc = rounded_monte_carlo(lt, ft, 4000, seed);
        CHECK(std::abs(mc.mean - ft.transport_cost) <= 5 * mc.std_error + 1e-9);
    }
}

TEST_CASE("generators") {
    LayeredTree u = gen_unit_layered(5, 20, 2);
    u.validate();
    CHECK(u.depth() == 20);
    CHECK(u.total_length() <= 5 * 20);
    CHECK(dfs_traverse_cost(u) >= u.depth());

    double sum = 0;
    const int reps = 40;
    for (int s = 0; s < reps; ++s) {
        LayeredTree a = gen_average_case(8, 30, static_cast<std::uint64_t>(s));
        a.validate();
        sum += static_cast<double>(a.total_length());
    }
    CHECK(sum / reps == doctest::Approx(8 * 30 / 2.0).epsilon(0.1));
}

TEST_CASE("robot count tuning") {
    CHECK(tune_k(path(3)) == 2);
    CHECK(tune_k(gen_unit_layered(16, 4, 0)) == 4);
    CHECK(tune_k(gen_unit_layered(10, 4, 0)) == 3);
}
