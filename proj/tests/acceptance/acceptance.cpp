// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "treeminer/acte.hpp"
#include "treeminer/cte.hpp"
#include "treeminer/error.hpp"
#include "treeminer/fractional.hpp"
#include "treeminer/game.hpp"
#include "treeminer/harness.hpp"
#include "treeminer/ltt.hpp"
#include "treeminer/potential.hpp"
#include "treeminer/trace.hpp"
#include "treeminer/tree.hpp"

using namespace treeminer;

namespace {

int failures = 0;
std::set<int> selected;   // empty: all criteria

void report(int id, bool ok, const std::string& detail, double seconds) {
    if (!ok) ++failures;
    std::printf("%s %d %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), seconds);
    std::fflush(stdout);
}

// Runs one criterion, turning an escaped exception into a FAIL line.
void criterion(int id, const std::function<std::pair<bool, std::string>()>& body) {
    if (!selected.empty() && !selected.count(id)) return;
    auto start = std::chrono::steady_clock::now();
    std::pair<bool, std::string> r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    report(id, r.first, r.second, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

// Random simple tree with the given number of leaves and lengths in [lo, hi].
RootedTree random_simple(std::mt19937_64& rng, int leaves, double lo = 0.2, double hi = 3.0) {
    std::uniform_real_distribution<double> len(lo, hi);
    RootedTree t(0);
    t.add_child(0, len(rng));
    while (static_cast<int>(t.leaves().size()) < leaves) {
        auto ls = t.leaves();
        NodeId l = ls[rng() % ls.size()];
        int m = static_cast<int>(t.leaves().size()) + 2 <= leaves && rng() % 3 == 0 ? 3 : 2;
        for (int i = 0; i < m; ++i) t.add_child(l, len(rng));
    }
    return t;
}

DiscreteConfig random_config(std::mt19937_64& rng, const std::vector<NodeId>& leaves, int k) {
    DiscreteConfig c;
    for (NodeId l : leaves) c.weights[l] = 0;
    for (int i = 0; i < k; ++i) ++c.weights[leaves[rng() % leaves.size()]];
    return c;
}

// Edges (by child node) on the path between two leaves.
std::set<NodeId> path_edges(const RootedTree& t, NodeId u, NodeId v) {
    NodeId a = lca(t, u, v);
    std::set<NodeId> e;
    for (NodeId w = u; w != a; w = t.parent(w)) e.insert(w);
    for (NodeId w = v; w != a; w = t.parent(w)) e.insert(w);
    return e;
}

struct Plan {
    std::vector<UnitMove> moves;
    double cost = 0.0;
};

// Every integer transport plan from surplus leaves to deficit leaves.
void enumerate_plans(const RootedTree& t, std::vector<std::pair<NodeId, int>> src,
                     std::vector<std::pair<NodeId, int>> dst, std::size_t i, Plan& cur, std::vector<Plan>& out) {
    while (i < src.size() && src[i].second == 0) ++i;
    if (i == src.size()) {
        out.push_back(cur);
        return;
    }
    for (auto& [d, need] : dst) {
        if (need == 0) continue;
        --need;
        --src[i].second;
        cur.moves.push_back({src[i].first, d});
        double len = distance(t, src[i].first, d);
        cur.cost += len;
        enumerate_plans(t, src, dst, i, cur, out);
        cur.cost -= len;
        cur.moves.pop_back();
        ++src[i].second;
        ++need;
    }
}

std::pair<bool, std::string> exploration_bounds(bool cte_rows) {
    SuiteConfig cfg = SuiteConfig::defaults();
    cfg.acte = !cte_rows;
    cfg.cte = cte_rows;
    cfg.verify_tm = true;
    BenchResult r = bench(cfg);
    double worst = 1e300;
    std::string bad;
    for (const auto& row : r.rows) {
        worst = std::min(worst, row.margin);
        if (row.status != "ok" && bad.empty())
            bad = " first " + row.status + ": " + row.family + " n=" + std::to_string(row.n) +
                  " D=" + std::to_string(row.nominal_depth) + " k=" + std::to_string(row.k) + " " + row.scheduler;
    }
    bool ok = r.bound_violations == 0 && r.failures == 0 && !r.rows.empty();
    return {ok, std::to_string(r.rows.size()) + " runs, " + std::to_string(r.bound_violations) + " over bound, " +
                    std::to_string(r.failures) + " invariant failures, " + std::to_string(r.skipped) +
                    " infeasible shapes skipped, min margin " + num(worst) + bad};
}

struct GameRuns {
    std::size_t runs = 0, events = 0, short_runs = 0;
    std::size_t master = 0, bounds = 0, below_one = 0, not_simple = 0;
    double worst_master = 0.0;
    std::string first;
};

const GameRuns& game_runs() {
    static GameRuns g = [] {
        GameRuns out;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            int k = 2 + static_cast<int>(seed % 7);
            PotentialParams p = PotentialParams::defaults(k);
            GameState s = initial_game(k);
            RandomAdversary adv(seed);
            RunOptions o;
            o.max_moves = 500;
            o.check = true;
            o.game.record = false;
            RunReport r = run_adversary(s, adv, p, o);
            ++out.runs;
            out.events += r.events;
            if (r.events < 500) ++out.short_runs;
            out.master += r.master_violations;
            out.bounds += r.bound_violations;
            out.below_one += r.x_below_one;
            out.not_simple += r.not_simple;
            out.worst_master = std::max(out.worst_master, r.worst_master_ratio);
            if (out.first.empty() && !r.first_violation.empty())
                out.first = " seed " + std::to_string(seed) + ": " + r.first_violation;
        }
        return out;
    }();
    return g;
}

} // namespace

// Optional arguments name the criteria to run.
int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    criterion(1, [] { return exploration_bounds(false); });
    criterion(2, [] { return exploration_bounds(true); });

    criterion(3, [] {
        const GameRuns& g = game_runs();
        bool ok = g.master == 0 && g.short_runs == 0;
        return std::make_pair(ok, std::to_string(g.runs) + " runs, " + std::to_string(g.events) + " events, " +
                                      std::to_string(g.short_runs) + " short runs, " + std::to_string(g.master) +
                                      " violations, worst (Cost+Psi(x))/(gamma Psi(y)) " + num(g.worst_master) + g.first);
    });

    criterion(4, [] {
        const GameRuns& g = game_runs();
        bool ok = g.bounds == 0 && g.below_one == 0 && g.not_simple == 0 && g.short_runs == 0;
        return std::make_pair(ok, std::to_string(g.events) + " events, " + std::to_string(g.bounds) +
                                      " x/y bound failures, " + std::to_string(g.below_one) + " leaves below one, " +
                                      std::to_string(g.not_simple) + " non-simple trees" + g.first);
    });

    criterion(5, [] {
        std::mt19937_64 rng(5);
        double worst_kkt = 0, worst_gap = 0, worst_grid = 0;
        int small = 0;
        for (int rep = 0; rep < 200; ++rep) {
            int leaves = 1 + static_cast<int>(rng() % 30);
            if (rep % 4 == 0) leaves = 1 + static_cast<int>(rng() % 4);
            RootedTree t = random_simple(rng, leaves);
            int k = 2 + static_cast<int>(rng() % 9);
            PotentialParams p = PotentialParams::defaults(k);
            FractionalSolution s = solve_fractional(t, k, p);
            worst_kkt = std::max(worst_kkt, kkt_certificate(t, s.y, p).residual);
            worst_gap = std::max(worst_gap, equilibrium_gap(t, s.y, p));
            if (t.leaves().size() <= 4) {
                ++small;
                FractionalSolution g = grid_oracle(t, k, p);
                worst_grid = std::max(worst_grid, std::abs(g.objective - s.objective));
            }
        }
        bool ok = worst_kkt <= 1e-8 && worst_gap <= 1e-6 && worst_grid <= 1e-4;
        return std::make_pair(ok, "200 trees, max KKT residual " + num(worst_kkt) + ", max equilibrium gap " +
                                      num(worst_gap) + ", " + std::to_string(small) +
                                      " trees vs grid oracle, max objective gap " + num(worst_grid));
    });

    criterion(6, [] {
        std::mt19937_64 rng(6);
        int instances = 0, plans_checked = 0, overlapping = 0, failures6 = 0, ot_mismatch = 0;
        double tightest = 1e300;
        while (instances < 500) {
            int leaves = 2 + static_cast<int>(rng() % 4);
            int k = 1 + static_cast<int>(rng() % 5);
            RootedTree t = random_simple(rng, leaves);
            PotentialParams p = PotentialParams::defaults(k);
            auto ls = t.leaves();
            DiscreteConfig x = random_config(rng, ls, k), y = random_config(rng, ls, k);
            if (x == y) continue;
            ++instances;
            std::vector<std::pair<NodeId, int>> src, dst;
            for (NodeId l : ls) {
                int d = x.at(l) - y.at(l);
                if (d > 0) src.push_back({l, d});
                if (d < 0) dst.push_back({l, -d});
            }
            std::vector<Plan> plans;
            Plan cur;
            enumerate_plans(t, src, dst, 0, cur, plans);
            double best = 1e300;
            for (const auto& pl : plans) best = std::min(best, pl.cost);
            if (std::abs(best - ot_cost(t, x, y)) > 1e-9) ++ot_mismatch;
            const double lhs = potential(t, x, p) - potential(t, y, p);
            for (const auto& pl : plans) {
                if (pl.cost > best + 1e-9) continue;
                ++plans_checked;
                double rhs = 0.0;
                for (const auto& mv : pl.moves) rhs += tension(t, x, mv.src, mv.dst, p).tension;
                bool overlap = false;
                for (std::size_t i = 0; i < pl.moves.size() && !overlap; ++i) {
                    auto ei = path_edges(t, pl.moves[i].src, pl.moves[i].dst);
                    for (std::size_t j = i + 1; j < pl.moves.size() && !overlap; ++j)
                        for (NodeId e : path_edges(t, pl.moves[j].src, pl.moves[j].dst))
                            if (ei.count(e) && t.edge_length(e) > 0) overlap = true;
                }
                double tol = 1e-9 * std::max(1.0, std::abs(rhs));
                if (overlap) {
                    ++overlapping;
                    tightest = std::min(tightest, rhs - lhs);
                    if (!(lhs < rhs - tol)) ++failures6;
                } else if (lhs > rhs + tol) {
                    ++failures6;
                }
            }
        }
        bool ok = failures6 == 0 && ot_mismatch == 0;
        return std::make_pair(ok, std::to_string(instances) + " instances, " + std::to_string(plans_checked) +
                                      " optimal plans (" + std::to_string(overlapping) + " with overlap, min gap " +
                                      num(tightest) + "), " + std::to_string(failures6) + " failures, " +
                                      std::to_string(ot_mismatch) + " OT mismatches");
    });

    criterion(7, [] {
        int matrices = 0, bad = 0;
        for (std::uint64_t seed = 0; matrices < 200 && seed < 1000; ++seed) {
            int k = 3 + static_cast<int>(seed % 6);
            PotentialParams p = PotentialParams::defaults(k);
            GameState s = initial_game(k);
            RandomAdversary adv(1000 + seed);
            RunOptions o;
            o.max_moves = 12;
            o.game.record = false;
            run_adversary(s, adv, p, o);
            if (s.tree.leaves().size() > 8) continue;
            FractionalSolution y = solve_fractional(s.tree, k, p);
            UltrametricHessian h = hessian(s.tree, y.y, p);
            ++matrices;
            if (!is_ultrametric(h.matrix, 1e-9) || !ultrametric_inverse_probe(h.matrix).holds) ++bad;
        }
        return std::make_pair(bad == 0 && matrices == 200,
                              std::to_string(matrices) + " Hessians, " + std::to_string(bad) + " failures");
    });

    criterion(8, [] {
        std::mt19937_64 rng(8);
        int probed = 0, bad = 0, tries = 0;
        std::string first;
        while (probed < 100 && tries < 5000) {
            ++tries;
            RootedTree t = random_simple(rng, 2 + static_cast<int>(rng() % 6), 0.5, 2.0);
            int k = 4 + static_cast<int>(rng() % 5);
            PotentialParams p = PotentialParams::defaults(k);
            auto ls = t.leaves();
            NodeId leaf = ls[rng() % ls.size()];
            ProbeReport e = elongation_monotonicity_probe(t, leaf, 1e-5, k, p);
            if (!e.applicable) continue;
            ++probed;
            ProbeReport d = deletion_monotonicity_probe(t, ls[rng() % ls.size()], k, p);
            if (!e.holds || (d.applicable && !d.holds)) {
                ++bad;
                if (first.empty()) first = " first: " + (e.holds ? d.failure : e.failure);
            }
        }
        return std::make_pair(bad == 0 && probed == 100,
                              std::to_string(probed) + " interior instances, " + std::to_string(bad) + " failures" + first);
    });

    criterion(9, [] {
        int over = 0, mc_bad = 0;
        double worst_z = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            int w = 2 + static_cast<int>(seed % 7);
            int n_layers = 10 + static_cast<int>(seed % 4) * 10;
            LayeredTree lt = seed % 2 ? gen_average_case(w, n_layers, seed) : gen_unit_layered(w, n_layers, seed);
            int k = 2 + static_cast<int>(seed % 3);
            FractionalTraversal ft = fractional_traverse(lt, k, false);
            if (!ft.within_bound || ft.expected_cost > ft.bound) ++over;
            MonteCarlo mc = rounded_monte_carlo(lt, ft, 10000, seed);
            double diff = std::abs(mc.mean - ft.transport_cost);
            if (mc.std_error > 0) worst_z = std::max(worst_z, diff / mc.std_error);
            if (diff > 3 * mc.std_error + 1e-9) ++mc_bad;
        }
        return std::make_pair(over == 0 && mc_bad == 0,
                              "100 instances, " + std::to_string(over) + " over bound, " + std::to_string(mc_bad) +
                                  " Monte Carlo means outside 3 SE (worst " + num(worst_z) + " SE)");
    });

    criterion(10, [] {
        bool ok = true;
        std::string detail;
        for (int w : {4, 16, 64}) {
            LayeredTree lt = gen_unit_layered(w, 200, static_cast<std::uint64_t>(w));
            int k = tune_k(lt);
            FractionalTraversal ft = fractional_traverse(lt, k, false);
            double d = static_cast<double>(lt.depth());
            double limit = 5 * std::sqrt(w) * d;
            double dfs = static_cast<double>(dfs_traverse_cost(lt));
            bool row = ft.expected_cost <= limit && dfs >= 0.5 * w * d;
            ok = ok && row;
            if (!detail.empty()) detail += "; ";
            detail += "w=" + std::to_string(w) + " k=" + std::to_string(k) + " cost " + num(ft.expected_cost) +
                      " <= " + num(limit) + ", dfs " + num(dfs) + " >= " + num(0.5 * w * d);
        }
        return std::make_pair(ok, detail);
    });

    criterion(11, [] {
        auto game_trace = [] {
            std::ostringstream out;
            const int k = 5;
            PotentialParams p = PotentialParams::defaults(k);
            GameState s = initial_game(k);
            write_line(out, game_header(k, p, "random", 11));
            RandomAdversary adv(11);
            RunOptions o;
            o.max_moves = 300;
            o.check = true;
            std::size_t i = 0;
            run_adversary(s, adv, p, o, [&](const GameState& st, const GameEvent& ev) {
                write_line(out, game_snapshot(i++, st, ev));
            });
            return out.str();
        };
        auto acte_trace = [] {
            std::ostringstream out;
            RootedTree t = gen_tree(Family::RandRec, 2000, 30, 11);
            ActeOptions o;
            o.scheduler = Scheduler::Random;
            o.seed = 11;
            std::size_t i = 0;
            o.on_move = [&](const ActeMove& mv) { write_line(out, move_record(i++, mv)); };
            run_acte(t, 6, o);
            return out.str();
        };
        auto ltt_trace = [] {
            std::ostringstream out;
            LayeredTree lt = gen_average_case(6, 40, 11);
            FractionalTraversal ft = fractional_traverse(lt, 3);
            for (std::size_t i = 0; i < ft.positions.size(); ++i)
                write_line(out, layer_record(static_cast<int>(i), ft.positions[i]));
            out << rounded_monte_carlo(lt, ft, 2000, 11).mean << '\n';
            return out.str();
        };
        auto csv = [](unsigned threads) {
            SuiteConfig c = SuiteConfig::defaults();
            c.ns = {100, 1000};
            c.seeds = 2;
            c.threads = threads;
            std::ostringstream out;
            write_csv(out, bench(c));
            return out.str();
        };
        bool g = game_trace() == game_trace();
        bool a = acte_trace() == acte_trace();
        bool l = ltt_trace() == ltt_trace();
        bool c = csv(1) == csv(4);
        return std::make_pair(g && a && l && c, std::string("game trace ") + (g ? "same" : "differs") +
                                                    ", exploration trace " + (a ? "same" : "differs") +
                                                    ", layered trace " + (l ? "same" : "differs") + ", bench CSV " +
                                                    (c ? "same" : "differs") + " across 1 and 4 threads");
    });

    return failures == 0 ? 0 : 1;
}
