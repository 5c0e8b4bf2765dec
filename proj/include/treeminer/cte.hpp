#pragma once

#include <functional>
#include <string>
#include <vector>

#include "treeminer/acte.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

struct CteReport {
    std::size_t n = 0;
    int depth = 0;
    int k = 0;            // robots counted in the ratio
    int active = 0;       // robots that actually move
    long long rounds = 0;
    long long explore_rounds = 0;
    long long return_rounds = 0;
    long long acte_moves = 0;
    double bound = 0.0;   // (2n + 1200 k^2 D)/k + D + 1
    bool within_bound = true;
    bool all_home = true;
};

struct CteOptions {
    bool verify_tm = false;
    bool enforce = true;
    std::function<void(const ActeMove&)> on_move;
};

// (2n + gamma phi(k) D)/k + D + 1.
double cte_bound(std::size_t n, int k, int depth);

// Synchronous exploration: every round each robot gets one asynchronous
// move in index order. Once no dangling edge is left the robots walk home.
CteReport run_cte(const RootedTree& tree, int k, const CteOptions& opts = {});

// Same with only `active` of the k robots moving; the rest idle at the root.
CteReport run_cte_partial(const RootedTree& tree, int k, int active, const CteOptions& opts = {});

// Rounds of one depth-first search: 2(n-1).
long long dfs_baseline(const RootedTree& tree);

struct RatioRow {
    std::string name;
    std::size_t n = 0;
    int depth = 0;
    int k = 0;
    long long runtime = 0;
    double bound = 0.0;
    double ratio = 0.0;   // runtime / (n/k + D)
};

struct RatioTable {
    std::vector<RatioRow> rows;
    double worst_ratio = 0.0;
    double limit = 0.0;   // C sqrt(k)
    bool holds = true;
};

// Runs floor(sqrt k) robots on each tree and compares with n/k + D.
RatioTable competitive_ratio_experiment(const std::vector<std::pair<std::string, RootedTree>>& trees, int k,
                                        double c = 4.0);

} // namespace treeminer
