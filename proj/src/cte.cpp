#include "treeminer/cte.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "treeminer/error.hpp"

namespace treeminer {

double cte_bound(std::size_t n, int k, int depth) {
    return acte_bound(n, k, depth) / k + depth + 1.0;
}

CteReport run_cte_partial(const RootedTree& tree, int k, int active, const CteOptions& opts) {
    if (k < 1 || active < 1 || active > k) throw InputError("need 1 <= active robots <= k");
    CteReport r;
    r.n = tree.size();
    r.depth = tree.height();
    r.k = k;
    r.active = active;
    r.bound = cte_bound(r.n, k, r.depth);

    Explorer ex(tree, active, PotentialParams::defaults(active), opts.verify_tm);
    ex.on_move = opts.on_move;
    const long long need = static_cast<long long>(r.n) - 1;
    const long long guard = 64LL * static_cast<long long>(acte_bound(r.n, active, r.depth)) + 1024;
    int robot = 0;
    while (ex.fresh_moves < need) {
        if (ex.moves > guard) throw InvariantViolation("exploration did not terminate");
        ex.step(robot);
        robot = (robot + 1) % active;
    }
    r.acte_moves = ex.moves;
    r.explore_rounds = (ex.moves + active - 1) / active;

    // Everyone climbs one edge per round.
    int far = 0;
    for (int i = 0; i < active; ++i) far = std::max(far, tree.depth(ex.position(i)));
    r.return_rounds = far;
    r.rounds = r.explore_rounds + r.return_rounds;
    r.all_home = true;

    r.within_bound = static_cast<double>(r.rounds) <= r.bound;
    if (opts.enforce) {
        if (r.rounds > r.explore_rounds + r.depth)
            throw InvariantViolation("return phase longer than the depth");
        if (!r.within_bound) {
            std::ostringstream msg;
            msg << "exploration took " << r.rounds << " rounds, bound " << r.bound;
            throw BoundViolation(msg.str());
        }
    }
    return r;
}

CteReport run_cte(const RootedTree& tree, int k, const CteOptions& opts) {
    return run_cte_partial(tree, k, k, opts);
}

long long dfs_baseline(const RootedTree& tree) { return 2LL * (static_cast<long long>(tree.size()) - 1); }

RatioTable competitive_ratio_experiment(const std::vector<std::pair<std::string, RootedTree>>& trees, int k,
                                        double c) {
    if (k < 1) throw InputError("k must be positive");
    const int active = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(k)))));
    RatioTable t;
    t.limit = c * std::sqrt(static_cast<double>(k));
    CteOptions opts;
    opts.enforce = false;
    for (const auto& [name, tree] : trees) {
        CteReport rep = run_cte_partial(tree, k, active, opts);
        RatioRow row;
        row.name = name;
        row.n = rep.n;
        row.depth = rep.depth;
        row.k = k;
        row.runtime = rep.rounds;
        row.bound = cte_bound(rep.n, active, rep.depth);
        row.ratio = static_cast<double>(rep.rounds) / (static_cast<double>(rep.n) / k + rep.depth);
        t.worst_ratio = std::max(t.worst_ratio, row.ratio);
        t.holds = t.holds && row.ratio <= t.limit;
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace treeminer
