#include "treeminer/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treeminer {

PotentialParams PotentialParams::defaults(int k) {
    PotentialParams p;
    p.a = 20.0 * k;
    p.b = 5.0;
    return p;
}

bool PotentialParams::admissible(int k) const {
    const double tol = 1e-12;
    return a > 0.0 && b > 0.0 && 2.0 * b * k <= epsilon_prime * a + tol &&
           b * (2.0 - 2.0 * epsilon - epsilon_prime) >= 2.0 + epsilon_prime - tol;
}

void PotentialParams::validate(int k) const {
    if (!admissible(k)) {
        std::ostringstream msg;
        msg << "potential parameters a=" << a << " b=" << b << " eps=" << epsilon << " eps'=" << epsilon_prime
            << " violate 2bk <= eps'a or b(2-2eps-eps') >= 2+eps' for k=" << k;
        throw InputError(msg.str());
    }
}

double phi(const PotentialParams& p, double x) {
    if (x < 0.0) throw InputError("phi is defined for nonnegative arguments");
    return p.phi(x);
}

template <class T>
double potential(const RootedTree& tree, const LeafConfig<T>& c, const PotentialParams& p) {
    validate_config(tree, c);
    auto x = extend_config(tree, c);
    double total = 0.0;
    for (NodeId u : tree.nodes()) {
        if (u == tree.root()) continue;
        total += tree.edge_length(u) * p.phi(static_cast<double>(x.at(u)));
    }
    return total;
}

template double potential(const RootedTree&, const DiscreteConfig&, const PotentialParams&);
template double potential(const RootedTree&, const FractionalConfig&, const PotentialParams&);

namespace {

TensionReport tension_with(const RootedTree& tree, const NodeValues<int>& x, NodeId src, NodeId dst,
                           const PotentialParams& p) {
    TensionReport r{src, dst, 0.0, 0.0, 0.0};
    if (src == dst) return r;
    NodeId a = lca(tree, src, dst);
    for (NodeId u = src; u != a; u = tree.parent(u)) {
        double xu = x.at(u);
        double d = tree.edge_length(u);
        r.tension += d * (p.phi(xu) - p.phi(xu - 1.0));
        r.distance += d;
    }
    for (NodeId u = dst; u != a; u = tree.parent(u)) {
        double xu = x.at(u);
        double d = tree.edge_length(u);
        r.tension -= d * (p.phi(xu + 1.0) - p.phi(xu));
        r.distance += d;
    }
    r.slack = r.distance - r.tension;
    return r;
}

TensionReport tightest_with(const RootedTree& tree, const DiscreteConfig& c, const NodeValues<int>& x,
                            const PotentialParams& p) {
    TensionReport best{kNoNode, kNoNode, 0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (const auto& [src, xs] : c.weights) {
        if (xs < 1) continue;
        for (const auto& [dst, xd] : c.weights) {
            (void)xd;
            if (dst == src) continue;
            TensionReport r = tension_with(tree, x, src, dst, p);
            if (r.slack < best.slack) best = r;
        }
    }
    return best;
}

// A move fires when its slack is within tolerance and it strictly lowers the
// potential. The second test only matters on edges shorter than the
// tolerance, where zero-gain moves would otherwise bounce back and forth.
bool fires(const TensionReport& r) { return r.slack <= kSlackTolerance && r.tension > 0.0; }

// Firing pair with the smallest slack, or slack = inf when none fires.
TensionReport firing_with(const RootedTree& tree, const DiscreteConfig& c, const NodeValues<int>& x,
                          const PotentialParams& p) {
    TensionReport best{kNoNode, kNoNode, 0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (const auto& [src, xs] : c.weights) {
        if (xs < 1) continue;
        for (const auto& [dst, xd] : c.weights) {
            (void)xd;
            if (dst == src) continue;
            TensionReport r = tension_with(tree, x, src, dst, p);
            if (fires(r) && r.slack < best.slack) best = r;
        }
    }
    return best;
}

} // namespace

TensionReport tension(const RootedTree& tree, const DiscreteConfig& c, NodeId src, NodeId dst,
                      const PotentialParams& p) {
    validate_config(tree, c);
    if (c.at(src) < 1) throw RuleViolation("tension source leaf " + std::to_string(src) + " holds no robot");
    if (!c.weights.count(dst)) throw InputError("tension destination " + std::to_string(dst) + " is not a leaf");
    return tension_with(tree, extend_config(tree, c), src, dst, p);
}

TensionReport tightest_pair(const RootedTree& tree, const DiscreteConfig& c, const PotentialParams& p) {
    validate_config(tree, c);
    return tightest_with(tree, c, extend_config(tree, c), p);
}

bool stable(const RootedTree& tree, const DiscreteConfig& c, const PotentialParams& p) {
    validate_config(tree, c);
    return firing_with(tree, c, extend_config(tree, c), p).source == kNoNode;
}

SettleResult settle(const RootedTree& tree, DiscreteConfig c, const PotentialParams& p) {
    validate_config(tree, c);
    SettleResult out;
    auto x = extend_config(tree, c);
    const long long budget = 10LL * std::max(1, c.total()) * static_cast<long long>(tree.size());
    for (long long step = 0;; ++step) {
        TensionReport r = firing_with(tree, c, x, p);
        if (r.source == kNoNode) break;
        if (step >= budget)
            throw InvariantViolation("settle exceeded its move budget; potential parameters are inadmissible");
        NodeId a = lca(tree, r.source, r.dest);
        for (NodeId u = r.source; u != a; u = tree.parent(u)) --x[u];
        for (NodeId u = r.dest; u != a; u = tree.parent(u)) ++x[u];
        --c.weights[r.source];
        ++c.weights[r.dest];
        out.cost += r.distance;
        out.moves.push_back({r.source, r.dest});
    }
    out.config = std::move(c);
    return out;
}

ElongationEvent next_elongation_event(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                                      const PotentialParams& p) {
    validate_config(tree, c);
    const int xl = c.at(leaf);
    if (xl < 2) throw RuleViolation("only a leaf with more than one robot may be elongated");
    const double rate = p.phi(xl) - p.phi(xl - 1) - 1.0;
    if (!(rate > 0.0)) throw InvariantViolation("elongation slack rate is not positive");
    auto x = extend_config(tree, c);
    ElongationEvent ev;
    for (const auto& [dst, xd] : c.weights) {
        (void)xd;
        if (dst == leaf) continue;
        TensionReport r = tension_with(tree, x, leaf, dst, p);
        double delta = std::max(0.0, r.slack) / rate;
        if (delta < ev.delta) {
            ev.delta = delta;
            ev.dest = dst;
        }
    }
    return ev;
}

ForkedState apply_fork(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                       const std::vector<NodeId>& child_ids, double delta) {
    const int xl = c.at(leaf);
    const int m = static_cast<int>(child_ids.size());
    if (!tree.contains(leaf) || !tree.children(leaf).empty() || leaf == tree.root())
        throw InputError("fork target " + std::to_string(leaf) + " is not a non-root leaf");
    if (xl < 3) throw RuleViolation("only a leaf with at least three robots may be forked");
    if (m < 2 || m > xl - 1) throw RuleViolation("fork arity must lie in [2, x_leaf - 1]");
    ForkedState out{tree, c, child_ids};
    std::sort(out.children.begin(), out.children.end());
    out.config.weights.erase(leaf);
    const int q = xl / m;
    const int rem = xl % m;
    for (int i = 0; i < m; ++i) {
        NodeId id = out.children[static_cast<std::size_t>(i)];
        out.tree.add_child(leaf, delta, id);
        out.config.weights[id] = q + (i < rem ? 1 : 0);
    }
    return out;
}

double fork_delta(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                  const std::vector<NodeId>& child_ids, const PotentialParams& p, const ForkAcceptor& accept) {
    // Lengths are searched down to 1e-12 of the shortest edge: earlier forks
    // can leave edges far below 1, and admissible lengths scale with them.
    double shortest = 1.0;
    for (NodeId u : tree.nodes())
        if (u != tree.root() && tree.edge_length(u) > 0.0) shortest = std::min(shortest, tree.edge_length(u));
    const double floor = 1e-12 * shortest;
    for (double delta = 1.0; delta >= floor; delta *= 0.5) {
        ForkedState f = apply_fork(tree, c, leaf, child_ids, delta);
        if (stable(f.tree, f.config, p) && (!accept || accept(f))) return delta;
    }
    // A pair leaving the leaf was already tight, so no length is stable;
    // take the longest admissible one and let the player move.
    if (!accept) return 1.0;
    for (double delta = 1.0; delta >= floor; delta *= 0.5)
        if (accept(apply_fork(tree, c, leaf, child_ids, delta))) return delta;
    throw InvariantViolation("fork_delta: no admissible fork length down to 1e-12 of the shortest edge");
}

} // namespace treeminer
