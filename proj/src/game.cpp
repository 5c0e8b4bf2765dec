#include "treeminer/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace treeminer {

const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::Elongate: return "elongate";
    case EventKind::Fork: return "fork";
    case EventKind::Delete: return "delete";
    case EventKind::Move: return "move";
    }
    return "?";
}

GameState initial_game(int k, double leaf_length) {
    if (k < 1) throw InputError("the game needs at least one robot");
    GameState s{RootedTree(0), {}, 0.0, 0.0, {}};
    NodeId leaf = s.tree.add_child(0, leaf_length);
    s.config.weights[leaf] = k;
    return s;
}

std::string describe(const CtmMove& move) {
    std::ostringstream out;
    switch (move.kind) {
    case CtmMove::Kind::Elongate: out << "E " << move.leaf << ' ' << move.amount; break;
    case CtmMove::Kind::Fork: out << "F " << move.leaf << ' ' << move.m; break;
    case CtmMove::Kind::Delete: out << "D " << move.leaf; break;
    }
    return out.str();
}

namespace {

struct Emitter {
    GameState& state;
    const PotentialParams& p;
    const GameOptions& opts;
    const EventObserver& observe;

    void operator()(GameEvent ev) {
        if (!opts.record && !observe) return;
        ev.potential_after = potential(state.tree, state.config, p);
        if (opts.record) state.event_log.push_back(ev);
        if (observe) observe(state, ev);
    }
};

void move_robot(GameState& s, NodeId src, NodeId dst, Emitter& emit) {
    double d = distance(s.tree, src, dst);
    --s.config.weights[src];
    ++s.config.weights[dst];
    s.cost += d;
    GameEvent ev;
    ev.kind = EventKind::Move;
    ev.leaf = src;
    ev.dest = dst;
    ev.amount = d;
    ev.cost_delta = d;
    emit(std::move(ev));
}

void settle_state(GameState& s, const PotentialParams& p, Emitter& emit) {
    SettleResult r = settle(s.tree, s.config, p);
    for (const UnitMove& mv : r.moves) move_robot(s, mv.src, mv.dst, emit);
}

void require_leaf(const GameState& s, NodeId leaf) {
    if (!s.config.weights.count(leaf))
        throw RuleViolation("node " + std::to_string(leaf) + " is not a leaf of the current tree");
}

void do_elongate(GameState& s, const CtmMove& mv, const PotentialParams& p, Emitter& emit) {
    if (s.config.at(mv.leaf) < 2) throw RuleViolation("only a leaf with more than one robot may be elongated");
    if (!(mv.amount > 0.0) || !std::isfinite(mv.amount)) throw RuleViolation("elongation amount must be positive");
    double remaining = mv.amount;
    while (remaining > 0.0) {
        const int xl = s.config.at(mv.leaf);
        if (xl < 2) break;
        ElongationEvent ev = next_elongation_event(s.tree, s.config, mv.leaf, p);
        const bool fires = ev.dest != kNoNode && ev.delta <= remaining;
        const double seg = fires ? ev.delta : remaining;
        if (seg > 0.0) {
            s.tree.set_edge_length(mv.leaf, s.tree.edge_length(mv.leaf) + seg);
            s.cost += seg * xl;
            s.clock += seg;
            GameEvent e;
            e.kind = EventKind::Elongate;
            e.leaf = mv.leaf;
            e.amount = seg;
            e.cost_delta = seg * xl;
            emit(std::move(e));
        }
        remaining -= seg;
        if (fires) {
            move_robot(s, mv.leaf, ev.dest, emit);
            settle_state(s, p, emit);
        }
    }
}

void do_fork(GameState& s, const CtmMove& mv, const PotentialParams& p, const GameOptions& opts, Emitter& emit) {
    const int xl = s.config.at(mv.leaf);
    if (xl < 3) throw RuleViolation("only a leaf with at least three robots may be forked");
    if (mv.m < 2 || mv.m > xl - 1) throw RuleViolation("fork arity must lie in [2, x_leaf - 1]");
    std::vector<NodeId> ids = mv.child_ids;
    if (ids.empty())
        for (int i = 0; i < mv.m; ++i) ids.push_back(s.tree.id_bound() + i);
    if (static_cast<int>(ids.size()) != mv.m) throw InputError("fork child id list does not match arity");

    ForkAcceptor accept;
    FractionalSolution before;
    if (opts.oracle_fork) {
        const double k = s.config.total();
        before = solve_fractional(s.tree, k, p);
        const double yl = before.y.at(mv.leaf);
        accept = [&, k, yl](const ForkedState& f) {
            FractionalSolution after = solve_fractional(f.tree, k, p);
            double sum = 0.0;
            for (NodeId c : f.children) {
                double yc = after.y.at(c);
                if (yc < p.epsilon - kBoundsTolerance) return false;
                sum += yc;
            }
            return sum >= yl - 0.5 - kBoundsTolerance;
        };
    }
    double delta = fork_delta(s.tree, s.config, mv.leaf, ids, p, accept);
    ForkedState f = apply_fork(s.tree, s.config, mv.leaf, ids, delta);
    s.tree = std::move(f.tree);
    s.config = std::move(f.config);
    s.cost += delta * xl;
    GameEvent e;
    e.kind = EventKind::Fork;
    e.leaf = mv.leaf;
    e.amount = delta;
    e.m = mv.m;
    e.children = f.children;
    e.cost_delta = delta * xl;
    emit(std::move(e));
    settle_state(s, p, emit);
}

void do_delete(GameState& s, const CtmMove& mv, const PotentialParams& p, Emitter& emit) {
    if (s.config.weights.size() < 2) throw RuleViolation("the last remaining leaf cannot be killed");
    // Each robot leaves for the destination where it raises cost plus
    // potential the least; marginal costs are convex so this is optimal.
    double evac = 0.0;
    while (s.config.at(mv.leaf) > 0) {
        TensionReport best{kNoNode, kNoNode, 0.0, 0.0, std::numeric_limits<double>::infinity()};
        for (const auto& [dst, xd] : s.config.weights) {
            (void)xd;
            if (dst == mv.leaf) continue;
            TensionReport r = tension(s.tree, s.config, mv.leaf, dst, p);
            if (r.slack < best.slack) best = r;
        }
        --s.config.weights[mv.leaf];
        ++s.config.weights[best.dest];
        evac += best.distance;
    }
    s.config.weights.erase(mv.leaf);
    s.tree.remove_leaf(mv.leaf);
    normalize_simple_in_place(s.tree);
    s.cost += evac;
    GameEvent e;
    e.kind = EventKind::Delete;
    e.leaf = mv.leaf;
    e.cost_delta = evac;
    emit(std::move(e));
    settle_state(s, p, emit);
}

} // namespace

void ctm_apply(GameState& state, const CtmMove& move, const PotentialParams& p, const GameOptions& opts,
               const EventObserver& observe) {
    require_leaf(state, move.leaf);
    Emitter emit{state, p, opts, observe};
    switch (move.kind) {
    case CtmMove::Kind::Elongate: do_elongate(state, move, p, emit); break;
    case CtmMove::Kind::Fork: do_fork(state, move, p, opts, emit); break;
    case CtmMove::Kind::Delete: do_delete(state, move, p, emit); break;
    }
}

StateCheck check_state(const GameState& state, const PotentialParams& p) {
    StateCheck c;
    FractionalSolution y = solve_fractional(state.tree, state.config.total(), p);
    c.master = check_master_inequality(state.tree, state.config, state.cost, p, y);
    c.bounds = check_xy_bounds(state.tree, state.config, p, y);
    c.simple = state.tree.is_simple();
    c.min_leaf_depth = std::numeric_limits<double>::infinity();
    for (const auto& [leaf, x] : state.config.weights) {
        (void)x;
        c.min_leaf_depth = std::min(c.min_leaf_depth, state.tree.root_distance(leaf));
    }
    return c;
}

MasterReport check_master_inequality(const GameState& state, const PotentialParams& p) {
    return check_master_inequality(state.tree, state.config, state.cost, p);
}

XyBoundsReport check_xy_bounds(const GameState& state, const PotentialParams& p) {
    return check_xy_bounds(state.tree, state.config, p);
}

RandomAdversary::RandomAdversary(std::uint64_t seed, double max_elongation)
    : rng_(seed), max_elongation_(max_elongation) {}

std::optional<CtmMove> RandomAdversary::next(const GameState& state) {
    std::vector<NodeId> elong, forkable, all;
    for (const auto& [leaf, x] : state.config.weights) {
        all.push_back(leaf);
        if (x >= 2) elong.push_back(leaf);
        if (x >= 3) forkable.push_back(leaf);
    }
    const bool can_delete = all.size() >= 2;
    double we = elong.empty() ? 0.0 : 0.5;
    double wf = forkable.empty() ? 0.0 : 0.3;
    double wd = can_delete ? 0.2 : 0.0;
    if (we + wf + wd == 0.0) return std::nullopt;
    auto pick = [&](const std::vector<NodeId>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
    };
    double r = std::uniform_real_distribution<double>(0.0, we + wf + wd)(rng_);
    if (r < we) {
        NodeId leaf = pick(elong);
        double amount = std::uniform_real_distribution<double>(0.0, max_elongation_)(rng_);
        return CtmMove::elongate(leaf, std::max(amount, 1e-6));
    }
    if (r < we + wf) {
        NodeId leaf = pick(forkable);
        int x = state.config.at(leaf);
        int m = std::uniform_int_distribution<int>(2, x - 1)(rng_);
        return CtmMove::fork(leaf, m);
    }
    return CtmMove::remove(pick(all));
}

std::optional<CtmMove> DeepestAdversary::next(const GameState& state) {
    NodeId deepest = kNoNode, shallowest = kNoNode;
    double dmax = -1.0, dmin = std::numeric_limits<double>::infinity();
    for (const auto& [leaf, x] : state.config.weights) {
        double d = state.tree.root_distance(leaf);
        if (x >= 2 && d > dmax) {
            dmax = d;
            deepest = leaf;
        }
        if (d < dmin) {
            dmin = d;
            shallowest = leaf;
        }
    }
    if (deepest != kNoNode) return CtmMove::elongate(deepest, amount_);
    if (state.config.weights.size() >= 2) return CtmMove::remove(shallowest);
    return std::nullopt;
}

ScriptAdversary ScriptAdversary::parse(std::istream& in) {
    std::vector<CtmMove> moves;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string op;
        if (!(row >> op)) continue;
        NodeId leaf = kNoNode;
        auto bad = [&] { return InputError("script line " + std::to_string(lineno) + ": cannot parse '" + line + "'"); };
        if (op == "E") {
            double amount = 0.0;
            if (!(row >> leaf >> amount)) throw bad();
            moves.push_back(CtmMove::elongate(leaf, amount));
        } else if (op == "F") {
            int m = 0;
            if (!(row >> leaf >> m)) throw bad();
            moves.push_back(CtmMove::fork(leaf, m));
        } else if (op == "D") {
            if (!(row >> leaf)) throw bad();
            moves.push_back(CtmMove::remove(leaf));
        } else {
            throw bad();
        }
    }
    return ScriptAdversary(std::move(moves));
}

ScriptAdversary ScriptAdversary::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse(in);
}

std::optional<CtmMove> ScriptAdversary::next(const GameState&) {
    if (pos_ >= moves_.size()) return std::nullopt;
    return moves_[pos_++];
}

std::unique_ptr<Adversary> make_adversary(const std::string& spec, std::uint64_t seed) {
    if (spec == "random") return std::make_unique<RandomAdversary>(seed);
    if (spec == "deepest") return std::make_unique<DeepestAdversary>();
    if (spec == "null") return std::make_unique<NullAdversary>();
    if (spec.rfind("script:", 0) == 0)
        return std::make_unique<ScriptAdversary>(ScriptAdversary::from_file(spec.substr(7)));
    throw InputError("unknown adversary '" + spec + "'");
}

RunReport run_adversary(GameState& state, Adversary& adversary, const PotentialParams& p, const RunOptions& opts,
                        const EventObserver& observe) {
    RunReport report;
    const int k = state.config.total();
    const double scale = p.gamma * p.phi(k);
    auto watch = [&](const GameState& s, const GameEvent& ev) {
        ++report.events;
        double shallow = std::numeric_limits<double>::infinity();
        for (const auto& [leaf, x] : s.config.weights) {
            (void)x;
            shallow = std::min(shallow, s.tree.root_distance(leaf));
        }
        report.worst_depth_ratio = std::max(report.worst_depth_ratio, s.cost / (scale * shallow));
        if (opts.check) {
            StateCheck c = check_state(s, p);
            report.worst_master_ratio = std::max(report.worst_master_ratio, c.master.lhs / c.master.rhs);
            auto note = [&](const std::string& what) {
                if (report.first_violation.empty())
                    report.first_violation = "event " + std::to_string(report.events - 1) + ": " + what;
            };
            if (!c.master.holds) {
                ++report.master_violations;
                note("master inequality lhs=" + std::to_string(c.master.lhs) + " rhs=" + std::to_string(c.master.rhs));
            }
            if (!c.bounds.x_at_least_one) {
                ++report.x_below_one;
                note("a leaf holds no robot");
            }
            if (!c.bounds.holds && c.bounds.x_at_least_one) {
                ++report.bound_violations;
                note("x/y bounds: " + c.bounds.failure);
            }
            if (!c.simple) {
                ++report.not_simple;
                note("tree is not simple");
            }
        }
        if (observe) observe(s, ev);
    };
    while (report.moves < opts.max_moves) {
        auto mv = adversary.next(state);
        if (!mv) break;
        ctm_apply(state, *mv, p, opts.game, watch);
        ++report.moves;
    }
    return report;
}

} // namespace treeminer
