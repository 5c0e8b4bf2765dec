#include "treeminer/acte.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace treeminer {

Scheduler parse_scheduler(const std::string& name) {
    if (name == "roundrobin") return Scheduler::RoundRobin;
    if (name == "random") return Scheduler::Random;
    if (name == "lopsided") return Scheduler::Lopsided;
    throw InputError("unknown scheduler '" + name + "'");
}

const char* to_string(Scheduler s) {
    switch (s) {
    case Scheduler::RoundRobin: return "roundrobin";
    case Scheduler::Random: return "random";
    case Scheduler::Lopsided: return "lopsided";
    }
    return "?";
}

namespace {

std::discrete_distribution<int> halving_weights(int k) {
    std::vector<double> w(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = std::ldexp(1.0, -i);
    return std::discrete_distribution<int>(w.begin(), w.end());
}

} // namespace

RobotScheduler::RobotScheduler(Scheduler kind, int k, std::uint64_t seed)
    : kind_(kind), k_(k), rng_(seed), lopsided_(halving_weights(k)) {
    if (k < 1) throw InputError("at least one robot is needed");
}

int RobotScheduler::next() {
    switch (kind_) {
    case Scheduler::RoundRobin: {
        int r = cursor_;
        cursor_ = (cursor_ + 1) % k_;
        return r;
    }
    case Scheduler::Random: return std::uniform_int_distribution<int>(0, k_ - 1)(rng_);
    case Scheduler::Lopsided: return lopsided_(rng_);
    }
    return 0;
}

Explorer::Explorer(const RootedTree& hidden, int k, const PotentialParams& p, bool verify_tm)
    : tree_(hidden), k_(k), n_(hidden.size()) {
    if (k < 1) throw InputError("at least one robot is needed");
    const auto bound = static_cast<std::size_t>(tree_.id_bound());
    depth_.assign(bound, 0);
    tin_.assign(bound, 0);
    tout_.assign(bound, 0);
    unmined_below_.assign(bound, 0);
    reveal_.assign(bound, 0);
    visited_.assign(bound, 0);
    mined_.assign(bound, 0);
    next_fresh_.assign(bound, 0);
    next_work_.assign(bound, 0);
    tm_at_real_.assign(bound, {});

    int clock = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{tree_.root(), 0}};
    tin_[static_cast<std::size_t>(tree_.root())] = clock++;
    while (!stack.empty()) {
        auto& [u, i] = stack.back();
        const auto& ch = tree_.children(u);
        if (i < ch.size()) {
            NodeId c = ch[i++];
            depth_[static_cast<std::size_t>(c)] = depth_[static_cast<std::size_t>(u)] + 1;
            tin_[static_cast<std::size_t>(c)] = clock++;
            stack.emplace_back(c, 0);
        } else {
            auto su = static_cast<std::size_t>(u);
            tout_[su] = clock++;
            unmined_below_[su] += 1;
            NodeId up = u == tree_.root() ? kNoNode : tree_.parent(u);
            if (up != kNoNode) unmined_below_[static_cast<std::size_t>(up)] += unmined_below_[su];
            stack.pop_back();
        }
    }
    visited_[static_cast<std::size_t>(tree_.root())] = 1;
    pos_.assign(static_cast<std::size_t>(k), tree_.root());

    if (k >= 2) {
        tm_ = tm_init(k, p);
        tm_.verify = verify_tm;
        tm_real_.assign(2, kNoNode);
        tm_real_[1] = tree_.root();
        tm_at_real_[static_cast<std::size_t>(tree_.root())].push_back(1);
        target_.assign(static_cast<std::size_t>(k), 1);
    }
}

void Explorer::set_reveal(std::vector<int> reveal) {
    if (reveal.size() != reveal_.size()) throw InputError("reveal vector has the wrong size");
    reveal_ = std::move(reveal);
}

NodeId Explorer::target_node(int robot) const {
    if (k_ == 1) return pos_[0];
    return tm_real_[static_cast<std::size_t>(target_[static_cast<std::size_t>(robot)])];
}

bool Explorer::inside(NodeId anc, NodeId u) const {
    auto a = static_cast<std::size_t>(anc), b = static_cast<std::size_t>(u);
    return tin_[a] <= tin_[b] && tout_[b] <= tout_[a];
}

NodeId Explorer::child_toward(NodeId u, NodeId target) const {
    const auto& ch = tree_.children(u);
    int t = tin_[static_cast<std::size_t>(target)];
    auto it = std::upper_bound(ch.begin(), ch.end(), t,
                               [&](int value, NodeId c) { return value < tin_[static_cast<std::size_t>(c)]; });
    return *std::prev(it);
}

int Explorer::real_distance(NodeId u, NodeId v) const {
    int d = 0;
    while (depth_[static_cast<std::size_t>(u)] > depth_[static_cast<std::size_t>(v)]) { u = tree_.parent(u); ++d; }
    while (depth_[static_cast<std::size_t>(v)] > depth_[static_cast<std::size_t>(u)]) { v = tree_.parent(v); ++d; }
    while (u != v) {
        u = tree_.parent(u);
        v = tree_.parent(v);
        d += 2;
    }
    return d;
}

NodeId Explorer::fresh_child(NodeId u) {
    const auto& ch = tree_.children(u);
    std::size_t& i = next_fresh_[static_cast<std::size_t>(u)];
    while (i < ch.size() && visited_[static_cast<std::size_t>(ch[i])]) ++i;
    if (i < ch.size() && reveal_[static_cast<std::size_t>(ch[i])] <= horizon_) return ch[i];
    return kNoNode;
}

bool Explorer::has_hidden_children(NodeId u) const {
    const auto& ch = tree_.children(u);
    return !ch.empty() && reveal_[static_cast<std::size_t>(ch.back())] > horizon_;
}

void Explorer::mark_mined(NodeId u) {
    mined_[static_cast<std::size_t>(u)] = 1;
    ++mined_count_;
    for (NodeId v = u;; v = tree_.parent(v)) {
        --unmined_below_[static_cast<std::size_t>(v)];
        if (v == tree_.root()) break;
    }
    if (k_ >= 2)
        for (NodeId leaf : tm_at_real_[static_cast<std::size_t>(u)]) pending_.insert(leaf);
}

void Explorer::record(int robot, NodeId from, NodeId to, StepKind kind) {
    ++moves;
    switch (kind) {
    case StepKind::Fresh: ++fresh_moves; break;
    case StepKind::Toward: ++toward_moves; break;
    case StepKind::Probe: ++probe_moves; break;
    }
    if (on_move) on_move({robot, from, to, kind});
}

void Explorer::fire(NodeId leaf) {
    const NodeId p = tm_real_[static_cast<std::size_t>(leaf)];
    std::vector<int> group;
    for (int r = 0; r < k_; ++r)
        if (target_[static_cast<std::size_t>(r)] == leaf) group.push_back(r);

    TmStepResult res = tm_step(tm_, leaf);
    if (static_cast<int>(group.size()) != res.x) throw InvariantViolation("robots and miners disagree at a target");

    // Real nodes for the new discrete leaves: first the branches the robots
    // are already in, then any other branch with work left. Leftover leaves
    // go to the nearest node that is not mined yet.
    std::vector<NodeId> cand;
    auto take = [&](NodeId c) {
        if (unmined_below_[static_cast<std::size_t>(c)] > 0 && std::find(cand.begin(), cand.end(), c) == cand.end())
            cand.push_back(c);
    };
    for (int r : group) {
        NodeId at = pos_[static_cast<std::size_t>(r)];
        if (at != p && inside(p, at)) take(child_toward(p, at));
    }
    for (NodeId c : tree_.children(p)) {
        if (cand.size() >= res.children.size()) break;
        take(c);
    }
    NodeId spare = kNoNode;
    for (std::size_t i = 0; i < res.children.size(); ++i) {
        NodeId child = res.children[i];
        NodeId real;
        if (i < cand.size()) {
            real = cand[i];
        } else {
            if (spare == kNoNode) spare = nearest_unmined(p);
            real = spare;
        }
        if (tm_real_.size() <= static_cast<std::size_t>(child)) tm_real_.resize(static_cast<std::size_t>(child) + 1, kNoNode);
        tm_real_[static_cast<std::size_t>(child)] = real;
        tm_at_real_[static_cast<std::size_t>(real)].push_back(child);
        if (mined_[static_cast<std::size_t>(real)]) pending_.insert(child);
    }

    std::vector<NodeId> slots = res.children;
    slots.push_back(res.dest);
    for (NodeId s : slots) retarget_distance += real_distance(p, tm_real_[static_cast<std::size_t>(s)]);

    // Greedy nearest matching of robots to slots.
    std::vector<std::tuple<int, int, std::size_t>> pairs;
    for (int r : group)
        for (std::size_t j = 0; j < slots.size(); ++j)
            pairs.emplace_back(real_distance(pos_[static_cast<std::size_t>(r)], tm_real_[static_cast<std::size_t>(slots[j])]), r, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> robot_done(static_cast<std::size_t>(k_), 0), slot_done(slots.size(), 0);
    for (const auto& [d, r, j] : pairs) {
        (void)d;
        if (robot_done[static_cast<std::size_t>(r)] || slot_done[j]) continue;
        robot_done[static_cast<std::size_t>(r)] = 1;
        slot_done[j] = 1;
        target_[static_cast<std::size_t>(r)] = slots[j];
    }

    // Rebalancing between other targets: the robot closest to the new spot goes.
    for (const UnitMove& mv : res.shifts) {
        const NodeId to = tm_real_[static_cast<std::size_t>(mv.dst)];
        int best = -1, best_d = 0;
        for (int r = 0; r < k_; ++r) {
            if (target_[static_cast<std::size_t>(r)] != mv.src) continue;
            int d = real_distance(pos_[static_cast<std::size_t>(r)], to);
            if (best < 0 || d < best_d) {
                best = r;
                best_d = d;
            }
        }
        if (best < 0) throw InvariantViolation("no robot follows a rebalanced miner");
        target_[static_cast<std::size_t>(best)] = mv.dst;
        retarget_distance += real_distance(tm_real_[static_cast<std::size_t>(mv.src)], to);
    }
}

NodeId Explorer::live_child(NodeId u) {
    const auto& ch = tree_.children(u);
    std::size_t& i = next_work_[static_cast<std::size_t>(u)];
    while (i < ch.size() && unmined_below_[static_cast<std::size_t>(ch[i])] == 0) ++i;
    return i < ch.size() ? ch[i] : kNoNode;
}

NodeId Explorer::nearest_unmined(NodeId u) {
    while (unmined_below_[static_cast<std::size_t>(u)] == 0) {
        if (u == tree_.root()) throw InvariantViolation("no unmined node left to target");
        u = tree_.parent(u);
    }
    while (mined_[static_cast<std::size_t>(u)]) u = live_child(u);
    return u;
}

void Explorer::cascade() {
    std::size_t guard = 0;
    const std::size_t limit = 64 * (n_ + 16) * static_cast<std::size_t>(k_);
    while (!pending_.empty()) {
        if (++guard > limit) {
            std::ostringstream msg;
            msg << "target cascade did not terminate (tm depth " << tm_.max_depth << ", tm steps " << tm_.steps
                << ", active " << tm_.miners.size() << ", mined " << mined_count_ << "/" << n_ << ")";
            for (const auto& [l, x] : tm_.miners)
                msg << " [" << l << " x=" << x << " real=" << tm_real_[static_cast<std::size_t>(l)] << " below="
                    << unmined_below_[static_cast<std::size_t>(tm_real_[static_cast<std::size_t>(l)])] << "]";
            throw InvariantViolation(msg.str());
        }
        NodeId leaf = *pending_.begin();
        pending_.erase(pending_.begin());
        if (!tm_.miners.count(leaf)) continue;
        if (!mined_[static_cast<std::size_t>(tm_real_[static_cast<std::size_t>(leaf)])]) continue;
        fire(leaf);
    }
}

bool Explorer::step(int robot) {
    if (finished_) throw RuleViolation("move granted after exploration finished");
    if (robot < 0 || robot >= k_) throw InputError("robot index out of range");
    const NodeId u = pos_[static_cast<std::size_t>(robot)];
    NodeId c = fresh_child(u);
    if (c != kNoNode) {
        visited_[static_cast<std::size_t>(c)] = 1;
        pos_[static_cast<std::size_t>(robot)] = c;
        record(robot, u, c, StepKind::Fresh);
        return true;
    }
    if (has_hidden_children(u)) throw InvariantViolation("a robot on the revealed frontier was granted a move");
    if (!mined_[static_cast<std::size_t>(u)]) mark_mined(u);
    if (mined_count_ == n_) {
        record(robot, u, u, StepKind::Probe);
        finished_ = true;
        return false;
    }
    NodeId next;
    if (k_ == 1) {
        // A lone robot is a depth-first search.
        next = tree_.parent(u);
    } else {
        cascade();
        NodeId t = target_node(robot);
        if (t == u) {
            record(robot, u, u, StepKind::Probe);
            return true;
        }
        next = inside(u, t) ? child_toward(u, t) : tree_.parent(u);
    }
    pos_[static_cast<std::size_t>(robot)] = next;
    record(robot, u, next, StepKind::Toward);
    return true;
}

double acte_bound(std::size_t n, int k, int depth) {
    PotentialParams p = PotentialParams::defaults(k);
    return 2.0 * static_cast<double>(n) + p.gamma * p.phi(k) * depth;
}

ActeReport run_acte(const RootedTree& tree, int k, const ActeOptions& opts) {
    Explorer ex(tree, k, PotentialParams::defaults(k), opts.verify_tm);
    ex.on_move = opts.on_move;
    RobotScheduler sched(opts.scheduler, k, opts.seed);
    ActeReport r;
    r.n = tree.size();
    r.depth = tree.height();
    r.k = k;
    r.bound = acte_bound(r.n, k, r.depth);
    const long long guard = 64LL * static_cast<long long>(r.bound) + 1024;
    while (!ex.finished()) {
        if (ex.moves > guard) throw InvariantViolation("exploration did not terminate");
        ex.step(sched.next());
    }
    r.moves = ex.moves;
    r.fresh_moves = ex.fresh_moves;
    r.toward_moves = ex.toward_moves;
    r.probe_moves = ex.probe_moves;
    r.retarget_distance = ex.retarget_distance;
    if (k >= 2) {
        r.tm_cost = ex.tm().cost;
        r.ctm_cost = ex.tm().shadow.cost;
        r.tm_steps = ex.tm().steps;
        r.tm_depth = ex.tm().max_depth;
        r.tm_cost_violations = ex.tm().cost_violations;
        r.tm_rebalances = ex.tm().rebalances;
    }
    r.within_bound = static_cast<double>(r.moves) <= r.bound;
    r.within_ledger = static_cast<double>(r.moves) <= 2.0 * static_cast<double>(r.n) + r.retarget_distance;
    if (opts.enforce) {
        std::ostringstream msg;
        if (!r.within_bound) {
            msg << "exploration used " << r.moves << " moves, bound " << r.bound;
            throw BoundViolation(msg.str());
        }
        if (!r.within_ledger) {
            msg << "exploration used " << r.moves << " moves, more than 2n + retarget distance "
                << 2.0 * static_cast<double>(r.n) + r.retarget_distance;
            throw InvariantViolation(msg.str());
        }
    }
    return r;
}

} // namespace treeminer
