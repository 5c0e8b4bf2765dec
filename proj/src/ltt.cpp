#include "treeminer/ltt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "treeminer/acte.hpp"
#include "treeminer/error.hpp"
#include "treeminer/potential.hpp"

namespace treeminer {

LayeredTree LayeredTree::with_source(NodeId s) {
    LayeredTree lt;
    lt.source = s;
    lt.layers = {{s}};
    lt.layer_of[s] = 0;
    return lt;
}

void LayeredTree::add_node(int layer, NodeId id, NodeId par, int len) {
    if (layer < 1) throw InputError("only the source lives in layer 0");
    if (layer_of.count(id)) throw InputError("node " + std::to_string(id) + " appears twice");
    if (static_cast<int>(layers.size()) <= layer) layers.resize(static_cast<std::size_t>(layer) + 1);
    layers[static_cast<std::size_t>(layer)].push_back(id);
    layer_of[id] = layer;
    parent[id] = par;
    length[id] = len;
}

std::size_t LayeredTree::width() const {
    std::size_t w = 0;
    for (const auto& l : layers) w = std::max(w, l.size());
    return w;
}

long long LayeredTree::total_length() const {
    long long s = 0;
    for (const auto& [id, len] : length) s += len;
    return s;
}

long long LayeredTree::depth() const {
    long long d = 0;
    for (NodeId u = target; u != source; u = parent.at(u)) d += length.at(u);
    return d;
}

int LayeredTree::max_length() const {
    int m = 0;
    for (const auto& [id, len] : length) m = std::max(m, len);
    return m;
}

void LayeredTree::validate() const {
    if (layers.empty() || layers[0].size() != 1 || layers[0][0] != source)
        throw InputError("layer 0 must hold exactly the source");
    for (std::size_t i = 1; i < layers.size(); ++i) {
        if (layers[i].empty()) throw InputError("layer " + std::to_string(i) + " is empty");
        for (NodeId v : layers[i]) {
            auto p = parent.find(v);
            if (p == parent.end()) throw InputError("node " + std::to_string(v) + " has no parent edge");
            auto pl = layer_of.find(p->second);
            if (pl == layer_of.end() || pl->second + 1 != static_cast<int>(i))
                throw InputError("parent of node " + std::to_string(v) + " is not in the previous layer");
            if (length.at(v) < 0) throw InputError("negative edge length at node " + std::to_string(v));
        }
    }
    if (parent.size() + 1 != layer_of.size()) throw InputError("edges and layers disagree");
    auto t = layer_of.find(target);
    if (t == layer_of.end() || t->second != num_layers() || num_layers() < 1)
        throw InputError("the target must be in the last layer");
}

LayeredTree read_layered(std::istream& in) {
    std::string line;
    std::vector<std::vector<NodeId>> layers;
    std::map<NodeId, std::pair<NodeId, int>> edges;
    NodeId target = kNoNode;
    int declared = -1;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string tag;
        if (!(row >> tag)) continue;
        if (tag == "layers") {
            if (!(row >> declared) || declared < 1) throw InputError("bad line: " + line);
            layers.resize(static_cast<std::size_t>(declared) + 1);
        } else if (tag == "layer") {
            int i = -1;
            if (!(row >> i) || i < 0 || i > declared) throw InputError("bad layer line: " + line);
            NodeId v;
            while (row >> v) layers[static_cast<std::size_t>(i)].push_back(v);
        } else if (tag == "edge") {
            NodeId p, c;
            int len;
            if (!(row >> p >> c >> len) || len < 0) throw InputError("bad edge line: " + line);
            if (!edges.emplace(c, std::make_pair(p, len)).second)
                throw InputError("node " + std::to_string(c) + " has two parents");
        } else if (tag == "target") {
            if (!(row >> target)) throw InputError("bad target line: " + line);
        } else {
            throw InputError("unknown line: " + line);
        }
    }
    if (declared < 1) throw InputError("missing 'layers <N>' header");
    if (layers[0].size() != 1) throw InputError("layer 0 must hold exactly the source");
    LayeredTree lt = LayeredTree::with_source(layers[0][0]);
    for (std::size_t i = 1; i < layers.size(); ++i) {
        for (NodeId v : layers[i]) {
            auto e = edges.find(v);
            if (e == edges.end()) throw InputError("node " + std::to_string(v) + " has no parent edge");
            lt.add_node(static_cast<int>(i), v, e->second.first, e->second.second);
        }
    }
    if (edges.size() + 1 != lt.size()) throw InputError("edge to a node outside every layer");
    lt.target = target;
    lt.validate();
    return lt;
}

LayeredTree read_layered_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_layered(in);
}

void write_layered(std::ostream& out, const LayeredTree& lt) {
    out << "layers " << lt.num_layers() << '\n';
    for (std::size_t i = 0; i < lt.layers.size(); ++i) {
        out << "layer " << i;
        for (NodeId v : lt.layers[i]) out << ' ' << v;
        out << '\n';
    }
    for (std::size_t i = 1; i < lt.layers.size(); ++i)
        for (NodeId v : lt.layers[i]) out << "edge " << lt.parent.at(v) << ' ' << v << ' ' << lt.length.at(v) << '\n';
    out << "target " << lt.target << '\n';
}

ContractedTree contract_zero_edges(const LayeredTree& lt) {
    lt.validate();
    if (!lt.binary_lengths()) throw InputError("contraction needs lengths in {0,1}; subdivide first");
    ContractedTree ct;
    ct.tree = RootedTree(0);
    ct.rep[lt.source] = 0;
    ct.reveal = {0};
    ct.layer_reps.resize(lt.layers.size());
    ct.witness.resize(lt.layers.size());
    ct.layer_reps[0] = {0};
    ct.witness[0][0] = lt.source;
    NodeId next = 1;
    for (std::size_t i = 1; i < lt.layers.size(); ++i) {
        std::vector<NodeId> ids = lt.layers[i];
        std::sort(ids.begin(), ids.end());
        std::set<NodeId> reps;
        for (NodeId v : ids) {
            NodeId up = ct.rep.at(lt.parent.at(v));
            NodeId r = up;
            if (lt.length.at(v) == 1) {
                r = ct.tree.add_child(up, 1.0, next++);
                ct.reveal.push_back(static_cast<int>(i));
            }
            ct.rep[v] = r;
            reps.insert(r);
            ct.witness[i].emplace(r, v);
        }
        ct.layer_reps[i].assign(reps.begin(), reps.end());
    }
    return ct;
}

LayeredTree subdivide_lengths(const LayeredTree& lt) {
    lt.validate();
    NodeId fresh = lt.layer_of.rbegin()->first + 1;
    LayeredTree out = LayeredTree::with_source(lt.source);
    int base = 0;
    for (std::size_t i = 1; i < lt.layers.size(); ++i) {
        int m = 1;
        for (NodeId v : lt.layers[i]) m = std::max(m, lt.length.at(v));
        std::vector<NodeId> ids = lt.layers[i];
        std::sort(ids.begin(), ids.end());
        for (NodeId v : ids) {
            int len = lt.length.at(v);
            NodeId up = lt.parent.at(v);
            for (int j = 1; j < m; ++j) {
                NodeId mid = fresh++;
                out.add_node(base + j, mid, up, j <= len ? 1 : 0);
                up = mid;
            }
            out.add_node(base + m, v, up, m <= len ? 1 : 0);
        }
        base += m;
    }
    out.target = lt.target;
    out.validate();
    return out;
}

LayeredTree prune_last_layer(const LayeredTree& lt) {
    lt.validate();
    LayeredTree out = LayeredTree::with_source(lt.source);
    const int last = lt.num_layers();
    for (int i = 1; i <= last; ++i)
        for (NodeId v : lt.layers[static_cast<std::size_t>(i)])
            if (i < last || v == lt.target) out.add_node(i, v, lt.parent.at(v), lt.length.at(v));
    out.target = lt.target;
    return out;
}

double ltt_bound(long long total_length, int k, long long depth) {
    PotentialParams p = PotentialParams::defaults(k);
    return (2.0 * static_cast<double>(total_length) + p.gamma * p.phi(k) * static_cast<double>(depth)) / k + 1.0;
}

namespace {

std::map<NodeId, double> rep_masses(const ContractedTree& ct, const FractionalPosition& pos) {
    std::map<NodeId, double> m;
    for (const auto& [v, w] : pos) m[ct.rep.at(v)] += w;
    return m;
}

} // namespace

FractionalTraversal fractional_traverse(const LayeredTree& input, int k, bool enforce) {
    if (k < 2) throw InputError("layered traversal needs k >= 2");
    const LayeredTree lt = prune_last_layer(input);
    const ContractedTree ct = contract_zero_edges(lt);
    Explorer ex(ct.tree, k, PotentialParams::defaults(k), false);
    ex.set_reveal(ct.reveal);

    FractionalTraversal ft;
    ft.k = k;
    ft.bound = ltt_bound(input.total_length(), k, input.depth());
    ft.positions.push_back({{lt.source, 1.0}});
    const long long guard = 64LL * static_cast<long long>(ft.bound * k) + 1024;
    std::vector<char> on(static_cast<std::size_t>(ct.tree.id_bound()), 0);
    int cursor = 0;
    for (int i = 0; i < lt.num_layers(); ++i) {
        const auto& next = ct.layer_reps[static_cast<std::size_t>(i) + 1];
        ex.set_horizon(i + 1);
        for (NodeId r : next) on[static_cast<std::size_t>(r)] = 1;
        auto off = [&](int r) { return !on[static_cast<std::size_t>(ex.position(r))]; };
        const long long before = ex.moves;
        int waiting = 0;
        for (int r = 0; r < k; ++r) waiting += off(r);
        while (waiting > 0) {
            if (ex.moves > guard) throw InvariantViolation("layer synchronisation did not terminate");
            if (ex.finished()) throw InvariantViolation("exploration ended before the target was reached");
            if (off(cursor)) {
                ex.step(cursor);
                if (!off(cursor)) --waiting;
            }
            cursor = (cursor + 1) % k;
        }
        for (NodeId r : next) on[static_cast<std::size_t>(r)] = 0;

        FractionalPosition pos;
        const auto& wit = ct.witness[static_cast<std::size_t>(i) + 1];
        for (int r = 0; r < k; ++r) pos[wit.at(ex.position(r))] += 1.0 / k;
        double ot = plan_cost(ct.tree, ot_plan_nodes(ct.tree, rep_masses(ct, ft.positions.back()), rep_masses(ct, pos)));
        ft.window_moves.push_back(ex.moves - before);
        ft.window_transport.push_back(ot);
        ft.transport_cost += ot;
        ft.positions.push_back(std::move(pos));
        if (ot > static_cast<double>(ex.moves - before) / k + 1e-9)
            throw InvariantViolation("layer " + std::to_string(i + 1) + " transport exceeds the moves spent");
    }
    ft.moves = ex.moves;
    ft.expected_cost = static_cast<double>(ft.moves) / k;
    ft.within_bound = ft.expected_cost <= ft.bound;
    if (enforce && !ft.within_bound) {
        std::ostringstream msg;
        msg << "traversal cost " << ft.expected_cost << " exceeds bound " << ft.bound;
        throw BoundViolation(msg.str());
    }
    return ft;
}

Rounding::Rounding(const LayeredTree& input, const FractionalTraversal& ft) {
    const LayeredTree lt = prune_last_layer(input);
    ct_ = contract_zero_edges(lt);
    if (ft.positions.size() != lt.layers.size()) throw InputError("traversal does not match the instance");
    for (std::size_t i = 0; i + 1 < ft.positions.size(); ++i) {
        auto plan = ot_plan_nodes(ct_.tree, rep_masses(ct_, ft.positions[i]), rep_masses(ct_, ft.positions[i + 1]));
        const auto& from = ct_.witness[i];
        const auto& to = ct_.witness[i + 1];
        std::map<NodeId, Branch> step;
        double moved = 0.0;
        for (const auto& mv : plan) {
            Branch& b = step[from.at(mv.src)];
            b.dest.push_back(to.at(mv.dst));
            b.cumulative.push_back((b.cumulative.empty() ? 0.0 : b.cumulative.back()) + mv.mass);
            moved += mv.mass;
        }
        // Mass that stays put.
        std::map<NodeId, double> out;
        for (const auto& mv : plan) out[mv.src] += mv.mass;
        for (const auto& [r, w] : rep_masses(ct_, ft.positions[i])) {
            double stay = w - out[r];
            if (stay < -1e-9) throw InvariantViolation("coupling moves more mass than present");
            if (stay > 1e-12) {
                auto dst = to.find(r);
                if (dst == to.end()) throw InvariantViolation("coupling leaves mass on a dead node");
                Branch& b = step[from.at(r)];
                b.dest.push_back(dst->second);
                b.cumulative.push_back((b.cumulative.empty() ? 0.0 : b.cumulative.back()) + stay);
                moved += stay;
            }
        }
        if (std::abs(moved - 1.0) > 1e-9) throw InvariantViolation("coupling mass mismatch");
        steps_.push_back(std::move(step));
    }
    witness_ = ct_.witness;
}

double Rounding::sample(std::mt19937_64& rng, std::vector<NodeId>* path) const {
    NodeId at = witness_[0].begin()->second;
    if (path) path->assign(1, at);
    double cost = 0.0;
    for (const auto& step : steps_) {
        const Branch& b = step.at(at);
        double u = std::uniform_real_distribution<double>(0.0, b.cumulative.back())(rng);
        auto it = std::upper_bound(b.cumulative.begin(), b.cumulative.end(), u);
        std::size_t j = std::min(static_cast<std::size_t>(it - b.cumulative.begin()), b.dest.size() - 1);
        NodeId nx = b.dest[j];
        cost += distance(ct_.tree, ct_.rep.at(at), ct_.rep.at(nx));
        at = nx;
        if (path) path->push_back(at);
    }
    return cost;
}

double rounded_traverse(const LayeredTree& lt, int k, std::uint64_t seed) {
    FractionalTraversal ft = fractional_traverse(lt, k, false);
    Rounding r(lt, ft);
    std::mt19937_64 rng(seed);
    return r.sample(rng);
}

MonteCarlo rounded_monte_carlo(const LayeredTree& lt, const FractionalTraversal& ft, std::size_t samples,
                               std::uint64_t seed) {
    Rounding r(lt, ft);
    std::mt19937_64 rng(seed);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double c = r.sample(rng);
        sum += c;
        sq += c * c;
    }
    MonteCarlo mc;
    mc.samples = samples;
    if (samples == 0) return mc;
    mc.mean = sum / static_cast<double>(samples);
    double var = samples > 1 ? (sq - sum * mc.mean) / static_cast<double>(samples - 1) : 0.0;
    mc.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    return mc;
}

LayeredTree gen_unit_layered(int w, int n_layers, std::uint64_t seed) {
    if (w < 1 || n_layers < 1) throw InputError("need w >= 1 and N >= 1");
    std::mt19937_64 rng(seed);
    LayeredTree lt = LayeredTree::with_source(0);
    NodeId next = 1;
    std::map<NodeId, std::vector<NodeId>> kids;
    for (int i = 1; i < n_layers; ++i) {
        const std::vector<NodeId> prev = lt.layers[static_cast<std::size_t>(i) - 1];
        std::uniform_int_distribution<std::size_t> pick(0, prev.size() - 1);
        for (int j = 0; j < w; ++j) {
            NodeId p = prev[pick(rng)];
            kids[p].push_back(next);
            lt.add_node(i, next++, p, 1);
        }
    }
    // The layer N-1 node last in lowest-id preorder.
    NodeId last = 0;
    std::vector<NodeId> stack{0};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        if (lt.layer_of.at(u) == n_layers - 1) last = u;
        auto it = kids.find(u);
        if (it != kids.end()) stack.insert(stack.end(), it->second.rbegin(), it->second.rend());
    }
    lt.add_node(n_layers, next, last, 1);
    lt.target = next;
    return lt;
}

LayeredTree gen_average_case(int w, int n_layers, std::uint64_t seed) {
    if (w < 1 || n_layers < 1) throw InputError("need w >= 1 and N >= 1");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    LayeredTree lt = LayeredTree::with_source(0);
    NodeId next = 1;
    for (int i = 1; i <= n_layers; ++i) {
        const std::vector<NodeId> prev = lt.layers[static_cast<std::size_t>(i) - 1];
        std::uniform_int_distribution<std::size_t> pick(0, prev.size() - 1);
        for (int j = 0; j < w; ++j) {
            NodeId p = prev[pick(rng)];
            lt.add_node(i, next++, p, coin(rng) ? 1 : 0);
        }
    }
    const std::vector<NodeId> last = lt.layers[static_cast<std::size_t>(n_layers)];
    NodeId p = last[std::uniform_int_distribution<std::size_t>(0, last.size() - 1)(rng)];
    lt.add_node(n_layers + 1, next, p, 0);
    lt.target = next;
    return lt;
}

int tune_k(const LayeredTree& lt) {
    int w = static_cast<int>(lt.width());
    int r = static_cast<int>(std::sqrt(static_cast<double>(w)));
    while (r * r > w) --r;
    while ((r + 1) * (r + 1) <= w) ++r;
    return std::max(2, r);
}

long long dfs_traverse_cost(const LayeredTree& lt) {
    lt.validate();
    std::map<NodeId, std::vector<NodeId>> kids;
    for (std::size_t i = 1; i < lt.layers.size(); ++i)
        for (NodeId v : lt.layers[i]) kids[lt.parent.at(v)].push_back(v);
    for (auto& [u, ch] : kids) std::sort(ch.begin(), ch.end());
    // Iterative Euler walk; each frame remembers the next child to try.
    long long cost = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{lt.source, 0}};
    while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (u == lt.target) return cost;
        auto it = kids.find(u);
        if (it != kids.end() && i < it->second.size()) {
            NodeId c = it->second[i++];
            cost += lt.length.at(c);
            stack.emplace_back(c, 0);
        } else {
            if (u != lt.source) cost += lt.length.at(u);
            stack.pop_back();
        }
    }
    throw InvariantViolation("target unreachable");
}

} // namespace treeminer
