#include "treeminer/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace treeminer {

RootedTree::RootedTree(NodeId root) : root_(root) {
    if (root < 0) throw InputError("root id must be nonnegative");
    claim(root);
}

void RootedTree::claim(NodeId id) {
    if (id < 0) throw InputError("node ids must be nonnegative");
    if (static_cast<std::size_t>(id) >= nodes_.size()) nodes_.resize(static_cast<std::size_t>(id) + 1);
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.used) throw InputError("node id " + std::to_string(id) + " already used");
    n.used = true;
    n.alive = true;
    ++alive_;
    order_.insert(std::upper_bound(order_.begin(), order_.end(), id), id);
}

void RootedTree::retire(NodeId id) {
    --alive_;
    order_.erase(std::lower_bound(order_.begin(), order_.end(), id));
}

bool RootedTree::contains(NodeId u) const noexcept {
    return u >= 0 && static_cast<std::size_t>(u) < nodes_.size() &&
           nodes_[static_cast<std::size_t>(u)].alive;
}

const RootedTree::Node& RootedTree::node(NodeId u) const {
    if (!contains(u)) throw InputError("unknown node id " + std::to_string(u));
    return nodes_[static_cast<std::size_t>(u)];
}

RootedTree::Node& RootedTree::node(NodeId u) {
    if (!contains(u)) throw InputError("unknown node id " + std::to_string(u));
    return nodes_[static_cast<std::size_t>(u)];
}

NodeId RootedTree::parent(NodeId u) const { return node(u).parent; }

double RootedTree::edge_length(NodeId u) const {
    if (u == root_) throw InputError("the root has no parent edge");
    return node(u).length;
}

void RootedTree::set_edge_length(NodeId u, double length) {
    if (u == root_) throw InputError("the root has no parent edge");
    if (!(length > 0.0)) throw InputError("edge lengths must be positive");
    node(u).length = length;
}

const std::vector<NodeId>& RootedTree::children(NodeId u) const { return node(u).children; }

bool RootedTree::is_leaf(NodeId u) const {
    const Node& n = node(u);
    if (u == root_) return alive_ == 1;
    return n.children.empty();
}

std::vector<NodeId> RootedTree::leaves() const {
    std::vector<NodeId> out;
    if (alive_ == 1) {
        out.push_back(root_);
        return out;
    }
    for (NodeId u : order_)
        if (u != root_ && nodes_[static_cast<std::size_t>(u)].children.empty()) out.push_back(u);
    return out;
}

std::vector<NodeId> RootedTree::nodes() const { return order_; }

std::vector<NodeId> RootedTree::postorder() const {
    std::vector<NodeId> order;
    order.reserve(alive_);
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto& [u, next] = stack.back();
        const auto& ch = nodes_[static_cast<std::size_t>(u)].children;
        if (next < ch.size()) {
            NodeId c = ch[next++];
            stack.emplace_back(c, 0);
        } else {
            order.push_back(u);
            stack.pop_back();
        }
    }
    return order;
}

NodeId RootedTree::add_child(NodeId parent, double length) {
    return add_child(parent, length, static_cast<NodeId>(nodes_.size()));
}

NodeId RootedTree::add_child(NodeId parent, double length, NodeId id) {
    if (!contains(parent)) throw InputError("unknown parent id " + std::to_string(parent));
    if (!(length > 0.0)) throw InputError("edge lengths must be positive");
    claim(id);
    Node& n = nodes_[static_cast<std::size_t>(id)];
    n.parent = parent;
    n.length = length;
    auto& ch = nodes_[static_cast<std::size_t>(parent)].children;
    ch.insert(std::upper_bound(ch.begin(), ch.end(), id), id);
    return id;
}

void RootedTree::remove_leaf(NodeId u) {
    if (u == root_) throw InputError("cannot remove the root");
    Node& n = node(u);
    if (!n.children.empty()) throw InputError("node " + std::to_string(u) + " is not a leaf");
    auto& ch = node(n.parent).children;
    ch.erase(std::find(ch.begin(), ch.end(), u));
    n.alive = false;
    n.children.clear();
    retire(u);
}

void RootedTree::relabel(NodeId from, NodeId to) {
    Node moved = node(from);
    claim(to);
    Node& target = nodes_[static_cast<std::size_t>(to)];
    target.parent = moved.parent;
    target.length = moved.length;
    target.children = moved.children;
    for (NodeId c : target.children) nodes_[static_cast<std::size_t>(c)].parent = to;
    if (from == root_) {
        root_ = to;
    } else {
        auto& ch = nodes_[static_cast<std::size_t>(moved.parent)].children;
        ch.erase(std::find(ch.begin(), ch.end(), from));
        ch.insert(std::upper_bound(ch.begin(), ch.end(), to), to);
    }
    Node& old = nodes_[static_cast<std::size_t>(from)];
    old.alive = false;
    old.children.clear();
    retire(from);
}

int RootedTree::depth(NodeId u) const {
    int d = 0;
    for (NodeId v = u; v != root_; v = node(v).parent) ++d;
    return d;
}

double RootedTree::root_distance(NodeId u) const {
    double d = 0.0;
    for (NodeId v = u; v != root_; v = node(v).parent) d += node(v).length;
    return d;
}

int RootedTree::height() const {
    std::vector<int> dep(nodes_.size(), 0);
    int h = 0;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        for (NodeId c : nodes_[static_cast<std::size_t>(u)].children) {
            dep[static_cast<std::size_t>(c)] = dep[static_cast<std::size_t>(u)] + 1;
            h = std::max(h, dep[static_cast<std::size_t>(c)]);
            stack.push_back(c);
        }
    }
    return h;
}

bool RootedTree::is_ancestor(NodeId ancestor, NodeId u) const {
    node(ancestor);
    for (NodeId v = u;; v = node(v).parent) {
        if (v == ancestor) return true;
        if (v == root_) return false;
    }
}

bool RootedTree::is_simple() const {
    for (NodeId u : order_)
        if (u != root_ && nodes_[static_cast<std::size_t>(u)].children.size() == 1) return false;
    return true;
}

NodeId lca(const RootedTree& tree, NodeId u, NodeId v) {
    int du = tree.depth(u);
    int dv = tree.depth(v);
    while (du > dv) { u = tree.parent(u); --du; }
    while (dv > du) { v = tree.parent(v); --dv; }
    while (u != v) {
        u = tree.parent(u);
        v = tree.parent(v);
    }
    return u;
}

std::vector<NodeId> path_to_ancestor(const RootedTree& tree, NodeId u, NodeId a) {
    std::vector<NodeId> path;
    for (NodeId w = u; w != a; w = tree.parent(w)) {
        if (w == tree.root()) throw InputError("not an ancestor");
        path.push_back(w);
    }
    return path;
}

double distance(const RootedTree& tree, NodeId u, NodeId v) {
    NodeId a = lca(tree, u, v);
    double d = 0.0;
    for (NodeId w = u; w != a; w = tree.parent(w)) d += tree.edge_length(w);
    for (NodeId w = v; w != a; w = tree.parent(w)) d += tree.edge_length(w);
    return d;
}


void RootedTree::contract(NodeId u) {
    if (u == root_) throw InputError("cannot contract the root");
    Node& n = node(u);
    if (n.children.size() != 1) throw InputError("node " + std::to_string(u) + " does not have one child");
    NodeId child = n.children.front();
    NodeId p = n.parent;
    Node& c = nodes_[static_cast<std::size_t>(child)];
    c.parent = p;
    c.length += n.length;
    auto& ch = nodes_[static_cast<std::size_t>(p)].children;
    ch.erase(std::find(ch.begin(), ch.end(), u));
    ch.insert(std::upper_bound(ch.begin(), ch.end(), child), child);
    n.alive = false;
    n.children.clear();
    retire(u);
}

std::vector<NodeId> normalize_simple_in_place(RootedTree& tree) {
    std::vector<NodeId> merged;
    for (NodeId u : tree.nodes())
        if (u != tree.root() && tree.children(u).size() == 1) merged.push_back(u);
    // Contracting one node never changes another node's child count.
    for (NodeId u : merged) tree.contract(u);
    return merged;
}

RootedTree normalize_simple(RootedTree tree) {
    normalize_simple_in_place(tree);
    return tree;
}

template <class T>
void validate_config(const RootedTree& tree, const LeafConfig<T>& c) {
    auto leaves = tree.leaves();
    if (leaves.size() != c.weights.size())
        throw InputError("configuration must assign a weight to every leaf and nothing else");
    for (NodeId l : leaves) {
        auto it = c.weights.find(l);
        if (it == c.weights.end()) throw InputError("leaf " + std::to_string(l) + " missing from configuration");
        if (it->second < T{}) throw InputError("negative weight on leaf " + std::to_string(l));
    }
}

template <class T>
NodeValues<T> extend_config(const RootedTree& tree, const LeafConfig<T>& c) {
    // Leaves absent from c hold nothing; keys off the leaf set are an error.
    for (const auto& [leaf, w] : c.weights)
        if (!tree.contains(leaf) || !tree.children(leaf).empty())
            throw InputError("configuration names " + std::to_string(leaf) + ", which is not a leaf");
    NodeValues<T> x;
    x.reserve(tree.size());
    for (NodeId u : tree.postorder()) {
        T& xu = x[u];
        if (tree.children(u).empty()) {
            xu = c.at(u);
        } else {
            for (NodeId ch : tree.children(u)) xu += x.at(ch);
        }
    }
    return x;
}

template <class T>
double ot_cost(const RootedTree& tree, const LeafConfig<T>& c1, const LeafConfig<T>& c2) {
    if (std::abs(static_cast<double>(c1.total()) - static_cast<double>(c2.total())) > 1e-9)
        throw InputError("configurations have different totals");
    auto x1 = extend_config(tree, c1);
    auto x2 = extend_config(tree, c2);
    double total = 0.0;
    for (NodeId u : tree.nodes()) {
        if (u == tree.root()) continue;
        total += tree.edge_length(u) * std::abs(static_cast<double>(x1.at(u)) - static_cast<double>(x2.at(u)));
    }
    return total;
}

template void validate_config(const RootedTree&, const DiscreteConfig&);
template void validate_config(const RootedTree&, const FractionalConfig&);
template NodeValues<int> extend_config(const RootedTree&, const DiscreteConfig&);
template NodeValues<double> extend_config(const RootedTree&, const FractionalConfig&);
template double ot_cost(const RootedTree&, const DiscreteConfig&, const DiscreteConfig&);
template double ot_cost(const RootedTree&, const FractionalConfig&, const FractionalConfig&);

namespace {

// Bottom-up matching. Unmatched surplus and deficit are carried upward as
// (leaf, amount) lists and paired at the first node where both meet.
template <class T, class Emit>
void match_bottom_up(const RootedTree& tree, const LeafConfig<T>& c1, const LeafConfig<T>& c2,
                     T eps, Emit emit) {
    if (std::abs(static_cast<double>(c1.total() - c2.total())) > static_cast<double>(eps) + 1e-9)
        throw InputError("configurations have different totals");
    using List = std::vector<std::pair<NodeId, T>>;
    std::vector<List> surplus(static_cast<std::size_t>(tree.id_bound()));
    std::vector<List> deficit(static_cast<std::size_t>(tree.id_bound()));
    for (NodeId u : tree.postorder()) {
        auto su = static_cast<std::size_t>(u);
        List& s = surplus[su];
        List& d = deficit[su];
        for (NodeId ch : tree.children(u)) {
            auto sc = static_cast<std::size_t>(ch);
            s.insert(s.end(), surplus[sc].begin(), surplus[sc].end());
            d.insert(d.end(), deficit[sc].begin(), deficit[sc].end());
            List().swap(surplus[sc]);
            List().swap(deficit[sc]);
        }
        // Mass sitting on u itself; zero for internal nodes of leaf configs.
        T diff = c1.at(u) - c2.at(u);
        if (diff > eps) s.emplace_back(u, diff);
        if (diff < -eps) d.emplace_back(u, -diff);
        std::size_t i = 0, j = 0;
        while (i < s.size() && j < d.size()) {
            T m = std::min(s[i].second, d[j].second);
            emit(s[i].first, d[j].first, m);
            s[i].second -= m;
            d[j].second -= m;
            if (s[i].second <= eps) ++i;
            if (d[j].second <= eps) ++j;
        }
        s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i));
        d.erase(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(j));
    }
}

} // namespace

std::vector<UnitMove> ot_plan(const RootedTree& tree, const DiscreteConfig& c1, const DiscreteConfig& c2) {
    validate_config(tree, c1);
    validate_config(tree, c2);
    std::vector<UnitMove> plan;
    match_bottom_up<int>(tree, c1, c2, 0, [&](NodeId s, NodeId d, int m) {
        for (int t = 0; t < m; ++t) plan.push_back({s, d});
    });
    return plan;
}

std::vector<MassMove> ot_plan(const RootedTree& tree, const FractionalConfig& c1, const FractionalConfig& c2) {
    validate_config(tree, c1);
    validate_config(tree, c2);
    std::vector<MassMove> plan;
    match_bottom_up<double>(tree, c1, c2, 1e-12, [&](NodeId s, NodeId d, double m) {
        plan.push_back({s, d, m});
    });
    return plan;
}

std::vector<MassMove> ot_plan_nodes(const RootedTree& tree, const std::map<NodeId, double>& m1,
                                    const std::map<NodeId, double>& m2) {
    FractionalConfig c1{m1}, c2{m2};
    for (const auto* c : {&c1, &c2})
        for (const auto& [u, w] : c->weights)
            if (!tree.contains(u) || w < 0.0) throw InputError("bad mass at node " + std::to_string(u));
    std::vector<MassMove> plan;
    match_bottom_up<double>(tree, c1, c2, 1e-12, [&](NodeId s, NodeId d, double m) {
        plan.push_back({s, d, m});
    });
    return plan;
}

double plan_cost(const RootedTree& tree, const std::vector<MassMove>& plan) {
    double c = 0.0;
    for (const auto& mv : plan) c += mv.mass * distance(tree, mv.src, mv.dst);
    return c;
}

RootedTree read_tree(std::istream& in) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw InputError("empty tree file");
    std::istringstream head(line);
    std::string tag;
    long long n = 0;
    NodeId root = 0;
    if (!(head >> tag >> n >> root) || tag != "tree" || n < 1)
        throw InputError("expected header 'tree <n> <root>'");
    std::unordered_map<NodeId, std::vector<std::pair<NodeId, double>>> kids;
    for (long long i = 0; i + 1 < n; ++i) {
        if (!next_line()) throw InputError("tree file ends early");
        std::istringstream row(line);
        NodeId id = 0, par = 0;
        double len = 0.0;
        if (!(row >> id >> par >> len)) throw InputError("bad edge line: " + line);
        if (!(len > 0.0) || !std::isfinite(len)) throw InputError("edge lengths must be positive: " + line);
        kids[par].emplace_back(id, len);
    }
    RootedTree tree(root);
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        auto it = kids.find(u);
        if (it == kids.end()) continue;
        for (auto [c, len] : it->second) {
            tree.add_child(u, len, c);
            stack.push_back(c);
        }
        kids.erase(it);
    }
    if (static_cast<long long>(tree.size()) != n) throw InputError("tree edges do not connect to the root");
    return tree;
}

RootedTree read_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_tree(in);
}

void write_tree(std::ostream& out, const RootedTree& tree) {
    out << "tree " << tree.size() << ' ' << tree.root() << '\n';
    out.precision(17);
    for (NodeId u : tree.nodes()) {
        if (u == tree.root()) continue;
        out << u << ' ' << tree.parent(u) << ' ' << tree.edge_length(u) << '\n';
    }
}

} // namespace treeminer
