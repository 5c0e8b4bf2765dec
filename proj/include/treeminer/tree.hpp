#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "treeminer/error.hpp"

namespace treeminer {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Absolute tolerance for comparing lengths and real-valued masses.
inline constexpr double kLengthTolerance = 1e-9;

// Weighted rooted tree with stable node ids.
//
// Ids are never reused: removing a node retires its id, so logs written
// during a run can still refer to it. Every non-root node carries the
// length of the edge to its parent, which must be positive.
class RootedTree {
public:
    explicit RootedTree(NodeId root = 0);

    NodeId root() const noexcept { return root_; }
    bool contains(NodeId u) const noexcept;
    std::size_t size() const noexcept { return alive_; }
    // One past the largest id ever allocated.
    NodeId id_bound() const noexcept { return static_cast<NodeId>(nodes_.size()); }

    NodeId parent(NodeId u) const;
    double edge_length(NodeId u) const;
    void set_edge_length(NodeId u, double length);
    const std::vector<NodeId>& children(NodeId u) const;

    // Childless non-root nodes; the root alone when it is the only node.
    bool is_leaf(NodeId u) const;
    std::vector<NodeId> leaves() const;
    std::vector<NodeId> nodes() const;
    std::vector<NodeId> postorder() const;

    NodeId add_child(NodeId parent, double length);
    NodeId add_child(NodeId parent, double length, NodeId id);
    void remove_leaf(NodeId u);
    // Moves a node to a fresh id, keeping parent, length and children.
    void relabel(NodeId from, NodeId to);
    // Removes a non-root node with exactly one child; the child inherits
    // the combined edge length.
    void contract(NodeId u);

    int depth(NodeId u) const;
    double root_distance(NodeId u) const;
    int height() const;
    bool is_ancestor(NodeId ancestor, NodeId u) const;
    // No node other than the root has exactly one child.
    bool is_simple() const;

private:
    struct Node {
        NodeId parent = kNoNode;
        double length = 0.0;
        bool alive = false;
        bool used = false;
        std::vector<NodeId> children;
    };

    const Node& node(NodeId u) const;
    Node& node(NodeId u);
    void claim(NodeId id);
    void retire(NodeId id);

    std::vector<Node> nodes_;
    // Alive ids in increasing order.
    std::vector<NodeId> order_;
    NodeId root_;
    std::size_t alive_ = 0;
};

NodeId lca(const RootedTree& tree, NodeId u, NodeId v);
double distance(const RootedTree& tree, NodeId u, NodeId v);
// Nodes on the path from u up to (excluding) its ancestor a.
std::vector<NodeId> path_to_ancestor(const RootedTree& tree, NodeId u, NodeId a);

// Merges every non-root node with a single child into that child.
// Returns the ids of the suppressed nodes.
std::vector<NodeId> normalize_simple_in_place(RootedTree& tree);
RootedTree normalize_simple(RootedTree tree);

// Nonnegative weights on the leaves of a tree.
template <class T>
struct LeafConfig {
    std::map<NodeId, T> weights;

    T total() const {
        T sum{};
        for (const auto& [leaf, w] : weights) sum += w;
        return sum;
    }
    T at(NodeId leaf) const {
        auto it = weights.find(leaf);
        return it == weights.end() ? T{} : it->second;
    }
    friend bool operator==(const LeafConfig&, const LeafConfig&) = default;
};

using DiscreteConfig = LeafConfig<int>;
using FractionalConfig = LeafConfig<double>;

// Throws InputError unless the config keys are exactly the tree's leaves
// and all weights are nonnegative.
template <class T>
void validate_config(const RootedTree& tree, const LeafConfig<T>& c);

template <class T>
using NodeValues = std::unordered_map<NodeId, T>;

// x_u = sum of x over leaves below u, for every node.
template <class T>
NodeValues<T> extend_config(const RootedTree& tree, const LeafConfig<T>& c);

template <class T>
double ot_cost(const RootedTree& tree, const LeafConfig<T>& c1, const LeafConfig<T>& c2);

struct UnitMove {
    NodeId src;
    NodeId dst;
    friend bool operator==(const UnitMove&, const UnitMove&) = default;
};

struct MassMove {
    NodeId src;
    NodeId dst;
    double mass;
};

// Optimal plan from c1 to c2, matching surplus to deficit inside the
// smallest subtree containing both.
std::vector<UnitMove> ot_plan(const RootedTree& tree, const DiscreteConfig& c1,
                              const DiscreteConfig& c2);
std::vector<MassMove> ot_plan(const RootedTree& tree, const FractionalConfig& c1,
                              const FractionalConfig& c2);

// Same matching for masses placed on arbitrary nodes.
std::vector<MassMove> ot_plan_nodes(const RootedTree& tree, const std::map<NodeId, double>& m1,
                                    const std::map<NodeId, double>& m2);
double plan_cost(const RootedTree& tree, const std::vector<MassMove>& plan);

// Text format: "tree <n> <root>" then "<id> <parent> <length>" per non-root node.
RootedTree read_tree(std::istream& in);
RootedTree read_tree_file(const std::string& path);
void write_tree(std::ostream& out, const RootedTree& tree);

} // namespace treeminer
