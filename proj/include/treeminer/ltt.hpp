#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "treeminer/tree.hpp"

namespace treeminer {

// Tree revealed layer by layer. Layer 0 holds only the source; the target
// sits in the last layer. Every other node has one parent in the previous
// layer. Lengths are nonnegative integers; traversal needs {0,1}.
struct LayeredTree {
    std::vector<std::vector<NodeId>> layers;
    std::map<NodeId, NodeId> parent;
    std::map<NodeId, int> length;
    std::map<NodeId, int> layer_of;
    NodeId source = 0;
    NodeId target = kNoNode;

    static LayeredTree with_source(NodeId source);
    void add_node(int layer, NodeId id, NodeId par, int len);

    int num_layers() const { return static_cast<int>(layers.size()) - 1; }
    std::size_t width() const;
    long long total_length() const;
    long long depth() const;   // source to target
    int max_length() const;
    bool binary_lengths() const { return max_length() <= 1; }
    std::size_t size() const { return layer_of.size(); }

    // Throws InputError on a malformed instance.
    void validate() const;
};

LayeredTree read_layered(std::istream& in);
LayeredTree read_layered_file(const std::string& path);
void write_layered(std::ostream& out, const LayeredTree& lt);

// Zero-length edges merged away. Ids of the contracted tree follow
// (layer, id) order so children come in the order they are revealed.
struct ContractedTree {
    RootedTree tree;
    std::map<NodeId, NodeId> rep;                // layered node -> tree node
    std::vector<int> reveal;                     // by tree node: first layer
    std::vector<std::vector<NodeId>> layer_reps; // sorted, per layer
    // Per layer: tree node -> lowest layered id it stands for.
    std::vector<std::map<NodeId, NodeId>> witness;
};

ContractedTree contract_zero_edges(const LayeredTree& lt);

// Replaces every edge of length l > 1 by a chain, adding intermediate
// layers so each layer step carries lengths in {0,1}.
LayeredTree subdivide_lengths(const LayeredTree& lt);

// Drops nodes of the last layer other than the target.
LayeredTree prune_last_layer(const LayeredTree& lt);

using FractionalPosition = std::map<NodeId, double>;

struct FractionalTraversal {
    int k = 0;
    long long moves = 0;
    double expected_cost = 0.0;   // moves / k
    double transport_cost = 0.0;  // sum of per-layer OT costs
    double bound = 0.0;           // (2L + 1200 k^2 D)/k + 1
    bool within_bound = true;
    std::vector<FractionalPosition> positions; // per layer, on layered nodes
    std::vector<long long> window_moves;       // moves spent reaching layer i+1
    std::vector<double> window_transport;
};

double ltt_bound(long long total_length, int k, long long depth);

// Robots explore the contracted tree with only the revealed layers visible;
// after each reveal, moves go round-robin to robots not yet on the newest
// layer until all of them are.
FractionalTraversal fractional_traverse(const LayeredTree& lt, int k, bool enforce = true);

// Samples searcher paths from a fractional traversal via the per-layer
// optimal couplings.
class Rounding {
public:
    Rounding(const LayeredTree& lt, const FractionalTraversal& ft);
    // One path over the layers (layered node ids) and its length.
    double sample(std::mt19937_64& rng, std::vector<NodeId>* path = nullptr) const;

private:
    struct Branch {
        std::vector<NodeId> dest;
        std::vector<double> cumulative;
    };
    ContractedTree ct_;
    std::vector<std::map<NodeId, Branch>> steps_;
    std::vector<std::map<NodeId, NodeId>> witness_;
};

double rounded_traverse(const LayeredTree& lt, int k, std::uint64_t seed);

struct MonteCarlo {
    std::size_t samples = 0;
    double mean = 0.0;
    double std_error = 0.0;
};
MonteCarlo rounded_monte_carlo(const LayeredTree& lt, const FractionalTraversal& ft, std::size_t samples,
                               std::uint64_t seed);

// Layers of exactly w nodes with uniform parents and unit lengths; the
// target hangs off the node a depth-first search would reach last.
LayeredTree gen_unit_layered(int w, int n_layers, std::uint64_t seed);

// w nodes per layer, uniform parents, Bernoulli(1/2) lengths; the target is
// attached by a zero edge to a random node of the last layer.
LayeredTree gen_average_case(int w, int n_layers, std::uint64_t seed);

int tune_k(const LayeredTree& lt);

// Distance walked by a depth-first search (lowest id first) until it
// first reaches the target.
long long dfs_traverse_cost(const LayeredTree& lt);

} // namespace treeminer
