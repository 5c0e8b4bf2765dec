#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "treeminer/tree.hpp"

namespace treeminer {

// phi(x) = a x + b x^2. Defaults for k miners: a = 20k, b = 5.
struct PotentialParams {
    double a = 40.0;
    double b = 5.0;
    double epsilon = 0.5;
    double epsilon_prime = 0.5;
    double gamma = 48.0;

    static PotentialParams defaults(int k);
    // Throws InputError unless 2bk <= eps' a and b(2 - 2eps - eps') >= 2 + eps'.
    void validate(int k) const;
    bool admissible(int k) const;

    double phi(double x) const { return a * x + b * x * x; }
    double dphi(double x) const { return a + 2.0 * b * x; }
};

double phi(const PotentialParams& p, double x);

template <class T>
double potential(const RootedTree& tree, const LeafConfig<T>& c, const PotentialParams& p);

struct TensionReport {
    NodeId source;
    NodeId dest;
    double tension;
    double distance;
    double slack;
};

// Potential drop from moving one robot src -> dst.
TensionReport tension(const RootedTree& tree, const DiscreteConfig& c, NodeId src, NodeId dst,
                      const PotentialParams& p);

// A move fires once slack <= this and its tension is positive.
inline constexpr double kSlackTolerance = 1e-9;

bool stable(const RootedTree& tree, const DiscreteConfig& c, const PotentialParams& p);

// Smallest slack over all legal pairs, with the (src, dst) achieving it.
// Ties go to the smallest source id, then the smallest destination id.
TensionReport tightest_pair(const RootedTree& tree, const DiscreteConfig& c, const PotentialParams& p);

struct SettleResult {
    DiscreteConfig config;
    double cost = 0.0;
    std::vector<UnitMove> moves;
};

SettleResult settle(const RootedTree& tree, DiscreteConfig c, const PotentialParams& p);

struct ElongationEvent {
    double delta = std::numeric_limits<double>::infinity();
    NodeId dest = kNoNode;
};

ElongationEvent next_elongation_event(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                                      const PotentialParams& p);

// Replaces leaf by an internal node with m children of length delta.
// Children get the even split; the first x % m of them (by id) get one more.
struct ForkedState {
    RootedTree tree;
    DiscreteConfig config;
    std::vector<NodeId> children;
};

ForkedState apply_fork(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                       const std::vector<NodeId>& child_ids, double delta);

using ForkAcceptor = std::function<bool(const ForkedState&)>;

// Largest delta in {1, 1/2, 1/4, ...} for which the fork is stable (and
// accepted by the optional extra check), searched down to 1e-12 of the
// shortest edge. When no length is stable, the largest accepted one; the
// caller settles afterwards.
double fork_delta(const RootedTree& tree, const DiscreteConfig& c, NodeId leaf,
                  const std::vector<NodeId>& child_ids, const PotentialParams& p,
                  const ForkAcceptor& accept = {});

} // namespace treeminer
