#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "treeminer/fractional.hpp"
#include "treeminer/potential.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

enum class EventKind { Elongate, Fork, Delete, Move };
const char* to_string(EventKind k);

struct GameEvent {
    EventKind kind = EventKind::Move;
    NodeId leaf = kNoNode;
    NodeId dest = kNoNode;          // Move only
    double amount = 0.0;            // elongation length, or fork delta
    int m = 0;                      // fork arity
    std::vector<NodeId> children;   // fork children
    double cost_delta = 0.0;
    double potential_after = 0.0;
};

struct GameState {
    RootedTree tree;
    DiscreteConfig config;
    double cost = 0.0;
    double clock = 0.0;
    std::vector<GameEvent> event_log;
};

// Root 0 with a single leaf 1 of the given length holding all k robots.
GameState initial_game(int k, double leaf_length = 1.0);

struct CtmMove {
    enum class Kind { Elongate, Fork, Delete } kind = Kind::Elongate;
    NodeId leaf = kNoNode;
    double amount = 0.0;
    int m = 0;
    // Fork children ids; fresh ids are allocated when empty.
    std::vector<NodeId> child_ids;

    static CtmMove elongate(NodeId leaf, double amount) { return {Kind::Elongate, leaf, amount, 0, {}}; }
    static CtmMove fork(NodeId leaf, int m) { return {Kind::Fork, leaf, 0.0, m, {}}; }
    static CtmMove remove(NodeId leaf) { return {Kind::Delete, leaf, 0.0, 0, {}}; }
};

std::string describe(const CtmMove& move);

struct GameOptions {
    // Keep events in state.event_log.
    bool record = true;
    // Also require the fork length to keep the fractional optimum within
    // its bounds (children at least eps, parent loses at most 1/2).
    bool oracle_fork = true;
};

using EventObserver = std::function<void(const GameState&, const GameEvent&)>;

// Applies one adversary move. Elongation is split at the exact lengths where
// the player moves a robot, and stops early if the leaf is left with one robot.
void ctm_apply(GameState& state, const CtmMove& move, const PotentialParams& p, const GameOptions& opts = {},
               const EventObserver& observe = {});

// Potential-based checks on a state, with the fractional optimum solved once.
struct StateCheck {
    MasterReport master;
    XyBoundsReport bounds;
    bool simple = true;
    double min_leaf_depth = 0.0;
    bool ok() const { return master.holds && bounds.holds && simple; }
};

StateCheck check_state(const GameState& state, const PotentialParams& p);
MasterReport check_master_inequality(const GameState& state, const PotentialParams& p);
XyBoundsReport check_xy_bounds(const GameState& state, const PotentialParams& p);

class Adversary {
public:
    virtual ~Adversary() = default;
    // nullopt ends the run.
    virtual std::optional<CtmMove> next(const GameState& state) = 0;
};

class NullAdversary : public Adversary {
public:
    std::optional<CtmMove> next(const GameState&) override { return std::nullopt; }
};

class RandomAdversary : public Adversary {
public:
    explicit RandomAdversary(std::uint64_t seed, double max_elongation = 2.0);
    std::optional<CtmMove> next(const GameState& state) override;

private:
    std::mt19937_64 rng_;
    double max_elongation_;
};

// Elongates the deepest leaf that holds two or more robots; when none
// exists, kills the shallowest leaf.
class DeepestAdversary : public Adversary {
public:
    explicit DeepestAdversary(double amount = 1.0) : amount_(amount) {}
    std::optional<CtmMove> next(const GameState& state) override;

private:
    double amount_;
};

// Lines: "E <leaf> <amount>", "F <leaf> <m>", "D <leaf>". '#' starts a comment.
class ScriptAdversary : public Adversary {
public:
    explicit ScriptAdversary(std::vector<CtmMove> moves) : moves_(std::move(moves)) {}
    static ScriptAdversary parse(std::istream& in);
    static ScriptAdversary from_file(const std::string& path);
    std::optional<CtmMove> next(const GameState& state) override;

private:
    std::vector<CtmMove> moves_;
    std::size_t pos_ = 0;
};

std::unique_ptr<Adversary> make_adversary(const std::string& spec, std::uint64_t seed);

struct RunOptions {
    std::size_t max_moves = 1000;
    bool check = false;
    GameOptions game;
};

struct RunReport {
    std::size_t moves = 0;
    std::size_t events = 0;
    std::size_t master_violations = 0;
    std::size_t bound_violations = 0;
    std::size_t x_below_one = 0;
    std::size_t not_simple = 0;
    // Largest (Cost + psi(x)) / (gamma psi(y)) seen while checking.
    double worst_master_ratio = 0.0;
    // Largest Cost / (gamma phi(k) * shallowest leaf depth).
    double worst_depth_ratio = 0.0;
    std::string first_violation;
    bool clean() const { return master_violations + bound_violations + x_below_one + not_simple == 0; }
};

RunReport run_adversary(GameState& state, Adversary& adversary, const PotentialParams& p, const RunOptions& opts,
                        const EventObserver& observe = {});

} // namespace treeminer
