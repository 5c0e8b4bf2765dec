#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "treeminer/acte.hpp"
#include "treeminer/game.hpp"
#include "treeminer/ltt.hpp"

namespace treeminer {

using Json = nlohmann::json;

// First line of a game trace.
Json game_header(int k, const PotentialParams& p, const std::string& adversary, std::uint64_t seed);
// Full snapshot after one event: the event itself, the tree as
// [id, parent, length] triples, leaf weights as [leaf, x] pairs and the cost.
Json game_snapshot(std::size_t index, const GameState& state, const GameEvent& ev);

struct Snapshot {
    std::size_t index = 0;
    GameState state;
};
// Throws InputError on a malformed line.
Snapshot parse_snapshot(const Json& line);
PotentialParams parse_header(const Json& line, int& k);

Json move_record(std::size_t index, const ActeMove& mv);
Json layer_record(int layer, const FractionalPosition& pos);

// One compact JSON document per line.
void write_line(std::ostream& out, const Json& j);

} // namespace treeminer
