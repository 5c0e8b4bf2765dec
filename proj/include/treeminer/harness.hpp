#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <thread>
#include <vector>

#include "treeminer/acte.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

enum class Family { Path, Star, Broom, Binary, RandRec, Spider };
Family parse_family(const std::string& name);
const char* to_string(Family f);
std::vector<Family> all_families();

// Whether a unit tree of the family with n nodes and depth <= D exists.
bool feasible(Family f, int n, int depth);
// Unit-edge tree with exactly n nodes and depth at most D; node 0 is the root.
// Throws InputError when the shape is infeasible.
RootedTree gen_tree(Family f, int n, int depth, std::uint64_t seed);

// Runs body(i) for i in [0, count) on a few threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

struct SuiteConfig {
    std::vector<Family> families;
    std::vector<int> ns;
    std::vector<int> depths;
    std::vector<int> ks;
    int seeds = 10;
    std::uint64_t base_seed = 0;
    std::vector<Scheduler> schedulers;
    bool acte = true;
    bool cte = true;
    bool verify_tm = false;
    bool timing = false;
    unsigned threads = 0;   // 0: one per core

    // Six families, n in {100, 1000, 10000}, D in {5, 20, 100}, k in
    // {2, 4, 8}, ten seeds and all three schedulers.
    static SuiteConfig defaults();
};

struct BenchRow {
    std::string family;
    int n = 0;
    int nominal_depth = 0;
    int depth = 0;
    int k = 0;
    std::string scheduler;
    std::uint64_t seed = 0;
    std::string mode;     // acte or cte
    double value = 0.0;   // moves or rounds
    double bound = 0.0;
    double margin = 0.0;
    double wall = 0.0;
    std::string status = "ok";   // ok, bound, invariant, error
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::size_t skipped = 0;
    std::size_t bound_violations = 0;
    std::size_t failures = 0;    // invariant or other errors
};

BenchResult bench(const SuiteConfig& cfg);
// Columns: family,n,D,depth,k,scheduler,seed,mode,value,bound,margin,wall,status.
// The wall column is 0 unless timing was asked for, so reruns match byte for byte.
void write_csv(std::ostream& out, const BenchResult& r);

struct CheckAllReport {
    std::size_t events = 0;
    bool clean = true;
    std::size_t first_index = 0;
    std::string message;
};

// Replays a JSON-lines game trace and re-checks every snapshot.
CheckAllReport check_all(std::istream& trace);
CheckAllReport check_all_file(const std::string& path);

} // namespace treeminer
