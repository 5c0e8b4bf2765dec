#include "treeminer/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "treeminer/cte.hpp"
#include "treeminer/error.hpp"
#include "treeminer/game.hpp"
#include "treeminer/trace.hpp"

namespace treeminer {

namespace {

constexpr Family kFamilies[] = {Family::Path, Family::Star, Family::Broom,
                                Family::Binary, Family::RandRec, Family::Spider};

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    // splitmix64 step over the running hash
    std::uint64_t z = h + 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int spider_legs(int n, int depth) {
    int need = (n - 1 + depth - 1) / depth;
    return std::max(need, std::min(2, n - 1));
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

} // namespace

Family parse_family(const std::string& name) {
    for (Family f : kFamilies)
        if (name == to_string(f)) return f;
    throw InputError("unknown tree family '" + name + "'");
}

const char* to_string(Family f) {
    switch (f) {
    case Family::Path: return "path";
    case Family::Star: return "star";
    case Family::Broom: return "broom";
    case Family::Binary: return "binary";
    case Family::RandRec: return "randrec";
    case Family::Spider: return "spider";
    }
    return "?";
}

std::vector<Family> all_families() { return {std::begin(kFamilies), std::end(kFamilies)}; }

bool feasible(Family f, int n, int depth) {
    if (n < 1 || depth < 0) return false;
    if (n == 1) return true;
    if (depth < 1) return false;
    switch (f) {
    case Family::Path: return n - 1 <= depth;
    case Family::Star:
    case Family::RandRec:
    case Family::Spider: return true;
    case Family::Broom: return n >= depth + 1;
    case Family::Binary: return depth >= 30 || n <= (1 << (depth + 1)) - 1;
    }
    return false;
}

RootedTree gen_tree(Family f, int n, int depth, std::uint64_t seed) {
    if (!feasible(f, n, depth)) {
        std::ostringstream msg;
        msg << "no " << to_string(f) << " tree with n=" << n << " and depth <= " << depth;
        throw InputError(msg.str());
    }
    std::mt19937_64 rng(seed);
    RootedTree t(0);
    if (n == 1) return t;
    switch (f) {
    case Family::Path:
        for (int i = 1; i < n; ++i) t.add_child(i - 1, 1.0, i);
        break;
    case Family::Star:
        for (int i = 1; i < n; ++i) t.add_child(0, 1.0, i);
        break;
    case Family::Broom:
        // Handle of depth-1 nodes, bristles at depth D.
        for (int i = 1; i < depth; ++i) t.add_child(i - 1, 1.0, i);
        for (int i = depth; i < n; ++i) t.add_child(depth - 1, 1.0, i);
        break;
    case Family::Binary: {
        std::vector<NodeId> open{0};
        std::vector<int> dep{0};
        for (int i = 1; i < n; ++i) {
            std::size_t j = std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng);
            NodeId p = open[j];
            t.add_child(p, 1.0, i);
            dep.push_back(dep[static_cast<std::size_t>(p)] + 1);
            if (t.children(p).size() == 2) {
                open[j] = open.back();
                open.pop_back();
            }
            if (dep.back() < depth) open.push_back(i);
        }
        break;
    }
    case Family::RandRec: {
        std::vector<NodeId> open{0};
        std::vector<int> dep{0};
        for (int i = 1; i < n; ++i) {
            NodeId p = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
            t.add_child(p, 1.0, i);
            dep.push_back(dep[static_cast<std::size_t>(p)] + 1);
            if (dep.back() < depth) open.push_back(i);
        }
        break;
    }
    case Family::Spider: {
        const int legs = spider_legs(n, depth);
        std::vector<NodeId> tip(static_cast<std::size_t>(legs), 0);
        for (int i = 1; i < n; ++i) {
            auto leg = static_cast<std::size_t>((i - 1) % legs);
            t.add_child(tip[leg], 1.0, i);
            tip[leg] = i;
        }
        break;
    }
    }
    return t;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    if (threads <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

SuiteConfig SuiteConfig::defaults() {
    SuiteConfig c;
    c.families = all_families();
    c.ns = {100, 1000, 10000};
    c.depths = {5, 20, 100};
    c.ks = {2, 4, 8};
    c.seeds = 10;
    c.schedulers = {Scheduler::RoundRobin, Scheduler::Random, Scheduler::Lopsided};
    return c;
}

BenchResult bench(const SuiteConfig& cfg) {
    struct Job {
        Family family;
        int n, depth, k;
        std::uint64_t seed;
        bool cte;
        Scheduler scheduler;
    };
    std::vector<Job> jobs;
    BenchResult out;
    for (Family f : cfg.families)
        for (int n : cfg.ns)
            for (int d : cfg.depths) {
                if (!feasible(f, n, d)) {
                    ++out.skipped;
                    continue;
                }
                for (int s = 0; s < cfg.seeds; ++s) {
                    std::uint64_t seed = mix(mix(mix(mix(cfg.base_seed, static_cast<std::uint64_t>(f)), n), d), s);
                    for (int k : cfg.ks) {
                        if (cfg.acte)
                            for (Scheduler sc : cfg.schedulers) jobs.push_back({f, n, d, k, seed, false, sc});
                        if (cfg.cte) jobs.push_back({f, n, d, k, seed, true, Scheduler::RoundRobin});
                    }
                }
            }

    out.rows.resize(jobs.size());
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        const Job& j = jobs[i];
        BenchRow& row = out.rows[i];
        row.family = to_string(j.family);
        row.n = j.n;
        row.nominal_depth = j.depth;
        row.k = j.k;
        row.seed = j.seed;
        row.mode = j.cte ? "cte" : "acte";
        row.scheduler = to_string(j.scheduler);
        auto start = std::chrono::steady_clock::now();
        try {
            RootedTree tree = gen_tree(j.family, j.n, j.depth, j.seed);
            row.depth = tree.height();
            if (j.cte) {
                CteOptions o;
                o.enforce = false;
                o.verify_tm = cfg.verify_tm;
                CteReport r = run_cte(tree, j.k, o);
                row.value = static_cast<double>(r.rounds);
                row.bound = r.bound;
                if (r.rounds > r.explore_rounds + row.depth) row.status = "invariant";
            } else {
                ActeOptions o;
                o.scheduler = j.scheduler;
                o.seed = mix(j.seed, static_cast<std::uint64_t>(j.k));
                o.verify_tm = cfg.verify_tm;
                o.enforce = false;
                ActeReport r = run_acte(tree, j.k, o);
                row.value = static_cast<double>(r.moves);
                row.bound = r.bound;
                if (!r.within_ledger) row.status = "invariant";
            }
            row.margin = row.bound - row.value;
            if (row.margin < 0) row.status = "bound";
        } catch (const InvariantViolation&) {
            row.status = "invariant";
        } catch (const std::exception&) {
            row.status = "error";
        }
        if (cfg.timing)
            row.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    for (const auto& r : out.rows) {
        if (r.status == "bound") ++out.bound_violations;
        if (r.status == "invariant" || r.status == "error") ++out.failures;
    }
    return out;
}

void write_csv(std::ostream& out, const BenchResult& r) {
    out << "family,n,D,depth,k,scheduler,seed,mode,value,bound,margin,wall,status\n";
    for (const auto& row : r.rows) {
        out << row.family << ',' << row.n << ',' << row.nominal_depth << ',' << row.depth << ',' << row.k << ','
            << (row.mode == "cte" ? "cyclic" : row.scheduler) << ',' << row.seed << ',' << row.mode << ','
            << fmt(row.value) << ',' << fmt(row.bound) << ',' << fmt(row.margin) << ',' << fmt(row.wall) << ','
            << row.status << '\n';
    }
}

CheckAllReport check_all(std::istream& trace) {
    CheckAllReport rep;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    int k = 0;
    PotentialParams p;
    while (std::getline(trace, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw InputError("trace line " + std::to_string(lineno) + " is not JSON");
        }
        if (!have_header) {
            p = parse_header(j, k);
            have_header = true;
            continue;
        }
        Snapshot s = parse_snapshot(j);
        ++rep.events;
        if (!rep.clean) continue;
        std::string why;
        try {
            validate_config(s.state.tree, s.state.config);
            if (s.state.config.total() != k) why = "configuration does not hold k robots";
        } catch (const InputError& e) {
            why = e.what();
        }
        if (why.empty()) {
            StateCheck c = check_state(s.state, p);
            if (!c.bounds.x_at_least_one) why = "a leaf holds no robot";
            else if (!c.master.holds) why = "master inequality lhs=" + fmt(c.master.lhs) + " rhs=" + fmt(c.master.rhs);
            else if (!c.bounds.holds) why = "x/y bounds: " + c.bounds.failure;
            else if (!c.simple) why = "tree is not simple";
        }
        if (!why.empty()) {
            rep.clean = false;
            rep.first_index = s.index;
            rep.message = why;
        }
    }
    return rep;
}

CheckAllReport check_all_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return check_all(in);
}

} // namespace treeminer
