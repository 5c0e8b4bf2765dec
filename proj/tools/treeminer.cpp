#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "treeminer/acte.hpp"
#include "treeminer/cte.hpp"
#include "treeminer/error.hpp"
#include "treeminer/game.hpp"
#include "treeminer/harness.hpp"
#include "treeminer/ltt.hpp"
#include "treeminer/tm.hpp"
#include "treeminer/trace.hpp"

using namespace treeminer;

namespace {

enum Exit { kOk = 0, kBound = 2, kInvariant = 3, kInput = 4 };

std::uint64_t default_seed() {
    const char* env = std::getenv("TREEMINER_SEED");
    if (!env || !*env) return 0;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("TREEMINER_SEED is not an unsigned integer: ") + env);
    }
}

// Opens --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw InputError("cannot write " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::unique_ptr<std::ofstream> open_trace(const std::string& path) {
    if (path.empty()) return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw InputError("cannot write " + path);
    return f;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
    std::string adversary = "random";
    int k = 4;
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    bool check = false;
    std::string trace;
};

// "T <leaf>" lines drive the discrete game.
std::optional<std::vector<NodeId>> read_tm_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::vector<NodeId> picks;
    std::string line;
    bool tm = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::string tag;
        if (!(row >> tag)) continue;
        if (tag != "T") {
            if (tm) throw InputError("mixed T lines with continuous moves: " + line);
            return std::nullopt;
        }
        tm = true;
        NodeId leaf;
        if (!(row >> leaf)) throw InputError("bad line: " + line);
        picks.push_back(leaf);
    }
    if (!tm) return std::nullopt;
    return picks;
}

int simulate_tm(const SimulateArgs& a, const std::vector<NodeId>& picks) {
    TmState s = tm_init(a.k);
    auto trace = open_trace(a.trace);
    bool over = false;
    std::size_t i = 0;
    for (; i < picks.size() && i < a.steps; ++i) {
        TmStepResult r = tm_step(s, picks[i]);
        if (trace) {
            Json j = {{"i", i}, {"chosen", r.chosen}, {"x", r.x}, {"children", r.children},
                      {"dest", r.dest}, {"cost", s.cost}, {"ctm_cost", s.shadow.cost}};
            write_line(*trace, j);
        }
        if (s.cost > mining_bound(s.params, a.k, min_active_depth(s)) + 1e-9) over = true;
    }
    std::cout << "game=tm k=" << a.k << " steps=" << i << " cost=" << s.cost << " ctm_cost=" << s.shadow.cost
              << " depth=" << s.max_depth << " min_depth=" << min_active_depth(s)
              << " cost_violations=" << s.cost_violations << '\n';
    if (s.cost_violations > 0) return kInvariant;
    return over ? kBound : kOk;
}

int simulate(const SimulateArgs& a) {
    if (a.adversary.rfind("script:", 0) == 0) {
        if (auto picks = read_tm_script(a.adversary.substr(7))) return simulate_tm(a, *picks);
    }
    PotentialParams p = PotentialParams::defaults(a.k);
    p.validate(a.k);
    GameState state = initial_game(a.k);
    auto adv = make_adversary(a.adversary, a.seed);
    auto trace = open_trace(a.trace);
    if (trace) write_line(*trace, game_header(a.k, p, a.adversary, a.seed));
    std::size_t index = 0;
    RunOptions opts;
    opts.max_moves = a.steps;
    opts.check = a.check;
    opts.game.record = false;
    RunReport rep = run_adversary(state, *adv, p, opts, [&](const GameState& s, const GameEvent& ev) {
        if (trace) write_line(*trace, game_snapshot(index, s, ev));
        ++index;
    });
    std::cout << "game=ctm k=" << a.k << " moves=" << rep.moves << " events=" << rep.events << " cost=" << state.cost
              << " worst_depth_ratio=" << rep.worst_depth_ratio;
    if (a.check)
        std::cout << " worst_master_ratio=" << rep.worst_master_ratio << " master_violations=" << rep.master_violations
                  << " bound_violations=" << rep.bound_violations << " x_below_one=" << rep.x_below_one
                  << " not_simple=" << rep.not_simple;
    std::cout << '\n';
    if (!rep.first_violation.empty()) std::cerr << "first violation: " << rep.first_violation << '\n';
    if (!rep.clean()) return kInvariant;
    return rep.worst_depth_ratio > 1.0 + 1e-9 ? kBound : kOk;
}

// ---- explore -------------------------------------------------------------

struct ExploreArgs {
    std::string mode = "acte";
    std::string tree;
    int k = 2;
    std::string scheduler = "roundrobin";
    std::uint64_t seed = 0;
    bool sqrt_k = false;
    bool verify_tm = false;
    std::string trace;
};

int explore(const ExploreArgs& a) {
    RootedTree tree = read_tree_file(a.tree);
    for (NodeId u : tree.nodes())
        if (u != tree.root() && tree.edge_length(u) != 1.0) throw InputError("exploration needs unit edge lengths");
    auto trace = open_trace(a.trace);
    std::size_t index = 0;
    auto log = [&](const ActeMove& mv) { write_line(*trace, move_record(index++, mv)); };
    if (a.mode == "acte") {
        ActeOptions o;
        o.scheduler = parse_scheduler(a.scheduler);
        o.seed = a.seed;
        o.verify_tm = a.verify_tm;
        o.enforce = true;
        if (trace) o.on_move = log;
        ActeReport r = run_acte(tree, a.k, o);
        std::cout << "n=" << r.n << " D=" << r.depth << " k=" << r.k << " moves=" << r.moves
                  << " bound=" << r.bound << " fresh=" << r.fresh_moves << " toward=" << r.toward_moves
                  << " probe=" << r.probe_moves << " retarget=" << r.retarget_distance << " tm_cost=" << r.tm_cost
                  << " ctm_cost=" << r.ctm_cost << " tm_steps=" << r.tm_steps << '\n';
        return kOk;
    }
    if (a.mode != "cte") throw InputError("--mode must be acte or cte");
    CteOptions o;
    o.verify_tm = a.verify_tm;
    if (trace) o.on_move = log;
    int active = a.k;
    if (a.sqrt_k) {
        active = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(a.k)))));
        o.enforce = false;
    }
    CteReport r = run_cte_partial(tree, a.k, active, o);
    double ratio = static_cast<double>(r.rounds) / (static_cast<double>(r.n) / a.k + r.depth);
    std::cout << "n,D,k,runtime,bound,ratio\n"
              << r.n << ',' << r.depth << ',' << a.k << ',' << r.rounds << ',' << r.bound << ',' << ratio << '\n';
    if (a.sqrt_k && static_cast<double>(r.rounds) > cte_bound(r.n, active, r.depth)) return kBound;
    return kOk;
}

// ---- traverse ------------------------------------------------------------

struct TraverseArgs {
    std::string instance;
    std::string k = "auto";
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string trace;
};

int traverse(const TraverseArgs& a) {
    LayeredTree lt = read_layered_file(a.instance);
    if (!lt.binary_lengths()) lt = subdivide_lengths(lt);
    int k = 0;
    if (a.k == "auto") {
        k = tune_k(lt);
    } else {
        try {
            k = std::stoi(a.k);
        } catch (const std::exception&) {
            throw InputError("--k must be an integer or 'auto'");
        }
    }
    FractionalTraversal ft = fractional_traverse(lt, k, false);
    if (auto trace = open_trace(a.trace))
        for (std::size_t i = 0; i < ft.positions.size(); ++i)
            write_line(*trace, layer_record(static_cast<int>(i), ft.positions[i]));
    std::cout << "N=" << lt.num_layers() << " w=" << lt.width() << " L=" << lt.total_length() << " D=" << lt.depth()
              << " k=" << k << " cost=" << ft.expected_cost << " transport=" << ft.transport_cost
              << " bound=" << ft.bound << " dfs=" << dfs_traverse_cost(lt);
    if (a.samples > 0) {
        MonteCarlo mc = rounded_monte_carlo(lt, ft, a.samples, a.seed);
        std::cout << " samples=" << mc.samples << " mean=" << mc.mean << " stderr=" << mc.std_error;
    }
    std::cout << '\n';
    return ft.within_bound ? kOk : kBound;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    std::string suite = "default";
    std::vector<std::string> families;
    std::vector<int> ns, depths, ks;
    int seeds = -1;
    std::vector<std::string> schedulers;
    std::string mode = "both";
    unsigned threads = 0;
    bool timing = false;
    bool verify_tm = false;
    std::string out;
    std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a) {
    SuiteConfig cfg;
    if (a.suite == "default") {
        cfg = SuiteConfig::defaults();
    } else if (a.suite == "quick") {
        cfg = SuiteConfig::defaults();
        cfg.ns = {100, 1000};
        cfg.seeds = 2;
    } else if (a.suite != "empty") {
        throw InputError("--suite must be default, quick or empty");
    }
    if (!a.families.empty()) {
        cfg.families.clear();
        for (const auto& f : a.families) cfg.families.push_back(parse_family(f));
    }
    if (!a.ns.empty()) cfg.ns = a.ns;
    if (!a.depths.empty()) cfg.depths = a.depths;
    if (!a.ks.empty()) cfg.ks = a.ks;
    if (a.seeds >= 0) cfg.seeds = a.seeds;
    if (!a.schedulers.empty()) {
        cfg.schedulers.clear();
        for (const auto& s : a.schedulers) cfg.schedulers.push_back(parse_scheduler(s));
    }
    if (a.mode != "both" && a.mode != "acte" && a.mode != "cte") throw InputError("--mode must be acte, cte or both");
    cfg.acte = a.mode != "cte";
    cfg.cte = a.mode != "acte";
    cfg.threads = a.threads;
    cfg.timing = a.timing;
    cfg.verify_tm = a.verify_tm;
    cfg.base_seed = a.seed;
    BenchResult r = bench(cfg);
    Output out(a.out);
    write_csv(out.get(), r);
    std::cerr << r.rows.size() << " rows, " << r.skipped << " infeasible shapes skipped, " << r.bound_violations
              << " bound violations, " << r.failures << " failures\n";
    if (r.failures > 0) return kInvariant;
    return r.bound_violations > 0 ? kBound : kOk;
}

// ---- check / gen ---------------------------------------------------------

int check(const std::string& path) {
    CheckAllReport r = check_all_file(path);
    if (r.clean) {
        std::cout << "clean events=" << r.events << '\n';
        return kOk;
    }
    std::cout << "violation event=" << r.first_index << " events=" << r.events << " reason=" << r.message << '\n';
    return kInvariant;
}

struct GenArgs {
    std::string what = "tree";
    std::string family = "randrec";
    int n = 100;
    int depth = 20;
    std::string kind = "unit";
    int w = 4;
    int layers = 20;
    std::uint64_t seed = 0;
    std::string out;
};

int gen(const GenArgs& a) {
    Output out(a.out);
    if (a.what == "tree") {
        write_tree(out.get(), gen_tree(parse_family(a.family), a.n, a.depth, a.seed));
    } else if (a.what == "layered") {
        if (a.kind == "unit") write_layered(out.get(), gen_unit_layered(a.w, a.layers, a.seed));
        else if (a.kind == "average") write_layered(out.get(), gen_average_case(a.w, a.layers, a.seed));
        else throw InputError("--kind must be unit or average");
    } else {
        throw InputError("gen makes a 'tree' or a 'layered' instance");
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree-mining simulator: mining game, collective exploration, layered traversal"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    try {
        seed = default_seed();
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }

    SimulateArgs sim;
    sim.seed = seed;
    auto* s = app.add_subcommand("simulate", "Run an adversary against the potential player");
    s->add_option("--adversary", sim.adversary, "random, deepest, null or script:<file>");
    s->add_option("--k", sim.k, "Number of miners")->check(CLI::PositiveNumber);
    s->add_option("--steps", sim.steps, "Adversary moves (discrete steps for T scripts)");
    s->add_option("--seed", sim.seed, "Adversary seed");
    s->add_flag("--check", sim.check, "Check the potential inequalities after every event");
    s->add_option("--trace", sim.trace, "Write a JSON-lines trace");

    ExploreArgs ex;
    ex.seed = seed;
    auto* e = app.add_subcommand("explore", "Collective exploration of a tree file");
    e->add_option("--mode", ex.mode, "acte or cte");
    e->add_option("--tree", ex.tree, "Tree file")->required();
    e->add_option("--k", ex.k, "Number of robots")->check(CLI::PositiveNumber);
    e->add_option("--scheduler", ex.scheduler, "roundrobin, random or lopsided");
    e->add_option("--seed", ex.seed, "Scheduler seed");
    e->add_flag("--sqrt-k", ex.sqrt_k, "Move only floor(sqrt k) robots");
    e->add_flag("--verify-tm", ex.verify_tm, "Cross-check the mining game against its shadow");
    e->add_option("--trace", ex.trace, "Write moves as JSON lines");

    TraverseArgs tr;
    tr.seed = seed;
    auto* t = app.add_subcommand("traverse", "Layered tree traversal");
    t->add_option("--instance", tr.instance, "Layered tree file")->required();
    t->add_option("--k", tr.k, "Robots, or 'auto' for floor(sqrt w)");
    t->add_option("--samples", tr.samples, "Monte Carlo samples of the rounded searcher");
    t->add_option("--seed", tr.seed, "Sampling seed");
    t->add_option("--trace", tr.trace, "Write per-layer distributions as JSON lines");

    BenchArgs be;
    be.seed = seed;
    auto* b = app.add_subcommand("bench", "Sweep the exploration bounds over generated trees");
    b->add_option("--suite", be.suite, "default, quick or empty");
    b->add_option("--families", be.families, "Override tree families");
    b->add_option("--n", be.ns, "Override node counts");
    b->add_option("--depth", be.depths, "Override depth caps");
    b->add_option("--k", be.ks, "Override robot counts");
    b->add_option("--seeds", be.seeds, "Seeds per shape");
    b->add_option("--schedulers", be.schedulers, "Override schedulers");
    b->add_option("--mode", be.mode, "acte, cte or both");
    b->add_option("--threads", be.threads, "Worker threads, 0 for one per core");
    b->add_flag("--timing", be.timing, "Fill the wall column");
    b->add_flag("--verify-tm", be.verify_tm, "Cross-check the mining game on every row");
    b->add_option("--seed", be.seed, "Base seed");
    b->add_option("--out", be.out, "CSV file (stdout by default)");

    std::string trace_path;
    auto* c = app.add_subcommand("check", "Re-check every snapshot of a game trace");
    c->add_option("--trace", trace_path, "JSON-lines trace from simulate")->required();

    GenArgs ge;
    ge.seed = seed;
    auto* g = app.add_subcommand("gen", "Write a generated instance");
    g->add_option("what", ge.what, "tree or layered");
    g->add_option("--family", ge.family, "path, star, broom, binary, randrec or spider");
    g->add_option("--n", ge.n, "Nodes");
    g->add_option("--depth", ge.depth, "Depth cap");
    g->add_option("--kind", ge.kind, "unit or average");
    g->add_option("--w", ge.w, "Layer width");
    g->add_option("--layers", ge.layers, "Number of layers N");
    g->add_option("--seed", ge.seed, "Generator seed");
    g->add_option("--out", ge.out, "Output file (stdout by default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*s) return simulate(sim);
        if (*e) return explore(ex);
        if (*t) return traverse(tr);
        if (*b) return run_bench(be);
        if (*c) return check(trace_path);
        if (*g) return gen(ge);
    } catch (const BoundViolation& err) {
        std::cerr << "bound violated: " << err.what() << '\n';
        return kBound;
    } catch (const InvariantViolation& err) {
        std::cerr << "invariant violated: " << err.what() << '\n';
        return kInvariant;
    } catch (const ConvergenceError& err) {
        std::cerr << "solver failed: " << err.what() << '\n';
        return kInvariant;
    } catch (const InputError& err) {
        std::cerr << "input error: " << err.what() << '\n';
        return kInput;
    } catch (const RuleViolation& err) {
        std::cerr << "illegal move: " << err.what() << '\n';
        return kInput;
    }
    return kOk;
}
