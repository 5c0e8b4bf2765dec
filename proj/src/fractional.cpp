#include "treeminer/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace treeminer {

namespace {

// The potential restricted to leaf weights is the quadratic
//   f(y) = c'y + 1/2 y'Hy,  c_l = a * depth(l),  H = 2b * depth(lca).
struct Quadratic {
    std::vector<NodeId> leaves;
    Eigen::VectorXd c;
    Eigen::MatrixXd h;

    double value(const Eigen::VectorXd& y) const { return c.dot(y) + 0.5 * y.dot(h * y); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& y) const { return c + h * y; }
};

Eigen::MatrixXd shared_depth(const RootedTree& tree, const std::vector<NodeId>& leaves) {
    const auto m = static_cast<Eigen::Index>(leaves.size());
    Eigen::MatrixXd s(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            NodeId a = i == j ? leaves[static_cast<std::size_t>(i)]
                              : lca(tree, leaves[static_cast<std::size_t>(i)], leaves[static_cast<std::size_t>(j)]);
            s(i, j) = s(j, i) = tree.root_distance(a);
        }
    }
    return s;
}

Quadratic make_quadratic(const RootedTree& tree, const PotentialParams& p) {
    Quadratic q;
    q.leaves = tree.leaves();
    if (q.leaves.size() == 1 && q.leaves.front() == tree.root())
        throw InputError("the fractional problem needs a tree with at least one edge");
    const auto m = static_cast<Eigen::Index>(q.leaves.size());
    q.c.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) q.c(i) = p.a * tree.root_distance(q.leaves[static_cast<std::size_t>(i)]);
    q.h = 2.0 * p.b * shared_depth(tree, q.leaves);
    return q;
}

FractionalConfig to_config(const Quadratic& q, const Eigen::VectorXd& y) {
    FractionalConfig out;
    for (std::size_t i = 0; i < q.leaves.size(); ++i) out.weights[q.leaves[i]] = y(static_cast<Eigen::Index>(i));
    return out;
}

Eigen::VectorXd from_config(const Quadratic& q, const FractionalConfig& y) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(q.leaves.size()));
    for (std::size_t i = 0; i < q.leaves.size(); ++i) v(static_cast<Eigen::Index>(i)) = y.at(q.leaves[i]);
    return v;
}

// Euclidean projection onto {y >= 0, sum y = k}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double k) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cum += s[i];
        double t = (cum - k) / static_cast<double>(i + 1);
        if (s[i] - t > 0.0) theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

FractionalSolution finish(const RootedTree& tree, const Quadratic& q, const Eigen::VectorXd& y,
                          const PotentialParams& p, int iterations, bool fallback) {
    FractionalSolution s;
    s.y = to_config(q, y);
    s.kkt = kkt_certificate(tree, s.y, p);
    s.objective = q.value(y);
    s.iterations = iterations;
    s.used_fallback = fallback;
    return s;
}

// Primal active-set method. Returns false if the iteration budget runs out.
bool active_set(const Quadratic& q, double k, Eigen::VectorXd& y, int& iterations) {
    const auto m = static_cast<Eigen::Index>(q.leaves.size());
    std::vector<char> free(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) free[static_cast<std::size_t>(i)] = y(i) > 0.0;
    const int budget = 50 * static_cast<int>(m) + 100;
    for (iterations = 0; iterations < budget; ++iterations) {
        std::vector<Eigen::Index> s;
        for (Eigen::Index i = 0; i < m; ++i)
            if (free[static_cast<std::size_t>(i)]) s.push_back(i);
        const auto ns = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd hs(ns, ns);
        Eigen::VectorXd cs(ns), ys(ns);
        for (Eigen::Index i = 0; i < ns; ++i) {
            cs(i) = q.c(s[static_cast<std::size_t>(i)]);
            ys(i) = y(s[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < ns; ++j) hs(i, j) = q.h(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hs);
        if (ldlt.info() != Eigen::Success) return false;
        Eigen::VectorXd u = ldlt.solve(Eigen::VectorXd::Ones(ns));
        Eigen::VectorXd v = ldlt.solve(-cs);
        double lambda = (k - v.sum()) / u.sum();
        Eigen::VectorXd target = v + lambda * u;
        Eigen::VectorXd dir = target - ys;

        if (dir.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + k)) {
            Eigen::VectorXd g = q.gradient(y);
            double worst = -1e-11 * (1.0 + std::abs(lambda));
            Eigen::Index enter = -1;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (free[static_cast<std::size_t>(i)]) continue;
                if (g(i) - lambda < worst) {
                    worst = g(i) - lambda;
                    enter = i;
                }
            }
            if (enter < 0) return true;
            free[static_cast<std::size_t>(enter)] = 1;
            continue;
        }

        double alpha = 1.0;
        Eigen::Index block = -1;
        for (Eigen::Index i = 0; i < ns; ++i) {
            if (dir(i) < 0.0) {
                double t = -ys(i) / dir(i);
                if (t < alpha) {
                    alpha = t;
                    block = i;
                }
            }
        }
        for (Eigen::Index i = 0; i < ns; ++i) y(s[static_cast<std::size_t>(i)]) = ys(i) + alpha * dir(i);
        if (block >= 0) {
            y(s[static_cast<std::size_t>(block)]) = 0.0;
            free[static_cast<std::size_t>(s[static_cast<std::size_t>(block)])] = 0;
        }
        for (Eigen::Index i = 0; i < m; ++i)
            if (!free[static_cast<std::size_t>(i)]) y(i) = 0.0;
    }
    return false;
}

Eigen::VectorXd projected_gradient(const RootedTree& tree, const Quadratic& q, double k, const PotentialParams& p,
                                   Eigen::VectorXd y, int max_iterations, int& iterations, double& residual) {
    const double lip = std::max(1e-12, q.h.cwiseAbs().rowwise().sum().maxCoeff());
    double step = 1.0 / lip;
    double f = q.value(y);
    residual = std::numeric_limits<double>::infinity();
    for (iterations = 0; iterations < max_iterations; ++iterations) {
        if (iterations % 50 == 0) {
            residual = kkt_certificate(tree, to_config(q, y), p).residual;
            if (residual <= kKktTolerance) break;
        }
        Eigen::VectorXd g = q.gradient(y);
        double s = 4.0 * step;
        // Armijo backtracking along the projection arc.
        for (;;) {
            Eigen::VectorXd cand = project_simplex(y - s * g, k);
            Eigen::VectorXd d = cand - y;
            double fc = q.value(cand);
            if (fc <= f + g.dot(d) + d.squaredNorm() / (2.0 * s) || s <= step) {
                y = cand;
                f = fc;
                break;
            }
            s *= 0.5;
        }
    }
    residual = kkt_certificate(tree, to_config(q, y), p).residual;
    return y;
}

// Mass drawn into a subtree as a function of the marginal cost at its top:
// zero up to pts[0].x, linear between points, then slope `tail`.
struct Waterline {
    std::vector<std::pair<double, double>> pts;
    double tail = 0.0;

    double mass(double x) const {
        if (x <= pts.front().first) return 0.0;
        auto it = std::upper_bound(pts.begin(), pts.end(), x,
                                   [](double v, const std::pair<double, double>& q) { return v < q.first; });
        if (it == pts.end()) return pts.back().second + tail * (x - pts.back().first);
        auto lo = std::prev(it);
        double t = (x - lo->first) / (it->first - lo->first);
        return lo->second + t * (it->second - lo->second);
    }

    // Marginal at which the subtree draws mass m > 0.
    double marginal(double m) const {
        if (m <= 0.0) return pts.front().first;
        auto it = std::upper_bound(pts.begin(), pts.end(), m,
                                   [](double v, const std::pair<double, double>& q) { return v < q.second; });
        if (it == pts.end()) return pts.back().first + (m - pts.back().second) / tail;
        auto lo = std::prev(it);
        double t = (m - lo->second) / (it->second - lo->second);
        return lo->first + t * (it->first - lo->first);
    }
};

Waterline sum_of(const std::vector<const Waterline*>& parts) {
    std::vector<double> xs;
    for (const Waterline* w : parts)
        for (const auto& pt : w->pts) xs.push_back(pt.first);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    Waterline out;
    for (double x : xs) {
        double m = 0.0;
        for (const Waterline* w : parts) m += w->mass(x);
        out.pts.emplace_back(x, m);
    }
    for (const Waterline* w : parts) out.tail += w->tail;
    return out;
}

// Exact minimizer for quadratic phi. Subtree functions are built bottom-up in
// coordinates local to each subtree, then mass is split top-down, so short
// edges deep in the tree keep their relative precision. Returns false when a
// leaf edge has zero length.
bool tree_solve(const RootedTree& tree, double k, const PotentialParams& p, FractionalConfig& out) {
    std::map<NodeId, Waterline> below;   // S_u: mass below u vs marginal at u's bottom
    std::map<NodeId, Waterline> through; // W_u: mass through u's edge vs marginal at its top
    for (NodeId u : tree.postorder()) {
        const double d = u == tree.root() ? 0.0 : tree.edge_length(u);
        Waterline w;
        if (tree.children(u).empty()) {
            if (!(d > 0.0)) return false;
            w.pts = {{d * p.a, 0.0}};
            w.tail = 1.0 / (2.0 * p.b * d);
        } else {
            std::vector<const Waterline*> parts;
            for (NodeId c : tree.children(u)) parts.push_back(&through.at(c));
            Waterline s = sum_of(parts);
            w = s;
            for (auto& pt : w.pts) pt.first += d * p.dphi(pt.second);
            w.tail = s.tail / (1.0 + 2.0 * p.b * d * s.tail);
            below.emplace(u, std::move(s));
        }
        through.emplace(u, std::move(w));
    }
    out.weights.clear();
    std::vector<std::pair<NodeId, double>> stack{{tree.root(), k}};
    while (!stack.empty()) {
        auto [u, m] = stack.back();
        stack.pop_back();
        if (tree.children(u).empty()) {
            out.weights[u] = m;
            continue;
        }
        const double nu = below.at(u).marginal(m);
        double rest = m;
        const auto& ch = tree.children(u);
        std::vector<double> share(ch.size());
        std::size_t widest = 0;
        for (std::size_t i = 0; i < ch.size(); ++i) {
            share[i] = m > 0.0 ? through.at(ch[i]).mass(nu) : 0.0;
            rest -= share[i];
            if (share[i] > share[widest]) widest = i;
        }
        // Rounding residue goes to the largest share so masses sum exactly.
        share[widest] = std::max(0.0, share[widest] + rest);
        for (std::size_t i = 0; i < ch.size(); ++i) stack.emplace_back(ch[i], share[i]);
    }
    return true;
}

} // namespace

std::map<NodeId, double> path_gradients(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p) {
    auto ext = extend_config(tree, y);
    std::map<NodeId, double> g;
    for (const auto& [leaf, w] : y.weights) {
        (void)w;
        double sum = 0.0;
        for (NodeId u = leaf; u != tree.root(); u = tree.parent(u))
            sum += tree.edge_length(u) * p.dphi(ext.at(u));
        g[leaf] = sum;
    }
    return g;
}

KktCertificate kkt_certificate(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p) {
    KktCertificate cert;
    cert.path_gradient = path_gradients(tree, y, p);
    const double positive = 1e-12;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [leaf, g] : cert.path_gradient) {
        if (y.at(leaf) > positive) {
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
    }
    if (!(lo <= hi)) throw InputError("fractional configuration has no positive weight");
    cert.lambda = 0.5 * (lo + hi);
    cert.residual = 0.5 * (hi - lo);
    for (const auto& [leaf, g] : cert.path_gradient)
        cert.residual = std::max(cert.residual, cert.lambda - g);
    return cert;
}

FractionalSolution solve_fractional_from(const RootedTree& tree, double k, const PotentialParams& p,
                                         const FractionalConfig& start) {
    if (!(k > 0.0)) throw InputError("fractional mass must be positive");
    if (!(p.a > 0.0 && p.b > 0.0)) throw InputError("phi must be increasing and strictly convex");
    Quadratic q = make_quadratic(tree, p);
    FractionalConfig exact;
    if (tree_solve(tree, k, p, exact)) {
        FractionalSolution s = finish(tree, q, from_config(q, exact), p, 1, false);
        if (s.kkt.residual <= kKktTolerance) return s;
    }
    Eigen::VectorXd y = project_simplex(from_config(q, start), k);
    int iterations = 0;
    Eigen::VectorXd y0 = y;
    if (active_set(q, k, y, iterations)) {
        FractionalSolution s = finish(tree, q, y, p, iterations, false);
        if (s.kkt.residual <= kKktTolerance) return s;
        y0 = y;
    }
    double residual = 0.0;
    int pg_iterations = 0;
    Eigen::VectorXd z = projected_gradient(tree, q, k, p, y0, 200000, pg_iterations, residual);
    FractionalSolution s = finish(tree, q, z, p, iterations + pg_iterations, true);
    if (s.kkt.residual > kKktTolerance) {
        std::ostringstream msg;
        msg << "fractional solver did not converge (KKT residual " << s.kkt.residual << ")";
        throw ConvergenceError(msg.str(), s.kkt.residual);
    }
    return s;
}

FractionalSolution solve_fractional(const RootedTree& tree, double k, const PotentialParams& p) {
    FractionalConfig start;
    auto leaves = tree.leaves();
    for (NodeId l : leaves) start.weights[l] = k / static_cast<double>(leaves.size());
    return solve_fractional_from(tree, k, p, start);
}

FractionalSolution solve_fractional_gradient(const RootedTree& tree, double k, const PotentialParams& p,
                                             int max_iterations) {
    if (!(k > 0.0)) throw InputError("fractional mass must be positive");
    Quadratic q = make_quadratic(tree, p);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(q.leaves.size()),
                                                  k / static_cast<double>(q.leaves.size()));
    int iterations = 0;
    double residual = 0.0;
    y = projected_gradient(tree, q, k, p, y, max_iterations, iterations, residual);
    return finish(tree, q, y, p, iterations, true);
}

FractionalSolution grid_oracle(const RootedTree& tree, double k, const PotentialParams& p) {
    Quadratic q = make_quadratic(tree, p);
    const int m = static_cast<int>(q.leaves.size());
    if (m > 4) throw InputError("grid oracle supports at most 4 leaves");
    const int dims = m - 1;
    Eigen::VectorXd best = Eigen::VectorXd::Constant(m, k / m);
    if (dims == 0) return finish(tree, q, Eigen::VectorXd::Constant(1, k), p, 0, false);
    double best_val = q.value(best);

    // Evaluates every grid point of the box center +- half (per free coordinate).
    auto sweep = [&](const Eigen::VectorXd& center, double half, double h) {
        const int per = static_cast<int>(std::llround(2.0 * half / h)) + 1;
        std::vector<int> idx(static_cast<std::size_t>(dims), 0);
        Eigen::VectorXd y(m);
        for (;;) {
            double rest = k;
            bool ok = true;
            for (int d = 0; d < dims; ++d) {
                double v = center(d) - half + h * idx[static_cast<std::size_t>(d)];
                if (v < -1e-15 || v > k + 1e-15) ok = false;
                v = std::clamp(v, 0.0, k);
                y(d) = v;
                rest -= v;
            }
            if (ok && rest >= -1e-12) {
                y(m - 1) = std::max(0.0, rest);
                double val = q.value(y);
                if (val < best_val) {
                    best_val = val;
                    best = y;
                }
            }
            int d = 0;
            while (d < dims && ++idx[static_cast<std::size_t>(d)] >= per) idx[static_cast<std::size_t>(d++)] = 0;
            if (d == dims) break;
        }
    };

    double h = k / 50.0;
    sweep(Eigen::VectorXd::Constant(m, k / 2.0), k / 2.0, h);
    const int radius = 10;
    int rounds = 0;
    while (h > 1e-10 * k && rounds++ < 5000) {
        Eigen::VectorXd center = best;
        double fine = h / 5.0;
        sweep(center, radius * fine, fine);
        // Shrink only once the optimum sits strictly inside the box.
        bool interior = true;
        for (int d = 0; d < dims; ++d) {
            double off = std::abs(best(d) - center(d));
            bool at_domain_edge = best(d) <= 1e-15 || best(d) >= k - 1e-15;
            if (off >= (radius - 0.5) * fine && !at_domain_edge) interior = false;
        }
        if (interior || (best - center).lpNorm<Eigen::Infinity>() == 0.0) h = fine;
    }
    return finish(tree, q, best, p, rounds, false);
}

UltrametricHessian hessian(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p) {
    validate_config(tree, y);
    UltrametricHessian out;
    out.leaves = tree.leaves();
    out.matrix = 2.0 * p.b * shared_depth(tree, out.leaves);
    return out;
}

bool is_ultrametric(const Eigen::MatrixXd& h, double tol) {
    const Eigen::Index m = h.rows();
    if (h.cols() != m) return false;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (std::abs(h(i, j) - h(j, i)) > tol || h(i, j) < -tol) return false;
            if (h(i, i) < h(i, j) - tol) return false;
            for (Eigen::Index l = 0; l < m; ++l)
                if (h(i, j) < std::min(h(i, l), h(l, j)) - tol) return false;
        }
    }
    return true;
}

InverseReport ultrametric_inverse_probe(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols() || h.rows() == 0) throw InputError("inverse probe needs a square nonempty matrix");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (!lu.isInvertible()) throw InputError("matrix is singular");
    Eigen::MatrixXd inv = lu.inverse();
    InverseReport r;
    r.min_diagonal = inv.diagonal().minCoeff();
    r.max_off_diagonal = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < inv.rows(); ++i)
        for (Eigen::Index j = 0; j < inv.cols(); ++j)
            if (i != j) r.max_off_diagonal = std::max(r.max_off_diagonal, inv(i, j));
    if (inv.rows() == 1) r.max_off_diagonal = 0.0;
    r.min_row_sum = inv.rowwise().sum().minCoeff();
    const double tol = 1e-9;
    r.holds = r.min_diagonal >= -tol && r.max_off_diagonal <= tol && r.min_row_sum >= -tol;
    return r;
}

MasterReport check_master_inequality(const RootedTree& tree, const DiscreteConfig& x, double cost,
                                     const PotentialParams& p, const FractionalSolution& y) {
    MasterReport r;
    r.lhs = cost + potential(tree, x, p);
    r.rhs = p.gamma * y.objective;
    r.holds = r.lhs <= r.rhs * (1.0 + kMasterTolerance);
    return r;
}

MasterReport check_master_inequality(const RootedTree& tree, const DiscreteConfig& x, double cost,
                                     const PotentialParams& p) {
    return check_master_inequality(tree, x, cost, p, solve_fractional(tree, x.total(), p));
}

XyBoundsReport check_xy_bounds(const RootedTree&, const DiscreteConfig& x, const PotentialParams& p,
                               const FractionalSolution& y) {
    XyBoundsReport r;
    r.worst_upper = -std::numeric_limits<double>::infinity();
    r.worst_lower = std::numeric_limits<double>::infinity();
    for (const auto& [leaf, xl] : x.weights) {
        double yl = y.y.at(leaf);
        double upper = xl - yl - (2.0 - p.epsilon);
        double lower = yl - p.epsilon;
        if (xl < 1) r.x_at_least_one = false;
        if (upper > r.worst_upper) r.worst_upper = upper;
        if (lower < r.worst_lower) r.worst_lower = lower;
        bool bad = upper >= kBoundsTolerance || lower < -kBoundsTolerance || xl < 1;
        if (bad && r.holds) {
            r.holds = false;
            r.worst_leaf = leaf;
            std::ostringstream msg;
            msg << "leaf " << leaf << ": x=" << xl << " y=" << yl;
            r.failure = msg.str();
        }
    }
    return r;
}

XyBoundsReport check_xy_bounds(const RootedTree& tree, const DiscreteConfig& x, const PotentialParams& p) {
    return check_xy_bounds(tree, x, p, solve_fractional(tree, x.total(), p));
}

ProbeReport elongation_monotonicity_probe(const RootedTree& tree, NodeId leaf, double step, double k,
                                          const PotentialParams& p) {
    ProbeReport r;
    FractionalSolution before = solve_fractional(tree, k, p);
    for (const auto& [l, w] : before.y.weights) {
        (void)l;
        if (w <= 1e-9) {
            r.applicable = false;
            return r;
        }
    }
    const double d = tree.edge_length(leaf);
    RootedTree longer = tree;
    longer.set_edge_length(leaf, d + step);
    FractionalSolution after = solve_fractional(longer, k, p);
    r.slope = (after.y.at(leaf) - before.y.at(leaf)) / step;
    r.slope_bound = -(1.0 / d) * (p.a + 2.0 * p.b * k) / (2.0 * p.b) - 1e-3;
    std::ostringstream msg;
    if (!(after.y.at(leaf) < before.y.at(leaf))) {
        r.holds = false;
        msg << "elongated leaf weight did not decrease; ";
    }
    for (const auto& [l, w] : before.y.weights) {
        if (l != leaf && after.y.at(l) < w - 1e-7) {
            r.holds = false;
            msg << "leaf " << l << " decreased; ";
        }
    }
    if (r.slope < r.slope_bound) {
        r.holds = false;
        msg << "slope " << r.slope << " below " << r.slope_bound;
    }
    r.failure = msg.str();
    return r;
}

ProbeReport deletion_monotonicity_probe(const RootedTree& tree, NodeId leaf, double k, const PotentialParams& p) {
    ProbeReport r;
    if (tree.leaves().size() < 2) {
        r.applicable = false;
        return r;
    }
    FractionalSolution before = solve_fractional(tree, k, p);
    RootedTree smaller = tree;
    smaller.remove_leaf(leaf);
    normalize_simple_in_place(smaller);
    FractionalSolution after = solve_fractional(smaller, k, p);
    std::ostringstream msg;
    for (const auto& [l, w] : after.y.weights) {
        if (w < before.y.at(l) - 1e-7) {
            r.holds = false;
            msg << "leaf " << l << " decreased; ";
        }
    }
    r.failure = msg.str();
    return r;
}

double equilibrium_gap(const RootedTree& tree, const FractionalConfig& y, const PotentialParams& p) {
    auto ext = extend_config(tree, y);
    auto branch = [&](NodeId from, NodeId to) {
        double s = 0.0;
        for (NodeId u = from; u != to; u = tree.parent(u)) s += tree.edge_length(u) * p.dphi(ext.at(u));
        return s;
    };
    double gap = 0.0;
    for (auto i = y.weights.begin(); i != y.weights.end(); ++i) {
        if (i->second <= 1e-12) continue;
        for (auto j = std::next(i); j != y.weights.end(); ++j) {
            if (j->second <= 1e-12) continue;
            NodeId a = lca(tree, i->first, j->first);
            gap = std::max(gap, std::abs(branch(i->first, a) - branch(j->first, a)));
        }
    }
    return gap;
}

} // namespace treeminer
