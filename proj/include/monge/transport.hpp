// Balanced transportation problem between two clouds of delta peaks.
//
// Initial basic plans come from the northwest-corner rule or Vogel's
// approximation; `optimize` is a transportation simplex (u-v / MODI method)
// over the spanning-tree basis and certifies optimality with dual potentials.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monge/distance.hpp"
#include "monge/error.hpp"
#include "monge/grid.hpp"
#include "monge/states.hpp"

namespace monge {

inline constexpr std::size_t default_cost_cap = std::size_t{1} << 24; // 16 Mi dense entries

class TransportProblem {
public:
    /// Cost c_ij = |x_i - y_j|^p between phase-space points.
    TransportProblem(std::vector<double> supplies, std::vector<double> demands, std::vector<PhasePoint> sources,
                     std::vector<PhasePoint> sinks, double p = 1.0, std::size_t cost_cap = default_cost_cap)
        : a_(std::move(supplies)), b_(std::move(demands)), src_(std::move(sources)), dst_(std::move(sinks)), p_(p) {
        if (src_.size() != a_.size() || dst_.size() != b_.size())
            throw Error(ErrorKind::domain, "transport: one point per supply and per demand required");
        if (!(p_ >= 1.0) || !std::isfinite(p_)) throw Error(ErrorKind::domain, "transport: cost exponent p must be >= 1");
        check_masses(cost_cap);
        costs_.resize(a_.size() * b_.size());
        for (std::size_t i = 0; i < a_.size(); ++i)
            for (std::size_t j = 0; j < b_.size(); ++j) {
                const double d = distance(src_[i], dst_[j]);
                costs_[i * b_.size() + j] = p_ == 1.0 ? d : p_ == 2.0 ? d * d : std::pow(d, p_);
            }
        finish();
    }

    /// Arbitrary dense cost matrix (row-major, rows = supplies).
    static TransportProblem from_costs(std::vector<double> supplies, std::vector<double> demands,
                                       std::vector<double> costs, std::size_t cost_cap = default_cost_cap) {
        TransportProblem t;
        t.a_ = std::move(supplies);
        t.b_ = std::move(demands);
        t.check_masses(cost_cap);
        if (costs.size() != t.a_.size() * t.b_.size())
            throw Error(ErrorKind::domain, "transport: cost matrix must be rows x cols");
        for (double c : costs)
            if (!std::isfinite(c)) throw Error(ErrorKind::domain, "transport: costs must be finite");
        t.costs_ = std::move(costs);
        t.finish();
        return t;
    }

    std::size_t rows() const { return a_.size(); }
    std::size_t cols() const { return b_.size(); }
    double cost(std::size_t i, std::size_t j) const { return costs_[i * b_.size() + j]; }
    std::span<const double> costs() const { return costs_; }
    std::span<const double> supplies() const { return a_; }
    std::span<const double> demands() const { return b_; }
    std::span<const PhasePoint> sources() const { return src_; }
    std::span<const PhasePoint> sinks() const { return dst_; }
    double p() const { return p_; }
    double max_cost() const { return max_cost_; }
    double total_mass() const { return total_; }

private:
    TransportProblem() = default;

    void check_masses(std::size_t cost_cap) {
        if (a_.empty() || b_.empty()) throw Error(ErrorKind::domain, "transport: empty supply or demand");
        if (a_.size() > cost_cap / b_.size())
            throw Error(ErrorKind::capacity, "transport: " + std::to_string(a_.size()) + " x " +
                                                 std::to_string(b_.size()) + " cost matrix exceeds the cap of " +
                                                 std::to_string(cost_cap) + " entries");
        for (double m : a_)
            if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::domain, "transport: supplies must be > 0");
        for (double m : b_)
            if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::domain, "transport: demands must be > 0");
        const double sa = std::accumulate(a_.begin(), a_.end(), 0.0);
        const double sb = std::accumulate(b_.begin(), b_.end(), 0.0);
        if (std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
            throw Error(ErrorKind::domain, "transport: unbalanced problem (supply " + std::to_string(sa) +
                                               ", demand " + std::to_string(sb) + ")");
        for (double& m : b_) m *= sa / sb;
        total_ = sa;
    }

    void finish() { max_cost_ = costs_.empty() ? 0.0 : *std::max_element(costs_.begin(), costs_.end()); }

    std::vector<double> a_, b_;
    std::vector<PhasePoint> src_, dst_;
    std::vector<double> costs_;
    double p_ = 1.0;
    double max_cost_ = 0.0;
    double total_ = 0.0;
};

struct Shipment {
    std::size_t i = 0;
    std::size_t j = 0;
    double mass = 0.0;
};

/// Basic plan: exactly rows + cols - 1 basis cells (zero-mass cells allowed).
struct TransportPlan {
    std::vector<Shipment> basis;
    double total_cost = 0.0;
    std::vector<double> u; // row potentials, filled by optimize
    std::vector<double> v; // column potentials
    bool optimal = false;
    std::size_t iterations = 0;
    std::size_t degenerate_pivots = 0;
    bool lexicographic = false; // start was feasible under the perturbation (cycling impossible)
    double min_reduced_cost = std::numeric_limits<double>::quiet_NaN();

    std::vector<Shipment> shipments() const {
        std::vector<Shipment> out;
        for (const auto& s : basis)
            if (s.mass > 0.0) out.push_back(s);
        return out;
    }
};

inline double plan_cost(const TransportProblem& problem, std::span<const Shipment> cells) {
    double c = 0.0;
    for (const auto& s : cells) c += problem.cost(s.i, s.j) * s.mass;
    return c;
}

/// Largest deviation of the plan's row/column sums from the marginals.
inline double marginal_error(const TransportProblem& problem, const TransportPlan& plan) {
    std::vector<double> rs(problem.rows(), 0.0), cs(problem.cols(), 0.0);
    for (const auto& s : plan.basis) {
        rs[s.i] += s.mass;
        cs[s.j] += s.mass;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) err = std::max(err, std::abs(rs[i] - problem.supplies()[i]));
    for (std::size_t j = 0; j < cs.size(); ++j) err = std::max(err, std::abs(cs[j] - problem.demands()[j]));
    return err;
}

namespace detail {

// Mass with an exact coefficient of a symbolic epsilon. Marginals are perturbed
// to a_i + eps and b_last + rows * eps, which makes every basis nondegenerate,
// so lexicographic ratio tests can never cycle.
struct Lex {
    double v = 0.0;
    double e = 0.0;

    friend Lex operator+(Lex a, Lex b) { return {a.v + b.v, a.e + b.e}; }
    friend Lex operator-(Lex a, Lex b) { return {a.v - b.v, a.e - b.e}; }
    friend bool operator<(Lex a, Lex b) { return a.v < b.v || (a.v == b.v && a.e < b.e); }
    friend bool operator==(Lex a, Lex b) = default;
    bool zero() const { return v == 0.0 && e == 0.0; }
    bool negative() const { return v < 0.0 || (v == 0.0 && e < 0.0); }
};

// Rounding residue of mass bookkeeping; anything this small counts as zero.
inline double snap_tolerance(const TransportProblem& problem) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, problem.total_mass());
}

inline Lex snap(Lex x, double tol) {
    if (std::abs(x.v) <= tol) x.v = 0.0;
    return x;
}

inline std::vector<Lex> perturbed_supplies(const TransportProblem& problem) {
    std::vector<Lex> r;
    for (double a : problem.supplies()) r.push_back({a, 1.0});
    return r;
}

inline std::vector<Lex> perturbed_demands(const TransportProblem& problem) {
    std::vector<Lex> r;
    for (double b : problem.demands()) r.push_back({b, 0.0});
    r.back().e = static_cast<double>(problem.rows());
    return r;
}

} // namespace detail

inline TransportPlan northwest_corner(const TransportProblem& problem) {
    const std::size_t n = problem.rows(), m = problem.cols();
    const double tol = detail::snap_tolerance(problem);
    auto ra = detail::perturbed_supplies(problem);
    auto rb = detail::perturbed_demands(problem);
    TransportPlan plan;
    plan.basis.reserve(n + m - 1);
    std::size_t i = 0, j = 0;
    for (;;) {
        const detail::Lex x = std::min(ra[i], rb[j]);
        plan.basis.push_back({i, j, std::max(0.0, x.v)});
        ra[i] = detail::snap(ra[i] - x, tol);
        rb[j] = detail::snap(rb[j] - x, tol);
        if (i + 1 == n && j + 1 == m) break;
        // Under the perturbation exactly one line is exhausted; a real tie
        // therefore advances the column and leaves a zero cell in the row.
        if (j + 1 == m || (i + 1 < n && ra[i].zero()))
            ++i;
        else
            ++j;
    }
    plan.total_cost = plan_cost(problem, plan.basis);
    return plan;
}

/// Vogel's approximation: repeatedly serve the row or column with the largest
/// penalty (gap between its two cheapest open cells), ties to the lowest index,
/// rows before columns.
inline TransportPlan vogel(const TransportProblem& problem) {
    const std::size_t n = problem.rows(), m = problem.cols();
    TransportPlan plan;
    plan.basis.reserve(n + m - 1);
    const double tol = detail::snap_tolerance(problem);
    auto ra = detail::perturbed_supplies(problem);
    auto rb = detail::perturbed_demands(problem);

    // Per-line cell orders by (cost, index); open cells are found by lazy pointers.
    std::vector<std::uint32_t> row_order(n * m), col_order(m * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto first = row_order.begin() + static_cast<std::ptrdiff_t>(i * m);
        std::iota(first, first + static_cast<std::ptrdiff_t>(m), 0u);
        std::sort(first, first + static_cast<std::ptrdiff_t>(m), [&](std::uint32_t x, std::uint32_t y) {
            const double cx = problem.cost(i, x), cy = problem.cost(i, y);
            return cx < cy || (cx == cy && x < y);
        });
    }
    for (std::size_t j = 0; j < m; ++j) {
        auto first = col_order.begin() + static_cast<std::ptrdiff_t>(j * n);
        std::iota(first, first + static_cast<std::ptrdiff_t>(n), 0u);
        std::sort(first, first + static_cast<std::ptrdiff_t>(n), [&](std::uint32_t x, std::uint32_t y) {
            const double cx = problem.cost(x, j), cy = problem.cost(y, j);
            return cx < cy || (cx == cy && x < y);
        });
    }
    std::vector<char> row_open(n, 1), col_open(m, 1);
    std::size_t rows_left = n, cols_left = m;
    std::vector<std::size_t> r1(n, 0), r2(n, 1), c1(m, 0), c2(m, 1);

    // Two cheapest open entries of a line; second == len when only one is open.
    auto two_cheapest = [](const std::uint32_t* order, std::size_t len, const std::vector<char>& open,
                           std::size_t& p1, std::size_t& p2) {
        while (p1 < len && !open[order[p1]]) ++p1;
        p2 = std::max(p2, p1 + 1);
        while (p2 < len && !open[order[p2]]) ++p2;
    };

    while (rows_left > 0 && cols_left > 0) {
        if (rows_left == 1 || cols_left == 1) {
            // Only one line left in one direction: it absorbs everything that remains.
            if (rows_left == 1) {
                const auto i = static_cast<std::size_t>(std::find(row_open.begin(), row_open.end(), 1) - row_open.begin());
                for (std::size_t j = 0; j < m; ++j)
                    if (col_open[j]) plan.basis.push_back({i, j, std::max(0.0, rb[j].v)});
            } else {
                const auto j = static_cast<std::size_t>(std::find(col_open.begin(), col_open.end(), 1) - col_open.begin());
                for (std::size_t i = 0; i < n; ++i)
                    if (row_open[i]) plan.basis.push_back({i, j, std::max(0.0, ra[i].v)});
            }
            break;
        }
        double best = -1.0;
        bool best_is_row = true;
        std::size_t best_line = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!row_open[i]) continue;
            const std::uint32_t* order = &row_order[i * m];
            two_cheapest(order, m, col_open, r1[i], r2[i]);
            const double pen = problem.cost(i, order[r2[i]]) - problem.cost(i, order[r1[i]]);
            if (pen > best) {
                best = pen;
                best_is_row = true;
                best_line = i;
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!col_open[j]) continue;
            const std::uint32_t* order = &col_order[j * n];
            two_cheapest(order, n, row_open, c1[j], c2[j]);
            const double pen = problem.cost(order[c2[j]], j) - problem.cost(order[c1[j]], j);
            if (pen > best) {
                best = pen;
                best_is_row = false;
                best_line = j;
            }
        }
        const std::size_t i = best_is_row ? best_line : col_order[best_line * n + c1[best_line]];
        const std::size_t j = best_is_row ? row_order[best_line * m + r1[best_line]] : best_line;
        const detail::Lex x = std::min(ra[i], rb[j]);
        plan.basis.push_back({i, j, std::max(0.0, x.v)});
        ra[i] = detail::snap(ra[i] - x, tol);
        rb[j] = detail::snap(rb[j] - x, tol);
        if (ra[i].zero() || ra[i] < rb[j]) {
            row_open[i] = 0;
            --rows_left;
        } else {
            col_open[j] = 0;
            --cols_left;
        }
    }
    plan.total_cost = plan_cost(problem, plan.basis);
    return plan;
}

enum class Pricing {
    automatic,    // dantzig for small problems, block_search otherwise
    dantzig,      // most negative reduced cost over all cells
    block_search, // most negative within the first block holding a candidate
    bland,        // lowest-index candidate
};

struct SimplexOptions {
    Pricing pricing = Pricing::automatic;
    std::size_t max_iterations = 0; // 0: 200 (rows + cols) + 10000
    double tolerance = 1e-12;       // entering threshold, relative to max(1, max cost)
    std::size_t dantzig_limit = 4096; // automatic pricing uses dantzig up to this many cells
};

namespace detail {

class TreeSimplex {
public:
    TreeSimplex(const TransportProblem& problem, const TransportPlan& initial, SimplexOptions opts)
        : pb_(problem), n_(problem.rows()), m_(problem.cols()), opts_(opts) {
        if (initial.basis.size() != n_ + m_ - 1)
            throw Error(ErrorKind::solver, "optimize: initial plan must have rows + cols - 1 basis cells");
        for (const auto& s : initial.basis)
            if (s.i >= n_ || s.j >= m_ || !(s.mass >= 0.0))
                throw Error(ErrorKind::solver, "optimize: initial plan has an invalid cell");
        if (marginal_error(problem, initial) > 1e-9 * std::max(1.0, problem.total_mass()))
            throw Error(ErrorKind::solver, "optimize: initial plan violates the marginals");
        edges_ = initial.basis;
        adj_.assign(n_ + m_, {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            adj_[edges_[e].i].push_back(static_cast<std::uint32_t>(e));
            adj_[n_ + edges_[e].j].push_back(static_cast<std::uint32_t>(e));
        }
        rebuild_tree();
        snap_ = snap_tolerance(problem);
        lex_ok_ = perturb_flows();
        eps_ = opts_.tolerance * std::max(1.0, problem.max_cost());
        if (opts_.pricing == Pricing::automatic)
            opts_.pricing = n_ * m_ <= opts_.dantzig_limit ? Pricing::dantzig : Pricing::block_search;
        block_ = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_ * m_))));
        max_iter_ = opts_.max_iterations ? opts_.max_iterations : 200 * (n_ + m_) + 10000;
    }

    TransportPlan run() {
        std::size_t degenerate_run = 0;
        bool capped = false;
        for (;;) {
            if (iterations_ >= max_iter_) {
                capped = true;
                break;
            }
            // Lexicographic pivoting cannot cycle; a start that is infeasible under the
            // perturbation falls back to Bland's rule on long degenerate runs.
            const Pricing rule = !lex_ok_ && degenerate_run > n_ + m_ ? Pricing::bland : opts_.pricing;
            auto cand = price(rule);
            if (!cand) {
                // Confirm with freshly computed potentials before declaring optimality.
                rebuild_tree();
                cand = price(Pricing::dantzig);
                if (!cand) break;
            }
            const bool degenerate = pivot(cand->first, cand->second);
            ++iterations_;
            if (degenerate) {
                ++degenerate_;
                ++degenerate_run;
            } else {
                degenerate_run = 0;
            }
            if (iterations_ % 4096 == 0) rebuild_tree();
        }
        rebuild_tree();
        TransportPlan plan;
        plan.basis = edges_;
        plan.total_cost = plan_cost(pb_, plan.basis);
        plan.u.assign(pot_.begin(), pot_.begin() + static_cast<std::ptrdiff_t>(n_));
        plan.v.assign(pot_.begin() + static_cast<std::ptrdiff_t>(n_), pot_.end());
        plan.iterations = iterations_;
        plan.degenerate_pivots = degenerate_;
        plan.lexicographic = lex_ok_;
        plan.min_reduced_cost = min_reduced_cost();
        plan.optimal = !capped && plan.min_reduced_cost >= -eps_;
        return plan;
    }

private:
    using Cell = std::pair<std::size_t, std::size_t>;

    double reduced(std::size_t i, std::size_t j) const { return pb_.cost(i, j) - pot_[i] - pot_[n_ + j]; }

    double min_reduced_cost() const {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < m_; ++j) best = std::min(best, reduced(i, j));
        return best;
    }

    // Parent pointers, depths and potentials (u_0 = 0) from the current basis.
    void rebuild_tree() {
        const std::size_t nodes = n_ + m_;
        parent_.assign(nodes, -1);
        parent_edge_.assign(nodes, -1);
        depth_.assign(nodes, 0);
        pot_.assign(nodes, 0.0);
        std::vector<char> seen(nodes, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const std::size_t x = stack.back();
            stack.pop_back();
            for (std::uint32_t e : adj_[x]) {
                const std::size_t y = other(e, x);
                if (seen[y]) continue;
                seen[y] = 1;
                ++reached;
                attach(y, x, e);
                stack.push_back(y);
            }
        }
        if (reached != nodes) throw Error(ErrorKind::solver, "optimize: basis cells do not form a spanning tree");
    }

    std::size_t other(std::uint32_t e, std::size_t x) const {
        const std::size_t r = edges_[e].i, c = n_ + edges_[e].j;
        return x == r ? c : r;
    }

    void attach(std::size_t child, std::size_t par, std::uint32_t e) {
        parent_[child] = static_cast<std::ptrdiff_t>(par);
        parent_edge_[child] = static_cast<std::ptrdiff_t>(e);
        depth_[child] = depth_[par] + 1;
        const double c = pb_.cost(edges_[e].i, edges_[e].j);
        pot_[child] = c - pot_[par];
    }

    // Epsilon parts of the basis flows, by subtree sums of the perturbed marginals.
    // Returns false when the start is infeasible under the perturbation.
    bool perturb_flows() {
        const std::size_t nodes = n_ + m_;
        eflow_.assign(edges_.size(), 0.0);
        std::vector<double> net(nodes, 0.0);
        for (std::size_t i = 0; i < n_; ++i) net[i] = 1.0;
        net[nodes - 1] = -static_cast<double>(n_);
        std::vector<std::size_t> order(nodes);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return depth_[x] > depth_[y]; });
        bool ok = true;
        for (std::size_t x : order) {
            if (parent_[x] < 0) continue;
            const auto e = static_cast<std::size_t>(parent_edge_[x]);
            eflow_[e] = x < n_ ? net[x] : -net[x];
            net[static_cast<std::size_t>(parent_[x])] += net[x];
            if (Lex{edges_[e].mass, eflow_[e]}.negative() || (edges_[e].mass == 0.0 && eflow_[e] == 0.0)) ok = false;
        }
        return ok;
    }

    std::optional<Cell> price(Pricing rule) {
        const std::size_t total = n_ * m_;
        if (rule == Pricing::dantzig || rule == Pricing::bland) {
            double best = -eps_;
            std::optional<Cell> cell;
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < m_; ++j) {
                    const double d = reduced(i, j);
                    if (d < best) {
                        best = d;
                        cell = Cell{i, j};
                        if (rule == Pricing::bland) return cell;
                    }
                }
            return cell;
        }
        // Block search resumes where the previous scan stopped.
        double best = -eps_;
        std::optional<Cell> cell;
        std::size_t in_block = 0;
        std::size_t k = next_;
        for (std::size_t scanned = 0; scanned < total; ++scanned) {
            const std::size_t i = k / m_, j = k % m_;
            const double d = reduced(i, j);
            if (d < best) {
                best = d;
                cell = Cell{i, j};
            }
            if (++k == total) k = 0;
            if (++in_block == block_) {
                if (cell) break;
                in_block = 0;
            }
        }
        next_ = k;
        return cell;
    }

    // One simplex step with entering cell (i, j); returns true when degenerate.
    bool pivot(std::size_t i, std::size_t j) {
        const double d = reduced(i, j);
        const std::size_t a = i, b = n_ + j;

        // Cycle = tree path between row node a and column node b, closed by the entering cell.
        // Walking from b, cells alternate -, +, -, ...; a cell is "-" when its child endpoint
        // is a column on b's branch, or a row on a's branch.
        side_a_.clear();
        side_b_.clear();
        std::size_t x = a, y = b;
        while (depth_[x] > depth_[y]) {
            side_a_.push_back(x);
            x = static_cast<std::size_t>(parent_[x]);
        }
        while (depth_[y] > depth_[x]) {
            side_b_.push_back(y);
            y = static_cast<std::size_t>(parent_[y]);
        }
        while (x != y) {
            side_a_.push_back(x);
            side_b_.push_back(y);
            x = static_cast<std::size_t>(parent_[x]);
            y = static_cast<std::size_t>(parent_[y]);
        }

        Lex theta{std::numeric_limits<double>::infinity(), 0.0};
        std::ptrdiff_t leave_child = -1;
        bool leave_on_a = false;
        const auto cell_index = [&](const Shipment& t) { return t.i * m_ + t.j; };
        auto consider = [&](std::size_t child, bool on_a) {
            const auto e = static_cast<std::size_t>(parent_edge_[child]);
            const bool minus = on_a ? child < n_ : child >= n_;
            if (!minus) return;
            const Lex f = lex_ok_ ? Lex{edges_[e].mass, eflow_[e]} : Lex{edges_[e].mass, 0.0};
            if (f < theta ||
                (f == theta &&
                 cell_index(edges_[e]) < cell_index(edges_[static_cast<std::size_t>(parent_edge_[leave_child])]))) {
                theta = f;
                leave_child = static_cast<std::ptrdiff_t>(child);
                leave_on_a = on_a;
            }
        };
        for (std::size_t c : side_a_) consider(c, true);
        for (std::size_t c : side_b_) consider(c, false);

        auto shift_flow = [&](std::size_t child, bool down) {
            const auto e = static_cast<std::size_t>(parent_edge_[child]);
            const Lex f = Lex{edges_[e].mass, eflow_[e]};
            const Lex g = snap(down ? f - theta : f + theta, snap_);
            edges_[e].mass = std::max(0.0, g.v);
            eflow_[e] = g.e;
        };
        for (std::size_t c : side_a_) shift_flow(c, c < n_);
        for (std::size_t c : side_b_) shift_flow(c, c >= n_);

        // Swap the leaving cell for the entering one in the same slot.
        const auto lc = static_cast<std::size_t>(leave_child);
        const auto slot = static_cast<std::uint32_t>(parent_edge_[lc]);
        const auto lp = static_cast<std::size_t>(parent_[lc]);
        auto drop = [&](std::size_t node) {
            auto& list = adj_[node];
            list.erase(std::find(list.begin(), list.end(), slot));
        };
        drop(lc);
        drop(lp);
        edges_[slot] = {i, j, theta.v};
        eflow_[slot] = theta.e;
        adj_[a].push_back(slot);
        adj_[b].push_back(slot);

        // Re-hang the detached subtree (it holds a or b) below the other endpoint and
        // shift its potentials so the entering cell has zero reduced cost.
        const std::size_t q = leave_on_a ? a : b;
        const std::size_t r = leave_on_a ? b : a;
        const double shift = q < n_ ? d : -d; // added to rows, subtracted from columns
        parent_[q] = static_cast<std::ptrdiff_t>(r);
        parent_edge_[q] = slot;
        depth_[q] = depth_[r] + 1;
        stack_.clear();
        stack_.push_back(q);
        while (!stack_.empty()) {
            const std::size_t u = stack_.back();
            stack_.pop_back();
            pot_[u] += u < n_ ? shift : -shift;
            for (std::uint32_t e : adj_[u]) {
                if (static_cast<std::ptrdiff_t>(e) == parent_edge_[u]) continue;
                const std::size_t w = other(e, u);
                parent_[w] = static_cast<std::ptrdiff_t>(u);
                parent_edge_[w] = e;
                depth_[w] = depth_[u] + 1;
                stack_.push_back(w);
            }
        }
        return theta.v == 0.0;
    }

    const TransportProblem& pb_;
    std::size_t n_, m_;
    SimplexOptions opts_;
    std::vector<Shipment> edges_;
    std::vector<double> eflow_; // epsilon coefficient of each basis flow
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::ptrdiff_t> parent_, parent_edge_;
    std::vector<std::size_t> depth_;
    std::vector<double> pot_;
    std::vector<std::size_t> side_a_, side_b_, stack_;
    double eps_ = 0.0;
    double snap_ = 0.0;
    bool lex_ok_ = false;
    std::size_t block_ = 0;
    std::size_t next_ = 0;
    std::size_t max_iter_ = 0;
    std::size_t iterations_ = 0;
    std::size_t degenerate_ = 0;
};

} // namespace detail

/// Transportation simplex from a basic feasible plan. When the iteration cap is
/// hit the best plan so far is returned with `optimal == false`.
inline TransportPlan optimize(const TransportProblem& problem, const TransportPlan& initial, SimplexOptions opts = {}) {
    return detail::TreeSimplex(problem, initial, opts).run();
}

/// Delta-peak approximation of a sampled density.
struct Peaks {
    std::vector<PhasePoint> points;
    std::vector<double> masses;
};

/// One peak per cell whose mass value * dx^2 exceeds `threshold`, at the cell
/// centre; masses renormalised to sum to one.
inline Peaks discretize(const HusimiField& field, double threshold) {
    if (!(threshold >= 0.0)) throw Error(ErrorKind::domain, "discretize: threshold must be >= 0");
    Peaks out;
    const double area = field.layout.cell_area();
    double sum = 0.0;
    for (std::size_t k = 0; k < field.values.size(); ++k) {
        const double mass = field.values[k] * area;
        if (mass > threshold) {
            out.points.push_back(field.layout.node(k));
            out.masses.push_back(mass);
            sum += mass;
        }
    }
    if (out.masses.empty()) throw Error(ErrorKind::domain, "discretize: threshold leaves no peaks");
    for (double& m : out.masses) m /= sum;
    return out;
}

/// Grid and discretisation settings for the numeric Monge distance.
struct GridParams {
    double dx = 0.125;
    std::size_t cells = 0;              // > 0: exactly cells x cells over the shared window
    std::optional<double> radius;       // half-width of the shared window (default: 6 widths)
    double threshold_rel = 1e-12;       // peak threshold relative to the largest cell mass
    std::optional<std::size_t> max_peaks; // keep at most this many heaviest cells per state
    std::size_t cost_cap = default_cost_cap;
    bool vogel_start = true;
    SimplexOptions simplex;
};

inline GridLayout shared_layout(const StateSpec& a, const StateSpec& b, const GridParams& params) {
    const auto [lo, hi] = shared_window(a, b, params.radius);
    if (params.cells > 0) return GridLayout::square({0.0, 0.0}, hi.x1, params.cells);
    return GridLayout::covering(lo, hi, params.dx);
}

/// Cell-mass threshold implementing threshold_rel and max_peaks.
inline double peak_threshold(const HusimiField& field, const GridParams& params) {
    const double area = field.layout.cell_area();
    const double top = *std::max_element(field.values.begin(), field.values.end()) * area;
    double thr = params.threshold_rel * top;
    if (params.max_peaks && *params.max_peaks < field.values.size()) {
        std::vector<double> v(field.values);
        const auto k = static_cast<std::ptrdiff_t>(*params.max_peaks);
        std::nth_element(v.begin(), v.begin() + k, v.end(), std::greater<>());
        thr = std::max(thr, v[static_cast<std::size_t>(k)] * area);
    }
    return thr;
}

/// D_{M_p} between two states by solving the discretised transport problem.
inline DistanceResult monge_numeric(const StateSpec& a, const StateSpec& b, const GridParams& params = {},
                                    double p = 1.0) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::unsupported, "transport needs a finite p >= 1");
    const GridLayout layout = shared_layout(a, b, params);
    const HusimiField fa = husimi_grid(a, layout);
    const HusimiField fb = husimi_grid(b, layout);
    Peaks pa = discretize(fa, peak_threshold(fa, params));
    Peaks pb = discretize(fb, peak_threshold(fb, params));
    const std::size_t na = pa.points.size(), nb = pb.points.size();

    const TransportProblem problem(std::move(pa.masses), std::move(pb.masses), std::move(pa.points),
                                   std::move(pb.points), p, params.cost_cap);
    const TransportPlan start = params.vogel_start ? vogel(problem) : northwest_corner(problem);
    const TransportPlan plan = optimize(problem, start, params.simplex);
    if (!plan.optimal)
        throw Error(ErrorKind::solver, "transport: simplex stopped after " + std::to_string(plan.iterations) +
                                           " iterations without an optimality certificate");

    DistanceResult r{std::pow(std::max(0.0, plan.total_cost), 1.0 / p), Method::transport, PNorm(p), {}};
    r.diagnostics["dx"] = layout.dx;
    r.diagnostics["grid_nx"] = static_cast<double>(layout.nx);
    r.diagnostics["grid_ny"] = static_cast<double>(layout.ny);
    r.diagnostics["peaks_source"] = static_cast<double>(na);
    r.diagnostics["peaks_sink"] = static_cast<double>(nb);
    r.diagnostics["raw_mass_source"] = fa.raw_mass;
    r.diagnostics["raw_mass_sink"] = fb.raw_mass;
    r.diagnostics["initial_cost"] = start.total_cost;
    r.diagnostics["iterations"] = static_cast<double>(plan.iterations);
    r.diagnostics["degenerate_pivots"] = static_cast<double>(plan.degenerate_pivots);
    r.diagnostics["max_reduced_cost_violation"] = std::max(0.0, -plan.min_reduced_cost);
    return r;
}

} // namespace monge
