// dynamics.hpp: exact-propagator time evolution of the master equation
//
// The generator is restricted to the vec(rho) components reachable from the
// initial state and rewritten in real coordinates (populations plus real and
// imaginary parts of coherences). A single matrix exponential exp(M dt) then
// advances the state over a uniform grid.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "exnet/errors.hpp"
#include "exnet/generator.hpp"
#include "exnet/hamiltonian.hpp"
#include "exnet/superop.hpp"

namespace exnet {

// Real coordinates for the Hermitian matrices supported on a set of
// vec(rho) indices closed under the generator.
class RealCoordinates {
public:
    struct Coord {
        std::size_t row;
        std::size_t col;
        enum Part { diagonal, real, imag } part;
    };

    RealCoordinates(const SuperOperator& G, const Operator& rho0) : d_(static_cast<std::size_t>(rho0.rows())) {
        const std::size_t n = d_ * d_;
        std::vector<bool> seen(n, false);
        std::queue<std::size_t> todo;
        auto visit = [&](std::size_t k) {
            if (!seen[k]) {
                seen[k] = true;
                todo.push(k);
            }
        };
        for (std::size_t j = 0; j < d_; ++j)
            for (std::size_t i = 0; i < d_; ++i)
                if (rho0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != Complex(0.0)) {
                    visit(vec_index(i, j, d_));
                    visit(vec_index(j, i, d_));
                }
        while (!todo.empty()) {
            const std::size_t k = todo.front();
            todo.pop();
            visit(vec_index(k / d_, k % d_, d_)); // Hermitian partner
            for (std::size_t r = 0; r < n; ++r)
                if (G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) != Complex(0.0)) visit(r);
        }

        diag_coord_.assign(d_, npos);
        for (std::size_t j = 0; j < d_; ++j) {
            for (std::size_t i = 0; i <= j; ++i) {
                if (!seen[vec_index(i, j, d_)]) continue;
                if (i == j) {
                    diag_coord_[i] = coords_.size();
                    coords_.push_back({i, i, Coord::diagonal});
                } else {
                    coords_.push_back({i, j, Coord::real});
                    coords_.push_back({i, j, Coord::imag});
                }
            }
        }
    }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t size() const noexcept { return coords_.size(); }
    std::size_t dim() const noexcept { return d_; }
    std::size_t diagonal(std::size_t level) const noexcept { return diag_coord_[level]; }
    const std::vector<Coord>& coords() const noexcept { return coords_; }

    Eigen::VectorXd to_real(const Operator& rho) const {
        Eigen::VectorXd x(static_cast<Eigen::Index>(coords_.size()));
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            const auto& co = coords_[c];
            const Complex z = rho(static_cast<Eigen::Index>(co.row), static_cast<Eigen::Index>(co.col));
            x(static_cast<Eigen::Index>(c)) = co.part == Coord::imag ? z.imag() : z.real();
        }
        return x;
    }

    Operator to_operator(const Eigen::VectorXd& x) const {
        const auto d = static_cast<Eigen::Index>(d_);
        Operator rho = Operator::Zero(d, d);
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            const auto& co = coords_[c];
            const auto i = static_cast<Eigen::Index>(co.row);
            const auto j = static_cast<Eigen::Index>(co.col);
            const double v = x(static_cast<Eigen::Index>(c));
            switch (co.part) {
            case Coord::diagonal: rho(i, i) += v; break;
            case Coord::real:
                rho(i, j) += v;
                rho(j, i) += v;
                break;
            case Coord::imag:
                rho(i, j) += Complex(0.0, v);
                rho(j, i) -= Complex(0.0, v);
                break;
            }
        }
        return rho;
    }

    // Real matrix M with to_real(G rho) = M to_real(rho) on the closed subspace.
    Eigen::MatrixXd restrict(const SuperOperator& G) const {
        const auto m = static_cast<Eigen::Index>(coords_.size());
        Eigen::MatrixXd M(m, m);
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(m);
        for (Eigen::Index c = 0; c < m; ++c) {
            unit(c) = 1.0;
            M.col(c) = to_real(apply_superop(G, to_operator(unit)));
            unit(c) = 0.0;
        }
        return M;
    }

private:
    std::size_t d_;
    std::vector<Coord> coords_;
    std::vector<std::size_t> diag_coord_;
};

struct TimeGrid {
    double dt_ns{0.0};
    std::size_t points{0};

    double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_ns; }
    double end() const noexcept { return points == 0 ? 0.0 : time(points - 1); }
};

struct EvolveOptions {
    double t_max_ns{50.0};
    double completion_tolerance{1e-4};
    // Continue past completion by this fraction of the completion time.
    double extend_fraction{0.0};
    // Lower bound on resolution: completion_time / min_steps.
    std::size_t min_steps{2000};
    // Hard cap on grid size; the coherent-resolution rule is relaxed to respect it.
    std::size_t max_points{200000};
    bool keep_states{false};
    // Number of evenly spaced points at which the minimum eigenvalue of rho is checked (0 = off).
    std::size_t positivity_checks{200};
    double positivity_threshold{-1e-6};
};

struct Trajectory {
    HilbertIndex index{};
    TimeGrid grid{};
    std::vector<double> times_ns;
    Eigen::MatrixXd populations; // rows = time points, cols = basis levels
    std::vector<Operator> states; // filled when EvolveOptions::keep_states

    bool completed{false};
    double completion_time_ns{std::numeric_limits<double>::quiet_NaN()};
    // t -> infinity populations of the absorbing levels (transient mode); the
    // last stored values otherwise.
    double final_trap{0.0};
    double final_ground{0.0};
    bool asymptotic_final{false};

    double max_trace_error{0.0};
    double min_eigenvalue{0.0};
    std::size_t positivity_breaches{0};

    std::size_t size() const noexcept { return times_ns.size(); }
    double site(std::size_t k, std::size_t i) const {
        return populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(index.site(i)));
    }
    double ground(std::size_t k) const {
        return populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(HilbertIndex::ground()));
    }
    double trap(std::size_t k) const {
        return populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(index.trap()));
    }
    double remaining(std::size_t k) const { return 1.0 - trap(k) - ground(k); }
};

inline Operator default_initial_state(const Generator& gen) {
    const std::size_t s = gen.index.site(gen.rates.source);
    return transition(gen.dim(), s, s);
}

namespace detail {

inline void check_density_matrix(const Operator& rho, std::size_t d) {
    if (rho.rows() != static_cast<Eigen::Index>(d) || rho.cols() != static_cast<Eigen::Index>(d))
        throw ConfigError("initial state has the wrong dimension");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("initial state is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-12) throw ConfigError("initial state must have unit trace");
    Eigen::SelfAdjointEigenSolver<Operator> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw ConfigError("initial state is not positive semidefinite");
}

struct Propagation {
    RealCoordinates coords;
    Eigen::MatrixXd M;
    Eigen::VectorXd x0;
    std::size_t ground_coord;
    std::size_t trap_coord;

    Propagation(const Generator& gen, const Operator& rho0)
        : coords(gen.matrix, rho0), M(coords.restrict(gen.matrix)), x0(coords.to_real(rho0)),
          ground_coord(coords.diagonal(HilbertIndex::ground())), trap_coord(coords.diagonal(gen.index.trap())) {}

    double value(const Eigen::VectorXd& x, std::size_t c) const {
        return c == RealCoordinates::npos ? 0.0 : x(static_cast<Eigen::Index>(c));
    }
    double remaining(const Eigen::VectorXd& x) const {
        return 1.0 - value(x, trap_coord) - value(x, ground_coord);
    }
    Eigen::VectorXd at(double t) const { return (M * t).exp() * x0; }
};

// Completion time (internal units) of the continuous evolution, or +inf if
// the tolerance is not reached before t_max.
inline double estimate_completion(const Propagation& p, double t_max, double eps, double t_first) {
    if (p.remaining(p.x0) < eps) return 0.0;
    double lo = 0.0;
    double hi = std::min(t_first, t_max);
    while (p.remaining(p.at(hi)) >= eps) {
        if (hi >= t_max) return std::numeric_limits<double>::infinity();
        lo = hi;
        hi = std::min(2.0 * hi, t_max);
    }
    for (int it = 0; it < 60 && hi - lo > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (p.remaining(p.at(mid)) < eps ? hi : lo) = mid;
    }
    return hi;
}

inline Trajectory propagate(const Generator& gen, const Propagation& p, const TimeGrid& grid,
                            const EvolveOptions& opt, bool stop_at_completion) {
    const std::size_t d = gen.dim();
    const double dt = gen.units.ns_to_time(grid.dt_ns);
    const Eigen::MatrixXd step = (p.M * dt).exp();
    if (!step.allFinite()) throw NumericError("integration failure: non-finite propagator");

    Trajectory tr;
    tr.index = gen.index;
    tr.grid = grid;
    tr.times_ns.reserve(grid.points);
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(grid.points);

    const double eps = opt.completion_tolerance;
    double stop_ns = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x = p.x0;
    for (std::size_t k = 0; k < grid.points; ++k) {
        if (k > 0) x = step * x;
        const double t = grid.time(k);
        tr.times_ns.push_back(t);
        xs.push_back(x);
        if (!tr.completed && p.remaining(x) < eps) {
            tr.completed = true;
            tr.completion_time_ns = t;
            stop_ns = t * (1.0 + opt.extend_fraction);
        }
        if (stop_at_completion && t >= stop_ns - 1e-9 * grid.dt_ns) break;
    }
    tr.grid.points = xs.size();

    const auto rows = static_cast<Eigen::Index>(xs.size());
    tr.populations = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(d));
    for (std::size_t level = 0; level < d; ++level) {
        const std::size_t c = p.coords.diagonal(level);
        if (c == RealCoordinates::npos) continue;
        for (Eigen::Index k = 0; k < rows; ++k)
            tr.populations(k, static_cast<Eigen::Index>(level)) = xs[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(c));
    }

    for (Eigen::Index k = 0; k < rows; ++k) {
        const double err = std::abs(tr.populations.row(k).sum() - 1.0);
        if (!std::isfinite(err) || err > 1e-6)
            throw NumericError("integration failure: trace drift beyond 1e-6 at t = " +
                               std::to_string(tr.times_ns[static_cast<std::size_t>(k)]) + " ns");
        tr.max_trace_error = std::max(tr.max_trace_error, err);
    }

    if (opt.keep_states) {
        tr.states.reserve(xs.size());
        for (const auto& xk : xs) tr.states.push_back(p.coords.to_operator(xk));
    }

    if (opt.positivity_checks > 0 && !xs.empty()) {
        const std::size_t stride = std::max<std::size_t>(1, xs.size() / opt.positivity_checks);
        tr.min_eigenvalue = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < xs.size(); k += stride) {
            Eigen::SelfAdjointEigenSolver<Operator> es(p.coords.to_operator(xs[k]), Eigen::EigenvaluesOnly);
            const double m = es.eigenvalues().minCoeff();
            tr.min_eigenvalue = std::min(tr.min_eigenvalue, m);
            if (m < opt.positivity_threshold) ++tr.positivity_breaches;
        }
    }

    // Absorbing-level populations at t -> infinity: integrate the remaining
    // transient coordinates analytically, int_t^inf x_S = -M_SS^{-1} x_S(t).
    const Eigen::VectorXd& xe = xs.back();
    tr.final_trap = p.value(xe, p.trap_coord);
    tr.final_ground = p.value(xe, p.ground_coord);
    if (gen.mode == Mode::transient) {
        std::vector<Eigen::Index> transient;
        for (std::size_t c = 0; c < p.coords.size(); ++c)
            if (c != p.trap_coord && c != p.ground_coord) transient.push_back(static_cast<Eigen::Index>(c));
        const auto ns = static_cast<Eigen::Index>(transient.size());
        if (ns == 0) {
            tr.asymptotic_final = true;
        } else {
            Eigen::MatrixXd M_ss(ns, ns);
            Eigen::VectorXd x_s(ns);
            for (Eigen::Index a = 0; a < ns; ++a) {
                x_s(a) = xe(transient[static_cast<std::size_t>(a)]);
                for (Eigen::Index b = 0; b < ns; ++b)
                    M_ss(a, b) = p.M(transient[static_cast<std::size_t>(a)], transient[static_cast<std::size_t>(b)]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M_ss);
            if (lu.isInvertible()) {
                const Eigen::VectorXd tail = -lu.solve(x_s);
                auto gain = [&](std::size_t c) {
                    if (c == RealCoordinates::npos) return 0.0;
                    double s = 0.0;
                    for (Eigen::Index a = 0; a < ns; ++a)
                        s += p.M(static_cast<Eigen::Index>(c), transient[static_cast<std::size_t>(a)]) * tail(a);
                    return s;
                };
                tr.final_trap += gain(p.trap_coord);
                tr.final_ground += gain(p.ground_coord);
                tr.asymptotic_final = true;
            }
        }
    }
    return tr;
}

} // namespace detail

// Uniform grid spacing: min(pi hbar / (20 * spectral width), t_c / min_steps),
// relaxed if needed so the grid fits in max_points.
inline Trajectory evolve(const Generator& gen, const Operator& rho0, const EvolveOptions& opt = {}) {
    detail::check_density_matrix(rho0, gen.dim());
    if (!gen.matrix.allFinite()) throw NumericError("integration failure: non-finite generator");
    const detail::Propagation p(gen, rho0);

    const double t_max = gen.units.ns_to_time(opt.t_max_ns);
    const double t_c = detail::estimate_completion(p, t_max, opt.completion_tolerance, gen.units.ns_to_time(1e-6));
    const bool will_complete = std::isfinite(t_c) && t_c > 0.0;
    const double horizon = will_complete ? std::min(t_max, t_c * (1.0 + opt.extend_fraction)) : t_max;

    double dt = (will_complete ? t_c : t_max) / static_cast<double>(opt.min_steps);
    if (gen.spectral_width > 0.0) dt = std::min(dt, std::numbers::pi / (20.0 * gen.spectral_width));
    // Margin of 10% over the horizon since grid completion lands slightly after t_c.
    const double span = std::min(t_max, 1.1 * horizon + dt);
    dt = std::max(dt, span / static_cast<double>(opt.max_points - 1));

    TimeGrid grid;
    grid.dt_ns = gen.units.time_to_ns(dt);
    grid.points = static_cast<std::size_t>(std::floor(opt.t_max_ns / grid.dt_ns + 1e-9)) + 1;
    grid.points = std::min(grid.points, opt.max_points);
    return detail::propagate(gen, p, grid, opt, true);
}

// Evolution on a prescribed uniform grid; never truncated at completion.
inline Trajectory evolve_on_grid(const Generator& gen, const Operator& rho0, const TimeGrid& grid,
                                 const EvolveOptions& opt = {}) {
    detail::check_density_matrix(rho0, gen.dim());
    if (!gen.matrix.allFinite()) throw NumericError("integration failure: non-finite generator");
    if (grid.points == 0 || !(grid.dt_ns > 0.0)) throw ConfigError("time grid must be non-empty with dt > 0");
    const detail::Propagation p(gen, rho0);
    return detail::propagate(gen, p, grid, opt, false);
}

} // namespace exnet
