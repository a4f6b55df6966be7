// fim.hpp: Fisher information of transport-time distributions with respect to
// the (log-)parameters, its spectrum, and the derived importance profile
//
//   g_{mu nu} = int dt (1/f) (df/dtheta_mu) (df/dtheta_nu)
//   P(theta_mu) ~ sum_i lambda_i |e_i . theta_mu|,   sum_mu P = 1
//
// Derivatives are central differences in log-parameters (linear for angles).
// Every perturbed model is evolved on the base run's time grid so that the
// integrand can be formed pointwise.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/distributions.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/errors.hpp"
#include "exnet/generator.hpp"
#include "exnet/parameters.hpp"
#include "exnet/steady_state.hpp"

namespace exnet {

enum class FigureOfMerit { arrival, loss, steady };

inline std::string to_string(FigureOfMerit k) {
    switch (k) {
    case FigureOfMerit::arrival: return "arrival";
    case FigureOfMerit::loss: return "loss";
    case FigureOfMerit::steady: return "steady";
    }
    return "arrival";
}

inline FigureOfMerit figure_of_merit_from_string(const std::string& s) {
    if (s == "arrival") return FigureOfMerit::arrival;
    if (s == "loss") return FigureOfMerit::loss;
    if (s == "steady") return FigureOfMerit::steady;
    throw ConfigError("unknown figure of merit '" + s + "' (expected arrival, loss or steady)");
}

inline DistributionKind distribution_kind(FigureOfMerit k) {
    if (k == FigureOfMerit::steady) throw ConfigError("the steady figure of merit is not a time distribution");
    return k == FigureOfMerit::arrival ? DistributionKind::arrival : DistributionKind::loss;
}

struct FimOptions {
    double step{1e-4};
    double noise_floor{1e-8};    // integrand cut where f < noise_floor * max f
    double grid_extension{0.1};  // base grid runs this fraction past completion
    double null_threshold{1e-10}; // relative to lambda_max
    double current_floor{1e-10}; // minimum steady current, 1/ns
    // A perturbed run counts as complete if the population still in the
    // network at the end of the shared grid is below this multiple of the
    // completion tolerance.
    double perturbed_completion_factor{10.0};
    EvolveOptions evolve{};
};

struct FimDiagnostics {
    double step{0.0};
    std::vector<double> steps; // per parameter
    double noise_floor{0.0};
    std::vector<bool> kept;    // grid points entering the quadrature
    std::size_t cut_points{0};
    double cut_mass{0.0};      // int f dt over the excluded points
    double dt_ns{0.0};
    std::size_t grid_points{0};
    double completion_time_ns{0.0};
    double distribution_total{0.0}; // P_max, P_loss, or I_ss (1/ns)
    double symmetry_error{0.0};     // max |g - g^T| / max |g| before symmetrizing
    double null_threshold{0.0};
    std::size_t null_directions{0};
    double condition{0.0}; // lambda_max / smallest eigenvalue above the null threshold
};

struct FimResult {
    FigureOfMerit kind{FigureOfMerit::arrival};
    ParameterVector params;
    std::vector<std::string> labels;
    Eigen::MatrixXd g;
    Eigen::VectorXd eigenvalues;  // descending
    Eigen::MatrixXd eigenvectors; // orthonormal columns
    Eigen::VectorXd importance;   // sums to one
    Eigen::VectorXd gradient;     // scalar figure of merit only
    FimDiagnostics diagnostics;
};

struct DistributionGradient {
    TimeGrid grid{};
    std::vector<double> times_ns;
    std::vector<double> f;
    Eigen::MatrixXd rows; // parameters x grid points, d f / d theta~
    double total{0.0};
};

namespace detail {

inline EvolveOptions quiet(EvolveOptions opt) {
    opt.positivity_checks = 0;
    opt.keep_states = false;
    return opt;
}

inline Trajectory transient_on_grid(const NetworkConfig& cfg, const TimeGrid& grid, const EvolveOptions& opt,
                                    Generator* gen_out = nullptr) {
    Generator gen = build_generator(cfg, Mode::transient);
    Trajectory tr = evolve_on_grid(gen, default_initial_state(gen), grid, quiet(opt));
    if (gen_out) *gen_out = std::move(gen);
    return tr;
}

} // namespace detail

inline ArrivalDistribution distribution_on_grid(const NetworkConfig& cfg, DistributionKind kind, const TimeGrid& grid,
                                                const EvolveOptions& opt = {}) {
    Generator gen;
    const Trajectory tr = detail::transient_on_grid(cfg, grid, opt, &gen);
    return time_distribution(kind, tr, gen, cfg);
}

inline DistributionGradient distribution_gradient(const NetworkConfig& cfg, const ParameterVector& params,
                                                  DistributionKind kind, const TimeGrid& grid,
                                                  const FimOptions& opt = {}) {
    const ArrivalDistribution base = distribution_on_grid(cfg, kind, grid, opt.evolve);
    DistributionGradient out{grid, base.times_ns, base.f,
                             Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(params.size()),
                                                   static_cast<Eigen::Index>(grid.points)),
                             base.total};
    const double h = opt.step;
    for (std::size_t mu = 0; mu < params.size(); ++mu) {
        ArrivalDistribution plus, minus;
        try {
            const NetworkConfig cp = perturb(cfg, params, mu, h);
            const NetworkConfig cm = perturb(cfg, params, mu, -h);
            Generator gp, gm;
            const Trajectory tp = detail::transient_on_grid(cp, grid, opt.evolve, &gp);
            const Trajectory tm = detail::transient_on_grid(cm, grid, opt.evolve, &gm);
            const double limit = opt.perturbed_completion_factor * opt.evolve.completion_tolerance;
            if (tp.remaining(tp.size() - 1) >= limit || tm.remaining(tm.size() - 1) >= limit)
                throw NumericError("run does not complete on the shared grid");
            plus = time_distribution(kind, tp, gp, cp);
            minus = time_distribution(kind, tm, gm, cm);
        } catch (const std::exception& e) {
            throw NumericError("perturbed run for parameter " + std::to_string(mu) + " (" + params[mu].label() +
                               ") failed: " + e.what());
        }
        for (std::size_t k = 0; k < grid.points; ++k)
            out.rows(static_cast<Eigen::Index>(mu), static_cast<Eigen::Index>(k)) = (plus.f[k] - minus.f[k]) / (2.0 * h);
    }
    return out;
}

inline std::vector<bool> noise_mask(const std::vector<double>& f, double noise_floor) {
    const double fmax = *std::max_element(f.begin(), f.end());
    std::vector<bool> kept(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) kept[k] = f[k] > 0.0 && f[k] >= noise_floor * fmax;
    return kept;
}

// int dt (1/f) d_mu f d_nu f, trapezoid over the kept points.
inline Eigen::MatrixXd fim_integral(const DistributionGradient& grad, const std::vector<bool>& kept) {
    const auto w = trapezoid_weights(grad.times_ns);
    const auto n = static_cast<Eigen::Index>(grad.times_ns.size());
    Eigen::MatrixXd scaled = Eigen::MatrixXd::Zero(grad.rows.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (kept[ku]) scaled.col(k) = grad.rows.col(k) * std::sqrt(w[ku] / grad.f[ku]);
    }
    return scaled * scaled.transpose();
}

// E[(d_mu ln f)(d_nu ln f)] with weight f dt over the same kept points.
inline Eigen::MatrixXd fim_expectation(const DistributionGradient& grad, const std::vector<bool>& kept) {
    const auto w = trapezoid_weights(grad.times_ns);
    const auto p = grad.rows.rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < grad.times_ns.size(); ++k) {
        if (!kept[k]) continue;
        const double weight = w[k] * grad.f[k];
        const Eigen::VectorXd score = grad.rows.col(static_cast<Eigen::Index>(k)) / grad.f[k];
        g.noalias() += weight * score * score.transpose();
    }
    return g;
}

inline Eigen::VectorXd importance_from_spectrum(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenvectors) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(eigenvectors.rows());
    // Tiny negative eigenvalues are quadrature noise; they carry no weight.
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        p += std::max(eigenvalues(i), 0.0) * eigenvectors.col(i).cwiseAbs();
    const double total = p.sum();
    if (!(total > 0.0)) throw NumericError("Fisher information vanishes; importance undefined");
    return p / total;
}

// Symmetrize, diagonalize (descending, sign-fixed eigenvectors) and derive
// the importance profile.
inline FimResult analyse_fim(Eigen::MatrixXd g, const ParameterVector& params, FigureOfMerit kind,
                             const FimOptions& opt = {}) {
    FimResult res;
    res.kind = kind;
    res.params = params;
    res.labels = parameter_labels(params);
    const double gmax = g.cwiseAbs().maxCoeff();
    res.diagnostics.symmetry_error = gmax > 0.0 ? (g - g.transpose()).cwiseAbs().maxCoeff() / gmax : 0.0;
    g = 0.5 * (g + g.transpose());
    res.g = g;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.info() != Eigen::Success) throw NumericError("FIM eigendecomposition failed");
    const Eigen::Index n = g.rows();
    res.eigenvalues.resize(n);
    res.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        res.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
        Eigen::VectorXd v = es.eigenvectors().col(n - 1 - i);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        res.eigenvectors.col(i) = v;
    }
    res.importance = importance_from_spectrum(res.eigenvalues, res.eigenvectors);

    auto& diag = res.diagnostics;
    diag.step = opt.step;
    diag.steps.assign(params.size(), opt.step);
    diag.noise_floor = opt.noise_floor;
    diag.null_threshold = opt.null_threshold;
    const double lmax = res.eigenvalues(0);
    double lmin = lmax;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (res.eigenvalues(i) < opt.null_threshold * lmax)
            ++diag.null_directions;
        else
            lmin = std::min(lmin, res.eigenvalues(i));
    }
    diag.condition = lmin > 0.0 ? lmax / lmin : 0.0;
    return res;
}

struct BaseRun {
    Generator generator;
    Trajectory trajectory;
};

// Base evolution whose grid is shared by all perturbed runs.
inline BaseRun base_run(const NetworkConfig& cfg, const FimOptions& opt = {}) {
    EvolveOptions eo = opt.evolve;
    eo.extend_fraction = opt.grid_extension;
    BaseRun run{build_generator(cfg, Mode::transient), {}};
    run.trajectory = evolve(run.generator, default_initial_state(run.generator), eo);
    if (!run.trajectory.completed)
        throw NumericError("base model does not complete within t_max = " + std::to_string(eo.t_max_ns) + " ns");
    return run;
}

inline FimResult fim(const NetworkConfig& cfg, FigureOfMerit kind, const FimOptions& opt = {},
                     const ParameterVector& params_in = {}) {
    const ParameterVector params = params_in.empty() ? default_parameters(cfg.size()) : params_in;
    const DistributionKind dk = distribution_kind(kind);
    const BaseRun base = base_run(cfg, opt);
    const TimeGrid grid = base.trajectory.grid;

    const DistributionGradient grad = distribution_gradient(cfg, params, dk, grid, opt);
    const std::vector<bool> kept = noise_mask(grad.f, opt.noise_floor);
    if (std::none_of(kept.begin(), kept.end(), [](bool b) { return b; }))
        throw NumericError("distribution too noisy: every grid point was cut");

    FimResult res = analyse_fim(fim_integral(grad, kept), params, kind, opt);
    auto& diag = res.diagnostics;
    diag.kept = kept;
    const auto w = trapezoid_weights(grad.times_ns);
    for (std::size_t k = 0; k < kept.size(); ++k)
        if (!kept[k]) {
            ++diag.cut_points;
            diag.cut_mass += w[k] * grad.f[k];
        }
    diag.dt_ns = grid.dt_ns;
    diag.grid_points = grid.points;
    diag.completion_time_ns = base.trajectory.completion_time_ns;
    diag.distribution_total = grad.total;
    return res;
}

// Ratio ||D(h) - D(h/2)|| / ||D(h/2) - D(h/4)|| of central-difference rows;
// close to 4 where the second-order truncation error dominates.
inline double richardson_ratio(const NetworkConfig& cfg, const ParameterVector& params, std::size_t mu,
                               DistributionKind kind, const TimeGrid& grid, double h, const FimOptions& opt = {}) {
    auto row = [&](double step) {
        FimOptions o = opt;
        o.step = step;
        const ParameterVector single{params.at(mu)};
        return Eigen::VectorXd(distribution_gradient(cfg, single, kind, grid, o).rows.row(0).transpose());
    };
    const Eigen::VectorXd d1 = row(h);
    const Eigen::VectorXd d2 = row(h / 2);
    const Eigen::VectorXd d4 = row(h / 4);
    return (d1 - d2).norm() / (d2 - d4).norm();
}

// Steady current in 1/ns.
inline double steady_current(const NetworkConfig& cfg) {
    return steady_state(build_generator(cfg, Mode::steady)).current_per_ns;
}

// Rank-one sensitivity matrix g = grad(I_ss) grad(I_ss)^T in log-parameters.
inline FimResult scalar_sensitivity(const NetworkConfig& cfg, const FimOptions& opt = {},
                                    const ParameterVector& params_in = {}) {
    const ParameterVector params = params_in.empty() ? default_parameters(cfg.size()) : params_in;
    if (!(cfg.gamma_inj > 0.0)) throw ConfigError("scalar sensitivity needs Gamma_inj > 0");
    const double base = steady_current(cfg);
    if (!(base > opt.current_floor)) throw NumericError("steady-state current below floor");

    const double h = opt.step;
    Eigen::VectorXd grad(static_cast<Eigen::Index>(params.size()));
    for (std::size_t mu = 0; mu < params.size(); ++mu) {
        try {
            const double plus = steady_current(perturb(cfg, params, mu, h));
            const double minus = steady_current(perturb(cfg, params, mu, -h));
            grad(static_cast<Eigen::Index>(mu)) = (plus - minus) / (2.0 * h);
        } catch (const std::exception& e) {
            throw NumericError("perturbed steady state for parameter " + params[mu].label() + " failed: " + e.what());
        }
    }
    FimResult res = analyse_fim(grad * grad.transpose(), params, FigureOfMerit::steady, opt);
    res.gradient = grad;
    res.diagnostics.distribution_total = base;
    return res;
}

inline FimResult sensitivity(const NetworkConfig& cfg, FigureOfMerit kind, const FimOptions& opt = {},
                             const ParameterVector& params = {}) {
    return kind == FigureOfMerit::steady ? scalar_sensitivity(cfg, opt, params) : fim(cfg, kind, opt, params);
}

struct GroupImportance {
    double total{0.0};
    double min{0.0}; // smallest single-parameter importance in the group
    double max{0.0}; // largest single-parameter importance in the group
    std::vector<std::pair<std::string, double>> breakdown;
};

inline std::map<ParameterGroup, GroupImportance> importance_by_group(const FimResult& res) {
    std::map<ParameterGroup, GroupImportance> out;
    for (std::size_t mu = 0; mu < res.params.size(); ++mu) {
        const double p = res.importance(static_cast<Eigen::Index>(mu));
        auto [it, fresh] = out.try_emplace(res.params[mu].group());
        auto& gi = it->second;
        if (fresh) gi.min = gi.max = p;
        gi.total += p;
        gi.min = std::min(gi.min, p);
        gi.max = std::max(gi.max, p);
        gi.breakdown.emplace_back(res.labels[mu], p);
    }
    return out;
}

inline double group_total(const FimResult& res, ParameterGroup group) {
    const auto groups = importance_by_group(res);
    const auto it = groups.find(group);
    return it == groups.end() ? 0.0 : it->second.total;
}

struct SloppinessMetrics {
    double decade_span{0.0};
    std::size_t nonzero{0};
    std::vector<double> eigenvalues; // descending, full spectrum
};

inline SloppinessMetrics sloppiness_metrics(const FimResult& res) {
    SloppinessMetrics m;
    m.eigenvalues.assign(res.eigenvalues.data(), res.eigenvalues.data() + res.eigenvalues.size());
    const double lmax = res.eigenvalues(0);
    if (!(lmax > 0.0)) return m;
    const double threshold = res.diagnostics.null_threshold > 0.0 ? res.diagnostics.null_threshold : 1e-10;
    double lmin = lmax;
    for (const double l : m.eigenvalues)
        if (l >= threshold * lmax) {
            lmin = std::min(lmin, l);
            ++m.nonzero;
        }
    m.decade_span = std::log10(lmax / lmin);
    return m;
}

} // namespace exnet
