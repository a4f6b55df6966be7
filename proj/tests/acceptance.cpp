// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "exnet/cli.hpp"
#include "exnet/exnet.hpp"

namespace fs = std::filesystem;
using namespace exnet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
    bool ok{true};
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what) {
        if (!cond) ok = false;
        notes.push_back((cond ? "" : "!") + what);
    }
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int failures = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& n : c.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("%s %s (%.1f s): %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

EvolveOptions quiet_evolve() {
    EvolveOptions eo;
    eo.positivity_checks = 0;
    return eo;
}

// ------------------------------------------------------------------ criteria

void conservation(Check& c) {
    const auto t0 = Clock::now();
    const NetworkConfig cfg = square_network(1.0);
    const Generator gen = build_generator(cfg, Mode::transient);
    const Trajectory tr = evolve(gen, default_initial_state(gen));
    c.require(tr.completed, "run completes");
    c.require(tr.max_trace_error <= 1e-8, "trace error " + fmt("%.2e", tr.max_trace_error));
    const double total = tr.final_trap + tr.final_ground;
    c.require(std::abs(total - 1.0) <= 1e-6, "|Pmax+Ploss-1| " + fmt("%.2e", std::abs(total - 1.0)));
    const ArrivalDistribution a = arrival_time_distribution(tr, gen);
    const ArrivalDistribution l = loss_time_distribution(tr, cfg);
    const double ia = trapezoid(a.times_ns, a.f), il = trapezoid(l.times_ns, l.f);
    c.require(std::abs(ia - 1.0) <= 1e-3, "int f_arrival " + fmt("%.6f", ia));
    c.require(std::abs(il - 1.0) <= 1e-3, "int f_loss " + fmt("%.6f", il));
    const double s = seconds_since(t0);
    c.require(s < 10.0, "runtime " + fmt("%.2f s", s));
}

void unitary(Check& c) {
    const NetworkConfig cfg = chain_network(2, 2.0);
    GeneratorOptions off;
    off.redfield = false;
    off.trap = false;
    off.decay = false;
    const Generator gen = build_generator(cfg, Mode::transient, off);
    EvolveOptions eo = quiet_evolve();
    eo.t_max_ns = 1e-3;
    eo.keep_states = true;
    const Trajectory tr = evolve(gen, default_initial_state(gen), eo);
    const double V = nn_coupling_stats(cfg).mean;
    double err = 0.0, purity = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double t = cfg.units.ns_to_time(tr.times_ns[k]);
        err = std::max(err, std::abs(tr.site(k, 2) - std::pow(std::sin(V * t), 2)));
        purity = std::max(purity, std::abs((tr.states[k] * tr.states[k]).trace().real() - 1.0));
    }
    c.require(tr.size() > 100, std::to_string(tr.size()) + " samples over " + fmt("%.1f", V * cfg.units.ns_to_time(1e-3) / std::numbers::pi) + " periods");
    c.require(err < 1e-6, "max |P2 - sin^2(Vt)| " + fmt("%.2e", err));
    c.require(purity < 1e-8, "purity drift " + fmt("%.2e", purity));
}

void pure_dephasing(Check& c) {
    NetworkConfig cfg = irregular_network();
    cfg.spectral_kind = SpectralKind::J3;
    const std::size_t n = cfg.size(), d = n + 2;
    const SuperOperator R =
        redfield_tensor(build_hamiltonian(cfg), coupling_operators(cfg), SpectralDensity::from_config(cfg));
    SuperOperator D = SuperOperator::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    for (std::size_t i = 1; i <= n; ++i) {
        Operator P = Operator::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
        D += lindblad_dissipator(P);
    }
    // least-squares fit of the single constant gamma / lambda
    const double ratio = (D.adjoint() * R).trace().real() / D.squaredNorm() / cfg.lambda_ph;
    const double err = (R - ratio * cfg.lambda_ph * D).cwiseAbs().maxCoeff();
    c.require(true, "fitted gamma/lambda " + fmt("%.12f", ratio) + " (2 pi = 6.283185307180)");
    c.require(err < 1e-10, "elementwise residual " + fmt("%.2e", err));

    NetworkConfig chain = chain_network(4, 1.0);
    chain.spectral_kind = SpectralKind::J3;
    GeneratorOptions opt;
    opt.trap = false;
    opt.decay = false;
    const Generator gen = build_generator(chain, Mode::transient, opt);
    const double t_phi_ns = chain.units.time_to_ns(1.0 / (ratio * chain.lambda_ph));
    EvolveOptions eo = quiet_evolve();
    eo.t_max_ns = 10.0 * t_phi_ns;
    eo.keep_states = true;
    const Trajectory tr = evolve(gen, default_initial_state(gen), eo);
    const Operator rho = tr.states.back().block(1, 1, 4, 4);
    const double dev = (rho - Operator::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff();
    c.require(dev < 1e-6, "max |rho - I/4| at 10 t_phi (" + fmt("%.3g ns", eo.t_max_ns) + ") " + fmt("%.2e", dev));
}

void detailed_balance(Check& c) {
    const double kT = UnitSystem{}.kB() * 300.0;
    const SpectralDensity j1{SpectralKind::J1, 0.01, defaults::omega_c, kT};
    double worst = 0.0;
    const int n = 2000;
    for (int k = 0; k < n; ++k) {
        const double w = 1e-3 * std::pow(500.0, static_cast<double>(k) / (n - 1));
        const double r = noise_kernel(j1, w) / noise_kernel(j1, -w);
        worst = std::max(worst, std::abs(r / std::exp(w / kT) - 1.0));
    }
    c.require(worst < 1e-10, "max rel. error over [1 meV, 0.5 eV] " + fmt("%.2e", worst));
    const SpectralDensity j2{SpectralKind::J2, 0.01, 0.0, kT};
    double j2neg = 0.0;
    for (int k = 1; k <= n; ++k) j2neg = std::max(j2neg, std::abs(noise_kernel(j2, -0.5 * k / n)));
    c.require(j2neg == 0.0, "max |S_J2(w<0)| " + fmt("%.1e", j2neg));
}

void fim_structure(Check& c) {
    const NetworkConfig cfg = irregular_network();
    const auto t0 = Clock::now();
    const FimResult r = fim(cfg, FigureOfMerit::arrival);
    const double s = seconds_since(t0);
    const double lmax = r.eigenvalues(0);
    c.require((r.g - r.g.transpose()).cwiseAbs().maxCoeff() == 0.0 && r.diagnostics.symmetry_error < 1e-10,
              "symmetric (raw asymmetry " + fmt("%.1e", r.diagnostics.symmetry_error) + ")");
    c.require(r.eigenvalues.minCoeff() >= -1e-10 * lmax, "min eig / max " + fmt("%.2e", r.eigenvalues.minCoeff() / lmax));
    c.require(r.diagnostics.null_directions >= 3, std::to_string(r.diagnostics.null_directions) + " null directions");
    c.require(std::abs(r.importance.sum() - 1.0) <= 1e-12, "sum P - 1 = " + fmt("%.1e", r.importance.sum() - 1.0));
    c.require(s < 60.0, "20-parameter FIM " + fmt("%.1f s", s));

    NetworkConfig j3 = cfg;
    j3.spectral_kind = SpectralKind::J3;
    const FimResult r3 = fim(j3, FigureOfMerit::arrival);
    c.require(r3.g.row(19).cwiseAbs().maxCoeff() == 0.0, "T_ph row null under J3");

    const FimResult rm = fim(with_energy_unit(cfg, UnitSystem::from_name("meV")), FigureOfMerit::arrival);
    const double rel = (rm.g - r.g).cwiseAbs().maxCoeff() / r.g.cwiseAbs().maxCoeff();
    c.require(rel <= 1e-10, "eV vs meV relative difference " + fmt("%.1e", rel));
}

void sloppiness(Check& c) {
    const SloppinessMetrics sq = sloppiness_metrics(fim(square_network(1.0), FigureOfMerit::arrival));
    c.require(sq.decade_span >= 6.0, "square span " + fmt("%.2f decades", sq.decade_span));
    NetworkConfig chain = chain_network(4, 3.0);
    const double l1 = fim(chain, FigureOfMerit::arrival).eigenvalues(0);
    chain.spectral_kind = SpectralKind::J3;
    const double l3 = fim(chain, FigureOfMerit::arrival).eigenvalues(0);
    c.require(l1 / l3 > 1e2, "chain lambda_max J1/J3 " + fmt("%.3g", l1 / l3));
}

void importance_orderings(Check& c) {
    NetworkConfig chain = chain_network(4, 3.0);
    const FimResult a = fim(chain, FigureOfMerit::arrival);
    const double e1 = group_total(a, ParameterGroup::energy), p1 = group_total(a, ParameterGroup::position);
    c.require(e1 > p1, "chain J1 energy " + fmt("%.3f", e1) + " vs position " + fmt("%.3f", p1));
    chain.spectral_kind = SpectralKind::J3;
    const FimResult b = fim(chain, FigureOfMerit::arrival);
    const double e3 = group_total(b, ParameterGroup::energy), p3 = group_total(b, ParameterGroup::position);
    c.require(p3 > e3, "chain J3 position " + fmt("%.3f", p3) + " vs energy " + fmt("%.3f", e3));

    const auto panels = comparison_preset(FigureOfMerit::arrival);
    const Eigen::VectorXd s1 = stacked_profile(panels, SpectralKind::J1);
    const double c12 = cosine_similarity(s1, stacked_profile(panels, SpectralKind::J2));
    const double c13 = cosine_similarity(s1, stacked_profile(panels, SpectralKind::J3));
    c.require(c12 > c13, "preset cosine J1-J2 " + fmt("%.3f", c12) + " vs J1-J3 " + fmt("%.3f", c13));
}

void crossover(Check& c) {
    const auto t0 = Clock::now();
    ChainSweepSpec spec;
    const int n = 7;
    for (int k = 0; k < n; ++k) {
        const double V = 0.005 * std::pow(0.3 / 0.005, static_cast<double>(k) / (n - 1));
        spec.values.push_back(std::cbrt(defaults::J / V));
    }
    const SweepResult r = sweep_chain(spec);
    bool monotone = true;
    double overtake = -1.0;
    std::string trace;
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& p = r.points[k];
        const double pos = p.groups.at(ParameterGroup::position).total;
        const double en = p.groups.at(ParameterGroup::energy).total;
        if (k > 0 && !(pos > r.points[k - 1].groups.at(ParameterGroup::position).total)) monotone = false;
        if (overtake < 0.0 && pos > en) overtake = p.nn.mean;
        trace += (trace.empty() ? "" : " ") + fmt("%.0f:", 1e3 * p.nn.mean) + fmt("%.2f", pos);
    }
    c.require(true, "V[meV]:P_pos " + trace);
    c.require(monotone, "position importance increasing in V");
    c.require(overtake >= 0.05, "position overtakes energy at " + fmt("%.0f meV", 1e3 * overtake));
    const double s = seconds_since(t0);
    c.require(s < 900.0, "runtime " + fmt("%.0f s", s));
}

void ensemble(Check& c) {
    const auto t0 = Clock::now();
    for (FigureOfMerit kind : {FigureOfMerit::arrival, FigureOfMerit::loss, FigureOfMerit::steady}) {
        double previous = -1.0;
        bool increasing = true;
        for (double r : {3.0, 2.0, 1.0}) {
            EnsembleSpec spec;
            spec.radius = r;
            spec.samples = 50;
            spec.kind = kind;
            if (kind == FigureOfMerit::steady) spec.base.gamma_inj = defaults::gamma_inj;
            const EnsembleResult res = run_ensemble(spec);
            const double e = res.group_mean.at(ParameterGroup::energy);
            const double p = res.group_mean.at(ParameterGroup::position);
            c.require(res.accepted() == spec.samples,
                      to_string(kind) + " r=" + fmt("%.0f", r) + " accepted " + std::to_string(res.accepted()) + "/" +
                          std::to_string(res.attempts));
            c.require(e > p, to_string(kind) + " r=" + fmt("%.0f", r) + " E " + fmt("%.3f", e) + "+-" +
                                 fmt("%.3f", res.group_stderr(ParameterGroup::energy)) + " > P " + fmt("%.3f", p) +
                                 "+-" + fmt("%.3f", res.group_stderr(ParameterGroup::position)));
            if (!(p > previous)) increasing = false;
            previous = p;
        }
        c.require(increasing, to_string(kind) + " position mean increases as r decreases");
    }
    const double s = seconds_since(t0);
    c.require(s < 2700.0, "runtime " + fmt("%.0f s", s));
}

void steady_suite(Check& c) {
    NetworkConfig cfg = square_network(1.0);
    cfg.gamma_inj = defaults::gamma_inj;
    const Generator gen = build_generator(cfg, Mode::steady);
    const SteadyState ss = steady_state(gen);
    c.require(ss.residual < 1e-10, "residual " + fmt("%.2e", ss.residual));
    double decay = 0.0;
    for (std::size_t i = 1; i <= cfg.size(); ++i)
        decay += ss.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() * gen.rates.decay[i - 1];
    const auto sink = static_cast<Eigen::Index>(cfg.sink());
    const double balance =
        cfg.gamma_inj * ss.rho(0, 0).real() - cfg.gamma_trap * ss.rho(sink, sink).real() - decay;
    c.require(std::abs(balance) <= 1e-10, "flux imbalance " + fmt("%.2e", balance));
    const FimResult r = scalar_sensitivity(cfg);
    const double grad2 = r.gradient.squaredNorm();
    c.require(r.diagnostics.null_directions == 19, "rank " + std::to_string(20 - r.diagnostics.null_directions));
    c.require(std::abs(r.eigenvalues(0) - grad2) <= 1e-10 * grad2,
              "lambda_max - |grad I|^2 relative " + fmt("%.1e", std::abs(r.eigenvalues(0) - grad2) / grad2));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"exnet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

void determinism(Check& c) {
    const fs::path root = fs::temp_directory_path() / "exnet_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> runs{
        {"simulate", "--preset", "square"},
        {"fim", "--preset", "irregular"},
        {"steady", "--preset", "square"},
        {"sweep", "--mode", "spacing", "--values", "2,1"},
        {"ensemble", "--radius", "1", "--samples", "3", "--seed", "11", "--kind", "loss"},
    };
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::size_t files = 0, same = 0;
        for (const char* rep : {"a", "b"}) {
            auto args = runs[i];
            args.push_back("-o");
            args.push_back((root / (std::to_string(i) + rep)).string());
            c.require(run_cli(args) == 0, runs[i][0] + " exit 0");
        }
        for (const auto& e : fs::directory_iterator(root / (std::to_string(i) + "a"))) {
            ++files;
            if (slurp(e.path()) == slurp(root / (std::to_string(i) + "b") / e.path().filename())) ++same;
        }
        c.require(files > 1 && same == files, runs[i][0] + " " + std::to_string(same) + "/" + std::to_string(files) +
                                                   " files identical");
    }
    fs::remove_all(root);
}

} // namespace

int main() {
    criterion("conservation", conservation);
    criterion("unitary-oracle", unitary);
    criterion("pure-dephasing", pure_dephasing);
    criterion("detailed-balance", detailed_balance);
    criterion("fim-structure", fim_structure);
    criterion("sloppiness", sloppiness);
    criterion("importance-orderings", importance_orderings);
    criterion("crossover", crossover);
    criterion("steady-state", steady_suite);
    criterion("determinism", determinism);
    criterion("ensemble", ensemble);
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
