// cli.hpp: command-line front end (simulate | fim | sweep | ensemble | steady)
//
// Kept in a header so tests can drive it in-process. Every run writes
// manifest.json echoing the resolved config and options; nothing time- or
// host-dependent goes into the outputs.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exnet/config.hpp"
#include "exnet/distributions.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/ensemble.hpp"
#include "exnet/errors.hpp"
#include "exnet/fim.hpp"
#include "exnet/generator.hpp"
#include "exnet/io.hpp"
#include "exnet/steady_state.hpp"
#include "exnet/sweep.hpp"

namespace exnet::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { ok = 0, config_error = 2, numeric_error = 3 };

// ---------------------------------------------------------------- overrides

// key=value with a dotted path into the config JSON. Site indices are
// 1-based and "*" addresses every site: sites.2.energy=2.1,
// sites.*.position.theta=0.5. The addressed key must already exist.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        value = text; // bare strings such as J1 or meV
    }

    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string k; std::getline(ss, k, '.');) keys.push_back(k);

    std::vector<nlohmann::json*> nodes{&j};
    for (std::size_t depth = 0; depth < keys.size(); ++depth) {
        const std::string& key = keys[depth];
        const bool last = depth + 1 == keys.size();
        std::vector<nlohmann::json*> next;
        for (nlohmann::json* node : nodes) {
            if (node->is_array()) {
                if (key == "*") {
                    for (auto& e : *node) next.push_back(&e);
                    continue;
                }
                std::size_t idx = 0;
                try {
                    std::size_t used = 0;
                    idx = std::stoul(key, &used);
                    if (used != key.size()) throw std::invalid_argument(key);
                } catch (const std::exception&) {
                    throw ConfigError("override '" + path + "': '" + key + "' is not a site index");
                }
                if (idx < 1 || idx > node->size())
                    throw ConfigError("override '" + path + "': site index " + key + " out of range");
                next.push_back(&(*node)[idx - 1]);
            } else if (node->is_object()) {
                if (!node->contains(key)) throw ConfigError("override '" + path + "': unknown key '" + key + "'");
                next.push_back(&(*node)[key]);
            } else {
                throw ConfigError("override '" + path + "': '" + key + "' addresses inside a scalar");
            }
        }
        nodes = std::move(next);
        if (last)
            for (nlohmann::json* n : nodes) {
                if (n->is_structured()) throw ConfigError("override '" + path + "' must address a scalar");
                *n = value;
            }
    }
}

// ---------------------------------------------------------------- options

struct Options {
    std::string subcommand;
    std::string config_path;
    std::string preset{"chain"};
    std::size_t sites{4};
    double spacing{3.0};
    double side{1.0};
    std::string out{"out"};
    std::vector<std::string> overrides;
    std::uint64_t seed{1};
    std::string kind{"arrival"};
    std::string spectrum; // empty: keep the config's

    // time evolution / FIM
    double t_max_ns{50.0};
    double completion_tolerance{1e-4};
    double step{1e-4};
    double noise_floor{1e-8};

    // sweep
    std::string mode{"spacing"};
    std::vector<double> values;
    double distance{1.0};

    // ensemble
    double radius{2.0};
    std::size_t samples{50};
    double disorder{0.1};
    double min_spacing{0.5};
    double filter_ns{1.0};
    std::size_t max_attempts_factor{100};
};

inline NetworkConfig preset_config(const Options& o) {
    if (o.preset == "chain") return chain_network(o.sites, o.spacing);
    if (o.preset == "square") return square_network(o.side);
    if (o.preset == "irregular") return irregular_network();
    throw ConfigError("unknown preset '" + o.preset + "' (expected chain, square or irregular)");
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline NetworkConfig resolve_config(const Options& o) {
    nlohmann::json j = o.config_path.empty() ? to_json(preset_config(o)) : read_json_file(o.config_path);
    for (const auto& s : o.overrides) apply_override(j, s);
    if (!o.spectrum.empty()) j["spectral_kind"] = o.spectrum;
    NetworkConfig cfg = network_from_json(j);
    // the steady current needs an injection channel; fall back to the default rate
    if ((o.kind == "steady" || o.subcommand == "steady") && !(cfg.gamma_inj > 0.0)) {
        cfg.gamma_inj = defaults::gamma_inj * cfg.units.energy_scale;
        cfg.validate();
    }
    return cfg;
}

inline FimOptions fim_options(const Options& o) {
    FimOptions f;
    f.step = o.step;
    f.noise_floor = o.noise_floor;
    f.evolve.t_max_ns = o.t_max_ns;
    f.evolve.completion_tolerance = o.completion_tolerance;
    return f;
}

inline nlohmann::json options_json(const Options& o) {
    nlohmann::json j{{"kind", o.kind},
                     {"t_max_ns", o.t_max_ns},
                     {"completion_tolerance", o.completion_tolerance},
                     {"step", o.step},
                     {"noise_floor", o.noise_floor}};
    if (o.subcommand == "sweep") {
        j["mode"] = o.mode;
        j["values"] = o.values;
        j["distance"] = o.distance;
        j["sites"] = o.sites;
    }
    if (o.subcommand == "ensemble") {
        j["radius"] = o.radius;
        j["sites"] = o.sites;
        j["samples"] = o.samples;
        j["disorder"] = o.disorder;
        j["min_spacing"] = o.min_spacing;
        j["filter_ns"] = o.filter_ns;
        j["max_attempts_factor"] = o.max_attempts_factor;
    }
    return j;
}

// ---------------------------------------------------------------- subcommands

namespace detail {

inline std::vector<std::string> cmd_simulate(const Options& o, const NetworkConfig& cfg,
                                             const std::filesystem::path& dir) {
    const Generator gen = build_generator(cfg, Mode::transient);
    EvolveOptions eo;
    eo.t_max_ns = o.t_max_ns;
    eo.completion_tolerance = o.completion_tolerance;
    const Trajectory tr = evolve(gen, default_initial_state(gen), eo);

    std::optional<ArrivalDistribution> arrival, loss;
    try {
        arrival = arrival_time_distribution(tr, gen);
    } catch (const NumericError& e) {
        std::cerr << "exnet: arrival distribution unavailable: " << e.what() << '\n';
    }
    try {
        loss = loss_time_distribution(tr, cfg);
    } catch (const NumericError& e) {
        std::cerr << "exnet: loss distribution unavailable: " << e.what() << '\n';
    }
    write_trajectory_csv(dir / "trajectory.csv", tr, arrival, loss);
    write_json(dir / "summary.json", trajectory_summary_json(tr, arrival, loss));
    if (!tr.completed) std::cerr << "exnet: transport not complete within t_max\n";
    return {"trajectory.csv", "summary.json"};
}

inline std::vector<std::string> cmd_fim(const Options& o, const NetworkConfig& cfg, const std::filesystem::path& dir) {
    return write_fim(dir, sensitivity(cfg, figure_of_merit_from_string(o.kind), fim_options(o)));
}

inline std::vector<std::string> cmd_steady(const NetworkConfig& cfg, const std::filesystem::path& dir) {
    if (!(cfg.gamma_inj > 0.0)) throw ConfigError("steady runs need Gamma_inj > 0");
    const Generator gen = build_generator(cfg, Mode::steady);
    write_json(dir / "steady.json", steady_json(steady_state(gen), gen));
    return {"steady.json"};
}

inline std::vector<std::string> cmd_sweep(const Options& o, const NetworkConfig& cfg, const std::filesystem::path& dir) {
    const FigureOfMerit kind = figure_of_merit_from_string(o.kind);
    const FimOptions fo = fim_options(o);
    if (o.mode == "preset") {
        const auto panels = comparison_preset(kind, fo, cfg);
        write_preset_csv(dir / "preset.csv", panels);
        const auto p1 = stacked_profile(panels, SpectralKind::J1);
        nlohmann::json j{{"cosine_J1_J2", cosine_similarity(p1, stacked_profile(panels, SpectralKind::J2))},
                         {"cosine_J1_J3", cosine_similarity(p1, stacked_profile(panels, SpectralKind::J3))},
                         {"lambdas", std::vector<double>(std::begin(kPresetLambdas), std::end(kPresetLambdas))}};
        nlohmann::json geos = nlohmann::json::object();
        for (const auto& g : preset_geometries()) geos[g.name] = to_json(g.config)["sites"];
        j["geometries"] = geos;
        write_json(dir / "preset.json", j);
        return {"preset.csv", "preset.json"};
    }
    if (o.values.empty()) throw ConfigError("sweep needs --values");
    SweepResult res;
    if (o.mode == "lambda") {
        res = sweep_lambda(cfg, o.values, kind, fo);
    } else {
        ChainSweepSpec spec;
        spec.mode = chain_mode_from_string(o.mode);
        spec.values = o.values;
        spec.sites = o.sites;
        spec.distance = o.distance;
        spec.kind = kind;
        spec.environment = cfg;
        res = sweep_chain(spec, fo);
    }
    write_sweep_csv(dir / "sweep.csv", res);
    write_sweep_profiles_csv(dir / "sweep_profiles.csv", res);
    nlohmann::json j{{"variable", res.variable}, {"kind", to_string(res.kind)}, {"mode", o.mode}, {"values", o.values}};
    write_json(dir / "sweep.json", j);
    return {"sweep.csv", "sweep_profiles.csv", "sweep.json"};
}

inline std::vector<std::string> cmd_ensemble(const Options& o, const NetworkConfig& cfg,
                                             const std::filesystem::path& dir) {
    EnsembleSpec spec;
    spec.radius = o.radius;
    spec.sites = o.sites;
    spec.samples = o.samples;
    spec.seed = o.seed;
    spec.disorder = o.disorder;
    spec.min_spacing = o.min_spacing;
    spec.completion_filter_ns = o.filter_ns;
    spec.kind = figure_of_merit_from_string(o.kind);
    spec.max_attempts_factor = o.max_attempts_factor;
    spec.fim = fim_options(o);
    // mean parameter values come from the first site of the resolved config
    NetworkConfig base = with_environment(default_network(o.sites), cfg);
    for (auto& s : base.sites) {
        s.energy = cfg.sites.front().energy;
        s.lifetime = cfg.sites.front().lifetime;
    }
    spec.base = base;
    const EnsembleResult res = run_ensemble(spec);
    for (const auto& f : res.failures) std::cerr << "exnet: " << f << '\n';
    if (res.accepted() < spec.samples)
        std::cerr << "exnet: only " << res.accepted() << " of " << spec.samples << " samples accepted\n";
    return write_ensemble(dir, res);
}

} // namespace detail

inline int run(const Options& o) {
    const NetworkConfig cfg = resolve_config(o);
    const std::filesystem::path dir(o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + o.out + "': " + ec.message());

    std::vector<std::string> outputs;
    if (o.subcommand == "simulate") outputs = detail::cmd_simulate(o, cfg, dir);
    else if (o.subcommand == "fim") outputs = detail::cmd_fim(o, cfg, dir);
    else if (o.subcommand == "steady") outputs = detail::cmd_steady(cfg, dir);
    else if (o.subcommand == "sweep") outputs = detail::cmd_sweep(o, cfg, dir);
    else if (o.subcommand == "ensemble") outputs = detail::cmd_ensemble(o, cfg, dir);
    else throw ConfigError("unknown subcommand '" + o.subcommand + "'");

    outputs.push_back("manifest.json");
    write_json(dir / "manifest.json", {{"tool", "exnet"},
                                       {"version", kVersion},
                                       {"subcommand", o.subcommand},
                                       {"seed", o.seed},
                                       {"config_source", o.config_path.empty() ? "preset:" + o.preset : o.config_path},
                                       {"overrides", o.overrides},
                                       {"config", to_json(cfg)},
                                       {"options", options_json(o)},
                                       {"outputs", outputs}});
    return ExitCode::ok;
}

inline void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config_path, "NetworkConfig JSON file");
    sub->add_option("--preset", o.preset, "built-in geometry when no config is given: chain, square, irregular")
        ->check(CLI::IsMember({"chain", "square", "irregular"}));
    sub->add_option("--sites", o.sites, "site count for the chain preset, sweeps and ensembles");
    sub->add_option("--spacing", o.spacing, "chain preset nearest-neighbour spacing (nm)");
    sub->add_option("--side", o.side, "square preset side length (nm)");
    sub->add_option("-o,--out", o.out, "output directory");
    sub->add_option("--set", o.overrides, "config override key=value (dotted path, 1-based sites, * for all)");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--kind", o.kind, "figure of merit")->check(CLI::IsMember({"arrival", "loss", "steady"}));
    sub->add_option("--spectrum", o.spectrum, "phonon spectrum")->check(CLI::IsMember({"J1", "J2", "J3"}));
    sub->add_option("--t-max", o.t_max_ns, "evolution horizon (ns)");
    sub->add_option("--completion-tol", o.completion_tolerance, "remaining-population completion threshold");
    sub->add_option("--step", o.step, "finite-difference step in log parameters");
    sub->add_option("--noise-floor", o.noise_floor, "FIM quadrature cutoff relative to max f");
}

// Parses argv and runs; returns the process exit code.
inline int main(int argc, const char* const* argv) {
    Options o;
    CLI::App app{"exnet: exciton transport networks, Fisher information and parameter importance"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "time evolution and transport distributions");
    auto* fim = app.add_subcommand("fim", "Fisher information matrix and parameter importance");
    auto* steady = app.add_subcommand("steady", "steady state under continuous injection");
    auto* sweep = app.add_subcommand("sweep", "chain, phonon-coupling and comparison-preset sweeps");
    auto* ensemble = app.add_subcommand("ensemble", "random networks in a sphere with parameter disorder");
    for (auto* s : {simulate, fim, steady, sweep, ensemble}) add_common(s, o);

    sweep->add_option("--mode", o.mode, "spacing | fixed_nn | fixed_span | lambda | preset")
        ->check(CLI::IsMember({"spacing", "fixed_nn", "fixed_span", "lambda", "preset"}));
    sweep->add_option("--values", o.values, "sweep values (spacings, site counts or couplings)")->delimiter(',');
    sweep->add_option("--distance", o.distance, "fixed NN spacing or source-sink distance (nm)");

    ensemble->add_option("--radius", o.radius, "sphere radius (nm)");
    ensemble->add_option("--samples", o.samples, "accepted samples to collect");
    ensemble->add_option("--disorder", o.disorder, "relative disorder on non-positional parameters");
    ensemble->add_option("--min-spacing", o.min_spacing, "minimum pairwise site distance (nm)");
    ensemble->add_option("--filter", o.filter_ns, "reject networks whose completion time reaches this (ns)");
    ensemble->add_option("--max-attempts-factor", o.max_attempts_factor, "draw budget per requested sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ExitCode::config_error;
    }
    for (auto* s : app.get_subcommands()) o.subcommand = s->get_name();

    try {
        return run(o);
    } catch (const ConfigError& e) {
        std::cerr << "exnet: config error: " << e.what() << '\n';
        return ExitCode::config_error;
    } catch (const NumericError& e) {
        std::cerr << "exnet: numeric error: " << e.what() << '\n';
        return ExitCode::numeric_error;
    }
}

} // namespace exnet::cli
