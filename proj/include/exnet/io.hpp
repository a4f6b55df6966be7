// io.hpp: CSV tables and JSON sidecars for every run product
//
// Numbers are written with 17 significant digits so tables round-trip and
// reruns are byte-identical. Missing values are written as "nan".

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "exnet/config.hpp"
#include "exnet/distributions.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/ensemble.hpp"
#include "exnet/errors.hpp"
#include "exnet/fim.hpp"
#include "exnet/steady_state.hpp"
#include "exnet/sweep.hpp"

namespace exnet {

using nlohmann::json;

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
    }

    void header(const std::vector<std::string>& cols) { row(cols); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

inline json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

// ---------------------------------------------------------------- trajectories

// time_ns, site_1..site_N, ground, trap, f_arrival, f_loss
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr,
                                 const std::optional<ArrivalDistribution>& arrival,
                                 const std::optional<ArrivalDistribution>& loss) {
    CsvWriter w(path);
    const std::size_t n = tr.index.sites;
    std::vector<std::string> head{"time_ns"};
    for (std::size_t i = 1; i <= n; ++i) head.push_back("site_" + std::to_string(i));
    head.insert(head.end(), {"ground", "trap", "f_arrival", "f_loss"});
    w.header(head);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        std::vector<std::string> r{format_number(tr.times_ns[k])};
        for (std::size_t i = 1; i <= n; ++i) r.push_back(format_number(tr.site(k, i)));
        r.push_back(format_number(tr.ground(k)));
        r.push_back(format_number(tr.trap(k)));
        r.push_back(format_number(arrival ? arrival->f[k] : nan));
        r.push_back(format_number(loss ? loss->f[k] : nan));
        w.row(r);
    }
}

inline json trajectory_summary_json(const Trajectory& tr, const std::optional<ArrivalDistribution>& arrival,
                                    const std::optional<ArrivalDistribution>& loss) {
    json j;
    j["points"] = tr.size();
    j["dt_ns"] = tr.grid.dt_ns;
    j["completed"] = tr.completed;
    j["completion_time_ns"] = tr.completed ? json(tr.completion_time_ns) : json(nullptr);
    j["P_max"] = tr.final_trap;
    j["P_loss"] = tr.final_ground;
    j["max_trace_error"] = tr.max_trace_error;
    j["min_eigenvalue"] = tr.min_eigenvalue;
    j["positivity_breaches"] = tr.positivity_breaches;
    auto moments = [](const ArrivalDistribution& d) {
        const Moments m = arrival_moments(d);
        return json{{"integral", trapezoid(d.times_ns, d.f)}, {"mean_ns", m.mean}, {"variance_ns2", m.variance}};
    };
    j["arrival"] = arrival ? moments(*arrival) : json(nullptr);
    j["loss"] = loss ? moments(*loss) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------- FIM

inline json fim_json(const FimResult& r) {
    const auto& d = r.diagnostics;
    const SloppinessMetrics s = sloppiness_metrics(r);
    json diag{{"step", d.step},
              {"noise_floor", d.noise_floor},
              {"cut_points", d.cut_points},
              {"cut_mass", d.cut_mass},
              {"dt_ns", d.dt_ns},
              {"grid_points", d.grid_points},
              {"completion_time_ns", d.completion_time_ns},
              {"distribution_total", d.distribution_total},
              {"symmetry_error", d.symmetry_error},
              {"null_threshold", d.null_threshold},
              {"null_directions", d.null_directions},
              {"condition", d.condition}};
    json j{{"kind", to_string(r.kind)},
           {"labels", r.labels},
           {"g", matrix_json(r.g)},
           {"eigenvalues", vector_json(r.eigenvalues)},
           {"eigenvectors", matrix_json(r.eigenvectors)},
           {"importance", vector_json(r.importance)},
           {"decade_span", s.decade_span},
           {"nonzero_eigenvalues", s.nonzero},
           {"diagnostics", diag}};
    if (r.gradient.size() > 0) j["gradient"] = vector_json(r.gradient);
    return j;
}

// fim.json, fim_matrix.csv (label + one column per label),
// spectrum.csv (index, eigenvalue, then eigenvector components by label),
// importance.csv (label, group, importance)
inline std::vector<std::string> write_fim(const std::filesystem::path& dir, const FimResult& r) {
    write_json(dir / "fim.json", fim_json(r));
    {
        CsvWriter w(dir / "fim_matrix.csv");
        std::vector<std::string> head{"label"};
        head.insert(head.end(), r.labels.begin(), r.labels.end());
        w.header(head);
        for (Eigen::Index i = 0; i < r.g.rows(); ++i) {
            std::vector<std::string> row{r.labels[static_cast<std::size_t>(i)]};
            for (Eigen::Index j = 0; j < r.g.cols(); ++j) row.push_back(format_number(r.g(i, j)));
            w.row(row);
        }
    }
    {
        CsvWriter w(dir / "spectrum.csv");
        std::vector<std::string> head{"index", "eigenvalue"};
        head.insert(head.end(), r.labels.begin(), r.labels.end());
        w.header(head);
        for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
            std::vector<std::string> row{std::to_string(i + 1), format_number(r.eigenvalues(i))};
            for (Eigen::Index k = 0; k < r.eigenvectors.rows(); ++k) row.push_back(format_number(r.eigenvectors(k, i)));
            w.row(row);
        }
    }
    {
        CsvWriter w(dir / "importance.csv");
        w.header({"label", "group", "importance"});
        for (std::size_t mu = 0; mu < r.params.size(); ++mu)
            w.row({r.labels[mu], to_string(r.params[mu].group()),
                   format_number(r.importance(static_cast<Eigen::Index>(mu)))});
    }
    return {"fim.json", "fim_matrix.csv", "spectrum.csv", "importance.csv"};
}

// ---------------------------------------------------------------- steady state

inline json steady_json(const SteadyState& ss, const Generator& gen) {
    std::vector<double> pops;
    for (std::size_t i = 0; i < gen.dim(); ++i) pops.push_back(ss.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    return json{{"current", ss.current},
                {"current_per_ns", ss.current_per_ns},
                {"residual", ss.residual},
                {"populations", pops},
                {"population_labels", [&] {
                     std::vector<std::string> l{"ground"};
                     for (std::size_t i = 1; i <= gen.index.sites; ++i) l.push_back("site_" + std::to_string(i));
                     l.push_back("trap");
                     return l;
                 }()}};
}

// ---------------------------------------------------------------- sweeps

inline constexpr std::size_t kTopEigenvalues = 5;

// x, nn_mean_eV, nn_max_eV, <group>_total/_min/_max per group, lambda_1..lambda_5
inline void write_sweep_csv(const std::filesystem::path& path, const SweepResult& res) {
    CsvWriter w(path);
    std::vector<std::string> head{res.variable, "nn_mean", "nn_max"};
    for (const ParameterGroup g : kAllGroups)
        for (const char* s : {"_total", "_min", "_max"}) head.push_back(to_string(g) + s);
    for (std::size_t i = 1; i <= kTopEigenvalues; ++i) head.push_back("lambda_" + std::to_string(i));
    w.header(head);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : res.points) {
        std::vector<std::string> row{format_number(p.x), format_number(p.nn.mean), format_number(p.nn.max)};
        for (const ParameterGroup g : kAllGroups) {
            const auto it = p.groups.find(g);
            const bool has = it != p.groups.end();
            row.push_back(format_number(has ? it->second.total : 0.0));
            row.push_back(format_number(has ? it->second.min : nan));
            row.push_back(format_number(has ? it->second.max : nan));
        }
        for (std::size_t i = 0; i < kTopEigenvalues; ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            row.push_back(format_number(k < p.result.eigenvalues.size() ? p.result.eigenvalues(k) : nan));
        }
        w.row(row);
    }
}

// x, label, group, importance (long form, one row per parameter per point)
inline void write_sweep_profiles_csv(const std::filesystem::path& path, const SweepResult& res) {
    CsvWriter w(path);
    w.header({res.variable, "label", "group", "importance"});
    for (const auto& p : res.points)
        for (std::size_t mu = 0; mu < p.result.params.size(); ++mu)
            w.row({format_number(p.x), p.result.labels[mu], to_string(p.result.params[mu].group()),
                   format_number(p.result.importance(static_cast<Eigen::Index>(mu)))});
}

// geometry, spectrum, lambda_ph, label, group, importance
inline void write_preset_csv(const std::filesystem::path& path, const std::vector<PresetPanel>& panels) {
    CsvWriter w(path);
    w.header({"geometry", "spectrum", "lambda_ph", "label", "group", "importance"});
    for (const auto& p : panels)
        for (std::size_t mu = 0; mu < p.result.params.size(); ++mu)
            w.row({p.geometry, to_string(p.spectral_kind), format_number(p.lambda_ph), p.result.labels[mu],
                   to_string(p.result.params[mu].group()),
                   format_number(p.result.importance(static_cast<Eigen::Index>(mu)))});
}

// ---------------------------------------------------------------- ensembles

inline json ensemble_spec_json(const EnsembleSpec& s) {
    return json{{"radius_nm", s.radius},
                {"N", s.sites},
                {"samples", s.samples},
                {"seed", s.seed},
                {"rng", "splitmix64-counter"},
                {"disorder", s.disorder},
                {"min_spacing_nm", s.min_spacing},
                {"completion_filter_ns", s.completion_filter_ns},
                {"kind", to_string(s.kind)},
                {"max_attempts_factor", s.max_attempts_factor},
                {"base", to_json(s.base)}};
}

// ensemble.csv: label, group, mean, variance
// ensemble_groups.csv: group, mean, variance, stderr
// samples.csv: sample, completion_time_ns, nn_coupling, then one column per label
// ensemble.json: full spec, counts, failures
inline std::vector<std::string> write_ensemble(const std::filesystem::path& dir, const EnsembleResult& res) {
    const ParameterVector params = default_parameters(res.spec.sites);
    {
        CsvWriter w(dir / "ensemble.csv");
        w.header({"label", "group", "mean", "variance"});
        for (std::size_t mu = 0; mu < params.size(); ++mu) {
            const auto k = static_cast<Eigen::Index>(mu);
            w.row({res.labels[mu], to_string(params[mu].group()), format_number(res.mean(k)),
                   format_number(res.variance(k))});
        }
    }
    {
        CsvWriter w(dir / "ensemble_groups.csv");
        w.header({"group", "mean", "variance", "stderr"});
        for (const ParameterGroup g : kAllGroups) {
            const auto m = res.group_mean.find(g);
            const auto v = res.group_variance.find(g);
            w.row({to_string(g), format_number(m == res.group_mean.end() ? 0.0 : m->second),
                   format_number(v == res.group_variance.end() ? 0.0 : v->second), format_number(res.group_stderr(g))});
        }
    }
    {
        CsvWriter w(dir / "samples.csv");
        std::vector<std::string> head{"sample", "completion_time_ns", "nn_coupling"};
        head.insert(head.end(), res.labels.begin(), res.labels.end());
        w.header(head);
        for (std::size_t s = 0; s < res.accepted(); ++s) {
            std::vector<std::string> row{std::to_string(res.sample_index[s]), format_number(res.completion_times_ns[s]),
                                         format_number(res.nn_coupling[s])};
            for (Eigen::Index k = 0; k < res.profiles[s].size(); ++k) row.push_back(format_number(res.profiles[s](k)));
            w.row(row);
        }
    }
    json j{{"spec", ensemble_spec_json(res.spec)},
           {"accepted", res.accepted()},
           {"attempts", res.attempts},
           {"rejected", res.rejected},
           {"failed", res.failed},
           {"failures", res.failures},
           {"mean_nn_coupling", res.mean_nn_coupling},
           {"mean_nn_coupling_all", res.mean_nn_coupling_all}};
    write_json(dir / "ensemble.json", j);
    return {"ensemble.csv", "ensemble_groups.csv", "samples.csv", "ensemble.json"};
}

} // namespace exnet
