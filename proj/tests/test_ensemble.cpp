#include <cmath>
#include <concepts>
#include <random>

#include <gtest/gtest.h>

#include "exnet/ensemble.hpp"
#include "exnet/rng.hpp"
#include "exnet/sweep.hpp"

using namespace exnet;

static_assert(std::uniform_random_bit_generator<CounterRng>);

TEST(CounterRng, ReproducibleAndIndependentStreams) {
    CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        differs_c |= x != c();
        differs_d |= x != d();
    }
    EXPECT_TRUE(differs_c);
    EXPECT_TRUE(differs_d);
    EXPECT_EQ(a.counter(), 100u);
}

TEST(CounterRng, UniformMoments) {
    CounterRng rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = u(rng);
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.5, 3e-3);
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

TEST(RandomGeometry, TwoSitesSitAtThePoles) {
    EnsembleSpec spec;
    spec.sites = 2;
    spec.base = default_network(2);
    spec.radius = 1.7;
    CounterRng rng(5);
    const auto pos = random_geometry(spec, rng);
    ASSERT_EQ(pos.size(), 2u);
    EXPECT_EQ(pos[0].norm(), 0.0);
    EXPECT_NEAR((pos[1] - Vec3(3.4, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(RandomGeometry, MinimumSpacingHolds) {
    EnsembleSpec spec;
    spec.radius = 1.0;
    spec.sites = 6;
    spec.base = default_network(6);
    for (std::uint64_t s = 0; s < 200; ++s) {
        CounterRng rng(9, s);
        const auto pos = random_geometry(spec, rng);
        EXPECT_EQ(pos[0].norm(), 0.0);
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = i + 1; j < pos.size(); ++j) EXPECT_GE((pos[i] - pos[j]).norm(), 0.5);
    }
}

// Uniform in a ball of radius r: E|x| = 3r/4.
TEST(RandomGeometry, IntermediateSitesAreUniformInTheBall) {
    EnsembleSpec spec;
    spec.radius = 3.0;
    spec.sites = 3;
    spec.base = default_network(3);
    spec.min_spacing = 0.0;
    const int n = 10000;
    double mean = 0.0;
    for (int s = 0; s < n; ++s) {
        CounterRng rng(11, static_cast<std::uint64_t>(s));
        const auto pos = random_geometry(spec, rng);
        const Vec3 centre(spec.radius, 0, 0); // after moving the source to the origin
        const double d = (pos[1] - centre).norm();
        EXPECT_LE(d, spec.radius + 1e-12);
        mean += d;
    }
    mean /= n;
    EXPECT_NEAR(mean / (0.75 * spec.radius), 1.0, 0.02);
}

TEST(RandomGeometry, InfeasibleSpecThrows) {
    EnsembleSpec spec;
    spec.radius = 0.3;
    spec.sites = 5;
    spec.base = default_network(5);
    CounterRng rng(1);
    EXPECT_THROW(random_geometry(spec, rng), ConfigError);
}

TEST(EnsembleSpec, Validation) {
    EnsembleSpec spec;
    spec.base = default_network(4);
    spec.radius = 0.2;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.radius = 2.0;
    spec.samples = 0;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.samples = 1;
    spec.kind = FigureOfMerit::steady;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.base.gamma_inj = 1e-4;
    EXPECT_NO_THROW(spec.validate());
}

TEST(Disorder, ZeroFractionIsIdentity) {
    const NetworkConfig cfg = irregular_network();
    CounterRng rng(3);
    const NetworkConfig out = apply_disorder(cfg, 0.0, rng);
    EXPECT_EQ(to_json(out), to_json(cfg));
    EXPECT_THROW(apply_disorder(cfg, -0.1, rng), ConfigError);
}

TEST(Disorder, GaussianMomentsOfSiteEnergy) {
    const NetworkConfig cfg = irregular_network();
    CounterRng rng(17);
    const int n = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const NetworkConfig out = apply_disorder(cfg, 0.1, rng);
        const double e = out.sites[0].energy;
        s += e;
        s2 += e * e;
    }
    const double mean = s / n;
    const double sd = std::sqrt(s2 / n - mean * mean);
    EXPECT_NEAR(mean, 2.0, 0.01);
    EXPECT_NEAR(sd, 0.2, 0.004);
}

TEST(Disorder, LargeFractionStaysPositiveAndLeavesPositionsAlone) {
    const NetworkConfig cfg = irregular_network();
    CounterRng rng(23);
    for (int i = 0; i < 2000; ++i) {
        const NetworkConfig out = apply_disorder(cfg, 2.0, rng);
        for (std::size_t k = 0; k < cfg.size(); ++k) {
            EXPECT_GT(out.sites[k].energy, 0.0);
            EXPECT_GT(out.sites[k].lifetime, 0.0);
            EXPECT_EQ(out.sites[k].position.r, cfg.sites[k].position.r);
            EXPECT_EQ(out.sites[k].position.theta, cfg.sites[k].position.theta);
        }
        EXPECT_GT(out.gamma_trap, 0.0);
        EXPECT_GT(out.lambda_ph, 0.0);
        EXPECT_GT(out.T_ph, 0.0);
        EXPECT_EQ(out.J, cfg.J);
    }
}

TEST(Ensemble, SmallRunIsDeterministicAndConsistent) {
    EnsembleSpec spec;
    spec.radius = 1.0;
    spec.samples = 3;
    spec.seed = 2024;
    const EnsembleResult a = run_ensemble(spec);
    const EnsembleResult b = run_ensemble(spec);
    ASSERT_EQ(a.accepted(), 3u);
    EXPECT_EQ(a.sample_index, b.sample_index);
    for (std::size_t s = 0; s < a.accepted(); ++s) EXPECT_EQ(a.profiles[s], b.profiles[s]);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.attempts, a.accepted() + a.rejected + a.failed);
    EXPECT_NEAR(a.mean.sum(), 1.0, 1e-9);
    EXPECT_GE(a.variance.minCoeff(), 0.0);
    for (double t : a.completion_times_ns) EXPECT_LT(t, spec.completion_filter_ns);
    double groups = 0.0;
    for (const auto& [g, m] : a.group_mean) groups += m;
    EXPECT_NEAR(groups, 1.0, 1e-9);
    EXPECT_GT(a.mean_nn_coupling, 0.0);
}

TEST(Ensemble, SampleDrawDependsOnlyOnSeedAndIndex) {
    EnsembleSpec spec;
    spec.radius = 2.0;
    const EnsembleSample a = draw_sample(spec, 7);
    spec.samples = 999; // unrelated knobs do not shift the streams
    const EnsembleSample b = draw_sample(spec, 7);
    EXPECT_EQ(to_json(a.config), to_json(b.config));
    spec.seed = 2;
    EXPECT_NE(to_json(draw_sample(spec, 7).config), to_json(a.config));
}

TEST(Sweep, ChainGeometryModes) {
    ChainSweepSpec spec;
    spec.mode = ChainMode::fixed_span;
    spec.distance = 6.0;
    const NetworkConfig c = chain_for(spec, 4);
    EXPECT_EQ(c.size(), 4u);
    EXPECT_NEAR(c.sites[3].position.r, 6.0, 1e-14);
    spec.mode = ChainMode::fixed_nn;
    spec.distance = 1.5;
    const NetworkConfig d = chain_for(spec, 5);
    EXPECT_NEAR(d.sites[4].position.r, 6.0, 1e-14);
    EXPECT_THROW(chain_for(spec, 2.5), ConfigError);
    EXPECT_EQ(chain_mode_from_string("fixed_span"), ChainMode::fixed_span);
    EXPECT_THROW(chain_mode_from_string("radial"), ConfigError);
}

TEST(Sweep, SpacingSweepReportsGroupsAndCoupling) {
    ChainSweepSpec spec;
    spec.values = {2.0, 1.0};
    const SweepResult r = sweep_chain(spec);
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_NEAR(r.points[0].nn.mean, 0.01, 1e-15);
    EXPECT_NEAR(r.points[1].nn.mean, 0.08, 1e-15);
    for (const auto& p : r.points) {
        double total = 0.0;
        for (const auto& [g, gi] : p.groups) total += gi.total;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Sweep, ZeroPhononCouplingPointHasNullEnvironmentRows) {
    const SweepResult r = sweep_lambda(irregular_network(), {0.0, 1e-2}, FigureOfMerit::arrival);
    ASSERT_EQ(r.points.size(), 2u);
    const auto& g = r.points[0].result.g;
    EXPECT_EQ(g.row(18).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.row(19).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(r.points[1].result.g.row(18).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sweep, CosineSimilarity) {
    Eigen::VectorXd a(3), b(3);
    a << 1, 0, 0;
    b << 1, 1, 0;
    EXPECT_NEAR(cosine_similarity(a, b), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(cosine_similarity(a, Eigen::VectorXd::Zero(3)), NumericError);
}

TEST(Sweep, PresetGeometriesAreValid) {
    const auto geos = preset_geometries();
    ASSERT_EQ(geos.size(), 3u);
    for (const auto& g : geos) {
        EXPECT_NO_THROW(g.config.validate()) << g.name;
        EXPECT_EQ(g.config.size(), 4u);
    }
}
