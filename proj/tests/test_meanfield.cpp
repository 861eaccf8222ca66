#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "fcarpet/core.hpp"
#include "fcarpet/idealgas.hpp"
#include "fcarpet/meanfield.hpp"

using namespace fcarpet;
using units::pi;

namespace {

Matrix<double> real_part(const Matrix<cplx>& m) {
    Matrix<double> r(m.rows(), m.cols());
    for (std::size_t a = 0; a < m.rows(); ++a)
        for (std::size_t j = 0; j < m.cols(); ++j) r(a, j) = m(a, j).real();
    return r;
}

double max_abs_diff(const Matrix<cplx>& a, const Matrix<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace

TEST(Init, SeparatedHalves) {
    SpaceGrid g(400);
    const auto s = init_separated(20, g);
    EXPECT_EQ(s.per_component(), 10);
    EXPECT_NEAR(total_norm(s), 20.0, 1e-12);
    EXPECT_EQ(density_overlap(s), 0.0);
    for (int a = 0; a < 10; ++a)
        for (int b = 0; b < 10; ++b)
            EXPECT_NEAR(std::abs(inner_product(s.plus.row(a), s.plus.row(b), g)), a == b ? 1.0 : 0.0, 1e-12);
}

TEST(Init, KineticEnergyOfHalfBoxes) {
    // Orbitals have a kink at x = L/2, so the spectral energy converges as O(dx).
    SpaceGrid g(8000);
    const int N = 20;
    const auto s = init_separated(N, g);
    double exact = 0;
    for (int n = 1; n <= N / 2; ++n) exact += 2 * n * n * pi * pi * 2;  // two halves of width L/2
    EXPECT_NEAR(total_energy(s) / exact, 1.0, 1e-4);
}

TEST(Init, RejectsInvalidCounts) {
    SpaceGrid g(400);
    EXPECT_THROW(init_separated(21, g), DomainError);
    EXPECT_THROW(init_separated(0, g), DomainError);
    EXPECT_THROW(init_separated(102, g), DomainError);
    EXPECT_THROW(init_separated(4, SpaceGrid(401)), DomainError);
}

TEST(Propagator, NormIsConserved) {
    SpaceGrid g(256);
    auto s = init_separated(10, g, 50.0);
    Propagator p(g, 1e-5);
    for (int i = 0; i < 2000; ++i) p.step(s);
    EXPECT_NEAR(total_norm(s), 10.0, 1e-11);
    EXPECT_NEAR(s.t, 2000 * 1e-5, 1e-15);
}

TEST(Propagator, TimeReversible) {
    SpaceGrid g(256);
    const auto s0 = init_separated(10, g, 30.0);
    auto s = s0;
    Propagator fwd(g, 1e-5), bwd(g, -1e-5);
    for (int i = 0; i < 500; ++i) fwd.step(s);
    for (int i = 0; i < 500; ++i) bwd.step(s);
    EXPECT_LT(max_abs_diff(s.plus, s0.plus), 1e-12);
    EXPECT_LT(max_abs_diff(s.minus, s0.minus), 1e-12);
}

TEST(Propagator, NonInteractingMatchesIdealGas) {
    SpaceGrid g(400);
    auto s = init_separated(10, g, 0.0);
    const auto ideal_plus = overlaps_numeric(real_part(s.plus), g, g.n_points() - 1);
    const auto ideal_minus = overlaps_numeric(real_part(s.minus), g, g.n_points() - 1);
    RunOptions opt;
    opt.dt = 1e-4;
    opt.t_end = 0.05;
    opt.sample_every = 50;
    const auto r = run(s, opt);
    for (std::size_t i = 0; i < r.plus.times.size(); ++i) {
        const auto np = evolve_density(ideal_plus, r.plus.times[i], g);
        const auto nm = evolve_density(ideal_minus, r.minus.times[i], g);
        for (std::size_t j = 0; j < np.size(); ++j) {
            ASSERT_NEAR(r.plus.density(i, j), np[j], 1e-6) << i << ' ' << j;
            ASSERT_NEAR(r.minus.density(i, j), nm[j], 1e-6) << i << ' ' << j;
        }
    }
}

TEST(Propagator, ExchangeSymmetry) {
    SpaceGrid g(256);
    auto s = init_separated(8, g, 40.0);
    Propagator p(g, 2e-5);
    for (int i = 0; i < 1000; ++i) p.step(s);
    const auto np = component_density(s.plus);
    const auto nm = component_density(s.minus);
    for (std::size_t j = 0; j < np.size(); ++j) EXPECT_NEAR(np[j], nm[np.size() - 1 - j], 1e-11);
}

TEST(Propagator, CflWarning) {
    SpaceGrid g(400);
    EXPECT_FALSE(Propagator(g, 1e-6).warnings().empty());
    EXPECT_TRUE(Propagator(g, 1e-7).warnings().empty());
}

TEST(Propagator, DivergenceReportsLastStableTime) {
    SpaceGrid g(64);
    auto s = init_separated(4, g, 1.0);
    s.plus(0, 10) = {std::numeric_limits<double>::infinity(), 0.0};
    Propagator p(g, 1e-4);
    p.reset_clock(0.25);
    p.set_divergence_rollback(true);
    try {
        p.step(s);
        FAIL() << "expected PropagationDiverged";
    } catch (const PropagationDiverged& e) {
        EXPECT_EQ(e.last_stable_time(), 0.25);
        EXPECT_TRUE(std::isinf(s.plus(0, 10).real()));
    }
}

TEST(Run, EnergyConservedAndLogged) {
    SpaceGrid g(256);
    auto s = init_separated(8, g, 20.0);
    RunOptions opt;
    opt.dt = 1e-5;
    opt.t_end = 0.02;
    opt.sample_every = 100;
    const auto r = run(s, opt);
    EXPECT_EQ(r.log.times.size(), 21u);
    EXPECT_LT(r.log.norm_drift(), 1e-12);
    EXPECT_LT(r.log.energy_drift(), 1e-3);
    EXPECT_EQ(r.plus.density.rows(), 21u);
}

TEST(Run, RejectsFractionalStepCounts) {
    SpaceGrid g(64);
    auto s = init_separated(4, g);
    RunOptions opt;
    opt.dt = 3e-5;
    opt.t_end = 1e-3;
    EXPECT_THROW(run(s, opt), ValidationError);
    opt.t_end = 3e-3;
    opt.sample_every = 7;
    EXPECT_THROW(run(s, opt), ValidationError);
}

TEST(KineticStats, NonInteractingHasNoTimeVariance) {
    SpaceGrid g(256);
    auto s = init_separated(8, g, 0.0);
    RunOptions opt;
    opt.dt = 1e-4;
    opt.t_end = 0.02;
    opt.sample_every = 10;
    const auto r = run(s, opt);
    const auto& T = r.kinetic_plus.T;
    for (std::size_t a = 0; a < T.cols(); ++a)
        for (std::size_t i = 0; i < T.rows(); ++i) EXPECT_NEAR(T(i, a), T(0, a), 1e-9 * T(0, a));
    const auto st = kinetic_stats(r.kinetic_plus, 0, opt.t_end);
    EXPECT_LT(st.time_variance, 1e-16 * st.mean * st.mean);
    EXPECT_GT(st.variance, 0.0);
}

TEST(KineticStats, NeedsTenSamples) {
    KineticSeries k{"plus", {0, 1, 2}, Matrix<double>(3, 2)};
    EXPECT_THROW(kinetic_stats(k, 0, 2), ValidationError);
}

TEST(KineticStats, MomentsOfKnownSample) {
    KineticSeries k{"plus", {}, Matrix<double>(0, 1)};
    const std::vector<double> v{1, 1, 1, 1, 1, 1, 1, 1, 1, 11};
    for (std::size_t i = 0; i < v.size(); ++i) {
        k.times.push_back(static_cast<double>(i));
        k.T.append_row(std::span<const double>(&v[i], 1));
    }
    const auto st = kinetic_stats(k, 0, 9);
    EXPECT_DOUBLE_EQ(st.mean, 2.0);
    EXPECT_DOUBLE_EQ(st.variance, 9.0);
    EXPECT_NEAR(st.skewness, (0.9 * -1 + 0.1 * 729) / 27.0, 1e-12);
}

TEST(Checkpoint, ResumeIsBitExact) {
    SpaceGrid g(128);
    auto a = init_separated(6, g, 25.0);
    Propagator p(g, 1e-5);
    for (int i = 0; i < 200; ++i) p.step(a);
    const auto path = std::filesystem::temp_directory_path() / "fcarpet_ckpt_test.bin";
    save_checkpoint(a, path);
    auto b = load_checkpoint(path);
    std::filesystem::remove(path);
    EXPECT_EQ(b.t, a.t);
    EXPECT_EQ(b.g, a.g);
    EXPECT_EQ(max_abs_diff(a.plus, b.plus), 0.0);
    Propagator pa(g, 1e-5), pb(g, 1e-5);
    pa.reset_clock(a.t);
    pb.reset_clock(b.t);
    for (int i = 0; i < 200; ++i) {
        pa.step(a);
        pb.step(b);
    }
    EXPECT_EQ(max_abs_diff(a.plus, b.plus), 0.0);
    EXPECT_EQ(max_abs_diff(a.minus, b.minus), 0.0);
    EXPECT_EQ(a.t, b.t);
}

TEST(Checkpoint, RejectsForeignFile) {
    const auto path = std::filesystem::temp_directory_path() / "fcarpet_not_ckpt.bin";
    io::atomic_write(path, [](std::ostream& os) { os << "hello world, definitely not a checkpoint"; });
    EXPECT_THROW(load_checkpoint(path), ValidationError);
    std::filesystem::remove(path);
}
