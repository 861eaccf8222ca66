#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fcarpet/core.hpp"
#include "fcarpet/idealgas.hpp"
#include "fcarpet/structures.hpp"

using namespace fcarpet;
using units::pi;
using units::revival_time;
using units::v0;

TEST(Trajectory, FoldsAtWalls) {
    EXPECT_NEAR(predicted_position(1, 0.2 * revival_time), 0.4, 1e-14);
    EXPECT_NEAR(predicted_position(1, 0.8 * revival_time), 0.4, 1e-14);
    EXPECT_NEAR(predicted_position(-1, 0.1 * revival_time), 0.8, 1e-14);
    EXPECT_NEAR(predicted_position(2, 0.3 * revival_time), 0.8, 1e-14);
    EXPECT_NEAR(unfold_like(0.4, 1.6), 1.6, 1e-14);
    EXPECT_NEAR(unfold_like(0.3, 2.3), 2.3, 1e-14);
}

TEST(Track, DepthAndPositionOnCarpet) {
    // Rational fractions of T_rev are fractional revivals where several p
    // coincide, so sample just off t = 0.2 T_rev.
    const auto s = overlaps_subbox(0.5, 100, 4000);
    SpaceGrid g(4000);
    const double t = 0.2047 * revival_time;
    const auto c = make_carpet(s, std::vector<double>{t}, g);
    const auto tr = track_structure(c, 1);
    ASSERT_TRUE(tr.samples[0].found);
    EXPECT_NEAR(tr.samples[0].x, v0 * t, g.dx());
    EXPECT_NEAR(std::abs(tr.samples[0].depth), 2 / pi, 0.1 * 2 / pi);
    EXPECT_LE(std::abs(tr.samples[0].depth), 1.0);
}

TEST(Track, VelocityLaw) {
    const auto s = overlaps_subbox(0.5, 50, 2000);
    SpaceGrid g(2000);
    std::vector<double> times;
    for (int i = 0; i < 30; ++i) times.push_back((0.02 + 0.01 * i) * revival_time);
    const auto c = make_carpet(s, times, g);
    const double dt = 0.01 * revival_time;
    for (int p : {1, 2, 3, 4, -1, -2}) {
        TrackOptions opt;
        opt.expected_sign = 0;
        const auto tr = track_structure(c, p, opt);
        EXPECT_GE(tr.found().size(), 10u) << p;
        EXPECT_NEAR(tr.velocity_fit, p * v0, 2 * g.dx() / dt) << p;
    }
}

TEST(Track, LeftMoverStartsAtRightWall) {
    const auto s = overlaps_subbox(0.5, 60, 2400);
    SpaceGrid g(1200);
    std::vector<double> times;
    for (int i = 1; i <= 12; ++i) times.push_back(0.02 * i * revival_time);
    const auto tr = track_structure(make_carpet(s, times, g), -1, {5, 1, 5});
    for (const auto& smp : tr.found()) EXPECT_NEAR(smp.x, 1.0 - v0 * smp.t, 2 * g.dx());
    EXPECT_NEAR(tr.velocity_fit, -v0, 0.02 * v0);
}

TEST(Track, SingleAtomCanalStillMovesAtV0) {
    const auto s = overlaps_subbox(0.21, 1, default_k_max(0.21, 1));
    SpaceGrid g(800);
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back((0.05 + 0.005 * i) * revival_time);
    const auto tr = track_structure(make_carpet(s, times, g), 1, {5, 0, 5});
    EXPECT_NEAR(tr.velocity_fit, v0, 0.1 * v0);
}

TEST(Track, RefinedWidthMatchesModel) {
    const double D = 0.5;
    const int N = 100;
    const auto s = overlaps_subbox(D, N, 40 * N);
    const double kF = pi * N / D;
    const auto times = generic_times(0.02 * revival_time, 0.22 * revival_time, 9);
    RefinedTrackOptions opt;
    opt.half_window = 3 * w0 / (2 * kF);
    opt.points = 301;
    const auto tr = track_structure_refined(s, 1, times, opt);
    std::vector<double> w;
    for (const auto& smp : tr.found()) {
        w.push_back(smp.width);
        EXPECT_NEAR(smp.x, predicted_position(1, smp.t), 0.2 * w0 / (2 * kF));
    }
    ASSERT_GE(w.size(), 7u);
    EXPECT_NEAR(median(w) * 2 * kF, w0, 0.05 * w0);
}

TEST(SincModel, Basics) {
    EXPECT_NEAR(sinc_half_width(), w0, 1e-5);
    EXPECT_DOUBLE_EQ(sinc_profile(0.0, -0.6, 10.0, 2.0, 100), -60.0);
    const double kF = 200 * pi, eta = 2;
    EXPECT_NEAR(sinc_profile(w0 / (2 * eta * kF), 1.0, kF, eta, 1.0), 0.5, 1e-5);
    EXPECT_NEAR((WidthModel{2.0, kF}.width()), 3.017e-3, 1e-6);
}

TEST(FermiWavevector, ClosedForms) {
    EXPECT_NEAR(fermi_wavevector(SubBox{0.5}, 100), 200 * pi, 1e-10);
    const SubBox3D bb{0.5, BoxBox{0.2, 0.3}};
    EXPECT_NEAR(fermi_wavevector(bb, 3200) / fermi_wavevector(bb, 100), std::cbrt(32.0), 1e-12);
    const double a = 0.05;  // oscillator length, omega = 1 / a^2
    const SubBox3D hh{0.21, HarmHarm{1 / (a * a), 1 / (a * a)}};
    EXPECT_NEAR(fermi_wavevector(hh, 5000), std::pow(15 * pi * 5000 / 0.21 * std::pow(a, -4), 0.2), 1e-9);
    EXPECT_THROW(fermi_wavevector(Harmonic{}, 10), DomainError);
}

TEST(Lagrange, MatchesBruteForce) {
    auto brute = [](int N, double x, double D) {
        double s = 0;
        for (int n = 1; n <= N; ++n) s += std::cos(2 * n * pi * x / D);
        return s;
    };
    EXPECT_EQ(lagrange_sum(50, 0.0, 0.5), 50.0);
    EXPECT_NEAR(lagrange_sum(50, 0.5 / 200, 0.5), brute(50, 0.5 / 200, 0.5), 1e-12);
    for (double x : {1e-9, 3e-7, 2e-6, 0.013, 0.2, 0.5, 0.5 + 1e-8, 0.77})
        EXPECT_NEAR(lagrange_sum(37, x, 0.5), brute(37, x, 0.5), 1e-9) << x;
}

TEST(Lagrange, SincApproximation) {
    const int N = 100;
    const double D = 0.5, kF = pi * N / D;
    for (int i = 0; i <= 100; ++i) {
        const double x = pi / (2 * kF) * i / 100;
        EXPECT_NEAR(lagrange_sum(N, x, D) / N, sinc(2 * kF * x), 0.02);
    }
}

TEST(Eta, OneDimensional) {
    const auto occ = fermi_sea_1d(100);
    const auto f = fit_eta(occ, 0.5, fermi_wavevector(SubBox{0.5}, 100));
    EXPECT_NEAR(f.eta, 2.0, 0.1);
    EXPECT_TRUE(f.warnings.empty());
}

TEST(Eta, BoxBoxPerpendicular) {
    const SubBox3D trap{0.5, BoxBox{0.2, 0.2}};
    const auto f = fit_eta(fermi_sea_3d(trap, 2000), 0.5, fermi_wavevector(trap, 2000));
    EXPECT_NEAR(f.eta, 3.2, 0.3);
}

TEST(Eta, HarmHarmPerpendicular) {
    const SubBox3D trap{0.21, HarmHarm{500, 500}};
    const auto f = fit_eta(fermi_sea_3d(trap, 5000), 0.21, fermi_wavevector(trap, 5000));
    EXPECT_NEAR(f.eta, 1.3, 0.2);
}

TEST(Temperature, ThinningAndDepth) {
    const std::vector<double> Ts{0.0, 0.5, 1.0, 2.0, 4.0};
    const auto scan = temperature_width_scan(SubBox{0.5}, 100, Ts);
    ASSERT_EQ(scan.size(), Ts.size());
    EXPECT_DOUBLE_EQ(scan[0].ratio, 1.0);
    for (std::size_t i = 1; i < scan.size(); ++i) {
        EXPECT_FALSE(scan[i].censored);
        EXPECT_LT(scan[i].ratio, scan[i - 1].ratio);
    }
    EXPECT_NEAR(scan.back().depth, scan.front().depth, 1e-3);
    EXPECT_NEAR(scan.front().depth, contribution_depth_direct(overlaps_subbox(0.5, 100, 4000), 1), 1e-4);
}
