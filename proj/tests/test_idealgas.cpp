#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fcarpet/core.hpp"
#include "fcarpet/idealgas.hpp"

using namespace fcarpet;
using units::pi;

namespace {

// Sub-box orbital sqrt(2/D) sin(n pi x / D) on [0, D].
double subbox_orbital(double D, int n, double x) {
    return x < D ? std::sqrt(2.0 / D) * std::sin(n * pi * x / D) : 0.0;
}

// Trapezoidal overlap with a box mode on a fine uniform grid over [0, D].
double quadrature_overlap(double D, int n, int k, int cells = 200000) {
    const double h = D / cells;
    double s = 0.0;
    for (int i = 0; i <= cells; ++i) {
        const double x = i * h;
        const double f = std::sqrt(2.0 / D) * std::sin(n * pi * x / D) * std::sqrt(2.0) * std::sin(k * pi * x);
        s += (i == 0 || i == cells) ? 0.5 * f : f;
    }
    return s * h;
}

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Overlaps, SameBoxIsIdentity) {
    const auto s = overlaps_subbox(1.0, 10, 400);
    for (int n = 0; n < 10; ++n)
        for (int k = 0; k < 400; ++k) EXPECT_NEAR(s.lambda(n, k), n == k ? 1.0 : 0.0, 1e-14);
    EXPECT_LT(s.max_defect(), 1e-14);
}

TEST(Overlaps, HalfBoxValuesMatchQuadrature) {
    const auto s = overlaps_subbox(0.5, 1, 400);
    EXPECT_NEAR(s.lambda(0, 0), 0.60021, 1e-5);
    EXPECT_NEAR(s.lambda(0, 0), quadrature_overlap(0.5, 1, 1), 1e-8);
    EXPECT_NEAR(s.lambda(0, 1), std::sqrt(0.5), 1e-15);
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= 12; ++k)
            EXPECT_NEAR(subbox_overlap(0.5, n, k), quadrature_overlap(0.5, n, k), 1e-8) << n << "," << k;
}

TEST(Overlaps, TextbookFormAwayFromResonance) {
    const double D = 0.37;
    for (int n = 1; n <= 5; ++n) {
        for (int k = 1; k <= 50; ++k) {
            const double kd = k * D;
            const double ref = (2 / pi) * std::sqrt(D) * (n % 2 ? 1 : -1) * std::sin(k * pi * D) * n / (n * n - kd * kd);
            EXPECT_NEAR(subbox_overlap(D, n, k), ref, 1e-12);
        }
    }
}

TEST(Overlaps, TruncationChecks) {
    EXPECT_THROW(overlaps_subbox(0.5, 10, 50), DomainError);
    EXPECT_THROW(overlaps_subbox(1.5, 1, 50), DomainError);
    const auto s = overlaps_subbox(0.5, 10, 80);
    EXPECT_FALSE(s.warnings.empty());
    EXPECT_GT(s.max_defect(), 1e-6);
    const auto fine = overlaps_subbox(0.5, 10, default_k_max(0.5, 10));
    for (double d : fine.defect) {
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
    }
}

TEST(Overlaps, RowsNearlyOrthonormal) {
    const auto s = overlaps_subbox(0.5, 6, 4000);
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            double dot = 0;
            for (int k = 0; k < s.k_max(); ++k) dot += s.lambda(a, k) * s.lambda(b, k);
            EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-3);
        }
    }
}

TEST(OverlapsNumeric, MatchesClosedForm) {
    SpaceGrid g(40000);
    const double D = 0.5;
    Matrix<double> orb(4, g.node_count());
    for (int n = 1; n <= 4; ++n)
        for (std::size_t j = 0; j < g.node_count(); ++j) orb(n - 1, j) = subbox_orbital(D, n, g.x(j));
    const auto s = overlaps_numeric(orb, g, 200, 1.0);
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= 200; ++k) EXPECT_NEAR(s.lambda(n - 1, k - 1), subbox_overlap(D, n, k), 1e-8);
}

TEST(OverlapsNumeric, HermiteRowsOrthonormal) {
    SpaceGrid g(2000);
    const auto orb = hermite_orbitals(6, 400.0, 0.5, g);
    const auto s = overlaps_numeric(orb, g, 1999);
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            double dot = 0;
            for (int k = 0; k < s.k_max(); ++k) dot += s.lambda(a, k) * s.lambda(b, k);
            EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-8);
        }
    }
}

TEST(OverlapsNumeric, SingleBoxMode) {
    SpaceGrid g(256);
    Matrix<double> orb(1, g.node_count());
    for (std::size_t j = 0; j < g.node_count(); ++j) orb(0, j) = box_mode_value(3, g.x(j));
    const auto s = overlaps_numeric(orb, g, 100);
    for (int k = 1; k <= 100; ++k) EXPECT_NEAR(s.lambda(0, k - 1), k == 3 ? 1.0 : 0.0, 1e-13);
}

TEST(OverlapsNumeric, RejectsNonOrthonormal) {
    SpaceGrid g(256);
    Matrix<double> orb(3, g.node_count());
    for (std::size_t j = 0; j < g.node_count(); ++j) {
        orb(0, j) = box_mode_value(1, g.x(j));
        orb(1, j) = box_mode_value(2, g.x(j));
        orb(2, j) = box_mode_value(2, g.x(j)) * 1.1;
    }
    try {
        (void)overlaps_numeric(orb, g, 10);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("(2, 3)"), std::string::npos) << e.what();
    }
    EXPECT_THROW(overlaps_numeric(orb, g, 256), DomainError);
}

TEST(Evolution, InitialDensityReconstructed) {
    const double D = 0.5;
    const int N = 10;
    const auto s = overlaps_subbox(D, N, default_k_max(D, N));
    SpaceGrid g(400);
    const auto n0 = evolve_density(s, 0.0, g);
    std::vector<double> ref(g.node_count());
    for (std::size_t j = 0; j < ref.size(); ++j)
        for (int n = 1; n <= N; ++n) ref[j] += std::pow(subbox_orbital(D, n, g.x(j)), 2);
    double err = 0;
    for (std::size_t j = 0; j < ref.size(); ++j) {
        if (std::abs(g.x(j) - D) < 1e-12) continue;  // series converges to the midpoint at the kink
        err = std::max(err, std::abs(n0[j] - ref[j]));
    }
    EXPECT_LT(err / max_abs(ref), 1e-3);
}

TEST(Evolution, ExactRevivalAndMirror) {
    const auto s = overlaps_subbox(0.3, 7, default_k_max(0.3, 7));
    SpaceGrid g(400);
    const auto n0 = evolve_density(s, 0.0, g);
    const auto nr = evolve_density(s, units::revival_time, g);
    const auto nh = evolve_density(s, 0.5 * units::revival_time, g);
    const double scale = max_abs(n0);
    for (std::size_t j = 0; j < n0.size(); ++j) {
        EXPECT_NEAR(nr[j], n0[j], 1e-10 * scale);
        EXPECT_NEAR(nh[j], n0[n0.size() - 1 - j], 1e-10 * scale);
    }
}

TEST(Evolution, DirectSumMatchesFoldedTransform) {
    const auto s = overlaps_subbox(0.5, 5, 2000);
    SpaceGrid g(200);
    const double t = 0.1234 * units::revival_time;
    const auto a = evolve_density(s, t, g);
    const auto b = density_at(s, t, g.nodes());
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-10 * max_abs(a));
}

TEST(Evolution, NormalizationOnResolvingGrid) {
    const auto s = overlaps_subbox(0.5, 20, 1600);
    SpaceGrid g(1601);
    const double expected = [&] {
        double m = 0;
        for (int n = 0; n < s.orbitals(); ++n) m += s.weight(n) * (1 - s.defect[n]);
        return m;
    }();
    for (double tau : {0.0, 0.137, 0.5, 0.77}) {
        const auto n = evolve_density(s, tau * units::revival_time, g);
        EXPECT_NEAR(g.integrate(n), expected, 1e-10);
        for (double v : n) EXPECT_GE(v, -1e-12);
    }
}

TEST(Evolution, CarpetRowsAreDensities) {
    const auto s = overlaps_subbox(0.21, 1, default_k_max(0.21, 1));
    SpaceGrid g(300);
    const auto times = uniform_times(units::revival_time, 9);
    const auto c = make_carpet(s, times, g, "SubBox(D=0.21)", 3);
    ASSERT_EQ(c.density.rows(), 9u);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto ref = evolve_density(s, times[i], g);
        for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_EQ(c.density(i, j), ref[j]);
    }
    const auto single = make_carpet(s, std::vector<double>{0.0}, g);
    EXPECT_EQ(single.density.rows(), 1u);
    EXPECT_THROW(make_carpet(s, std::vector<double>{-1.0}, g), DomainError);
}

TEST(Depth, SignPattern) {
    EXPECT_EQ(depth_sign(1), -1.0);
    EXPECT_EQ(depth_sign(4), -1.0);
    EXPECT_EQ(depth_sign(-1), 1.0);
    EXPECT_EQ(depth_sign(-2), -1.0);
    EXPECT_EQ(depth_sign(-3), 1.0);
    EXPECT_THROW(depth_sign(0), DomainError);
}

TEST(Depth, SincClosedForm) {
    EXPECT_NEAR(contribution_depth_sinc(0.5, 1), -2 / pi, 1e-15);
    EXPECT_NEAR(contribution_depth_sinc(0.25, 4), 0.0, 1e-15);
    EXPECT_NEAR(contribution_depth_sinc(0.21, 1), -std::sin(0.21 * pi) / (0.21 * pi), 1e-15);
}

TEST(Depth, DirectHalfBox) {
    const auto s = overlaps_subbox(0.5, 100, default_k_max(0.5, 100));
    EXPECT_NEAR(contribution_depth_direct(s, 1), -2 / pi, 1e-3);
    EXPECT_NEAR(contribution_depth_direct(s, -1), 2 / pi, 1e-3);
}

TEST(Depth, StationaryStateHasNoStructures) {
    const auto s = overlaps_subbox(1.0, 20, 800);
    for (int p : {1, 2, 3, -1, -2}) EXPECT_NEAR(contribution_depth_direct(s, p), 0.0, 1e-14);
}

TEST(Depth, DirectMatchesSincAtLargeN) {
    const auto s = overlaps_subbox(0.21, 500, default_k_max(0.21, 500));
    EXPECT_NEAR(contribution_depth_direct(s, 1), contribution_depth_sinc(0.21, 1), 1e-3);
}

TEST(Depth, FourierOfFlatSlab) {
    SpaceGrid g(4000);
    const double D = 0.5, N = 10;
    std::vector<double> n(g.node_count());
    for (std::size_t j = 0; j < n.size(); ++j) {
        const double x = g.x(j);
        n[j] = x < D - 1e-12 ? N / D : (std::abs(x - D) < 1e-12 ? 0.5 * N / D : 0.0);
    }
    for (int p : {1, 2, 3, 5, -1, -2, -7}) EXPECT_NEAR(contribution_depth_fourier(n, g, p), contribution_depth_sinc(D, p), 1e-6);
}

TEST(Depth, FourierMatchesDirectForExactDensity) {
    const double D = 0.5;
    const int N = 50;
    SpaceGrid g(20000);
    std::vector<double> n(g.node_count());
    for (std::size_t j = 0; j < n.size(); ++j)
        for (int m = 1; m <= N; ++m) n[j] += std::pow(subbox_orbital(D, m, g.x(j)), 2);
    const auto s = overlaps_subbox(D, N, default_k_max(D, N));
    EXPECT_NEAR(contribution_depth_fourier(n, g, 1), contribution_depth_direct(s, 1), 1e-3);
}

TEST(Depth, PerOrbitalLimitAndQuadrature) {
    EXPECT_NEAR(per_orbital_depth(0.5, 10000, 1) / (-2 / pi), 1.0, 1e-6);
    for (int p : {1, 2, 3, 4, -1, -4}) {
        // Cosine transform of phi_1^2 on [0, D].
        const double D = 0.5;
        const int cells = 200000;
        const double h = D / cells;
        double s = 0;
        for (int i = 0; i <= cells; ++i) {
            const double x = i * h;
            const double f = std::pow(subbox_orbital(D, 1, x), 2) * std::cos(std::abs(p) * pi * x);
            s += (i == 0 || i == cells) ? 0.5 * f : f;
        }
        EXPECT_NEAR(per_orbital_depth(D, 1, p), depth_sign(p) * s * h, 1e-9) << p;
    }
    for (int n = 1; n <= 20; ++n) EXPECT_NEAR(per_orbital_depth(1.0 / 3.0, n, 3), 0.0, 1e-14);
}

TEST(ThomasFermi, BoxChemicalPotential) {
    SpaceGrid g(400);
    for (double N : {1.0, 10.0, 40.0}) {
        const auto r = thomas_fermi_mu(potential_of(SubBox{0.5}), N, g);
        EXPECT_NEAR(r.mu / (0.5 * std::pow(pi * N / 0.5, 2)), 1.0, 1e-10);
    }
    const double mu1 = thomas_fermi_mu(potential_of(SubBox{0.3}), 5, g).mu;
    const double mu4 = thomas_fermi_mu(potential_of(SubBox{0.3}), 20, g).mu;
    EXPECT_NEAR(mu4 / mu1, 16.0, 1e-8);
}

TEST(ThomasFermi, HarmonicChemicalPotential) {
    SpaceGrid g(4000);
    const auto full = thomas_fermi_mu(potential_of(Harmonic{1000.0, 0.5}), 10, g);
    EXPECT_NEAR(full.mu / (10 * 1000.0), 1.0, 1e-9);
    EXPECT_NEAR(g.integrate(full.density), 10.0, 1e-3);
    const auto half = thomas_fermi_mu(potential_of(Harmonic{1000.0, 0.0}), 10, g);
    EXPECT_NEAR(half.mu / (2 * 10 * 1000.0), 1.0, 1e-9);
}

TEST(Wkb, BoxSpectrumIsExact) {
    const auto E = wkb_spectrum(potential_of(SubBox{0.4}), 12, 0.0);
    for (int n = 1; n <= 12; ++n) EXPECT_NEAR(E[n - 1] / (n * n * pi * pi / (2 * 0.16)), 1.0, 1e-10);
}

TEST(Wkb, HarmonicIsLinear) {
    const auto E = wkb_spectrum(potential_of(Harmonic{2000.0, 0.5}), 30, 0.5);
    for (int n = 2; n <= 30; ++n) EXPECT_NEAR(E[n - 1] - E[n - 2], 2000.0, 1e-6 * 2000.0);
}

TEST(Wkb, SameCurveAsChemicalPotential) {
    SpaceGrid g(100);
    const auto v = potential_of(Harmonic{300.0, 0.3});
    const auto E = wkb_spectrum(v, 15, 0.0);
    for (int n = 1; n <= 15; ++n) EXPECT_NEAR(E[n - 1], thomas_fermi_mu(v, n, g).mu, 1e-8 * E[n - 1]);
}
