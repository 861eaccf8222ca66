#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <vector>

#include "fcarpet/coherence.hpp"
#include "fcarpet/core.hpp"
#include "fcarpet/idealgas.hpp"
#include "fcarpet/io.hpp"
#include "fcarpet/meanfield.hpp"
#include "fcarpet/structures.hpp"

using namespace fcarpet;
using units::pi;

namespace {

constexpr int cases = 1000;
constexpr std::uint64_t seed = 20240917;

std::mt19937_64& rng() {
    static std::mt19937_64 r(seed);
    return r;
}

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }
int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

/// Orthonormal random orbitals built from the lowest `band` box modes.
Matrix<cplx> random_orbitals(int count, int band, const SpaceGrid& grid) {
    const std::size_t m = grid.interior_count();
    std::vector<std::vector<cplx>> c;
    std::normal_distribution<double> gauss;
    while (static_cast<int>(c.size()) < count) {
        std::vector<cplx> v(m);
        for (int k = 0; k < band; ++k) v[static_cast<std::size_t>(k)] = {gauss(rng()), gauss(rng())};
        for (const auto& u : c) {
            cplx p{};
            for (std::size_t k = 0; k < m; ++k) p += std::conj(u[k]) * v[k];
            for (std::size_t k = 0; k < m; ++k) v[k] -= p * u[k];
        }
        double n = 0;
        for (const auto& x : v) n += std::norm(x);
        if (n < 1e-6) continue;
        for (auto& x : v) x /= std::sqrt(n);
        c.push_back(std::move(v));
    }
    SineTransform dst(m);
    Matrix<cplx> out(static_cast<std::size_t>(count), grid.node_count());
    std::vector<cplx> row(m);
    for (int a = 0; a < count; ++a) {
        dst.inverse(c[static_cast<std::size_t>(a)], row);
        for (std::size_t j = 0; j < m; ++j) out(static_cast<std::size_t>(a), j + 1) = row[j];
    }
    return out;
}

double gram_error(const Matrix<cplx>& orb, const SpaceGrid& grid) {
    double e = 0;
    for (std::size_t a = 0; a < orb.rows(); ++a)
        for (std::size_t b = 0; b < orb.rows(); ++b) {
            const cplx ip = inner_product(orb.row(a), orb.row(b), grid);
            e = std::max(e, std::abs(ip - (a == b ? 1.0 : 0.0)));
        }
    return e;
}

}  // namespace

class Property : public ::testing::Test {
protected:
    void SetUp() override { rng().seed(seed); }
};

TEST_F(Property, SineTransformIsUnitary) {
    for (int i = 0; i < cases; ++i) {
        const auto n = static_cast<std::size_t>(uniform_int(1, 300));
        SineTransform dst(n);
        std::vector<cplx> psi(n), c(n), back(n);
        for (auto& v : psi) v = {uniform(-1, 1), uniform(-1, 1)};
        dst.forward(psi, c);
        dst.inverse(c, back);
        double ps = 0, cs = 0, err = 0;
        for (std::size_t j = 0; j < n; ++j) {
            ps += std::norm(psi[j]);
            cs += std::norm(c[j]);
            err = std::max(err, std::abs(back[j] - psi[j]));
        }
        ASSERT_NEAR(ps / static_cast<double>(n + 1), cs, 1e-12 * ps) << "case " << i;
        ASSERT_LT(err, 1e-12) << "case " << i;
    }
}

TEST_F(Property, IdealDensityNormalization) {
    const SpaceGrid grid(160);
    for (int i = 0; i < cases; ++i) {
        const int N = uniform_int(1, 6);
        const double D = uniform(0.2, 1.0);
        const auto s = overlaps_subbox(D, N, 150);
        const double t = uniform(0, units::revival_time);
        const double total = grid.integrate(evolve_density(s, t, grid));
        ASSERT_NEAR(total, N * (1 - s.mass_defect()), 1e-10 * N) << "case " << i << " N=" << N << " D=" << D;
    }
}

TEST_F(Property, IdealRevivalAndMirror) {
    const SpaceGrid grid(200);
    for (int i = 0; i < cases; ++i) {
        const int N = uniform_int(1, 10);
        const double D = uniform(0.15, 1.0);
        const auto s = overlaps_subbox(D, N, 300);
        const auto n0 = evolve_density(s, 0, grid);
        const auto nr = evolve_density(s, units::revival_time, grid);
        const auto nh = evolve_density(s, units::revival_time / 2, grid);
        double peak = 0, er = 0, em = 0;
        for (std::size_t j = 0; j < n0.size(); ++j) {
            peak = std::max(peak, n0[j]);
            er = std::max(er, std::abs(nr[j] - n0[j]));
            em = std::max(em, std::abs(nh[j] - n0[n0.size() - 1 - j]));
        }
        ASSERT_LE(er, 1e-10 * peak) << "case " << i;
        ASSERT_LE(em, 1e-10 * peak) << "case " << i;
    }
}

TEST_F(Property, LagrangeSumMatchesDirectSum) {
    for (int i = 0; i < cases; ++i) {
        const int N = uniform_int(0, 400);
        const double D = uniform(0.05, 1.0);
        const double x = uniform(-D, D);
        double direct = 0;
        for (int n = 1; n <= N; ++n) direct += std::cos(2 * n * pi * x / D);
        ASSERT_NEAR(lagrange_sum(N, x, D), direct, 1e-9 * std::max(1, N)) << "case " << i;
    }
}

TEST_F(Property, MeanFieldStepIsUnitary) {
    const SpaceGrid grid(64);
    for (int i = 0; i < cases; ++i) {
        const int half = uniform_int(1, 4);
        MeanFieldState s{grid, random_orbitals(half, 12, grid), random_orbitals(half, 12, grid), 0.0,
                         uniform(-32, 32)};
        Propagator prop(grid, uniform(1e-5, 2e-4));
        const int steps = uniform_int(1, 5);
        for (int k = 0; k < steps; ++k) prop.step(s);
        ASSERT_LT(gram_error(s.plus, grid), 1e-12) << "case " << i;
        ASSERT_LT(gram_error(s.minus, grid), 1e-12) << "case " << i;
    }
}

TEST_F(Property, MeanFieldIsReversible) {
    const SpaceGrid grid(64);
    for (int i = 0; i < cases; ++i) {
        const int half = uniform_int(1, 4);
        MeanFieldState s{grid, random_orbitals(half, 12, grid), random_orbitals(half, 12, grid), 0.0,
                         uniform(-32, 32)};
        const auto start = s;
        const double dt = uniform(1e-5, 2e-4);
        const int steps = uniform_int(1, 5);
        Propagator fwd(grid, dt), bwd(grid, -dt);
        for (int k = 0; k < steps; ++k) fwd.step(s);
        for (int k = 0; k < steps; ++k) bwd.step(s);
        double e = 0;
        for (std::size_t k = 0; k < s.plus.data().size(); ++k) {
            e = std::max(e, std::abs(s.plus.data()[k] - start.plus.data()[k]));
            e = std::max(e, std::abs(s.minus.data()[k] - start.minus.data()[k]));
        }
        ASSERT_LT(e, 1e-12) << "case " << i;
    }
}

TEST_F(Property, G1IsHermitianAndBounded) {
    const SpaceGrid grid(32);
    for (int i = 0; i < cases; ++i) {
        const auto orb = random_orbitals(uniform_int(1, 6), 16, grid);
        const auto m = g1_map(orb, grid);
        const std::size_t n = grid.node_count();
        for (std::size_t a = 0; a < n; ++a) {
            if (!m.valid(a)) continue;
            ASSERT_EQ(m.values(a, a), cplx(1.0)) << "case " << i;
            for (std::size_t b = 0; b < n; ++b) {
                if (!m.valid(b)) continue;
                ASSERT_LT(std::abs(m.values(a, b) - std::conj(m.values(b, a))), 1e-14) << "case " << i;
                ASSERT_LE(std::abs(m.values(a, b)), 1 + 1e-12) << "case " << i;
            }
        }
    }
}

TEST_F(Property, CsvDoublesRoundTrip) {
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < cases; ++i) {
        double v;
        do {
            const auto b = bits(rng());
            std::memcpy(&v, &b, sizeof v);
        } while (!std::isfinite(v));
        ASSERT_EQ(std::stod(io::format_double(v)), v) << "case " << i;
    }
}

TEST_F(Property, LinearFitRecoversExactLine) {
    for (int i = 0; i < cases; ++i) {
        const double a = uniform(-10, 10), b = uniform(-10, 10);
        const int n = uniform_int(3, 40);
        std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] = uniform(-5, 5);
            y[k] = a * x[k] + b;
        }
        const auto f = fit_linear(x, y);
        ASSERT_NEAR(f.slope, a, 1e-8 * (1 + std::abs(a))) << "case " << i;
        ASSERT_NEAR(f.intercept, b, 1e-8 * (1 + std::abs(b))) << "case " << i;
    }
}
