#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcarpet/core/errors.hpp"

namespace fcarpet {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

struct SaturationFit {
    double A = 0.0;
    double c = 0.0;
    double residual = 0.0;  // sum of squared residuals
    bool boundary = false;  // c not determined by the data
};

/// Ordinary least squares y = slope x + intercept.
inline LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("fit_linear: x and y differ in length");
    if (x.size() < 3) throw ValidationError("fit_linear: need at least 3 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DomainError("fit_linear: all x values are equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

/// y = prefactor x^exponent by least squares on log y against log x.
inline PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("fit_power_law: x and y differ in length");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0 && y[i] > 0)) throw DomainError("fit_power_law: inputs must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const auto lf = fit_linear(lx, ly);
    return {lf.slope, std::exp(lf.intercept), lf.r2};
}

/// y = A (1 - exp(-c x)) with c > 0. For each c the optimal A is linear, so
/// the residual is minimized over log c by Brent's method and the result
/// polished with Gauss-Newton steps on (A, c).
inline SaturationFit fit_saturation(std::span<const double> x, std::span<const double> y, int max_iter = 500) {
    if (x.size() != y.size()) throw ValidationError("fit_saturation: x and y differ in length");
    if (x.size() < 4) throw ValidationError("fit_saturation: need at least 4 points");
    double xmin = x[0], xmax = x[0];
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !std::isfinite(y[i])) throw DomainError("fit_saturation: x must be > 0 and y finite");
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
    }
    auto amplitude = [&](double c) {
        double sfy = 0, sff = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double f = -std::expm1(-c * x[i]);
            sfy += f * y[i];
            sff += f * f;
        }
        return sfy / sff;
    };
    auto residual = [&](double c, double A) {
        double r = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = y[i] - A * -std::expm1(-c * x[i]);
            r += d * d;
        }
        return r;
    };
    const double lo = std::log(1e-6 / xmax), hi = std::log(50.0 / xmin);
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    const auto best = boost::math::tools::brent_find_minima(
        [&](double lc) {
            const double c = std::exp(lc);
            return residual(c, amplitude(c));
        },
        lo, hi, 52, iters);
    if (iters >= static_cast<std::uintmax_t>(max_iter)) {
        throw NumericError("fit_saturation: no convergence after " + std::to_string(max_iter) +
                           " iterations (best c = " + std::to_string(std::exp(best.first)) + ")");
    }
    double c = std::exp(best.first);
    double A = amplitude(c);
    for (int it = 0; it < 20; ++it) {
        double jaa = 0, jac = 0, jcc = 0, ga = 0, gc = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = std::exp(-c * x[i]);
            const double fa = -std::expm1(-c * x[i]);
            const double fc = A * x[i] * e;
            const double r = y[i] - A * fa;
            jaa += fa * fa;
            jac += fa * fc;
            jcc += fc * fc;
            ga += fa * r;
            gc += fc * r;
        }
        const double det = jaa * jcc - jac * jac;
        if (!(det > 0)) break;
        const double dA = (jcc * ga - jac * gc) / det;
        const double dc = (jaa * gc - jac * ga) / det;
        if (!(c + dc > 0) || residual(c + dc, A + dA) > residual(c, A)) break;
        A += dA;
        c += dc;
        if (std::abs(dc) <= 1e-15 * c && std::abs(dA) <= 1e-15 * std::abs(A)) break;
    }
    SaturationFit f;
    f.A = A;
    f.c = c;
    f.residual = residual(c, A);
    // Saturated before the first point, or still linear at the last one.
    f.boundary = c * xmin > 20.0 || c * xmax < 1e-3;
    return f;
}

}  // namespace fcarpet
