#pragma once

// Semi-analytic European put under the square-root (Heston) variance model,
// used as an independent check of the PDE solver.
//
// Call = S P1 - E e^(-rT) P2 with
//   P2 = 1/2 + 1/pi int_0^inf Re[e^(-iu ln E) phi(u) / (iu)] du
//   P1 = 1/2 + 1/pi int_0^inf Re[e^(-iu ln E) phi(u - i) / (iu phi(-i))] du,
// phi the characteristic function of ln S_T in the rotation-free
// ("little trap") form. The put follows from put-call parity.

#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "svadi/errors.hpp"
#include "svadi/model.hpp"

namespace svadi {

struct FourierOptions {
    double tolerance = 1e-8;  // absolute, on each of the two integrals
    unsigned max_depth = 12;
};

namespace detail {

/// log(1 + z) / z, accurate for small |z|.
inline std::complex<double> log1p_ratio(std::complex<double> z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * (0.5 - z * (1.0 / 3 - z * 0.25));
    return std::log(1.0 + z) / z;
}

/// Characteristic function of ln S_T at complex argument u.
inline std::complex<double> heston_cf(std::complex<double> u, double S, double sigma0, const ModelParams& p) {
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    const double T = p.maturity, r = p.r, kappa = p.kappa(), theta = p.theta(), v = p.v, rho = p.rho;
    const C drift = i * u * (std::log(S) + r * T);
    if (v == 0.0) {
        // Deterministic variance path: ln S_T is Gaussian with the integrated variance.
        const double var = kappa == 0.0 ? sigma0 * T : theta * T + (sigma0 - theta) * (1.0 - std::exp(-kappa * T)) / kappa;
        return std::exp(drift - 0.5 * (i * u + u * u) * var);
    }
    const C beta = kappa - rho * v * i * u;
    const C d = std::sqrt(beta * beta + v * v * (i * u + u * u));
    // beta - d and g carry a factor v^2; divide it out analytically.
    const C bd = -(i * u + u * u) / (beta + d);  // (beta - d) / v^2
    const C q = bd / (beta + d);                 // g / v^2
    const C g = v * v * q;
    const C e = std::exp(-d * T);
    const C w = q * (1.0 - e) / (1.0 - g);  // log((1 - g e) / (1 - g)) = log(1 + v^2 w)
    const C A = kappa * theta * (bd * T - 2.0 * w * log1p_ratio(v * v * w));
    const C B = bd * (1.0 - e) / (1.0 - g * e);
    return std::exp(drift + A + B * sigma0);
}

}  // namespace detail

/// European put price at spot S and variance sigma for time to maturity p.maturity.
/// Throws ConfigError for non-Heston exponents and QuadratureError when the
/// error estimate of either integral exceeds the tolerance.
inline double heston_fourier_price(const ModelParams& p, double S, double sigma, FourierOptions opt = {}) {
    p.validate();
    if (!p.is_heston()) throw ConfigError("alpha/beta", "Fourier pricing needs the square-root model (alpha=0, beta=1/2)");
    if (!(S > 0)) throw ConfigError("S", "must be > 0");
    if (!(sigma >= 0)) throw ConfigError("sigma", "must be >= 0");

    using C = std::complex<double>;
    const C i(0.0, 1.0);
    const double lnE = std::log(p.strike);
    const C phi_minus_i = detail::heston_cf(-i, S, sigma, p);  // = S e^(rT)

    auto integrand = [&](double u, bool first) {
        const C arg = first ? C(u, -1.0) : C(u, 0.0);
        C value = std::exp(-i * u * lnE) * detail::heston_cf(arg, S, sigma, p) / (i * u);
        if (first) value /= phi_minus_i;
        const double re = value.real();
        return std::isfinite(re) ? re : 0.0;
    };

    using rule = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inf = std::numeric_limits<double>::infinity();
    double err1 = 0.0, err2 = 0.0;
    const double I1 = rule::integrate([&](double u) { return integrand(u, true); }, 0.0, inf, opt.max_depth, 1e-13, &err1);
    const double I2 = rule::integrate([&](double u) { return integrand(u, false); }, 0.0, inf, opt.max_depth, 1e-13, &err2);
    if (!(err1 <= opt.tolerance) || !(err2 <= opt.tolerance) || !std::isfinite(I1) || !std::isfinite(I2))
        throw QuadratureError("Fourier integral did not reach the requested tolerance");

    const double pi = std::acos(-1.0);
    const double P1 = 0.5 + I1 / pi, P2 = 0.5 + I2 / pi;
    const double discount = std::exp(-p.r * p.maturity);
    const double call = S * P1 - p.strike * discount * P2;
    return call - S + p.strike * discount;
}

}  // namespace svadi
