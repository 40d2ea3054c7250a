#pragma once

// Stochastic-volatility model class
//
//   dS     = mu_bar S dt + sqrt(sigma) S dW1
//   dsigma = kappa~ sigma^alpha (theta~ - sigma) dt + v sigma^beta dW2,   dW1 dW2 = rho dt
//
// with market price of volatility risk lambda0 * sigma. Under
//   x = ln(S/E), y = sigma/v, tau = T - t, u = exp(r tau) V / E
// a European put solves the constant-in-time convection-diffusion problem
//
//   u_tau = c_xx u_xx + c_yy u_yy + c_xy u_xy + c_x u_x + c_y u_y
//
// whose coefficients depend on y only.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "svadi/errors.hpp"
#include "svadi/grid.hpp"

namespace svadi {

enum class ModelVariant { sqr, var, three_halves, sqrn, varn, three_halves_n };

/// (alpha, beta) exponents selecting a member of the model class.
inline std::pair<double, double> variant_exponents(ModelVariant m) {
    switch (m) {
        case ModelVariant::sqr: return {0.0, 0.5};
        case ModelVariant::var: return {0.0, 1.0};
        case ModelVariant::three_halves: return {0.0, 1.5};
        case ModelVariant::sqrn: return {1.0, 0.5};
        case ModelVariant::varn: return {1.0, 1.0};
        case ModelVariant::three_halves_n: return {1.0, 1.5};
    }
    return {0.0, 0.5};
}

inline const char* variant_name(ModelVariant m) {
    switch (m) {
        case ModelVariant::sqr: return "SQR";
        case ModelVariant::var: return "VAR";
        case ModelVariant::three_halves: return "3/2";
        case ModelVariant::sqrn: return "SQRN";
        case ModelVariant::varn: return "VARN";
        case ModelVariant::three_halves_n: return "3/2-N";
    }
    return "?";
}

inline constexpr ModelVariant all_variants[] = {ModelVariant::sqr,  ModelVariant::var,
                                                ModelVariant::three_halves, ModelVariant::sqrn,
                                                ModelVariant::varn, ModelVariant::three_halves_n};

/// Model constants. Defaults are the standard Heston test case
/// (E=100, T=0.5, r=0.05, v=0.1, kappa=2, theta=0.1, rho=-0.5).
struct ModelParams {
    double r = 0.05;
    double v = 0.1;  // vol-of-vol
    double kappa_tilde = 2.0;
    double theta_tilde = 0.1;
    double lambda0 = 0.0;
    double rho = -0.5;
    double alpha = 0.0;
    double beta = 0.5;
    double strike = 100.0;
    double maturity = 0.5;
    double mu_bar = 0.0;  // real-world drift; never enters the pricing equation

    /// Risk-neutral mean-reversion speed.
    double kappa() const { return kappa_tilde + lambda0; }
    /// Risk-neutral long-run level; kappa() * theta() == kappa_tilde * theta_tilde.
    double theta() const { return kappa_tilde * theta_tilde / (kappa_tilde + lambda0); }

    bool is_heston() const { return alpha == 0.0 && beta == 0.5; }

    ModelParams& with_variant(ModelVariant m) {
        std::tie(alpha, beta) = variant_exponents(m);
        return *this;
    }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        auto finite = [](const char* name, double x) {
            if (!std::isfinite(x)) throw ConfigError(name, "must be finite");
        };
        finite("rate", r);
        finite("vol_of_vol", v);
        finite("kappa", kappa_tilde);
        finite("theta", theta_tilde);
        finite("lambda0", lambda0);
        finite("rho", rho);
        finite("alpha", alpha);
        finite("beta", beta);
        finite("strike", strike);
        finite("maturity", maturity);
        finite("mu_bar", mu_bar);
        if (r < 0) throw ConfigError("rate", "must be >= 0");
        if (v < 0) throw ConfigError("vol_of_vol", "must be >= 0");
        if (kappa_tilde < 0) throw ConfigError("kappa", "must be >= 0");
        if (theta_tilde < 0) throw ConfigError("theta", "must be >= 0");
        if (rho < -1 || rho > 1) throw ConfigError("rho", "must lie in [-1, 1]");
        if (strike <= 0) throw ConfigError("strike", "must be > 0");
        if (maturity <= 0) throw ConfigError("maturity", "must be > 0");
        if (kappa_tilde + lambda0 == 0) throw ConfigError("lambda0", "kappa + lambda0 must be nonzero");
    }
};

/// Coefficients of the transformed equation and the y-derivatives of the
/// y-direction coefficients, sampled at one y.
struct CoefficientSample {
    double c_xx = 0, c_yy = 0, c_xy = 0, c_x = 0, c_y = 0;
    double c_yy_d1 = 0, c_yy_d2 = 0;
    double c_y_d1 = 0, c_y_d2 = 0;
};

/// Evaluable coefficient functions over y. Built from a model with
/// transformed_coefficients(); tests may supply their own sampler.
class TransformedCoefficients {
public:
    using Sampler = std::function<CoefficientSample(double)>;

    explicit TransformedCoefficients(Sampler sampler) : sampler_(std::move(sampler)) {}

    /// Identically zero operator.
    static TransformedCoefficients zero() {
        return TransformedCoefficients([](double) { return CoefficientSample{}; });
    }

    CoefficientSample sample(double y) const {
        if (!(y > 0)) throw DomainError("coefficients requested at y <= 0 (degenerate diffusion)");
        return sampler_(y);
    }

    double c_xx(double y) const { return sample(y).c_xx; }
    double c_yy(double y) const { return sample(y).c_yy; }
    double c_xy(double y) const { return sample(y).c_xy; }
    double c_x(double y) const { return sample(y).c_x; }
    double c_y(double y) const { return sample(y).c_y; }

private:
    Sampler sampler_;
};

inline TransformedCoefficients transformed_coefficients(const ModelParams& p) {
    p.validate();
    if (p.v == 0) throw ConfigError("vol_of_vol", "the y = sigma / v transform needs v > 0");
    const double v = p.v, r = p.r, rho = p.rho, a = p.alpha, b = p.beta;
    const double kappa = p.kappa(), theta = p.theta();
    return TransformedCoefficients([=](double y) {
        const double s = v * y;
        CoefficientSample c;
        c.c_xx = 0.5 * s;
        c.c_x = r - 0.5 * s;
        c.c_xy = rho * std::pow(s, b + 0.5);
        c.c_yy = 0.5 * std::pow(s, 2 * b);
        c.c_yy_d1 = b * v * std::pow(s, 2 * b - 1);
        c.c_yy_d2 = b * (2 * b - 1) * v * v * std::pow(s, 2 * b - 2);
        // c_y = (kappa / v) * (theta s^a - s^(a+1))
        c.c_y = kappa * std::pow(s, a) * (theta - s) / v;
        c.c_y_d1 = kappa * (theta * a * std::pow(s, a - 1) - (a + 1) * std::pow(s, a));
        c.c_y_d2 = kappa * v * (theta * a * (a - 1) * std::pow(s, a - 2) - (a + 1) * a * std::pow(s, a - 1));
        return c;
    });
}

/// Transformed put payoff, max(1 - e^x, 0).
inline double initial_condition(double x) { return std::max(1.0 - std::exp(x), 0.0); }

/// Centred cubic B-spline, support [-2, 2].
inline double cubic_bspline(double t) {
    const double a = std::abs(t);
    if (a >= 2.0) return 0.0;
    if (a >= 1.0) return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
    return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
}

/// Fourth-order smoothing kernel, support [-3, 3]: reproduces cubics and has
/// Fourier transform (sin(w/2) / (w/2))^4 (1 + (2/3) sin^2(w/2)).
inline double smoothing_kernel(double t) {
    return cubic_bspline(t) + (2.0 * cubic_bspline(t) - cubic_bspline(t - 1.0) - cubic_bspline(t + 1.0)) / 6.0;
}

/// Payoff averaged against the smoothing kernel scaled to spacing h,
///   int k(t) max(1 - e^(x - h t), 0) dt.
/// Equals the payoff up to O(h^4) wherever it is smooth on [x - 3h, x + 3h].
inline double smoothed_initial_condition(double x, double h) {
    if (!(h > 0)) return initial_condition(x);
    using rule = boost::math::quadrature::gauss<double, 8>;
    const double kink = x / h;  // payoff is 1 - e^(x - h t) for t > kink, else 0
    double total = 0.0;
    for (int k = -3; k < 3; ++k) {
        const double lo = std::max<double>(k, kink), hi = k + 1.0;
        if (lo >= hi) continue;
        total += rule::integrate([&](double t) { return smoothing_kernel(t) * (1.0 - std::exp(x - h * t)); }, lo, hi);
    }
    return total;
}

enum class Side { low, high };

/// Dirichlet value on an x-wall: 1 - e^(r tau + L1) at x = L1, 0 at x = K1.
inline double dirichlet_x(Side side, double tau, const ModelParams& p, double L1) {
    if (side == Side::high) return 0.0;
    return 1.0 - std::exp(p.r * tau + L1);
}

/// Option value V at (S, sigma) from transformed value u at (x, y, tau).
struct PricePoint {
    double S, sigma, V;
};

inline PricePoint untransform(double u, double x, double y, double tau, const ModelParams& p) {
    return {p.strike * std::exp(x), p.v * y, p.strike * std::exp(-p.r * tau) * u};
}

/// Price surface over every grid node, x-major within each y row.
inline std::vector<PricePoint> inverse_transform(const Field& u, const Grid& g, const ModelParams& p,
                                                 double tau) {
    std::vector<PricePoint> out;
    out.reserve(g.M * g.N);
    for (std::size_t j = 0; j < g.N; ++j)
        for (std::size_t i = 0; i < g.M; ++i) out.push_back(untransform(u(i, j), g.x(i), g.y(j), tau, p));
    return out;
}

}  // namespace svadi
