#pragma once

// JSON run configuration shared by the command-line subcommands.
//
// Every key is optional; omitted keys take the defaults below. Unknown keys
// and out-of-range values are rejected with a ConfigError naming the key.
//
//   strike, maturity, rate, vol_of_vol, kappa, theta, lambda0, rho,
//   alpha, beta, mu_bar             model parameters
//   domain: {L1, K1, L2, K2}        truncated rectangle in (x, y)
//   gamma                           parabolic mesh ratio dtau / h^2
//   h                               spacing for `price`
//   h_list, h_ref                   spacings for `converge` / `stability`
//   gamma_list                      ratios swept by `converge` / `stability`
//   rho_list                        correlations swept by `converge` / `stability`
//   scheme                          "ho" or "second" for `price` / `stability`
//   schemes                         schemes compared by `converge`
//   phi, psi                        HV weights
//   smooth_payoff                   kernel-average the payoff near the strike
//   output_dir                      directory for result files

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "svadi/errors.hpp"
#include "svadi/grid.hpp"
#include "svadi/model.hpp"
#include "svadi/timestepper.hpp"

namespace svadi {

inline Scheme parse_scheme(const std::string& s, const std::string& field = "scheme") {
    if (s == "ho" || s == "high_order") return Scheme::high_order;
    if (s == "second" || s == "second_order_baseline") return Scheme::second_order_baseline;
    throw ConfigError(field, "unknown scheme '" + s + "' (expected ho or second)");
}

struct RunConfig {
    ModelParams model{};
    Bounds domain{};
    double gamma = 0.5;
    double h = 0.025;
    std::vector<double> h_list{0.4, 0.2, 0.1, 0.05, 0.025};
    std::optional<double> h_ref;  // default: half the smallest h
    std::optional<std::vector<double>> gamma_list;
    std::optional<std::vector<double>> rho_list;
    Scheme scheme = Scheme::high_order;
    std::vector<Scheme> schemes{Scheme::high_order, Scheme::second_order_baseline};
    double phi = 0.5;
    double psi = 0.5;
    bool smooth_payoff = true;
    std::string output_dir = ".";

    double resolved_h_ref() const {
        double m = h_list.empty() ? h : h_list.front();
        for (double x : h_list) m = std::min(m, x);
        return h_ref.value_or(m / 2);
    }
    std::vector<double> converge_gammas() const { return gamma_list.value_or(std::vector<double>{gamma}); }
    std::vector<double> stability_gammas() const {
        if (gamma_list) return *gamma_list;
        std::vector<double> g;
        for (int k = 2; k <= 10; ++k) g.push_back(k / 10.0);
        return g;
    }
    std::vector<double> rhos() const { return rho_list.value_or(std::vector<double>{model.rho}); }

    HVConfig hv(Scheme s) const {
        HVConfig c;
        c.phi = phi;
        c.psi = psi;
        c.scheme = s;
        c.smooth_payoff = smooth_payoff;
        return c;
    }

    /// Throws ConfigError naming the first invalid field.
    void validate() const {
        model.validate();
        if (model.v == 0) throw ConfigError("vol_of_vol", "must be > 0 for the PDE solver");
        domain.validate();
        auto positive = [](const char* name, double x) {
            if (!(x > 0) || !std::isfinite(x)) throw ConfigError(name, "must be a finite number > 0");
        };
        positive("gamma", gamma);
        positive("h", h);
        if (h_list.empty()) throw ConfigError("h_list", "must not be empty");
        for (double x : h_list) positive("h_list", x);
        if (h_ref) {
            positive("h_ref", *h_ref);
            for (double x : h_list)
                if (*h_ref > x / 2 * (1 + 1e-12)) throw ConfigError("h_ref", "must be at most half the smallest h");
        }
        if (gamma_list) {
            if (gamma_list->empty()) throw ConfigError("gamma_list", "must not be empty");
            for (double x : *gamma_list) positive("gamma_list", x);
        }
        if (rho_list) {
            if (rho_list->empty()) throw ConfigError("rho_list", "must not be empty");
            for (double x : *rho_list)
                if (!(x >= -1 && x <= 1)) throw ConfigError("rho_list", "entries must lie in [-1, 1]");
        }
        if (schemes.empty()) throw ConfigError("schemes", "must not be empty");
        hv(scheme).validate();
        if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
    }
};

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError(key, "expected a number");
    return j.get<double>();
}

inline std::vector<double> json_numbers(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(json_number(e, key));
    return out;
}

inline const char* scheme_key(Scheme s) { return s == Scheme::high_order ? "ho" : "second"; }

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const auto& v = it.value();
        if (k == "strike") c.model.strike = detail::json_number(v, k);
        else if (k == "maturity") c.model.maturity = detail::json_number(v, k);
        else if (k == "rate") c.model.r = detail::json_number(v, k);
        else if (k == "vol_of_vol") c.model.v = detail::json_number(v, k);
        else if (k == "kappa") c.model.kappa_tilde = detail::json_number(v, k);
        else if (k == "theta") c.model.theta_tilde = detail::json_number(v, k);
        else if (k == "lambda0") c.model.lambda0 = detail::json_number(v, k);
        else if (k == "rho") c.model.rho = detail::json_number(v, k);
        else if (k == "alpha") c.model.alpha = detail::json_number(v, k);
        else if (k == "beta") c.model.beta = detail::json_number(v, k);
        else if (k == "mu_bar") c.model.mu_bar = detail::json_number(v, k);
        else if (k == "gamma") c.gamma = detail::json_number(v, k);
        else if (k == "h") c.h = detail::json_number(v, k);
        else if (k == "h_list") c.h_list = detail::json_numbers(v, k);
        else if (k == "h_ref") c.h_ref = detail::json_number(v, k);
        else if (k == "gamma_list") c.gamma_list = detail::json_numbers(v, k);
        else if (k == "rho_list") c.rho_list = detail::json_numbers(v, k);
        else if (k == "phi") c.phi = detail::json_number(v, k);
        else if (k == "psi") c.psi = detail::json_number(v, k);
        else if (k == "scheme") {
            if (!v.is_string()) throw ConfigError(k, "expected a string");
            c.scheme = parse_scheme(v.get<std::string>(), k);
        } else if (k == "schemes") {
            if (!v.is_array()) throw ConfigError(k, "expected an array of strings");
            c.schemes.clear();
            for (const auto& e : v) {
                if (!e.is_string()) throw ConfigError(k, "expected an array of strings");
                c.schemes.push_back(parse_scheme(e.get<std::string>(), k));
            }
        } else if (k == "smooth_payoff") {
            if (!v.is_boolean()) throw ConfigError(k, "expected true or false");
            c.smooth_payoff = v.get<bool>();
        } else if (k == "output_dir") {
            if (!v.is_string()) throw ConfigError(k, "expected a string");
            c.output_dir = v.get<std::string>();
        } else if (k == "domain") {
            if (!v.is_object()) throw ConfigError(k, "expected an object with L1, K1, L2, K2");
            for (auto d = v.begin(); d != v.end(); ++d) {
                const std::string name = "domain." + d.key();
                if (d.key() == "L1") c.domain.L1 = detail::json_number(d.value(), name);
                else if (d.key() == "K1") c.domain.K1 = detail::json_number(d.value(), name);
                else if (d.key() == "L2") c.domain.L2 = detail::json_number(d.value(), name);
                else if (d.key() == "K2") c.domain.K2 = detail::json_number(d.value(), name);
                else throw ConfigError(name, "unknown key");
            }
        } else {
            throw ConfigError(k, "unknown key");
        }
    }
    c.validate();
    return c;
}

inline RunConfig run_config_from_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["strike"] = c.model.strike;
    j["maturity"] = c.model.maturity;
    j["rate"] = c.model.r;
    j["vol_of_vol"] = c.model.v;
    j["kappa"] = c.model.kappa_tilde;
    j["theta"] = c.model.theta_tilde;
    j["lambda0"] = c.model.lambda0;
    j["rho"] = c.model.rho;
    j["alpha"] = c.model.alpha;
    j["beta"] = c.model.beta;
    j["mu_bar"] = c.model.mu_bar;
    j["domain"] = {{"L1", c.domain.L1}, {"K1", c.domain.K1}, {"L2", c.domain.L2}, {"K2", c.domain.K2}};
    j["gamma"] = c.gamma;
    j["h"] = c.h;
    j["h_list"] = c.h_list;
    if (c.h_ref) j["h_ref"] = *c.h_ref;
    if (c.gamma_list) j["gamma_list"] = *c.gamma_list;
    if (c.rho_list) j["rho_list"] = *c.rho_list;
    j["scheme"] = detail::scheme_key(c.scheme);
    j["schemes"] = nlohmann::json::array();
    for (Scheme s : c.schemes) j["schemes"].push_back(detail::scheme_key(s));
    j["phi"] = c.phi;
    j["psi"] = c.psi;
    j["smooth_payoff"] = c.smooth_payoff;
    j["output_dir"] = c.output_dir;
    return j;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace svadi
