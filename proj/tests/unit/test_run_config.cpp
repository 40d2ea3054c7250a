#include <gtest/gtest.h>

#include "svadi/run_config.hpp"

using namespace svadi;

namespace {
std::string field_of(const std::string& text) {
    try {
        run_config_from_string(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}
}  // namespace

TEST(RunConfig, DefaultsAreTheStandardHestonCase) {
    const RunConfig c = run_config_from_string("{}");
    EXPECT_EQ(c.model.strike, 100.0);
    EXPECT_EQ(c.model.maturity, 0.5);
    EXPECT_EQ(c.model.r, 0.05);
    EXPECT_EQ(c.model.v, 0.1);
    EXPECT_EQ(c.model.kappa_tilde, 2.0);
    EXPECT_EQ(c.model.theta_tilde, 0.1);
    EXPECT_EQ(c.model.rho, -0.5);
    EXPECT_EQ(c.model.alpha, 0.0);
    EXPECT_EQ(c.model.beta, 0.5);
    EXPECT_EQ(c.gamma, 0.5);
    EXPECT_EQ(c.h_list, (std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.025}));
    EXPECT_EQ(c.resolved_h_ref(), 0.0125);
    EXPECT_EQ(c.stability_gammas().size(), 9u);
}

TEST(RunConfig, JsonRoundTrip) {
    const RunConfig c = run_config_from_string(R"({
        "rho": -0.3, "gamma_list": [0.2, 0.6], "h_list": [0.2, 0.1], "h_ref": 0.025,
        "scheme": "second", "schemes": ["ho"], "domain": {"L1": -4, "K2": 4},
        "smooth_payoff": false, "output_dir": "out", "alpha": 1, "beta": 1.5 })");
    EXPECT_EQ(c.model.rho, -0.3);
    EXPECT_EQ(c.domain.L1, -4.0);
    EXPECT_EQ(c.scheme, Scheme::second_order_baseline);
    const RunConfig back = run_config_from_json(to_json(c));
    EXPECT_TRUE(back == c);
    EXPECT_TRUE(run_config_from_json(to_json(RunConfig{})) == RunConfig{});
}

TEST(RunConfig, RejectionsNameTheField) {
    EXPECT_EQ(field_of(R"({"rho": 1.5})"), "rho");
    EXPECT_EQ(field_of(R"({"h_list": []})"), "h_list");
    EXPECT_EQ(field_of(R"({"h_list": [0.1], "h_ref": 0.08})"), "h_ref");
    EXPECT_EQ(field_of(R"({"rate": "high"})"), "rate");
    EXPECT_EQ(field_of(R"({"typo": 1})"), "typo");
    EXPECT_EQ(field_of(R"({"domain": {"L3": 1}})"), "domain.L3");
    EXPECT_EQ(field_of(R"({"domain": {"L2": 0}})"), "domain.L2");
    EXPECT_EQ(field_of(R"({"scheme": "third"})"), "scheme");
    EXPECT_EQ(field_of(R"({"vol_of_vol": 0})"), "vol_of_vol");
    EXPECT_EQ(field_of(R"({"rho_list": [0, 2]})"), "rho_list");
    EXPECT_EQ(field_of("[1, 2]"), "config");
    EXPECT_EQ(field_of("{not json"), "config");
    EXPECT_EQ(field_of(R"({"rho": -1})"), "");
}
