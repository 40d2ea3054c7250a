// svadi: price European puts under stochastic volatility and run the
// convergence / stability studies.
//
//   svadi price     [--config f.json] [--out dir] [--scheme ho|second] [--rho r] [--gamma g] [--h h]
//   svadi converge  [--config f.json] [--out dir] [--scheme ..] [--rho list] [--gamma list] [--h list]
//   svadi stability [--config f.json] [--out dir] [--scheme ..] [--rho list] [--gamma list] [--h list]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical instability.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svadi/svadi.hpp"

namespace {

using namespace svadi;

struct Overrides {
    std::string config;
    std::string out;
    std::string scheme;
    std::vector<double> rho, gamma, h;
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunConfig load_config(const Overrides& o) {
    RunConfig c;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw ConfigError("config", "cannot read " + o.config);
        std::stringstream ss;
        ss << in.rdbuf();
        c = run_config_from_string(ss.str());
    }
    if (!o.out.empty()) c.output_dir = o.out;
    if (!o.scheme.empty()) {
        c.scheme = parse_scheme(o.scheme);
        c.schemes = {c.scheme};
    }
    return c;
}

// Single-valued overrides for `price`.
void apply_single(RunConfig& c, const Overrides& o) {
    auto one = [](const std::vector<double>& v, const char* name) {
        if (v.size() != 1) throw ConfigError(name, "price takes exactly one value");
        return v.front();
    };
    if (!o.rho.empty()) c.model.rho = one(o.rho, "rho");
    if (!o.gamma.empty()) c.gamma = one(o.gamma, "gamma");
    if (!o.h.empty()) c.h = one(o.h, "h");
}

// List overrides for the studies.
void apply_lists(RunConfig& c, const Overrides& o) {
    if (!o.rho.empty()) c.rho_list = o.rho;
    if (!o.gamma.empty()) c.gamma_list = o.gamma;
    if (!o.h.empty()) {
        c.h_list = o.h;
        if (c.h_ref) c.h_ref.reset();
    }
}

std::filesystem::path prepare_out(const RunConfig& c) {
    std::filesystem::path dir(c.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("output_dir", "cannot create " + c.output_dir + ": " + ec.message());
    return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

nlohmann::json grid_json(const Grid& g) {
    return {{"L1", g.L1}, {"K1", g.K1}, {"L2", g.L2}, {"K2", g.K2}, {"M", g.M}, {"N", g.N}, {"dx", g.dx}, {"dy", g.dy}};
}

int cmd_price(RunConfig c) {
    c.validate();
    const auto dir = prepare_out(c);
    const Grid g = build_grid(c.domain, c.h);
    const TimeGrid tg = build_time_grid(c.model.maturity, c.gamma, c.h);
    const Solution sol = solve(c.model, g, tg, c.hv(c.scheme));

    std::string csv = "S,sigma,V\n";
    for (const PricePoint& pt : inverse_transform(sol.u, g, c.model, tg.T))
        csv += num(pt.S) + "," + num(pt.sigma) + "," + num(pt.V) + "\n";
    write_text(dir / "surface.csv", csv);

    nlohmann::json meta;
    meta["command"] = "price";
    meta["config"] = to_json(c);
    meta["grid"] = grid_json(g);
    meta["time"] = {{"steps", tg.steps()}, {"dtau", tg.dtau}, {"gamma", tg.gamma}};
    meta["scheme"] = scheme_name(c.scheme);
    meta["factorization_passes"] = sol.stats.factorization_passes;
    meta["timings"] = {{"setup_seconds", sol.stats.setup_seconds}, {"loop_seconds", sol.stats.loop_seconds}};
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
    std::cerr << "price: " << g.M << "x" << g.N << " nodes, " << tg.steps() << " steps, wrote "
              << (dir / "surface.csv").string() << "\n";
    return 0;
}

StudyOptions study_options(const RunConfig& c) {
    StudyOptions s;
    s.bounds = c.domain;
    s.phi = c.phi;
    s.psi = c.psi;
    s.smooth_payoff = c.smooth_payoff;
    return s;
}

int cmd_converge(RunConfig c) {
    c.validate();
    const auto dir = prepare_out(c);
    std::string errors = "scheme,rho,gamma,h,eps_l2,eps_linf,order_pair\n";
    std::string orders = "scheme,rho,gamma,norm,order\n";
    nlohmann::json studies = nlohmann::json::array();
    for (Scheme s : c.schemes)
        for (double rho : c.rhos())
            for (double gamma : c.converge_gammas()) {
                ModelParams p = c.model;
                p.rho = rho;
                const ExperimentReport r =
                    convergence_study(p, s, gamma, c.h_list, c.resolved_h_ref(), study_options(c));
                for (const ReportRow& row : r.rows)
                    errors += std::string(scheme_name(s)) + "," + num(rho) + "," + num(gamma) + "," + num(row.h) + "," +
                              num(row.eps_l2) + "," + num(row.eps_linf) + "," +
                              (std::isnan(row.order_linf) ? std::string() : num(row.order_linf)) + "\n";
                orders += std::string(scheme_name(s)) + "," + num(rho) + "," + num(gamma) + ",l2," + num(r.fitted_l2) + "\n";
                orders += std::string(scheme_name(s)) + "," + num(rho) + "," + num(gamma) + ",linf," + num(r.fitted_linf) + "\n";
                studies.push_back({{"scheme", scheme_name(s)},
                                   {"rho", rho},
                                   {"gamma", gamma},
                                   {"reference", {{"h", r.h_ref}, {"M", r.ref_M}, {"N", r.ref_N}, {"steps", r.ref_steps}}}});
                std::cerr << "converge: " << scheme_name(s) << " rho=" << rho << " gamma=" << gamma
                          << " order l2=" << r.fitted_l2 << " linf=" << r.fitted_linf << "\n";
            }
    write_text(dir / "errors.csv", errors);
    write_text(dir / "orders.csv", orders);
    nlohmann::json meta;
    meta["command"] = "converge";
    meta["config"] = to_json(c);
    meta["studies"] = studies;
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
    return 0;
}

int cmd_stability(RunConfig c) {
    c.validate();
    const auto dir = prepare_out(c);
    const std::vector<double> rhos = c.rhos();
    nlohmann::json files = nlohmann::json::array();
    for (double rho : rhos) {
        ModelParams p = c.model;
        p.rho = rho;
        const StabilityGrid sg = stability_sweep(p, c.scheme, c.stability_gammas(), c.h_list, study_options(c));
        std::string csv = "gamma,h,rel_eps_l2,unstable_flag\n";
        std::size_t flagged = 0;
        for (const StabilityCell& cell : sg.cells) {
            csv += num(cell.gamma) + "," + num(cell.h) + "," + num(cell.rel_eps_l2) + "," +
                   (cell.unstable() ? "1" : "0") + "\n";
            flagged += cell.unstable() ? 1 : 0;
        }
        const std::string name = rhos.size() == 1 ? "stability.csv" : "stability_rho_" + num(rho) + ".csv";
        write_text(dir / name, csv);
        files.push_back({{"rho", rho}, {"file", name}});
        std::cerr << "stability: rho=" << rho << " " << sg.cells.size() << " runs, " << flagged << " flagged\n";
    }
    nlohmann::json meta;
    meta["command"] = "stability";
    meta["config"] = to_json(c);
    meta["files"] = files;
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
    return 0;
}

void add_common(CLI::App* sub, Overrides& o) {
    sub->set_help_flag("--help", "print this help and exit");
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--scheme", o.scheme, "ho or second");
    sub->add_option("--rho", o.rho, "correlation value(s)")->delimiter(',');
    sub->add_option("--gamma", o.gamma, "parabolic mesh ratio(s)")->delimiter(',');
    sub->add_option("--h", o.h, "mesh width(s)")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-order ADI pricing of European puts under stochastic volatility"};
    app.require_subcommand(1);
    Overrides price_o, conv_o, stab_o;
    auto* price = app.add_subcommand("price", "solve once and write the price surface");
    auto* conv = app.add_subcommand("converge", "spatial convergence study");
    auto* stab = app.add_subcommand("stability", "stability sweep over gamma and h");
    add_common(price, price_o);
    add_common(conv, conv_o);
    add_common(stab, stab_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (price->parsed()) {
            RunConfig c = load_config(price_o);
            apply_single(c, price_o);
            return cmd_price(c);
        }
        if (conv->parsed()) {
            RunConfig c = load_config(conv_o);
            apply_lists(c, conv_o);
            return cmd_converge(c);
        }
        RunConfig c = load_config(stab_o);
        apply_lists(c, stab_o);
        return cmd_stability(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InstabilityError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
