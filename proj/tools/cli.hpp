#pragma once

// Command-line front end: tmatrix, threshold, singularity, locus, fields.
// Tables go to stdout (or --out), diagnostics to stderr.
// Exit codes: 0 ok, 2 validation, 3 near-singularity, 4 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <spectral_slab/spectral_slab.hpp>

namespace spectral_slab::cli {

using nlohmann::json;

enum ExitCode : int { kOk = 0, kValidation = 2, kNearSingular = 3, kSolverFailure = 4 };

/// Everything a subcommand needs. Lengths in metres, gains in 1/m, angles in degrees.
struct RunConfig {
    std::string command;
    double eta = 3.4;
    double kappa = 0.0;
    double thickness = 300e-6;
    double lambda = 1500e-9;
    double theta_deg = 0.0;
    std::string pol = "TE";
    std::optional<int> m;
    double lambda0 = 1500e-9;
    double gamma_hat = 0.02;
    std::optional<double> g0_max;
    double theta_min_deg = 0.0;
    double theta_max_deg = 89.9;
    double theta_step_deg = 0.5;
    int modes = 100;
    std::optional<int> m_min, m_max;
    std::string index_model = "linearized";
    std::string mode_rule = "at-or-above";
    double b0_re = 1.0, b0_im = 0.0;
    std::size_t grid_points = 2001;
    std::string format;  ///< csv | json; empty = command default
    std::string out_path;
};

inline json to_json(const RunConfig& c) {
    json j{{"command", c.command},
           {"eta", c.eta},
           {"kappa", c.kappa},
           {"L_m", c.thickness},
           {"lambda_m", c.lambda},
           {"theta_deg", c.theta_deg},
           {"pol", c.pol},
           {"lambda0_m", c.lambda0},
           {"gamma_hat", c.gamma_hat},
           {"theta_min_deg", c.theta_min_deg},
           {"theta_max_deg", c.theta_max_deg},
           {"theta_step_deg", c.theta_step_deg},
           {"modes", c.modes},
           {"index_model", c.index_model},
           {"mode_rule", c.mode_rule},
           {"b0", {c.b0_re, c.b0_im}},
           {"grid_points", c.grid_points},
           {"format", c.format}};
    j["m"] = c.m ? json(*c.m) : json(nullptr);
    j["g0_max_m1"] = c.g0_max ? json(*c.g0_max) : json(nullptr);
    j["m_min"] = c.m_min ? json(*c.m_min) : json(nullptr);
    j["m_max"] = c.m_max ? json(*c.m_max) : json(nullptr);
    return j;
}

inline RunConfig from_json(const json& j) {
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(field);
    };
    auto get_opt = [&](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
    };
    get("command", c.command);
    get("eta", c.eta);
    get("kappa", c.kappa);
    get("L_m", c.thickness);
    get("lambda_m", c.lambda);
    get("theta_deg", c.theta_deg);
    get("pol", c.pol);
    get("lambda0_m", c.lambda0);
    get("gamma_hat", c.gamma_hat);
    get("theta_min_deg", c.theta_min_deg);
    get("theta_max_deg", c.theta_max_deg);
    get("theta_step_deg", c.theta_step_deg);
    get("modes", c.modes);
    get("index_model", c.index_model);
    get("mode_rule", c.mode_rule);
    get("grid_points", c.grid_points);
    get("format", c.format);
    get_opt("m", c.m);
    get_opt("g0_max_m1", c.g0_max);
    get_opt("m_min", c.m_min);
    get_opt("m_max", c.m_max);
    if (j.contains("b0")) {
        c.b0_re = j.at("b0").at(0).get<double>();
        c.b0_im = j.at("b0").at(1).get<double>();
    }
    return c;
}

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, double>> footer;
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        os << format_double(v);
                    else
                        os << v;
                },
                row[i]);
        }
        os << '\n';
    }
    for (const auto& [key, value] : t.footer) os << "# " << key << ',' << format_double(value) << '\n';
}

inline json metadata(const RunConfig& cfg) {
    return {{"tool", "spectral-slab"},
            {"version", kVersion},
            {"parameters", to_json(cfg)},
            {"tolerances",
             {{"singular_m22_relative", kDefaultSingularTolerance},
              {"newton_residual", SolveOptions{}.residual_tolerance},
              {"accept_residual", SolveOptions{}.accept_residual},
              {"newton_max_iterations", SolveOptions{}.max_iterations}}}};
}

inline json table_json(const RunConfig& cfg, const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& cell : row)
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        r.push_back(std::isfinite(v) ? json(v) : json(nullptr));
                    else
                        r.push_back(v);
                },
                cell);
        rows.push_back(std::move(r));
    }
    json footer = json::object();
    for (const auto& [key, value] : t.footer) footer[key] = std::isfinite(value) ? json(value) : json(nullptr);
    return {{"metadata", metadata(cfg)}, {"columns", t.columns}, {"rows", rows}, {"footer", footer}};
}

inline void emit_table(const RunConfig& cfg, const Table& t, std::ostream& os) {
    if (cfg.format == "json")
        os << table_json(cfg, t).dump(2) << '\n';
    else
        write_csv(os, t);
}

inline std::vector<Polarization> polarizations(const std::string& text) {
    if (text == "both") return {Polarization::TE, Polarization::TM};
    return {parse_polarization(text)};
}

inline ModeSelection parse_mode_rule(const std::string& text) {
    if (text == "at-or-above") return ModeSelection::AtOrAbove;
    if (text == "nearest") return ModeSelection::Nearest;
    throw ValidationError("mode rule must be 'at-or-above' or 'nearest'");
}

inline void validate_common(const RunConfig& c) {
    if (!(c.eta > 0.0)) throw ValidationError("--eta must be positive");
    if (!(c.thickness > 0.0)) throw ValidationError("--L must be positive");
    if (!(c.lambda > 0.0)) throw ValidationError("--lambda must be positive");
    if (!(std::abs(c.theta_deg) < 90.0)) throw ValidationError("--theta must satisfy |theta| < 90");
    if (c.format != "csv" && c.format != "json") throw ValidationError("--format must be csv or json");
}

inline SingularityPoint solve_from_config(const RunConfig& c, Polarization pol) {
    const double theta = deg_to_rad(c.theta_deg);
    if (c.m) return solve_singularity(c.eta, theta, c.thickness, pol, *c.m);
    return solve_singularity_near(c.eta, theta, c.thickness, pol, c.lambda, parse_mode_rule(c.mode_rule));
}

inline json point_json(const SingularityPoint& p) {
    return {{"pol", std::string(to_string(p.pol))},
            {"m", p.m},
            {"eta", p.eta},
            {"theta_deg", rad_to_deg(p.theta)},
            {"L_m", p.thickness},
            {"lambda_m", p.lambda},
            {"lambda_nm", units::to_nm(p.lambda)},
            {"kappa", p.kappa},
            {"g_m1", p.g},
            {"g_cm1", units::to_cm1(p.g)},
            {"residual", p.residual},
            {"m22_abs", p.m22_abs},
            {"m22_scale", p.m22_scale},
            {"iterations", p.iterations}};
}

// --- subcommands ----------------------------------------------------------

inline int cmd_tmatrix(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Polarization pol = parse_polarization(c.pol);
    const SlabScenario scenario{c.thickness, {c.eta, c.kappa}};
    const WaveSpec wave = WaveSpec::from_wavelength(c.lambda, deg_to_rad(c.theta_deg), pol);
    const TransferMatrix M = build_transfer_matrix(scenario, wave);

    Table t;
    t.columns = {"quantity", "real", "imag", "abs"};
    auto add = [&](const char* name, complex v) {
        t.rows.push_back({std::string(name), v.real(), v.imag(), std::abs(v)});
    };
    add("m11", M.m11);
    add("m12", M.m12);
    add("m21", M.m21);
    add("m22", M.m22);
    add("det", M.det());
    t.footer.push_back({"det_relative_error", M.det_relative_error()});

    int code = kOk;
    try {
        const auto amp = scattering_amplitudes(M);
        add("r_left", amp.r_left);
        add("r_right", amp.r_right);
        add("t_left", amp.t_left);
        add("t_right", amp.t_right);
    } catch (const SpectralSingularityError& e) {
        err << "error: " << e.what() << " (|M22| = " << format_double(std::abs(M.m22)) << ")\n";
        code = kNearSingular;
    }
    emit_table(c, t, out);
    return code;
}

inline std::vector<double> theta_grid_deg(const RunConfig& c) {
    if (!(c.theta_step_deg > 0.0)) throw ValidationError("--theta-step must be positive");
    if (!(c.theta_min_deg >= 0.0 && c.theta_max_deg < 90.0 && c.theta_min_deg <= c.theta_max_deg))
        throw ValidationError("angle grid must satisfy 0 <= min <= max < 90");
    std::vector<double> grid;
    for (long i = 0;; ++i) {
        const double th = c.theta_min_deg + static_cast<double>(i) * c.theta_step_deg;
        if (th > c.theta_max_deg + 1e-9) break;
        grid.push_back(th);
    }
    if (grid.back() < c.theta_max_deg - 1e-9) grid.push_back(c.theta_max_deg);
    return grid;
}

inline int cmd_threshold(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto grid_deg = theta_grid_deg(c);
    std::vector<double> grid;
    for (double d : grid_deg) grid.push_back(deg_to_rad(d));

    const auto te = threshold_curve(c.eta, c.thickness, c.lambda, Polarization::TE, grid, false);
    const auto tm = threshold_curve(c.eta, c.thickness, c.lambda, Polarization::TM, grid, false);

    Table t;
    t.columns = {"theta_deg", "g_TE_cm1", "g_TM_cm1", "kappa_TE", "kappa_TM"};
    std::size_t failures = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& a = te.samples[i];
        const auto& b = tm.samples[i];
        for (const auto* s : {&a, &b})
            if (!s->valid) {
                ++failures;
                err << "gap at theta = " << grid_deg[i] << " deg: " << s->error << '\n';
            }
        t.rows.push_back({grid_deg[i], units::to_cm1(a.g), units::to_cm1(b.g), a.kappa, b.kappa});
    }
    t.footer.push_back({"theta_b_deg", rad_to_deg(brewster_angle(c.eta))});
    try {
        const auto crit = critical_angle(c.eta, c.thickness, c.lambda);
        t.footer.push_back({"theta_c_deg", rad_to_deg(crit.theta_c)});
        t.footer.push_back({"g_max_cm1", units::to_cm1(crit.g_max)});
    } catch (const SolverError& e) {
        err << "critical angle: " << e.what() << '\n';
        t.footer.push_back({"theta_c_deg", std::nan("")});
        t.footer.push_back({"g_max_cm1", std::nan("")});
    }
    emit_table(c, t, out);
    return failures == 2 * grid.size() ? kSolverFailure : kOk;
}

inline int cmd_singularity(const RunConfig& c, std::ostream& out, std::ostream&) {
    json points = json::array();
    Table t;
    t.columns = {"pol", "m", "lambda_nm", "g_cm1", "kappa", "residual", "m22_abs"};
    for (Polarization pol : polarizations(c.pol)) {
        const SingularityPoint p = solve_from_config(c, pol);
        points.push_back(point_json(p));
        t.rows.push_back({std::string(to_string(pol)), static_cast<long long>(p.m), units::to_nm(p.lambda),
                          units::to_cm1(p.g), p.kappa, p.residual, p.m22_abs});
    }
    if (c.format == "csv") {
        write_csv(out, t);
    } else {
        json doc{{"metadata", metadata(c)}};
        if (points.size() == 1)
            doc["point"] = points[0];
        else
            doc["points"] = points;
        out << doc.dump(2) << '\n';
    }
    return kOk;
}

inline int cmd_locus(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const TwoLevelMedium medium{c.eta, c.lambda0, c.gamma_hat, c.g0_max.value_or(0.0)};
    medium.validate();
    const Polarization pol = parse_polarization(c.pol);
    const double theta = deg_to_rad(c.theta_deg);

    std::vector<int> modes;
    if (c.m_min || c.m_max) {
        if (!c.m_min || !c.m_max || *c.m_min < 1 || *c.m_max < *c.m_min)
            throw ValidationError("--m-min and --m-max must both be given with 1 <= m-min <= m-max");
        for (int m = *c.m_min; m <= *c.m_max; ++m) modes.push_back(m);
    } else {
        modes = modes_around_resonance(medium, c.thickness, theta, pol, c.modes);
    }

    LocusOptions opt;
    opt.g0_cap = c.g0_max;
    if (c.index_model == "full")
        opt.model = IndexModel::Full;
    else if (c.index_model != "linearized")
        throw ValidationError("--index-model must be linearized or full");

    const Locus locus = trace_locus(medium, c.thickness, theta, pol, modes, opt);
    for (const auto& f : locus.failures) err << "skipped mode " << f.m << ": " << f.reason << '\n';
    if (!locus.capped.empty())
        err << locus.capped.size() << " mode(s) above g0 cap " << units::to_cm1(*c.g0_max) << " cm-1\n";

    Table t;
    t.columns = {"m", "lambda_nm", "g0_cm1", "residual"};
    for (const auto& p : locus.points)
        t.rows.push_back({static_cast<long long>(p.m), units::to_nm(p.lambda), units::to_cm1(p.g0), p.residual});
    emit_table(c, t, out);
    return locus.points.empty() && !locus.failures.empty() ? kSolverFailure : kOk;
}

inline int cmd_fields(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Polarization pol = parse_polarization(c.pol);
    if (c.grid_points < 2) throw ValidationError("--grid-points must be >= 2");
    const SingularityPoint p = solve_from_config(c, pol);
    const auto ctx = SingularFieldContext::from_point(p, {c.b0_re, c.b0_im});
    const double s_out = outside_poynting_magnitude(ctx, pol);
    const double u_out = outside_energy_density(ctx, pol);

    Table t;
    t.columns = {"z_over_L", "Sx_norm", "Sz_norm", "u_norm", "theta_poynting_deg"};
    for (double s : linspace(-0.5, 1.5, c.grid_points)) {
        const double z = s * ctx.L();
        const auto S = poynting(ctx, pol, z);
        t.rows.push_back({s, S[0] / s_out, S[2] / s_out, energy_density(ctx, pol, z) / u_out,
                          rad_to_deg(poynting_angle(S))});
    }
    t.footer.push_back({"lambda_nm", units::to_nm(p.lambda)});
    t.footer.push_back({"g_cm1", units::to_cm1(p.g)});
    t.footer.push_back({"m", static_cast<double>(p.m)});
    if (pol == Polarization::TM) t.footer.push_back({"theta_tilde_deg", rad_to_deg(tm_boundary_angle(ctx.medium(), p.theta))});
    emit_table(c, t, out);
    return kOk;
}

inline int dispatch(RunConfig c, std::ostream& out, std::ostream& err) {
    if (c.format.empty()) c.format = c.command == "singularity" ? "json" : "csv";
    validate_common(c);
    if (c.command == "tmatrix") return cmd_tmatrix(c, out, err);
    if (c.command == "threshold") return cmd_threshold(c, out, err);
    if (c.command == "singularity") return cmd_singularity(c, out, err);
    if (c.command == "locus") return cmd_locus(c, out, err);
    if (c.command == "fields") return cmd_fields(c, out, err);
    throw ValidationError("unknown command '" + c.command + "'");
}

// --- argument parsing -----------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral singularities and lasing thresholds of a planar gain slab"};
    app.require_subcommand(0, 1);

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "Re-run from the metadata block of a JSON output");

    std::string L_text, lambda_text, lambda0_text, g0_max_text;
    std::optional<int> m;

    auto common = [&](CLI::App* sub, bool slab, bool wave) {
        sub->add_option("--format", cfg.format, "csv or json");
        sub->add_option("--out", cfg.out_path, "Write the table to a file instead of stdout");
        if (slab) {
            sub->add_option("--eta", cfg.eta, "Real refractive index");
            sub->add_option("--L", L_text, "Slab thickness (nm|um|mm|m)");
        }
        if (wave) {
            sub->add_option("--theta", cfg.theta_deg, "Incidence angle in degrees");
            sub->add_option("--pol", cfg.pol, "TE, TM (or both where supported)");
        }
    };

    auto* tm = app.add_subcommand("tmatrix", "Transfer matrix, det M and R/T amplitudes");
    common(tm, true, true);
    tm->add_option("--kappa", cfg.kappa, "Imaginary part of the index (negative = gain)");
    tm->add_option("--lambda", lambda_text, "Wavelength (nm|um|mm|m)");

    auto* th = app.add_subcommand("threshold", "Threshold gain vs angle at fixed wavelength");
    common(th, true, false);
    th->add_option("--lambda", lambda_text, "Wavelength");
    th->add_option("--theta-min", cfg.theta_min_deg, "Degrees");
    th->add_option("--theta-max", cfg.theta_max_deg, "Degrees");
    th->add_option("--theta-step", cfg.theta_step_deg, "Degrees");

    auto* sg = app.add_subcommand("singularity", "Solve one spectral singularity");
    common(sg, true, true);
    sg->add_option("--lambda", lambda_text, "Target wavelength");
    sg->add_option("--m", m, "Mode number (overrides --lambda)");
    sg->add_option("--mode-rule", cfg.mode_rule, "at-or-above or nearest");

    auto* lc = app.add_subcommand("locus", "Singularities in the (lambda, g0) plane for a two-level medium");
    common(lc, false, true);
    lc->add_option("--n0,--eta", cfg.eta, "Host refractive index");
    lc->add_option("--L", L_text, "Slab thickness");
    lc->add_option("--lambda0", lambda0_text, "Resonance wavelength");
    lc->add_option("--gamma-hat", cfg.gamma_hat, "Damping over resonance frequency");
    lc->add_option("--g0-max", g0_max_text, "Keep points with g0 <= cap (cm-1|m-1)");
    lc->add_option("--modes", cfg.modes, "Number of modes centred on lambda0");
    lc->add_option("--m-min", cfg.m_min, "First mode");
    lc->add_option("--m-max", cfg.m_max, "Last mode");
    lc->add_option("--index-model", cfg.index_model, "linearized or full");

    auto* fd = app.add_subcommand("fields", "Normalized Poynting vector and energy density profile");
    common(fd, true, true);
    fd->add_option("--lambda", lambda_text, "Target wavelength");
    fd->add_option("--m", m, "Mode number");
    fd->add_option("--mode-rule", cfg.mode_rule, "at-or-above or nearest");
    fd->add_option("--grid-points", cfg.grid_points, "Samples over z/L in [-0.5, 1.5]");
    fd->add_option("--b0-re", cfg.b0_re, "Outgoing amplitude, real part");
    fd->add_option("--b0-im", cfg.b0_im, "Outgoing amplitude, imaginary part");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError("cannot open config '" + config_path + "'");
            const json doc = json::parse(in);
            const json& params = doc.contains("metadata") ? doc.at("metadata").at("parameters") : doc;
            const std::string keep_out = cfg.out_path;
            cfg = from_json(params);
            if (!keep_out.empty()) cfg.out_path = keep_out;
        } else {
            const auto subs = app.get_subcommands();
            if (subs.empty()) {
                err << app.help();
                return kValidation;
            }
            cfg.command = subs.front()->get_name();
            if (!L_text.empty()) cfg.thickness = units::parse_length(L_text);
            if (!lambda_text.empty()) cfg.lambda = units::parse_length(lambda_text);
            if (!lambda0_text.empty()) cfg.lambda0 = units::parse_length(lambda0_text);
            if (!g0_max_text.empty()) cfg.g0_max = units::parse_gain(g0_max_text);
            if (m) cfg.m = m;
        }

        if (cfg.out_path.empty()) return dispatch(cfg, out, err);
        std::ofstream file(cfg.out_path);
        if (!file) throw ValidationError("cannot open output '" + cfg.out_path + "'");
        cfg.out_path.clear();  // metadata describes the table, not where it went
        return dispatch(cfg, file, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const json::exception& e) {
        err << "error: bad config: " << e.what() << '\n';
        return kValidation;
    } catch (const SpectralSingularityError& e) {
        err << "error: " << e.what() << '\n';
        return kNearSingular;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
}

}  // namespace spectral_slab::cli
