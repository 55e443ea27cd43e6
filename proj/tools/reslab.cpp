// reslab - dynamical determinants, transfer-operator spectra and Ruelle
// resonances for Anosov maps of the 2-torus.
//
// Subcommands: map-info, gamma, det, spectrum, trace-check, resonances.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "reslab/correlations.hpp"
#include "reslab/determinant.hpp"
#include "reslab/galerkin.hpp"
#include "reslab/io.hpp"
#include "reslab/mollifier.hpp"
#include "reslab/periodic_orbits.hpp"
#include "reslab/torus_map.hpp"

namespace fs = std::filesystem;
using reslab::io::json;

namespace {

struct Common {
    std::string map_path;
    std::string out_dir = ".";
    std::string format = "both"; // csv | json | both
    std::uint64_t seed = 42;
};

void add_common(CLI::App* cmd, Common& c, bool needs_map = true) {
    if (needs_map)
        cmd->add_option("--map", c.map_path, "map spec JSON file")->required();
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--format", c.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--seed", c.seed, "RNG seed for trajectory sampling");
}

bool want_csv(const Common& c) { return c.format != "json"; }
bool want_json(const Common& c) { return c.format != "csv"; }

void emit(const Common& c, const std::string& name_json, const json& j,
          const std::string& name_csv = "", const std::string& csv = "") {
    fs::create_directories(c.out_dir);
    if (want_json(c) && !name_json.empty())
        reslab::io::write_file((fs::path(c.out_dir) / name_json).string(), reslab::io::dump(j));
    if (want_csv(c) && !name_csv.empty())
        reslab::io::write_file((fs::path(c.out_dir) / name_csv).string(), csv);
}

json base_config(const reslab::MapSpec& spec, const json& params) {
    json j;
    j["map"] = reslab::io::map_spec_to_json(spec);
    j["map_hash"] = reslab::io::map_spec_hash(spec);
    j["params"] = params;
    return j;
}

json flat_header(const json& config) {
    json h;
    h["map_hash"] = config["map_hash"];
    for (auto it = config["params"].begin(); it != config["params"].end(); ++it)
        h[it.key()] = it.value();
    return h;
}

reslab::FourierObservable parse_observable(const std::string& text) {
    // "cos:k1,k2" or "sin:k1,k2"
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw reslab::ParseError("observable must look like cos:1,0 or sin:0,1");
    std::string kind = text.substr(0, colon);
    int k1 = 0, k2 = 0;
    char comma = 0;
    std::istringstream rest(text.substr(colon + 1));
    rest >> k1 >> comma >> k2;
    if (!rest || comma != ',')
        throw reslab::ParseError("bad observable wavevector in '" + text + "'");
    if (kind == "cos") return reslab::FourierObservable::cosine(k1, k2);
    if (kind == "sin") return reslab::FourierObservable::sine(k1, k2);
    throw reslab::ParseError("unknown observable kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

int cmd_map_info(const Common& c, int grid) {
    std::ifstream in(c.map_path);
    if (!in) throw reslab::ParseError("cannot open map file: " + c.map_path);
    json raw;
    try {
        in >> raw;
    } catch (const json::exception& e) {
        throw reslab::ParseError("invalid JSON in " + c.map_path + ": " + e.what());
    }

    json out;
    out["command"] = "map-info";
    json params;
    params["grid"] = grid;
    try {
        reslab::MapSpec spec = reslab::io::map_spec_from_json(raw, grid);
        auto rep = reslab::verify_hyperbolicity(spec, grid);
        out["config"] = base_config(spec, params);
        out["report"] = reslab::io::hyperbolicity_to_json(rep);
    } catch (const reslab::NotHyperbolic& e) {
        out["config"] = json{{"map", raw}, {"map_hash", reslab::hex64(reslab::fnv1a64(raw.dump()))}, {"params", params}};
        out["report"] = json{{"pass", false}, {"reason", e.what()}};
    } catch (const reslab::ConeConditionFailed& e) {
        out["config"] = json{{"map", raw}, {"map_hash", reslab::hex64(reslab::fnv1a64(raw.dump()))}, {"params", params}};
        out["report"] = json{{"pass", false}, {"reason", e.what()}};
    }
    emit(c, "map_info.json", out);
    std::cout << out["report"].dump(2) << "\n";
    return 0;
}

int cmd_gamma(const Common& c, int N) {
    reslab::MapSpec spec = reslab::io::load_map_spec(c.map_path);
    auto table = reslab::gamma_table(spec, N);
    json params{{"N", N}};
    json config = base_config(spec, params);
    json out{{"command", "gamma"}, {"config", config}, {"table", reslab::io::gamma_to_json(table)}};
    emit(c, "gamma.json", out, "gamma.csv", reslab::io::gamma_to_csv(table, flat_header(config)));
    std::cout << "gamma table written for N=" << N << "\n";
    return 0;
}

int cmd_det(const Common& c, const std::string& gamma_path, double radius) {
    std::ifstream in(gamma_path);
    if (!in) throw reslab::ParseError("cannot open gamma file: " + gamma_path);
    json gj;
    try {
        in >> gj;
    } catch (const json::exception& e) {
        throw reslab::ParseError("invalid JSON in " + gamma_path + ": " + e.what());
    }
    reslab::GammaTable table = reslab::io::gamma_from_json(gj.contains("table") ? gj["table"] : gj);
    auto poly = reslab::det_coefficients(table);
    auto zeros = reslab::det_zeros(poly, radius);

    json params{{"radius", radius}, {"gamma_input", gamma_path}};
    json config = gj.contains("config") ? gj["config"] : json{{"params", params}};
    config["params"] = params;
    json out{{"command", "det"},
             {"config", config},
             {"poly", reslab::io::det_poly_to_json(poly)},
             {"zeros", json::array()}};
    for (const auto& z : zeros)
        out["zeros"].push_back(json{{"re", z.z.real()}, {"im", z.z.imag()}, {"stable_shift", z.stability_shift}});
    json header = params;
    if (config.contains("map_hash")) header["map_hash"] = config["map_hash"];
    emit(c, "det.json", out, "det_zeros.csv", reslab::io::det_zeros_to_csv(zeros, header));
    std::cout << zeros.size() << " stable zero(s) in |z| <= " << radius << "\n";
    return 0;
}

int cmd_spectrum(const Common& c, int K, int G, int density_grid, std::vector<std::string>& warnings) {
    reslab::MapSpec spec = reslab::io::load_map_spec(c.map_path);
    if (G == 0) G = 4 * K;
    auto tm = reslab::assemble_transfer_matrix(spec, K, G);
    if (tm.alias_warning)
        warnings.push_back("AliasWarning: entries moved " + reslab::format_double(tm.alias_shift) +
                           " from G to 2G");
    auto s = reslab::transfer_spectrum(tm);
    json params{{"K", K}, {"G", G}};
    json config = base_config(spec, params);
    json out{{"command", "spectrum"}, {"config", config}, {"spectrum", reslab::io::spectrum_to_json(s)}};
    if (tm.alias_warning) out["warnings"] = warnings;
    emit(c, "spectrum.json", out, "srb_density.csv",
         reslab::io::srb_density_to_csv(s, density_grid, flat_header(config)));
    std::cout << "trusted eigenvalues: " << reslab::trusted_eigenvalues(s).size()
              << ", gap = " << s.gap << "\n";
    return 0;
}

int cmd_trace_check(const Common& c, int n, int r, std::vector<double> ladder,
                    std::vector<std::string>& warnings) {
    reslab::MapSpec spec = reslab::io::load_map_spec(c.map_path);
    auto res = reslab::trace_error_scaling(spec, n, r, ladder);
    if (res.floor_reached) warnings.push_back("ErrorFloorReached: some residuals at quadrature floor");
    json params{{"n", n}, {"moment_order", r}, {"eps_ladder", ladder}};
    json config = base_config(spec, params);
    json out{{"command", "trace-check"}, {"config", config}, {"scaling", reslab::io::scaling_to_json(res)}};
    if (!warnings.empty()) out["warnings"] = warnings;
    emit(c, "trace_scaling.json", out, "trace_scaling.csv",
         reslab::io::scaling_to_csv(res, flat_header(config)));
    std::cout << "fitted slope: " << (std::isfinite(res.slope) ? reslab::format_double(res.slope) : "floor")
              << "\n";
    return 0;
}

int cmd_resonances(const Common& c, int N, int K, int G, int corr_N, int pade_L, int pade_M,
                   const std::string& obs_f, const std::string& obs_g, bool no_mean_subtract,
                   double radius, const std::string& corr_method,
                   std::vector<std::string>& warnings) {
    reslab::MapSpec spec = reslab::io::load_map_spec(c.map_path);
    if (G == 0) G = 4 * K;

    auto table = reslab::gamma_table(spec, N);
    auto poly = reslab::det_coefficients(table);
    auto tm = reslab::assemble_transfer_matrix(spec, K, G);
    if (tm.alias_warning)
        warnings.push_back("AliasWarning: entries moved " + reslab::format_double(tm.alias_shift) +
                           " from G to 2G");
    auto spectrum = reslab::transfer_spectrum(tm);

    reslab::FourierObservable f = parse_observable(obs_f);
    reslab::FourierObservable g = parse_observable(obs_g);
    if (!no_mean_subtract) {
        f = reslab::subtract_mean(f, spectrum);
        g = reslab::subtract_mean(g, spectrum);
    }
    reslab::CorrelationSeries series;
    if (corr_method == "trajectory") {
        reslab::TrajectoryOptions topt;
        topt.seed = c.seed;
        series = reslab::correlation_sequence_trajectory(spec, f, g, corr_N, topt);
    } else {
        series = reslab::correlation_sequence_operator(tm, spectrum, f, g, corr_N);
    }
    auto pade = reslab::pade_poles(series, pade_L, pade_M);
    if (!pade.trusted)
        warnings.push_back("HankelIllConditioned: condition estimate " +
                           reslab::format_double(pade.condition_estimate));
    auto stable = reslab::stable_pade_poles(series);

    // default zero-search disk: slightly past 1/lambda_cut so boundary
    // zeros (reciprocals of the cut eigenvalue) are not clipped
    if (radius == 0.0) radius = 1.5 / reslab::lambda_cut(spectrum);
    auto zeros = reslab::det_zeros(poly, radius);
    auto report = reslab::match_all(zeros, spectrum, stable);

    json params{{"N", N},       {"K", K},           {"G", G},
                {"corr_N", corr_N}, {"pade", {pade_L, pade_M}}, {"obs_f", obs_f},
                {"obs_g", obs_g},   {"radius", radius},         {"seed", c.seed},
                {"corr_method", corr_method}};
    json config = base_config(spec, params);
    json out{{"command", "resonances"},
             {"config", config},
             {"gamma", reslab::io::gamma_to_json(table)},
             {"poly", reslab::io::det_poly_to_json(poly)},
             {"spectrum", reslab::io::spectrum_to_json(spectrum)},
             {"pade", reslab::io::pade_to_json(pade)},
             {"report", reslab::io::report_to_json(report)}};
    if (!warnings.empty()) out["warnings"] = warnings;
    emit(c, "resonances.json", out, "series.csv",
         reslab::io::series_to_csv(series, flat_header(config)));
    fs::create_directories(c.out_dir);
    reslab::io::write_file((fs::path(c.out_dir) / "resonances.md").string(),
                           reslab::io::report_to_markdown(report));
    std::cout << reslab::io::report_to_markdown(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"transfer-operator spectra, dynamical determinants and Ruelle "
                 "resonances for Anosov maps of T^2"};
    app.require_subcommand(1);

    Common c_info, c_gamma, c_det, c_spec, c_trace, c_res;
    int grid = 256, gamma_N = 10, spec_K = 8, spec_G = 0, density_grid = 64;
    int trace_n = 1, trace_r = 2;
    int res_N = 10, res_K = 12, res_G = 0, corr_N = 24;
    std::vector<int> pade_deg{4, 4};
    std::vector<double> ladder{0.08, 0.04, 0.02, 0.01};
    std::string gamma_path, obs_f = "cos:1,0", obs_g = "cos:0,1", corr_method = "operator";
    bool no_mean_subtract = false;
    double det_radius = 2.0, res_radius = 0.0;

    auto* info = app.add_subcommand("map-info", "hyperbolicity certificate for a map spec");
    add_common(info, c_info);
    info->add_option("--grid", grid, "cone-check grid resolution")->check(CLI::Range(16, 4096));

    auto* gamma = app.add_subcommand("gamma", "periodic-orbit sums Gamma_1..Gamma_N");
    add_common(gamma, c_gamma);
    gamma->add_option("--N", gamma_N, "number of periods")->check(CLI::PositiveNumber);

    auto* det = app.add_subcommand("det", "dynamical determinant coefficients and zeros");
    add_common(det, c_det, /*needs_map=*/false);
    det->add_option("--gamma", gamma_path, "gamma JSON produced by the gamma command")->required();
    det->add_option("--radius", det_radius, "zero search disk radius");

    auto* spectrum = app.add_subcommand("spectrum", "Fourier-Galerkin transfer spectrum and SRB density");
    add_common(spectrum, c_spec);
    spectrum->add_option("--K", spec_K, "mode cutoff")->check(CLI::PositiveNumber);
    spectrum->add_option("--grid", spec_G, "quadrature grid (default 4K)");
    spectrum->add_option("--density-grid", density_grid, "SRB density output grid");

    auto* trace = app.add_subcommand("trace-check", "mollified trace scaling study");
    add_common(trace, c_trace);
    trace->add_option("--n", trace_n, "period")->check(CLI::PositiveNumber);
    trace->add_option("--moment-order", trace_r, "kernel moment order r (even)");
    trace->add_option("--eps-ladder", ladder, "kernel epsilon ladder")->delimiter(',')->expected(1, 64);

    auto* res = app.add_subcommand("resonances", "three-way resonance match");
    add_common(res, c_res);
    res->add_option("--N", res_N, "gamma periods");
    res->add_option("--K", res_K, "mode cutoff");
    res->add_option("--grid", res_G, "quadrature grid (default 4K)");
    res->add_option("--corr-N", corr_N, "correlation series length");
    res->add_option("--pade", pade_deg, "Pade degrees L,M")->delimiter(',')->expected(2);
    res->add_option("--obs-f", obs_f, "observable f, e.g. cos:1,0");
    res->add_option("--obs-g", obs_g, "observable g, e.g. cos:0,1");
    res->add_flag("--no-mean-subtract", no_mean_subtract, "skip SRB mean subtraction");
    res->add_option("--corr-method", corr_method, "correlation route: operator or trajectory")
        ->check(CLI::IsMember({"operator", "trajectory"}));
    res->add_option("--radius", res_radius, "zero search disk radius (default 1.5/lambda_cut)");

    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> warnings;
    try {
        if (info->parsed()) return cmd_map_info(c_info, grid);
        if (gamma->parsed()) return cmd_gamma(c_gamma, gamma_N);
        if (det->parsed()) return cmd_det(c_det, gamma_path, det_radius);
        if (spectrum->parsed()) return cmd_spectrum(c_spec, spec_K, spec_G, density_grid, warnings);
        if (trace->parsed())
            return cmd_trace_check(c_trace, trace_n, trace_r, ladder, warnings);
        if (res->parsed())
            return cmd_resonances(c_res, res_N, res_K, res_G, corr_N, pade_deg[0], pade_deg[1],
                                  obs_f, obs_g, no_mean_subtract, res_radius, corr_method,
                                  warnings);
    } catch (const reslab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
