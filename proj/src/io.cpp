#include "reslab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace reslab::io {

json map_spec_to_json(const MapSpec& spec) {
    json j;
    j["A"] = {{spec.A(0, 0), spec.A(0, 1)}, {spec.A(1, 0), spec.A(1, 1)}};
    j["epsilon"] = spec.epsilon;
    j["perturbation"] = json::array();
    for (const auto& t : spec.perturbation) {
        json term;
        term["k"] = {t.k[0], t.k[1]};
        term["amp"] = {t.amp[0], t.amp[1]};
        term["phase"] = {t.phase[0], t.phase[1]};
        j["perturbation"].push_back(term);
    }
    return j;
}

MapSpec map_spec_from_json(const json& j, int grid_resolution) {
    try {
        Mat2i A;
        const auto& a = j.at("A");
        if (a.size() != 2 || a[0].size() != 2 || a[1].size() != 2)
            throw ParseError("field A must be a 2x2 integer matrix");
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                A(r, c) = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<std::int64_t>();
        double epsilon = j.value("epsilon", 0.0);
        std::vector<FourierTerm> terms;
        if (j.contains("perturbation")) {
            for (const auto& tj : j.at("perturbation")) {
                FourierTerm t;
                t.k = {tj.at("k")[0].get<int>(), tj.at("k")[1].get<int>()};
                t.amp = {tj.at("amp")[0].get<double>(), tj.at("amp")[1].get<double>()};
                t.phase = {tj.at("phase")[0].get<double>(), tj.at("phase")[1].get<double>()};
                terms.push_back(t);
            }
        }
        if (terms.empty() || epsilon == 0.0) {
            MapSpec spec = make_linear_map(A);
            spec.perturbation = std::move(terms);
            spec.epsilon = epsilon;
            return spec;
        }
        return make_perturbed_map(A, std::move(terms), epsilon, grid_resolution);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed map spec: ") + e.what());
    }
}

MapSpec load_map_spec(const std::string& path, int grid_resolution) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open map file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return map_spec_from_json(j, grid_resolution);
}

std::string map_spec_hash(const MapSpec& spec) {
    return hex64(fnv1a64(map_spec_to_json(spec).dump()));
}

json hyperbolicity_to_json(const HyperbolicityReport& rep) {
    json j;
    j["cone_half_angle"] = rep.cone_half_angle;
    j["min_expansion"] = rep.min_expansion;
    j["max_contraction"] = rep.max_contraction;
    j["grid_resolution"] = rep.grid_resolution;
    j["pass"] = rep.pass;
    return j;
}

json gamma_to_json(const GammaTable& table) {
    json j;
    j["N_max"] = table.N_max;
    j["gamma"] = table.gamma;
    j["counts"] = table.counts;
    j["max_residual"] = table.max_residual;
    return j;
}

GammaTable gamma_from_json(const json& j) {
    try {
        GammaTable t;
        t.N_max = j.at("N_max").get<int>();
        t.gamma = j.at("gamma").get<std::vector<double>>();
        t.counts = j.at("counts").get<std::vector<std::int64_t>>();
        t.max_residual = j.at("max_residual").get<double>();
        if (static_cast<int>(t.gamma.size()) != t.N_max ||
            static_cast<int>(t.counts.size()) != t.N_max)
            throw ParseError("gamma table lengths disagree with N_max");
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed gamma table: ") + e.what());
    }
}

std::string gamma_to_csv(const GammaTable& table, const json& header) {
    std::ostringstream out;
    out << csv_header(header);
    out << "n,count,gamma,max_residual\n";
    for (int n = 1; n <= table.N_max; ++n)
        out << n << ',' << table.counts[static_cast<std::size_t>(n - 1)] << ','
            << format_double(table.gamma[static_cast<std::size_t>(n - 1)]) << ','
            << format_double(table.max_residual) << '\n';
    return out.str();
}

json det_poly_to_json(const DetPoly& poly) {
    json j;
    std::vector<double> re, im;
    for (const auto& c : poly.coeffs) {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["coeffs_re"] = re;
    j["coeffs_im"] = im;
    j["N"] = poly.N;
    j["trust_radius"] = poly.trust_radius;
    j["roundtrip_error"] = poly.roundtrip_error;
    return j;
}

DetPoly det_poly_from_json(const json& j) {
    try {
        DetPoly p;
        auto re = j.at("coeffs_re").get<std::vector<double>>();
        auto im = j.at("coeffs_im").get<std::vector<double>>();
        if (re.size() != im.size()) throw ParseError("coefficient arrays disagree");
        for (std::size_t i = 0; i < re.size(); ++i) p.coeffs.emplace_back(re[i], im[i]);
        p.N = j.at("N").get<int>();
        p.trust_radius = j.at("trust_radius").get<double>();
        p.roundtrip_error = j.value("roundtrip_error", 0.0);
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed determinant polynomial: ") + e.what());
    }
}

std::string det_zeros_to_csv(const std::vector<DetZero>& zeros, const json& header) {
    std::ostringstream out;
    out << csv_header(header);
    out << "re,im,stable_shift\n";
    for (const auto& z : zeros)
        out << format_double(z.z.real()) << ',' << format_double(z.z.imag()) << ','
            << format_double(z.stability_shift) << '\n';
    return out.str();
}

json spectrum_to_json(const SpectrumResult& s) {
    json j;
    j["K"] = s.K;
    j["gap"] = s.gap;
    j["eigenvalues"] = json::array();
    for (const auto& e : s.eigenvalues) {
        json rec;
        rec["re"] = e.value.real();
        rec["im"] = e.value.imag();
        rec["trusted"] = e.trusted;
        rec["stability_shift"] = e.stability_shift;
        j["eigenvalues"].push_back(rec);
    }
    std::vector<double> re, im;
    for (Eigen::Index i = 0; i < s.srb_coeffs.size(); ++i) {
        re.push_back(s.srb_coeffs(i).real());
        im.push_back(s.srb_coeffs(i).imag());
    }
    j["srb_coeffs_re"] = re;
    j["srb_coeffs_im"] = im;
    return j;
}

std::string srb_density_to_csv(const SpectrumResult& s, int grid, const json& header) {
    auto rho = srb_density_grid(s, grid);
    std::ostringstream out;
    out << csv_header(header);
    out << "x,y,rho\n";
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            out << format_double(static_cast<double>(i) / grid) << ','
                << format_double(static_cast<double>(j) / grid) << ','
                << format_double(rho[static_cast<std::size_t>(i) * grid + j].real()) << '\n';
    return out.str();
}

std::string scaling_to_csv(const ScalingResult& s, const json& header) {
    std::ostringstream out;
    out << csv_header(header);
    out << "epsilon,trace,gamma_ref,abs_error\n";
    for (std::size_t i = 0; i < s.epsilons.size(); ++i)
        out << format_double(s.epsilons[i]) << ',' << format_double(s.traces[i]) << ','
            << format_double(s.gamma_ref) << ',' << format_double(s.abs_errors[i]) << '\n';
    return out.str();
}

json scaling_to_json(const ScalingResult& s) {
    json j;
    j["epsilons"] = s.epsilons;
    j["traces"] = s.traces;
    j["abs_errors"] = s.abs_errors;
    j["gamma_ref"] = s.gamma_ref;
    if (std::isfinite(s.slope)) j["slope"] = s.slope;
    else j["slope"] = nullptr;
    j["floor_reached"] = s.floor_reached;
    j["floor"] = s.floor;
    return j;
}

std::string series_to_csv(const CorrelationSeries& s, const json& header) {
    std::ostringstream out;
    out << csv_header(header);
    out << "n,c_n,method\n";
    const char* m = s.method == CorrelationMethod::operator_route ? "operator" : "trajectory";
    for (std::size_t n = 0; n < s.c.size(); ++n)
        out << n << ',' << format_double(s.c[n]) << ',' << m << '\n';
    return out.str();
}

json pade_to_json(const PadePoles& p) {
    json j;
    j["L"] = p.L;
    j["M"] = p.M;
    j["condition_estimate"] = p.condition_estimate;
    j["trusted"] = p.trusted;
    j["poles"] = json::array();
    for (std::size_t i = 0; i < p.poles.size(); ++i) {
        json rec;
        rec["re"] = p.poles[i].real();
        rec["im"] = p.poles[i].imag();
        rec["residue_re"] = p.residues[i].real();
        rec["residue_im"] = p.residues[i].imag();
        j["poles"].push_back(rec);
    }
    return j;
}

namespace {

json complex_to_json(const std::complex<double>& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

} // namespace

json report_to_json(const UnifiedReport& rep) {
    json j;
    j["tol_eigenvalue"] = rep.tol_eigenvalue;
    j["tol_pade"] = rep.tol_pade;
    j["triples"] = json::array();
    for (const auto& t : rep.triples) {
        json row;
        row["zero"] = complex_to_json(t.zero);
        row["eigenvalue"] = t.eigenvalue ? complex_to_json(*t.eigenvalue) : json(nullptr);
        row["pade_pole"] = t.pade_pole ? complex_to_json(*t.pade_pole) : json(nullptr);
        row["residual_eigenvalue"] = t.eigenvalue ? json(t.residual_eigenvalue) : json(nullptr);
        row["residual_pade"] = t.pade_pole ? json(t.residual_pade) : json(nullptr);
        j["triples"].push_back(row);
    }
    j["unmatched_eigenvalues"] = json::array();
    for (const auto& e : rep.unmatched_eigenvalues)
        j["unmatched_eigenvalues"].push_back(complex_to_json(e));
    j["unmatched_poles"] = json::array();
    for (const auto& p : rep.unmatched_poles) j["unmatched_poles"].push_back(complex_to_json(p));
    return j;
}

namespace {

std::string complex_str(const std::complex<double>& z) {
    std::ostringstream s;
    s << format_double(z.real());
    if (z.imag() != 0.0)
        s << (z.imag() < 0 ? " - " : " + ") << format_double(std::abs(z.imag())) << "i";
    return s.str();
}

} // namespace

std::string report_to_markdown(const UnifiedReport& rep) {
    std::ostringstream out;
    out << "| determinant zero | eigenvalue | |z*lambda - 1| | Pade pole | |p - z| |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& t : rep.triples) {
        out << "| " << complex_str(t.zero) << " | "
            << (t.eigenvalue ? complex_str(*t.eigenvalue) : "-") << " | "
            << (t.eigenvalue ? format_double(t.residual_eigenvalue) : "-") << " | "
            << (t.pade_pole ? complex_str(*t.pade_pole) : "-") << " | "
            << (t.pade_pole ? format_double(t.residual_pade) : "-") << " |\n";
    }
    if (!rep.unmatched_eigenvalues.empty()) {
        out << "\nunmatched eigenvalues:";
        for (const auto& e : rep.unmatched_eigenvalues) out << ' ' << complex_str(e) << ';';
        out << '\n';
    }
    if (!rep.unmatched_poles.empty()) {
        out << "\nunmatched Pade poles:";
        for (const auto& p : rep.unmatched_poles) out << ' ' << complex_str(p) << ';';
        out << '\n';
    }
    return out.str();
}

std::string csv_header(const json& meta) {
    std::ostringstream out;
    for (auto it = meta.begin(); it != meta.end(); ++it)
        out << "# " << it.key() << " = " << it.value().dump() << '\n';
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace reslab::io
