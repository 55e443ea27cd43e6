// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reslab/correlations.hpp"
#include "reslab/determinant.hpp"
#include "reslab/galerkin.hpp"
#include "reslab/io.hpp"
#include "reslab/mollifier.hpp"
#include "reslab/periodic_orbits.hpp"
#include "reslab/torus_map.hpp"

namespace fs = std::filesystem;
using namespace reslab;

namespace {

int failures = 0;

class Timer {
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
};

void report(int idx, const char* label, bool pass, const std::string& detail) {
    std::printf("criterion %d %s %s (%s)\n", idx, pass ? "[PASS]" : "[FAIL]", label,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) { return format_double(v); }

Mat2i cat_matrix() {
    Mat2i A;
    A << 2, 1, 1, 1;
    return A;
}

// --- criterion 1: cat-map Gamma exactness --------------------------------

void criterion_1() {
    Timer timer;
    MapSpec cat = make_linear_map(cat_matrix());
    auto table = gamma_table(cat, 10);
    double worst = 0.0;
    for (double g : table.gamma) worst = std::max(worst, std::abs(g - 1.0));
    bool counts_ok = table.counts[0] == 1 && table.counts[1] == 5 && table.counts[2] == 16;
    for (int n = 1; n <= 10; ++n) {
        counts_ok = counts_ok &&
                    table.counts[static_cast<std::size_t>(n - 1)] == fix_count_linear(cat_matrix(), n) &&
                    static_cast<std::int64_t>(fixed_points_linear(cat_matrix(), n).size()) ==
                        table.counts[static_cast<std::size_t>(n - 1)];
    }
    double t = timer.seconds();
    report(1, "cat-map Gamma exactness", worst <= 1e-10 && counts_ok && t <= 10.0,
           "max|Gamma_n - 1| = " + fmt(worst) + ", counts " + (counts_ok ? "exact" : "WRONG") +
               ", " + fmt(t) + " s");
}

// --- criterion 2: determinant identity -----------------------------------

void criterion_2() {
    Timer timer;
    MapSpec cat = make_linear_map(cat_matrix());
    auto poly = det_coefficients(gamma_table(cat, 10));
    bool coeff_ok = poly.coeffs[0] == std::complex<double>(1.0) &&
                    std::abs(poly.coeffs[1] + 1.0) <= 1e-10;
    double tail = 0.0;
    for (std::size_t k = 2; k <= 10; ++k) tail = std::max(tail, std::abs(poly.coeffs[k]));
    auto zeros = det_zeros(poly, 2.0);
    bool zeros_ok = zeros.size() == 1 && std::abs(zeros[0].z - 1.0) <= 1e-8;
    double t = timer.seconds();
    report(2, "determinant identity d(z) = 1 - z",
           coeff_ok && tail <= 1e-8 && zeros_ok && t <= 1.0,
           "max|c_k, k>=2| = " + fmt(tail) + ", " + std::to_string(zeros.size()) +
               " stable zero(s), |z-1| = " + fmt(zeros.empty() ? 1.0 : std::abs(zeros[0].z - 1.0)) +
               ", " + fmt(t) + " s");
}

// --- criterion 3: series round-trip on random tables ---------------------

void criterion_3() {
    std::mt19937_64 rng(314159);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 3 + static_cast<std::size_t>(rng() % 15);
        GammaTable t;
        t.N_max = static_cast<int>(n);
        t.counts.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) t.gamma.push_back(uniform(0.05, 2.5));
        auto poly = det_coefficients(t);

        // independent convolution check: exp(+sum Gamma_n z^n/n) * d(z) = 1
        std::vector<double> e(n + 1, 0.0);
        e[0] = 1.0;
        for (std::size_t k = 1; k <= n; ++k) {
            double acc = 0.0;
            for (std::size_t m = 1; m <= k; ++m) acc += t.gamma[m - 1] * e[k - m];
            e[k] = acc / static_cast<double>(k);
        }
        for (std::size_t k = 0; k <= n; ++k) {
            std::complex<double> conv = 0.0;
            for (std::size_t m = 0; m <= k; ++m) conv += e[m] * poly.coeffs[k - m];
            worst = std::max(worst, std::abs(conv - (k == 0 ? 1.0 : 0.0)));
        }
    }
    report(3, "series round-trip on 100 random Gamma tables", worst <= 1e-10,
           "max coefficient deviation = " + fmt(worst));
}

// --- criterion 4: Galerkin closed form ------------------------------------

void criterion_4() {
    AssembleOptions opt;
    opt.force_quadrature = true;
    opt.check_aliasing = false;

    MapSpec cat = make_linear_map(cat_matrix());
    auto tm = assemble_transfer_matrix(cat, 4, 16, opt);
    double worst_entry = 0.0;
    for (int j1 = -4; j1 <= 4; ++j1)
        for (int j2 = -4; j2 <= 4; ++j2)
            for (int k1 = -4; k1 <= 4; ++k1)
                for (int k2 = -4; k2 <= 4; ++k2) {
                    bool hit = (k1 == 2 * j1 + j2) && (k2 == j1 + j2); // k = A^T j
                    std::complex<double> want = hit ? 1.0 : 0.0;
                    worst_entry = std::max(worst_entry,
                                           std::abs(tm.M(tm.box.index(j1, j2), tm.box.index(k1, k2)) - want));
                }

    double worst_mass = 0.0;
    for (const auto& [name, spec] : catalog()) {
        auto m = assemble_transfer_matrix(spec, 4, 16, opt);
        int row0 = m.box.index(0, 0);
        for (int k = 0; k < m.box.dim(); ++k) {
            std::complex<double> want = (k == row0) ? 1.0 : 0.0;
            worst_mass = std::max(worst_mass, std::abs(m.M(row0, k) - want));
        }
    }
    report(4, "Galerkin closed form and mass row", worst_entry <= 1e-10 && worst_mass <= 1e-10,
           "indicator deviation = " + fmt(worst_entry) + ", mass-row deviation = " + fmt(worst_mass));
}

// --- criterion 5: three-way resonance agreement ----------------------------

void criterion_5() {
    Timer timer;
    MapSpec spec = catalog_map("cat-a");
    auto tm = assemble_transfer_matrix(spec, 12, 64); // alias check on
    auto spectrum = transfer_spectrum(tm);
    double cut = lambda_cut(spectrum, 0.2);
    double disk = 1.0 / cut;

    auto poly = det_coefficients(gamma_table(spec, 10));
    auto zeros_in_disk = det_zeros(poly, disk);
    auto eigs = trusted_eigenvalues(spectrum);

    bool zeros_ok = !zeros_in_disk.empty();
    double worst_res = 0.0;
    for (const auto& z : zeros_in_disk) {
        double best = 1e9;
        for (const auto& lam : eigs) best = std::min(best, std::abs(z.z * lam - 1.0));
        worst_res = std::max(worst_res, best);
    }
    zeros_ok = zeros_ok && worst_res <= 1e-2;

    // leading nontrivial Pade pole vs the corresponding determinant zero
    auto f = subtract_mean(FourierObservable::cosine(1, 0), spectrum);
    auto g = subtract_mean(FourierObservable::cosine(0, 1), spectrum);
    auto series = correlation_sequence_operator(tm, spectrum, f, g, 24);
    auto poles = stable_pade_poles(series);
    auto zeros_wide = det_zeros(poly, 1.5 * disk);
    bool pole_ok = false;
    double pole_dist = 1e9;
    if (!poles.empty()) {
        std::complex<double> lead = poles[0]; // sorted by modulus; z=1 absent
        for (const auto& z : zeros_wide) pole_dist = std::min(pole_dist, std::abs(lead - z.z));
        pole_ok = pole_dist <= 1e-2;
    }
    double t = timer.seconds();
    report(5, "three-way resonance agreement", zeros_ok && pole_ok && t <= 300.0,
           "lambda_cut = " + fmt(cut) + ", " + std::to_string(zeros_in_disk.size()) +
               " zero(s) in disk, worst |z*lambda-1| = " + fmt(worst_res) +
               ", |pole-zero| = " + fmt(pole_dist) + ", " + fmt(t) + " s");
}

// --- criterion 6: mollified trace scaling ----------------------------------

void criterion_6() {
    MapSpec spec = catalog_map("cat-a");
    std::vector<double> ladder = {0.08, 0.04, 0.02, 0.01};
    auto r2 = trace_error_scaling(spec, 1, 2, ladder);
    auto r4 = trace_error_scaling(spec, 1, 4, ladder);
    bool slope2_ok = std::isfinite(r2.slope) && r2.slope >= 2.0;
    bool slope4_ok = r4.floor_reached || (std::isfinite(r4.slope) && r4.slope >= 3.5);
    double moment_defect = std::max(verify_moments(build_kernel(2, 0.05), 2, 1024),
                                    verify_moments(build_kernel(4, 0.05), 4, 1024));
    report(6, "mollified trace scaling", slope2_ok && slope4_ok && moment_defect <= 1e-8,
           "r=2 slope = " + fmt(r2.slope) + ", r=4 slope = " +
               (std::isfinite(r4.slope) ? fmt(r4.slope) : std::string("floor")) +
               (r4.floor_reached ? " (floor reached)" : "") +
               ", kernel moment defect = " + fmt(moment_defect));
}

// --- criterion 7: Gamma boundedness proxy ----------------------------------

void criterion_7() {
    double worst_ratio = 0.0;
    std::string detail;
    for (const auto& [name, spec] : catalog()) {
        if (spec.epsilon > 0.02) continue;
        auto table = gamma_table(spec, 10);
        double lo = 1e300, hi = 0.0;
        for (double g : table.gamma) {
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
        double ratio = hi / lo;
        worst_ratio = std::max(worst_ratio, ratio);
        detail += name + ": " + fmt(ratio) + "; ";
    }
    report(7, "Gamma boundedness proxy (ratio <= 2)", worst_ratio <= 2.0, detail);
}

// --- criterion 8: correlation cross-method ---------------------------------

void criterion_8() {
    MapSpec spec = catalog_map("cat-a");
    AssembleOptions opt;
    opt.check_aliasing = false;
    auto tm = assemble_transfer_matrix(spec, 12, 64, opt);
    auto spectrum = transfer_spectrum(tm);
    auto f = subtract_mean(FourierObservable::cosine(1, 0), spectrum);
    auto g = subtract_mean(FourierObservable::cosine(0, 1), spectrum);
    auto op = correlation_sequence_operator(tm, spectrum, f, g, 10);
    auto tr = correlation_sequence_trajectory(spec, f, g, 10); // seed 42
    double worst = 0.0;
    for (int n = 0; n <= 10; ++n)
        worst = std::max(worst, std::abs(op.c[static_cast<std::size_t>(n)] -
                                         tr.c[static_cast<std::size_t>(n)]));

    // synthetic rational recovery
    CorrelationSeries synth;
    synth.N = 12;
    for (int n = 0; n <= 12; ++n)
        synth.c.push_back(0.8 * std::pow(0.5, n) + 1.2 * std::pow(-0.25, n));
    auto pade = pade_poles(synth, 1, 2);
    double pole_err = 1e9;
    if (pade.poles.size() == 2)
        pole_err = std::max(std::abs(pade.poles[0] - std::complex<double>(2.0)),
                            std::abs(pade.poles[1] + std::complex<double>(4.0)));
    report(8, "correlation cross-method and Pade exactness", worst <= 2e-3 && pole_err <= 1e-9,
           "max|op - traj| = " + fmt(worst) + ", synthetic pole error = " + fmt(pole_err));
}

// --- criterion 9: byte-identical reruns ------------------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_9(const std::string& cli) {
    fs::path work = fs::temp_directory_path() / "reslab_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    fs::path map = work / "map.json";
    io::write_file(map.string(), io::dump(io::map_spec_to_json(catalog_map("cat-a"))));

    auto run = [&](const std::string& args, const fs::path& out) {
        std::string cmd = "\"" + cli + "\" " + args + " --map \"" + map.string() + "\" --out \"" +
                          out.string() + "\" > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool ran = true;
    ran = ran && run("gamma --N 6", work / "g1") && run("gamma --N 6", work / "g2");
    ran = ran && run("resonances --N 6 --K 8 --grid 40 --corr-N 16 "
                     "--corr-method trajectory --seed 42",
                     work / "r1");
    ran = ran && run("resonances --N 6 --K 8 --grid 40 --corr-N 16 "
                     "--corr-method trajectory --seed 42",
                     work / "r2");

    bool identical = ran;
    std::string detail = ran ? "" : "CLI run failed; ";
    if (ran) {
        for (auto& [a, b] : std::vector<std::pair<fs::path, fs::path>>{
                 {work / "g1", work / "g2"}, {work / "r1", work / "r2"}}) {
            for (const auto& entry : fs::directory_iterator(a)) {
                fs::path other = b / entry.path().filename();
                if (!fs::exists(other) || read_file(entry.path()) != read_file(other)) {
                    identical = false;
                    detail += entry.path().filename().string() + " differs; ";
                }
            }
        }
    }
    if (identical) detail = "gamma and resonances outputs byte-identical across reruns";
    report(9, "determinism of output files", identical, detail);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli = "./tools/reslab";
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(cli);

    if (failures == 0) std::printf("all acceptance criteria passed\n");
    else std::printf("%d criterion(s) FAILED\n", failures);
    return failures;
}
