#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "reslab/correlations.hpp"
#include "reslab/io.hpp"

using namespace reslab;

namespace {

struct Setup {
    MapSpec spec;
    TransferMatrix tm;
    SpectrumResult spectrum;
    FourierObservable f, g;
};

const Setup& perturbed_setup() {
    static Setup s = [] {
        Setup r;
        r.spec = test::perturbed_cat(0.01);
        AssembleOptions opt;
        opt.check_aliasing = false;
        r.tm = assemble_transfer_matrix(r.spec, 12, 64, opt);
        r.spectrum = transfer_spectrum(r.tm);
        r.f = subtract_mean(FourierObservable::cosine(1, 0), r.spectrum);
        r.g = subtract_mean(FourierObservable::cosine(0, 1), r.spectrum);
        return r;
    }();
    return s;
}

CorrelationSeries synthetic_series(const std::vector<std::complex<double>>& lambdas,
                                   const std::vector<std::complex<double>>& weights, int N) {
    CorrelationSeries s;
    s.N = N;
    for (int n = 0; n <= N; ++n) {
        std::complex<double> c = 0.0;
        for (std::size_t i = 0; i < lambdas.size(); ++i) c += weights[i] * std::pow(lambdas[i], n);
        s.c.push_back(c.real());
    }
    return s;
}

} // namespace

TEST_CASE("linear cat map: exact mode bookkeeping gives a vanishing sequence") {
    MapSpec cat = make_linear_map(test::cat_matrix());
    auto tm = assemble_transfer_matrix(cat, 8, 32);
    auto s = transfer_spectrum(tm);
    auto f = subtract_mean(FourierObservable::cosine(1, 0), s);
    auto g = subtract_mean(FourierObservable::cosine(0, 1), s);
    auto series = correlation_sequence_operator(tm, s, f, g, 8);

    // oracle: mu(e_k e_{A^Tn m}) = [k + A^Tn m = 0]; the mode (0,+-1) never
    // reaches -+(1,0) under A^T, so every c_n vanishes
    for (int n = 0; n <= 8; ++n) CHECK(std::abs(series.c[static_cast<std::size_t>(n)]) <= 1e-14);
}

TEST_CASE("autocorrelation at lag zero is the SRB second moment") {
    const Setup& su = perturbed_setup();
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.f, 4);
    CHECK(series.c[0] > 0.0);
    double direct = 0.0;
    for (const auto& m1 : su.f.modes)
        for (const auto& m2 : su.f.modes) {
            int k1 = m1.k[0] + m2.k[0], k2 = m1.k[1] + m2.k[1];
            ModeBox box{su.spectrum.K};
            direct += (m1.amp * m2.amp * su.spectrum.srb_coeffs(box.index(-k1, -k2))).real();
        }
    CHECK(series.c[0] == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("operator and trajectory routes agree at the statistical scale") {
    const Setup& su = perturbed_setup();
    auto op = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 10);
    auto tr = correlation_sequence_trajectory(su.spec, su.f, su.g, 10);
    for (int n = 0; n <= 10; ++n)
        CHECK(std::abs(op.c[static_cast<std::size_t>(n)] - tr.c[static_cast<std::size_t>(n)]) <= 2e-3);
}

TEST_CASE("mean subtraction is mandatory") {
    const Setup& su = perturbed_setup();
    FourierObservable raw = FourierObservable::cosine(1, 0);
    CHECK_THROWS_AS(correlation_sequence_operator(su.tm, su.spectrum, raw, su.g, 4),
                    NotMeanZero);
    CHECK_THROWS_AS(correlation_sequence_trajectory(su.spec, su.f, raw, 4), NotMeanZero);
}

TEST_CASE("operator route rejects an untrusted spectrum") {
    const Setup& su = perturbed_setup();
    SpectrumResult bad = su.spectrum;
    for (auto& e : bad.eigenvalues) e.trusted = false;
    CHECK_THROWS_AS(correlation_sequence_operator(su.tm, bad, su.f, su.g, 4),
                    UntrustedSpectrum);
}

TEST_CASE("generating function: truncated series evaluation") {
    CorrelationSeries geo;
    geo.N = 30;
    for (int n = 0; n <= 30; ++n) geo.c.push_back(std::pow(0.5, n));
    CHECK(generating_function(geo, 0.0) == 1.0);
    // geometric partial sum at z = 1/2: sum (1/4)^n -> 4/3
    CHECK(std::abs(generating_function(geo, 0.5) - 4.0 / 3.0) <= 1e-9);

    const Setup& su = perturbed_setup();
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 40);
    CorrelationSeries shorter = series;
    shorter.c.resize(36);
    std::complex<double> z(0.64, 0.48); // |z| = 0.8
    CHECK(std::abs(generating_function(series, z) - generating_function(shorter, z)) <= 1e-6);
}

TEST_CASE("resolvent identity on the Galerkin section") {
    const Setup& su = perturbed_setup();
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 80);
    ModeBox box{su.spectrum.K};

    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(box.dim());
    for (int idx = 0; idx < box.dim(); ++idx) {
        auto [k1, k2] = box.mode(idx);
        std::complex<double> acc = 0.0;
        for (const auto& m : su.f.modes) {
            int r1 = k1 - m.k[0], r2 = k2 - m.k[1];
            if (box.contains(r1, r2)) acc += m.amp * su.spectrum.srb_coeffs(box.index(r1, r2));
        }
        v(idx) = acc;
    }
    for (std::complex<double> z : {std::complex<double>(0.8, 0.0), std::complex<double>(0.0, 0.8),
                                   std::complex<double>(-0.56, 0.56)}) {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(box.dim(), box.dim()) - z * su.tm.M;
        Eigen::VectorXcd w = A.partialPivLu().solve(v);
        std::complex<double> direct = 0.0;
        for (const auto& m : su.g.modes) direct += m.amp * w(box.index(-m.k[0], -m.k[1]));
        CHECK(std::abs(generating_function(series, z) - direct) <= 1e-6);
    }
}

TEST_CASE("decay envelope is consistent with the spectral gap") {
    const Setup& su = perturbed_setup();
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 24);
    auto env = decay_envelope(series);
    CHECK(env.rho > 1.0);
    CHECK(std::abs(1.0 / env.rho - su.spectrum.gap) <= 5e-2);
}

TEST_CASE("time reversal: mu(f g o T^{-n}) equals the reversed-pair sequence") {
    const Setup& su = perturbed_setup();
    auto op_rev = correlation_sequence_operator(su.tm, su.spectrum, su.g, su.f, 10);
    auto tr_rev = correlation_sequence_trajectory(su.spec, su.g, su.f, 10);
    for (int n = 0; n <= 10; ++n)
        CHECK(std::abs(op_rev.c[static_cast<std::size_t>(n)] -
                       tr_rev.c[static_cast<std::size_t>(n)]) <= 2e-3);
}

TEST_CASE("correlation spectrum assembly") {
    CorrelationSeries white;
    white.N = 6;
    white.c = {0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    for (double omega : {0.0, 0.4, 2.1}) {
        auto v = correlation_spectrum(white, white, omega);
        CHECK(std::abs(v.value - 0.7) <= 1e-14); // white spectrum is flat
    }

    // C_{f,f} is real for a real observable
    const Setup& su = perturbed_setup();
    auto ff = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.f, 24);
    for (double omega : {0.3, 1.0, 2.8}) {
        auto v = correlation_spectrum(ff, ff, omega);
        CHECK(std::abs(v.value.imag()) <= 1e-10);
    }
}

TEST_CASE("correlation spectrum matches the DFT of the two-sided trajectory series") {
    const Setup& su = perturbed_setup();
    const int N = 10;
    auto fg = correlation_sequence_trajectory(su.spec, su.f, su.g, N);
    auto gf = correlation_sequence_trajectory(su.spec, su.g, su.f, N);
    for (double omega : {0.0, 0.9, 1.7, 3.0}) {
        // windowed DFT oracle: sum over |n| <= N of e^{i omega n} c_n with
        // c_{-n} = mu(f g o T^{-n}) = c^{gf}_n
        std::complex<double> dft = 0.0;
        for (int n = -N; n <= N; ++n) {
            double c = (n >= 0) ? fg.c[static_cast<std::size_t>(n)]
                                : gf.c[static_cast<std::size_t>(-n)];
            dft += std::polar(1.0, omega * n) * c;
        }
        auto v = correlation_spectrum(fg, gf, omega);
        CHECK(std::abs(v.value - dft) <= 5e-3);
    }
}

TEST_CASE("Pade recovers rational series exactly") {
    // single geometric mode: [0/1] pole at 1/lambda
    auto geo = synthetic_series({{0.5, 0.0}}, {{1.0, 0.0}}, 12);
    auto p01 = pade_poles(geo, 0, 1);
    REQUIRE(p01.poles.size() == 1);
    CHECK(std::abs(p01.poles[0] - std::complex<double>(2.0)) <= 1e-10);
    CHECK(p01.trusted);

    // two real modes via [1/2]
    auto two = synthetic_series({{0.5, 0.0}, {-0.25, 0.0}}, {{0.8, 0.0}, {1.2, 0.0}}, 12);
    auto p12 = pade_poles(two, 1, 2);
    REQUIRE(p12.poles.size() == 2);
    CHECK(std::abs(p12.poles[0] - std::complex<double>(2.0)) <= 1e-9);
    CHECK(std::abs(p12.poles[1] + std::complex<double>(4.0)) <= 1e-9);

    // complex conjugate pair via [1/2]
    auto osc = synthetic_series({{0.3, 0.4}, {0.3, -0.4}}, {{0.5, -0.2}, {0.5, 0.2}}, 12);
    auto posc = pade_poles(osc, 1, 2);
    REQUIRE(posc.poles.size() == 2);
    for (const auto& p : posc.poles)
        CHECK(std::abs(p * std::complex<double>(0.3, p.imag() > 0 ? -0.4 : 0.4) - 1.0) <= 1e-9);
}

TEST_CASE("Pade flags an ill-conditioned system instead of failing") {
    // a single-mode series makes the [2/3] Hankel block singular
    auto geo = synthetic_series({{0.5, 0.0}}, {{1.0, 0.0}}, 16);
    auto p = pade_poles(geo, 2, 3);
    CHECK_FALSE(p.trusted);
    CHECK(p.condition_estimate > 1e12);
}

TEST_CASE("Froissart doublets are filtered") {
    // rational of true type [0/1] fitted with [1/2]: the extra pole pairs up
    // with a numerator zero and must be discarded
    auto geo = synthetic_series({{0.5, 0.0}}, {{1.0, 0.0}}, 16);
    for (auto& c : geo.c) c += 1e-12 * (&c - geo.c.data() + 1); // break exact degeneracy
    auto p = pade_poles(geo, 1, 2);
    for (const auto& z : p.poles)
        CHECK(std::abs(z - std::complex<double>(2.0)) <= 1e-6);
}

TEST_CASE("stable poles across the degree scan match the resonance pair") {
    const Setup& su = perturbed_setup();
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 24);
    auto stable = stable_pade_poles(series);
    REQUIRE(stable.size() >= 2);
    // reciprocal of the leading pole is the subleading trusted eigenvalue
    std::complex<double> lead = stable[0];
    std::complex<double> recip = 1.0 / lead;
    double best = 1e9;
    for (const auto& e : su.spectrum.eigenvalues)
        if (e.trusted) best = std::min(best, std::abs(recip - e.value));
    CHECK(best <= 1e-3);
}

TEST_CASE("three-way match table") {
    const Setup& su = perturbed_setup();
    auto table = gamma_table(su.spec, 10);
    auto poly = det_coefficients(table);
    auto zeros = det_zeros(poly, 6.0);
    auto series = correlation_sequence_operator(su.tm, su.spectrum, su.f, su.g, 24);
    auto poles = stable_pade_poles(series);
    auto rep = match_all(zeros, su.spectrum, poles);

    REQUIRE(rep.triples.size() >= 3);
    int full_triples = 0;
    for (const auto& t : rep.triples) {
        if (t.eigenvalue) CHECK(t.residual_eigenvalue <= 1e-2);
        if (t.pade_pole) CHECK(t.residual_pade <= 1e-2);
        if (t.eigenvalue && t.pade_pole) ++full_triples;
    }
    CHECK(full_triples >= 2); // the resonance pair carries all three routes

    auto empty = match_all({}, SpectrumResult{}, {});
    CHECK(empty.triples.empty());
    CHECK(empty.unmatched_eigenvalues.empty());
    CHECK(empty.unmatched_poles.empty());
}
