#include "reslab/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reslab/numerics.hpp"

namespace reslab {

namespace {

// coefficients of exp(+sum_n Gamma_n z^n / n), the reciprocal series of d
std::vector<std::complex<double>> exp_series(const GammaTable& gamma) {
    std::size_t n = gamma.gamma.size();
    std::vector<std::complex<double>> e(n + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 1; m <= k; ++m) acc += gamma.gamma[m - 1] * e[k - m];
        e[k] = acc / static_cast<double>(k);
    }
    return e;
}

} // namespace

DetPoly det_coefficients(const GammaTable& gamma) {
    if (gamma.gamma.empty()) throw Error("gamma table is empty");
    const std::size_t n = gamma.gamma.size();
    DetPoly poly;
    poly.N = static_cast<int>(n);
    poly.source_gamma = gamma;
    poly.coeffs.assign(n + 1, 0.0);
    poly.coeffs[0] = 1.0;
    // k c_k = -sum_{m=1..k} Gamma_m c_{k-m}
    for (std::size_t k = 1; k <= n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 1; m <= k; ++m) acc += gamma.gamma[m - 1] * poly.coeffs[k - m];
        poly.coeffs[k] = -acc / static_cast<double>(k);
    }

    // round-trip: conv(exp-series, c) must be the unit series
    auto e = exp_series(gamma);
    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        std::complex<double> conv = 0.0;
        for (std::size_t m = 0; m <= k; ++m) conv += e[m] * poly.coeffs[k - m];
        worst = std::max(worst, std::abs(conv - (k == 0 ? 1.0 : 0.0)));
    }
    poly.roundtrip_error = worst;

    double tail = std::abs(poly.coeffs[n]);
    poly.trust_radius = (tail < 1e-300)
                            ? 1e9
                            : std::pow(1e-8 / tail, 1.0 / static_cast<double>(n));
    return poly;
}

std::complex<double> evaluate_det(const DetPoly& poly, std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = poly.coeffs.size(); k-- > 0;) acc = acc * z + poly.coeffs[k];
    return acc;
}

std::vector<DetZero> det_zeros(const DetPoly& poly, double radius, const DetZeroOptions& opt) {
    bool degenerate = true;
    for (std::size_t k = 1; k < poly.coeffs.size(); ++k)
        if (std::abs(poly.coeffs[k]) > 1e-14) degenerate = false;
    if (degenerate)
        throw DegenerateLeading("determinant truncation is constant, no zeros");

    auto full = polynomial_roots(poly.coeffs);
    std::vector<std::complex<double>> trimmed(poly.coeffs);
    if (trimmed.size() > 3) trimmed.resize(trimmed.size() - 2);
    auto reduced = polynomial_roots(trimmed);

    std::vector<DetZero> out;
    for (const auto& z : full) {
        if (std::abs(z) > radius) continue;
        double shift = std::numeric_limits<double>::infinity();
        for (const auto& w : reduced) shift = std::min(shift, std::abs(z - w));
        if (shift < std::max(opt.stability_tol, opt.stability_tol_rel * std::abs(z)))
            out.push_back({z, shift});
    }
    std::sort(out.begin(), out.end(), [](const DetZero& a, const DetZero& b) {
        double ma = std::abs(a.z), mb = std::abs(b.z);
        if (ma != mb) return ma < mb;
        return std::arg(a.z) < std::arg(b.z);
    });
    return out;
}

ResonanceReport match_zeros_to_spectrum(const std::vector<DetZero>& zeros,
                                        const SpectrumResult& spectrum, double tol,
                                        double disk_radius) {
    ResonanceReport rep;
    rep.disk_radius = disk_radius;
    auto eigs = trusted_eigenvalues(spectrum);

    struct Cand {
        double residual;
        std::size_t zi, ej;
    };
    std::vector<Cand> cands;
    for (std::size_t i = 0; i < zeros.size(); ++i)
        for (std::size_t j = 0; j < eigs.size(); ++j) {
            double r = std::abs(zeros[i].z * eigs[j] - 1.0);
            if (r <= tol) cands.push_back({r, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.residual != b.residual) return a.residual < b.residual;
        if (a.zi != b.zi) return a.zi < b.zi;
        return a.ej < b.ej;
    });

    std::vector<bool> zero_used(zeros.size(), false), eig_used(eigs.size(), false);
    for (const auto& c : cands) {
        if (zero_used[c.zi] || eig_used[c.ej]) continue;
        zero_used[c.zi] = true;
        eig_used[c.ej] = true;
        rep.pairs.push_back({zeros[c.zi].z, eigs[c.ej], c.residual});
    }
    for (std::size_t i = 0; i < zeros.size(); ++i)
        if (!zero_used[i]) rep.unmatched_zeros.push_back(zeros[i].z);
    for (std::size_t j = 0; j < eigs.size(); ++j)
        if (!eig_used[j]) rep.unmatched_eigenvalues.push_back(eigs[j]);
    return rep;
}

} // namespace reslab
