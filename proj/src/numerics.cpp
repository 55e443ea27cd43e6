#include "reslab/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "reslab/common.hpp"

namespace reslab {

std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coeffs) {
    double cmax = 0.0;
    for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0) return {};
    std::size_t deg = coeffs.size();
    while (deg > 0 && std::abs(coeffs[deg - 1]) <= 1e-14 * cmax) --deg;
    if (deg <= 1) return {};
    --deg; // effective polynomial degree

    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg),
                                                static_cast<Eigen::Index>(deg));
    for (std::size_t i = 1; i < deg; ++i) C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < deg; ++i)
        C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -coeffs[i] / coeffs[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("companion eigen decomposition failed");

    std::vector<std::complex<double>> roots(es.eigenvalues().data(),
                                            es.eigenvalues().data() + deg);

    // Newton polish: the companion matrix of a polynomial with a tiny
    // leading coefficient is badly scaled and can lose several digits on
    // the small roots
    auto horner = [&](std::complex<double> z, std::complex<double>& deriv) {
        std::complex<double> p = 0.0, d = 0.0;
        for (std::size_t k = deg + 1; k-- > 0;) {
            d = d * z + p;
            p = p * z + coeffs[k];
        }
        deriv = d;
        return p;
    };
    for (auto& r : roots) {
        std::complex<double> z = r;
        std::complex<double> d;
        std::complex<double> p = horner(z, d);
        for (int it = 0; it < 8 && std::abs(d) > 0.0; ++it) {
            std::complex<double> z2 = z - p / d;
            std::complex<double> d2;
            std::complex<double> p2 = horner(z2, d2);
            if (!(std::abs(p2) < std::abs(p))) break;
            z = z2;
            p = p2;
            d = d2;
        }
        // refinement only: a polish that relocates the root has jumped into
        // another root's basin
        if (std::abs(z - r) <= 0.05 * (1.0 + std::abs(r))) r = z;
    }
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        return std::arg(a) < std::arg(b);
    });
    return roots;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("fit_slope needs >= 2 samples");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw Error("degenerate abscissae in fit_slope");
    return (n * sxy - sx * sy) / denom;
}

} // namespace reslab
