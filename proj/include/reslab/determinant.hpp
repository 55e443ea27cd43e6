#ifndef RESLAB_DETERMINANT_HPP
#define RESLAB_DETERMINANT_HPP

#include <complex>
#include <vector>

#include "reslab/galerkin.hpp"
#include "reslab/periodic_orbits.hpp"

namespace reslab {

/// Truncated Taylor series of the dynamical determinant
/// d(z) = exp(-sum_n Gamma_n z^n / n).
struct DetPoly {
    std::vector<std::complex<double>> coeffs; // c_0..c_N, c_0 = 1
    int N = 0;
    GammaTable source_gamma;
    double trust_radius = 0.0;
    double roundtrip_error = 0.0; // conv(exp-series, coeffs) vs unit series
};

DetPoly det_coefficients(const GammaTable& gamma);

std::complex<double> evaluate_det(const DetPoly& poly, std::complex<double> z);

struct DetZero {
    std::complex<double> z;
    double stability_shift = 0.0; // movement when recomputed at degree N-2
};

struct DetZeroOptions {
    double stability_tol = 1e-3;
    double stability_tol_rel = 5e-3; // per unit |z|, away from the origin
};

/// Stable roots of the truncation inside |z| <= radius. A root counts as
/// stable when the degree-(N-2) truncation reproduces it within
/// max(stability_tol, stability_tol_rel * |z|).
std::vector<DetZero> det_zeros(const DetPoly& poly, double radius,
                               const DetZeroOptions& opt = {});

struct MatchedPair {
    std::complex<double> zero;
    std::complex<double> eigenvalue;
    double residual = 0.0; // |z * lambda - 1|
};

struct ResonanceReport {
    std::vector<MatchedPair> pairs;
    std::vector<std::complex<double>> unmatched_zeros;
    std::vector<std::complex<double>> unmatched_eigenvalues;
    double disk_radius = 0.0;
};

/// Greedy minimal-residual matching of determinant zeros against trusted
/// eigenvalues under |z*lambda - 1| <= tol.
ResonanceReport match_zeros_to_spectrum(const std::vector<DetZero>& zeros,
                                        const SpectrumResult& spectrum, double tol,
                                        double disk_radius = 0.0);

} // namespace reslab

#endif
