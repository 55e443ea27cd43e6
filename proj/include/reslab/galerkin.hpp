#ifndef RESLAB_GALERKIN_HPP
#define RESLAB_GALERKIN_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "reslab/observable.hpp"
#include "reslab/torus_map.hpp"

namespace reslab {

/// Fourier modes |k_i| <= K flattened to a linear index.
struct ModeBox {
    int K = 0;
    int side() const { return 2 * K + 1; }
    int dim() const { return side() * side(); }
    bool contains(int k1, int k2) const {
        return std::abs(k1) <= K && std::abs(k2) <= K;
    }
    int index(int k1, int k2) const { return (k1 + K) * side() + (k2 + K); }
    std::pair<int, int> mode(int idx) const {
        return {idx / side() - K, idx % side() - K};
    }
};

/// Finite Fourier section of the transfer operator:
/// M[j,k] = integral of exp(2 pi i (k.y - j.T(y))) dy.
struct TransferMatrix {
    ModeBox box;
    int G = 0; // quadrature grid per axis
    Eigen::MatrixXcd M;
    MapSpec spec;
    bool exact_linear = false; // built from the epsilon=0 closed form
    bool alias_warning = false;
    double alias_shift = 0.0; // max entry change G -> 2G
};

struct AssembleOptions {
    bool check_aliasing = true;
    double alias_tol = 1e-8;
    /// Evaluate the quadrature even for linear maps (the default is the
    /// exact pushforward indicator k = A^T j).
    bool force_quadrature = false;
};

TransferMatrix assemble_transfer_matrix(const MapSpec& spec, int K, int G,
                                        const AssembleOptions& opt = {});

struct EigenvalueRecord {
    std::complex<double> value;
    bool trusted = false;
    double stability_shift = 0.0; // movement between cutoffs K-2 and K
};

struct SpectrumResult {
    std::vector<EigenvalueRecord> eigenvalues; // sorted by decreasing modulus
    Eigen::VectorXcd srb_coeffs; // right eigenvector at the unit eigenvalue,
                                 // zero mode normalized to 1
    int K = 0;
    double gap = 0.0; // modulus of the second largest trusted eigenvalue
};

struct SpectrumOptions {
    double stability_tol = 1e-4;
    double unit_tol = 1e-3;
};

/// Dense eigendecomposition with cutoff-stability tags (eigenvalues are
/// compared against a K-2 section assembled from the stored spec).
SpectrumResult transfer_spectrum(const TransferMatrix& M, const SpectrumOptions& opt = {});

std::vector<std::complex<double>> trusted_eigenvalues(const SpectrumResult& s);

/// Smallest trusted eigenvalue modulus above the floor (1.0 when only the
/// unit eigenvalue qualifies); its reciprocal bounds the zero-search disk.
double lambda_cut(const SpectrumResult& s, double floor = 0.2);

/// mu_SRB(f) through the Fourier pairing with the SRB coefficients.
double srb_expectation(const FourierObservable& f, const SpectrumResult& spectrum);

/// SRB density sampled on an n x n grid (row-major, x varying slowest).
std::vector<std::complex<double>> srb_density_grid(const SpectrumResult& spectrum, int n);

/// Subtract mu_SRB(f) from the zero mode and mark the observable.
FourierObservable subtract_mean(const FourierObservable& f, const SpectrumResult& spectrum);

} // namespace reslab

#endif
