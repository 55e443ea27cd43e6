#ifndef RESLAB_CORRELATIONS_HPP
#define RESLAB_CORRELATIONS_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "reslab/determinant.hpp"
#include "reslab/galerkin.hpp"
#include "reslab/observable.hpp"

namespace reslab {

enum class CorrelationMethod { operator_route, trajectory };

/// c_n = mu_SRB(f * g o T^n), n = 0..N.
struct CorrelationSeries {
    std::vector<double> c;
    CorrelationMethod method = CorrelationMethod::operator_route;
    int N = 0;
};

struct TrajectoryOptions {
    std::int64_t length = 1000000;
    std::int64_t burn_in = 1000;
    std::uint64_t seed = 42;
};

/// Operator route: c_n = <g_hat, M^n v> with v the Fourier coefficients of
/// f * rho_SRB. Requires a trusted spectrum (throws UntrustedSpectrum).
CorrelationSeries correlation_sequence_operator(const TransferMatrix& tm,
                                                const SpectrumResult& spectrum,
                                                const FourierObservable& f,
                                                const FourierObservable& g, int N);

/// Trajectory route: Birkhoff average of f(x_i) g(x_{i+n}) along one long
/// orbit after burn-in.
CorrelationSeries correlation_sequence_trajectory(const MapSpec& spec,
                                                  const FourierObservable& f,
                                                  const FourierObservable& g, int N,
                                                  const TrajectoryOptions& opt = {});

/// Truncated generating function G_{f,g}(z) = sum_n c_n z^n.
std::complex<double> generating_function(const CorrelationSeries& series,
                                         std::complex<double> z);

/// Exponential decay envelope |c_n| <= C rho^{-n} fitted in log scale.
struct DecayEnvelope {
    double rho = 1.0;
    double amplitude = 0.0;
};
DecayEnvelope decay_envelope(const CorrelationSeries& series);

/// C_{f,g}(e^{i omega}) = G_{f,g}(e^{i omega}) + G_{g,f}(e^{-i omega}) - c_0.
struct CorrelationSpectrumValue {
    std::complex<double> value;
    double truncation_estimate = 0.0;
};
CorrelationSpectrumValue correlation_spectrum(const CorrelationSeries& forward,
                                              const CorrelationSeries& reverse,
                                              double omega);

struct PadePoles {
    std::vector<std::complex<double>> poles;    // Froissart-filtered
    std::vector<std::complex<double>> residues; // p(z_i)/q'(z_i)
    int L = 0, M = 0;
    double condition_estimate = 0.0;
    bool trusted = true; // false when the linear system is ill-conditioned
};

struct PadeOptions {
    double froissart_tol = 1e-3;
    double condition_limit = 1e12;
};

/// [L/M] Pade approximant of sum c_n z^n; poles are denominator roots.
PadePoles pade_poles(const CorrelationSeries& series, int L, int M,
                     const PadeOptions& opt = {});

/// Poles of the [d_max/d_max] approximant that persist across every listed
/// degree (within match_tol * max(1, |z|)), sorted by modulus.
std::vector<std::complex<double>> stable_pade_poles(const CorrelationSeries& series,
                                                    std::vector<int> degrees = {5, 6, 7},
                                                    double match_tol = 0.05);

/// One row of the three-way resonance table.
struct TripleMatch {
    std::complex<double> zero;
    std::optional<std::complex<double>> eigenvalue;
    std::optional<std::complex<double>> pade_pole;
    double residual_eigenvalue = 0.0; // |z lambda - 1|
    double residual_pade = 0.0;       // |p - z|
};

struct UnifiedReport {
    std::vector<TripleMatch> triples;
    std::vector<std::complex<double>> unmatched_eigenvalues;
    std::vector<std::complex<double>> unmatched_poles;
    double tol_eigenvalue = 0.0;
    double tol_pade = 0.0;
};

/// Determinant zeros matched against trusted eigenvalues and Pade poles.
/// Unmatched eigenvalues below report_floor (the spurious near-origin sea)
/// are dropped from the listing, not from the matching.
UnifiedReport match_all(const std::vector<DetZero>& zeros, const SpectrumResult& spectrum,
                        const std::vector<std::complex<double>>& pade_poles,
                        double tol_eigenvalue = 1e-2, double tol_pade = 1e-2,
                        double report_floor = 0.05);

} // namespace reslab

#endif
