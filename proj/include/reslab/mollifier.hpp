#ifndef RESLAB_MOLLIFIER_HPP
#define RESLAB_MOLLIFIER_HPP

#include <utility>
#include <vector>

#include "reslab/periodic_orbits.hpp"
#include "reslab/torus_map.hpp"

namespace reslab {

/// Compactly supported even kernel q_eps with vanishing moments up to
/// order r, built as a scale ladder of smooth radial bumps:
/// qbar(x) = sum_i a_i s_i^{-2} b(x / s_i), s_i = 2^{-i}.
struct MollifierKernel {
    int r = 0;          // moment-vanishing order (even)
    double epsilon = 0.0;
    std::vector<std::pair<double, double>> node_amplitudes; // (s_i, a_i)
    double support_radius = 0.0; // <= epsilon
};

/// Amplitudes solve the (r/2+1)-point Vandermonde moment system exactly;
/// r must be even (odd moments vanish by symmetry), 0 <= r <= 8.
MollifierKernel build_kernel(int r, double epsilon);

/// Unscaled profile qbar (support |x| <= 1).
double kernel_base_value(const MollifierKernel& kernel, const Vec2& x);

/// q_eps(x) = eps^{-2} qbar(x / eps).
double kernel_value(const MollifierKernel& kernel, const Vec2& x);

/// Moment integral of x^alpha qbar over the unit square, midpoint rule.
double kernel_moment(const MollifierKernel& kernel, int a1, int a2, int resolution);

/// Max deviation of the moment table from (1, 0, ..., 0) up to max_order.
double verify_moments(const MollifierKernel& kernel, int max_order, int resolution);

struct TraceOptions {
    double box_safety = 1.5;   // inflation of the linearized support preimage
    int z_resolution = 256;    // grid steps per kernel radius in image space
    EnumerateOptions enumerate;
};

/// Tr Q_eps L^n = integral of q_eps(x - T^n x) dx, computed by localized
/// quadrature around each fixed point; throws SupportOverlap when the
/// localization boxes collide.
double mollified_trace(const MapSpec& spec, const MollifierKernel& kernel, int n,
                       const TraceOptions& opt = {});

/// Per-fixed-point box integrals (the inverse branches of Phi_n); the trace
/// is their sum in fixed-point index order.
std::vector<double> mollified_trace_by_branch(const MapSpec& spec,
                                              const MollifierKernel& kernel, int n,
                                              const TraceOptions& opt = {});

/// Slow global-grid evaluation of the same integral (oracle).
double global_trace_quadrature(const MapSpec& spec, const MollifierKernel& kernel,
                               int n, int G);

struct ScalingResult {
    std::vector<double> epsilons;
    std::vector<double> traces;
    std::vector<double> abs_errors;
    double gamma_ref = 0.0;
    double slope = 0.0;       // log-log fit over points above the floor
    bool floor_reached = false;
    double floor = 1e-11;
};

/// Least-squares slope of log|Tr Q_eps L^n - Gamma_n| against log eps.
ScalingResult trace_error_scaling(const MapSpec& spec, int n, int r,
                                  const std::vector<double>& epsilon_list,
                                  const TraceOptions& opt = {});

} // namespace reslab

#endif
