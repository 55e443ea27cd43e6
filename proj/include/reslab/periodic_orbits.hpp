#ifndef RESLAB_PERIODIC_ORBITS_HPP
#define RESLAB_PERIODIC_ORBITS_HPP

#include <cstdint>
#include <vector>

#include "reslab/torus_map.hpp"

namespace reslab {

/// A point of Fix(T^n) with its n-step Jacobian and determinant weight.
struct FixedPointRecord {
    TorusPoint point;
    int period = 1;
    Mat2 jac_n = Mat2::Identity();
    double weight = 0.0; // 1/|det(Id - jac_n)|
    double newton_residual = 0.0;
};

/// Gamma_1..Gamma_N with per-n fixed-point counts and residual diagnostics.
struct GammaTable {
    int N_max = 0;
    std::vector<double> gamma;        // gamma[n-1] = Gamma_n
    std::vector<std::int64_t> counts; // counts[n-1] = #Fix(T^n)
    double max_residual = 0.0;
};

/// Integer matrix power with overflow checks.
Mat2i int_matrix_power(const Mat2i& A, int n);

/// |det(A^n - Id)| = #Fix(T^n) for the linear map.
std::int64_t fix_count_linear(const Mat2i& A, int n);

/// All solutions of (A^n - Id) x in Z^2 with x in [0,1)^2, enumerated
/// exactly by Smith-form reduction. Throws CountCapExceeded above the cap.
std::vector<TorusPoint> fixed_points_linear(const Mat2i& A, int n,
                                            std::int64_t count_cap = 1000000);

struct NewtonOptions {
    double residual_tol = 1e-12;
    int max_iterations = 30;
    double singular_det_tol = 1e-10;
};

/// Newton iteration on Phi_n(x) = x - T^n(x) (lifted mod 1 around the
/// iterate). The achievable residual is floored at the double-precision
/// evaluation noise ||D T^n|| * eps, which matters for n around 10.
FixedPointRecord refine_fixed_point_newton(const MapSpec& spec, int n,
                                           const TorusPoint& x0,
                                           const NewtonOptions& opt = {});

struct EnumerateOptions {
    NewtonOptions newton;
    int homotopy_substeps = 4;
    int max_homotopy_substeps = 64;
    double dedup_tol = 1e-8;
    std::int64_t count_cap = 1000000;
};

/// Seeds from the linear lattice route, continued to the target epsilon.
/// Structural stability fixes the count at |det(A^n - Id)|; a deduplicated
/// shortfall doubles the homotopy substeps and ultimately throws
/// CountMismatch.
std::vector<FixedPointRecord> enumerate_fix(const MapSpec& spec, int n,
                                            const EnumerateOptions& opt = {});

GammaTable gamma_table(const MapSpec& spec, int N, const EnumerateOptions& opt = {});

} // namespace reslab

#endif
