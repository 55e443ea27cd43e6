#ifndef RESLAB_TORUS_MAP_HPP
#define RESLAB_TORUS_MAP_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reslab/common.hpp"

namespace reslab {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat2i = Eigen::Matrix<std::int64_t, 2, 2>;

/// Point on T^2 = R^2/Z^2, canonical representative in [0,1)^2.
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    static TorusPoint wrapped(double px, double py) {
        return {wrap_unit(px), wrap_unit(py)};
    }
    Vec2 vec() const { return {x, y}; }
};

/// Displacement a-b lifted to the fundamental domain [-1/2,1/2)^2.
inline Vec2 torus_diff(const TorusPoint& a, const TorusPoint& b) {
    return {wrap_sym(a.x - b.x), wrap_sym(a.y - b.y)};
}

inline double torus_distance(const TorusPoint& a, const TorusPoint& b) {
    return torus_diff(a, b).norm();
}

/// One real trigonometric term of the perturbation field:
/// component c gets amp[c] * cos(2 pi k.x + phase[c]).
struct FourierTerm {
    std::array<int, 2> k{0, 0};
    std::array<double, 2> amp{0.0, 0.0};
    std::array<double, 2> phase{0.0, 0.0};
};

struct HyperbolicityReport {
    double cone_half_angle = 0.0;
    double min_expansion = 0.0;   // over grid and unstable cone, in eigenframe
    double max_contraction = 0.0; // over grid and stable cone
    int grid_resolution = 0;
    bool pass = false;
};

/// An Anosov map T(x) = A x + eps * g(x) mod 1 with A an integer hyperbolic
/// matrix and g a finite trigonometric vector field.
struct MapSpec {
    Mat2i A = Mat2i::Identity();
    std::vector<FourierTerm> perturbation;
    double epsilon = 0.0;
    HyperbolicityReport cert; // filled by the constructor ops

    bool is_linear() const { return epsilon == 0.0 || perturbation.empty(); }
};

/// Unit eigenvectors and eigenvalues of the linear part, closed form.
/// columns of frame = (unstable, stable).
struct EigenFrame {
    double lambda_u = 0.0; // |lambda_u| > 1
    double lambda_s = 0.0; // |lambda_s| < 1
    Mat2 frame = Mat2::Identity();
    Mat2 frame_inv = Mat2::Identity();
};

EigenFrame eigen_frame(const Mat2i& A);

MapSpec make_linear_map(const Mat2i& A);

/// Builds the perturbed map and certifies the cone condition (throws
/// ConeConditionFailed if the certificate fails at the given resolution).
MapSpec make_perturbed_map(const Mat2i& A, std::vector<FourierTerm> perturbation,
                           double epsilon, int grid_resolution = 256);

TorusPoint eval_map(const MapSpec& spec, const TorusPoint& p);

/// Perturbation field g and its derivative at p (epsilon not applied).
Vec2 perturbation_field(const MapSpec& spec, const Vec2& p);
Mat2 perturbation_jacobian(const MapSpec& spec, const Vec2& p);

Mat2 jacobian(const MapSpec& spec, const TorusPoint& p);

/// T^n(p) together with D_p T^n (chain rule along the orbit).
std::pair<TorusPoint, Mat2> iterate_with_jacobian(const MapSpec& spec,
                                                  const TorusPoint& p, int n);

struct ConeCheckOptions {
    double half_angle = 0.3; // radians, around the eigendirections of A
    double margin = 1e-3;
    int expansion_samples = 33;
};

HyperbolicityReport verify_hyperbolicity(const MapSpec& spec, int grid_resolution,
                                         const ConeCheckOptions& opt = {});

/// Named maps used throughout the test and acceptance runs.
std::vector<std::pair<std::string, MapSpec>> catalog();

/// Catalog entry by name; throws Error if unknown.
MapSpec catalog_map(const std::string& name);

} // namespace reslab

#endif
