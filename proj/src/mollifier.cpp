#include "reslab/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "reslab/numerics.hpp"

namespace reslab {

namespace {

double bump_raw(double rho2) {
    if (rho2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - rho2));
}

// integral of exp(-1/(1-|x|^2)) over the unit disk
double bump_mass() {
    static const double value = [] {
        // 2 pi int_0^1 rho exp(-1/(1-rho^2)) drho, composite Simpson
        const int n = 1 << 16;
        double h = 1.0 / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            double rho = i * h;
            double f = rho * bump_raw(rho * rho);
            double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * f;
        }
        return 2.0 * std::numbers::pi * acc * h / 3.0;
    }();
    return value;
}

} // namespace

MollifierKernel build_kernel(int r, double epsilon) {
    if (r < 0 || r > 8) throw Error("moment order r must be in [0, 8]");
    if (r % 2 != 0)
        throw Error("odd moments vanish by symmetry; use r = " + std::to_string(r + 1));
    if (!(epsilon > 0.0)) throw Error("kernel epsilon must be > 0");

    const int m = r / 2 + 1; // ladder size
    Eigen::MatrixXd V(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(0) = 1.0;
    for (int i = 0; i < m; ++i) {
        double s2 = std::pow(0.25, i); // s_i = 2^{-i}
        for (int t = 0; t < m; ++t) V(t, i) = std::pow(s2, t);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    if (!lu.isInvertible()) throw MomentSystemSingular("moment Vandermonde is singular");
    Eigen::VectorXd a = lu.solve(rhs);

    MollifierKernel k;
    k.r = r;
    k.epsilon = epsilon;
    k.support_radius = epsilon;
    for (int i = 0; i < m; ++i) k.node_amplitudes.emplace_back(std::pow(0.5, i), a(i));
    return k;
}

double kernel_base_value(const MollifierKernel& kernel, const Vec2& x) {
    const double mass = bump_mass();
    double rho2 = x.squaredNorm();
    double v = 0.0;
    for (const auto& [s, a] : kernel.node_amplitudes)
        v += a / (s * s) * bump_raw(rho2 / (s * s)) / mass;
    return v;
}

double kernel_value(const MollifierKernel& kernel, const Vec2& x) {
    const double e = kernel.epsilon;
    return kernel_base_value(kernel, x / e) / (e * e);
}

double kernel_moment(const MollifierKernel& kernel, int a1, int a2, int resolution) {
    const int R = resolution;
    const double h = 2.0 / R;
    double acc = 0.0;
    for (int i = 0; i < R; ++i) {
        double x = -1.0 + (i + 0.5) * h;
        double px = (a1 == 0) ? 1.0 : std::pow(x, a1);
        for (int j = 0; j < R; ++j) {
            double y = -1.0 + (j + 0.5) * h;
            double py = (a2 == 0) ? 1.0 : std::pow(y, a2);
            acc += px * py * kernel_base_value(kernel, {x, y});
        }
    }
    return acc * h * h;
}

double verify_moments(const MollifierKernel& kernel, int max_order, int resolution) {
    const int R = resolution;
    const double h = 2.0 / R;
    const int nm = (max_order + 1) * (max_order + 2) / 2;
    std::vector<double> acc(static_cast<std::size_t>(nm), 0.0);
    for (int i = 0; i < R; ++i) {
        double x = -1.0 + (i + 0.5) * h;
        for (int j = 0; j < R; ++j) {
            double y = -1.0 + (j + 0.5) * h;
            double q = kernel_base_value(kernel, {x, y});
            if (q == 0.0) continue;
            int idx = 0;
            for (int o = 0; o <= max_order; ++o)
                for (int a1 = o; a1 >= 0; --a1, ++idx)
                    acc[static_cast<std::size_t>(idx)] +=
                        q * std::pow(x, a1) * std::pow(y, o - a1);
        }
    }
    double worst = 0.0;
    int idx = 0;
    for (int o = 0; o <= max_order; ++o)
        for (int a1 = o; a1 >= 0; --a1, ++idx) {
            double m = acc[static_cast<std::size_t>(idx)] * h * h;
            double target = (o == 0) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(m - target));
        }
    return worst;
}

namespace {

struct Box {
    TorusPoint center;
    double half_x = 0.0, half_y = 0.0;
    Mat2 jac_n;
};

} // namespace

double mollified_trace(const MapSpec& spec, const MollifierKernel& kernel, int n,
                       const TraceOptions& opt) {
    double trace = 0.0;
    for (double c : mollified_trace_by_branch(spec, kernel, n, opt)) trace += c;
    return trace;
}

std::vector<double> mollified_trace_by_branch(const MapSpec& spec,
                                              const MollifierKernel& kernel, int n,
                                              const TraceOptions& opt) {
    auto records = enumerate_fix(spec, n, opt.enumerate);
    const double eps = kernel.epsilon;

    std::vector<Box> boxes;
    boxes.reserve(records.size());
    double max_norm_m = 0.0;
    for (const auto& rec : records) {
        Mat2 M = Mat2::Identity() - rec.jac_n;
        Mat2 Minv = M.inverse();
        Box b;
        b.center = rec.point;
        b.half_x = opt.box_safety * eps * Minv.row(0).norm();
        b.half_y = opt.box_safety * eps * Minv.row(1).norm();
        b.jac_n = rec.jac_n;
        boxes.push_back(b);
        max_norm_m = std::max(max_norm_m, M.cwiseAbs().rowwise().sum().maxCoeff());
    }

    for (std::size_t p = 0; p < boxes.size(); ++p)
        for (std::size_t q = p + 1; q < boxes.size(); ++q) {
            double dx = std::abs(wrap_sym(boxes[p].center.x - boxes[q].center.x));
            double dy = std::abs(wrap_sym(boxes[p].center.y - boxes[q].center.y));
            if (dx < boxes[p].half_x + boxes[q].half_x &&
                dy < boxes[p].half_y + boxes[q].half_y)
                throw SupportOverlap("localization boxes of fixed points " +
                                     std::to_string(p) + " and " + std::to_string(q) +
                                     " intersect at kernel epsilon " + format_double(eps));
        }

    // step chosen so the image Phi_n(x) moves by <= eps / z_resolution per cell
    const double h_target = eps / (opt.z_resolution * std::max(1.0, max_norm_m));

    std::vector<double> contributions(boxes.size(), 0.0);
    parallel_for(boxes.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Box& b = boxes[i];
            auto cells_x = static_cast<std::int64_t>(std::ceil(2.0 * b.half_x / h_target));
            auto cells_y = static_cast<std::int64_t>(std::ceil(2.0 * b.half_y / h_target));
            cells_x = std::max<std::int64_t>(cells_x, 8);
            cells_y = std::max<std::int64_t>(cells_y, 8);
            const double hx = 2.0 * b.half_x / static_cast<double>(cells_x);
            const double hy = 2.0 * b.half_y / static_cast<double>(cells_y);
            double acc = 0.0;
            for (std::int64_t cx = 0; cx < cells_x; ++cx) {
                double px = b.center.x - b.half_x + (cx + 0.5) * hx;
                for (std::int64_t cy = 0; cy < cells_y; ++cy) {
                    double py = b.center.y - b.half_y + (cy + 0.5) * hy;
                    TorusPoint p = TorusPoint::wrapped(px, py);
                    auto [tn, J] = iterate_with_jacobian(spec, p, n);
                    (void)J;
                    Vec2 phi = torus_diff(p, tn);
                    if (phi.squaredNorm() >= eps * eps) continue;
                    acc += kernel_value(kernel, phi);
                }
            }
            contributions[i] = acc * hx * hy;
        }
    });
    return contributions;
}

double global_trace_quadrature(const MapSpec& spec, const MollifierKernel& kernel,
                               int n, int G) {
    std::vector<double> rows(static_cast<std::size_t>(G), 0.0);
    parallel_for(static_cast<std::size_t>(G), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            double acc = 0.0;
            for (int j = 0; j < G; ++j) {
                TorusPoint p{static_cast<double>(i) / G, static_cast<double>(j) / G};
                auto [tn, J] = iterate_with_jacobian(spec, p, n);
                (void)J;
                Vec2 phi = torus_diff(p, tn);
                if (phi.squaredNorm() < kernel.epsilon * kernel.epsilon)
                    acc += kernel_value(kernel, phi);
            }
            rows[i] = acc;
        }
    });
    double acc = 0.0;
    for (double r : rows) acc += r;
    return acc / (static_cast<double>(G) * G);
}

ScalingResult trace_error_scaling(const MapSpec& spec, int n, int r,
                                  const std::vector<double>& epsilon_list,
                                  const TraceOptions& opt) {
    if (epsilon_list.size() < 4)
        throw Error("scaling study needs at least 4 epsilon values");
    auto records = enumerate_fix(spec, n, opt.enumerate);
    double gamma_n = 0.0;
    for (const auto& rec : records) gamma_n += rec.weight;

    ScalingResult res;
    res.gamma_ref = gamma_n;
    std::vector<double> lx, ly;
    for (double eps : epsilon_list) {
        MollifierKernel kernel = build_kernel(r, eps);
        double tr = mollified_trace(spec, kernel, n, opt);
        double err = std::abs(tr - gamma_n);
        res.epsilons.push_back(eps);
        res.traces.push_back(tr);
        res.abs_errors.push_back(err);
        if (err <= res.floor) {
            res.floor_reached = true;
        } else {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(err));
        }
    }
    res.slope = (lx.size() >= 2) ? fit_slope(lx, ly)
                                 : std::numeric_limits<double>::quiet_NaN();
    return res;
}

} // namespace reslab
