#include "reslab/periodic_orbits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

namespace reslab {

namespace {

using int128 = __int128;

std::int64_t checked_i64(int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
        throw CountCapExceeded(std::string("integer overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

Mat2i imul(const Mat2i& a, const Mat2i& b) {
    Mat2i r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            int128 v = int128(a(i, 0)) * b(0, j) + int128(a(i, 1)) * b(1, j);
            r(i, j) = checked_i64(v, "matrix power");
        }
    return r;
}

std::int64_t idet64(const Mat2i& m) {
    int128 v = int128(m(0, 0)) * m(1, 1) - int128(m(0, 1)) * m(1, 0);
    return checked_i64(v, "determinant");
}

// Diagonalize M over Z by unimodular row/column operations; only the
// column transform V and the diagonal are needed to enumerate Z^2 / M Z^2.
struct SmithForm {
    std::int64_t d1 = 0, d2 = 0;
    Mat2i V = Mat2i::Identity();
};

SmithForm smith_diagonal(Mat2i S) {
    SmithForm f;
    auto swap_rows = [&] { S.row(0).swap(S.row(1)); };
    auto swap_cols = [&] {
        S.col(0).swap(S.col(1));
        f.V.col(0).swap(f.V.col(1));
    };
    for (int guard = 0; guard < 256; ++guard) {
        if (S(1, 0) == 0 && S(0, 1) == 0) break;
        if (S(0, 0) == 0) {
            if (S(1, 0) != 0) swap_rows();
            else swap_cols();
            continue;
        }
        if (S(1, 0) != 0) {
            std::int64_t q = S(1, 0) / S(0, 0);
            S.row(1) -= q * S.row(0);
            if (S(1, 0) != 0) swap_rows();
            continue;
        }
        std::int64_t q = S(0, 1) / S(0, 0);
        S.col(1) -= q * S.col(0);
        f.V.col(1) -= q * f.V.col(0);
        if (S(0, 1) != 0) swap_cols();
    }
    if (S(1, 0) != 0 || S(0, 1) != 0) throw Error("Smith reduction did not terminate");
    f.d1 = std::llabs(S(0, 0));
    f.d2 = std::llabs(S(1, 1));
    return f;
}

// wrap_sym(m0*x0 + m1*x1) for integer m, compensated so the reduction is
// exact even when the products are large
double wrap_sym_idot(std::int64_t m0, std::int64_t m1, double x0, double x1) {
    double a = static_cast<double>(m0), b = static_cast<double>(m1);
    double p0 = a * x0, e0 = std::fma(a, x0, -p0);
    double p1 = b * x1, e1 = std::fma(b, x1, -p1);
    double s = wrap_sym(wrap_sym(p0) + wrap_sym(p1));
    return wrap_sym(s + (e0 + e1));
}

double infinity_norm(const Mat2& m) {
    return std::max(std::abs(m(0, 0)) + std::abs(m(0, 1)),
                    std::abs(m(1, 0)) + std::abs(m(1, 1)));
}

} // namespace

Mat2i int_matrix_power(const Mat2i& A, int n) {
    if (n < 0) throw Error("negative matrix power");
    Mat2i r = Mat2i::Identity();
    Mat2i base = A;
    while (n > 0) {
        if (n & 1) r = imul(r, base);
        n >>= 1;
        if (n > 0) base = imul(base, base);
    }
    return r;
}

std::int64_t fix_count_linear(const Mat2i& A, int n) {
    Mat2i M = int_matrix_power(A, n) - Mat2i::Identity();
    return std::llabs(idet64(M));
}

std::vector<TorusPoint> fixed_points_linear(const Mat2i& A, int n,
                                            std::int64_t count_cap) {
    if (n < 1) throw Error("period must be >= 1");
    Mat2i M = int_matrix_power(A, n) - Mat2i::Identity();
    std::int64_t count = std::llabs(idet64(M));
    if (count == 0) throw NotHyperbolic("A^n has eigenvalue 1");
    if (count > count_cap)
        throw CountCapExceeded("|det(A^n - Id)| = " + std::to_string(count) +
                               " exceeds cap " + std::to_string(count_cap));

    // x = V diag(1/d1, 1/d2) k, k in [0,d1) x [0,d2), as exact rationals
    SmithForm f = smith_diagonal(M);
    std::vector<TorusPoint> pts;
    pts.reserve(static_cast<std::size_t>(count));
    const int128 den = int128(f.d1) * f.d2;
    for (std::int64_t k1 = 0; k1 < f.d1; ++k1) {
        for (std::int64_t k2 = 0; k2 < f.d2; ++k2) {
            TorusPoint p;
            double* coord[2] = {&p.x, &p.y};
            for (int i = 0; i < 2; ++i) {
                int128 num = int128(f.V(i, 0)) * k1 * f.d2 + int128(f.V(i, 1)) * k2 * f.d1;
                num %= den;
                if (num < 0) num += den;
                *coord[i] = static_cast<double>(num) / static_cast<double>(den);
            }
            pts.push_back(p);
        }
    }
    return pts;
}

namespace {

// Newton for a fixed point of the linear map: (Id - A^n) x = 0 mod 1 with the
// residual reduced exactly, so lattice seeds are reproduced to the ulp level.
FixedPointRecord refine_linear(const MapSpec& spec, int n, const TorusPoint& x0,
                               const NewtonOptions& opt) {
    const Mat2i An_int = int_matrix_power(spec.A, n);
    const Mat2 An = An_int.cast<double>();
    const Mat2 M = Mat2::Identity() - An;
    const double det = M.determinant();
    if (std::abs(det) < opt.singular_det_tol)
        throw SingularJacobian("|det(Id - A^n)| = " + format_double(std::abs(det)));
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * infinity_norm(An);
    const double tol = std::max(opt.residual_tol, floor);

    TorusPoint x = x0;
    double prev_res = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= opt.max_iterations; ++it) {
        Vec2 r;
        r.x() = wrap_sym_idot(1 - An_int(0, 0), -An_int(0, 1), x.x, x.y);
        r.y() = wrap_sym_idot(-An_int(1, 0), 1 - An_int(1, 1), x.x, x.y);
        double res = r.norm();
        if (res <= tol) {
            FixedPointRecord rec;
            rec.point = x;
            rec.period = n;
            rec.jac_n = An;
            rec.weight = 1.0 / std::abs(det);
            rec.newton_residual = res;
            return rec;
        }
        if (it == opt.max_iterations)
            throw NewtonDiverged("no convergence in " + std::to_string(opt.max_iterations) +
                                 " iterations, residual " + format_double(res));
        if (res > 2.0 * prev_res && res > 100.0 * tol)
            throw NewtonDiverged("residual growth at iteration " + std::to_string(it));
        Vec2 step = M.inverse() * r;
        x = TorusPoint::wrapped(x.x - step.x(), x.y - step.y());
        prev_res = res;
    }
    throw NewtonDiverged("unreachable");
}

// Multiple-shooting Newton on the cycle (x_0..x_{n-1}): the unknown is the
// whole pseudo-orbit and each defect d_i = x_{i+1} - T(x_i) is a one-step
// quantity, so the basin does not shrink with n the way the lifted map
// Phi_n = Id - T^n (derivative norm ~ lambda^n) would force.
FixedPointRecord refine_shooting(const MapSpec& spec, int n,
                                 std::vector<TorusPoint>& orbit,
                                 const NewtonOptions& opt) {
    std::vector<Mat2> jac(static_cast<std::size_t>(n));
    std::vector<Vec2> defect(static_cast<std::size_t>(n));
    const double orbit_tol = 1e-13;
    double prev_res = std::numeric_limits<double>::infinity();

    for (int it = 0; it <= opt.max_iterations; ++it) {
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            const TorusPoint& xi = orbit[static_cast<std::size_t>(i)];
            const TorusPoint& xn = orbit[static_cast<std::size_t>((i + 1) % n)];
            jac[static_cast<std::size_t>(i)] = jacobian(spec, xi);
            defect[static_cast<std::size_t>(i)] = torus_diff(xn, eval_map(spec, xi));
            res = std::max(res, defect[static_cast<std::size_t>(i)].norm());
        }

        // monodromy and the propagated defect: delta_{i+1} = J_i delta_i - d_i
        Mat2 Mn = Mat2::Identity();
        Vec2 b = Vec2::Zero();
        for (int i = 0; i < n; ++i) {
            b = jac[static_cast<std::size_t>(i)] * b + defect[static_cast<std::size_t>(i)];
            Mn = (jac[static_cast<std::size_t>(i)] * Mn).eval();
        }
        Mat2 M = Mat2::Identity() - Mn;
        double det = M.determinant();

        if (res <= orbit_tol) {
            if (std::abs(det) < opt.singular_det_tol)
                throw SingularJacobian("|det(Id - D T^n)| = " + format_double(std::abs(det)));
            auto [tn, Jn] = iterate_with_jacobian(spec, orbit[0], n);
            (void)Jn;
            double point_res = torus_distance(tn, orbit[0]);
            // measured T^n residual carries per-step rounding amplified by
            // the monodromy; anything truly unclosed sits orders above this
            double floor = 256.0 * std::numeric_limits<double>::epsilon() * infinity_norm(Mn);
            if (point_res > std::max(opt.residual_tol, floor))
                throw NewtonDiverged("closed orbit but point residual " + format_double(point_res));
            FixedPointRecord rec;
            rec.point = orbit[0];
            rec.period = n;
            rec.jac_n = Mn;
            rec.weight = 1.0 / std::abs(det);
            rec.newton_residual = point_res;
            return rec;
        }
        if (it == opt.max_iterations)
            throw NewtonDiverged("no convergence in " + std::to_string(opt.max_iterations) +
                                 " iterations, orbit defect " + format_double(res));
        if (res > prev_res && res > 1e-8)
            throw NewtonDiverged("defect growth at iteration " + std::to_string(it));
        if (std::abs(det) < opt.singular_det_tol)
            throw SingularJacobian("singular shooting step, |det| = " + format_double(std::abs(det)));

        // periodicity delta_n = delta_0 gives (Id - Mn) delta_0 = -b
        Vec2 delta = M.inverse() * (-b);
        for (int i = 0; i < n; ++i) {
            TorusPoint& xi = orbit[static_cast<std::size_t>(i)];
            xi = TorusPoint::wrapped(xi.x + delta.x(), xi.y + delta.y());
            delta = jac[static_cast<std::size_t>(i)] * delta - defect[static_cast<std::size_t>(i)];
        }
        prev_res = res;
    }
    throw NewtonDiverged("unreachable");
}

} // namespace

FixedPointRecord refine_fixed_point_newton(const MapSpec& spec, int n,
                                           const TorusPoint& x0,
                                           const NewtonOptions& opt) {
    if (n < 1) throw Error("period must be >= 1");
    if (spec.is_linear()) return refine_linear(spec, n, x0, opt);
    // seed pseudo-orbit by forward iteration (shadowing basin caveat applies)
    std::vector<TorusPoint> orbit(static_cast<std::size_t>(n));
    orbit[0] = x0;
    for (int i = 1; i < n; ++i)
        orbit[static_cast<std::size_t>(i)] = eval_map(spec, orbit[static_cast<std::size_t>(i - 1)]);
    return refine_shooting(spec, n, orbit, opt);
}

namespace {

// torus-aware spatial hash dedup; keeps the first record of each cluster
std::vector<FixedPointRecord> dedup_records(std::vector<FixedPointRecord> recs, double tol) {
    const int B = 512;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
    auto key = [&](int bx, int by) {
        bx = ((bx % B) + B) % B;
        by = ((by % B) + B) % B;
        return std::int64_t(bx) * B + by;
    };
    std::vector<FixedPointRecord> out;
    out.reserve(recs.size());
    const int reach = std::min(B / 2, static_cast<int>(std::ceil(tol * B)) + 1);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        int bx = static_cast<int>(std::floor(recs[i].point.x * B));
        int by = static_cast<int>(std::floor(recs[i].point.y * B));
        bool dup = false;
        for (int dx = -reach; dx <= reach && !dup; ++dx)
            for (int dy = -reach; dy <= reach && !dup; ++dy) {
                auto it = buckets.find(key(bx + dx, by + dy));
                if (it == buckets.end()) continue;
                for (std::size_t j : it->second)
                    if (torus_distance(recs[i].point, out[j].point) < tol) {
                        dup = true;
                        break;
                    }
            }
        if (!dup) {
            out.push_back(recs[i]);
            buckets[key(bx, by)].push_back(out.size() - 1);
        }
    }
    return out;
}

} // namespace

std::vector<FixedPointRecord> enumerate_fix(const MapSpec& spec, int n,
                                            const EnumerateOptions& opt) {
    std::vector<TorusPoint> seeds = fixed_points_linear(spec.A, n, opt.count_cap);
    const auto expected = static_cast<std::int64_t>(seeds.size());

    for (int substeps = opt.homotopy_substeps;; substeps *= 2) {
        std::vector<FixedPointRecord> recs(seeds.size());
        std::atomic<bool> any_failed{false};
        std::string first_error;
        std::mutex err_mutex;

        parallel_for(seeds.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    if (spec.is_linear()) {
                        recs[i] = refine_fixed_point_newton(spec, n, seeds[i], opt.newton);
                    } else {
                        // the whole cycle is continued in epsilon; handing only
                        // x_0 across stages would rebuild the orbit tail under
                        // the new map and leave the shadowing basin
                        MapSpec base = spec;
                        base.epsilon = 0.0;
                        std::vector<TorusPoint> cycle(static_cast<std::size_t>(n));
                        cycle[0] = seeds[i];
                        for (int q = 1; q < n; ++q)
                            cycle[static_cast<std::size_t>(q)] =
                                eval_map(base, cycle[static_cast<std::size_t>(q - 1)]);
                        MapSpec stage = spec;
                        for (int s = 1; s <= substeps; ++s) {
                            stage.epsilon = spec.epsilon * s / substeps;
                            recs[i] = refine_shooting(stage, n, cycle, opt.newton);
                        }
                    }
                } catch (const Error& e) {
                    any_failed = true;
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });

        bool retry = false;
        if (any_failed) {
            retry = true;
        } else {
            auto unique = dedup_records(recs, opt.dedup_tol);
            if (static_cast<std::int64_t>(unique.size()) == expected) return unique;
            retry = true;
        }
        if (retry && substeps * 2 > opt.max_homotopy_substeps) {
            if (any_failed)
                throw NewtonDiverged("continuation failed at " + std::to_string(substeps) +
                                     " substeps: " + first_error);
            throw CountMismatch("period " + std::to_string(n) + ": expected " +
                                std::to_string(expected) + " orbits, lost some after " +
                                std::to_string(substeps) + " homotopy substeps");
        }
    }
}

GammaTable gamma_table(const MapSpec& spec, int N, const EnumerateOptions& opt) {
    if (N < 1) throw Error("gamma_table needs N >= 1");
    GammaTable table;
    table.N_max = N;
    table.gamma.resize(static_cast<std::size_t>(N));
    table.counts.resize(static_cast<std::size_t>(N));
    table.max_residual = 0.0;
    for (int n = 1; n <= N; ++n) {
        auto recs = enumerate_fix(spec, n, opt);
        double sum = 0.0; // fixed seed order for bit-reproducibility
        for (const auto& r : recs) {
            sum += r.weight;
            table.max_residual = std::max(table.max_residual, r.newton_residual);
        }
        table.gamma[static_cast<std::size_t>(n - 1)] = sum;
        table.counts[static_cast<std::size_t>(n - 1)] = static_cast<std::int64_t>(recs.size());
    }
    return table;
}

} // namespace reslab
