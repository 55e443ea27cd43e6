#include "reslab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace reslab {

namespace {

Eigen::MatrixXcd quadrature_assembly(const MapSpec& spec, const ModeBox& box, int G) {
    const int side = box.side();
    const int dim = box.dim();
    const int K = box.K;
    const double two_pi = 2.0 * std::numbers::pi;

    // map images on the quadrature grid
    std::vector<double> tx(static_cast<std::size_t>(G) * G), ty(tx.size());
    parallel_for(static_cast<std::size_t>(G), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t a = lo; a < hi; ++a)
            for (int b = 0; b < G; ++b) {
                TorusPoint q = eval_map(spec, {static_cast<double>(a) / G,
                                               static_cast<double>(b) / G});
                tx[a * G + b] = q.x;
                ty[a * G + b] = q.y;
            }
    });

    // twiddles W[m] = exp(2 pi i m / G) and mode-frequency index tables
    std::vector<std::complex<double>> W(static_cast<std::size_t>(G));
    for (int m = 0; m < G; ++m)
        W[static_cast<std::size_t>(m)] = std::polar(1.0, two_pi * m / G);
    std::vector<int> freq(static_cast<std::size_t>(side) * G);
    for (int k = -K; k <= K; ++k)
        for (int b = 0; b < G; ++b) {
            int m = ((k * b) % G + G) % G;
            freq[static_cast<std::size_t>(k + K) * G + b] = m;
        }

    Eigen::MatrixXcd M(dim, dim);
    const double norm = 1.0 / (static_cast<double>(G) * G);
    parallel_for(static_cast<std::size_t>(dim), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::complex<double>> s(static_cast<std::size_t>(G) * G);
        std::vector<std::complex<double>> v(static_cast<std::size_t>(G) * side);
        for (std::size_t jdx = lo; jdx < hi; ++jdx) {
            auto [j1, j2] = box.mode(static_cast<int>(jdx));
            for (std::size_t i = 0; i < s.size(); ++i) {
                double phase = -two_pi * (j1 * tx[i] + j2 * ty[i]);
                s[i] = {std::cos(phase), std::sin(phase)};
            }
            // separable partial DFT: reduce b, then a, at modes |k_i| <= K
            for (int a = 0; a < G; ++a)
                for (int kb = 0; kb < side; ++kb) {
                    std::complex<double> acc = 0.0;
                    const int* f = &freq[static_cast<std::size_t>(kb) * G];
                    const std::complex<double>* row = &s[static_cast<std::size_t>(a) * G];
                    for (int b = 0; b < G; ++b) acc += row[b] * W[static_cast<std::size_t>(f[b])];
                    v[static_cast<std::size_t>(a) * side + kb] = acc;
                }
            for (int ka = 0; ka < side; ++ka) {
                const int* f = &freq[static_cast<std::size_t>(ka) * G];
                for (int kb = 0; kb < side; ++kb) {
                    std::complex<double> acc = 0.0;
                    for (int a = 0; a < G; ++a)
                        acc += v[static_cast<std::size_t>(a) * side + kb] * W[static_cast<std::size_t>(f[a])];
                    M(static_cast<Eigen::Index>(jdx), box.index(ka - K, kb - K)) = acc * norm;
                }
            }
        }
    });
    return M;
}

Eigen::MatrixXcd exact_linear_matrix(const Mat2i& A, const ModeBox& box) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(box.dim(), box.dim());
    for (int j1 = -box.K; j1 <= box.K; ++j1)
        for (int j2 = -box.K; j2 <= box.K; ++j2) {
            // k = A^T j
            auto k1 = static_cast<std::int64_t>(A(0, 0)) * j1 + A(1, 0) * j2;
            auto k2 = static_cast<std::int64_t>(A(0, 1)) * j1 + A(1, 1) * j2;
            if (k1 >= -box.K && k1 <= box.K && k2 >= -box.K && k2 <= box.K)
                M(box.index(j1, j2), box.index(static_cast<int>(k1), static_cast<int>(k2))) = 1.0;
        }
    return M;
}

} // namespace

TransferMatrix assemble_transfer_matrix(const MapSpec& spec, int K, int G,
                                        const AssembleOptions& opt) {
    if (K < 1) throw Error("mode cutoff K must be >= 1");
    if (G < 4 * K) throw Error("anti-aliasing requires G >= 4K");
    TransferMatrix tm;
    tm.box = ModeBox{K};
    tm.G = G;
    tm.spec = spec;
    if (spec.is_linear() && !opt.force_quadrature) {
        tm.exact_linear = true;
        tm.M = exact_linear_matrix(spec.A, tm.box);
        return tm;
    }
    tm.M = quadrature_assembly(spec, tm.box, G);
    if (opt.check_aliasing) {
        Eigen::MatrixXcd fine = quadrature_assembly(spec, tm.box, 2 * G);
        tm.alias_shift = (tm.M - fine).cwiseAbs().maxCoeff();
        tm.alias_warning = tm.alias_shift > opt.alias_tol;
    }
    return tm;
}

SpectrumResult transfer_spectrum(const TransferMatrix& tm, const SpectrumOptions& opt) {
    SpectrumResult out;
    out.K = tm.box.K;
    const int dim = tm.box.dim();
    const int zero_idx = tm.box.index(0, 0);

    if (tm.exact_linear) {
        // partial permutation: the only cycle is the zero mode; everything
        // else escapes the section and is a spurious finite-section zero
        out.eigenvalues.push_back({1.0, true, 0.0});
        for (int i = 1; i < dim; ++i) out.eigenvalues.push_back({0.0, false, 0.0});
        out.srb_coeffs = Eigen::VectorXcd::Zero(dim);
        out.srb_coeffs(zero_idx) = 1.0;
        out.gap = 0.0;
        return out;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(tm.M, true);
    if (es.info() != Eigen::Success) throw Error("transfer matrix eigensolver failed");

    // reference eigenvalues from the K-2 section, same grid
    std::vector<std::complex<double>> ref;
    if (tm.box.K - 2 >= 1) {
        AssembleOptions o;
        o.check_aliasing = false;
        o.force_quadrature = true;
        TransferMatrix small = assemble_transfer_matrix(tm.spec, tm.box.K - 2, tm.G, o);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es2(small.M, false);
        if (es2.info() != Eigen::Success) throw Error("reference eigensolver failed");
        ref.assign(es2.eigenvalues().data(), es2.eigenvalues().data() + small.box.dim());
    }

    std::vector<int> order(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ma = std::abs(es.eigenvalues()(a)), mb = std::abs(es.eigenvalues()(b));
        if (ma != mb) return ma > mb;
        return std::arg(es.eigenvalues()(a)) < std::arg(es.eigenvalues()(b));
    });

    int unit_pos = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
        std::complex<double> lam = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
        EigenvalueRecord rec;
        rec.value = lam;
        if (!ref.empty()) {
            double shift = std::numeric_limits<double>::infinity();
            for (const auto& r : ref) shift = std::min(shift, std::abs(lam - r));
            rec.stability_shift = shift;
            rec.trusted = shift < opt.stability_tol;
        }
        out.eigenvalues.push_back(rec);
        double d1 = std::abs(lam - 1.0);
        if (d1 < best) {
            best = d1;
            unit_pos = i;
        }
    }
    if (unit_pos < 0 || best > opt.unit_tol)
        throw NoUnitEigenvalue("nearest eigenvalue to 1 is off by " + format_double(best));
    out.eigenvalues[static_cast<std::size_t>(unit_pos)].trusted = true;

    // in a degenerate cluster at the unit eigenvalue, take the eigenvector
    // with the largest zero-mode weight
    std::complex<double> unit_val = out.eigenvalues[static_cast<std::size_t>(unit_pos)].value;
    int best_col = order[static_cast<std::size_t>(unit_pos)];
    double best_mass = std::abs(es.eigenvectors()(zero_idx, best_col));
    for (int i = 0; i < dim; ++i) {
        if (std::abs(es.eigenvalues()(i) - unit_val) > 1e-9) continue;
        double mass = std::abs(es.eigenvectors()(zero_idx, i));
        if (mass > best_mass) {
            best_mass = mass;
            best_col = i;
        }
    }
    Eigen::VectorXcd v = es.eigenvectors().col(best_col);
    if (std::abs(v(zero_idx)) < 1e-12)
        throw Error("unit eigenvector has vanishing zero mode");
    out.srb_coeffs = v / v(zero_idx);

    std::vector<double> trusted_mod;
    for (const auto& r : out.eigenvalues)
        if (r.trusted) trusted_mod.push_back(std::abs(r.value));
    std::sort(trusted_mod.rbegin(), trusted_mod.rend());
    out.gap = trusted_mod.size() >= 2 ? trusted_mod[1] : 0.0;
    return out;
}

std::vector<std::complex<double>> trusted_eigenvalues(const SpectrumResult& s) {
    std::vector<std::complex<double>> v;
    for (const auto& r : s.eigenvalues)
        if (r.trusted) v.push_back(r.value);
    return v;
}

double lambda_cut(const SpectrumResult& s, double floor) {
    double cut = 1.0;
    for (const auto& r : s.eigenvalues) {
        double m = std::abs(r.value);
        if (r.trusted && m >= floor) cut = std::min(cut, m);
    }
    return cut;
}

double srb_expectation(const FourierObservable& f, const SpectrumResult& spectrum) {
    ModeBox box{spectrum.K};
    std::complex<double> mu = 0.0;
    for (const auto& m : f.modes) {
        if (!box.contains(-m.k[0], -m.k[1]))
            throw Error("observable mode outside the spectral cutoff K");
        mu += m.amp * spectrum.srb_coeffs(box.index(-m.k[0], -m.k[1]));
    }
    return mu.real();
}

std::vector<std::complex<double>> srb_density_grid(const SpectrumResult& spectrum, int n) {
    ModeBox box{spectrum.K};
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::complex<double>> rho(static_cast<std::size_t>(n) * n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (int j = 0; j < n; ++j) {
                std::complex<double> s = 0.0;
                for (int idx = 0; idx < box.dim(); ++idx) {
                    auto [k1, k2] = box.mode(idx);
                    double w = two_pi * (k1 * static_cast<double>(i) / n +
                                         k2 * static_cast<double>(j) / n);
                    s += spectrum.srb_coeffs(idx) * std::complex<double>(std::cos(w), std::sin(w));
                }
                rho[i * static_cast<std::size_t>(n) + j] = s;
            }
    });
    return rho;
}

FourierObservable subtract_mean(const FourierObservable& f, const SpectrumResult& spectrum) {
    double mu = srb_expectation(f, spectrum);
    FourierObservable out = f;
    bool found = false;
    for (auto& m : out.modes)
        if (m.k[0] == 0 && m.k[1] == 0) {
            m.amp -= mu;
            found = true;
            break;
        }
    if (!found && mu != 0.0) out.modes.push_back({{0, 0}, {-mu, 0.0}});
    out.mean_subtracted = true;
    return out;
}

} // namespace reslab
