#include "reslab/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "reslab/numerics.hpp"

namespace reslab {

namespace {

void require_mean_zero(const FourierObservable& f, const char* name) {
    if (!f.mean_subtracted)
        throw NotMeanZero(std::string(name) + " must be mean-subtracted against the SRB measure");
}

bool has_trusted_unit(const SpectrumResult& s) {
    for (const auto& r : s.eigenvalues)
        if (r.trusted && std::abs(r.value - 1.0) < 1e-3) return true;
    return false;
}

} // namespace

CorrelationSeries correlation_sequence_operator(const TransferMatrix& tm,
                                                const SpectrumResult& spectrum,
                                                const FourierObservable& f,
                                                const FourierObservable& g, int N) {
    require_mean_zero(f, "f");
    require_mean_zero(g, "g");
    if (!has_trusted_unit(spectrum))
        throw UntrustedSpectrum("no trusted unit eigenvalue in the spectrum");
    if (spectrum.K != tm.box.K) throw UntrustedSpectrum("spectrum/matrix cutoff mismatch");
    const ModeBox& box = tm.box;

    // v = Fourier coefficients of f * rho_SRB, truncated to the box
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(box.dim());
    for (int idx = 0; idx < box.dim(); ++idx) {
        auto [k1, k2] = box.mode(idx);
        std::complex<double> acc = 0.0;
        for (const auto& m : f.modes) {
            int r1 = k1 - m.k[0], r2 = k2 - m.k[1];
            if (box.contains(r1, r2)) acc += m.amp * spectrum.srb_coeffs(box.index(r1, r2));
        }
        v(idx) = acc;
    }

    auto pair_with_g = [&](const Eigen::VectorXcd& w) {
        std::complex<double> acc = 0.0;
        for (const auto& m : g.modes) {
            if (!box.contains(-m.k[0], -m.k[1]))
                throw Error("observable mode outside the spectral cutoff K");
            acc += m.amp * w(box.index(-m.k[0], -m.k[1]));
        }
        return acc.real();
    };

    CorrelationSeries series;
    series.method = CorrelationMethod::operator_route;
    series.N = N;
    series.c.reserve(static_cast<std::size_t>(N) + 1);
    Eigen::VectorXcd w = v;
    series.c.push_back(pair_with_g(w));
    for (int n = 1; n <= N; ++n) {
        w = tm.M * w;
        series.c.push_back(pair_with_g(w));
    }
    return series;
}

CorrelationSeries correlation_sequence_trajectory(const MapSpec& spec,
                                                  const FourierObservable& f,
                                                  const FourierObservable& g, int N,
                                                  const TrajectoryOptions& opt) {
    require_mean_zero(f, "f");
    require_mean_zero(g, "g");
    if (opt.length <= N) throw Error("trajectory shorter than requested lag");

    std::mt19937_64 rng(opt.seed);
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    TorusPoint x{uniform(), uniform()};
    for (std::int64_t i = 0; i < opt.burn_in; ++i) x = eval_map(spec, x);

    const std::int64_t total = opt.length + N;
    std::vector<double> fv(static_cast<std::size_t>(total)), gv(fv.size());
    for (std::int64_t i = 0; i < total; ++i) {
        fv[static_cast<std::size_t>(i)] = observable_value(f, x);
        gv[static_cast<std::size_t>(i)] = observable_value(g, x);
        x = eval_map(spec, x);
    }

    CorrelationSeries series;
    series.method = CorrelationMethod::trajectory;
    series.N = N;
    series.c.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 0; n <= N; ++n) {
        double acc = 0.0; // fixed lag-order accumulation
        for (std::int64_t i = 0; i < opt.length; ++i)
            acc += fv[static_cast<std::size_t>(i)] * gv[static_cast<std::size_t>(i + n)];
        series.c[static_cast<std::size_t>(n)] = acc / static_cast<double>(opt.length);
    }
    return series;
}

std::complex<double> generating_function(const CorrelationSeries& series,
                                         std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = series.c.size(); k-- > 0;) acc = acc * z + series.c[k];
    return acc;
}

DecayEnvelope decay_envelope(const CorrelationSeries& series) {
    std::vector<double> xs, ys;
    for (std::size_t n = 1; n < series.c.size(); ++n)
        if (std::abs(series.c[n]) > 1e-14) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(std::log(std::abs(series.c[n])));
        }
    DecayEnvelope env;
    if (xs.size() < 2) {
        env.rho = std::numeric_limits<double>::infinity();
        env.amplitude = 0.0;
        return env;
    }
    double slope = fit_slope(xs, ys);
    env.rho = std::exp(-slope);
    double c = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        c = std::max(c, std::exp(ys[i]) * std::pow(env.rho, xs[i]));
    env.amplitude = c;
    return env;
}

CorrelationSpectrumValue correlation_spectrum(const CorrelationSeries& forward,
                                              const CorrelationSeries& reverse,
                                              double omega) {
    std::complex<double> zf = std::polar(1.0, omega);
    CorrelationSpectrumValue out;
    out.value = generating_function(forward, zf) + generating_function(reverse, std::conj(zf)) -
                forward.c.at(0);
    auto tail = [](const CorrelationSeries& s) {
        DecayEnvelope env = decay_envelope(s);
        if (!std::isfinite(env.rho) || env.rho <= 1.0) return 0.0;
        double n1 = static_cast<double>(s.c.size());
        return env.amplitude * std::pow(env.rho, -n1) / (1.0 - 1.0 / env.rho);
    };
    out.truncation_estimate = tail(forward) + tail(reverse);
    return out;
}

PadePoles pade_poles(const CorrelationSeries& series, int L, int M, const PadeOptions& opt) {
    const int N = static_cast<int>(series.c.size()) - 1;
    if (L < 0 || M < 1) throw Error("Pade degrees must satisfy L >= 0, M >= 1");
    if (L + M > N) throw Error("Pade degrees need L + M <= N");
    auto c = [&](int i) { return (i < 0) ? 0.0 : series.c.at(static_cast<std::size_t>(i)); };

    // denominator: sum_{m=1..M} c_{L+j-m} b_m = -c_{L+j},  j = 1..M
    Eigen::MatrixXd H(M, M);
    Eigen::VectorXd rhs(M);
    for (int j = 1; j <= M; ++j) {
        for (int m = 1; m <= M; ++m) H(j - 1, m - 1) = c(L + j - m);
        rhs(j - 1) = -c(L + j);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues()(M - 1);
    double smax = svd.singularValues()(0);
    PadePoles out;
    out.L = L;
    out.M = M;
    out.condition_estimate = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    out.trusted = out.condition_estimate <= opt.condition_limit;
    Eigen::VectorXd b = svd.solve(rhs);

    std::vector<std::complex<double>> denom(static_cast<std::size_t>(M) + 1);
    denom[0] = 1.0;
    for (int m = 1; m <= M; ++m) denom[static_cast<std::size_t>(m)] = b(m - 1);
    std::vector<std::complex<double>> numer(static_cast<std::size_t>(L) + 1);
    for (int k = 0; k <= L; ++k) {
        std::complex<double> acc = 0.0;
        for (int m = 0; m <= std::min(k, M); ++m) acc += denom[static_cast<std::size_t>(m)] * c(k - m);
        numer[static_cast<std::size_t>(k)] = acc;
    }

    auto zeros_num = polynomial_roots(numer);
    auto horner = [](const std::vector<std::complex<double>>& p, std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + p[k];
        return acc;
    };
    auto qprime = [&](std::complex<double> z) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = denom.size(); k-- > 1;)
            acc = acc * z + denom[k] * static_cast<double>(k);
        return acc;
    };

    for (const auto& p : polynomial_roots(denom)) {
        bool froissart = false;
        for (const auto& zn : zeros_num)
            if (std::abs(p - zn) < opt.froissart_tol) froissart = true;
        if (froissart) continue;
        out.poles.push_back(p);
        std::complex<double> qp = qprime(p);
        out.residues.push_back(qp == 0.0 ? std::complex<double>(0.0) : horner(numer, p) / qp);
    }
    return out;
}

std::vector<std::complex<double>> stable_pade_poles(const CorrelationSeries& series,
                                                    std::vector<int> degrees,
                                                    double match_tol) {
    if (degrees.size() < 2) throw Error("stability scan needs at least 2 degrees");
    std::sort(degrees.begin(), degrees.end());
    std::vector<std::vector<std::complex<double>>> sets;
    for (int d : degrees) {
        if (2 * d > static_cast<int>(series.c.size()) - 1)
            throw Error("series too short for the [" + std::to_string(d) + "/" +
                        std::to_string(d) + "] stability scan");
        sets.push_back(pade_poles(series, d, d).poles);
    }
    // anchor on the highest usable degree, cross-checked against the others
    std::vector<std::complex<double>> stable;
    for (const auto& p : sets.back()) {
        bool in_all = true;
        for (std::size_t s = 0; s + 1 < sets.size(); ++s) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& q : sets[s]) dmin = std::min(dmin, std::abs(p - q));
            if (dmin > match_tol * std::max(1.0, std::abs(p))) in_all = false;
        }
        if (in_all) stable.push_back(p);
    }
    std::sort(stable.begin(), stable.end(), [](const auto& a, const auto& b) {
        double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        return std::arg(a) < std::arg(b);
    });
    return stable;
}

UnifiedReport match_all(const std::vector<DetZero>& zeros, const SpectrumResult& spectrum,
                        const std::vector<std::complex<double>>& pade, double tol_eigenvalue,
                        double tol_pade, double report_floor) {
    UnifiedReport rep;
    rep.tol_eigenvalue = tol_eigenvalue;
    rep.tol_pade = tol_pade;
    ResonanceReport base = match_zeros_to_spectrum(zeros, spectrum, tol_eigenvalue);

    std::vector<bool> pole_used(pade.size(), false);
    auto attach_pole = [&](TripleMatch& t) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = pade.size();
        for (std::size_t i = 0; i < pade.size(); ++i) {
            if (pole_used[i]) continue;
            double d = std::abs(pade[i] - t.zero);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        if (best_i < pade.size() && best <= tol_pade) {
            pole_used[best_i] = true;
            t.pade_pole = pade[best_i];
            t.residual_pade = best;
        }
    };

    for (const auto& p : base.pairs) {
        TripleMatch t;
        t.zero = p.zero;
        t.eigenvalue = p.eigenvalue;
        t.residual_eigenvalue = p.residual;
        attach_pole(t);
        rep.triples.push_back(t);
    }
    for (const auto& z : base.unmatched_zeros) {
        TripleMatch t;
        t.zero = z;
        attach_pole(t);
        rep.triples.push_back(t);
    }
    for (const auto& e : base.unmatched_eigenvalues)
        if (std::abs(e) >= report_floor) rep.unmatched_eigenvalues.push_back(e);
    for (std::size_t i = 0; i < pade.size(); ++i)
        if (!pole_used[i]) rep.unmatched_poles.push_back(pade[i]);
    return rep;
}

} // namespace reslab
