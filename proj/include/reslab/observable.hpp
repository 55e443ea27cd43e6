#ifndef RESLAB_OBSERVABLE_HPP
#define RESLAB_OBSERVABLE_HPP

#include <array>
#include <complex>
#include <vector>

#include "reslab/torus_map.hpp"

namespace reslab {

/// Real-valued trigonometric polynomial on T^2, stored as complex Fourier
/// modes closed under k -> -k conjugation.
struct FourierObservable {
    struct Mode {
        std::array<int, 2> k{0, 0};
        std::complex<double> amp;
    };
    std::vector<Mode> modes;
    bool mean_subtracted = false;

    /// cos(2 pi k.x)
    static FourierObservable cosine(int k1, int k2) {
        FourierObservable f;
        f.modes = {{{k1, k2}, {0.5, 0.0}}, {{-k1, -k2}, {0.5, 0.0}}};
        return f;
    }
    /// sin(2 pi k.x)
    static FourierObservable sine(int k1, int k2) {
        FourierObservable f;
        f.modes = {{{k1, k2}, {0.0, -0.5}}, {{-k1, -k2}, {0.0, 0.5}}};
        return f;
    }
};

double observable_value(const FourierObservable& f, const TorusPoint& p);

/// Max violation of amp(-k) == conj(amp(k)); 0 for a real observable.
double conjugate_symmetry_defect(const FourierObservable& f);

} // namespace reslab

#endif
