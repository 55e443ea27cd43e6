#include "reslab/observable.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace reslab {

double observable_value(const FourierObservable& f, const TorusPoint& p) {
    std::complex<double> s = 0.0;
    for (const auto& m : f.modes) {
        double w = 2.0 * std::numbers::pi * (m.k[0] * p.x + m.k[1] * p.y);
        s += m.amp * std::complex<double>(std::cos(w), std::sin(w));
    }
    return s.real();
}

double conjugate_symmetry_defect(const FourierObservable& f) {
    std::map<std::array<int, 2>, std::complex<double>> table;
    for (const auto& m : f.modes) table[m.k] += m.amp;
    double defect = 0.0;
    for (const auto& [k, amp] : table) {
        auto it = table.find({-k[0], -k[1]});
        std::complex<double> partner = (it == table.end()) ? 0.0 : it->second;
        defect = std::max(defect, std::abs(partner - std::conj(amp)));
    }
    return defect;
}

} // namespace reslab
