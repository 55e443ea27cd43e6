#ifndef RESLAB_NUMERICS_HPP
#define RESLAB_NUMERICS_HPP

#include <complex>
#include <vector>

namespace reslab {

/// Roots of sum_k coeffs[k] z^k via the companion matrix. Coefficients with
/// |c_k| below 1e-14 * max|c| are trimmed off the top first; a constant
/// polynomial has no roots.
std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coeffs);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace reslab

#endif
