#ifndef RESLAB_TEST_HELPERS_HPP
#define RESLAB_TEST_HELPERS_HPP

#include "reslab/torus_map.hpp"

namespace reslab::test {

inline Mat2i cat_matrix() {
    Mat2i A;
    A << 2, 1, 1, 1;
    return A;
}

inline Mat2i cat_squared_matrix() {
    Mat2i A;
    A << 5, 3, 3, 2;
    return A;
}

inline Mat2i fib_matrix() {
    Mat2i A;
    A << 1, 1, 1, 0;
    return A;
}

// non-symmetric hyperbolic matrix, det 1 (pins down transpose conventions)
inline Mat2i skew_matrix() {
    Mat2i A;
    A << 2, 1, 3, 2;
    return A;
}

inline MapSpec perturbed_cat(double epsilon) {
    return catalog_map(epsilon == 0.02 ? "cat-b" : "cat-a");
}

} // namespace reslab::test

#endif
