#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "reslab/mollifier.hpp"

using namespace reslab;

TEST_CASE("kernel construction and the exact r=2 ladder weights") {
    auto k0 = build_kernel(0, 0.1);
    REQUIRE(k0.node_amplitudes.size() == 1);
    CHECK(k0.node_amplitudes[0].second == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k0.support_radius == 0.1);

    // Vandermonde solution for r=2: a = (-1/3, 4/3)
    auto k2 = build_kernel(2, 0.1);
    REQUIRE(k2.node_amplitudes.size() == 2);
    CHECK(k2.node_amplitudes[0].second == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(k2.node_amplitudes[1].second == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(build_kernel(3, 0.1), Error); // odd: caller told to use r=4
    CHECK_THROWS_AS(build_kernel(10, 0.1), Error);
    CHECK_THROWS_AS(build_kernel(2, 0.0), Error);
}

TEST_CASE("kernel moments: mass 1, vanishing moments, two-resolution agreement") {
    for (int r : {0, 2, 4}) {
        auto k = build_kernel(r, 0.05);
        double coarse = verify_moments(k, r, 512);
        double fine = verify_moments(k, r, 1024);
        INFO("r = ", r);
        CHECK(fine <= 1e-8);
        CHECK(std::abs(coarse - fine) <= 1e-9);
    }
    // the r=6 and r=8 ladders have bumps at scales 1/8 and 1/16 and need
    // proportionally finer grids
    for (int r : {6, 8}) {
        int base = (r == 6) ? 1024 : 2048;
        auto k = build_kernel(r, 0.05);
        double coarse = verify_moments(k, r, base);
        double fine = verify_moments(k, r, 2 * base);
        INFO("r = ", r);
        CHECK(fine <= 1e-8);
        CHECK(std::abs(coarse - fine) <= 1e-9);
    }
}

TEST_CASE("kernel evenness, support and scaling") {
    auto k = build_kernel(4, 0.05);
    for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.52, 0.77}, Vec2{0.05, -0.93}}) {
        CHECK(kernel_base_value(k, x) == kernel_base_value(k, -x));
        CHECK(kernel_value(k, 0.05 * x) ==
              doctest::Approx(kernel_base_value(k, x) / (0.05 * 0.05)).epsilon(1e-12));
    }
    CHECK(kernel_base_value(k, {1.0, 0.0}) == 0.0);
    CHECK(kernel_base_value(k, {0.8, 0.7}) == 0.0);
    CHECK(kernel_value(k, {0.051, 0.0}) == 0.0);
    CHECK(kernel_value(k, {0.03, 0.0}) != 0.0);
}

TEST_CASE("linear cat map: the localized trace is exact") {
    MapSpec cat = make_linear_map(test::cat_matrix());
    for (double eps : {0.1, 0.05}) {
        auto k = build_kernel(2, eps);
        // linear change of variables: integral = |det(Id-A)|^{-1} = 1
        CHECK(std::abs(mollified_trace(cat, k, 1) - 1.0) <= 1e-12);
    }
}

TEST_CASE("inverse branches: one nonzero box per fixed point") {
    MapSpec spec = test::perturbed_cat(0.01);
    auto k = build_kernel(2, 0.03);
    auto branches = mollified_trace_by_branch(spec, k, 2);
    REQUIRE(branches.size() == 5); // #Fix(T^2)
    for (double b : branches) CHECK(b > 0.0);
    // each branch integral approximates the weight of its fixed point
    double total = 0.0;
    for (double b : branches) total += b;
    CHECK(std::abs(total - 1.0) <= 0.1);
}

TEST_CASE("overlapping localization boxes are rejected") {
    MapSpec spec = test::perturbed_cat(0.01);
    auto k = build_kernel(2, 0.2);
    CHECK_THROWS_AS(mollified_trace(spec, k, 2), SupportOverlap);
}

TEST_CASE("localization completeness against the global grid oracle") {
    MapSpec spec = test::perturbed_cat(0.01);
    auto k = build_kernel(2, 0.05);
    double localized = mollified_trace(spec, k, 1);
    double global = global_trace_quadrature(spec, k, 1, 2048);
    CHECK(std::abs(localized - global) <= 1e-8);
}

TEST_CASE("scaling study: epsilon=0 saturates at the quadrature floor") {
    MapSpec cat = make_linear_map(test::cat_matrix());
    auto res = trace_error_scaling(cat, 1, 2, {0.08, 0.04, 0.02, 0.01});
    CHECK(res.floor_reached);
    CHECK(res.gamma_ref == doctest::Approx(1.0).epsilon(1e-12));
    for (double e : res.abs_errors) CHECK(e <= 1e-10);
}

TEST_CASE("scaling study: perturbed map fits the moment-order slope") {
    MapSpec spec = test::perturbed_cat(0.01);
    auto res = trace_error_scaling(spec, 1, 2, {0.08, 0.04, 0.02, 0.01});
    CHECK_FALSE(res.floor_reached);
    // even kernel: first surviving moment has order r+2
    CHECK(res.slope >= 2.5);
    for (std::size_t i = 1; i < res.abs_errors.size(); ++i)
        CHECK(res.abs_errors[i] < res.abs_errors[i - 1]);
}

TEST_CASE("scaling study input validation") {
    MapSpec cat = make_linear_map(test::cat_matrix());
    CHECK_THROWS_AS(trace_error_scaling(cat, 1, 2, {0.08, 0.04}), Error);
}
