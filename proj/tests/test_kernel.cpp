#include <doctest.h>

#include <random>

#include "hamm/kernel.hpp"

using namespace hamm;

namespace {

ExprKernel expr_kernel(const char* k, const char* dk) {
    return ExprKernel(Expr::parse(k, Role::Kernel), Expr::parse(dk, Role::Kernel));
}

} // namespace

TEST_CASE("focal kernel closed form") {
    FocalKernel k;
    CHECK(k.value(0.5, 0.25) == 0.25);
    CHECK(k.value(0.25, 0.5) == 0.25);
    CHECK(k.value(0.5, 0.5) == 0.5);
    CHECK(k.deriv(0.5, 0.25) == 0.0);
    CHECK(k.deriv(0.5, 0.5) == 0.0);
    CHECK(k.deriv(0.25, 0.5) == 1.0);
}

TEST_CASE("K and K* of the focal kernel on every grid") {
    FocalKernel k;
    for (int n = 2; n <= 400; ++n) {
        Gridd g(n);
        CHECK(constant_K(k, g) == 0.5);
        CHECK(constant_Kstar(k, g) == 1.0);
    }
}

TEST_CASE("K and K* of other kernels") {
    Gridd g(100);
    const auto zero = expr_kernel("0", "0");
    CHECK(constant_K(zero, g) == 0.0);
    CHECK(constant_Kstar(zero, g) == 0.0);

    // k = t*s: K = integral of s; affine, so trapezoid-exact.
    const auto ts = expr_kernel("t*s", "s");
    CHECK(std::abs(constant_K(ts, g) - 0.5) <= 1e-12);
    // d/dt k = s for every t: K* = 1/2.
    CHECK(std::abs(constant_Kstar(ts, g) - 0.5) <= 1e-4);
}

TEST_CASE("focal kernel rows") {
    FocalKernel k;
    Gridd g(8);
    const VectorXd ones = VectorXd::Ones(g.size());
    CHECK(apply_kernel_row(k, g, ones, 8) == 0.5);
    CHECK(apply_kernel_row(k, g, ones, 0) == 0.0);
    CHECK(apply_dkernel_row(k, g, ones, 2) == 0.75);
    CHECK(apply_dkernel_row(k, g, ones, 8) == 0.0);
    CHECK_THROWS_AS(apply_kernel_row(k, g, VectorXd::Ones(3), 0), ShapeError);
    CHECK_THROWS_AS(apply_dkernel_row(k, g, ones, 9), ShapeError);
}

TEST_CASE("focal value row matches a split-at-node oracle") {
    // integral_0^t s F(s) ds + t * integral_t^1 F(s) ds, each piece by trapezoid.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 3.0);
    FocalKernel k;
    Gridd g(40);
    VectorXd F(g.size());
    for (auto& x : F)
        x = unit(rng);
    const VectorXd sF = g.nodes().cwiseProduct(F);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        const double oracle = integrate_head(sF, g, j) + g.node(j) * integrate_tail(F, g, j);
        CHECK(apply_kernel_row(k, g, F, j) == doctest::Approx(oracle).epsilon(1e-14));
        CHECK(apply_dkernel_row(k, g, F, j) == doctest::Approx(integrate_tail(F, g, j)).epsilon(1e-14));
    }
}

TEST_CASE("row properties for non-negative F") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FocalKernel focal;
    const auto user = expr_kernel("t*s + t", "s + 1");
    Gridd g(64);
    for (int trial = 0; trial < 30; ++trial) {
        VectorXd F(g.size());
        for (auto& x : F)
            x = unit(rng) * 5;
        double previous = -1.0;
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            const double row = apply_kernel_row(focal, g, F, j);
            CHECK(row >= previous);
            previous = row;
            CHECK(apply_dkernel_row(focal, g, F, j) >= 0.0);
            CHECK(apply_kernel_row(user, g, F, j) >= 0.0);
            CHECK(apply_dkernel_row(user, g, F, j) >= 0.0);
        }
    }
}

TEST_CASE("K* dominates every node integral") {
    const auto user = expr_kernel("t^2*s", "2*t*s");
    Gridd g(50);
    const double kstar = constant_Kstar(user, g);
    const VectorXd ones = VectorXd::Ones(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j)
        CHECK(apply_dkernel_row(user, g, ones, j) <= kstar);
    CHECK(std::abs(kstar - 1.0) <= 1e-4);
}

TEST_CASE("assembled matrices reproduce the rows") {
    FocalKernel k;
    Gridd g(32);
    const auto m = assemble(k, g);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 2.0);
    VectorXd F(g.size());
    for (auto& x : F)
        x = unit(rng);
    const VectorXd a = m.value * F;
    const VectorXd b = m.deriv * F;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        CHECK(a(j) == doctest::Approx(apply_kernel_row(k, g, F, j)).epsilon(1e-13));
        CHECK(b(j) == doctest::Approx(apply_dkernel_row(k, g, F, j)).epsilon(1e-13));
    }
}

TEST_CASE("sampled hypothesis checks") {
    for (const auto& c : check_kernel_hypotheses(FocalKernel{}))
        CHECK_MESSAGE(c.passed, c.name);

    const auto negative = expr_kernel("t - s", "1");
    const auto checks = check_kernel_hypotheses(negative);
    CHECK_FALSE(checks[0].passed);
    CHECK(checks[1].passed);

    ExprKernel dominated(Expr::parse("t*s", Role::Kernel), Expr::parse("s", Role::Kernel),
                         Expr::parse("s/2", Role::Kernel), Expr::parse("1", Role::Kernel));
    const auto dom = check_kernel_hypotheses(dominated);
    CHECK_FALSE(dom[2].passed); // t*s > s/2 for t > 1/2
    CHECK(dom[3].passed);

    CHECK_THROWS_AS(ExprKernel(Expr::parse("t", Role::Kernel), Expr::parse("1", Role::Kernel),
                               Expr::parse("t", Role::Kernel), Expr::parse("1", Role::Kernel)),
                    ParameterError);
}
