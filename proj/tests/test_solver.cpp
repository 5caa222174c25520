#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hamm/solver.hpp"

using namespace hamm;

namespace {

const std::string kData = HAMM_DATA_DIR;

} // namespace

TEST_CASE("picard on example 1 reaches a fixed point in the annulus") {
    const auto spec = load_problem(kData + "/example1.prob", 128);
    const auto res = picard_solve(spec, GridFunctiond::zero(spec.grid()), {}, Annulus{0.05, 1.0});
    REQUIRE(res.status == SolveStatus::Converged);
    CHECK(res.residual <= 1e-10);
    CHECK(res.cone_ok);
    CHECK(res.iterates_in_cone);
    REQUIRE(res.in_annulus);
    CHECK(*res.in_annulus);
    const auto rep = verify_solution(spec, res.u, Annulus{0.05, 1.0});
    CHECK(rep.residual <= 1e-9);
    CHECK(rep.cone_ok());
    CHECK(rep.consistent);
}

TEST_CASE("picard on the trivial problem") {
    const auto spec = load_problem(kData + "/empty.prob", 16);
    const auto res = picard_solve(spec, GridFunctiond::zero(spec.grid()));
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.iterations == 1);
    CHECK(res.norm == 0.0);
}

TEST_CASE("picard detects divergence and iteration caps") {
    auto def = read_problem_file(kData + "/example1.prob");
    def.f = Expr::parse("u^2 + 1", Role::Nonlinearity);
    def.params = {50.0, 0.0, 0.0};
    const auto spec = ProblemSpec::build(def, 32);
    const auto res = picard_solve(spec, GridFunctiond::zero(spec.grid()));
    CHECK(res.status == SolveStatus::Diverged);

    const auto ex1 = load_problem(kData + "/example1.prob", 32);
    SolveOptions few;
    few.max_iter = 2;
    CHECK(picard_solve(ex1, GridFunctiond::zero(ex1.grid()), few).status == SolveStatus::MaxIterations);
}

TEST_CASE("picard input validation") {
    const auto spec = load_problem(kData + "/example1.prob", 16);
    auto bad = GridFunctiond::zero(spec.grid());
    bad.dvalues(2) = -1.0;
    CHECK_THROWS_AS(picard_solve(spec, bad), ParameterError);
    SolveOptions opts;
    opts.tol = 0.0;
    CHECK_THROWS_AS(picard_solve(spec, GridFunctiond::zero(spec.grid()), opts), ParameterError);
    CHECK_THROWS_AS(picard_solve(spec, GridFunctiond::zero(Gridd(8))), ShapeError);
}

TEST_CASE("multistart on example 2 only finds the zero solution") {
    const auto spec = load_problem(kData + "/example2.prob", 64);
    MultistartOptions ms;
    ms.starts = 12;
    const auto results = multistart_solve(spec, ms);
    REQUIRE_FALSE(results.empty());
    for (const auto& r : results) {
        CHECK(r.status == SolveStatus::Converged);
        CHECK(r.norm <= 1e-8);
    }
}

TEST_CASE("multistart is independent of the thread count") {
    const auto spec = load_problem(kData + "/example1.prob", 64);
    MultistartOptions ms;
    ms.starts = 8;
    ms.seed = 3;
    const auto a = multistart_solve(spec, ms);
    ms.threads = 4;
    const auto b = multistart_solve(spec, ms);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].status == b[i].status);
        CHECK(a[i].norm == b[i].norm);
        CHECK(a[i].start == b[i].start);
    }
    // All converged starts reach the same fixed point.
    CHECK(a.front().status == SolveStatus::Converged);
}

TEST_CASE("verify_solution flags non-solutions") {
    const auto spec = load_problem(kData + "/example1.prob", 32);
    const auto ramp = GridFunctiond::sample(spec.grid(), [](double t) { return t; }, [](double) { return 1.0; });
    const auto rep = verify_solution(spec, ramp, Annulus{0.05, 1.0});
    CHECK(rep.residual > 0.1);
    CHECK(rep.cone_ok());
    CHECK(*rep.in_annulus);
    auto neg = ramp;
    neg.values(0) = -1.0;
    CHECK_FALSE(verify_solution(spec, neg).cone_ok());
}

TEST_CASE("reported residual matches an independent recomputation") {
    const auto spec = load_problem(kData + "/example1.prob", 256);
    const auto res = picard_solve(spec, GridFunctiond::zero(spec.grid()));
    REQUIRE(res.status == SolveStatus::Converged);
    CHECK(std::abs(verify_solution(spec, res.u).residual - res.residual) <= 1e-12);
}

TEST_CASE("multistart on the zero problem returns the zero function once") {
    const auto spec = load_problem(kData + "/empty.prob", 32);
    MultistartOptions ms;
    ms.starts = 6;
    const auto results = multistart_solve(spec, ms);
    REQUIRE(results.size() == 1);
    CHECK(results[0].norm == 0.0);
}

TEST_CASE("grid refinement: errors shrink at second order") {
    auto solve_on = [](Eigen::Index n) {
        const auto spec = load_problem(kData + "/example1.prob", n);
        SolveOptions opts;
        opts.tol = 1e-13;
        const auto res = picard_solve(spec, GridFunctiond::zero(spec.grid()), opts);
        REQUIRE(res.status == SolveStatus::Converged);
        return res.u;
    };
    const auto a = solve_on(128), b = solve_on(256), c = solve_on(512);
    // Differences at the nodes shared by all three grids.
    double d1 = 0.0, d2 = 0.0;
    for (Eigen::Index j = 0; j <= 128; ++j) {
        d1 = std::max({d1, std::abs(a.values(j) - b.values(2 * j)), std::abs(a.dvalues(j) - b.dvalues(2 * j))});
        d2 = std::max({d2, std::abs(b.values(2 * j) - c.values(4 * j)), std::abs(b.dvalues(2 * j) - c.dvalues(4 * j))});
    }
    MESSAGE("d(128,256) = " << d1 << ", d(256,512) = " << d2);
    CHECK(d1 < 1e-4);
    CHECK(d1 / d2 > 3.0);
    CHECK(d1 / d2 < 5.0);
}
