#ifndef HAMM_SOLVER_HPP
#define HAMM_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamm/problem.hpp"

namespace hamm {

enum class SolveStatus { Converged, MaxIterations, Diverged };

std::string_view to_string(SolveStatus s);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    double divergence_cap = 1e8;
};

struct Annulus {
    double r = 0.0;
    double R = 0.0;

    bool contains(double norm) const { return r <= norm && norm <= R; }
};

struct SolveResult {
    SolveStatus status = SolveStatus::MaxIterations;
    GridFunctiond u;
    int iterations = 0;
    double residual = 0.0; // c1_norm(u - Tu)
    double norm = 0.0;     // c1_norm(u)
    bool cone_ok = false;  // returned u is in the cone and non-decreasing
    bool iterates_in_cone = true;
    std::optional<bool> in_annulus;
    std::string start;
};

/// Successive substitution u <- T(u) from u0. Stops when c1_norm(u - Tu)
/// drops to tol (converged, returning u), after max_iter applications of T,
/// or when an iterate is non-finite or exceeds the divergence cap.
SolveResult picard_solve(const ProblemSpec& spec, const GridFunctiond& u0, const SolveOptions& opts = {},
                         std::optional<Annulus> annulus = std::nullopt);

struct MultistartOptions {
    int starts = 16;
    std::uint64_t seed = 0;
    int threads = 1;
    double min_start_norm = 1e-2;
    double max_start_norm = 10.0;
};

/// Starts: u0 == 0, ramps rho*t with log-spaced rho, then seeded random
/// cone functions. Converged results closer than 10*tol are merged. The
/// output is sorted by (status, norm) and independent of `threads`.
std::vector<SolveResult> multistart_solve(const ProblemSpec& spec, const MultistartOptions& ms,
                                          const SolveOptions& opts = {},
                                          std::optional<Annulus> annulus = std::nullopt);

struct VerifyReport {
    double residual = 0.0;
    double norm = 0.0;
    bool values_nonnegative = false;
    bool derivs_nonnegative = false;
    bool nondecreasing = false;
    double consistency_defect = 0.0;
    bool consistent = false;
    std::optional<bool> in_annulus;

    bool cone_ok() const { return values_nonnegative && derivs_nonnegative && nondecreasing; }
};

VerifyReport verify_solution(const ProblemSpec& spec, const GridFunctiond& u,
                             std::optional<Annulus> annulus = std::nullopt);

} // namespace hamm

#endif // HAMM_SOLVER_HPP
