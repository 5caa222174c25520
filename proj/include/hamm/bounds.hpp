#ifndef HAMM_BOUNDS_HPP
#define HAMM_BOUNDS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "hamm/problem.hpp"

namespace hamm {

enum class Rigor { Certified, Heuristic };

std::string_view to_string(Rigor r);

// One bound entry. For heuristic entries `value` is the inflated (upper) or
// deflated (lower) estimate actually used; `raw` is the sampled extremum.
struct BoundValue {
    double value = 0.0;
    double raw = 0.0;
    Rigor rigor = Rigor::Certified;
};

struct BoundOptions {
    // Fill bounds the problem file does not declare with sampled estimates.
    bool estimate_missing = false;
    int f_lattice = 64;
    int H_samples = 64;
    std::uint64_t seed = 0;
    double upper_inflation = 1.05;
    double lower_deflation = 0.95;
};

/*
 * Certificate inputs f_upper(rho) >= max f, f_lower(rho) <= min f over
 * [0,1] x [0,rho]^2, and H_upper(i, rho) >= sup of h_i over the sphere
 * |u| = rho of the cone.
 *
 * Declared closed forms are certified. Sampled estimates bound the extrema
 * from the wrong side (a lattice max can only undershoot the true max), so
 * they are labelled heuristic and scaled by the safety factors.
 */
class BoundSet {
public:
    BoundSet(const ProblemSpec& spec, BoundOptions opts = {});

    BoundValue f_upper(double rho) const;
    BoundValue f_lower(double rho) const;
    BoundValue H_upper(int i, double rho) const;

    const BoundOptions& options() const { return opts_; }

private:
    ProblemSpec spec_;
    BoundOptions opts_;
};

struct FExtrema {
    double max_est = 0.0;
    double min_est = 0.0;
    // Lattice-only values, before the refinement pass.
    double lattice_max = 0.0;
    double lattice_min = 0.0;
    double argmax[3] = {0, 0, 0};
    double argmin[3] = {0, 0, 0};
};

/// Scan of f on an m x m x m lattice over [0,1] x [0,rho]^2 followed by one
/// coordinate refinement pass around the best lattice points.
FExtrema estimate_f_extrema(const ProblemSpec& spec, double rho, int m = 64);

struct HEstimate {
    double value = 0.0;
    std::string maximizer; // description of the family member attaining it
};

/// Lower estimate of sup h_i over the cone sphere c1_norm(u) = rho, from
/// u = rho*t, u = rho*(a + (1-a)t), u == rho and seeded random
/// piecewise-linear cone functions.
HEstimate estimate_H(const ProblemSpec& spec, int i, double rho, int samples = 64, std::uint64_t seed = 0);

struct Counterexample {
    std::string what; // "f >= 0", "f <= tau*u", "h1 <= xi1*|u|", ...
    double t = 0, u = 0, v = 0; // for nonlinearity violations
    double value = 0;
    double bound = 0;
    std::string description;
};

struct FalsifyResult {
    bool consistent = true;
    std::optional<Counterexample> counterexample;
    int points_checked = 0;
};

/// Searches for points violating 0 <= f <= tau*u or h_i[u] <= xi_i*|u|_inf
/// over boxes [0, 2^k]^2, k = 0..budget-1.
FalsifyResult falsify_linear_growth(const ProblemSpec& spec, const LinearGrowthWitness& w, int budget = 12,
                                    std::uint64_t seed = 0);

} // namespace hamm

#endif // HAMM_BOUNDS_HPP
