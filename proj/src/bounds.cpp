#include "hamm/bounds.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace hamm {

std::string_view to_string(Rigor r) { return r == Rigor::Certified ? "certified" : "heuristic"; }

namespace {

void require_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw ParameterError("bound radius rho must be positive, got " + std::to_string(rho));
}

BoundValue declared(const Expr& e, double rho, const char* name) {
    const double v = e.bound(rho);
    if (!(v >= 0.0))
        throw ParameterError(std::string("declared bound ") + name + "(" + std::to_string(rho) + ") = "
                             + std::to_string(v) + " is negative");
    return {v, v, Rigor::Certified};
}

[[noreturn]] void missing(const std::string& name) {
    throw IncompleteBoundsError("no declared bound " + name
                                + " in the problem file and estimation of missing bounds is disabled");
}

} // namespace

BoundSet::BoundSet(const ProblemSpec& spec, BoundOptions opts) : spec_(spec), opts_(opts) {}

BoundValue BoundSet::f_upper(double rho) const {
    require_rho(rho);
    if (const auto& e = spec_.declared_bounds().f_upper)
        return declared(*e, rho, "f_upper");
    if (!opts_.estimate_missing)
        missing("f_upper");
    const double raw = estimate_f_extrema(spec_, rho, opts_.f_lattice).max_est;
    return {raw * opts_.upper_inflation, raw, Rigor::Heuristic};
}

BoundValue BoundSet::f_lower(double rho) const {
    require_rho(rho);
    if (const auto& e = spec_.declared_bounds().f_lower)
        return declared(*e, rho, "f_lower");
    if (!opts_.estimate_missing)
        missing("f_lower");
    const double raw = estimate_f_extrema(spec_, rho, opts_.f_lattice).min_est;
    return {raw * opts_.lower_deflation, raw, Rigor::Heuristic};
}

BoundValue BoundSet::H_upper(int i, double rho) const {
    require_rho(rho);
    if (i != 1 && i != 2)
        throw ParameterError("functional index must be 1 or 2");
    const auto& e = i == 1 ? spec_.declared_bounds().H1 : spec_.declared_bounds().H2;
    if (e)
        return declared(*e, rho, i == 1 ? "H1" : "H2");
    if (!opts_.estimate_missing)
        missing(i == 1 ? "H1" : "H2");
    const double raw = estimate_H(spec_, i, rho, opts_.H_samples, opts_.seed).value;
    return {raw * opts_.upper_inflation, raw, Rigor::Heuristic};
}

FExtrema estimate_f_extrema(const ProblemSpec& spec, double rho, int m) {
    require_rho(rho);
    if (m < 2)
        throw ParameterError("lattice size m must be at least 2");
    const Expr& f = spec.nonlinearity();
    const double hi[3] = {1.0, rho, rho};

    FExtrema out;
    out.max_est = -std::numeric_limits<double>::infinity();
    out.min_est = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                const double p[3] = {double(a) / (m - 1), rho * b / (m - 1), rho * c / (m - 1)};
                const double value = f.nonlinearity(p[0], p[1], p[2]);
                if (value > out.max_est) {
                    out.max_est = value;
                    std::copy(p, p + 3, out.argmax);
                }
                if (value < out.min_est) {
                    out.min_est = value;
                    std::copy(p, p + 3, out.argmin);
                }
            }
    out.lattice_max = out.max_est;
    out.lattice_min = out.min_est;

    // One coordinate pass per extremum, resolving the neighbouring cells.
    constexpr int kRefine = 33;
    auto refine = [&](double* point, double& best, bool maximize) {
        for (int axis = 0; axis < 3; ++axis) {
            const double h = hi[axis] / (m - 1);
            const double lo = std::max(0.0, point[axis] - h);
            const double up = std::min(hi[axis], point[axis] + h);
            double p[3] = {point[0], point[1], point[2]};
            for (int k = 0; k < kRefine; ++k) {
                p[axis] = lo + (up - lo) * k / (kRefine - 1);
                const double value = f.nonlinearity(p[0], p[1], p[2]);
                if (maximize ? value > best : value < best) {
                    best = value;
                    point[axis] = p[axis];
                }
            }
        }
    };
    refine(out.argmax, out.max_est, true);
    refine(out.argmin, out.min_est, false);
    return out;
}

HEstimate estimate_H(const ProblemSpec& spec, int i, double rho, int samples, std::uint64_t seed) {
    require_rho(rho);
    if (i != 1 && i != 2)
        throw ParameterError("functional index must be 1 or 2");
    const Expr& h = spec.h(i);
    const Gridd& grid = spec.grid();

    HEstimate best{-std::numeric_limits<double>::infinity(), {}};
    auto consider = [&](const GridFunctiond& u, const std::string& what) {
        const double value = h.functional(u);
        if (value > best.value)
            best = {value, what};
    };

    consider(GridFunctiond::sample(grid, [rho](double t) { return rho * t; }, [rho](double) { return rho; }),
             "u(t) = rho*t");
    consider(GridFunctiond::sample(grid, [rho](double) { return rho; }, [](double) { return 0.0; }),
             "u(t) = rho");
    constexpr int kBlend = 8;
    for (int k = 1; k < kBlend; ++k) {
        const double a = double(k) / kBlend;
        std::ostringstream what;
        what << "u(t) = rho*(" << a << " + " << 1 - a << "*t)";
        consider(GridFunctiond::sample(grid, [=](double t) { return rho * (a + (1 - a) * t); },
                                       [=](double) { return rho * (1 - a); }),
                 what.str());
    }
    std::mt19937_64 rng(seed);
    for (int k = 0; k < samples; ++k)
        consider(random_cone_function(grid, rng, rho), "random cone function #" + std::to_string(k));
    return best;
}

FalsifyResult falsify_linear_growth(const ProblemSpec& spec, const LinearGrowthWitness& w, int budget,
                                    std::uint64_t seed) {
    if (budget < 1)
        throw ParameterError("falsification budget must be at least 1");
    const Expr& f = spec.nonlinearity();
    const Gridd& grid = spec.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FalsifyResult result;

    auto slack = [](double bound) { return 1e-9 * std::max(1.0, std::abs(bound)); };

    auto check_f = [&](double t, double u, double v) {
        ++result.points_checked;
        const double value = f.nonlinearity(t, u, v);
        const double bound = w.tau * u;
        const char* what = nullptr;
        if (!(value >= -slack(0.0)))
            what = "f >= 0";
        else if (!(value <= bound + slack(bound)))
            what = "f <= tau*u";
        if (!what)
            return false;
        std::ostringstream os;
        os << what << " fails at (t, u, v) = (" << t << ", " << u << ", " << v << "): f = " << value
           << ", tau*u = " << bound;
        result.consistent = false;
        result.counterexample = Counterexample{what, t, u, v, value, bound, os.str()};
        return true;
    };

    auto check_h = [&](const GridFunctiond& u, const std::string& member) {
        const double xi[2] = {w.xi1, w.xi2};
        for (int i = 1; i <= 2; ++i) {
            ++result.points_checked;
            const double value = spec.h(i).functional(u);
            const double bound = xi[i - 1] * sup_norm(u);
            if (value <= bound + slack(bound))
                continue;
            const std::string what = "h" + std::to_string(i) + " <= xi" + std::to_string(i) + "*|u|";
            std::ostringstream os;
            os << what << " fails on " << member << ": h" << i << " = " << value << ", bound = " << bound;
            result.consistent = false;
            result.counterexample = Counterexample{what, 0, 0, 0, value, bound, os.str()};
            return true;
        }
        return false;
    };

    constexpr int kLattice = 9;
    constexpr int kRandomPoints = 256;
    constexpr int kRandomFunctions = 16;
    for (int k = 0; k < budget; ++k) {
        const double rho = std::ldexp(1.0, k);
        for (int a = 0; a < kLattice; ++a)
            for (int b = 0; b < kLattice; ++b)
                for (int c = 0; c < kLattice; ++c)
                    if (check_f(double(a) / (kLattice - 1), rho * b / (kLattice - 1), rho * c / (kLattice - 1)))
                        return result;
        for (int p = 0; p < kRandomPoints; ++p) {
            const double t = unit(rng), u = rho * unit(rng), v = rho * unit(rng);
            if (check_f(t, u, v))
                return result;
        }

        const auto ramp = GridFunctiond::sample(grid, [rho](double t) { return rho * t; },
                                                [rho](double) { return rho; });
        const auto flat = GridFunctiond::sample(grid, [rho](double) { return rho; }, [](double) { return 0.0; });
        if (check_h(ramp, "u(t) = " + std::to_string(rho) + "*t") || check_h(flat, "u(t) = " + std::to_string(rho)))
            return result;
        for (int q = 0; q < kRandomFunctions; ++q)
            if (check_h(random_cone_function(grid, rng, rho),
                        "random cone function of norm " + std::to_string(rho)))
                return result;
    }
    return result;
}

} // namespace hamm
