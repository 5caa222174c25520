#include "hamm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace hamm {

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Diverged: return "diverged";
    }
    return "?";
}

namespace {

bool cone_member(const GridFunctiond& u) { return all_finite(u) && in_cone(u) && is_nondecreasing(u); }

} // namespace

SolveResult picard_solve(const ProblemSpec& spec, const GridFunctiond& u0, const SolveOptions& opts,
                         std::optional<Annulus> annulus) {
    if (!(opts.tol > 0.0))
        throw ParameterError("solver tolerance must be positive");
    if (opts.max_iter < 1)
        throw ParameterError("max_iter must be at least 1");
    if (!(u0.grid == spec.grid()))
        throw ShapeError("start function lives on a different grid than the problem");
    if (!cone_member(u0))
        throw ParameterError("start function is not in the cone");

    SolveResult result{SolveStatus::MaxIterations, u0, 0, 0.0, 0.0, false, true, std::nullopt, {}};
    GridFunctiond u = u0;
    for (int k = 1; k <= opts.max_iter; ++k) {
        GridFunctiond w = apply_T(spec, u);
        result.iterations = k;
        if (!all_finite(w) || c1_norm(w) > opts.divergence_cap) {
            result.status = SolveStatus::Diverged;
            result.residual = std::numeric_limits<double>::infinity();
            break;
        }
        const double distance = c1_distance(w, u);
        if (distance <= opts.tol) {
            result.status = SolveStatus::Converged;
            result.residual = distance;
            break;
        }
        if (!cone_member(w))
            result.iterates_in_cone = false;
        result.residual = distance;
        u = std::move(w);
    }
    result.norm = c1_norm(u);
    result.cone_ok = cone_member(u);
    if (annulus)
        result.in_annulus = annulus->contains(result.norm);
    result.u = std::move(u);
    return result;
}

std::vector<SolveResult> multistart_solve(const ProblemSpec& spec, const MultistartOptions& ms,
                                          const SolveOptions& opts, std::optional<Annulus> annulus) {
    if (ms.starts < 1)
        throw ParameterError("multistart needs at least one start");
    const Gridd& grid = spec.grid();

    // Build every start up front so the random stream does not depend on
    // thread scheduling.
    std::vector<GridFunctiond> starts;
    std::vector<std::string> labels;
    starts.push_back(GridFunctiond::zero(grid));
    labels.emplace_back("zero");
    const int remaining = ms.starts - 1;
    const int ramps = remaining / 2;
    const double lo = std::log(ms.min_start_norm);
    const double hi = std::log(ms.max_start_norm);
    for (int k = 0; k < ramps; ++k) {
        const double rho = std::exp(ramps == 1 ? lo : lo + (hi - lo) * k / (ramps - 1));
        starts.push_back(GridFunctiond::sample(grid, [rho](double t) { return rho * t; },
                                               [rho](double) { return rho; }));
        std::ostringstream os;
        os << "ramp rho=" << rho;
        labels.push_back(os.str());
    }
    std::mt19937_64 rng(ms.seed);
    std::uniform_real_distribution<double> log_norm(lo, hi);
    for (int k = ramps; k < remaining; ++k) {
        const double rho = std::exp(log_norm(rng));
        starts.push_back(random_cone_function(grid, rng, rho));
        std::ostringstream os;
        os << "random #" << (k - ramps) << " norm=" << rho;
        labels.push_back(os.str());
    }

    std::vector<std::optional<SolveResult>> slots(starts.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < starts.size(); i = next++) {
            try {
                slots[i] = picard_solve(spec, starts[i], opts, annulus);
                slots[i]->start = labels[i];
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(ms.threads, static_cast<int>(starts.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    std::vector<SolveResult> all;
    for (auto& s : slots)
        all.push_back(std::move(*s));
    std::stable_sort(all.begin(), all.end(), [](const SolveResult& a, const SolveResult& b) {
        if (a.status != b.status)
            return a.status < b.status;
        return a.norm < b.norm;
    });

    std::vector<SolveResult> kept;
    const double radius = 10.0 * opts.tol;
    for (auto& candidate : all) {
        bool duplicate = false;
        if (candidate.status == SolveStatus::Converged)
            for (const auto& k : kept)
                if (k.status == SolveStatus::Converged && c1_distance(k.u, candidate.u) < radius) {
                    duplicate = true;
                    break;
                }
        if (!duplicate)
            kept.push_back(std::move(candidate));
    }
    return kept;
}

VerifyReport verify_solution(const ProblemSpec& spec, const GridFunctiond& u, std::optional<Annulus> annulus) {
    VerifyReport rep;
    // T is only defined on the cone.
    rep.residual = all_finite(u) && in_cone(u) ? c1_distance(apply_T(spec, u), u)
                                               : std::numeric_limits<double>::infinity();
    rep.norm = c1_norm(u);
    rep.values_nonnegative = u.values.minCoeff() >= -kConeTolerance;
    rep.derivs_nonnegative = u.dvalues.minCoeff() >= -kConeTolerance;
    rep.nondecreasing = is_nondecreasing(u);
    rep.consistency_defect = consistency_defect(u);
    rep.consistent = rep.consistency_defect <= consistency_tolerance(u.grid);
    if (annulus)
        rep.in_annulus = annulus->contains(rep.norm);
    return rep;
}

} // namespace hamm
