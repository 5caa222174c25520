// Acceptance criteria 1-9: one PASS/FAIL line each, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hamm/certificate.hpp"
#include "hamm/expr.hpp"
#include "hamm/kernel.hpp"
#include "hamm/solver.hpp"
#include "hamm/sweep.hpp"

using namespace hamm;

namespace {

const std::string kData = HAMM_DATA_DIR;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Check&)>& body) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_seconds > 0)
        c.require(secs < limit_seconds, "runtime " + num(secs) + " s over " + num(limit_seconds) + " s");
    if (!c.ok)
        ++failures;
    std::printf("%s  criterion %d  %-48s (%.3f s)%s%s\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), secs,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    std::fflush(stdout);
}

} // namespace

int main() {
    criterion(1, "focal kernel K = 1/2, K* = 1", 0.0, [](Check& c) {
        FocalKernel k;
        for (int n = 2; n <= 512; ++n) {
            Gridd g(n);
            const double K = constant_K(k, g);
            const double Ks = constant_Kstar(k, g);
            c.require(K == 0.5, "n=" + std::to_string(n) + " K=" + num(K));
            c.require(Ks == 1.0, "n=" + std::to_string(n) + " K*=" + num(Ks));
            const VectorXd ones = VectorXd::Ones(g.size());
            c.require(apply_dkernel_row(k, g, ones, 0) == 1.0, "row 0 of dk");
            if (!c.ok)
                return;
        }
        // Timed evaluation at the default grid, best of 5.
        Gridd g(256);
        double secs = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const double K = constant_K(k, g), Ks = constant_Kstar(k, g);
            secs = std::min(secs, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            c.require(K == 0.5 && Ks == 1.0, "n=256");
        }
        c.require(secs < 1e-3, "K, K* at n=256 took " + num(secs) + " s");
    });

    criterion(2, "example 1 existence certificate", 0.0, [](Check& c) {
        const auto spec = load_problem(kData + "/example1.prob");
        const BoundSet bounds(spec);
        c.require(bounds.f_upper(1.0).value == std::exp(2.0), "f_upper(1) != e^2");
        c.require(bounds.f_lower(0.05).value == 1.0, "f_lower(1/20) != 1");
        c.require(bounds.H_upper(1, 1.0).value == 2.0 && bounds.H_upper(2, 1.0).value == 2.0, "H != 2");
        const auto cert = check_existence(spec, bounds, 1.0 / 20, 1.0);
        const double e2 = std::exp(2.0);
        const double value = e2 / 20 + 2.0 / 11 + 2.0 / 12;
        const double deriv = e2 / 10 + 2.0 / 12;
        c.require(std::abs(cert.lhs_value_branch - value) <= 1e-9, "value branch " + num(cert.lhs_value_branch));
        c.require(std::abs(cert.lhs_value_branch - 0.717938) <= 1e-6, "value branch not 0.717938");
        c.require(std::abs(cert.lhs_deriv_branch - deriv) <= 1e-9, "deriv branch " + num(cert.lhs_deriv_branch));
        c.require(std::abs(cert.lhs_deriv_branch - 0.905572) <= 1e-6, "deriv branch not 0.905572");
        c.require(cert.lhs_idx0 == 0.05, "idx0 " + num(cert.lhs_idx0));
        c.require(cert.verdict == Verdict::Certified, "verdict " + std::string(to_string(cert.verdict)));
    });

    criterion(3, "example 2 non-existence certificate", 0.0, [](Check& c) {
        const auto spec = load_problem(kData + "/example2.prob");
        const LinearGrowthWitness w{3.0, 1.0, 1.0};
        const auto cert = certify_nonexistence(spec, w, 12, 0);
        c.require(std::abs(cert.lhs - 0.95) <= 1e-12, "lhs " + num(cert.lhs));
        c.require(cert.passed(), "verdict fail");
        const auto edge = check_nonexistence(spec.with_params({2.0 / 3, 0.0, 0.0}), w);
        c.require(edge.lhs == 1.0, "edge lhs " + num(edge.lhs));
        c.require(!edge.passed(), "edge passed");
    });

    criterion(4, "multistart finds a fixed point in the annulus", 10.0, [](Check& c) {
        const auto spec = load_problem(kData + "/example1.prob", 256);
        const Annulus annulus{1.0 / 20, 1.0};
        const auto results = multistart_solve(spec, MultistartOptions{}, SolveOptions{}, annulus);
        bool found = false;
        std::string diag;
        for (const auto& r : results) {
            if (r.status == SolveStatus::Converged && r.residual <= 1e-10 && r.cone_ok && r.iterates_in_cone
                && annulus.contains(r.norm)) {
                const auto rep = verify_solution(spec, r.u, annulus);
                found = found || (rep.cone_ok() && rep.consistent);
            }
            diag += " [" + r.start + ": " + std::string(to_string(r.status)) + ", it=" + std::to_string(r.iterations)
                  + ", residual=" + num(r.residual) + ", norm=" + num(r.norm) + "]";
        }
        c.require(found, "no converged fixed point in [1/20, 1]; Picard did not corroborate existence:" + diag);
    });

    criterion(5, "multistart finds only the zero solution", 30.0, [](Check& c) {
        const auto spec = load_problem(kData + "/example2.prob", 256);
        MultistartOptions ms;
        ms.starts = 50;
        const auto results = multistart_solve(spec, ms);
        c.require(!results.empty(), "no results");
        for (const auto& r : results) {
            c.require(r.status == SolveStatus::Converged,
                      r.start + " status " + std::string(to_string(r.status)));
            c.require(r.norm <= 1e-8, r.start + " norm " + num(r.norm));
        }
    });

    criterion(6, "apply_T preserves the cone (200 random inputs)", 0.0, [](Check& c) {
        std::mt19937_64 rng(20240601);
        // Norms up to twice the certified outer radius R = 1.
        std::uniform_real_distribution<double> norm(0.0, 2.0);
        for (const char* file : {"/example1.prob", "/example2.prob"}) {
            const auto spec = load_problem(kData + file, 256);
            const double tol = consistency_tolerance(spec.grid());
            for (int k = 0; k < 200; ++k) {
                const auto u = random_cone_function(spec.grid(), rng, norm(rng));
                const auto w = apply_T(spec, u);
                c.require(all_finite(w), std::string(file) + " non-finite output");
                c.require(in_cone(w), std::string(file) + " output leaves the cone at sample " + std::to_string(k));
                c.require(is_nondecreasing(w), std::string(file) + " output decreasing");
                const double defect = consistency_defect(w);
                c.require(defect <= tol, std::string(file) + " consistency defect " + num(defect));
                if (!c.ok)
                    return;
            }
        }
    });

    criterion(7, "bound estimates and witness falsification", 0.0, [](Check& c) {
        const auto ex1 = load_problem(kData + "/example1.prob");
        const auto ex2 = load_problem(kData + "/example2.prob");
        const auto e = estimate_f_extrema(ex1, 1.0, 64);
        c.require(e.max_est >= 7.0 && e.max_est <= std::exp(2.0), "max_est " + num(e.max_est));
        c.require(e.min_est >= 1.0 && e.min_est <= 1.01, "min_est " + num(e.min_est));
        const auto ok = falsify_linear_growth(ex2, {3.0, 1.0, 1.0});
        c.require(ok.consistent, "tau=3 refuted for example 2");
        const auto bad = falsify_linear_growth(ex1, {3.0, 1.0, 1.0});
        c.require(!bad.consistent && bad.counterexample.has_value(), "no counterexample for example 1");
    });

    criterion(8, "20x20x20 sweep reproduces (3/2)lambda + eta1 + eta2 < 1", 60.0, [](Check& c) {
        const auto spec = load_problem(kData + "/example2.prob", 256);
        const AxisRange axis{0.0, 1.0, 20};
        const SweepBox box{axis, axis, axis};
        const BoundSet bounds(spec);
        const auto serial = run_sweep(spec, box, bounds, spec.witness(), 0.05, 1.0, {1});
        const auto parallel = run_sweep(spec, box, bounds, spec.witness(), 0.05, 1.0, {8});
        c.require(serial.size() == 8000, "cell count");
        c.require(count_conflicts(serial) == 0, "conflict cells");
        int mismatches = 0;
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j)
                for (int k = 0; k < 20; ++k) {
                    // Lattice values are i/19: (3/2)i + j + k < 19.
                    const bool expected = 3 * i + 2 * j + 2 * k < 38;
                    const auto& cell = serial[(i * 20 + j) * 20 + k];
                    if ((cell.classification == Classification::Nonexistence) != expected)
                        ++mismatches;
                }
        c.require(mismatches == 0, std::to_string(mismatches) + " cells disagree with the integer oracle");
        std::ostringstream a, b;
        write_sweep_csv(a, serial);
        write_sweep_csv(b, parallel);
        c.require(a.str() == b.str(), "serial and parallel output differ");
    });

    criterion(9, "expression parse/print/evaluate", 0.0, [](Check& c) {
        struct Case {
            const char* text;
            Role role;
        };
        const Case cases[] = {{"exp(t*(u+v))", Role::Nonlinearity},
                              {"U(0.25) + DU(0.75)^2", Role::Functional},
                              {"u*(2 - t*sin(u*v))", Role::Nonlinearity},
                              {"INT(U(s)^3 + DU(s))", Role::Functional}};
        for (const auto& cs : cases) {
            const auto e = Expr::parse(cs.text, cs.role);
            const auto once = Expr::parse(e.print(), cs.role);
            c.require(once == e, std::string("round trip changed ") + cs.text);
            c.require(once.print() == e.print(), std::string("print unstable for ") + cs.text);
        }
        const auto f1 = Expr::parse("exp(t*(u+v))", Role::Nonlinearity);
        const auto f2 = Expr::parse("u*(2 - t*sin(u*v))", Role::Nonlinearity);
        c.require(std::abs(f1.nonlinearity(1, 1, 1) - 7.389056098930650) <= 1e-9, "exp at (1,1,1)");
        c.require(std::abs(f1.nonlinearity(0, 3.5, 2.0) - 1.0) <= 1e-9, "exp at t=0");
        c.require(std::abs(f2.nonlinearity(0.5, 1, 0) - 2.0) <= 1e-9, "f2 at (0.5,1,0)");
        Gridd g(256);
        const auto ramp = GridFunctiond::sample(g, [](double t) { return t; }, [](double) { return 1.0; });
        const auto h1 = Expr::parse("U(0.25) + DU(0.75)^2", Role::Functional);
        const auto h2 = Expr::parse("INT(U(s)^3 + DU(s))", Role::Functional);
        c.require(std::abs(h1.functional(ramp) - 1.25) <= 1e-9, "h1 on u=t");
        c.require(std::abs(h2.functional(ramp) - 1.25) <= 1e-3, "h2 on u=t");
        c.require(h2.functional(GridFunctiond::zero(g)) == 0.0, "h2 on u=0");
    });

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
