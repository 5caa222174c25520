#include "hamm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <thread>

#include "expansion.hpp"

namespace hamm {

std::string_view to_string(Classification c) {
    switch (c) {
    case Classification::Existence: return "existence";
    case Classification::Nonexistence: return "nonexistence";
    case Classification::BothFail: return "both-fail";
    case Classification::Conflict: return "conflict";
    }
    return "?";
}

double AxisRange::at(int i) const {
    if (steps == 1)
        return lo;
    if (i == steps - 1)
        return hi;
    return lo + (hi - lo) * i / (steps - 1);
}

AxisRange AxisRange::parse(const std::string& text) {
    AxisRange r;
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    if (second == std::string::npos)
        throw ParseError("range '" + text + "' must have the form lo:hi:steps", 0);
    auto number = [&](std::string_view part, std::size_t offset) {
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw ParseError("bad number '" + std::string(part) + "' in range '" + text + "'", offset);
        return value;
    };
    const std::string_view view(text);
    r.lo = number(view.substr(0, first), 0);
    r.hi = number(view.substr(first + 1, second - first - 1), first + 1);
    const double steps = number(view.substr(second + 1), second + 1);
    if (steps < 1 || steps != std::floor(steps))
        throw ParameterError("range '" + text + "': steps must be a positive integer");
    r.steps = static_cast<int>(steps);
    if (!(r.lo >= 0.0) || !(r.hi >= r.lo))
        throw ParameterError("range '" + text + "': need 0 <= lo <= hi");
    return r;
}

namespace {

void require_axis(const AxisRange& a, const char* name) {
    if (a.steps < 1)
        throw ParameterError(std::string("sweep axis ") + name + " needs at least one step");
    if (!(a.lo >= 0.0) || !(a.hi >= a.lo))
        throw ParameterError(std::string("sweep axis ") + name + " must satisfy 0 <= lo <= hi");
}

// A lattice coordinate lo + (hi - lo)*i/d as the exact pair (numerator, d).
struct LatticeValue {
    detail::Expansion numerator;
    double denominator = 1.0;
};

LatticeValue lattice_value(const AxisRange& a, int i) {
    LatticeValue v;
    if (a.steps == 1) {
        v.numerator = detail::Expansion(a.lo);
        return v;
    }
    v.denominator = a.steps - 1;
    detail::Expansion span(a.hi);
    span += -a.lo;
    v.numerator = detail::Expansion(a.lo) * v.denominator;
    v.numerator += span * static_cast<double>(i);
    return v;
}

// Exact sign of c_lambda*lambda + c_1*eta1 + c_2*eta2 - rhs at the rational
// lattice point, each coefficient given as a product of doubles.
int lattice_sign(const LatticeValue (&x)[3], const std::vector<double> (&coef)[3], double rhs) {
    const double d = x[0].denominator * x[1].denominator * x[2].denominator;
    detail::Expansion total;
    for (int a = 0; a < 3; ++a) {
        detail::Expansion term = x[a].numerator * (d / x[a].denominator);
        for (double c : coef[a])
            term = term * c;
        total += term;
    }
    total -= detail::Expansion(rhs) * d;
    return total.sign();
}

// Re-decides the certificate inequalities exactly at the lattice point; the
// stored lhs values are the rounded ones.
void decide_exactly(SweepCell& cell, const ProblemSpec& spec, const ExistenceInputs& in, const LatticeValue (&x)[3]) {
    const double K = spec.K(), Ks = spec.Kstar();
    const double fu = in.f_upper_R.value, fl = in.f_lower_r.value;
    const double H1 = in.H1_R.value, H2 = in.H2_R.value;
    auto& e = cell.existence;
    const bool value_ok =
        lattice_sign(x, {{fu, K}, {spec.gamma_at_one(1), H1}, {spec.gamma_at_one(2), H2}}, e.R) <= 0;
    const bool deriv_ok = lattice_sign(x, {{fu, Ks}, {spec.dgamma_sup(1), H1}, {spec.dgamma_sup(2), H2}}, e.R) <= 0;
    const bool lower_ok = lattice_sign(x, {{fl, std::min(K, Ks)}, {0.0}, {0.0}}, e.r) >= 0;
    if (value_ok && deriv_ok && lower_ok)
        e.verdict = e.rigor == Rigor::Certified ? Verdict::Certified : Verdict::HeuristicPass;
    else
        e.verdict = Verdict::Fail;
    if (cell.nonexistence) {
        const auto& w = cell.nonexistence->witness;
        cell.nonexistence->inequality_holds =
            lattice_sign(x, {{w.tau, K}, {w.xi1, spec.gamma_at_one(1)}, {w.xi2, spec.gamma_at_one(2)}}, 1.0) < 0;
    }
}

Classification classify(const ExistenceCertificate& e, const std::optional<NonexistenceCertificate>& n) {
    const bool exists = e.passed();
    const bool only_zero = n && n->passed();
    if (exists && only_zero)
        return Classification::Conflict;
    if (exists)
        return Classification::Existence;
    if (only_zero)
        return Classification::Nonexistence;
    return Classification::BothFail;
}

} // namespace

std::vector<SweepCell> run_sweep(const ProblemSpec& spec, const SweepBox& box, const ExistenceInputs& bounds,
                                 const std::optional<LinearGrowthWitness>& witness, double r, double R,
                                 const SweepOptions& opts) {
    require_axis(box.lambda, "lambda");
    require_axis(box.eta1, "eta1");
    require_axis(box.eta2, "eta2");
    if (!(r > 0.0) || !(r < R))
        throw ParameterError("sweep radii must satisfy 0 < r < R");
    const std::size_t n1 = box.eta1.steps, n2 = box.eta2.steps;
    const std::size_t total = static_cast<std::size_t>(box.lambda.steps) * n1 * n2;

    std::vector<SweepCell> cells(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) {
            const int a = static_cast<int>(idx / (n1 * n2));
            const int b = static_cast<int>((idx / n2) % n1);
            const int c = static_cast<int>(idx % n2);
            const Parameters p{box.lambda.at(a), box.eta1.at(b), box.eta2.at(c)};
            const ProblemSpec at = spec.with_params(p);
            SweepCell& cell = cells[idx];
            cell.params = p;
            cell.existence = check_existence(at, bounds, r, R);
            if (witness)
                cell.nonexistence = check_nonexistence(at, *witness);
            const LatticeValue x[3] = {lattice_value(box.lambda, a), lattice_value(box.eta1, b),
                                       lattice_value(box.eta2, c)};
            decide_exactly(cell, at, bounds, x);
            cell.classification = classify(cell.existence, cell.nonexistence);
        }
    };
    const int threads = std::max(1, opts.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    return cells;
}

std::vector<SweepCell> run_sweep(const ProblemSpec& spec, const SweepBox& box, const BoundSet& bounds,
                                 const std::optional<LinearGrowthWitness>& witness, double r, double R,
                                 const SweepOptions& opts) {
    return run_sweep(spec, box, resolve_existence_inputs(bounds, r, R), witness, r, R, opts);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
    os << "lambda,eta1,eta2,classification,value_branch,deriv_branch,idx0,nonexistence_lhs,rigor\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (const auto& c : cells) {
        os << num(c.params.lambda) << ',' << num(c.params.eta1) << ',' << num(c.params.eta2) << ','
           << to_string(c.classification) << ',' << num(c.existence.lhs_value_branch) << ','
           << num(c.existence.lhs_deriv_branch) << ',' << num(c.existence.lhs_idx0) << ','
           << (c.nonexistence ? num(c.nonexistence->lhs) : std::string("")) << ',' << to_string(c.existence.rigor)
           << '\n';
    }
}

std::size_t count_conflicts(const std::vector<SweepCell>& cells) {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) {
        return c.classification == Classification::Conflict;
    }));
}

} // namespace hamm
