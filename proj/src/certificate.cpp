#include "hamm/certificate.hpp"

#include <algorithm>

namespace hamm {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::HeuristicPass: return "heuristic-pass";
    case Verdict::Fail: return "fail";
    }
    return "?";
}

std::string_view to_string(WitnessStatus s) {
    switch (s) {
    case WitnessStatus::Consistent: return "consistent";
    case WitnessStatus::Refuted: return "refuted";
    case WitnessStatus::Skipped: return "skipped";
    }
    return "?";
}

Rigor ExistenceInputs::rigor() const {
    for (const BoundValue* b : {&f_upper_R, &f_lower_r, &H1_R, &H2_R})
        if (b->rigor == Rigor::Heuristic)
            return Rigor::Heuristic;
    return Rigor::Certified;
}

namespace {

void require_radii(double r, double R) {
    if (!(r > 0.0) || !(r < R) || !std::isfinite(R))
        throw ParameterError("existence radii must satisfy 0 < r < R, got r=" + std::to_string(r)
                             + ", R=" + std::to_string(R));
}

} // namespace

ExistenceInputs resolve_existence_inputs(const BoundSet& bounds, double r, double R) {
    require_radii(r, R);
    return {bounds.f_upper(R), bounds.f_lower(r), bounds.H_upper(1, R), bounds.H_upper(2, R)};
}

double ExistenceCertificate::upper_margin() const { return R - std::max(lhs_value_branch, lhs_deriv_branch); }

ExistenceCertificate check_existence(const ProblemSpec& spec, const ExistenceInputs& in, double r, double R) {
    require_radii(r, R);
    const Parameters& p = spec.params();
    const double H[2] = {in.H1_R.value, in.H2_R.value};
    const double eta[2] = {p.eta1, p.eta2};

    ExistenceCertificate c;
    c.r = r;
    c.R = R;
    c.inputs = in;
    c.lhs_value_branch = p.lambda * in.f_upper_R.value * spec.K();
    c.lhs_deriv_branch = p.lambda * in.f_upper_R.value * spec.Kstar();
    for (int i = 0; i < 2; ++i) {
        c.lhs_value_branch += eta[i] * spec.gamma_at_one(i + 1) * H[i];
        c.lhs_deriv_branch += eta[i] * spec.dgamma_sup(i + 1) * H[i];
    }
    c.lhs_idx0 = p.lambda * in.f_lower_r.value * std::min(spec.K(), spec.Kstar());
    c.rigor = in.rigor();

    const bool pass = std::max(c.lhs_value_branch, c.lhs_deriv_branch) <= R && c.lhs_idx0 >= r;
    if (!pass)
        c.verdict = Verdict::Fail;
    else
        c.verdict = c.rigor == Rigor::Certified ? Verdict::Certified : Verdict::HeuristicPass;
    return c;
}

ExistenceCertificate check_existence(const ProblemSpec& spec, const BoundSet& bounds, double r, double R) {
    return check_existence(spec, resolve_existence_inputs(bounds, r, R), r, R);
}

NonexistenceCertificate check_nonexistence(const ProblemSpec& spec, const LinearGrowthWitness& w) {
    const Parameters& p = spec.params();
    NonexistenceCertificate c;
    c.witness = w;
    c.lhs = p.lambda * w.tau * spec.K() + p.eta1 * w.xi1 * spec.gamma_at_one(1)
            + p.eta2 * w.xi2 * spec.gamma_at_one(2);
    c.inequality_holds = c.lhs < 1.0;
    return c;
}

NonexistenceCertificate certify_nonexistence(const ProblemSpec& spec, const LinearGrowthWitness& w, int budget,
                                             std::uint64_t seed) {
    const FalsifyResult probe = falsify_linear_growth(spec, w, budget, seed);
    NonexistenceCertificate c = check_nonexistence(spec, w);
    c.witness_status = probe.consistent ? WitnessStatus::Consistent : WitnessStatus::Refuted;
    c.counterexample = probe.counterexample;
    return c;
}

} // namespace hamm
