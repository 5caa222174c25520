#ifndef HAMM_CERTIFICATE_HPP
#define HAMM_CERTIFICATE_HPP

#include <optional>
#include <string>

#include "hamm/bounds.hpp"
#include "hamm/problem.hpp"

namespace hamm {

enum class Verdict { Certified, HeuristicPass, Fail };

std::string_view to_string(Verdict v);

// Bound values entering the existence inequalities, resolved at r and R.
struct ExistenceInputs {
    BoundValue f_upper_R;
    BoundValue f_lower_r;
    BoundValue H1_R;
    BoundValue H2_R;

    Rigor rigor() const;
};

ExistenceInputs resolve_existence_inputs(const BoundSet& bounds, double r, double R);

/*
 * Annulus certificate r <= |u| <= R.
 *
 *   value branch  lambda*f_upper(R)*K  + sum eta_i*gamma_i(1)*H_i(R)     <= R
 *   deriv branch  lambda*f_upper(R)*K* + sum eta_i*|gamma_i'|_inf*H_i(R) <= R
 *   lower         lambda*f_lower(r)*min(K, K*)                          >= r
 *
 * All comparisons are exact; the lower inequality passes at equality.
 */
struct ExistenceCertificate {
    double r = 0.0;
    double R = 0.0;
    double lhs_value_branch = 0.0;
    double lhs_deriv_branch = 0.0;
    double lhs_idx0 = 0.0;
    Verdict verdict = Verdict::Fail;
    Rigor rigor = Rigor::Certified;
    ExistenceInputs inputs;

    double upper_margin() const;  // R - max(branches)
    double lower_margin() const { return lhs_idx0 - r; }
    bool passed() const { return verdict != Verdict::Fail; }
};

ExistenceCertificate check_existence(const ProblemSpec& spec, const BoundSet& bounds, double r, double R);

// Same, with bounds already resolved (used by sweeps).
ExistenceCertificate check_existence(const ProblemSpec& spec, const ExistenceInputs& inputs, double r, double R);

enum class WitnessStatus { Consistent, Refuted, Skipped };

std::string_view to_string(WitnessStatus s);

/*
 * Only-trivial-solution certificate:
 *
 *   lambda*tau*K + sum eta_i*xi_i*gamma_i(1) < 1   (strict)
 */
struct NonexistenceCertificate {
    double lhs = 0.0;
    bool inequality_holds = false;
    LinearGrowthWitness witness;
    WitnessStatus witness_status = WitnessStatus::Skipped;
    std::optional<Counterexample> counterexample;

    double margin() const { return 1.0 - lhs; }
    bool passed() const { return inequality_holds && witness_status != WitnessStatus::Refuted; }
};

NonexistenceCertificate check_nonexistence(const ProblemSpec& spec, const LinearGrowthWitness& w);

// Falsification sweep of the witness followed by the inequality.
NonexistenceCertificate certify_nonexistence(const ProblemSpec& spec, const LinearGrowthWitness& w, int budget,
                                             std::uint64_t seed);

} // namespace hamm

#endif // HAMM_CERTIFICATE_HPP
