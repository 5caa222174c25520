#ifndef HAMM_PROBLEM_HPP
#define HAMM_PROBLEM_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamm/expr.hpp"
#include "hamm/grid.hpp"
#include "hamm/kernel.hpp"

namespace hamm {

struct Parameters {
    double lambda = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
};

// Linear growth constants: f(t,u,v) <= tau*u and h_i[u] <= xi_i*|u|_inf.
struct LinearGrowthWitness {
    double tau = 0.0;
    double xi1 = 0.0;
    double xi2 = 0.0;
};

// Closed-form bounds declared by the user, as expressions in rho.
struct DeclaredBounds {
    std::optional<Expr> f_upper;
    std::optional<Expr> f_lower;
    std::optional<Expr> H1;
    std::optional<Expr> H2;
};

// Raw contents of a problem file, before numerical setup.
struct ProblemDefinition {
    std::string kernel_name = "focal";
    std::optional<Expr> k, dk, phi, psi;
    Expr gamma1 = Expr::parse("0", Role::Coefficient);
    Expr gamma2 = Expr::parse("0", Role::Coefficient);
    Expr dgamma1 = Expr::parse("0", Role::Coefficient);
    Expr dgamma2 = Expr::parse("0", Role::Coefficient);
    Expr h1 = Expr::parse("0", Role::Functional);
    Expr h2 = Expr::parse("0", Role::Functional);
    Expr f = Expr::parse("0", Role::Nonlinearity);
    Parameters params;
    DeclaredBounds bounds;
    std::optional<LinearGrowthWitness> witness;
};

ProblemDefinition parse_problem(std::string_view text, const std::string& origin = "<input>");
ProblemDefinition read_problem_file(const std::filesystem::path& path);

struct ValidationOptions {
    int kernel_lattice = 64;
    int f_lattice = 17;
    double f_box = 4.0;
    double fd_step = 1e-5;
    double fd_tolerance = 1e-4;
};

class ProblemSpec {
public:
    static ProblemSpec build(ProblemDefinition def, Eigen::Index n = 256, const ValidationOptions& opts = {});

    const Gridd& grid() const { return grid_; }
    const Kernel& kernel() const { return *kernel_; }
    const Expr& nonlinearity() const { return def_.f; }
    const Expr& h(int i) const { return i == 1 ? def_.h1 : def_.h2; }
    const Expr& gamma(int i) const { return i == 1 ? def_.gamma1 : def_.gamma2; }
    const Expr& dgamma(int i) const { return i == 1 ? def_.dgamma1 : def_.dgamma2; }
    const Parameters& params() const { return def_.params; }
    const DeclaredBounds& declared_bounds() const { return def_.bounds; }
    const std::optional<LinearGrowthWitness>& witness() const { return def_.witness; }
    const ProblemDefinition& definition() const { return def_; }

    double K() const { return K_; }
    double Kstar() const { return Kstar_; }
    double gamma_at_one(int i) const { return i == 1 ? gamma_one_[0] : gamma_one_[1]; }
    double dgamma_sup(int i) const { return i == 1 ? dgamma_sup_[0] : dgamma_sup_[1]; }

    // Node samples of gamma_i and gamma_i'.
    const VectorXd& gamma_samples(int i) const { return gamma_samples_[i - 1]; }
    const VectorXd& dgamma_samples(int i) const { return dgamma_samples_[i - 1]; }

    const KernelMatrices& kernel_matrices() const { return *matrices_; }

    // Same problem at another parameter point (grid data shared).
    ProblemSpec with_params(const Parameters& p) const;

    // Same problem rebuilt on another grid.
    ProblemSpec on_grid(Eigen::Index n) const;

    // Sampled hypothesis checks run at build time, and the failed subset.
    const std::vector<HypothesisCheck>& hypothesis_checks() const { return checks_; }
    std::vector<HypothesisCheck> warnings() const;

private:
    ProblemSpec(ProblemDefinition def, Gridd grid) : def_(std::move(def)), grid_(grid) {}

    ProblemDefinition def_;
    Gridd grid_;
    ValidationOptions opts_;
    KernelPtr kernel_;
    std::shared_ptr<const KernelMatrices> matrices_;
    double K_ = 0.0;
    double Kstar_ = 0.0;
    double gamma_one_[2] = {0.0, 0.0};
    double dgamma_sup_[2] = {0.0, 0.0};
    VectorXd gamma_samples_[2];
    VectorXd dgamma_samples_[2];
    std::vector<HypothesisCheck> checks_;
};

/// Loads, builds and validates a problem file.
ProblemSpec load_problem(const std::filesystem::path& path, Eigen::Index n = 256);

void require_valid_parameters(const Parameters& p);

/// f(t_j, u_j, u'_j) with cone drift clamped to zero.
VectorXd sample_nonlinearity(const ProblemSpec& spec, const GridFunctiond& u);

/// The operator T of the integral equation, together with its t-derivative.
GridFunctiond apply_T(const ProblemSpec& spec, const GridFunctiond& u);

/// All sampled hypothesis checks: kernel positivity and domination, signs
/// of gamma_i and gamma_i', sign of f, and a functional boundedness probe.
std::vector<HypothesisCheck> validate_hypotheses(const ProblemSpec& spec);

} // namespace hamm

#endif // HAMM_PROBLEM_HPP
