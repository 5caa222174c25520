#include "hamm/kernel.hpp"

#include <sstream>

namespace hamm {

namespace {

void require_row(const Gridd& grid, const VectorXd& F, Eigen::Index j) {
    if (F.size() != grid.size())
        throw ShapeError("kernel row: expected " + std::to_string(grid.size()) + " samples, got "
                         + std::to_string(F.size()));
    if (j < 0 || j > grid.intervals())
        throw ShapeError("kernel row: node index " + std::to_string(j) + " out of range");
}

double compensated_dot(const VectorXd& w, const VectorXd& F) {
    detail::CompensatedSum<double> acc;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        acc.add(w(i) * F(i));
    return acc.value();
}

VectorXd trapezoid_weights(const Gridd& grid) {
    VectorXd w = VectorXd::Ones(grid.size());
    w(0) = 0.5;
    w(grid.intervals()) = 0.5;
    return w;
}

} // namespace

VectorXd Kernel::row_weights(const Gridd& grid, Eigen::Index j) const {
    VectorXd w = trapezoid_weights(grid);
    const double t = grid.node(j);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        w(i) *= value(t, grid.node(i));
    return w;
}

VectorXd Kernel::deriv_row_weights(const Gridd& grid, Eigen::Index j) const {
    VectorXd w = trapezoid_weights(grid);
    const double t = grid.node(j);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        w(i) *= deriv(t, grid.node(i));
    return w;
}

double Kernel::apply_row(const Gridd& grid, const VectorXd& F, Eigen::Index j) const {
    require_row(grid, F, j);
    return compensated_dot(row_weights(grid, j), F) / double(grid.intervals());
}

double Kernel::apply_deriv_row(const Gridd& grid, const VectorXd& F, Eigen::Index j) const {
    require_row(grid, F, j);
    return compensated_dot(deriv_row_weights(grid, j), F) / double(grid.intervals());
}

KernelMatrices assemble(const Kernel& kernel, const Gridd& grid) {
    const Eigen::Index m = grid.size();
    KernelMatrices out{Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m)};
    const double h = grid.step();
    for (Eigen::Index j = 0; j < m; ++j) {
        out.value.row(j) = h * kernel.row_weights(grid, j).transpose();
        out.deriv.row(j) = h * kernel.deriv_row_weights(grid, j).transpose();
    }
    return out;
}

std::optional<Dominators> FocalKernel::dominators() const {
    return Dominators{[](double s) { return s; }, [](double) { return 1.0; }};
}

VectorXd FocalKernel::deriv_row_weights(const Gridd& grid, Eigen::Index j) const {
    VectorXd w = VectorXd::Zero(grid.size());
    if (j == grid.intervals())
        return w;
    w.segment(j, grid.size() - j).setOnes();
    w(j) = 0.5;
    w(grid.intervals()) = 0.5;
    return w;
}

ExprKernel::ExprKernel(Expr k, Expr dk, std::optional<Expr> phi, std::optional<Expr> psi)
    : k_(std::move(k)), dk_(std::move(dk)), phi_(std::move(phi)), psi_(std::move(psi)) {
    for (const Expr* e : {&k_, &dk_})
        if (e->role() != Role::Kernel)
            throw ParameterError("kernel expression '" + e->source() + "' must be parsed in the kernel role");
    for (const auto* e : {&phi_, &psi_})
        if (*e && (*e)->uses(Var::T))
            throw ParameterError("dominator '" + (*e)->source() + "' may depend on s only");
    if (phi_.has_value() != psi_.has_value())
        throw ParameterError("kernel dominators must be given as a pair (phi, psi)");
}

std::optional<Dominators> ExprKernel::dominators() const {
    if (!phi_)
        return std::nullopt;
    Expr phi = *phi_;
    Expr psi = *psi_;
    return Dominators{[phi](double s) { return phi.kernel(0.0, s); },
                      [psi](double s) { return psi.kernel(0.0, s); }};
}

double constant_K(const Kernel& kernel, const Gridd& grid) {
    VectorXd k(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        k(i) = kernel.value(1.0, grid.node(i));
    return integrate(k, grid);
}

double constant_Kstar(const Kernel& kernel, const Gridd& grid) {
    const VectorXd ones = VectorXd::Ones(grid.size());
    double best = 0.0;
    for (Eigen::Index j = 0; j < grid.size(); ++j)
        best = std::max(best, kernel.apply_deriv_row(grid, ones, j));
    return best;
}

double apply_kernel_row(const Kernel& kernel, const Gridd& grid, const VectorXd& F, Eigen::Index j) {
    return kernel.apply_row(grid, F, j);
}

double apply_dkernel_row(const Kernel& kernel, const Gridd& grid, const VectorXd& F, Eigen::Index j) {
    return kernel.apply_deriv_row(grid, F, j);
}

std::vector<HypothesisCheck> check_kernel_hypotheses(const Kernel& kernel, int m) {
    if (m < 2)
        throw ParameterError("hypothesis lattice needs m >= 2");
    HypothesisCheck k_pos{"kernel k >= 0", true, {}};
    HypothesisCheck dk_pos{"kernel dk/dt >= 0", true, {}};
    const auto dom = kernel.dominators();
    HypothesisCheck k_dom{"kernel k <= Phi(s)", true, dom ? "" : "no dominators declared"};
    HypothesisCheck dk_dom{"kernel dk/dt <= Psi(s)", true, dom ? "" : "no dominators declared"};

    auto note = [](HypothesisCheck& c, double t, double s, double value) {
        if (!c.passed)
            return;
        c.passed = false;
        std::ostringstream os;
        os << "violated at t=" << t << ", s=" << s << " (value " << value << ")";
        c.detail = os.str();
    };

    for (int a = 0; a < m; ++a) {
        const double t = double(a) / (m - 1);
        for (int b = 0; b < m; ++b) {
            const double s = double(b) / (m - 1);
            const double k = kernel.value(t, s);
            const double dk = kernel.deriv(t, s);
            if (!(k >= -kConeTolerance))
                note(k_pos, t, s, k);
            if (!(dk >= -kConeTolerance))
                note(dk_pos, t, s, dk);
            if (dom) {
                if (!(k <= dom->phi(s) + kConeTolerance))
                    note(k_dom, t, s, k);
                if (!(dk <= dom->psi(s) + kConeTolerance))
                    note(dk_dom, t, s, dk);
            }
        }
    }
    return {k_pos, dk_pos, k_dom, dk_dom};
}

} // namespace hamm
