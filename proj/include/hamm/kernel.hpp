#ifndef HAMM_KERNEL_HPP
#define HAMM_KERNEL_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamm/expr.hpp"
#include "hamm/grid.hpp"

namespace hamm {

// Integrable majorants Phi(s) >= k(t,s) and Psi(s) >= d/dt k(t,s).
struct Dominators {
    std::function<double(double)> phi;
    std::function<double(double)> psi;
};

class Kernel {
public:
    virtual ~Kernel() = default;

    virtual std::string name() const = 0;
    virtual double value(double t, double s) const = 0;
    virtual double deriv(double t, double s) const = 0;
    virtual std::optional<Dominators> dominators() const { return std::nullopt; }

    // Quadrature weights, in units of the grid step, such that
    //   integral_0^1 k(t_j, s) F(s) ds  ~  step * sum_i w_i F(s_i).
    // The default is the trapezoid rule applied to the sampled kernel row.
    virtual VectorXd row_weights(const Gridd& grid, Eigen::Index j) const;
    virtual VectorXd deriv_row_weights(const Gridd& grid, Eigen::Index j) const;

    double apply_row(const Gridd& grid, const VectorXd& F, Eigen::Index j) const;
    double apply_deriv_row(const Gridd& grid, const VectorXd& F, Eigen::Index j) const;
};

// Dense row-weight matrices of a kernel on a grid (already scaled by the
// step): (value * F)(j) = apply_row(F, j) up to rounding.
struct KernelMatrices {
    Eigen::MatrixXd value;
    Eigen::MatrixXd deriv;
};

KernelMatrices assemble(const Kernel& kernel, const Gridd& grid);

using KernelPtr = std::shared_ptr<const Kernel>;

/*
 * Green's function of -u'' = g with u(0) = u'(1) = 0:
 *
 *   k(t,s) = s   (s <= t)        d/dt k(t,s) = 0   (s <= t)
 *            t   (s >  t)                      1   (s >  t)
 *
 * For a node t_j the value row is affine in s on either side of the node
 * t_j, so the plain trapezoid is exact there. The derivative row jumps at
 * s = t_j and is integrated as the tail integral of F over [t_j, 1].
 */
class FocalKernel final : public Kernel {
public:
    std::string name() const override { return "focal"; }
    double value(double t, double s) const override { return s <= t ? s : t; }
    double deriv(double t, double s) const override { return s <= t ? 0.0 : 1.0; }
    std::optional<Dominators> dominators() const override;

    VectorXd deriv_row_weights(const Gridd& grid, Eigen::Index j) const override;
};

// User kernel given by expressions in (t, s).
class ExprKernel final : public Kernel {
public:
    ExprKernel(Expr k, Expr dk, std::optional<Expr> phi = std::nullopt, std::optional<Expr> psi = std::nullopt);

    std::string name() const override { return "expr"; }
    double value(double t, double s) const override { return k_.kernel(t, s); }
    double deriv(double t, double s) const override { return dk_.kernel(t, s); }
    std::optional<Dominators> dominators() const override;

    const Expr& k_expr() const { return k_; }
    const Expr& dk_expr() const { return dk_; }

private:
    Expr k_;
    Expr dk_;
    std::optional<Expr> phi_;
    std::optional<Expr> psi_;
};

/// K = integral_0^1 k(1,s) ds.
double constant_K(const Kernel& kernel, const Gridd& grid);

/// K* = max over nodes t_j of integral_0^1 d/dt k(t_j,s) ds.
double constant_Kstar(const Kernel& kernel, const Gridd& grid);

double apply_kernel_row(const Kernel& kernel, const Gridd& grid, const VectorXd& F, Eigen::Index j);
double apply_dkernel_row(const Kernel& kernel, const Gridd& grid, const VectorXd& F, Eigen::Index j);

struct HypothesisCheck {
    std::string name;
    bool passed = true;
    std::string detail;
};

// Sampled falsification of kernel positivity and domination on an m x m
// lattice of (t, s).
std::vector<HypothesisCheck> check_kernel_hypotheses(const Kernel& kernel, int m = 64);

} // namespace hamm

#endif // HAMM_KERNEL_HPP
