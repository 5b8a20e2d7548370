#pragma once

#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hillspec {

// Transformation kernel K(x,t) on the triangle {0 <= x <= 1, |t| <= x}. The
// operator y0 |-> y0(x) + int_{-x}^{x} K(x,t) y0(t) dt maps solutions of
// -y'' = mu y to solutions of -y'' + q y = mu y with the same data at 0.
// K solves the wave equation K_xx - K_tt = q(x) K with the characteristic
// data K(x,x) = (1/2) int_0^x q and K(x,-x) = 0.
//
// Storage is on the characteristic mesh: with xi = (x+t)/2, eta = (x-t)/2
// the triangle becomes {xi, eta >= 0, xi + eta <= 1} and values[i][j] holds
// K at xi = i/n, eta = j/n for i + j <= n.
struct KernelGrid {
    int n = 0;
    std::vector<std::vector<Complex>> values;
    PotentialSpec q_ref;
    int picard_iterations = 0;
    double final_delta = 0.0;

    double h() const { return 1.0 / n; }
    Complex at(int i, int j) const { return values[i][j]; }
    double sup_abs() const;
};

// Successive approximations on the characteristic-coordinate integral
// equation. In the half-sum coordinates above the wave operator turns into
// exactly d^2/(dxi deta), so the equation carries no extra 1/4 factor (that
// factor belongs to the unscaled coordinates x+t, x-t). Throws
// ConvergenceError if the sup-difference between sweeps has not dropped
// below picard_tol within 50 sweeps.
KernelGrid solve_goursat(const Potential& q, int n, double picard_tol = 1e-10);

// Max over mu_grid x x_grid of the mismatch between the ODE solutions and
// their kernel representations
//   c(x) ~ cos(lambda x) + int_{-x}^{x} K(x,t) cos(lambda t) dt
//   s(x) ~ sin(lambda x)/lambda + int_{-x}^{x} K(x,t) sin(lambda t)/lambda dt
// with lambda the principal square root of mu (the mu = 0 limit of the sine
// factor is t). Every x must lie on the kernel mesh, i.e. be a multiple of
// 1/n; the t-quadrature is the trapezoid rule on the mesh nodes, which along
// a fixed-x line are spaced 2/n.
double representation_residual(const Potential& q, const KernelGrid& K,
                               const std::vector<Complex>& mu_grid,
                               const std::vector<double>& x_grid,
                               const IntegratorConfig& cfg = {});

// Node dump, columns x, t, re_K, im_K.
void write_kernel_csv(std::ostream& out, const KernelGrid& K, const std::string& config_line);

} // namespace hillspec
