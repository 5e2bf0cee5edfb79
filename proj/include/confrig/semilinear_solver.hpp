#pragma once

// Radial Dirichlet problem -Lap f = n(n-2)/4 f^{(n+2)/(n-2)} on B_r with
// constant boundary data, solved by monotone sub/supersolution iteration.
//
// Discretization: finite-volume radial stencil with exact cell volumes,
//   (Lap_h f)_i = a+_i (f_{i+1} - f_i) + a-_i (f_{i-1} - f_i),
//   a+-_i = (s_i +- h/2)^{n-1} / (h vol_i),  vol_i = ((s_i + h/2)^n - (s_i - h/2)^n) / n,
// and 2n (f_1 - f_0) / h^2 at the center. -Lap_h + K is an M-matrix for K >= 0.

#include "confrig/conformal_fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace confrig {

struct BvpSpec {
    int n = 3;
    double r = 1.0;
    double boundary_value = 1.0;
    RadialGrid grid;

    /// Boundary value boundary_scale * (2/(1+r^2))^{(n-2)/2} on [0, r].
    static BvpSpec standard(int n, double r, int intervals = 4096, double boundary_scale = 1.0);

    double nonlinearity(double f) const;
    double nonlinearity_derivative(double f) const;
};

/// Coefficients of the radial stencil; row N is the Dirichlet row.
struct RadialStencil {
    std::vector<double> lower;  // coefficient of f_{i-1} in -Lap_h
    std::vector<double> diag;
    std::vector<double> upper;  // coefficient of f_{i+1} in -Lap_h

    explicit RadialStencil(const RadialGrid& grid);
    /// (-Lap_h f)_i for i < N.
    double apply(const std::vector<double>& f, std::size_t i) const;
};

/// Solves -Lap_h f + K f = rhs on rows 0..N-1 with f_N = boundary_value.
/// InputError for K < 0; InvariantError if elimination meets a zero pivot.
RadialField solve_linear_shifted(const RadialGrid& grid, double K, const std::vector<double>& rhs,
                                 double boundary_value);

/// max_i |(-Lap_h f)_i - F(f_i)| / diag_i over rows 0..N-1.
double scaled_residual(const BvpSpec& spec, const std::vector<double>& f);
/// max_i |(-Lap_h f)_i - F(f_i)|.
double raw_residual(const BvpSpec& spec, const std::vector<double>& f);

/// Tolerance used when verifying discrete barriers: 10 h^2 max(1, max F).
double barrier_tolerance(const BvpSpec& spec, const std::vector<double>& sup);

struct BarrierCheck {
    bool ok = true;
    double worst = 0.0;  // most negative margin
    std::optional<std::size_t> node;
};
/// -Lap_h f >= F(f) - tol on interior rows and f_N >= boundary value.
BarrierCheck check_supersolution(const BvpSpec& spec, const std::vector<double>& f, double tol);
/// -Lap_h f <= F(f) + tol on interior rows and f_N <= boundary value.
BarrierCheck check_subsolution(const BvpSpec& spec, const std::vector<double>& f, double tol);

enum class Direction { Decreasing, Increasing };
std::string to_string(Direction d);

enum class ShiftRule {
    /// K = max(0, -min F') on the barrier range; F is increasing so K = 0.
    Minimal,
    /// K = 1.5 max F' on the barrier range.
    Conservative,
};

struct IterateOptions {
    ShiftRule shift = ShiftRule::Minimal;
    std::optional<double> K;  // overrides the rule
    double change_tol = 1e-10;
    double residual_tol = 1e-9;
    int max_iters = 200;
    bool verify_barriers = true;
    /// Throw SolverError when max_iters is reached without convergence.
    bool throw_on_stall = true;
};

struct SolverResult {
    RadialField solution;
    Direction direction = Direction::Decreasing;
    double K = 0.0;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
    double residual = 0.0;
    int shift_doublings = 0;
    /// Nodes where the projection onto [sub, sup] was active at the end.
    int clamped_nodes = 0;
    std::vector<double> change_history;
};

/// Projected monotone iteration f_{k+1} = clamp(T f_k, sub^c, sup^c) with
/// T f = (-Lap_h + K)^{-1} (F(f) + K f), where sup^c = sup + c and
/// sub^c = sub - c, c = tol (r^2 - s^2) / (2n), are the barriers certified
/// from the verification tolerance. Starts from sup (Decreasing) or
/// sub (Increasing). Barrier failures raise InvariantError; persistent
/// monotonicity violations after shift doubling and stalls raise
/// SolverError.
SolverResult monotone_iterate(const BvpSpec& spec, const RadialField& sub, const RadialField& sup,
                              Direction direction = Direction::Decreasing, const IterateOptions& opts = {});

struct FloorCheck {
    bool superharmonic = true;
    bool pass = true;
    double min_value = 0.0;
    double margin = 0.0;  // min v - boundary value
};
/// Discrete superharmonicity -Lap_h v >= -tol followed by min v >= boundary - tol.
FloorCheck superharmonic_floor_check(const RadialField& v, double boundary_value, double tol = 1e-8);

struct HopfReport {
    double gap = 0.0;  // d(v - w)/deta at r by the 3-point one-sided stencil
    double min_difference = 0.0;
};
/// Requires v >= w - tol pointwise and v_N = w_N within tol (InvariantError otherwise).
HopfReport hopf_boundary_compare(const RadialField& v, const RadialField& w, double tol = 1e-8);

struct FluxReport {
    double dv = 0.0;        // (n-2)/2 H_g v^{n/(n-2)} - (n-2)/2 v / r
    double dw = 0.0;        // same with H_rho and w(r)
    double dw_exact = 0.0;  // w'(r)
    double margin = 0.0;    // dv - dw
    bool holds = true;      // margin >= -tol
    bool strict = false;    // margin > tol
};
FluxReport boundary_flux_compare(int n, double v_boundary, double h_g, double rho, double tol = 1e-8);
FluxReport boundary_flux_compare(const RadialField& v, double h_g, double rho, double tol = 1e-8);

/// Bubble family w_mu(s) = (2 mu / (1 + mu^2 s^2))^{(n-2)/2}; mu = 1 is w.
double bubble(double s, double mu, int n);
/// mu < 1/r with w_mu(r) = value, if value <= r^{-(n-2)/2}.
std::optional<double> bubble_parameter_below(double r, double value, int n);

}  // namespace confrig
