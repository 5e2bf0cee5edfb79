#include "confrig/semilinear_solver.hpp"

#include "confrig/errors.hpp"

#include <algorithm>
#include <cmath>

namespace confrig {

BvpSpec BvpSpec::standard(int n, double r, int intervals, double boundary_scale) {
    if (n < 3) throw InputError("BvpSpec: n >= 3 required");
    if (!(r > 0.0)) throw InputError("BvpSpec: r must be positive");
    if (!(boundary_scale > 0.0)) throw InputError("BvpSpec: boundary scale must be positive");
    return BvpSpec{n, r, boundary_scale * round_bubble_w(r, n), RadialGrid::euclidean_radial(n, r, intervals)};
}

double BvpSpec::nonlinearity(double f) const { return yamabe_constant(n) * std::pow(f, critical_exponent(n)); }

double BvpSpec::nonlinearity_derivative(double f) const {
    return yamabe_constant(n) * critical_exponent(n) * std::pow(f, 4.0 / (n - 2));
}

RadialStencil::RadialStencil(const RadialGrid& grid) {
    if (grid.background() != Background::EuclideanRadial || !grid.has_center()) {
        throw InputError("RadialStencil: euclidean grid starting at the center required");
    }
    const std::size_t m = grid.size() - 1;
    const double h = grid.spacing();
    const int n = grid.dim();
    lower.assign(m, 0.0);
    diag.assign(m, 0.0);
    upper.assign(m, 0.0);
    diag[0] = 2.0 * n / (h * h);
    upper[0] = -diag[0];
    for (std::size_t i = 1; i < m; ++i) {
        const double s = grid.node(i);
        const double sp = s + 0.5 * h;
        const double sm = s - 0.5 * h;
        const double vol = (std::pow(sp, n) - std::pow(sm, n)) / n;
        const double ap = std::pow(sp, n - 1) / (h * vol);
        const double am = std::pow(sm, n - 1) / (h * vol);
        lower[i] = -am;
        upper[i] = -ap;
        diag[i] = ap + am;
    }
}

double RadialStencil::apply(const std::vector<double>& f, std::size_t i) const {
    double v = diag[i] * f[i] + upper[i] * f[i + 1];
    if (i > 0) v += lower[i] * f[i - 1];
    return v;
}

RadialField solve_linear_shifted(const RadialGrid& grid, double K, const std::vector<double>& rhs,
                                 double boundary_value) {
    if (!(K >= 0.0)) throw InputError("solve_linear_shifted: K must be >= 0");
    if (rhs.size() + 1 != grid.size() && rhs.size() != grid.size()) {
        throw InputError("solve_linear_shifted: rhs size mismatch");
    }
    const RadialStencil st(grid);
    const std::size_t m = st.diag.size();
    std::vector<double> c(m);
    std::vector<double> d(m);
    // Thomas algorithm; the Dirichlet value moves to the right-hand side.
    for (std::size_t i = 0; i < m; ++i) {
        double b = st.diag[i] + K;
        double r = rhs[i];
        if (i + 1 == m) r -= st.upper[i] * boundary_value;
        if (i > 0) {
            b -= st.lower[i] * c[i - 1];
            r -= st.lower[i] * d[i - 1];
        }
        if (!(std::abs(b) > 0.0) || !std::isfinite(b)) throw InvariantError("solve_linear_shifted: zero pivot");
        c[i] = (i + 1 < m) ? st.upper[i] / b : 0.0;
        d[i] = r / b;
    }
    std::vector<double> f(m + 1);
    f[m] = boundary_value;
    for (std::size_t i = m; i-- > 0;) f[i] = d[i] - c[i] * (i + 1 < m ? f[i + 1] : 0.0);
    for (double& x : f) {
        if (!(x > 0.0) || !std::isfinite(x)) throw SolverError("solve_linear_shifted: non-positive solution");
    }
    return RadialField(grid, std::move(f));
}

double scaled_residual(const BvpSpec& spec, const std::vector<double>& f) {
    const RadialStencil st(spec.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < st.diag.size(); ++i) {
        worst = std::max(worst, std::abs(st.apply(f, i) - spec.nonlinearity(f[i])) / st.diag[i]);
    }
    return worst;
}

double raw_residual(const BvpSpec& spec, const std::vector<double>& f) {
    const RadialStencil st(spec.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < st.diag.size(); ++i) {
        worst = std::max(worst, std::abs(st.apply(f, i) - spec.nonlinearity(f[i])));
    }
    return worst;
}

double barrier_tolerance(const BvpSpec& spec, const std::vector<double>& sup) {
    const double h = spec.grid.spacing();
    double fmax = 1.0;
    for (double v : sup) fmax = std::max(fmax, spec.nonlinearity(v));
    return 10.0 * h * h * fmax;
}

namespace {

BarrierCheck check_barrier(const BvpSpec& spec, const std::vector<double>& f, double tol, double sign) {
    const RadialStencil st(spec.grid);
    BarrierCheck out;
    out.worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < st.diag.size(); ++i) {
        const double margin = sign * (st.apply(f, i) - spec.nonlinearity(f[i]));
        if (margin < out.worst) {
            out.worst = margin;
            if (margin < -tol) out.node = i;
        }
    }
    const double bmargin = sign * (f.back() - spec.boundary_value);
    if (bmargin < -1e-12 * std::max(1.0, spec.boundary_value)) {
        out.worst = std::min(out.worst, bmargin);
        out.node = f.size() - 1;
    }
    out.ok = !out.node.has_value();
    return out;
}

}  // namespace

BarrierCheck check_supersolution(const BvpSpec& spec, const std::vector<double>& f, double tol) {
    return check_barrier(spec, f, tol, 1.0);
}

BarrierCheck check_subsolution(const BvpSpec& spec, const std::vector<double>& f, double tol) {
    return check_barrier(spec, f, tol, -1.0);
}

std::string to_string(Direction d) { return d == Direction::Decreasing ? "decreasing" : "increasing"; }

SolverResult monotone_iterate(const BvpSpec& spec, const RadialField& sub, const RadialField& sup,
                              Direction direction, const IterateOptions& opts) {
    const RadialGrid& grid = spec.grid;
    if (sub.size() != grid.size() || sup.size() != grid.size()) throw InputError("monotone_iterate: grid mismatch");
    const auto& lo = sub.values();
    const auto& hi = sup.values();
    bool collapsed = true;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i] + 1e-12 * std::max(1.0, hi[i])) throw InvariantError("monotone_iterate: sub > sup");
        collapsed = collapsed && hi[i] - lo[i] <= 1e-14 * std::max(1.0, hi[i]);
    }
    const double btol = barrier_tolerance(spec, hi);
    if (opts.verify_barriers) {
        const auto s = check_subsolution(spec, lo, btol);
        if (!s.ok) {
            throw InvariantError("monotone_iterate: subsolution check failed at node " + std::to_string(*s.node) +
                                 " (margin " + format_double(s.worst) + ")");
        }
        const auto p = check_supersolution(spec, hi, btol);
        if (!p.ok) {
            throw InvariantError("monotone_iterate: supersolution check failed at node " + std::to_string(*p.node) +
                                 " (margin " + format_double(p.worst) + ")");
        }
    }

    const double fmin = *std::min_element(lo.begin(), lo.end());
    const double fmax = *std::max_element(hi.begin(), hi.end());
    const double dmax = spec.nonlinearity_derivative(fmax);
    const double dmin = spec.nonlinearity_derivative(fmin);
    double K = 0.0;
    if (opts.K) {
        K = *opts.K;
    } else if (opts.shift == ShiftRule::Conservative) {
        K = 1.5 * dmax;
    } else {
        K = std::max(0.0, -dmin);
    }
    const double k_cap = 64.0 * std::max(dmax, 1.0);
    // Barriers that pass with tolerance btol are exact up to the correction
    // btol (r^2 - s^2) / (2n), whose discrete Laplacian is -btol.
    std::vector<double> lo_c(lo.size());
    std::vector<double> hi_c(hi.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const double s = grid.node(i);
        const double corr = collapsed ? 0.0 : btol * (spec.r * spec.r - s * s) / (2.0 * spec.n);
        lo_c[i] = std::max(lo[i] - corr, 0.5 * lo[i]);
        hi_c[i] = hi[i] + corr;
    }
    const double mono_tol = btol * spec.r * spec.r / (2.0 * spec.n);
    const double sign = direction == Direction::Decreasing ? -1.0 : 1.0;

    SolverResult res{direction == Direction::Decreasing ? sup : sub, direction, K, 0, false, 0.0, 0.0, 0, 0, {}};
    std::vector<double> f = res.solution.values();
    const std::size_t m = f.size() - 1;
    std::vector<double> rhs(m);
    std::vector<double> next(f.size());
    for (int it = 1; it <= opts.max_iters; ++it) {
        for (std::size_t i = 0; i < m; ++i) rhs[i] = spec.nonlinearity(f[i]) + K * f[i];
        const RadialField t = solve_linear_shifted(grid, K, rhs, spec.boundary_value);
        double violation = 0.0;
        double change = 0.0;
        int clamped = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double raw = t.value(i);
            violation = std::max(violation, -sign * (raw - f[i]));
            double c = raw;
            if (c < lo_c[i]) {
                c = lo_c[i];
                ++clamped;
            } else if (c > hi_c[i]) {
                c = hi_c[i];
                ++clamped;
            }
            next[i] = c;
            change = std::max(change, std::abs(c - f[i]));
        }
        if (violation > mono_tol && !collapsed) {
            // T is not order preserving with this shift; retry the step.
            const double bigger = K > 0.0 ? 2.0 * K : std::max(dmax, 1.0);
            if (bigger > k_cap) {
                throw SolverError("monotone_iterate: monotonicity violated with shift at cap", it, change);
            }
            K = bigger;
            ++res.shift_doublings;
            --it;
            continue;
        }
        f.swap(next);
        res.iterations = it;
        res.last_change = change;
        res.clamped_nodes = clamped;
        res.change_history.push_back(change);
        if (collapsed || change < opts.change_tol) {
            res.residual = scaled_residual(spec, f);
            if (collapsed || res.residual < opts.residual_tol) {
                res.converged = true;
                break;
            }
        }
    }
    res.K = K;
    res.solution = RadialField(grid, f);
    if (!res.converged) {
        res.residual = scaled_residual(spec, f);
        if (opts.throw_on_stall) {
            throw SolverError("monotone_iterate: no convergence in " + std::to_string(opts.max_iters) +
                                  " iterations (last change " + format_double(res.last_change) + ")",
                              res.iterations, res.last_change);
        }
    }
    return res;
}

FloorCheck superharmonic_floor_check(const RadialField& v, double boundary_value, double tol) {
    FloorCheck out;
    const RadialStencil st(v.grid());
    for (std::size_t i = 0; i < st.diag.size(); ++i) {
        if (st.apply(v.values(), i) < -tol) out.superharmonic = false;
    }
    out.min_value = v.min_value();
    out.margin = out.min_value - boundary_value;
    out.pass = out.superharmonic && out.margin >= -tol;
    return out;
}

HopfReport hopf_boundary_compare(const RadialField& v, const RadialField& w, double tol) {
    if (v.size() != w.size()) throw InputError("hopf_boundary_compare: grid mismatch");
    HopfReport out;
    out.min_difference = std::numeric_limits<double>::infinity();
    std::vector<double> d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        d[i] = v.value(i) - w.value(i);
        out.min_difference = std::min(out.min_difference, d[i]);
    }
    if (out.min_difference < -tol) {
        throw InvariantError("hopf_boundary_compare: precondition v >= w violated (min difference " +
                             format_double(out.min_difference) + ")");
    }
    if (std::abs(d.back()) > tol) throw InvariantError("hopf_boundary_compare: v differs from w on the boundary");
    const std::size_t m = d.size() - 1;
    out.gap = (3.0 * d[m] - 4.0 * d[m - 1] + d[m - 2]) / (2.0 * v.grid().spacing());
    return out;
}

FluxReport boundary_flux_compare(int n, double v_boundary, double h_g, double rho, double tol) {
    const double r = std::tan(0.5 * rho);
    const double h_rho = std::cos(rho) / std::sin(rho);
    const double k = 0.5 * (n - 2);
    const double e = n / (n - 2.0);
    const double wr = round_bubble_w(r, n);
    FluxReport out;
    out.dv = k * h_g * std::pow(v_boundary, e) - k * v_boundary / r;
    out.dw = k * h_rho * std::pow(wr, e) - k * wr / r;
    out.dw_exact = round_bubble_dw(r, n);
    out.margin = out.dv - out.dw;
    out.holds = out.margin >= -tol;
    out.strict = out.margin > tol;
    return out;
}

FluxReport boundary_flux_compare(const RadialField& v, double h_g, double rho, double tol) {
    return boundary_flux_compare(v.grid().dim(), v.values().back(), h_g, rho, tol);
}

double bubble(double s, double mu, int n) { return std::pow(2.0 * mu / (1.0 + mu * mu * s * s), 0.5 * (n - 2)); }

std::optional<double> bubble_parameter_below(double r, double value, int n) {
    // w_mu(r)^{2/(n-2)} = 2 mu / (1 + mu^2 r^2) = c  =>  c r^2 mu^2 - 2 mu + c = 0
    const double c = std::pow(value, 2.0 / (n - 2));
    const double disc = 1.0 - c * c * r * r;
    if (disc < 0.0) return std::nullopt;
    return c / (1.0 + std::sqrt(disc));
}

}  // namespace confrig
