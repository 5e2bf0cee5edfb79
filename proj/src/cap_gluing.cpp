#include "confrig/cap_gluing.hpp"

#include "confrig/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace confrig {

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussX{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                        0.9061798459386640};
constexpr std::array<double, 5> kGaussW{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                        0.4786286704993665, 0.2369268850561891};

template <class F>
double integrate_support(const GluedField& g, const Bump& b, F&& integrand) {
    const RadialGrid& grid = g.field.grid();
    const double lo = std::max(grid.t_min(), b.center - b.half_width);
    const double hi = std::min(grid.t_max(), b.center + b.half_width);
    const double h = grid.spacing();
    const double t_if = grid.node(g.interface);
    double total = 0.0;
    double a = lo;
    while (a < hi) {
        // next breakpoint: grid node, interface or support end
        double next = grid.t_min() + (std::floor((a - grid.t_min()) / h + 1e-9) + 1.0) * h;
        if (a < t_if && t_if < next) next = t_if;
        next = std::min(next, hi);
        if (next - a > 1e-15) {
            const double mid = 0.5 * (a + next);
            const double half = 0.5 * (next - a);
            for (std::size_t q = 0; q < kGaussX.size(); ++q) {
                const double t = mid + half * kGaussX[q];
                total += kGaussW[q] * half * integrand(t) * grid.volume_density(t);
            }
        }
        a = next;
    }
    return unit_sphere_area(grid.dim() - 1) * total;
}

void check_support(const GluedField& g, const Bump& b) {
    const RadialGrid& grid = g.field.grid();
    const bool at_center = b.center == 0.0 && grid.has_center();
    if (b.half_width <= 0.0 || (!at_center && b.center - b.half_width < grid.t_min() - 1e-12) ||
        b.center + b.half_width > grid.t_max() + 1e-12) {
        throw InputError("bump support leaves the glued domain");
    }
}

}  // namespace

double unit_sphere_area(int dim) {
    const double k = dim + 1.0;
    return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

BoundaryFit fit_boundary_metric(const SphereField& u, const HyperSphere& sigma, int samples) {
    // On sigma the factor of a Moebius map G preserving sigma is 1 / t(x)
    // with t affine in x. Fit t from c = u^{2/(n-2)} and recover
    // P = G^{-1} e0 on the hyperboloid.
    const int n = u.dim();
    const MinkowskiForm q(n);
    const auto xs = sigma.sample_boundary(std::max(samples, 2 * (n + 2)));
    const auto m = static_cast<Eigen::Index>(xs.size());
    Mat design(m, n + 2);
    Vec rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double c = std::pow(u(xs[static_cast<std::size_t>(i)]), 2.0 / (n - 2));
        if (!(c > 0.0) || !std::isfinite(c)) throw InputError("normalize_hole: non-positive boundary factor");
        design.row(i).head(n + 1) = xs[static_cast<std::size_t>(i)].transpose();
        design(i, n + 1) = 1.0;
        rhs(i) = 1.0 / c;
    }
    const Vec r = design.completeOrthogonalDecomposition().solve(rhs);
    BoundaryFit fit;
    fit.fit_defect = ((design * r - rhs).cwiseAbs().array() / rhs.cwiseAbs().array()).maxCoeff();
    const Vec& v = sigma.spacelike();
    Vec e0 = Vec::Zero(n + 2);
    e0(n + 1) = 1.0;
    fit.p = Vec(n + 2);
    fit.p.head(n + 1) = -r.head(n + 1);
    fit.p(n + 1) = r(n + 1);
    // P is fixed only modulo v. With P' its v-orthogonal part, a round
    // metric of radius k * sr has <P', P'> = -(1 + <e0, v>^2) / k^2.
    const double ev = q.dot(e0, v);
    const Vec perp = fit.p - q.dot(fit.p, v) * v;
    const double pp_perp = q.norm2(perp);
    fit.p = perp + ev * v;
    fit.scale_defect = std::abs(q.norm2(fit.p) + 1.0);
    fit.future = fit.p(n + 1) > 0.0;
    const double sr = sigma.boundary_round_radius();
    const double k = pp_perp < 0.0 ? std::sqrt((1.0 + ev * ev) / -pp_perp) : std::numeric_limits<double>::infinity();
    fit.radius = sr * k;
    fit.p_unit = std::isfinite(k) ? Vec(k * perp + ev * v) : fit.p;
    fit.scalar_curvature = (n - 1.0) * (n - 2.0) / (fit.radius * fit.radius);
    return fit;
}

namespace {

// The boost within v^perp with F e0 = p.
MoebiusMap boost_to(const Vec& p, const HyperSphere& sigma) {
    const int n = sigma.sphere_dim();
    const MinkowskiForm q(n);
    const Vec& v = sigma.spacelike();
    Vec e0 = Vec::Zero(n + 2);
    e0(n + 1) = 1.0;
    if ((p - e0).cwiseAbs().maxCoeff() < 1e-14) return MoebiusMap::identity(n);

    const Vec a0 = e0 - q.dot(e0, v) * v;
    const Vec b0 = p - q.dot(p, v) * v;
    const double k = std::sqrt(-q.norm2(a0));
    const Vec a = a0 / k;
    const Vec b = b0 / k;
    const double gamma = -q.dot(a, b);
    const Mat J = q.metric();
    const Vec s = a + b;
    Mat f = Mat::Identity(n + 2, n + 2) + s * (J * s).transpose() / (1.0 + gamma) - 2.0 * b * (J * a).transpose();
    return MoebiusMap(f);
}

}  // namespace

MoebiusMap boundary_matching_map(const SphereField& u, const HyperSphere& sigma, int samples, double tol) {
    const BoundaryFit fit = fit_boundary_metric(u, sigma, samples);
    if (fit.fit_defect > tol || fit.scale_defect > tol || !fit.future) {
        throw HypothesisViolation(kClauseBoundary,
                                  "boundary isometry violated: induced boundary metric is not round of radius sin(rho) "
                                  "(fit defect " + format_double(fit.fit_defect) + ", scale defect " +
                                      format_double(fit.scale_defect) + ")");
    }
    return boost_to(fit.p, sigma);
}

MoebiusMap boundary_conformal_map(const SphereField& u, const HyperSphere& sigma, int samples, double tol) {
    const BoundaryFit fit = fit_boundary_metric(u, sigma, samples);
    if (fit.fit_defect > tol || !fit.future || !std::isfinite(fit.radius)) {
        throw HypothesisViolation(kClauseBoundary, "induced boundary metric is not round (fit defect " +
                                                       format_double(fit.fit_defect) + ")");
    }
    return boost_to(fit.p_unit, sigma);
}

NormalizedHole normalize_hole(const SphereField& u, const HyperSphere& hole, double rho, const NormalizeOptions& opts) {
    const int n = u.dim();
    if (hole.sphere_dim() != n) throw InputError("normalize_hole: dimension mismatch");
    if (!(rho > 0.0 && rho < std::numbers::pi)) throw InputError("normalize_hole: rho out of range");
    const HyperSphere target(north_pole(n), std::numbers::pi - rho);
    const HyperSphere sigma(south_pole(n), rho);
    MoebiusMap phi = cap_normalizer(hole, target);

    const MoebiusMap f = boundary_matching_map(u.pullback(phi.inverse()), sigma, opts.boundary_samples,
                                               opts.roundness_tol);
    phi = compose(f.inverse(), phi);

    const RadialGrid grid = RadialGrid::sphere_polar(n, south_pole(n), rho, opts.intervals);
    if (opts.marker) {
        const Vec mk = apply_sphere(phi, *opts.marker).point;
        const Vec ref = grid.meridian_point(rho);
        const Vec nn = north_pole(n);
        const Vec a = mk - mk.dot(nn) * nn;
        const Vec b = ref - ref.dot(nn) * nn;
        if (a.norm() > 1e-12 && b.norm() > 1e-12) {
            phi = compose(rotation_between(a.normalized(), b.normalized()), phi);
        }
    }

    const SphereField pulled = u.pullback(phi.inverse());
    double defect = 0.0;
    for (const auto& x : sigma.sample_boundary(opts.boundary_samples, 19)) {
        defect = std::max(defect, std::abs(pulled(x) - 1.0));
    }
    if (defect > opts.roundness_tol) {
        throw HypothesisViolation(kClauseBoundary, "boundary isometry violated: induced boundary factor deviates from 1 by " +
                                                       format_double(defect));
    }
    RadialField radial = pulled.sample(grid);
    return NormalizedHole{phi, pulled, std::move(radial), defect};
}

GluedField glue_cap(const GluedField& g, double) { return g; }

GluedField glue_cap(const RadialField& u, double tol) {
    const RadialGrid& src = u.grid();
    if (src.background() != Background::SpherePolar || !src.has_center()) {
        throw InputError("glue_cap: expects a sphere-polar field on [0, rho]");
    }
    if (u.interface()) {
        // Already glued: accept if the cap side is identically 1.
        const std::size_t k = *u.interface();
        bool cap_is_one = true;
        for (std::size_t i = k; i < u.size(); ++i) cap_is_one = cap_is_one && u.value(i) == 1.0;
        if (cap_is_one) return GluedField{u, k, src.node(k)};
        throw InvariantError("glue_cap: glued input with a non-unit cap side");
    }
    const double mismatch = std::abs(u.values().back() - 1.0);
    if (mismatch > tol) {
        throw InvariantError("glue_cap: interface value differs from 1 by " + format_double(mismatch));
    }
    const double h = src.spacing();
    const double rho = src.t_max();
    const double limit = std::numbers::pi - RadialGrid::kDefaultGuard;
    const auto total = static_cast<int>(std::floor(limit / h + 1e-9));
    const std::size_t k = u.size() - 1;
    if (static_cast<std::size_t>(total) < k + 4) throw InputError("glue_cap: no room for the cap region");
    const RadialGrid grid = RadialGrid::sphere_polar(src.dim(), src.pole(), total * h, total);
    std::vector<double> v(grid.size(), 1.0);
    for (std::size_t i = 0; i < k; ++i) v[i] = u.value(i);
    return GluedField{RadialField::glued(grid, std::move(v), k), k, rho};
}

JumpReport interface_jump(const GluedField& g) {
    const auto& v = g.field.values();
    const double h = g.field.grid().spacing();
    const std::size_t k = g.interface;
    JumpReport r;
    r.left_derivative = (3.0 * v[k] - 4.0 * v[k - 1] + v[k - 2]) / (2.0 * h);
    r.right_derivative = (-3.0 * v[k] + 4.0 * v[k + 1] - v[k + 2]) / (2.0 * h);
    r.jump = r.left_derivative - r.right_derivative;
    return r;
}

double Bump::value(double t) const {
    const double s = (t - center) / half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return q * q * q;
}

double Bump::d1(double t) const {
    const double s = (t - center) / half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return -6.0 * s * q * q / half_width;
}

double Bump::d2(double t) const {
    const double s = (t - center) / half_width;
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return (-6.0 * q * q + 24.0 * s * s * q) / (half_width * half_width);
}

std::vector<Bump> standard_bumps(const GluedField& g) {
    const RadialGrid& grid = g.field.grid();
    const double length = grid.t_max() - grid.t_min();
    const double t_if = grid.node(g.interface);
    const std::array<double, 3> fractions{0.05, 0.1, 0.2};
    const std::array<int, 3> counts{7, 7, 6};
    std::vector<Bump> out;
    for (std::size_t j = 0; j < fractions.size(); ++j) {
        const double w = fractions[j] * length;
        const double wi = std::min({w, t_if - grid.t_min(), grid.t_max() - t_if});
        out.push_back(Bump{t_if, wi, true});
        const int rest = counts[j] - 1;
        const double a = grid.t_min() + w;
        const double b = grid.t_max() - w;
        for (int i = 0; i < rest; ++i) {
            const double c = a + (b - a) * (i + 0.5) / rest;
            out.push_back(Bump{c, w, std::abs(c - t_if) < w});
        }
    }
    return out;
}

double weak_residual(const GluedField& g, const Bump& b) {
    check_support(g, b);
    const RadialGrid& grid = g.field.grid();
    const int n = grid.dim();
    const double c = yamabe_constant(n);
    const double p = critical_exponent(n);
    return integrate_support(g, b, [&](double t) {
        const double u = g.field.interpolate(t);
        const double lap_phi = b.d2(t) + grid.drift(t) * b.d1(t);
        return -u * lap_phi - c * (std::pow(u, p) - u) * b.value(t);
    });
}

double strong_residual(const GluedField& g, const Bump& b) {
    check_support(g, b);
    const RadialGrid& grid = g.field.grid();
    const int n = grid.dim();
    const double c = yamabe_constant(n);
    const double p = critical_exponent(n);
    const auto lap = laplacian_piecewise(g.field);
    // the interface node carries the manifold-side value; use the cap side
    // value for t beyond it
    std::vector<double> lap_right = lap;
    lap_right[g.interface] = 0.0;
    return integrate_support(g, b, [&](double t) {
        const double u = g.field.interpolate(t);
        const bool right = t > grid.node(g.interface);
        const double l = interpolate_nodal(grid, right ? lap_right : lap, t, g.interface);
        return (-l - c * (std::pow(u, p) - u)) * b.value(t);
    });
}

std::vector<ResidualEntry> weak_inequality_residual(const GluedField& g, const std::vector<Bump>& bumps) {
    std::vector<ResidualEntry> out;
    out.reserve(bumps.size());
    for (const auto& b : bumps) out.push_back({b, weak_residual(g, b)});
    return out;
}

}  // namespace confrig
