#include "confrig/rigidity_pipeline.hpp"

#include "confrig/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace confrig {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Rigid: return "RIGID";
        case Verdict::NonRigid: return "NON_RIGID";
        case Verdict::HypothesisFail: return "HYPOTHESIS_FAIL";
        case Verdict::SolverFail: return "SOLVER_FAIL";
    }
    return "SOLVER_FAIL";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::Rigid: return 0;
        case Verdict::NonRigid: return 1;
        case Verdict::HypothesisFail: return 2;
        case Verdict::SolverFail: return 4;
    }
    return 4;
}

namespace {

constexpr int kBoundarySamples = 32;

HyperSphere target_hole(int n, double rho) { return HyperSphere(north_pole(n), std::numbers::pi - rho); }
HyperSphere target_boundary(int n, double rho) { return HyperSphere(south_pole(n), rho); }

bool is_half_pi(double rho) { return std::abs(rho - 0.5 * std::numbers::pi) < 1e-12; }

NormalizeOptions normalize_options(const Scenario& s) {
    NormalizeOptions o;
    o.intervals = s.options.grid_size;
    o.boundary_samples = kBoundarySamples;
    o.roundness_tol = s.options.hypothesis_tol;
    return o;
}

// Field in the frame where the hole is D_{pi-rho}(N): the full normalization
// when the boundary is round, the cap normalizer alone otherwise.
struct Frame {
    SphereField field;
    RadialField radial;
    bool normalized = false;
    std::string failure;
};

Frame hole_frame(const Scenario& s, const SphereField& u, const HyperSphere& hole) {
    try {
        NormalizedHole nh = normalize_hole(u, hole, s.rho, normalize_options(s));
        return Frame{nh.field, nh.radial, true, {}};
    } catch (const HypothesisViolation& e) {
        // A boundary that is round of another radius still fixes the frame
        // up to rotation; otherwise the cap normalizer alone is used.
        MoebiusMap phi = cap_normalizer(hole, target_hole(s.n, s.rho));
        try {
            const MoebiusMap f = boundary_conformal_map(u.pullback(phi.inverse()), target_boundary(s.n, s.rho),
                                                        kBoundarySamples, s.options.hypothesis_tol);
            phi = compose(f.inverse(), phi);
        } catch (const HypothesisViolation&) {
        }
        SphereField f = u.pullback(phi.inverse());
        const RadialGrid grid = RadialGrid::sphere_polar(s.n, south_pole(s.n), s.rho, s.options.grid_size);
        RadialField radial = f.sample(grid);
        return Frame{std::move(f), std::move(radial), false, e.what()};
    }
}

double relative_tol(double tol, double scale) { return tol * std::max(1.0, std::abs(scale)); }

}  // namespace

HypothesisReport check_hypotheses(const Scenario& s) {
    HypothesisReport rep;
    const double tol = s.options.hypothesis_tol;

    GateResult geometry{"geometry", kClauseGeometry, true, false, 0.0, 0.0, 0.0, {}};
    try {
        validate_scenario(s);
    } catch (const InputError& e) {
        geometry.pass = false;
        geometry.detail = e.what();
        if (s.rho > 0.5 * std::numbers::pi + 1e-12) geometry.clause = kClauseRadius;
    }
    GateResult scal{"scal_bound", kClauseScal, true, false, 0.0, s.n * (s.n - 1.0),
                    std::numeric_limits<double>::infinity(), {}};
    GateResult boundary{"boundary_round", kClauseBoundary, true, false, 0.0, 0.0, 0.0, {}};
    GateResult mean{"mean_curvature", kClauseMeanCurvature, true, false, 0.0, 0.0,
                    std::numeric_limits<double>::infinity(), {}};
    if (!geometry.pass) {
        rep.gates = {geometry};
        rep.pass = false;
        rep.failed_clauses.push_back(geometry.clause);
        return rep;
    }

    const SphereField u = s.field();
    const auto holes = s.holes();
    const double h_rho = std::cos(s.rho) / std::sin(s.rho);
    const bool waive = is_half_pi(s.rho) && holes.size() == 1 && s.options.relax_mean_curvature_at_half_pi;
    rep.obata_assumption = s.options.boundary_gate == BoundaryGate::ScalarCurvature;
    rep.mean_curvature_waived = waive;

    for (std::size_t j = 0; j < holes.size(); ++j) {
        HoleCheck hc;
        hc.hole = j;
        const Frame fr = hole_frame(s, u, holes[j]);
        const std::string where = " (hole " + std::to_string(j) + ")";

        const MoebiusMap phi = cap_normalizer(holes[j], target_hole(s.n, s.rho));
        const BoundaryFit fit = fit_boundary_metric(u.pullback(phi.inverse()), target_boundary(s.n, s.rho), kBoundarySamples);
        hc.boundary_radius = fit.radius;
        hc.boundary_scalar_curvature = fit.scalar_curvature;
        hc.boundary_fit_defect = fit.fit_defect;

        hc.boundary = GateResult{"boundary_round", kClauseBoundary, true, false, fit.radius, std::sin(s.rho),
                                 -std::abs(fit.radius - std::sin(s.rho)), {}};
        if (rep.obata_assumption) {
            const double expected = (s.n - 1.0) * (s.n - 2.0) / (std::sin(s.rho) * std::sin(s.rho));
            hc.boundary.value = fit.scalar_curvature;
            hc.boundary.threshold = expected;
            hc.boundary.margin = -std::abs(fit.scalar_curvature - expected);
            hc.boundary.pass = fit.fit_defect <= tol && fit.future && std::abs(fit.scalar_curvature - expected) <= tol * expected;
            hc.boundary.detail = hc.boundary.pass
                                     ? "constant boundary scalar curvature (n-1)(n-2)/sin^2(rho); roundness assumed via Obata"
                                     : "boundary scalar curvature not constant (n-1)(n-2)/sin^2(rho)" + where;
        } else {
            hc.boundary.pass = fr.normalized;
            if (!fr.normalized) hc.boundary.detail = fr.failure + where;
        }

        const CurvatureProfile prof = scal_from_factor_sphere(fr.radial);
        const ScalBoundReport sb = check_scal_bound(prof, s.n * (s.n - 1.0), tol);
        hc.scal = GateResult{"scal_bound", kClauseScal, sb.pass, false, s.n * (s.n - 1.0) + sb.worst_margin,
                             s.n * (s.n - 1.0), sb.worst_margin, {}};
        if (!sb.pass) {
            hc.scal.detail = "Scal - n(n-1) = " + format_double(sb.worst_margin) + " at angle " +
                             format_double(fr.radial.grid().node(*sb.first_violation)) + where;
        }

        const double hm = mean_curvature_boundary(fr.radial, fr.radial.grid().level_mean_curvature(s.rho));
        hc.mean_curvature = GateResult{"mean_curvature", kClauseMeanCurvature, true, waive, hm, h_rho, hm - h_rho, {}};
        if (waive) {
            hc.mean_curvature.detail = "waived: rho = pi/2 with a single boundary component";
        } else {
            hc.mean_curvature.pass = hm >= h_rho - relative_tol(tol, h_rho);
            if (!hc.mean_curvature.pass) {
                hc.mean_curvature.detail = "H = " + format_double(hm) + " < cot(rho) = " + format_double(h_rho) + where;
            }
        }

        const std::array<double, 4> angles{0.25 * s.rho, 0.5 * s.rho, 0.75 * s.rho, s.rho};
        hc.radial_defect = fr.field.radial_defect(south_pole(s.n), angles);

        auto fold = [](GateResult& agg, const GateResult& g) {
            if (!g.pass && agg.pass) agg.detail = g.detail;
            agg.pass = agg.pass && g.pass;
            agg.waived = agg.waived || g.waived;
            if (g.margin < agg.margin || agg.value == 0.0) {
                agg.value = g.value;
                agg.threshold = g.threshold;
                agg.margin = g.margin;
            }
        };
        fold(scal, hc.scal);
        fold(boundary, hc.boundary);
        fold(mean, hc.mean_curvature);
        rep.holes.push_back(std::move(hc));
    }
    rep.gates = {geometry, scal, boundary, mean};
    rep.pass = true;
    for (const auto& g : rep.gates) {
        if (!g.pass) {
            rep.pass = false;
            rep.failed_clauses.push_back(g.clause);
        }
    }
    return rep;
}

RigidityReport run_rigidity(const Scenario& s) {
    RigidityReport rep;
    rep.scenario = s.name;
    rep.n = s.n;
    rep.rho = s.rho;
    rep.r = std::tan(0.5 * s.rho);
    rep.forced = s.options.force;
    rep.hypothesis = check_hypotheses(s);
    const bool geometry_ok = !rep.hypothesis.gates.empty() && rep.hypothesis.gates.front().pass;
    if (!geometry_ok || (!rep.hypothesis.pass && !s.options.force)) {
        rep.verdict = Verdict::HypothesisFail;
        return rep;
    }

    const int n = s.n;
    const double k = 0.5 * (n - 2);
    const SphereField u = s.field();
    const auto holes = s.holes();

    // Fill the secondary holes with round caps.
    std::vector<std::pair<HyperSphere, MoebiusMap>> caps;
    std::vector<HyperSphere> open_holes{holes.front()};
    for (std::size_t j = 1; j < holes.size(); ++j) {
        GluingReport g;
        g.hole = j;
        try {
            NormalizedHole nh = normalize_hole(u, holes[j], s.rho, normalize_options(s));
            const GluedField glued = glue_cap(nh.radial, s.options.hypothesis_tol);
            g.jump = interface_jump(glued);
            const auto bumps = standard_bumps(glued);
            const auto res = weak_inequality_residual(glued, bumps);
            g.bumps = res.size();
            g.min_residual = std::numeric_limits<double>::infinity();
            g.min_interface_residual = std::numeric_limits<double>::infinity();
            for (const auto& e : res) {
                g.min_residual = std::min(g.min_residual, e.residual);
                if (e.bump.straddles_interface) g.min_interface_residual = std::min(g.min_interface_residual, e.residual);
            }
            g.glued = true;
            caps.emplace_back(holes[j], nh.normalizer);
        } catch (const std::exception& e) {
            g.failure = e.what();
            open_holes.push_back(holes[j]);
        }
        rep.gluing.push_back(std::move(g));
    }
    rep.holes_glued = caps.size();
    const SphereField extended(
        n,
        [u, caps, k](const Vec& x) {
            for (const auto& [hole, phi] : caps) {
                if (hole.in_open_cap(x)) return std::pow(apply_sphere(phi, x).factor, k);
            }
            return u(x);
        },
        open_holes);

    // Normalize hole 0 and transfer to B_r.
    const Frame fr = hole_frame(s, extended, holes.front());
    rep.primary_normalized = fr.normalized;
    rep.factor_profile = fr.radial;
    rep.mean_curvature = mean_curvature_boundary(fr.radial, fr.radial.grid().level_mean_curvature(s.rho));

    const double r = rep.r;
    const double boundary_factor = fr.radial.values().back();
    const double scale = boundary_factor;
    BvpSpec spec = BvpSpec::standard(n, r, s.options.grid_size, scale);
    const RadialGrid& grid = spec.grid;
    const RadialGrid& meridian = fr.radial.grid();
    std::vector<double> v(grid.size());
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double si = grid.node(i);
        const double theta = std::min(2.0 * std::atan(si), s.rho);
        w[i] = round_bubble_w(si, n);
        v[i] = (i + 1 == grid.size() ? boundary_factor : fr.field(meridian.meridian_point(theta))) * w[i];
    }
    rep.radii = grid.nodes();
    rep.v = v;
    rep.w = w;
    for (std::size_t i = 0; i < v.size(); ++i) rep.gap = std::max(rep.gap, std::abs(v[i] - w[i]));

    const RadialField vf(grid, v);
    const RadialField wf(grid, w);
    rep.floor = superharmonic_floor_check(vf, spec.boundary_value);
    rep.flux = boundary_flux_compare(n, spec.boundary_value, rep.mean_curvature, s.rho, s.options.hopf_tol);

    SolverDiagnostics& sd = rep.solver;
    sd.ran = true;
    sd.boundary_value = spec.boundary_value;
    sd.boundary_scale = scale;
    const RadialField sub = RadialField::from_function(grid, [b = spec.boundary_value](double) { return b; });
    IterateOptions io;
    io.max_iters = s.options.max_iters;
    std::optional<SolverResult> dec;
    RadialField sup = vf;
    try {
        dec = monotone_iterate(spec, sub, sup, Direction::Decreasing, io);
    } catch (const InvariantError& e) {
        // v is not a discrete supersolution above the constant subsolution;
        // fall back to the bubble that is largest at s = r.
        if (std::pow(r, -k) >= spec.boundary_value) {
            sd.supersolution = "w_1/r";
            sup = RadialField::from_function(grid, [r, n](double t) { return bubble(t, 1.0 / r, n); });
            try {
                dec = monotone_iterate(spec, sub, sup, Direction::Decreasing, io);
            } catch (const std::exception& e2) {
                sd.failure = e2.what();
            }
        } else {
            sd.failure = std::string(e.what()) + "; no bubble supersolution attains the boundary value";
        }
    } catch (const SolverError& e) {
        sd.failure = e.what();
        sd.iterations = e.iterations();
        sd.last_change = e.last_change();
    }
    if (!dec) {
        rep.verdict = Verdict::SolverFail;
    } else {
        sd.K = dec->K;
        sd.iterations = dec->iterations;
        sd.converged = dec->converged;
        sd.last_change = dec->last_change;
        sd.residual = dec->residual;
        sd.clamped_nodes = dec->clamped_nodes;
        sd.shift_doublings = dec->shift_doublings;
        sd.change_history = dec->change_history;
        rep.v_prime = dec->solution.values();
        for (std::size_t i = 0; i < w.size(); ++i) rep.bvp_gap = std::max(rep.bvp_gap, std::abs(rep.v_prime[i] - w[i]));

        if (s.options.both_directions) {
            IterateOptions inc_opts = io;
            inc_opts.throw_on_stall = false;
            try {
                const SolverResult inc = monotone_iterate(spec, sub, sup, Direction::Increasing, inc_opts);
                sd.increasing_ran = true;
                sd.increasing_converged = inc.converged;
                sd.increasing_iterations = inc.iterations;
                for (std::size_t i = 0; i < w.size(); ++i) {
                    sd.direction_agreement = std::max(sd.direction_agreement, std::abs(inc.solution.value(i) - rep.v_prime[i]));
                }
            } catch (const std::exception&) {
                sd.increasing_ran = true;
            }
        }
        try {
            rep.hopf_gap = hopf_boundary_compare(dec->solution, wf, s.options.hopf_tol).gap;
        } catch (const InvariantError& e) {
            rep.hopf_note = e.what();
        }
        const bool rigid = rep.gap <= s.options.gap_tol && rep.bvp_gap <= s.options.gap_tol && rep.hopf_gap &&
                           std::abs(*rep.hopf_gap) <= s.options.hopf_tol;
        rep.verdict = rigid ? Verdict::Rigid : Verdict::NonRigid;
    }

    if (holes.size() > 1) {
        Finding f;
        f.holes = holes.size();
        f.consistent = false;
        for (const auto& h : rep.hypothesis.holes) {
            for (const GateResult* g : {&h.scal, &h.boundary, &h.mean_curvature}) {
                if (f.broken_check.empty() && !g->pass) {
                    f.broken_check = "hypothesis " + g->clause + " at hole " + std::to_string(h.hole);
                }
            }
        }
        for (const auto& g : rep.gluing) {
            if (!f.broken_check.empty()) break;
            if (!g.glued) f.broken_check = "gluing at hole " + std::to_string(g.hole) + ": " + g.failure;
            else if (g.min_residual < -1e-8) f.broken_check = "weak inequality at hole " + std::to_string(g.hole);
        }
        if (f.broken_check.empty() && rep.verdict == Verdict::SolverFail) f.broken_check = "solver: " + sd.failure;
        if (f.broken_check.empty() && rep.verdict == Verdict::NonRigid) f.broken_check = "rigidity gap";
        if (f.broken_check.empty()) {
            f.broken_check = "none";
            f.detail = "rigid verdict with glued caps present: a round metric on D_rho(S) cannot contain a cap "
                       "whose boundary is isometric to Sigma_rho, so the input is numerically inconsistent";
        } else {
            f.detail = "inputs with more than one boundary component cannot satisfy every hypothesis";
        }
        rep.finding = f;
    }
    return rep;
}

}  // namespace confrig
