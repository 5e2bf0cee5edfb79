#include "confrig/report.hpp"

#include "confrig/errors.hpp"

#include <fstream>
#include <ostream>

namespace confrig {

namespace {

Json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

Json point(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

std::ofstream open(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    return out;
}

}  // namespace

Json to_json(const GateResult& g) {
    Json j;
    j["name"] = g.name;
    j["clause"] = g.clause;
    j["pass"] = g.pass;
    j["waived"] = g.waived;
    j["value"] = number(g.value);
    j["threshold"] = number(g.threshold);
    j["margin"] = number(g.margin);
    j["detail"] = g.detail;
    return j;
}

Json to_json(const HypothesisReport& h) {
    Json j;
    j["pass"] = h.pass;
    j["failed_clauses"] = h.failed_clauses;
    j["gates"] = Json::array();
    for (const auto& g : h.gates) j["gates"].push_back(to_json(g));
    j["holes"] = Json::array();
    for (const auto& c : h.holes) {
        Json hj;
        hj["hole"] = c.hole;
        hj["scal_bound"] = to_json(c.scal);
        hj["boundary_round"] = to_json(c.boundary);
        hj["mean_curvature"] = to_json(c.mean_curvature);
        hj["boundary_radius"] = number(c.boundary_radius);
        hj["boundary_scalar_curvature"] = number(c.boundary_scalar_curvature);
        hj["boundary_fit_defect"] = number(c.boundary_fit_defect);
        hj["radial_defect"] = number(c.radial_defect);
        j["holes"].push_back(hj);
    }
    j["flags"] = {{"umbilic_declared", h.umbilic_declared},
                  {"obata_assumption", h.obata_assumption},
                  {"mean_curvature_waived", h.mean_curvature_waived}};
    return j;
}

Json scenario_summary(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    j["n"] = s.n;
    j["rho"] = number(s.rho);
    j["holes"] = Json::array();
    for (const auto& h : s.holes()) j["holes"].push_back({{"center", point(h.center())}, {"radius", number(h.radius())}});
    Json f;
    f["kind"] = to_string(s.factor.kind);
    switch (s.factor.kind) {
        case FactorKind::Scaled: f["c"] = number(s.factor.c); break;
        case FactorKind::Bubble: f["rapidity"] = number(s.factor.rapidity); break;
        case FactorKind::Perturbed:
            f["amplitude"] = number(s.factor.amplitude);
            f["mode"] = s.factor.mode;
            break;
        case FactorKind::Expression: f["expression"] = s.factor.expression; break;
        case FactorKind::Csv: f["csv"] = s.factor.csv_path; break;
        case FactorKind::Round: break;
    }
    j["factor"] = f;
    j["grid_size"] = s.options.grid_size;
    j["gap_tol"] = number(s.options.gap_tol);
    j["hopf_tol"] = number(s.options.hopf_tol);
    j["hypothesis_tol"] = number(s.options.hypothesis_tol);
    j["force"] = s.options.force;
    return j;
}

Json to_json(const RigidityReport& r) {
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["n"] = r.n;
    j["rho"] = number(r.rho);
    j["r"] = number(r.r);
    j["forced"] = r.forced;
    j["hypothesis"] = to_json(r.hypothesis);
    j["holes_glued"] = r.holes_glued;
    j["gluing"] = Json::array();
    for (const auto& g : r.gluing) {
        j["gluing"].push_back({{"hole", g.hole},
                               {"glued", g.glued},
                               {"failure", g.failure},
                               {"jump", number(g.jump.jump)},
                               {"left_derivative", number(g.jump.left_derivative)},
                               {"right_derivative", number(g.jump.right_derivative)},
                               {"bumps", g.bumps},
                               {"min_residual", number(g.min_residual)},
                               {"min_interface_residual", number(g.min_interface_residual)}});
    }
    j["primary_normalized"] = r.primary_normalized;
    const SolverDiagnostics& s = r.solver;
    Json sj;
    sj["ran"] = s.ran;
    sj["failure"] = s.failure;
    sj["supersolution"] = s.supersolution;
    sj["boundary_value"] = number(s.boundary_value);
    sj["boundary_scale"] = number(s.boundary_scale);
    sj["K"] = number(s.K);
    sj["iterations"] = s.iterations;
    sj["converged"] = s.converged;
    sj["last_change"] = number(s.last_change);
    sj["residual"] = number(s.residual);
    sj["clamped_nodes"] = s.clamped_nodes;
    sj["shift_doublings"] = s.shift_doublings;
    sj["change_history"] = s.change_history;
    sj["increasing"] = {{"ran", s.increasing_ran},
                        {"converged", s.increasing_converged},
                        {"iterations", s.increasing_iterations},
                        {"agreement", number(s.direction_agreement)}};
    j["solver"] = sj;
    j["gap"] = number(r.gap);
    j["bvp_gap"] = number(r.bvp_gap);
    j["hopf_gap"] = r.hopf_gap ? number(*r.hopf_gap) : Json(nullptr);
    j["hopf_note"] = r.hopf_note;
    j["floor"] = {{"superharmonic", r.floor.superharmonic},
                  {"pass", r.floor.pass},
                  {"min_value", number(r.floor.min_value)},
                  {"margin", number(r.floor.margin)}};
    j["mean_curvature"] = number(r.mean_curvature);
    j["flux"] = {{"dv", number(r.flux.dv)},
                 {"dw", number(r.flux.dw)},
                 {"dw_exact", number(r.flux.dw_exact)},
                 {"margin", number(r.flux.margin)},
                 {"holds", r.flux.holds},
                 {"strict", r.flux.strict}};
    if (r.finding) {
        j["finding"] = {{"holes", r.finding->holes},
                        {"consistent", r.finding->consistent},
                        {"broken_check", r.finding->broken_check},
                        {"detail", r.finding->detail}};
    } else {
        j["finding"] = nullptr;
    }
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_profile_csv(std::ostream& os, const RigidityReport& r) {
    os << "r,v,w,v-w\n";
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
        os << format_double(r.radii[i]) << ',' << format_double(r.v[i]) << ',' << format_double(r.w[i]) << ','
           << format_double(r.v[i] - r.w[i]) << '\n';
    }
}

void write_solution_csv(std::ostream& os, const RigidityReport& r) {
    os << "r,v_prime,w,v_prime-w\n";
    for (std::size_t i = 0; i < r.v_prime.size(); ++i) {
        os << format_double(r.radii[i]) << ',' << format_double(r.v_prime[i]) << ',' << format_double(r.w[i]) << ','
           << format_double(r.v_prime[i] - r.w[i]) << '\n';
    }
}

std::vector<std::filesystem::path> emit_report(const RigidityReport& r, const Scenario& s,
                                               const std::filesystem::path& dir, const std::string& format) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    if (format == "json") {
        Json j;
        j["scenario"] = scenario_summary(s);
        j["report"] = to_json(r);
        const auto p = dir / "report.json";
        open(p) << dump(j);
        files.push_back(p);
    } else if (format == "csv") {
        if (!r.radii.empty()) {
            auto p = dir / "profile.csv";
            auto out = open(p);
            write_profile_csv(out, r);
            files.push_back(p);
        }
        if (!r.v_prime.empty()) {
            auto p = dir / "solution.csv";
            auto out = open(p);
            write_solution_csv(out, r);
            files.push_back(p);
        }
        if (r.factor_profile) {
            auto p = dir / "factor_profile.csv";
            auto out = open(p);
            write_csv(out, *r.factor_profile);
            files.push_back(p);
        }
    } else {
        throw InputError("unknown report format '" + format + "'");
    }
    return files;
}

}  // namespace confrig
