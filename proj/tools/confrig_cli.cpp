// Command-line front end: verify, check, solve-bvp, mobius, sweep.
//
// Exit codes: 0 RIGID or pass, 1 NON_RIGID, 2 HYPOTHESIS_FAIL, 3 input
// error, 4 solver failure.

#include "confrig/errors.hpp"
#include "confrig/expression.hpp"
#include "confrig/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace confrig;

namespace {

constexpr int kInputError = 3;
constexpr int kSolverError = 4;

struct Common {
    std::optional<int> grid_size;
    std::optional<double> tol;
    bool force = false;
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--grid-size", c.grid_size, "Radial grid intervals");
    app->add_option("--tol", c.tol, "Gap and Hopf tolerance");
    app->add_flag("--force", c.force, "Run the solver even when a hypothesis fails");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--out", c.out, "Output directory (default: stdout)");
}

void apply(Scenario& s, const Common& c) {
    if (c.grid_size) s.options.grid_size = *c.grid_size;
    if (c.tol) s.options.gap_tol = s.options.hopf_tol = *c.tol;
    if (c.force) s.options.force = true;
    validate_scenario(s);
}

double parse_value(const std::string& text) { return eval_constant(text); }

Vec parse_point(const std::string& text, int n) {
    if (text == "N") return north_pole(n);
    if (text == "S") return south_pole(n);
    Vec v(n + 1);
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i > n) throw InputError("point '" + text + "' has more than " + std::to_string(n + 1) + " coordinates");
        v(i++) = parse_value(item);
    }
    if (i != n + 1) throw InputError("point '" + text + "' needs " + std::to_string(n + 1) + " coordinates");
    if (v.norm() < 1e-12) throw InputError("point '" + text + "' is zero");
    return v.normalized();
}

Json matrix_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Json point_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

int emit(const RigidityReport& r, const Scenario& s, const Common& c) {
    if (!c.out.empty()) {
        for (const auto& p : emit_report(r, s, c.out, c.format)) std::cerr << "wrote " << p.string() << "\n";
    } else if (c.format == "csv") {
        write_profile_csv(std::cout, r);
    } else {
        Json j;
        j["scenario"] = scenario_summary(s);
        j["report"] = to_json(r);
        std::cout << dump(j);
    }
    return exit_code(r.verdict);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal rigidity toolkit"};
    app.require_subcommand(1);

    Common common;
    std::string scenario_path;

    auto* verify = app.add_subcommand("verify", "Run the full pipeline on a scenario");
    verify->add_option("scenario", scenario_path, "Scenario file")->required();
    add_common(verify, common);

    auto* check = app.add_subcommand("check", "Check the hypotheses only");
    check->add_option("scenario", scenario_path, "Scenario file")->required();
    add_common(check, common);

    int bvp_n = 3;
    std::string bvp_rho = "pi/2";
    double bvp_scale = 1.0;
    std::string bvp_direction = "decreasing";
    auto* solve = app.add_subcommand("solve-bvp", "Solve the radial boundary-value problem on B_r, r = tan(rho/2)");
    solve->add_option("--n", bvp_n, "Dimension")->check(CLI::Range(3, 64));
    solve->add_option("--rho", bvp_rho, "Cap parameter (expression)");
    solve->add_option("--boundary-scale", bvp_scale, "Multiplier of the boundary value");
    solve->add_option("--direction", bvp_direction, "Iteration direction")
        ->check(CLI::IsMember({"decreasing", "increasing"}));
    add_common(solve, common);

    auto* mobius = app.add_subcommand("mobius", "Moebius algebra utilities");
    mobius->require_subcommand(1);
    int mob_n = 3;
    std::string mob_center = "N";
    std::string mob_radius = "pi/2";
    std::string mob_point;
    std::string mob_rho = "pi/2";
    auto* reflect = mobius->add_subcommand("reflect", "Reflect a point in a hypersphere");
    reflect->add_option("--n", mob_n)->check(CLI::Range(2, 64));
    reflect->add_option("--center", mob_center, "N, S or comma separated coordinates");
    reflect->add_option("--radius", mob_radius, "Geodesic radius (expression)");
    reflect->add_option("--point", mob_point, "Point to reflect")->required();
    auto* normalize = mobius->add_subcommand("normalize", "Map a cap onto D_{pi-rho}(N)");
    normalize->add_option("--n", mob_n)->check(CLI::Range(2, 64));
    normalize->add_option("--center", mob_center, "N, S or comma separated coordinates");
    normalize->add_option("--radius", mob_radius, "Geodesic radius (expression)");
    normalize->add_option("--rho", mob_rho, "Target cap parameter (expression)");

    std::string sweep_param = "rho";
    std::vector<std::string> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Run a scenario over several parameter values concurrently");
    sweep->add_option("scenario", scenario_path, "Scenario file")->required();
    sweep->add_option("--param", sweep_param, "Parameter")->check(CLI::IsMember({"rho", "n", "grid-size"}));
    sweep->add_option("--values", sweep_values, "Values (expressions)")->required()->delimiter(',');
    add_common(sweep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    try {
        if (*verify) {
            Scenario s = load_scenario(scenario_path);
            apply(s, common);
            return emit(run_rigidity(s), s, common);
        }
        if (*check) {
            Scenario s = load_scenario(scenario_path);
            apply(s, common);
            const HypothesisReport h = check_hypotheses(s);
            Json j;
            j["scenario"] = scenario_summary(s);
            j["hypothesis"] = to_json(h);
            if (!common.out.empty()) {
                std::filesystem::create_directories(common.out);
                std::ofstream(std::filesystem::path(common.out) / "hypothesis.json", std::ios::binary) << dump(j);
            } else {
                std::cout << dump(j);
            }
            return h.pass ? 0 : 2;
        }
        if (*solve) {
            const double rho = parse_value(bvp_rho);
            if (!(rho > 0.0 && rho <= 0.5 * std::numbers::pi + 1e-12)) {
                throw InputError("--rho: rho = " + format_double(rho) + " violates the bound rho <= pi/2");
            }
            const double r = std::tan(0.5 * rho);
            const BvpSpec spec = BvpSpec::standard(bvp_n, r, common.grid_size.value_or(4096), bvp_scale);
            const int n = bvp_n;
            const auto& grid = spec.grid;
            const RadialField sub = RadialField::from_function(grid, [b = spec.boundary_value](double) { return b; });
            const bool above = bvp_scale > 1.0;
            const RadialField sup = RadialField::from_function(
                grid, [=](double t) { return above ? bubble(t, 1.0 / r, n) : round_bubble_w(t, n); });
            const Direction dir = bvp_direction == "increasing" ? Direction::Increasing : Direction::Decreasing;
            SolverResult res = monotone_iterate(spec, sub, sup, dir);
            double gap = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                gap = std::max(gap, std::abs(res.solution.value(i) - round_bubble_w(grid.node(i), n)));
            }
            if (common.format == "csv") {
                std::cout << "r,v_prime,w,v_prime-w\n";
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double w = round_bubble_w(grid.node(i), n);
                    std::cout << format_double(grid.node(i)) << ',' << format_double(res.solution.value(i)) << ','
                              << format_double(w) << ',' << format_double(res.solution.value(i) - w) << '\n';
                }
            } else {
                Json j;
                j["n"] = n;
                j["rho"] = rho;
                j["r"] = r;
                j["boundary_value"] = spec.boundary_value;
                j["direction"] = to_string(dir);
                j["supersolution"] = above ? "w_1/r" : "w";
                j["iterations"] = res.iterations;
                j["converged"] = res.converged;
                j["K"] = res.K;
                j["residual"] = res.residual;
                j["clamped_nodes"] = res.clamped_nodes;
                j["gap"] = gap;
                if (const auto mu = bubble_parameter_below(r, spec.boundary_value, n)) {
                    double err = 0.0;
                    for (std::size_t i = 0; i < grid.size(); ++i) {
                        err = std::max(err, std::abs(res.solution.value(i) - bubble(grid.node(i), *mu, n)));
                    }
                    j["bubble_parameter"] = *mu;
                    j["error_vs_bubble"] = err;
                }
                std::cout << dump(j);
            }
            return res.converged ? 0 : kSolverError;
        }
        if (*mobius) {
            const Vec c = parse_point(mob_center, mob_n);
            const HyperSphere sphere(c, parse_value(mob_radius));
            Json j;
            if (*reflect) {
                const Vec x = parse_point(mob_point, mob_n);
                const SphereImage im = apply_sphere(sphere_reflection(sphere), x);
                j["image"] = point_json(im.point);
                j["factor"] = im.factor;
            } else {
                const double rho = parse_value(mob_rho);
                const MoebiusMap m = cap_normalizer(sphere, HyperSphere(north_pole(mob_n), std::numbers::pi - rho));
                const HyperSphere img = image(m, sphere);
                j["matrix"] = matrix_json(m.matrix());
                j["image_center"] = point_json(img.center());
                j["image_radius"] = img.radius();
                j["lorentz_defect"] = m.lorentz_defect();
            }
            std::cout << dump(j);
            return 0;
        }
        if (*sweep) {
            std::vector<std::future<std::pair<Json, int>>> jobs;
            for (const auto& text : sweep_values) {
                const double value = parse_value(text);
                ScenarioOverrides ov;
                if (sweep_param == "rho") ov.rho = value;
                if (sweep_param == "n") ov.n = static_cast<int>(value);
                Scenario s = load_scenario(scenario_path, ov);
                if (sweep_param == "grid-size") s.options.grid_size = static_cast<int>(value);
                apply(s, common);
                jobs.push_back(std::async(std::launch::async, [s, value, param = sweep_param]() {
                    const RigidityReport r = run_rigidity(s);
                    Json j;
                    j[param] = value;
                    j["verdict"] = to_string(r.verdict);
                    j["gap"] = r.gap;
                    j["bvp_gap"] = r.bvp_gap;
                    j["hopf_gap"] = r.hopf_gap ? Json(*r.hopf_gap) : Json(nullptr);
                    j["iterations"] = r.solver.iterations;
                    j["converged"] = r.solver.converged;
                    return std::make_pair(j, exit_code(r.verdict));
                }));
            }
            Json out = Json::array();
            int rc = 0;
            for (auto& f : jobs) {
                auto [j, code] = f.get();
                out.push_back(j);
                rc = std::max(rc, code);
            }
            if (!common.out.empty()) {
                std::filesystem::create_directories(common.out);
                std::ofstream(std::filesystem::path(common.out) / "sweep.json", std::ios::binary) << dump(out);
            } else {
                std::cout << dump(out);
            }
            return rc;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverError;
    }
    return 0;
}
