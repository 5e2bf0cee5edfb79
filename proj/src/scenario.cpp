#include "confrig/scenario.hpp"

#include "confrig/errors.hpp"
#include "confrig/expression.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace confrig {

std::string to_string(FactorKind k) {
    switch (k) {
        case FactorKind::Round: return "round";
        case FactorKind::Scaled: return "scaled";
        case FactorKind::Bubble: return "bubble";
        case FactorKind::Perturbed: return "perturbed";
        case FactorKind::Expression: return "expression";
        case FactorKind::Csv: return "csv";
    }
    return "round";
}

HyperSphere standard_hole(int n, double rho) { return HyperSphere(north_pole(n), std::numbers::pi - rho); }

MoebiusMap random_moebius(int n, std::uint64_t seed, int reflections) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MoebiusMap m = MoebiusMap::identity(n);
    for (int k = 0; k < reflections; ++k) {
        Vec c(n + 1);
        do {
            for (int i = 0; i <= n; ++i) c(i) = u(rng);
        } while (c.norm() < 0.1 || c.norm() > 1.0);
        const double radius = 0.5 * std::numbers::pi + 0.35 * u(rng);
        m = compose(sphere_reflection(HyperSphere(c.normalized(), radius)), m);
    }
    return reorthonormalized(m);
}

MoebiusMap Scenario::total_transform() const {
    MoebiusMap t = MoebiusMap::identity(n);
    if (factor.kind == FactorKind::Bubble) {
        const Vec axis = factor.pole.size() ? factor.pole : south_pole(n);
        t = axial_boost(axis, factor.rapidity);
    }
    if (random_pullback) t = compose(t, random_moebius(n, random_pullback->seed, random_pullback->reflections));
    if (transform) t = compose(t, *transform);
    return t;
}

std::vector<HyperSphere> Scenario::holes() const {
    const MoebiusMap t = total_transform();
    std::vector<HyperSphere> out;
    for (const auto& h : base_holes) out.push_back(preimage(t, h));
    return out;
}

SphereField Scenario::field() const {
    const Vec pole = factor.pole.size() ? factor.pole : south_pole(n);
    const int dim = n;
    const double r = rho;
    SphereField base = SphereField::constant(n, 1.0);
    switch (factor.kind) {
        case FactorKind::Round:
        case FactorKind::Bubble:
            break;
        case FactorKind::Scaled:
            base = SphereField::constant(n, factor.c);
            break;
        case FactorKind::Perturbed: {
            const double amp = factor.amplitude;
            const int mode = factor.mode;
            base = SphereField(n, [=](const Vec& x) {
                const double q = geodesic_distance(x, pole) / r;
                return 1.0 + amp * (std::pow(q, 2 * mode) - 1.0);
            });
            break;
        }
        case FactorKind::Expression: {
            const Expression e = Expression::parse(factor.expression, {"theta", "n", "rho"});
            base = SphereField(n, [=](const Vec& x) {
                return e.eval({{"theta", geodesic_distance(x, pole)}, {"n", static_cast<double>(dim)}, {"rho", r}});
            });
            break;
        }
        case FactorKind::Csv: {
            const auto& t = factor.csv_coordinates;
            const int intervals = static_cast<int>(t.size()) - 1;
            const RadialGrid grid = RadialGrid::sphere_polar(n, pole, t.back(), intervals, t.front());
            base = SphereField::from_radial(RadialField(grid, factor.csv_values));
            break;
        }
    }
    SphereField holed(n, [base](const Vec& x) { return base(x); }, base_holes);
    const MoebiusMap t = total_transform();
    return holed.pullback(t);
}

Scenario pulled_back(const Scenario& s, const MoebiusMap& a) {
    Scenario out = s;
    out.transform = s.transform ? compose(*s.transform, a) : a;
    return out;
}

Scenario standard_scenario(int n, double rho, FactorSpec factor) {
    Scenario s;
    s.name = "standard";
    s.n = n;
    s.rho = rho;
    s.base_holes = {standard_hole(n, rho)};
    s.factor = std::move(factor);
    return s;
}

void validate_scenario(const Scenario& s) {
    std::vector<std::string> errs;
    auto add = [&](const std::string& path, const std::string& msg, const std::string& constraint) {
        errs.push_back(path + ": " + msg + " [" + constraint + "]");
    };
    if (s.n < 3) add("dimension", "n = " + std::to_string(s.n) + " must be at least 3", "n >= 3");
    if (!(s.rho > 0.0)) add("geometry.rho", "rho = " + format_double(s.rho) + " must be positive", "rho > 0");
    if (s.rho > 0.5 * std::numbers::pi + 1e-12) {
        add("geometry.rho", "rho = " + format_double(s.rho) + " violates the bound rho <= pi/2", "rho <= pi/2");
    }
    if (!s.limit_points.empty()) {
        add("geometry.limit_points", "limit set must be empty (" + std::to_string(s.limit_points.size()) + " given)",
            "compact cover, empty limit set");
    }
    if (s.base_holes.empty()) add("geometry.holes", "at least one hole is required", "nonempty boundary");
    if (s.options.grid_size < RadialGrid::kMinIntervals) add("solver.grid_size", "too small", "grid_size >= 16");
    if (!(s.options.gap_tol > 0.0)) add("solver.tol", "must be positive", "tol > 0");
    if (s.factor.kind == FactorKind::Scaled && !(s.factor.c > 0.0)) add("factor.c", "must be positive", "u > 0");
    if (s.factor.kind == FactorKind::Perturbed && s.factor.mode < 1) add("factor.mode", "must be >= 1", "mode >= 1");
    if (s.factor.kind == FactorKind::Csv) {
        const auto& t = s.factor.csv_coordinates;
        if (t.size() < RadialGrid::kMinIntervals + 1 || t.size() != s.factor.csv_values.size()) {
            add("factor.csv", "needs at least 17 rows of (coordinate, value)", "uniform grid");
        } else {
            const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (std::abs(t[i] - (t.front() + h * static_cast<double>(i))) > 1e-9 * std::max(1.0, t.back())) {
                    add("factor.csv", "coordinates are not uniformly spaced (row " + std::to_string(i + 2) + ")",
                        "uniform grid");
                    break;
                }
            }
            for (double v : s.factor.csv_values) {
                if (!(v > 0.0)) {
                    add("factor.csv", "values must be positive", "u > 0");
                    break;
                }
            }
        }
    }
    if (errs.empty() && s.n >= 3) {
        const auto holes = s.holes();
        for (std::size_t i = 0; i < holes.size(); ++i) {
            for (std::size_t j = i + 1; j < holes.size(); ++j) {
                const double d = geodesic_distance(holes[i].center(), holes[j].center());
                if (d <= holes[i].radius() + holes[j].radius() + 1e-12) {
                    add("geometry.holes[" + std::to_string(j) + "]",
                        "closure meets the closure of hole " + std::to_string(i), "hole closures pairwise disjoint");
                }
            }
        }
    }
    if (!errs.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw InputError(msg);
    }
}

namespace {

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw InputError(path + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw InputError(path + "." + key + ": unknown key");
    }
}

double number(const YAML::Node& node, const std::string& path, const std::map<std::string, double>& vars) {
    if (!node.IsScalar()) throw InputError(path + ": expected a number");
    const auto text = node.as<std::string>();
    try {
        return eval_constant(text, vars);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

int integer(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<int>();
    } catch (const YAML::Exception&) {
        throw InputError(path + ": expected an integer");
    }
}

bool boolean(const YAML::Node& node, const std::string& path) {
    try {
        return node.as<bool>();
    } catch (const YAML::Exception&) {
        throw InputError(path + ": expected true or false");
    }
}

Vec point(const YAML::Node& node, const std::string& path, int n) {
    if (node.IsSequence()) {
        if (static_cast<int>(node.size()) != n + 1) {
            throw InputError(path + ": expected " + std::to_string(n + 1) + " coordinates");
        }
        Vec v(n + 1);
        for (int i = 0; i <= n; ++i) v(i) = number(node[static_cast<std::size_t>(i)], path, {});
        if (v.norm() < 1e-12) throw InputError(path + ": zero vector");
        return v.normalized();
    }
    std::string s = node.as<std::string>();
    double sign = 1.0;
    if (!s.empty() && s[0] == '-') {
        sign = -1.0;
        s = s.substr(1);
    }
    if (s == "N") return sign * north_pole(n);
    if (s == "S") return sign * south_pole(n);
    if (s.size() > 1 && s[0] == 'e') {
        const int k = std::atoi(s.c_str() + 1);
        if (k >= 1 && k <= n + 1) return sign * basis_vector(n + 1, k - 1);
    }
    throw InputError(path + ": unknown point '" + node.as<std::string>() + "'");
}

void read_csv_factor(FactorSpec& f, const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw InputError("factor.csv: cannot open " + file.string());
    const CsvColumns cols = read_csv(in);
    if (cols.columns.size() < 2) throw InputError("factor.csv: expected columns coordinate,value");
    f.csv_coordinates = cols.columns[0];
    f.csv_values = cols.columns[1];
}

}  // namespace

Scenario parse_scenario(const std::string& yaml_text, const std::filesystem::path& base_dir,
                        const ScenarioOverrides& overrides) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw InputError(std::string("scenario parse error: ") + e.what());
    }
    check_keys(root, "scenario", {"name", "dimension", "geometry", "factor", "solver", "output"});
    Scenario s;
    if (root["name"]) s.name = root["name"].as<std::string>();
    if (!root["dimension"]) throw InputError("dimension: required");
    s.n = overrides.n ? *overrides.n : integer(root["dimension"], "dimension");
    if (s.n < 2) throw InputError("dimension: n = " + std::to_string(s.n) + " must be at least 3 [n >= 3]");
    std::map<std::string, double> vars{{"n", static_cast<double>(s.n)}};

    const YAML::Node geo = root["geometry"];
    if (!geo) throw InputError("geometry: required");
    check_keys(geo, "geometry", {"rho", "holes", "limit_points", "pullback"});
    if (!geo["rho"]) throw InputError("geometry.rho: required");
    s.rho = overrides.rho ? *overrides.rho : number(geo["rho"], "geometry.rho", vars);
    vars["rho"] = s.rho;
    if (geo["holes"]) {
        if (!geo["holes"].IsSequence()) throw InputError("geometry.holes: expected a list");
        for (std::size_t i = 0; i < geo["holes"].size(); ++i) {
            const std::string path = "geometry.holes[" + std::to_string(i) + "]";
            const YAML::Node h = geo["holes"][i];
            check_keys(h, path, {"center", "radius"});
            if (!h["center"] || !h["radius"]) throw InputError(path + ": center and radius required");
            const double radius = number(h["radius"], path + ".radius", vars);
            if (!(radius > 0.0 && radius < std::numbers::pi)) {
                throw InputError(path + ".radius: must lie in (0, pi) [geodesic ball]");
            }
            s.base_holes.emplace_back(point(h["center"], path + ".center", s.n), radius);
        }
    } else {
        s.base_holes = {standard_hole(s.n, s.rho)};
    }
    if (geo["limit_points"]) {
        const YAML::Node lp = geo["limit_points"];
        if (!lp.IsSequence()) throw InputError("geometry.limit_points: expected a list");
        for (std::size_t i = 0; i < lp.size(); ++i) {
            s.limit_points.push_back(point(lp[i], "geometry.limit_points[" + std::to_string(i) + "]", s.n));
        }
    }
    if (geo["pullback"]) {
        check_keys(geo["pullback"], "geometry.pullback", {"seed", "reflections"});
        RandomPullback p;
        p.seed = geo["pullback"]["seed"] ? geo["pullback"]["seed"].as<std::uint64_t>() : 0;
        p.reflections = geo["pullback"]["reflections"] ? integer(geo["pullback"]["reflections"], "geometry.pullback.reflections") : 3;
        s.random_pullback = p;
    }

    if (const YAML::Node f = root["factor"]) {
        check_keys(f, "factor", {"builtin", "c", "rapidity", "amplitude", "mode", "expression", "csv", "pole"});
        const int sources = (f["builtin"] ? 1 : 0) + (f["expression"] ? 1 : 0) + (f["csv"] ? 1 : 0);
        if (sources > 1) throw InputError("factor: give exactly one of builtin, expression, csv");
        FactorSpec& fs = s.factor;
        if (f["pole"]) fs.pole = point(f["pole"], "factor.pole", s.n);
        if (f["builtin"]) {
            const auto b = f["builtin"].as<std::string>();
            if (b == "round") fs.kind = FactorKind::Round;
            else if (b == "scaled") fs.kind = FactorKind::Scaled;
            else if (b == "bubble") fs.kind = FactorKind::Bubble;
            else if (b == "perturbed") fs.kind = FactorKind::Perturbed;
            else throw InputError("factor.builtin: unknown builtin '" + b + "'");
        } else if (f["expression"]) {
            fs.kind = FactorKind::Expression;
            fs.expression = f["expression"].as<std::string>();
            Expression::parse(fs.expression, {"theta", "n", "rho"});
        } else if (f["csv"]) {
            fs.kind = FactorKind::Csv;
            fs.csv_path = f["csv"].as<std::string>();
            read_csv_factor(fs, base_dir / fs.csv_path);
        }
        auto only_for = [&](const char* key, FactorKind k) {
            if (f[key] && fs.kind != k) throw InputError(std::string("factor.") + key + ": not used by " + to_string(fs.kind));
        };
        only_for("c", FactorKind::Scaled);
        only_for("rapidity", FactorKind::Bubble);
        only_for("amplitude", FactorKind::Perturbed);
        only_for("mode", FactorKind::Perturbed);
        if (f["c"]) fs.c = number(f["c"], "factor.c", vars);
        if (f["rapidity"]) fs.rapidity = number(f["rapidity"], "factor.rapidity", vars);
        if (f["amplitude"]) fs.amplitude = number(f["amplitude"], "factor.amplitude", vars);
        if (f["mode"]) fs.mode = integer(f["mode"], "factor.mode");
    }

    if (const YAML::Node so = root["solver"]) {
        check_keys(so, "solver", {"grid_size", "tol", "hypothesis_tol", "max_iters", "force",
                                  "relax_mean_curvature_at_half_pi", "boundary_gate", "both_directions"});
        PipelineOptions& o = s.options;
        if (so["grid_size"]) o.grid_size = integer(so["grid_size"], "solver.grid_size");
        if (so["tol"]) o.gap_tol = o.hopf_tol = number(so["tol"], "solver.tol", vars);
        if (so["hypothesis_tol"]) o.hypothesis_tol = number(so["hypothesis_tol"], "solver.hypothesis_tol", vars);
        if (so["max_iters"]) o.max_iters = integer(so["max_iters"], "solver.max_iters");
        if (so["force"]) o.force = boolean(so["force"], "solver.force");
        if (so["relax_mean_curvature_at_half_pi"]) {
            o.relax_mean_curvature_at_half_pi =
                boolean(so["relax_mean_curvature_at_half_pi"], "solver.relax_mean_curvature_at_half_pi");
        }
        if (so["both_directions"]) o.both_directions = boolean(so["both_directions"], "solver.both_directions");
        if (so["boundary_gate"]) {
            const auto g = so["boundary_gate"].as<std::string>();
            if (g == "isometry") o.boundary_gate = BoundaryGate::Isometry;
            else if (g == "scalar_curvature") o.boundary_gate = BoundaryGate::ScalarCurvature;
            else throw InputError("solver.boundary_gate: expected isometry or scalar_curvature");
        }
    }
    if (const YAML::Node out = root["output"]) {
        check_keys(out, "output", {"format", "directory"});
        if (out["format"]) s.output.format = out["format"].as<std::string>();
        if (s.output.format != "json" && s.output.format != "csv") throw InputError("output.format: expected json or csv");
        if (out["directory"]) s.output.directory = out["directory"].as<std::string>();
    }
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario s = parse_scenario(ss.str(), path.parent_path(), overrides);
    if (s.name.empty()) s.name = path.stem().string();
    return s;
}

}  // namespace confrig
