#include "confrig/conformal_fields.hpp"

#include "confrig/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace confrig {

namespace {

Vec perpendicular_unit(const Vec& p) {
    Eigen::Index k = 0;
    p.cwiseAbs().minCoeff(&k);
    Vec e = Vec::Zero(p.size());
    e(k) = 1.0;
    return (e - e.dot(p) * p).normalized();
}

// 4-point Lagrange interpolation on a uniform grid restricted to nodes
// [lo, hi]. Falls back to fewer points when the segment is short.
double lagrange_uniform(const std::vector<double>& nodes, const std::vector<double>& vals, std::size_t lo,
                        std::size_t hi, double t) {
    const double h = nodes[1] - nodes[0];
    const double pos = (t - nodes[0]) / h;
    const std::size_t count = std::min<std::size_t>(4, hi - lo + 1);
    auto base = static_cast<long>(std::floor(pos)) - static_cast<long>(count / 2) + 1;
    base = std::clamp(base, static_cast<long>(lo), static_cast<long>(hi - count + 1));
    double result = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        const auto ij = static_cast<std::size_t>(base) + j;
        double w = 1.0;
        for (std::size_t m = 0; m < count; ++m) {
            if (m == j) continue;
            const auto im = static_cast<std::size_t>(base) + m;
            w *= (pos - static_cast<double>(im)) / static_cast<double>(static_cast<long>(ij) - static_cast<long>(im));
        }
        result += w * vals[ij];
    }
    return result;
}

}  // namespace

// ----------------------------------------------------------------- RadialGrid

RadialGrid::RadialGrid(Background b, int n, Vec pole, double t_min, double t_max, int intervals)
    : background_(b), n_(n), pole_(std::move(pole)) {
    if (n < 2) throw InputError("RadialGrid: dimension must be >= 2");
    if (intervals < kMinIntervals) throw InputError("RadialGrid: need at least 16 intervals");
    if (!(t_min >= 0.0 && t_max > t_min)) throw InputError("RadialGrid: need 0 <= t_min < t_max");
    h_ = (t_max - t_min) / intervals;
    nodes_.resize(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) nodes_[static_cast<std::size_t>(i)] = t_min + i * h_;
    nodes_.back() = t_max;
    if (background_ == Background::SpherePolar) meridian_ = perpendicular_unit(pole_);
}

RadialGrid RadialGrid::sphere_polar(int n, Vec pole, double t_max, int intervals, double t_min, double guard) {
    if (pole.size() != n + 1 || std::abs(pole.norm() - 1.0) > 1e-9) {
        throw InputError("RadialGrid::sphere_polar: pole must be a unit vector in R^{n+1}");
    }
    if (t_max > std::numbers::pi - guard + 1e-12) {
        throw InputError("RadialGrid::sphere_polar: t_max must stay below pi - guard");
    }
    return RadialGrid(Background::SpherePolar, n, pole.normalized(), t_min, t_max, intervals);
}

RadialGrid RadialGrid::euclidean_radial(int n, double r_max, int intervals, double r_min) {
    return RadialGrid(Background::EuclideanRadial, n, Vec(), r_min, r_max, intervals);
}

double RadialGrid::drift(double t) const {
    if (background_ == Background::EuclideanRadial) return (n_ - 1) / t;
    return (n_ - 1) * std::cos(t) / std::sin(t);
}

double RadialGrid::volume_density(double t) const {
    const double s = background_ == Background::EuclideanRadial ? t : std::sin(t);
    return std::pow(s, n_ - 1);
}

double RadialGrid::level_mean_curvature(double t) const {
    return background_ == Background::EuclideanRadial ? 1.0 / t : std::cos(t) / std::sin(t);
}

Vec RadialGrid::meridian_point(double t) const {
    if (background_ != Background::SpherePolar) throw InputError("meridian_point: sphere grids only");
    return std::cos(t) * pole_ + std::sin(t) * meridian_;
}

// ---------------------------------------------------------------- RadialField

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw InputError("RadialField: value count does not match grid");
    for (double v : values_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError("RadialField: values must be positive and finite");
    }
}

RadialField RadialField::glued(RadialGrid grid, std::vector<double> values, std::size_t interface) {
    RadialField f(std::move(grid), std::move(values));
    if (interface == 0 || interface + 1 >= f.size()) throw InputError("RadialField::glued: interface must be interior");
    f.regularity_ = Regularity::LipschitzGlued;
    f.interface_ = interface;
    return f;
}

RadialField RadialField::from_function(const RadialGrid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.node(i));
    return RadialField(grid, std::move(v));
}

double interpolate_nodal(const RadialGrid& grid, const std::vector<double>& values, double t,
                         std::optional<std::size_t> interface) {
    const auto& nodes = grid.nodes();
    std::size_t lo = 0;
    std::size_t hi = nodes.size() - 1;
    if (interface) {
        const std::size_t k = *interface;
        if (t <= nodes[k]) {
            hi = k;
        } else {
            lo = k;
        }
    }
    return lagrange_uniform(nodes, values, lo, hi, t);
}

double RadialField::interpolate(double t) const { return interpolate_nodal(grid_, values_, t, interface_); }

double RadialField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double RadialField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

// ---------------------------------------------------------------- SphereField

SphereField::SphereField(int n, Eval eval, std::vector<HyperSphere> holes)
    : n_(n), eval_(std::move(eval)), holes_(std::move(holes)) {}

SphereField SphereField::constant(int n, double c) {
    return SphereField(n, [c](const Vec&) { return c; });
}

SphereField SphereField::from_radial(const RadialField& f) {
    const RadialGrid& g = f.grid();
    if (g.background() != Background::SpherePolar) throw InputError("SphereField::from_radial: sphere grid required");
    const double slack = 1e-9 + 1e-6 * g.spacing();
    return SphereField(g.dim(), [f, slack](const Vec& x) {
        const RadialGrid& grid = f.grid();
        double t = geodesic_distance(x, grid.pole());
        if (t < grid.t_min() - slack || t > grid.t_max() + slack) {
            throw DomainError("sampled image outside the field's domain (angle " + format_double(t) + ")");
        }
        t = std::clamp(t, grid.t_min(), grid.t_max());
        return f.interpolate(t);
    });
}

SphereField SphereField::pullback(const MoebiusMap& a) const {
    if (a.sphere_dim() != n_) throw InputError("SphereField::pullback: dimension mismatch");
    std::vector<HyperSphere> holes;
    holes.reserve(holes_.size());
    for (const auto& h : holes_) holes.push_back(preimage(a, h));
    const double expo = 0.5 * (n_ - 2);
    return SphereField(n_,
                       [base = *this, a, expo](const Vec& x) {
                           const SphereImage im = apply_sphere(a, x);
                           return base(im.point) * std::pow(im.factor, expo);
                       },
                       std::move(holes));
}

RadialField SphereField::sample(const RadialGrid& grid) const {
    if (grid.background() != Background::SpherePolar) throw InputError("SphereField::sample: sphere grid required");
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = (*this)(grid.meridian_point(grid.node(i)));
    return RadialField(grid, std::move(v));
}

double SphereField::radial_defect(const Vec& pole, std::span<const double> angles, int samples_per_sphere) const {
    double worst = 0.0;
    for (double t : angles) {
        if (t <= 0.0 || t >= std::numbers::pi) continue;
        const HyperSphere lat(pole, t);
        const auto pts = lat.sample_boundary(samples_per_sphere, 11);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : pts) {
            const double v = (*this)(p);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, (hi - lo) / std::max(std::abs(hi), 1e-300));
    }
    return worst;
}

// ---------------------------------------------------------- Curvature operators

double round_bubble_w(double r, int n) { return std::pow(2.0 / (1.0 + r * r), 0.5 * (n - 2)); }

double round_bubble_dw(double r, int n) {
    return -0.5 * (n - 2) * round_bubble_w(r, n) * 2.0 * r / (1.0 + r * r);
}

double critical_exponent(int n) { return (n + 2.0) / (n - 2.0); }
double yamabe_constant(int n) { return n * (n - 2.0) / 4.0; }

namespace {

// Laplacian over nodes [lo, hi] treating both ends as one-sided unless the
// end is the regular center.
void laplacian_segment(const RadialGrid& g, const std::vector<double>& f, std::size_t lo, std::size_t hi,
                       std::vector<double>& out) {
    const double h = g.spacing();
    const double h2 = h * h;
    const int n = g.dim();
    if (hi - lo < 4) throw InputError("laplacian: segment needs at least 5 nodes");
    const bool mirrored = lo == 0 && g.has_center();
    // radial fields are even in t, so f_{-k} = f_k at a regular center
    auto at = [&](long k) { return f[static_cast<std::size_t>(mirrored && k < 0 ? -k : k)]; };
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const long k = static_cast<long>(i);
        double d2 = 0.0;
        double d1 = 0.0;
        if ((mirrored || i >= lo + 2) && i + 2 <= hi) {
            d2 = (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h2);
            d1 = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
        } else {
            d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
            d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        out[i] = d2 + g.drift(g.node(i)) * d1;
    }
    if (mirrored) {
        out[0] = n * (-2.0 * f[2] + 32.0 * f[1] - 30.0 * f[0]) / (12.0 * h2);
    } else {
        const double d2 =
            (35.0 * f[lo] - 104.0 * f[lo + 1] + 114.0 * f[lo + 2] - 56.0 * f[lo + 3] + 11.0 * f[lo + 4]) / (12.0 * h2);
        const double d1 =
            (-25.0 * f[lo] + 48.0 * f[lo + 1] - 36.0 * f[lo + 2] + 16.0 * f[lo + 3] - 3.0 * f[lo + 4]) / (12.0 * h);
        out[lo] = d2 + g.drift(g.node(lo)) * d1;
    }
    const double d2 =
        (35.0 * f[hi] - 104.0 * f[hi - 1] + 114.0 * f[hi - 2] - 56.0 * f[hi - 3] + 11.0 * f[hi - 4]) / (12.0 * h2);
    const double d1 =
        (25.0 * f[hi] - 48.0 * f[hi - 1] + 36.0 * f[hi - 2] - 16.0 * f[hi - 3] + 3.0 * f[hi - 4]) / (12.0 * h);
    out[hi] = d2 + g.drift(g.node(hi)) * d1;
}

}  // namespace

std::vector<double> laplacian_radial(const RadialField& f) {
    if (f.regularity() != Regularity::Smooth) {
        throw InvariantError("laplacian_radial: glued field needs interface-aware handling (laplacian_piecewise)");
    }
    std::vector<double> out(f.size());
    laplacian_segment(f.grid(), f.values(), 0, f.size() - 1, out);
    return out;
}

std::vector<double> laplacian_piecewise(const RadialField& f) {
    if (!f.interface()) return laplacian_radial(f);
    const std::size_t k = *f.interface();
    std::vector<double> out(f.size());
    std::vector<double> right(f.size());
    laplacian_segment(f.grid(), f.values(), k, f.size() - 1, right);
    for (std::size_t i = k + 1; i < f.size(); ++i) out[i] = right[i];
    laplacian_segment(f.grid(), f.values(), 0, k, out);
    return out;
}

double derivative_at_end(const RadialField& f, bool outer) {
    const auto& v = f.values();
    const double h = f.grid().spacing();
    const std::size_t m = v.size() - 1;
    if (outer) return (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h);
    return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
}

double mean_curvature_from_slope(int n, double u, double du_deta, double h_background) {
    return std::pow(u, -n / (n - 2.0)) * (h_background * u + 2.0 / (n - 2.0) * du_deta);
}

double slope_for_mean_curvature(int n, double u, double h_target, double h_background) {
    return 0.5 * (n - 2.0) * (h_target * std::pow(u, n / (n - 2.0)) - h_background * u);
}

double mean_curvature_boundary(const RadialField& u, double h_background) {
    const int n = u.grid().dim();
    if (n < 3) throw InputError("mean_curvature_boundary: n >= 3 required");
    return mean_curvature_from_slope(n, u.values().back(), derivative_at_end(u, true), h_background);
}

namespace {

CurvatureProfile scal_profile(const RadialField& u, double background_scal_term) {
    const RadialGrid& g = u.grid();
    const int n = g.dim();
    if (n < 3) throw InputError("scal_from_factor: n >= 3 required");
    const auto lap = laplacian_piecewise(u);
    const double p = critical_exponent(n);
    const double c = 4.0 * (n - 1.0) / (n - 2.0);
    CurvatureProfile prof{g, std::vector<double>(u.size()), 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ui = u.value(i);
        prof.scal[i] = c * std::pow(ui, -p) * (background_scal_term * ui - lap[i]);
    }
    prof.mean_curvature_at_boundary = mean_curvature_boundary(u, g.level_mean_curvature(g.t_max()));
    return prof;
}

}  // namespace

CurvatureProfile scal_from_factor_sphere(const RadialField& u) {
    if (u.grid().background() != Background::SpherePolar) {
        throw InputError("scal_from_factor_sphere: sphere background required");
    }
    return scal_profile(u, yamabe_constant(u.grid().dim()));
}

CurvatureProfile scal_from_factor_euclidean(const RadialField& u) {
    if (u.grid().background() != Background::EuclideanRadial) {
        throw InputError("scal_from_factor_euclidean: euclidean background required");
    }
    return scal_profile(u, 0.0);
}

std::vector<double> pullback_factor(const SphereField& u, const MoebiusMap& a, std::span<const Vec> points) {
    std::vector<double> out;
    out.reserve(points.size());
    const double expo = 0.5 * (u.dim() - 2);
    for (const auto& x : points) {
        const SphereImage im = apply_sphere(a, x);
        out.push_back(u(im.point) * std::pow(im.factor, expo));
    }
    return out;
}

ScalBoundReport check_scal_bound(const CurvatureProfile& profile, double bound, double rel_tol) {
    ScalBoundReport r;
    r.node_pass.resize(profile.scal.size());
    r.worst_margin = std::numeric_limits<double>::infinity();
    const double tol = rel_tol * std::max(1.0, std::abs(bound));
    for (std::size_t i = 0; i < profile.scal.size(); ++i) {
        const double margin = profile.scal[i] - bound;
        r.worst_margin = std::min(r.worst_margin, margin);
        const bool ok = margin >= -tol;
        r.node_pass[i] = ok;
        if (!ok && !r.first_violation) r.first_violation = i;
    }
    r.pass = !r.first_violation.has_value();
    return r;
}

ScalBoundReport check_scal_bound(const CurvatureProfile& profile) {
    const int n = profile.grid.dim();
    return check_scal_bound(profile, n * (n - 1.0));
}

// -------------------------------------------------------------------------- CSV

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) throw InputError("empty numeric field");
    const char* first = s.data() + b;
    const char* last = s.data() + e + 1;
    if (*first == '+') ++first;
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw InputError("malformed number: '" + s + "'");
    return v;
}

void write_csv(std::ostream& os, const RadialField& f) {
    os << "coordinate,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << format_double(f.grid().node(i)) << ',' << format_double(f.value(i)) << '\n';
    }
}

CsvColumns read_csv(std::istream& is) {
    CsvColumns out;
    std::string line;
    if (!std::getline(is, line)) throw InputError("CSV: missing header");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            out.header.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
    }
    out.columns.resize(out.header.size());
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col >= out.columns.size()) throw InputError("CSV: too many fields on line " + std::to_string(row));
            out.columns[col++].push_back(parse_double(cell));
        }
        if (col != out.columns.size()) throw InputError("CSV: too few fields on line " + std::to_string(row));
    }
    return out;
}

}  // namespace confrig
