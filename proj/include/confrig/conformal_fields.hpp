#pragma once

// Radial conformal factors over spherical caps and Euclidean balls, and the
// scalar- and mean-curvature operators of the conformal metric
// g~ = u^{4/(n-2)} g.

#include "confrig/moebius.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace confrig {

enum class Background { SpherePolar, EuclideanRadial };

/// Uniform radial grid t_0 < t_1 < ... < t_N. For SpherePolar the coordinate
/// is the geodesic angle from `pole`; for EuclideanRadial it is |x|.
class RadialGrid {
public:
    static constexpr int kMinIntervals = 16;
    static constexpr double kDefaultGuard = 1e-3;

    static RadialGrid sphere_polar(int n, Vec pole, double t_max, int intervals, double t_min = 0.0,
                                   double guard = kDefaultGuard);
    static RadialGrid euclidean_radial(int n, double r_max, int intervals, double r_min = 0.0);

    Background background() const { return background_; }
    int dim() const { return n_; }
    const Vec& pole() const { return pole_; }
    int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
    std::size_t size() const { return nodes_.size(); }
    double spacing() const { return h_; }
    double t_min() const { return nodes_.front(); }
    double t_max() const { return nodes_.back(); }
    double node(std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    /// The grid contains the regular center t = 0.
    bool has_center() const { return nodes_.front() == 0.0; }

    /// (n-1) * (1/t or cot t): the first-order coefficient of the radial
    /// Laplacian.
    double drift(double t) const;
    /// Radial volume density t^{n-1} or sin^{n-1} t (without the area of S^{n-1}).
    double volume_density(double t) const;
    /// Mean curvature of the level set {t = const} with respect to the normal
    /// pointing toward decreasing t: cot t or 1/t.
    double level_mean_curvature(double t) const;

    /// The point at coordinate t along the reference meridian. SpherePolar
    /// only.
    Vec meridian_point(double t) const;
    /// Unit direction perpendicular to the pole that defines the meridian.
    const Vec& meridian_direction() const { return meridian_; }

private:
    RadialGrid(Background b, int n, Vec pole, double t_min, double t_max, int intervals);

    Background background_;
    int n_;
    Vec pole_;
    Vec meridian_;
    double h_;
    std::vector<double> nodes_;
};

enum class Regularity { Smooth, LipschitzGlued };

/// Positive conformal factor sampled on a RadialGrid.
class RadialField {
public:
    RadialField(RadialGrid grid, std::vector<double> values);
    static RadialField glued(RadialGrid grid, std::vector<double> values, std::size_t interface);
    static RadialField from_function(const RadialGrid& grid, const std::function<double(double)>& f);

    const RadialGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    Regularity regularity() const { return regularity_; }
    /// Interface node index for glued fields.
    std::optional<std::size_t> interface() const { return interface_; }

    /// Piecewise-cubic interpolation; stencils never cross the interface.
    double interpolate(double t) const;
    double min_value() const;
    double max_value() const;

private:
    RadialGrid grid_;
    std::vector<double> values_;
    Regularity regularity_ = Regularity::Smooth;
    std::optional<std::size_t> interface_;
};

/// Conformal factor evaluated pointwise on S^n, defined off the union of
/// the open caps in `holes`.
class SphereField {
public:
    using Eval = std::function<double(const Vec&)>;

    SphereField(int n, Eval eval, std::vector<HyperSphere> holes = {});

    /// Interpolates a SpherePolar field about its pole. Points whose polar
    /// angle is outside [t_min, t_max] (with a small slack) raise DomainError.
    static SphereField from_radial(const RadialField& f);
    static SphereField constant(int n, double c);

    int dim() const { return n_; }
    const std::vector<HyperSphere>& holes() const { return holes_; }
    double operator()(const Vec& x) const { return eval_(x); }

    /// Pullback under a: x -> u(a x) * lambda_a(x)^{(n-2)/2}; the holes are
    /// replaced by their preimages.
    SphereField pullback(const MoebiusMap& a) const;

    /// Samples along the meridian of a SpherePolar grid.
    RadialField sample(const RadialGrid& grid) const;
    /// Largest relative spread of the field over latitude spheres at the
    /// given angles about `pole` (0 for radial fields).
    double radial_defect(const Vec& pole, std::span<const double> angles, int samples_per_sphere = 8) const;

private:
    int n_;
    Eval eval_;
    std::vector<HyperSphere> holes_;
};

/// Scalar curvature per node plus the mean curvature of the outer boundary
/// {t = t_N}, computed with respect to the inner normal nu = -eta.
struct CurvatureProfile {
    RadialGrid grid;
    std::vector<double> scal;
    double mean_curvature_at_boundary = 0.0;
    static constexpr const char* normal_convention = "inner normal nu = -eta";
};

/// w(r) = (2 / (1 + r^2))^{(n-2)/2}.
double round_bubble_w(double r, int n);
/// dw/dr.
double round_bubble_dw(double r, int n);

/// Yamabe exponent (n+2)/(n-2) and the constant n(n-2)/4.
double critical_exponent(int n);
double yamabe_constant(int n);

/// Radial Laplacian with the analyst's sign: f'' + drift * f'. Five-point
/// central differences in the interior (three-point next to a one-sided end),
/// regular center limit n f''(0) from mirrored ghost nodes, and
/// five-point one-sided formulas at non-center ends. Glued fields raise
/// InvariantError; use laplacian_piecewise.
std::vector<double> laplacian_radial(const RadialField& f);
/// Laplacian of a glued field, evaluated on each side of the interface
/// with one-sided stencils; the interface node takes the value from the
/// side t < t_interface.
std::vector<double> laplacian_piecewise(const RadialField& f);

/// Piecewise-cubic interpolation of arbitrary nodal values; with an
/// interface index the stencil stays on the side containing t.
double interpolate_nodal(const RadialGrid& grid, const std::vector<double>& values, double t,
                         std::optional<std::size_t> interface = std::nullopt);

/// One-sided second-order derivative d/dt at the first or last node.
double derivative_at_end(const RadialField& f, bool outer);

CurvatureProfile scal_from_factor_sphere(const RadialField& u);
CurvatureProfile scal_from_factor_euclidean(const RadialField& u);

/// H(g~) = u^{-n/(n-2)} (H_background u + 2/(n-2) du/deta).
double mean_curvature_from_slope(int n, double u, double du_deta, double h_background);
/// Mean curvature of the outer boundary {t = t_N}; eta points toward
/// increasing t.
double mean_curvature_boundary(const RadialField& u, double h_background);
/// du/deta needed for a prescribed boundary mean curvature.
double slope_for_mean_curvature(int n, double u, double h_target, double h_background);

/// Values (u o a)(x) lambda_a(x)^{(n-2)/2} at the given points.
std::vector<double> pullback_factor(const SphereField& u, const MoebiusMap& a, std::span<const Vec> points);

struct ScalBoundReport {
    bool pass = true;
    /// min over nodes of Scal - bound.
    double worst_margin = 0.0;
    std::optional<std::size_t> first_violation;
    std::vector<bool> node_pass;
};

/// Pointwise Scal >= bound with relative tolerance rel_tol * |bound|.
ScalBoundReport check_scal_bound(const CurvatureProfile& profile, double bound, double rel_tol = 1e-6);
ScalBoundReport check_scal_bound(const CurvatureProfile& profile);

/// CSV with header "coordinate,value", shortest round-trip decimal form.
void write_csv(std::ostream& os, const RadialField& f);
struct CsvColumns {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};
CsvColumns read_csv(std::istream& is);
std::string format_double(double x);
double parse_double(const std::string& s);

}  // namespace confrig
