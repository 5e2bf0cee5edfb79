#pragma once

// Hole normalization and round-cap gluing.
//
// Normalized frame: a hole is moved onto D_{pi-rho}(N), so the manifold
// side is the closed cap D_rho(S) and the field is radial about S. The
// outward normal eta of the manifold points toward increasing polar angle.

#include "confrig/conformal_fields.hpp"

#include <optional>
#include <string>
#include <vector>

namespace confrig {

inline constexpr const char* kClauseScal = "(i) Scal >= n(n-1)";
inline constexpr const char* kClauseBoundary = "(ii) boundary isometric to Sigma_rho";
inline constexpr const char* kClauseMeanCurvature = "(ii) mean curvature H >= H_rho";
inline constexpr const char* kClauseRadius = "rho <= pi/2";

struct NormalizedHole {
    /// Maps the hole onto D_{pi-rho}(N).
    MoebiusMap normalizer;
    /// Field pulled back to the normalized frame; holes transformed alongside.
    SphereField field;
    /// Field sampled on [0, rho] about S.
    RadialField radial;
    /// max |u - 1| over sampled interface points.
    double interface_defect = 0.0;
};

struct NormalizeOptions {
    int intervals = 4096;
    int boundary_samples = 32;
    double roundness_tol = 1e-6;
    /// Optional point of the hole boundary to be sent to the reference
    /// meridian point of the normalized grid.
    std::optional<Vec> marker;
};

/// Least-squares fit of the induced boundary metric c^2 g_sigma,
/// c = u^{2/(n-2)}, by 1/c = alpha + <beta, x>. The metric is round of
/// radius sin(rho) exactly when the fit is exact and <P,P> = -1 for
/// P = (-beta, alpha) adjusted along the sphere's normal vector.
struct BoundaryFit {
    Vec p;
    /// P rescaled onto the hyperboloid; equals p when the radius is sin(rho).
    Vec p_unit;
    double fit_defect = 0.0;    // max relative residual of the fit
    double scale_defect = 0.0;  // |<P,P> + 1|
    bool future = true;         // P is future pointing
    /// Radius of the round metric matching the fit.
    double radius = 0.0;
    /// Constant scalar curvature (n-1)(n-2) / radius^2 of that metric.
    double scalar_curvature = 0.0;
};
BoundaryFit fit_boundary_metric(const SphereField& u, const HyperSphere& sigma, int samples);

/// Moebius map F preserving the cap D_rho(S) such that the pullback of u
/// by F has factor 1 on sigma. Throws HypothesisViolation when the metric
/// induced on sigma is not round of radius sin rho.
MoebiusMap boundary_matching_map(const SphereField& u, const HyperSphere& sigma, int samples, double tol);
/// As boundary_matching_map, but only requires the induced metric to be
/// round of some radius; the pullback then has a constant factor on sigma.
/// Throws HypothesisViolation when it is not round.
MoebiusMap boundary_conformal_map(const SphereField& u, const HyperSphere& sigma, int samples, double tol);

/// Composes cap_normalizer with the boundary-matching map, so the returned
/// field is 1 on Sigma_rho(S). Throws HypothesisViolation (boundary clause)
/// when the boundary is not isometric to the round sphere of radius sin rho.
NormalizedHole normalize_hole(const SphereField& u, const HyperSphere& hole, double rho,
                              const NormalizeOptions& opts = {});

/// Glued field on [0, t_max] about S with interface node at rho and the
/// cap region set to 1.
struct GluedField {
    RadialField field;
    std::size_t interface = 0;
    double rho = 0.0;
};

/// Extends a normalized field on [0, rho] by 1 over (rho, pi - guard].
/// Already glued input is returned unchanged. InvariantError when the
/// interface value differs from 1 by more than tol.
GluedField glue_cap(const RadialField& u, double tol = 1e-6);
GluedField glue_cap(const GluedField& g, double tol = 1e-6);

struct JumpReport {
    double left_derivative = 0.0;
    double right_derivative = 0.0;
    double jump = 0.0;
};

JumpReport interface_jump(const GluedField& g);

/// phi(t) = (1 - ((t - c)/w)^2)^3 on |t - c| < w.
struct Bump {
    double center = 0.0;
    double half_width = 0.0;
    bool straddles_interface = false;

    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;
};

/// Twenty bumps: seven, seven and six with half-widths 0.05, 0.1 and 0.2
/// of the domain length; one bump of each width is centered on the
/// interface.
std::vector<Bump> standard_bumps(const GluedField& g);

struct ResidualEntry {
    Bump bump;
    double residual = 0.0;
};

/// residual(phi) = int u (-Lap phi) - n(n-2)/4 int (u^p - u) phi over the
/// glued domain, with the round volume element.
std::vector<ResidualEntry> weak_inequality_residual(const GluedField& g, const std::vector<Bump>& bumps);
double weak_residual(const GluedField& g, const Bump& b);
/// int (-Lap u - n(n-2)/4 (u^p - u)) phi using the discrete Laplacian.
double strong_residual(const GluedField& g, const Bump& b);

double unit_sphere_area(int dim);

}  // namespace confrig
