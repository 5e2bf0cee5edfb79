#pragma once

// Moebius transformations of S^n in the Lorentz model.
//
// S^n sits in R^{n+1}; a point x is lifted to the null vector (x, 1) of
// R^{n+2} with the form q(X) = X_1^2 + ... + X_{n+1}^2 - X_{n+2}^2. A
// conformal map of S^n is a matrix A with A^T J A = J that preserves the
// future light cone. The same matrix acts on the hyperboloid model of
// hyperbolic (n+1)-space, which gives the Poincare extension to B^{n+1}.

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace confrig {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Lorentz-model tolerances.
inline constexpr double kAlgebraTol = 1e-10;
inline constexpr double kCompositionTol = 1e-9;

/// The quadratic form q of signature (n+1, 1) on R^{n+2}.
class MinkowskiForm {
public:
    explicit MinkowskiForm(int n);

    int sphere_dim() const { return n_; }
    int ambient_dim() const { return n_ + 2; }

    double dot(const Vec& a, const Vec& b) const;
    double norm2(const Vec& a) const { return dot(a, a); }
    /// J = diag(1, ..., 1, -1).
    Mat metric() const;

private:
    int n_;
};

/// Unit vector of R^{n+1}.
class SpherePoint {
public:
    explicit SpherePoint(Vec coords, double tol = 1e-9);
    const Vec& coords() const { return x_; }
    int sphere_dim() const { return static_cast<int>(x_.size()) - 1; }
    /// The null lift (x, 1).
    Vec lift() const;

private:
    Vec x_;
};

/// Point of the open unit ball B^{n+1}.
class BallPoint {
public:
    explicit BallPoint(Vec coords);
    const Vec& coords() const { return y_; }

private:
    Vec y_;
};

Vec north_pole(int n);  // e_{n+1}
Vec south_pole(int n);  // -e_{n+1}
Vec basis_vector(int dim, int k);

double geodesic_distance(const Vec& x, const Vec& y);

/// Geodesic sphere Sigma_rho(p) = { x in S^n : <x, p> = cos rho }, bounding
/// the cap D_rho(p). Encoded by the spacelike unit vector
/// v = (p, cos rho) / sin rho; the open cap is { <(x,1), v>_q > 0 }.
class HyperSphere {
public:
    HyperSphere(Vec center, double radius);

    /// Recovers center and radius from any spacelike vector (normalised to
    /// q(v) = 1). The cap is the side where <(x,1), v>_q > 0.
    static HyperSphere from_spacelike(const Vec& v);

    int sphere_dim() const { return static_cast<int>(center_.size()) - 1; }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    const Vec& spacelike() const { return v_; }

    /// q-inner product of the lift of x with v; zero on the sphere, positive
    /// inside the cap. Equals (<x,p> - cos rho) / sin rho.
    double side(const Vec& x) const;
    bool on_sphere(const Vec& x, double tol = 1e-10) const;
    /// Closed cap membership with tolerance on the geodesic distance.
    bool in_closed_cap(const Vec& x, double tol = 0.0) const;
    bool in_open_cap(const Vec& x, double tol = 0.0) const;

    /// Deterministic samples of the boundary sphere: `count` points spread
    /// over great circles through the center.
    std::vector<Vec> sample_boundary(int count, std::uint64_t seed = 7) const;

    /// Intrinsic round radius of the boundary for the round metric.
    double boundary_round_radius() const;

private:
    Vec center_;
    double radius_;
    Vec v_;
};

/// Element of O(n+1,1)^+ acting on S^n and B^{n+1}.
class MoebiusMap {
public:
    /// Validates the Lorentz property and future preservation.
    explicit MoebiusMap(Mat a, double tol = kCompositionTol);
    static MoebiusMap identity(int n);

    const Mat& matrix() const { return a_; }
    int sphere_dim() const { return static_cast<int>(a_.rows()) - 2; }
    /// A_{n+2,n+2}; positive for maps preserving the future cone.
    double time_orientation() const { return a_(a_.rows() - 1, a_.cols() - 1); }
    /// ||A^T J A - J||_inf.
    double lorentz_defect() const;
    /// J A^T J.
    MoebiusMap inverse() const;

private:
    struct Unchecked {};
    MoebiusMap(Mat a, Unchecked) : a_(std::move(a)) {}
    friend MoebiusMap compose(const MoebiusMap&, const MoebiusMap&);
    friend MoebiusMap reorthonormalized(const MoebiusMap&);

    Mat a_;
};

struct SphereImage {
    Vec point;
    /// lambda with (A^* g_{S^n})_x = lambda^2 g_{S^n}.
    double factor;
};

/// R_v(X) = X - 2 <X, v>_q v.
MoebiusMap sphere_reflection(const HyperSphere& s);

/// a o b. Re-orthonormalises against J when the defect exceeds 1e-9.
MoebiusMap compose(const MoebiusMap& a, const MoebiusMap& b);

/// Minkowski Gram-Schmidt on the columns, timelike column first.
MoebiusMap reorthonormalized(const MoebiusMap& a);

SphereImage apply_sphere(const MoebiusMap& a, const SpherePoint& x);
SphereImage apply_sphere(const MoebiusMap& a, const Vec& x);

/// Poincare extension: ball -> hyperboloid -> A -> ball.
BallPoint apply_ball(const MoebiusMap& a, const BallPoint& y);

/// Inversion of R^{n+1} in a generalized sphere (a hyperplane through the
/// origin when `is_plane`).
class GeneralizedSphereReflection {
public:
    static GeneralizedSphereReflection plane(Vec normal);
    static GeneralizedSphereReflection sphere(Vec center, double radius);

    bool is_plane() const { return is_plane_; }
    const Vec& center() const { return center_; }
    const Vec& normal() const { return center_; }
    double radius() const { return radius_; }

    Vec apply(const Vec& x) const;

private:
    GeneralizedSphereReflection(bool plane, Vec c, double r)
        : is_plane_(plane), center_(std::move(c)), radius_(r) {}

    bool is_plane_;
    Vec center_;  // unit normal for planes
    double radius_;
};

/// The reflection of R^{n+1} in the generalized sphere orthogonal to S^n
/// that meets S^n in `s`: center p / cos rho and radius |tan rho|, or the
/// hyperplane orthogonal to p when rho = pi/2.
GeneralizedSphereReflection orthogonal_extension_reflection(const HyperSphere& s);

/// Stereographic projection from N = e_{n+1}: x -> (x_1..x_n) / (1 - x_{n+1}).
Vec stereographic(const SpherePoint& x);
Vec stereographic(const Vec& x);
Vec stereographic_inverse(const Vec& z);

/// Rotation of R^{n+1} (time coordinate fixed) taking p to q in the plane
/// spanned by p and q. For q = -p the plane is spanned by p and the
/// coordinate axis of smallest |p_k|.
MoebiusMap rotation_between(const Vec& p, const Vec& q);

/// Lorentz boost of rapidity beta along the unit axis e; moves points of
/// S^n toward e for beta > 0 and fixes +-e.
MoebiusMap axial_boost(const Vec& axis, double rapidity);

/// Rapidity of the boost along an axis taking the latitude cos(theta) = c
/// to cos(theta) = c_target.
double boost_rapidity(double c, double c_target);

/// Rotation aligning centers followed by a boost along the target axis so
/// that the source cap is mapped onto the target cap.
MoebiusMap cap_normalizer(const HyperSphere& source, const HyperSphere& target);

/// A(s) and A^{-1}(s) as geodesic spheres, with caps mapped to caps.
HyperSphere image(const MoebiusMap& a, const HyperSphere& s);
HyperSphere preimage(const MoebiusMap& a, const HyperSphere& s);

}  // namespace confrig
