#include "confrig/moebius.hpp"

#include "confrig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace confrig {

namespace {

void require_dim(bool ok, const char* what) {
    if (!ok) throw InputError(what);
}

// Vector orthogonal to unit p along the coordinate axis where |p_k| is
// smallest; used whenever a direction perpendicular to p is needed.
Vec perpendicular_to(const Vec& p) {
    Eigen::Index k = 0;
    p.cwiseAbs().minCoeff(&k);
    Vec e = Vec::Zero(p.size());
    e(k) = 1.0;
    Vec u = e - e.dot(p) * p;
    return u.normalized();
}

}  // namespace

MinkowskiForm::MinkowskiForm(int n) : n_(n) {
    require_dim(n >= 1, "MinkowskiForm: sphere dimension must be >= 1");
}

double MinkowskiForm::dot(const Vec& a, const Vec& b) const {
    require_dim(a.size() == n_ + 2 && b.size() == n_ + 2, "MinkowskiForm: dimension mismatch");
    const Eigen::Index t = n_ + 1;
    return a.head(t).dot(b.head(t)) - a(t) * b(t);
}

Mat MinkowskiForm::metric() const {
    Mat j = Mat::Identity(n_ + 2, n_ + 2);
    j(n_ + 1, n_ + 1) = -1.0;
    return j;
}

SpherePoint::SpherePoint(Vec coords, double tol) : x_(std::move(coords)) {
    if (x_.size() < 2) throw InputError("SpherePoint: need at least 2 coordinates");
    if (std::abs(x_.norm() - 1.0) > tol) {
        throw InputError("SpherePoint: not a unit vector (|x| = " + std::to_string(x_.norm()) + ")");
    }
}

Vec SpherePoint::lift() const {
    Vec l(x_.size() + 1);
    l << x_, 1.0;
    return l;
}

BallPoint::BallPoint(Vec coords) : y_(std::move(coords)) {
    if (y_.norm() >= 1.0) throw InputError("BallPoint: |y| must be < 1");
}

Vec basis_vector(int dim, int k) {
    Vec e = Vec::Zero(dim);
    e(k) = 1.0;
    return e;
}

Vec north_pole(int n) { return basis_vector(n + 1, n); }
Vec south_pole(int n) { return -basis_vector(n + 1, n); }

double geodesic_distance(const Vec& x, const Vec& y) {
    // atan2 form is accurate near 0 and pi, unlike acos of the dot product.
    const double c = x.dot(y);
    const double s = (x - c * y).norm();
    return std::atan2(s, c);
}

// ---------------------------------------------------------------- HyperSphere

HyperSphere::HyperSphere(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
    if (center_.size() < 3) throw InputError("HyperSphere: need n >= 2");
    if (std::abs(center_.norm() - 1.0) > 1e-9) throw InputError("HyperSphere: center must be a unit vector");
    if (!(radius_ > 0.0 && radius_ < std::numbers::pi)) {
        throw InputError("HyperSphere: radius must lie in (0, pi)");
    }
    center_.normalize();
    v_.resize(center_.size() + 1);
    v_ << center_, std::cos(radius_);
    v_ /= std::sin(radius_);
}

HyperSphere HyperSphere::from_spacelike(const Vec& v) {
    const Eigen::Index t = v.size() - 1;
    const double q = v.head(t).squaredNorm() - v(t) * v(t);
    if (!(q > 0.0)) throw InputError("HyperSphere::from_spacelike: vector is not spacelike");
    const Vec u = v / std::sqrt(q);
    const double a = u.head(t).norm();
    const double radius = std::atan2(1.0, u(t));  // sin = 1/|a|, cos = u_t/|a|
    return HyperSphere(u.head(t) / a, radius);
}

double HyperSphere::side(const Vec& x) const {
    return (x.dot(center_) - std::cos(radius_)) / std::sin(radius_);
}

bool HyperSphere::on_sphere(const Vec& x, double tol) const { return std::abs(side(x)) <= tol; }

bool HyperSphere::in_closed_cap(const Vec& x, double tol) const {
    return geodesic_distance(x, center_) <= radius_ + tol;
}

bool HyperSphere::in_open_cap(const Vec& x, double tol) const {
    return geodesic_distance(x, center_) < radius_ - tol;
}

double HyperSphere::boundary_round_radius() const { return std::sin(radius_); }

std::vector<Vec> HyperSphere::sample_boundary(int count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    const Eigen::Index d = center_.size();
    const Vec fixed_dir = perpendicular_to(center_);
    for (int k = 0; k < count; ++k) {
        Vec dir;
        if (k == 0) {
            dir = fixed_dir;
        } else {
            dir = Vec(d);
            for (Eigen::Index i = 0; i < d; ++i) dir(i) = gauss(rng);
            dir -= dir.dot(center_) * center_;
            dir.normalize();
        }
        out.push_back(std::cos(radius_) * center_ + std::sin(radius_) * dir);
    }
    return out;
}

// ----------------------------------------------------------------- MoebiusMap

MoebiusMap::MoebiusMap(Mat a, double tol) : a_(std::move(a)) {
    if (a_.rows() != a_.cols() || a_.rows() < 4) {
        throw InputError("MoebiusMap: matrix must be square of size n+2 with n >= 2");
    }
    const double defect = lorentz_defect();
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if (defect > tol * scale * scale) {
        throw InvariantError("MoebiusMap: A^T J A != J (defect " + std::to_string(defect) + ")");
    }
    if (!(time_orientation() > 0.0)) {
        throw InvariantError("MoebiusMap: map does not preserve the future light cone");
    }
}

MoebiusMap MoebiusMap::identity(int n) { return MoebiusMap(Mat::Identity(n + 2, n + 2), Unchecked{}); }

double MoebiusMap::lorentz_defect() const {
    const Mat j = MinkowskiForm(sphere_dim()).metric();
    return (a_.transpose() * j * a_ - j).cwiseAbs().maxCoeff();
}

MoebiusMap MoebiusMap::inverse() const {
    const Mat j = MinkowskiForm(sphere_dim()).metric();
    return MoebiusMap(j * a_.transpose() * j, Unchecked{});
}

MoebiusMap sphere_reflection(const HyperSphere& s) {
    const int n = s.sphere_dim();
    const MinkowskiForm q(n);
    const Vec& v = s.spacelike();
    Mat r = Mat::Identity(n + 2, n + 2) - 2.0 * v * (q.metric() * v).transpose();
    return MoebiusMap(std::move(r));
}

MoebiusMap reorthonormalized(const MoebiusMap& a) {
    const int n = a.sphere_dim();
    const MinkowskiForm q(n);
    Mat m = a.matrix();
    const Eigen::Index t = n + 1;
    Vec ct = m.col(t);
    ct /= std::sqrt(-q.norm2(ct));
    m.col(t) = ct;
    for (Eigen::Index i = 0; i < t; ++i) {
        Vec c = m.col(i);
        // <c_j, c_j>_q = -1 for the time column and +1 for the others.
        c += q.dot(c, m.col(t)) * m.col(t);
        for (Eigen::Index j = 0; j < i; ++j) c -= q.dot(c, m.col(j)) * m.col(j);
        c /= std::sqrt(q.norm2(c));
        m.col(i) = c;
    }
    return MoebiusMap(std::move(m), MoebiusMap::Unchecked{});
}

MoebiusMap compose(const MoebiusMap& a, const MoebiusMap& b) {
    if (a.sphere_dim() != b.sphere_dim()) throw InputError("compose: dimension mismatch");
    MoebiusMap c(a.matrix() * b.matrix(), MoebiusMap::Unchecked{});
    if (c.lorentz_defect() > kCompositionTol) return reorthonormalized(c);
    return c;
}

SphereImage apply_sphere(const MoebiusMap& a, const Vec& x) {
    const int n = a.sphere_dim();
    if (x.size() != n + 1) throw InputError("apply_sphere: dimension mismatch");
    Vec lift(n + 2);
    lift << x, 1.0;
    const Vec y = a.matrix() * lift;
    const double t = y(n + 1);
    if (!(t > 0.0)) throw InvariantError("apply_sphere: nonpositive time component; map is not future-preserving");
    return {y.head(n + 1) / t, 1.0 / t};
}

SphereImage apply_sphere(const MoebiusMap& a, const SpherePoint& x) { return apply_sphere(a, x.coords()); }

BallPoint apply_ball(const MoebiusMap& a, const BallPoint& y) {
    const int n = a.sphere_dim();
    const Vec& p = y.coords();
    if (p.size() != n + 1) throw InputError("apply_ball: dimension mismatch");
    const double r2 = p.squaredNorm();
    Vec h(n + 2);
    h << 2.0 * p, 1.0 + r2;
    h /= (1.0 - r2);
    const Vec z = a.matrix() * h;
    Vec out = z.head(n + 1) / (1.0 + z(n + 1));
    // Rounding can push images of points extremely close to S^n onto it.
    const double norm = out.norm();
    if (norm >= 1.0) out *= std::nextafter(1.0, 0.0) / norm;
    return BallPoint(std::move(out));
}

// ------------------------------------------------- Generalized sphere reflection

GeneralizedSphereReflection GeneralizedSphereReflection::plane(Vec normal) {
    return GeneralizedSphereReflection(true, normal.normalized(), 0.0);
}

GeneralizedSphereReflection GeneralizedSphereReflection::sphere(Vec center, double radius) {
    if (!(radius > 0.0)) throw InputError("GeneralizedSphereReflection: radius must be positive");
    return GeneralizedSphereReflection(false, std::move(center), radius);
}

Vec GeneralizedSphereReflection::apply(const Vec& x) const {
    if (is_plane_) return x - 2.0 * x.dot(center_) * center_;
    const Vec d = x - center_;
    const double d2 = d.squaredNorm();
    if (d2 == 0.0) throw DomainError("GeneralizedSphereReflection: center maps to infinity");
    return center_ + (radius_ * radius_ / d2) * d;
}

GeneralizedSphereReflection orthogonal_extension_reflection(const HyperSphere& s) {
    const double c = std::cos(s.radius());
    if (std::abs(c) < 1e-14) return GeneralizedSphereReflection::plane(s.center());
    return GeneralizedSphereReflection::sphere(s.center() / c, std::abs(std::tan(s.radius())));
}

// ------------------------------------------------------------- Stereographic

Vec stereographic(const Vec& x) {
    const Eigen::Index n = x.size() - 1;
    const double denom = 1.0 - x(n);
    if (denom <= 1e-14) throw DomainError("stereographic: projection pole N has no image");
    return x.head(n) / denom;
}

Vec stereographic(const SpherePoint& x) { return stereographic(x.coords()); }

Vec stereographic_inverse(const Vec& z) {
    const double z2 = z.squaredNorm();
    Vec x(z.size() + 1);
    x << 2.0 * z, z2 - 1.0;
    return x / (z2 + 1.0);
}

// ------------------------------------------------------- Rotations and boosts

MoebiusMap rotation_between(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw InputError("rotation_between: dimension mismatch");
    if (std::abs(p.norm() - 1.0) > 1e-9 || std::abs(q.norm() - 1.0) > 1e-9) {
        throw InputError("rotation_between: p and q must be unit vectors");
    }
    const Eigen::Index d = p.size();
    const Vec pu = p.normalized();
    const Vec qu = q.normalized();
    const double c = std::clamp(pu.dot(qu), -1.0, 1.0);
    Vec u = qu - c * pu;
    double s = u.norm();
    if (s < 1e-12) {
        if (c > 0.0) return MoebiusMap::identity(static_cast<int>(d) - 1);
        u = perpendicular_to(pu);
        s = 0.0;
    } else {
        u /= s;
    }
    const double angle = std::atan2(s, c);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    Mat rot = Mat::Identity(d, d) + (ca - 1.0) * (pu * pu.transpose() + u * u.transpose()) +
              sa * (u * pu.transpose() - pu * u.transpose());
    Mat a = Mat::Identity(d + 1, d + 1);
    a.topLeftCorner(d, d) = rot;
    return MoebiusMap(std::move(a));
}

MoebiusMap axial_boost(const Vec& axis, double rapidity) {
    const Eigen::Index d = axis.size();
    if (std::abs(axis.norm() - 1.0) > 1e-9) throw InputError("axial_boost: axis must be a unit vector");
    Vec e = Vec::Zero(d + 1);
    e.head(d) = axis.normalized();
    Vec t = Vec::Zero(d + 1);
    t(d) = 1.0;
    Mat a = Mat::Identity(d + 1, d + 1) +
            (std::cosh(rapidity) - 1.0) * (e * e.transpose() + t * t.transpose()) +
            std::sinh(rapidity) * (e * t.transpose() + t * e.transpose());
    return MoebiusMap(std::move(a));
}

double boost_rapidity(double c, double c_target) {
    const double denom = 1.0 - c * c_target;
    if (!(denom > 0.0)) throw InputError("boost_rapidity: latitudes must lie in (-1, 1)");
    return std::atanh((c_target - c) / denom);
}

MoebiusMap cap_normalizer(const HyperSphere& source, const HyperSphere& target) {
    if (source.sphere_dim() != target.sphere_dim()) throw InputError("cap_normalizer: dimension mismatch");
    const MoebiusMap rot = rotation_between(source.center(), target.center());
    const double beta = boost_rapidity(std::cos(source.radius()), std::cos(target.radius()));
    if (beta == 0.0) return rot;
    return compose(axial_boost(target.center(), beta), rot);
}

HyperSphere image(const MoebiusMap& a, const HyperSphere& s) {
    return HyperSphere::from_spacelike(a.matrix() * s.spacelike());
}

HyperSphere preimage(const MoebiusMap& a, const HyperSphere& s) {
    return HyperSphere::from_spacelike(a.inverse().matrix() * s.spacelike());
}

}  // namespace confrig
