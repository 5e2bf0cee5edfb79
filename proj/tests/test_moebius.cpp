#include "confrig/errors.hpp"
#include "confrig/moebius.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace confrig;
using confrig::testing::random_map;
using confrig::testing::random_sphere;
using confrig::testing::random_unit;
using confrig::testing::uniform;
constexpr double pi = std::numbers::pi;

TEST(MinkowskiForm, SignatureAndNullLift) {
    MinkowskiForm q(3);
    Vec x = Vec::Zero(5);
    x << 1, 2, 3, 4, 5;
    EXPECT_DOUBLE_EQ(q.norm2(x), 1 + 4 + 9 + 16 - 25);
    SpherePoint p(basis_vector(4, 2));
    EXPECT_NEAR(q.norm2(p.lift()), 0.0, 1e-15);
}

TEST(HyperSphere, SpacelikeVectorIsUnit) {
    std::mt19937_64 rng(3);
    MinkowskiForm q(3);
    for (int i = 0; i < 20; ++i) {
        const auto s = random_sphere(rng, 3);
        EXPECT_NEAR(q.norm2(s.spacelike()), 1.0, 1e-12);
        const auto r = HyperSphere::from_spacelike(3.7 * s.spacelike());
        EXPECT_NEAR((r.center() - s.center()).norm(), 0.0, 1e-12);
        EXPECT_NEAR(r.radius(), s.radius(), 1e-12);
        for (const auto& b : s.sample_boundary(10)) {
            EXPECT_NEAR(b.norm(), 1.0, 1e-12);
            EXPECT_TRUE(s.on_sphere(b));
            EXPECT_NEAR(b.dot(s.center()), std::cos(s.radius()), 1e-12);
        }
    }
}

TEST(HyperSphere, RejectsBadInput) {
    EXPECT_THROW(HyperSphere(Vec::Ones(3), 0.5), InputError);
    EXPECT_THROW(HyperSphere(north_pole(2), 0.0), InputError);
    EXPECT_THROW(HyperSphere(north_pole(2), pi), InputError);
}

TEST(SphereReflection, EquatorFlipsLastCoordinate) {
    const int n = 3;
    const auto r = sphere_reflection(HyperSphere(north_pole(n), pi / 2));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) {
        const Vec x = random_unit(rng, n + 1);
        const auto im = apply_sphere(r, x);
        Vec expect = x;
        expect(n) = -x(n);
        EXPECT_NEAR((im.point - expect).norm(), 0.0, 1e-13);
        EXPECT_NEAR(im.factor, 1.0, 1e-13);
    }
    const auto fixed = apply_sphere(r, basis_vector(n + 1, 0));
    EXPECT_NEAR((fixed.point - basis_vector(n + 1, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(fixed.factor, 1.0, 1e-15);
}

TEST(SphereReflection, InvolutionForRandomSpheres) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const int n = 2 + i % 4;
        const auto r = sphere_reflection(random_sphere(rng, n, 0.3, pi - 0.3));
        const Mat sq = r.matrix() * r.matrix();
        EXPECT_LE((sq - Mat::Identity(n + 2, n + 2)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SphereReflection, FixesBoundaryOfPiOverThreeCap) {
    const HyperSphere s(north_pole(2), pi / 3);
    const auto r = sphere_reflection(s);
    for (const auto& b : s.sample_boundary(16)) {
        const auto im = apply_sphere(r, b);
        EXPECT_NEAR((im.point - b).norm(), 0.0, 1e-12);
    }
    // Off the sphere the point moves and swaps sides.
    const auto im = apply_sphere(r, north_pole(2));
    EXPECT_GT(im.point.norm(), 0.0);
    EXPECT_LT(s.side(im.point), 0.0);
}

TEST(Compose, IdentityAndInvolution) {
    std::mt19937_64 rng(4);
    const auto a = random_map(rng, 3, 5);
    const auto ai = compose(a, MoebiusMap::identity(3));
    EXPECT_LE((ai.matrix() - a.matrix()).cwiseAbs().maxCoeff(), 1e-14);
    const auto r = sphere_reflection(random_sphere(rng, 3));
    EXPECT_LE((compose(r, r).matrix() - Mat::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(compose(a, MoebiusMap::identity(2)), InputError);
}

TEST(Compose, ConcentricReflectionsFixPoles) {
    const int n = 3;
    const auto r1 = sphere_reflection(HyperSphere(north_pole(n), 0.7));
    const auto r2 = sphere_reflection(HyperSphere(north_pole(n), 1.1));
    const auto m = compose(r1, r2);
    EXPECT_GT((m.matrix() - Mat::Identity(n + 2, n + 2)).norm(), 0.1);
    for (const Vec& pole : {north_pole(n), south_pole(n)}) {
        const auto im = apply_sphere(m, pole);
        EXPECT_NEAR((im.point - pole).norm(), 0.0, 1e-12);
    }
    const Vec x = basis_vector(n + 1, 0);
    EXPECT_GT((apply_sphere(m, x).point - x).norm(), 1e-3);
}

TEST(Compose, LongChainsStayLorentz) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_map(rng, 4, 100);
        EXPECT_LE(m.lorentz_defect(), 1e-9 * std::max(1.0, m.matrix().squaredNorm()));
        EXPECT_GT(m.time_orientation(), 0.0);
    }
}

TEST(Compose, ReorthonormalizeRepairsDrift) {
    std::mt19937_64 rng(6);
    const auto m = random_map(rng, 3, 4);
    Mat drifted = m.matrix();
    drifted(0, 1) += 1e-7;
    const auto fixed = reorthonormalized(MoebiusMap(drifted, 1e-5));
    EXPECT_LE(fixed.lorentz_defect(), 1e-12);
    EXPECT_LE((fixed.matrix() - m.matrix()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MoebiusMap, RejectsNonLorentzAndTimeReversing) {
    Mat bad = Mat::Identity(4, 4);
    bad(0, 0) = 2.0;
    EXPECT_THROW(MoebiusMap{bad}, InvariantError);
    Mat flip = Mat::Identity(4, 4);
    flip(3, 3) = -1.0;
    EXPECT_THROW(MoebiusMap{flip}, InvariantError);
}

TEST(ApplySphere, IdentityAndInverse) {
    std::mt19937_64 rng(7);
    const auto a = random_map(rng, 3, 6);
    for (int i = 0; i < 20; ++i) {
        const Vec x = random_unit(rng, 4);
        const auto id = apply_sphere(MoebiusMap::identity(3), x);
        EXPECT_NEAR((id.point - x).norm(), 0.0, 1e-15);
        EXPECT_DOUBLE_EQ(id.factor, 1.0);
        const auto y = apply_sphere(a, x);
        const auto back = apply_sphere(a.inverse(), y.point);
        EXPECT_NEAR((back.point - x).norm(), 0.0, 1e-10);
        EXPECT_NEAR(back.factor * y.factor, 1.0, 1e-10);
    }
}

TEST(ApplySphere, FactorMatchesFiniteDifference) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_map(rng, 3, 3);
        const Vec x = random_unit(rng, 4);
        const Vec d = random_unit(rng, 4);
        const double fd = confrig::testing::finite_difference_factor(a, x, d);
        EXPECT_NEAR(apply_sphere(a, x).factor, fd, 1e-6 * fd);
    }
}

TEST(ApplySphere, CocycleForRandomTriples) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const int n = 2 + i % 4;
        const auto a = random_map(rng, n, 1 + i % 7);
        const auto b = random_map(rng, n, 1 + (i / 7) % 7);
        const Vec x = random_unit(rng, n + 1);
        const auto bx = apply_sphere(b, x);
        const double lhs = apply_sphere(compose(a, b), x).factor;
        const double rhs = apply_sphere(a, bx.point).factor * bx.factor;
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(ApplyBall, IdentityOriginAndBoundaryLimit) {
    const int n = 3;
    std::mt19937_64 rng(10);
    const Vec y = 0.4 * random_unit(rng, n + 1);
    EXPECT_NEAR((apply_ball(MoebiusMap::identity(n), BallPoint(y)).coords() - y).norm(), 0.0, 1e-14);
    const auto eq = sphere_reflection(HyperSphere(north_pole(n), pi / 2));
    EXPECT_NEAR(apply_ball(eq, BallPoint(Vec::Zero(n + 1))).coords().norm(), 0.0, 1e-15);

    const auto r = sphere_reflection(HyperSphere(random_unit(rng, n + 1), 0.9));
    const Vec x = random_unit(rng, n + 1);
    const Vec target = apply_sphere(r, x).point;
    double prev = 1e9;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const Vec img = apply_ball(r, BallPoint((1.0 - d) * x)).coords();
        EXPECT_LT(img.norm(), 1.0);
        const double err = (img - target).norm();
        EXPECT_LE(err, 50.0 * d);
        EXPECT_LT(err, prev);
        prev = err;
    }
}

TEST(ApplyBall, RejectsOutsidePoint) { EXPECT_THROW(BallPoint(Vec::Ones(3)), InputError); }

TEST(OrthogonalExtension, EquatorIsPlane) {
    const auto g = orthogonal_extension_reflection(HyperSphere(north_pole(3), pi / 2));
    EXPECT_TRUE(g.is_plane());
    Vec x(4);
    x << 0.1, 0.2, 0.3, 0.4;
    const Vec y = g.apply(x);
    EXPECT_NEAR(y(3), -0.4, 1e-15);
    EXPECT_NEAR(y(0), 0.1, 1e-15);
}

TEST(OrthogonalExtension, QuarterCapCenterAndRadius) {
    const int n = 3;
    const auto g = orthogonal_extension_reflection(HyperSphere(north_pole(n), pi / 4));
    ASSERT_FALSE(g.is_plane());
    EXPECT_NEAR((g.center() - std::sqrt(2.0) * north_pole(n)).norm(), 0.0, 1e-14);
    EXPECT_NEAR(g.radius(), 1.0, 1e-14);
    EXPECT_NEAR(g.center().squaredNorm(), 1.0 + g.radius() * g.radius(), 1e-13);
}

TEST(OrthogonalExtension, AgreesWithPoincareExtension) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
        const int n = 2 + k % 3;
        const auto s = random_sphere(rng, n, 0.3, pi - 0.3);
        const auto r = sphere_reflection(s);
        const auto g = orthogonal_extension_reflection(s);
        for (int i = 0; i < 50; ++i) {
            const Vec y = uniform(rng, 0.0, 0.95) * random_unit(rng, n + 1);
            const Vec a = apply_ball(r, BallPoint(y)).coords();
            const Vec b = g.apply(y);
            EXPECT_NEAR((a - b).norm(), 0.0, 1e-10);
        }
    }
}

TEST(Stereographic, PolesAndRoundTrip) {
    const int n = 3;
    EXPECT_NEAR(stereographic(south_pole(n)).norm(), 0.0, 1e-15);
    EXPECT_THROW(stereographic(north_pole(n)), DomainError);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 50; ++i) {
        const Vec x = random_unit(rng, n + 1);
        EXPECT_NEAR((stereographic_inverse(stereographic(x)) - x).norm(), 0.0, 1e-12);
    }
}

TEST(Stereographic, CapBoundaryRadius) {
    for (double rho : {pi / 2, pi / 3, 0.4}) {
        const HyperSphere s(south_pole(3), rho);
        for (const auto& b : s.sample_boundary(20)) {
            EXPECT_NEAR(stereographic(b).norm(), std::tan(rho / 2), 1e-12);
        }
    }
    const HyperSphere third(south_pole(2), pi / 3);
    EXPECT_NEAR(stereographic(third.sample_boundary(1).front()).norm(), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(RotationBetween, IdentityIsometryAntipodal) {
    const int n = 3;
    const Vec e1 = basis_vector(n + 1, 0);
    const Vec e2 = basis_vector(n + 1, 1);
    EXPECT_LE((rotation_between(e1, e1).matrix() - Mat::Identity(n + 2, n + 2)).cwiseAbs().maxCoeff(), 1e-15);

    const auto r = rotation_between(e1, e2);
    EXPECT_NEAR((apply_sphere(r, e1).point - e2).norm(), 0.0, 1e-14);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        EXPECT_NEAR(apply_sphere(r, random_unit(rng, n + 1)).factor, 1.0, 1e-14);
    }

    const Vec p = random_unit(rng, n + 1);
    const auto anti = rotation_between(p, -p);
    EXPECT_NEAR((apply_sphere(anti, p).point + p).norm(), 0.0, 1e-12);
    const Mat q = anti.matrix().topLeftCorner(n + 1, n + 1);
    EXPECT_LE((q.transpose() * q - Mat::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(q.determinant(), 1.0, 1e-12);
}

TEST(AxialBoost, MovesLatitudeAsPredicted) {
    const int n = 3;
    const Vec axis = north_pole(n);
    const double c = std::cos(1.0);
    const double ct = std::cos(0.4);
    const auto b = axial_boost(axis, boost_rapidity(c, ct));
    const HyperSphere lat(axis, 1.0);
    for (const auto& x : lat.sample_boundary(12)) {
        EXPECT_NEAR(apply_sphere(b, x).point.dot(axis), ct, 1e-12);
    }
    for (const Vec& fixed : {axis, Vec(-axis)}) {
        EXPECT_NEAR((apply_sphere(b, fixed).point - fixed).norm(), 0.0, 1e-12);
    }
}

TEST(CapNormalizer, SameCapIsIsometry) {
    const HyperSphere s(basis_vector(4, 1), 0.8);
    const auto m = cap_normalizer(s, s);
    for (const auto& b : s.sample_boundary(10)) {
        const auto im = apply_sphere(m, b);
        EXPECT_TRUE(s.on_sphere(im.point, 1e-12));
        EXPECT_NEAR(im.factor, 1.0, 1e-12);
    }
}

TEST(CapNormalizer, LandsOnTargetBoundary) {
    const int n = 3;
    const HyperSphere equator(north_pole(n), pi / 2);
    const HyperSphere src(basis_vector(n + 1, 0), pi / 6);
    const auto m = cap_normalizer(src, equator);
    for (const auto& b : src.sample_boundary(20)) {
        EXPECT_NEAR(apply_sphere(m, b).point.dot(north_pole(n)), 0.0, 1e-10);
    }
    // interior goes to interior
    EXPECT_GT(equator.side(apply_sphere(m, src.center()).point), 0.0);

    const HyperSphere target(north_pole(n), pi - pi / 3);
    for (double eps : {0.1, 0.5, 1.0}) {
        const HyperSphere hole(basis_vector(n + 1, 2), eps);
        const auto a = cap_normalizer(hole, target);
        for (const auto& b : hole.sample_boundary(20)) {
            EXPECT_TRUE(target.on_sphere(apply_sphere(a, b).point, 1e-10));
        }
        const auto img = image(a, hole);
        EXPECT_NEAR((img.center() - target.center()).norm(), 0.0, 1e-9);
        EXPECT_NEAR(img.radius(), target.radius(), 1e-9);
    }
}

TEST(ImagePreimage, AreInverse) {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_map(rng, 3, 4);
        const auto s = random_sphere(rng, 3);
        const auto t = image(a, s);
        for (const auto& b : s.sample_boundary(8)) {
            EXPECT_TRUE(t.on_sphere(apply_sphere(a, b).point, 1e-9));
        }
        EXPECT_GT(t.side(apply_sphere(a, s.center()).point), 0.0);
        const auto back = preimage(a, t);
        EXPECT_NEAR((back.center() - s.center()).norm(), 0.0, 1e-9);
        EXPECT_NEAR(back.radius(), s.radius(), 1e-9);
    }
}
