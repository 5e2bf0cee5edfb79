#include "confrig/report.hpp"
#include "confrig/rigidity_pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace confrig;

namespace {

constexpr double kPi = std::numbers::pi;

const GateResult& gate(const HypothesisReport& h, const std::string& name) {
    const auto it = std::find_if(h.gates.begin(), h.gates.end(), [&](const GateResult& g) { return g.name == name; });
    if (it == h.gates.end()) throw std::runtime_error("no gate " + name);
    return *it;
}

// u = 1 + a (cos theta - cos rho): boundary value 1, mean curvature
// cot(rho) - (2/(n-2)) a sin(rho).
Scenario shifted_h(int n, double rho, double a) {
    FactorSpec f;
    f.kind = FactorKind::Expression;
    std::ostringstream e;
    e.precision(17);
    e << "1 + " << a << "*(cos(theta) - cos(rho))";
    f.expression = e.str();
    return standard_scenario(n, rho, f);
}

}  // namespace

TEST(Hypotheses, RoundCapPasses) {
    const auto h = check_hypotheses(standard_scenario(3, kPi / 3));
    EXPECT_TRUE(h.pass);
    ASSERT_EQ(h.holes.size(), 1u);
    EXPECT_NEAR(h.holes[0].boundary_radius, 0.866025, 1e-6);
    EXPECT_NEAR(gate(h, "mean_curvature").value, 0.577350, 1e-6);
    EXPECT_NEAR(gate(h, "scal_bound").value, 6.0, 1e-6);
    EXPECT_TRUE(h.failed_clauses.empty());
    EXPECT_TRUE(h.umbilic_declared);
    EXPECT_FALSE(h.mean_curvature_waived);
}

TEST(Hypotheses, ScaledByOnePointOneFailsScal) {
    FactorSpec f;
    f.kind = FactorKind::Scaled;
    f.c = 1.1;
    const auto h = check_hypotheses(standard_scenario(3, kPi / 3, f));
    EXPECT_FALSE(h.pass);
    EXPECT_FALSE(gate(h, "scal_bound").pass);
    EXPECT_NE(std::find(h.failed_clauses.begin(), h.failed_clauses.end(), kClauseScal), h.failed_clauses.end());
}

TEST(Hypotheses, LowMeanCurvatureFails) {
    // H = cot(rho) - 0.05 with a round boundary of radius sin(rho).
    const double rho = kPi / 3;
    const int n = 3;
    const double a = 0.05 * (n - 2.0) / (2.0 * std::sin(rho));
    const auto h = check_hypotheses(shifted_h(n, rho, a));
    const GateResult& m = gate(h, "mean_curvature");
    EXPECT_FALSE(m.pass);
    EXPECT_NEAR(m.margin, -0.05, 1e-6);
    EXPECT_TRUE(gate(h, "boundary_round").pass);
    EXPECT_EQ(h.failed_clauses, std::vector<std::string>{kClauseMeanCurvature});
}

TEST(Hypotheses, HalfPiWaiver) {
    Scenario s = shifted_h(3, kPi / 2, 0.02);
    auto h = check_hypotheses(s);
    EXPECT_TRUE(h.mean_curvature_waived);
    EXPECT_TRUE(gate(h, "mean_curvature").waived);
    EXPECT_TRUE(gate(h, "mean_curvature").pass);
    EXPECT_LT(gate(h, "mean_curvature").value, 0.0);

    s.options.relax_mean_curvature_at_half_pi = false;
    h = check_hypotheses(s);
    EXPECT_FALSE(h.mean_curvature_waived);
    EXPECT_FALSE(gate(h, "mean_curvature").pass);
}

TEST(Hypotheses, ObataGate) {
    Scenario s = standard_scenario(4, kPi / 3);
    s.options.boundary_gate = BoundaryGate::ScalarCurvature;
    auto h = check_hypotheses(s);
    EXPECT_TRUE(h.obata_assumption);
    EXPECT_TRUE(gate(h, "boundary_round").pass);
    EXPECT_NEAR(gate(h, "boundary_round").value, 3.0 * 2.0 / 0.75, 1e-6);

    s.factor.kind = FactorKind::Scaled;
    s.factor.c = 1.05;
    h = check_hypotheses(s);
    EXPECT_FALSE(gate(h, "boundary_round").pass);
}

TEST(Hypotheses, ScaledBoundaryFailsRoundness) {
    FactorSpec f;
    f.kind = FactorKind::Scaled;
    f.c = 1.05;
    const auto h = check_hypotheses(standard_scenario(3, kPi / 4, f));
    EXPECT_FALSE(gate(h, "boundary_round").pass);
    EXPECT_NEAR(h.holes[0].boundary_radius, 1.05 * 1.05 * std::sin(kPi / 4), 1e-6);
}

TEST(Pipeline, StandardCapIsRigid) {
    for (int n : {3, 4}) {
        const auto r = run_rigidity(standard_scenario(n, kPi / 2));
        EXPECT_EQ(r.verdict, Verdict::Rigid) << n;
        EXPECT_LE(r.gap, 1e-6);
        EXPECT_LE(r.bvp_gap, 1e-5);
        ASSERT_TRUE(r.hopf_gap.has_value());
        EXPECT_LE(std::abs(*r.hopf_gap), 1e-5);
        EXPECT_DOUBLE_EQ(r.r, 1.0);
        EXPECT_TRUE(r.floor.pass);
        EXPECT_FALSE(r.finding.has_value());
    }
}

TEST(Pipeline, BubblePullbackIsRigid) {
    Scenario s = standard_scenario(3, kPi / 3);
    s.factor.kind = FactorKind::Bubble;
    s.factor.rapidity = 0.5;
    s = pulled_back(s, random_moebius(3, 11, 3));
    s.options.grid_size = 2048;
    const auto r = run_rigidity(s);
    EXPECT_TRUE(r.hypothesis.pass);
    EXPECT_EQ(r.verdict, Verdict::Rigid);
    EXPECT_LE(r.gap, 1e-5);
    EXPECT_TRUE(r.primary_normalized);
}

TEST(Pipeline, MoebiusInvariance) {
    const Scenario base = [] {
        Scenario s = standard_scenario(4, kPi / 3);
        s.options.grid_size = 1024;
        return s;
    }();
    const auto r0 = run_rigidity(base);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto r = run_rigidity(pulled_back(base, random_moebius(4, seed, 2)));
        EXPECT_EQ(r.verdict, r0.verdict) << seed;
        EXPECT_LE(std::abs(r.gap - r0.gap), 2 * base.options.gap_tol) << seed;
        EXPECT_LE(std::abs(r.bvp_gap - r0.bvp_gap), 2 * base.options.gap_tol) << seed;
    }
}

TEST(Pipeline, ScaledBoundaryForcedIsNonRigid) {
    FactorSpec f;
    f.kind = FactorKind::Scaled;
    f.c = 1.05;
    Scenario s = standard_scenario(3, kPi / 4, f);
    s.options.grid_size = 1024;
    auto r = run_rigidity(s);
    EXPECT_EQ(r.verdict, Verdict::HypothesisFail);
    EXPECT_FALSE(r.solver.ran);

    s.options.force = true;
    r = run_rigidity(s);
    EXPECT_EQ(r.verdict, Verdict::NonRigid);
    EXPECT_TRUE(r.forced);
    EXPECT_GE(r.bvp_gap, 1e-3);
    EXPECT_EQ(r.solver.supersolution, "w_1/r");
}

TEST(Pipeline, VerdictNeverNonRigidWhenHypothesesHold) {
    // Increasing H beyond cot(rho) or decreasing it: the verdict is RIGID or
    // a hypothesis failure, never NON_RIGID for an unforced run.
    for (double a : {-0.1, -0.02, 0.0, 0.02, 0.1}) {
        Scenario s = shifted_h(3, kPi / 3, a);
        s.options.grid_size = 1024;
        const auto r = run_rigidity(s);
        EXPECT_NE(r.verdict, Verdict::NonRigid) << a;
        if (r.hypothesis.pass) EXPECT_EQ(r.verdict, Verdict::Rigid) << a;
    }
}

TEST(Pipeline, TwoHolesFinding) {
    Scenario s = standard_scenario(3, kPi / 3);
    s.base_holes.push_back(HyperSphere(south_pole(3), 0.2));
    s.options.grid_size = 1024;
    auto r = run_rigidity(s);
    EXPECT_EQ(r.verdict, Verdict::HypothesisFail);

    s.options.force = true;
    r = run_rigidity(s);
    ASSERT_TRUE(r.finding.has_value());
    EXPECT_EQ(r.finding->holes, 2u);
    EXPECT_NE(r.finding->broken_check.find("hole 1"), std::string::npos) << r.finding->broken_check;
}

TEST(Report, JsonIsDeterministic) {
    Scenario s = standard_scenario(3, kPi / 3);
    s.options.grid_size = 512;
    const std::string a = dump(Json{{"scenario", scenario_summary(s)}, {"report", to_json(run_rigidity(s))}});
    const std::string b = dump(Json{{"scenario", scenario_summary(s)}, {"report", to_json(run_rigidity(s))}});
    EXPECT_EQ(a, b);
    const Json j = Json::parse(a);
    EXPECT_EQ(j["report"]["verdict"], "RIGID");
}

TEST(Report, HypothesisFailNamesClause) {
    FactorSpec f;
    f.kind = FactorKind::Scaled;
    f.c = 1.1;
    Scenario s = standard_scenario(3, kPi / 3, f);
    s.options.grid_size = 512;
    const Json j = to_json(run_rigidity(s));
    EXPECT_EQ(j["verdict"], "HYPOTHESIS_FAIL");
    const std::string text = j.dump();
    EXPECT_NE(text.find(kClauseScal), std::string::npos);
}

TEST(Report, CsvFactorRoundTrip) {
    Scenario s = standard_scenario(3, kPi / 3);
    s.factor.kind = FactorKind::Bubble;
    s.factor.rapidity = 0.3;
    s.options.grid_size = 512;
    const auto r = run_rigidity(s);
    ASSERT_TRUE(r.factor_profile.has_value());

    const auto dir = std::filesystem::temp_directory_path() / "confrig_roundtrip";
    std::filesystem::remove_all(dir);
    const auto files = emit_report(r, s, dir, "csv");
    EXPECT_EQ(files.size(), 3u);
    {
        std::ofstream y(dir / "again.yaml");
        y << "dimension: 3\ngeometry: {rho: pi/3}\nfactor: {csv: factor_profile.csv}\nsolver: {grid_size: 512}\n";
    }
    const Scenario back = load_scenario(dir / "again.yaml");
    const RadialField& p = *r.factor_profile;
    const SphereField u = back.field();
    for (std::size_t i = 0; i < p.values().size(); i += 37) {
        const double t = p.grid().node(i);
        Vec x(4);
        x << std::sin(t), 0, 0, -std::cos(t);
        EXPECT_NEAR(u(x), p.values()[i], 1e-14) << t;
    }
    const auto r2 = run_rigidity(back);
    EXPECT_EQ(r2.verdict, r.verdict);
}
