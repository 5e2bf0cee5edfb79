#pragma once

// End-to-end check of a scenario: hypothesis gates, cap gluing on the
// secondary holes, normalization of hole 0, transfer to B_r by
// stereographic projection, monotone solve, and the floor, Hopf and flux
// comparisons.

#include "confrig/cap_gluing.hpp"
#include "confrig/scenario.hpp"
#include "confrig/semilinear_solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace confrig {

inline constexpr const char* kClauseGeometry = "geometry: disjoint hole closures, empty limit set";

enum class Verdict { Rigid, NonRigid, HypothesisFail, SolverFail };
std::string to_string(Verdict v);
/// 0 RIGID, 1 NON_RIGID, 2 HYPOTHESIS_FAIL, 4 SOLVER_FAIL.
int exit_code(Verdict v);

struct GateResult {
    std::string name;
    std::string clause;
    bool pass = true;
    bool waived = false;
    double value = 0.0;
    double threshold = 0.0;
    double margin = 0.0;
    std::string detail;
};

struct HoleCheck {
    std::size_t hole = 0;
    GateResult scal;
    GateResult boundary;
    GateResult mean_curvature;
    /// Radius and scalar curvature of the round metric fitted to the
    /// induced boundary metric.
    double boundary_radius = 0.0;
    double boundary_scalar_curvature = 0.0;
    double boundary_fit_defect = 0.0;
    /// Largest relative spread over latitude spheres in the normalized frame.
    double radial_defect = 0.0;
};

struct HypothesisReport {
    bool pass = true;
    /// geometry, scal_bound, boundary_round, mean_curvature (aggregated over holes).
    std::vector<GateResult> gates;
    std::vector<HoleCheck> holes;
    /// Umbilicity is not measured: latitude spheres of radial fields are umbilic.
    bool umbilic_declared = true;
    /// Boundary gate by constant scalar curvature; roundness then rests on Obata's theorem.
    bool obata_assumption = false;
    bool mean_curvature_waived = false;
    std::vector<std::string> failed_clauses;
};

HypothesisReport check_hypotheses(const Scenario& s);

struct GluingReport {
    std::size_t hole = 0;
    bool glued = false;
    std::string failure;
    JumpReport jump;
    double min_residual = 0.0;
    double min_interface_residual = 0.0;
    std::size_t bumps = 0;
};

struct SolverDiagnostics {
    bool ran = false;
    std::string failure;
    /// "v" or "w_1/r" when v fails the supersolution check.
    std::string supersolution = "v";
    double boundary_value = 0.0;
    double boundary_scale = 1.0;
    double K = 0.0;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
    double residual = 0.0;
    int clamped_nodes = 0;
    int shift_doublings = 0;
    std::vector<double> change_history;
    bool increasing_ran = false;
    bool increasing_converged = false;
    int increasing_iterations = 0;
    double direction_agreement = 0.0;
};

struct Finding {
    std::size_t holes = 0;
    bool consistent = false;
    std::string broken_check;
    std::string detail;
};

struct RigidityReport {
    std::string scenario;
    int n = 3;
    double rho = 0.0;
    double r = 0.0;
    bool forced = false;
    HypothesisReport hypothesis;
    std::size_t holes_glued = 0;
    std::vector<GluingReport> gluing;
    bool primary_normalized = false;
    SolverDiagnostics solver;
    /// sup |v - w| for the transferred factor v.
    double gap = 0.0;
    /// sup |v' - w| for the solver output v'.
    double bvp_gap = 0.0;
    std::optional<double> hopf_gap;
    std::string hopf_note;
    FloorCheck floor;
    double mean_curvature = 0.0;
    FluxReport flux;
    Verdict verdict = Verdict::HypothesisFail;
    std::optional<Finding> finding;

    std::vector<double> radii;
    std::vector<double> v;
    std::vector<double> v_prime;
    std::vector<double> w;
    /// Normalized factor on [0, rho] about S.
    std::optional<RadialField> factor_profile;
};

RigidityReport run_rigidity(const Scenario& s);

}  // namespace confrig
