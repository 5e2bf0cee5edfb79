#pragma once

// Scenario description: a conformal factor u on C = S^n minus open caps,
// with g = u^{4/(n-2)} g_round. Hole 0 is the boundary the pipeline
// normalizes; the others are filled by cap gluing.
//
// File format (YAML, unknown keys are errors):
//
//   name: optional label
//   dimension: 3
//   geometry:
//     rho: pi/3                       # number or expression in n
//     holes:                          # default: one hole D_{pi-rho}(N)
//       - {center: N, radius: pi - rho}
//     limit_points: []                # must be empty
//     pullback: {seed: 7, reflections: 3}   # optional random Moebius pullback
//   factor:
//     builtin: round | scaled | bubble | perturbed
//     c: 1.05                         # scaled
//     rapidity: 0.4                   # bubble
//     amplitude: 0.1                  # perturbed
//     mode: 2                         # perturbed
//     expression: "1 + 0.1*(cos(theta) - cos(rho))"   # instead of builtin
//     csv: profile.csv                # instead of builtin; relative to the file
//     pole: S                         # center of the radial coordinate theta
//   solver:
//     grid_size: 4096
//     tol: 1e-5                       # gap and Hopf tolerance
//     hypothesis_tol: 1e-6
//     max_iters: 200
//     force: false
//     relax_mean_curvature_at_half_pi: true
//     boundary_gate: isometry | scalar_curvature
//     both_directions: true
//   output:
//     format: json | csv
//     directory: out
//
// Points are N, S, e1 ... e{n+1} (optionally negated), or coordinate lists.

#include "confrig/conformal_fields.hpp"
#include "confrig/moebius.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace confrig {

enum class FactorKind { Round, Scaled, Bubble, Perturbed, Expression, Csv };
std::string to_string(FactorKind k);

struct FactorSpec {
    FactorKind kind = FactorKind::Round;
    double c = 1.0;
    double rapidity = 0.0;
    double amplitude = 0.0;
    int mode = 1;
    std::string expression;
    std::string csv_path;
    /// Grid values read from csv_path (coordinate = angle from the pole).
    std::vector<double> csv_coordinates;
    std::vector<double> csv_values;
    /// Pole of the radial coordinate; empty means S.
    Vec pole;
};

enum class BoundaryGate { Isometry, ScalarCurvature };

struct PipelineOptions {
    int grid_size = 4096;
    double gap_tol = 1e-5;
    double hopf_tol = 1e-5;
    double hypothesis_tol = 1e-6;
    int max_iters = 200;
    bool force = false;
    bool relax_mean_curvature_at_half_pi = true;
    BoundaryGate boundary_gate = BoundaryGate::Isometry;
    bool both_directions = true;
};

struct OutputOptions {
    std::string format = "json";
    std::string directory;
};

struct RandomPullback {
    std::uint64_t seed = 0;
    int reflections = 0;
};

struct Scenario {
    std::string name;
    int n = 3;
    double rho = 0.0;
    /// Holes in the frame where the factor is defined.
    std::vector<HyperSphere> base_holes;
    std::vector<Vec> limit_points;
    FactorSpec factor;
    std::optional<RandomPullback> random_pullback;
    /// Extra pullback applied to the whole scenario (identity unless set).
    std::optional<MoebiusMap> transform;
    PipelineOptions options;
    OutputOptions output;

    /// Map T with g = T^* g_base; holes are the preimages of base_holes.
    MoebiusMap total_transform() const;
    std::vector<HyperSphere> holes() const;
    /// u as a function on S^n (defined off the holes).
    SphereField field() const;
};

/// Default primary hole D_{pi-rho}(N).
HyperSphere standard_hole(int n, double rho);

/// Product of `reflections` reflections in random hyperspheres of radius
/// near pi/2; deterministic in the seed.
MoebiusMap random_moebius(int n, std::uint64_t seed, int reflections);

/// Scenario pulled back by a: factor becomes (u o a) lambda_a^{(n-2)/2}.
Scenario pulled_back(const Scenario& s, const MoebiusMap& a);

/// Checks the scenario invariants and throws InputError listing every
/// violation as "<field path>: <message> [<constraint>]".
void validate_scenario(const Scenario& s);

/// Values substituted for the file's dimension and geometry.rho before
/// anything that depends on them is evaluated.
struct ScenarioOverrides {
    std::optional<int> n;
    std::optional<double> rho;
};

Scenario parse_scenario(const std::string& yaml_text, const std::filesystem::path& base_dir = {},
                        const ScenarioOverrides& overrides = {});
Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

/// Convenience constructors for programmatic scenarios.
Scenario standard_scenario(int n, double rho, FactorSpec factor = {});

}  // namespace confrig
