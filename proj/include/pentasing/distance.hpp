// Closest-singularity solvers: pedal points on the singularity variety under
// four regimes (fixed orientation, fixed position, full configuration-space
// metric, equiform relaxation) plus the anchor-averaged metric itself.

#ifndef PENTASING_DISTANCE_HPP
#define PENTASING_DISTANCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pentasing/pentapod.hpp"

namespace pentasing::distance {

using pentapod::Architecture;
using pentapod::Configuration;
using pentapod::SingularityModel;

enum class Mode { fixed_orientation, fixed_position, general, equiform };

// Coefficients of the configuration-space metric induced by averaging the
// squared anchor displacements: d^2 = |dp|^2 + 2 mean_r (dp.di) + mean_r2 |di|^2.
struct MetricContext {
    double mean_r = 0;
    double mean_r2 = 0;

    // Throws degenerate_error unless mean_r2 > mean_r^2 (positive definite).
    static MetricContext from(const Architecture& arch);

    double d2(const Eigen::Vector3d& dp, const Eigen::Vector3d& di) const {
        return dp.squaredNorm() + 2 * mean_r * dp.dot(di) + mean_r2 * di.squaredNorm();
    }
};

struct PedalPoint {
    Configuration pose;  // orientation norm differs from 1 only in equiform mode
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::optional<double> mu;  // equiform scaling factor = |(u,v,w)|
    double distance = 0;       // length l, spherical angle in degrees, or metric d
    double residual = 0;       // max normalized KKT equation residual
    bool is_real = true;
};

struct PedalSet {
    Mode mode = Mode::general;
    std::vector<PedalPoint> points;  // ascending by distance, ties pose-lexicographic
    std::optional<int> complex_count;
    std::vector<std::string> warnings;
};

struct SolveOptions {
    std::uint64_t seed = 0;
    int starts = 5000;
    double box = 0;      // position sampling half-width; 0 = 3x the fixed-orientation minimum
    double tol = 1e-10;  // normalized KKT residual acceptance
};

// Anchor-averaged distance between two configurations (the direct sum form;
// agrees with MetricContext::d2 to roundoff).
double metric_d(const Architecture& arch, const Configuration& c1, const Configuration& c2);

// Pedal points of g's position on the orientation quadric; distance is the
// translation length. Multiplier polynomial built exactly and degree-6 solved.
PedalSet closest_fixed_orientation(const SingularityModel& model, const Architecture& arch,
                                   const Configuration& g);

// Spherical pedal points of g's orientation on the position cone cut with the
// unit sphere; distance is the enclosed angle in degrees. Resultant cascade
// down to a degree-8 univariate, with a multistart fallback on non-generic
// instances.
PedalSet closest_fixed_position(const SingularityModel& model, const Architecture& arch,
                                const Configuration& g);

// Stationary points of the metric distance subject to F = 0 and |i| = 1,
// found by deterministic multistart damped Newton on the 8-equation system.
PedalSet closest_general(const SingularityModel& model, const Architecture& arch,
                         const Configuration& g, const SolveOptions& opts = {});

// Same with the unit-norm constraint dropped (7 equations); reports the
// platform scaling mu per point. The minimum bounds the general one from below.
PedalSet closest_equiform(const SingularityModel& model, const Architecture& arch,
                          const Configuration& g, const SolveOptions& opts = {});

// Minimizer distance of the selected mode: radius of the maximal
// singularity-free sphere (guaranteed-safe radius in equiform mode).
double singularity_free_radius(const SingularityModel& model, const Architecture& arch,
                               const Configuration& g, Mode mode, const SolveOptions& opts = {});

// Checks that no feasible perturbation of magnitude `step` around the point
// (projected back onto the mode's constraint set) comes closer to g.
bool is_local_min(const SingularityModel& model, const Architecture& arch, const Configuration& g,
                  const PedalPoint& point, Mode mode, std::uint64_t seed = 0, int samples = 100,
                  double step = 1e-3);

}  // namespace pentasing::distance

#endif
