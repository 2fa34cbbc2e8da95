#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "osp/profile.hpp"
#include "osp/types.hpp"

namespace osp {

// Piecewise-linear integration contour in the complex x-plane. The branch of
// sqrt(q(x) - lambda) starts from the principal value at the first waypoint
// unless `continued_from` pins it to a previously computed value there.
struct PathSpec {
    struct Continuation {
        Complex point;  // must coincide with the first waypoint
        Complex value;  // branch value of sqrt(q - lambda) at that point
    };

    std::vector<Complex> waypoints;  // at least 2, consecutive entries distinct
    std::optional<Continuation> continued_from;
};

struct ActionValue {
    Complex value;
    Complex lambda;
    std::uint64_t path_hash = 0;  // opaque identifier of the integration path
};

// Integral of the branch-tracked sqrt(q(x) - lambda) along the path.
// Adaptive Gauss-Legendre (order 32 per subsegment, halving until successive
// refinements agree to 1e-12); branch continued between samples, rejecting
// steps whose argument jumps by pi/2 or more. Throws PathThroughTurningPoint
// when the contour comes within 1e-10 of a turning point and BranchAmbiguity
// when subdivision cannot restore branch continuity.
ActionValue integrate_action(const QuadraticProfile& p, Complex lambda,
                             const PathSpec& path);

// Action along the straight segment between the two turning points, with the
// branch normalized so the result has non-negative imaginary part (positive
// real part when purely real). Throws DegenerateTurningPoints when the
// turning points collide.
ActionValue action_between_turning_points(const QuadraticProfile& p,
                                          Complex lambda);

// Integral along the straight segment [from, to] where either endpoint may be
// a turning point of q - lambda (an integrable sqrt singularity). The
// integral is truncated at radius `radius` and `radius/2` from each singular
// end and Richardson-extrapolated (the truncation error scales like r^{3/2}).
// The branch is anchored to the principal value of sqrt(q - lambda) at the
// `anchor_at_from` end, which must not be singular unless both ends are.
Complex integrate_segment_with_turning_endpoints(const QuadraticProfile& p,
                                                 Complex lambda, Complex from,
                                                 Complex to, bool singular_from,
                                                 bool singular_to,
                                                 bool anchor_at_from,
                                                 double radius = 1e-6);

}  // namespace osp
