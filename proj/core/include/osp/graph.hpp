#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osp/action.hpp"
#include "osp/profile.hpp"
#include "osp/types.hpp"

namespace osp {

// Symbolic integration endpoints; declaration order fixes the canonical
// orientation of action terms (left_end < x1 < x2 < right_end).
enum class EndpointToken { left_end, x1, x2, right_end };

struct ActionTerm {
    EndpointToken from = EndpointToken::left_end;
    EndpointToken to = EndpointToken::right_end;
    Complex coeff{1.0, 0.0};
};

enum class ConstraintKind {
    real_part_zero,
    imag_part_zero,
    real_part_equals,
    imag_part_equals,
};

struct CurveCondition {
    std::string id;
    std::vector<ActionTerm> terms;
    ConstraintKind kind = ConstraintKind::real_part_zero;
    double value = 0.0;          // right-hand side of the *_equals constraints
    Rect domain;                 // tracing window in the lambda-plane
    std::vector<Complex> seeds;  // optional extra seeds beyond the automatic ones
};

enum class CountPart { modulus, imag, real };

struct CountingLaw {
    std::string condition_id;
    double kappa = M_1_PI;
    CountPart part = CountPart::imag;
};

struct LimitCurve {
    std::string condition_id;
    std::vector<Complex> points;    // consecutive points distinct
    std::vector<double> arclength;  // cumulative, arclength[0] == 0
    std::vector<Complex> action;    // combined action F(lambda) at each point
};

struct LimitGraph {
    QuadraticProfile profile;
    std::vector<LimitCurve> curves;
    std::vector<Complex> vertices;
    std::vector<std::string> untraced;  // condition ids that produced no curve
};

// Combined action F(lambda) = sum coeff * S_{a,b}(lambda) and the constraint
// residual g(lambda). Terms are evaluated in canonical endpoint orientation
// (reversed terms contribute with opposite sign, so a term plus its reversal
// cancels exactly); for the sign-invariant zero constraints F is normalized
// to non-negative imaginary part (real constraint) or real part (imaginary
// constraint). Errors from turning-point resolution and quadrature propagate;
// near-degenerate turning points (|x1 - x2| < 1e-4, vertex zones) are
// rejected with DegenerateTurningPoints when a term references them.
struct ConditionValue {
    Complex F;
    double g = 0.0;
};
ConditionValue condition_value(const CurveCondition& cond,
                               const QuadraticProfile& p, Complex lambda);

struct TraceOptions {
    double step = 0.01;
    int max_points = 4000;
    Rect domain{-4.0, 4.0, -4.0, 0.05};
    std::vector<Complex> stop_points;  // tracing stops and refines toward these
    double newton_tol = 1e-10;
};

// Pseudo-arclength predictor-corrector on g(lambda) = 0, traced in both
// directions from the seed. Throws SeedNotOnCurve when Newton from the seed
// does not converge and SingularGradient when the gradient vanishes there.
LimitCurve trace_curve(const CurveCondition& cond, const QuadraticProfile& p,
                       Complex seed, const TraceOptions& opts);

// Generic zero-set tracer behind trace_curve, exposed so synthetic constraint
// functions can exercise the tracing logic. The callable returns {g, F} and
// may throw Error to mark a point as unevaluable.
struct TracedPath {
    std::vector<Complex> points;
    std::vector<Complex> values;
};
TracedPath trace_zero_set(
    const std::function<std::pair<double, Complex>(Complex)>& eval, Complex seed,
    const TraceOptions& opts);

struct AssembleOptions {
    TraceOptions trace;
    int circle_seed_count = 8;
    double circle_radius = 0.05;
    int scan_grid = 24;                // fallback seed scan resolution
    std::optional<Rect> window;        // intersected with each condition domain
};

// Traces every condition from automatic seeds (circles around the critical
// lambdas of q), registry seeds and, failing those, a sign-change scan of the
// domain. Curves of one condition are de-duplicated by Hausdorff distance
// < step/2. Vertices are the critical lambdas lying within 1e-6 of a curve
// plus pairwise transversal curve intersections. Conditions that produce no
// curve are listed in `untraced`; if every condition fails, NoTraceableCurve
// is thrown.
LimitGraph assemble_graph(const std::vector<CurveCondition>& conds,
                          const QuadraticProfile& p,
                          const AssembleOptions& opts = {});

// (kappa/eps) * |part(F_to) - part(F_from)| along an arc of the curve; exact
// counting prediction when eps is the semiclassical parameter of the law.
double predicted_count(const CountingLaw& law, const LimitCurve& curve,
                       std::size_t from_idx, std::size_t to_idx, double eps);

// Hausdorff distance between two polylines (points measured against
// segments); used for de-duplication and reflection tests.
double hausdorff_distance(const std::vector<Complex>& a,
                          const std::vector<Complex>& b);

}  // namespace osp
