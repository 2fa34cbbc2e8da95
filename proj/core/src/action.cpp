#include "osp/action.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "osp/errors.hpp"

namespace osp {

namespace {

constexpr double kPathClearance = 1e-10;  // minimum contour distance to a turning point
constexpr double kQuadTol = 1e-12;        // agreement between successive refinements
constexpr int kMaxDepth = 30;

struct GLRule {
    std::array<double, 32> x;
    std::array<double, 32> w;
};

// Gauss-Legendre order 32 on [-1, 1], nodes ascending. Computed once by
// Newton iteration on P_32 so no tabulated constants can be mistyped.
const GLRule& gl32() {
    static const GLRule rule = [] {
        GLRule r;
        const int n = 32;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r.x[i] = x;
            r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        std::array<int, 32> idx;
        for (int i = 0; i < 32; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int i, int j) { return r.x[i] < r.x[j]; });
        GLRule sorted;
        for (int i = 0; i < 32; ++i) {
            sorted.x[i] = r.x[idx[i]];
            sorted.w[i] = r.w[idx[i]];
        }
        return sorted;
    }();
    return rule;
}

Complex principal_sqrt(const QuadraticProfile& p, Complex lambda, Complex x) {
    return std::sqrt(evaluate(p, x) - lambda);
}

Complex nearest_sign(Complex v, Complex ref) {
    return (std::norm(v - ref) <= std::norm(v + ref)) ? v : -v;
}

// Branch step accepted only while the argument moves by less than pi/2.
bool branch_step_ok(Complex v, Complex prev) {
    if (prev == Complex(0.0) || v == Complex(0.0)) return true;
    return (v * std::conj(prev)).real() > 0.0;
}

double point_segment_distance(Complex pt, Complex a, Complex b) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(pt - a);
    double t = ((pt - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(pt - (a + t * ab));
}

struct SegOut {
    Complex integral;
    Complex f_end;
};

// One Gauss-Legendre pass over [a, b] with branch continuation from fa.
// Sets `branch_fail` when a sampling step loses the branch.
SegOut gl_pass(const QuadraticProfile& p, Complex lambda, Complex a, Complex b,
               Complex fa, bool& branch_fail) {
    const GLRule& r = gl32();
    const Complex mid = 0.5 * (a + b);
    const Complex half = 0.5 * (b - a);
    Complex prev = fa;
    Complex acc = 0.0;
    branch_fail = false;
    for (int i = 0; i < 32; ++i) {
        const Complex v = nearest_sign(principal_sqrt(p, lambda, mid + r.x[i] * half), prev);
        if (!branch_step_ok(v, prev)) {
            branch_fail = true;
            return {};
        }
        acc += r.w[i] * v;
        prev = v;
    }
    const Complex fb = nearest_sign(principal_sqrt(p, lambda, b), prev);
    if (!branch_step_ok(fb, prev)) {
        branch_fail = true;
        return {};
    }
    return {acc * half, fb};
}

SegOut integrate_branched(const QuadraticProfile& p, Complex lambda, Complex a,
                          Complex b, Complex fa, double tol, int depth) {
    const Complex m = 0.5 * (a + b);
    bool fail_whole = false, fail_left = false, fail_right = false;
    SegOut whole = gl_pass(p, lambda, a, b, fa, fail_whole);
    SegOut left, right;
    if (!fail_whole) {
        left = gl_pass(p, lambda, a, m, fa, fail_left);
        if (!fail_left) right = gl_pass(p, lambda, m, b, left.f_end, fail_right);
    }
    const bool branch_fail = fail_whole || fail_left || fail_right;
    if (!branch_fail) {
        const Complex refined = left.integral + right.integral;
        const bool ends_agree =
            std::norm(right.f_end - whole.f_end) <= std::norm(right.f_end + whole.f_end);
        if (ends_agree && std::abs(refined - whole.integral) <= tol) {
            return {refined, right.f_end};
        }
        if (depth >= kMaxDepth) {
            // Refinement stalled below target accuracy; the halved estimate is
            // still the best available and its error is bounded by the last gap.
            return {refined, right.f_end};
        }
    } else if (depth >= kMaxDepth) {
        raise("BranchAmbiguity",
              "branch of sqrt(q - lambda) could not be continued along the path; "
              "the contour passes too close to a branch point");
    }
    SegOut lo = integrate_branched(p, lambda, a, m, fa, 0.5 * tol, depth + 1);
    SegOut hi = integrate_branched(p, lambda, m, b, lo.f_end, 0.5 * tol, depth + 1);
    return {lo.integral + hi.integral, hi.f_end};
}

std::uint64_t hash_points(const std::vector<Complex>& pts) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](double d) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &d, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (const Complex& z : pts) {
        mix(z.real());
        mix(z.imag());
    }
    return h;
}

std::vector<Complex> turning_points_of(const QuadraticProfile& p, Complex lambda) {
    if (p.a == 0.0 && p.b == 0.0) return {};
    const TurningPair t = turning_points(p, lambda);
    if (t.degenerate) return {t.x1};
    return {t.x1, t.x2};
}

}  // namespace

ActionValue integrate_action(const QuadraticProfile& p, Complex lambda,
                             const PathSpec& path) {
    const std::vector<Complex>& w = path.waypoints;
    if (w.size() < 2) {
        raise("InvalidPath", "path needs at least 2 waypoints");
    }
    double total_len = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double len = std::abs(w[i + 1] - w[i]);
        if (len == 0.0) raise("InvalidPath", "consecutive waypoints must be distinct");
        total_len += len;
    }
    const std::vector<Complex> tps = turning_points_of(p, lambda);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        for (const Complex& tp : tps) {
            if (point_segment_distance(tp, w[i], w[i + 1]) < kPathClearance) {
                raise("PathThroughTurningPoint",
                      "integration path passes within 1e-10 of a turning point");
            }
        }
    }

    Complex f0 = principal_sqrt(p, lambda, w.front());
    if (path.continued_from) {
        f0 = nearest_sign(f0, path.continued_from->value);
    }
    Complex total = 0.0;
    Complex f = f0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double share = std::abs(w[i + 1] - w[i]) / total_len;
        const SegOut out =
            integrate_branched(p, lambda, w[i], w[i + 1], f, kQuadTol * share, 0);
        total += out.integral;
        f = out.f_end;
    }
    return ActionValue{total, lambda, hash_points(w)};
}

Complex integrate_segment_with_turning_endpoints(const QuadraticProfile& p,
                                                 Complex lambda, Complex from,
                                                 Complex to, bool singular_from,
                                                 bool singular_to,
                                                 bool anchor_at_from,
                                                 double radius) {
    const double seg_len = std::abs(to - from);
    if (seg_len == 0.0) raise("InvalidPath", "segment endpoints coincide");
    const double r = std::min(radius, seg_len / 8.0);

    auto truncated = [&](double rr) -> Complex {
        const Complex u = (to - from) / seg_len;
        const Complex a = singular_from ? from + rr * u : from;
        const Complex b = singular_to ? to - rr * u : to;
        PathSpec ps;
        if (anchor_at_from) {
            ps.waypoints = {a, b};
            return integrate_action(p, lambda, ps).value;
        }
        ps.waypoints = {b, a};
        return -integrate_action(p, lambda, ps).value;
    };

    if (!singular_from && !singular_to) {
        return truncated(0.0);
    }
    // Truncation error is O(r^{3/2}): eliminate the leading term from the
    // r and r/2 evaluations.
    const Complex coarse = truncated(r);
    const Complex fine = truncated(0.5 * r);
    const double k = 2.0 * M_SQRT2;  // 2^{3/2}
    return (k * fine - coarse) / (k - 1.0);
}

ActionValue action_between_turning_points(const QuadraticProfile& p,
                                          Complex lambda) {
    const TurningPair t = turning_points(p, lambda);
    if (t.degenerate) {
        raise("DegenerateTurningPoints",
              "turning points coincide; the action between them is not defined");
    }
    if (std::abs(t.x2 - t.x1) < 8e-6) {
        raise("DegenerateTurningPoints",
              "turning points too close to separate their truncation neighborhoods");
    }
    Complex v = integrate_segment_with_turning_endpoints(p, lambda, t.x1, t.x2,
                                                         true, true, true);
    if (v.imag() < 0.0 || (v.imag() == 0.0 && v.real() < 0.0)) v = -v;
    return ActionValue{v, lambda, hash_points({t.x1, t.x2})};
}

}  // namespace osp
