#include "osp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "osp/errors.hpp"

namespace osp {

namespace {

constexpr double kVertexZone = 1e-4;    // |x1 - x2| below this is not traced through
constexpr double kGradientFloor = 1e-12;
constexpr double kVertexRefineRadius = 1e-7;

struct ResolvedEndpoint {
    Complex pt;
    bool singular = false;  // turning point: sqrt singularity of the integrand
};

// Action primitive S_{from,to} for one canonically oriented token pair. The
// branch is anchored to the principal value at a non-singular end whenever
// one exists.
Complex primitive_action(const QuadraticProfile& p, Complex lambda,
                         const ResolvedEndpoint& a, const ResolvedEndpoint& b) {
    const bool anchor_at_from = !a.singular || b.singular;
    return integrate_segment_with_turning_endpoints(p, lambda, a.pt, b.pt,
                                                    a.singular, b.singular,
                                                    anchor_at_from);
}

}  // namespace

ConditionValue condition_value(const CurveCondition& cond,
                               const QuadraticProfile& p, Complex lambda) {
    bool needs_tp = false;
    for (const ActionTerm& t : cond.terms) {
        needs_tp = needs_tp || t.from == EndpointToken::x1 || t.from == EndpointToken::x2 ||
                   t.to == EndpointToken::x1 || t.to == EndpointToken::x2;
    }
    TurningPair tp;
    if (needs_tp) {
        tp = turning_points(p, lambda);  // ConstantProfile propagates
        if (p.a != 0.0 && std::abs(tp.x2 - tp.x1) < kVertexZone) {
            raise("DegenerateTurningPoints",
                  "lambda lies in a vertex zone (|x1 - x2| < 1e-4)");
        }
    }

    auto resolve = [&](EndpointToken t) -> ResolvedEndpoint {
        switch (t) {
            case EndpointToken::left_end: return {Complex(-1.0), false};
            case EndpointToken::right_end: return {Complex(1.0), false};
            case EndpointToken::x1: return {tp.x1, true};
            default: return {tp.x2, true};
        }
    };

    // Cache per canonical pair so a term and its reversal cancel exactly.
    std::map<std::pair<int, int>, Complex> cache;
    Complex F = 0.0;
    for (const ActionTerm& t : cond.terms) {
        if (t.from == t.to) continue;  // zero-length action
        int ra = static_cast<int>(t.from);
        int rb = static_cast<int>(t.to);
        double sign = 1.0;
        if (ra > rb) {
            std::swap(ra, rb);
            sign = -1.0;
        }
        const auto key = std::make_pair(ra, rb);
        auto it = cache.find(key);
        if (it == cache.end()) {
            const Complex s =
                primitive_action(p, lambda, resolve(static_cast<EndpointToken>(ra)),
                                 resolve(static_cast<EndpointToken>(rb)));
            it = cache.emplace(key, s).first;
        }
        F += t.coeff * sign * it->second;
    }

    // The zero constraints are invariant under F -> -F (the global branch
    // sign); pick the canonical representative so F varies continuously
    // along a traced curve away from its vertices.
    if (cond.kind == ConstraintKind::real_part_zero ||
        cond.kind == ConstraintKind::real_part_equals) {
        if (F.imag() < 0.0 || (F.imag() == 0.0 && F.real() < 0.0)) F = -F;
    } else {
        if (F.real() < 0.0 || (F.real() == 0.0 && F.imag() < 0.0)) F = -F;
    }

    ConditionValue out;
    out.F = F;
    switch (cond.kind) {
        case ConstraintKind::real_part_zero: out.g = F.real(); break;
        case ConstraintKind::imag_part_zero: out.g = F.imag(); break;
        case ConstraintKind::real_part_equals: out.g = F.real() - cond.value; break;
        case ConstraintKind::imag_part_equals: out.g = F.imag() - cond.value; break;
    }
    return out;
}

namespace {

using EvalFn = std::function<std::pair<double, Complex>(Complex)>;

struct Eval {
    double g = 0.0;
    Complex F;
    bool ok = false;
};

Eval safe_eval(const EvalFn& fn, Complex z) {
    try {
        auto [g, F] = fn(z);
        return {g, F, true};
    } catch (const Error&) {
        return {};
    }
}

struct Gradient {
    Complex dir;  // (dg/dRe, dg/dIm) packed as a complex number
    bool ok = false;
};

Gradient gradient(const EvalFn& fn, Complex z) {
    const double h = 1e-7 * std::max(1.0, std::abs(z));
    const Eval gxp = safe_eval(fn, z + Complex(h, 0.0));
    const Eval gxm = safe_eval(fn, z - Complex(h, 0.0));
    const Eval gyp = safe_eval(fn, z + Complex(0.0, h));
    const Eval gym = safe_eval(fn, z - Complex(0.0, h));
    if (!gxp.ok || !gxm.ok || !gyp.ok || !gym.ok) return {};
    return {Complex((gxp.g - gxm.g) / (2.0 * h), (gyp.g - gym.g) / (2.0 * h)), true};
}

struct Corrected {
    Complex z;
    double g = 0.0;
    Complex F;
    int iterations = 0;
    bool ok = false;
    bool singular = false;
};

// Newton iteration on g(z) = 0 moving along the gradient (normal) direction.
Corrected newton_correct(const EvalFn& fn, Complex z, double tol) {
    Corrected out;
    Eval e = safe_eval(fn, z);
    if (!e.ok) return out;
    for (int it = 0; it <= 20; ++it) {
        if (std::abs(e.g) <= tol) {
            out.z = z;
            out.g = e.g;
            out.F = e.F;
            out.iterations = it;
            out.ok = true;
            return out;
        }
        const Gradient gr = gradient(fn, z);
        if (!gr.ok) return out;
        const double n2 = std::norm(gr.dir);
        if (n2 < kGradientFloor * kGradientFloor) {
            out.singular = true;
            return out;
        }
        z -= e.g * gr.dir / n2;
        e = safe_eval(fn, z);
        if (!e.ok) return out;
    }
    return out;
}

struct DirectionTrace {
    std::vector<Complex> points;
    std::vector<Complex> values;
    bool closed = false;
};

// March one direction along the zero set until a termination condition.
DirectionTrace trace_direction(const EvalFn& fn, Complex start, Complex start_dir,
                               const TraceOptions& opts, int budget) {
    DirectionTrace out;
    Complex z = start;
    Complex dir = start_dir;
    double step_cur = opts.step;
    const double min_step = opts.step / 1024.0;

    while (static_cast<int>(out.points.size()) < budget) {
        const Complex predictor = z + step_cur * dir;
        const Corrected corr = newton_correct(fn, predictor, opts.newton_tol);
        const bool turned_back =
            corr.ok && ((corr.z - z) * std::conj(dir)).real() <= 0.0;
        if (!corr.ok || turned_back) {
            step_cur *= 0.5;
            if (step_cur < min_step) break;  // curvature blow-up or dead end
            continue;
        }
        if (!opts.domain.contains(corr.z)) break;

        // Near a designated stop point: refine toward it, then terminate.
        const Complex* stop = nullptr;
        for (const Complex& sp : opts.stop_points) {
            if (std::abs(corr.z - sp) < opts.step) {
                stop = &sp;
                break;
            }
        }
        if (stop != nullptr) {
            const Complex target = *stop;
            Complex zz = corr.z;
            out.points.push_back(corr.z);
            out.values.push_back(corr.F);
            double reach = std::abs(zz - target);
            for (int it = 0; it < 200 && reach > kVertexRefineRadius; ++it) {
                const double alpha = 0.5 * reach;
                if (alpha < 1e-9) break;
                const Corrected r =
                    newton_correct(fn, zz + alpha * (target - zz) / reach, opts.newton_tol);
                if (!r.ok || std::abs(r.z - target) >= reach) break;
                zz = r.z;
                reach = std::abs(zz - target);
                out.points.push_back(zz);
                out.values.push_back(r.F);
                if (static_cast<int>(out.points.size()) >= budget) break;
            }
            break;
        }

        // Closure: returned to the start after a substantial loop.
        if (out.points.size() > 10 && std::abs(corr.z - start) < 0.5 * opts.step) {
            out.closed = true;
            break;
        }

        out.points.push_back(corr.z);
        out.values.push_back(corr.F);

        const Gradient gr = gradient(fn, corr.z);
        if (!gr.ok || std::abs(gr.dir) < kGradientFloor) break;
        Complex tangent(-gr.dir.imag(), gr.dir.real());
        tangent /= std::abs(tangent);
        if ((tangent * std::conj(dir)).real() < 0.0) tangent = -tangent;
        dir = tangent;
        z = corr.z;

        if (corr.iterations > 5) {
            step_cur = std::max(0.5 * step_cur, min_step);
        } else if (corr.iterations <= 2) {
            step_cur = std::min(opts.step, 1.5 * step_cur);
        }
    }
    return out;
}

}  // namespace

TracedPath trace_zero_set(const EvalFn& fn, Complex seed, const TraceOptions& opts) {
    const Corrected snapped = newton_correct(fn, seed, opts.newton_tol);
    if (snapped.singular) {
        raise("SingularGradient", "gradient of the constraint vanishes at the seed");
    }
    if (!snapped.ok) {
        raise("SeedNotOnCurve", "Newton correction from the seed did not converge");
    }
    const Gradient gr = gradient(fn, snapped.z);
    if (!gr.ok || std::abs(gr.dir) < kGradientFloor) {
        raise("SingularGradient", "gradient of the constraint vanishes at the seed");
    }
    Complex tangent(-gr.dir.imag(), gr.dir.real());
    tangent /= std::abs(tangent);

    const DirectionTrace fwd =
        trace_direction(fn, snapped.z, tangent, opts, opts.max_points);
    DirectionTrace bwd;
    if (!fwd.closed) {
        const int budget =
            opts.max_points - static_cast<int>(fwd.points.size()) - 1;
        if (budget > 0) {
            bwd = trace_direction(fn, snapped.z, -tangent, opts, budget);
        }
    }

    TracedPath path;
    path.points.reserve(fwd.points.size() + bwd.points.size() + 1);
    for (std::size_t k = bwd.points.size(); k-- > 0;) {
        path.points.push_back(bwd.points[k]);
        path.values.push_back(bwd.values[k]);
    }
    path.points.push_back(snapped.z);
    path.values.push_back(snapped.F);
    for (std::size_t k = 0; k < fwd.points.size(); ++k) {
        path.points.push_back(fwd.points[k]);
        path.values.push_back(fwd.values[k]);
    }

    // Drop consecutive duplicates (refinement can stall on a point).
    TracedPath clean;
    for (std::size_t k = 0; k < path.points.size(); ++k) {
        if (!clean.points.empty() &&
            std::abs(path.points[k] - clean.points.back()) < 1e-3 * opts.step) {
            continue;
        }
        clean.points.push_back(path.points[k]);
        clean.values.push_back(path.values[k]);
    }
    return clean;
}

LimitCurve trace_curve(const CurveCondition& cond, const QuadraticProfile& p,
                       Complex seed, const TraceOptions& opts) {
    TraceOptions effective = opts;
    if (effective.stop_points.empty()) {
        for (double c : critical_lambdas(p)) {
            effective.stop_points.push_back(Complex(c, 0.0));
        }
    }
    const EvalFn fn = [&cond, &p](Complex z) -> std::pair<double, Complex> {
        const ConditionValue v = condition_value(cond, p, z);
        return {v.g, v.F};
    };
    const TracedPath path = trace_zero_set(fn, seed, effective);

    LimitCurve curve;
    curve.condition_id = cond.id;
    curve.points = path.points;
    curve.action = path.values;
    curve.arclength.resize(curve.points.size(), 0.0);
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        curve.arclength[k] =
            curve.arclength[k - 1] + std::abs(curve.points[k] - curve.points[k - 1]);
    }
    return curve;
}

namespace {

double point_to_polyline(Complex pt, const std::vector<Complex>& poly) {
    double best = std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return std::abs(pt - poly[0]);
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
        const Complex a = poly[k], b = poly[k + 1];
        const Complex ab = b - a;
        const double len2 = std::norm(ab);
        double t = len2 > 0.0 ? ((pt - a) * std::conj(ab)).real() / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::abs(pt - (a + t * ab)));
    }
    return best;
}

double directed_hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = 0.0;
    for (const Complex& pt : a) worst = std::max(worst, point_to_polyline(pt, b));
    return worst;
}

}  // namespace

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

namespace {

// Candidate seeds from sign changes of g on a coarse grid over the domain.
std::vector<Complex> scan_for_seeds(const EvalFn& fn, const Rect& dom, int grid,
                                    double min_spacing, int max_seeds) {
    std::vector<Complex> found;
    if (grid < 2) return found;
    std::vector<double> g(static_cast<std::size_t>(grid) * grid);
    std::vector<char> ok(static_cast<std::size_t>(grid) * grid);
    auto node = [&](int i, int j) {
        return Complex(dom.re_min + (dom.re_max - dom.re_min) * i / (grid - 1),
                       dom.im_min + (dom.im_max - dom.im_min) * j / (grid - 1));
    };
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            const Eval e = safe_eval(fn, node(i, j));
            g[j * grid + i] = e.g;
            ok[j * grid + i] = e.ok;
        }
    }
    auto try_edge = [&](int i0, int j0, int i1, int j1) {
        if (static_cast<int>(found.size()) >= max_seeds) return;
        const std::size_t k0 = static_cast<std::size_t>(j0) * grid + i0;
        const std::size_t k1 = static_cast<std::size_t>(j1) * grid + i1;
        if (!ok[k0] || !ok[k1]) return;
        if (g[k0] == 0.0 || g[k0] * g[k1] > 0.0) return;
        Complex a = node(i0, j0), b = node(i1, j1);
        double ga = g[k0];
        for (int it = 0; it < 24; ++it) {
            const Complex m = 0.5 * (a + b);
            const Eval em = safe_eval(fn, m);
            if (!em.ok) return;
            if (ga * em.g <= 0.0) {
                b = m;
            } else {
                a = m;
                ga = em.g;
            }
        }
        const Complex cand = 0.5 * (a + b);
        for (const Complex& f : found) {
            if (std::abs(f - cand) < min_spacing) return;
        }
        found.push_back(cand);
    };
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            if (i + 1 < grid) try_edge(i, j, i + 1, j);
            if (j + 1 < grid) try_edge(i, j, i, j + 1);
        }
    }
    return found;
}

// Strict transversal crossing of two segments.  Near-parallel pairs are
// rejected: two traces of the same zero set weave across each other within
// corrector tolerance, and those micro-crossings are not curve intersections.
bool transversal_crossing(Complex a0, Complex a1, Complex b0, Complex b1,
                          Complex& where) {
    auto cross = [](Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); };
    const Complex da = a1 - a0, db = b1 - b0;
    const double la = std::abs(da), lb = std::abs(db);
    if (la == 0.0 || lb == 0.0) return false;
    const double denom = cross(da, db);
    if (std::abs(denom) < 1e-3 * la * lb) return false;
    const double d1 = cross(da, b0 - a0);
    const double d2 = cross(da, b1 - a0);
    const double d3 = cross(db, a0 - b0);
    const double d4 = cross(db, a1 - b0);
    if ((d1 > 0) == (d2 > 0) || (d3 > 0) == (d4 > 0)) return false;
    where = a0 + (cross(b0 - a0, db) / denom) * da;
    return true;
}

}  // namespace

LimitGraph assemble_graph(const std::vector<CurveCondition>& conds,
                          const QuadraticProfile& p, const AssembleOptions& opts) {
    LimitGraph graph;
    graph.profile = p;
    const std::vector<double> crit = critical_lambdas(p);

    for (const CurveCondition& cond : conds) {
        Rect dom = cond.domain;
        if (opts.window) dom = dom.intersect(*opts.window);
        if (dom.empty()) {
            graph.untraced.push_back(cond.id);
            continue;
        }
        TraceOptions topts = opts.trace;
        topts.domain = dom;
        for (double c : crit) topts.stop_points.push_back(Complex(c, 0.0));

        const EvalFn fn = [&cond, &p](Complex z) -> std::pair<double, Complex> {
            const ConditionValue v = condition_value(cond, p, z);
            return {v.g, v.F};
        };

        std::vector<Complex> seeds = cond.seeds;
        for (double c : crit) {
            for (int k = 0; k < opts.circle_seed_count; ++k) {
                const double phi = 2.0 * M_PI * k / opts.circle_seed_count;
                seeds.push_back(Complex(c + opts.circle_radius * std::cos(phi),
                                        opts.circle_radius * std::sin(phi)));
            }
        }

        std::vector<LimitCurve> curves;
        auto try_seed = [&](Complex seed) {
            if (!dom.contains(seed)) return;
            for (const LimitCurve& c : curves) {
                if (point_to_polyline(seed, c.points) < 0.5 * topts.step) return;
            }
            try {
                LimitCurve c = trace_curve(cond, p, seed, topts);
                if (c.points.size() < 3) return;
                const double thr = 0.5 * topts.step;
                for (const LimitCurve& prev : curves) {
                    if (directed_hausdorff(c.points, prev.points) < thr) return;
                }
                std::erase_if(curves, [&](const LimitCurve& prev) {
                    return directed_hausdorff(prev.points, c.points) < thr;
                });
                curves.push_back(std::move(c));
            } catch (const Error&) {
                // Seed off-curve or in an unevaluable zone: skip.
            }
        };

        for (const Complex& s : seeds) try_seed(s);
        if (curves.empty()) {
            for (const Complex& s :
                 scan_for_seeds(fn, dom, opts.scan_grid, 4.0 * topts.step, 6)) {
                try_seed(s);
            }
        }
        if (curves.empty()) {
            graph.untraced.push_back(cond.id);
        } else {
            for (LimitCurve& c : curves) graph.curves.push_back(std::move(c));
        }
    }

    if (!conds.empty() && graph.curves.empty()) {
        raise("NoTraceableCurve", "no condition produced a traceable curve");
    }

    // Vertices: critical lambdas adjacent to a curve, plus transversal
    // intersections between geometrically distinct curves.
    std::vector<Complex> verts;
    auto add_vertex = [&verts](Complex v) {
        for (const Complex& w : verts) {
            if (std::abs(w - v) <= 1e-6) return;
        }
        verts.push_back(v);
    };
    for (double c : crit) {
        const Complex z(c, 0.0);
        for (const LimitCurve& curve : graph.curves) {
            if (point_to_polyline(z, curve.points) <= 1e-6) {
                add_vertex(z);
                break;
            }
        }
    }
    for (std::size_t i = 0; i < graph.curves.size(); ++i) {
        for (std::size_t j = i + 1; j < graph.curves.size(); ++j) {
            const std::vector<Complex>& a = graph.curves[i].points;
            const std::vector<Complex>& b = graph.curves[j].points;
            // Geometrically coincident traces (e.g. mirror conditions on an
            // even profile) are not transversal intersections.
            const double thr = 0.5 * opts.trace.step;
            if (directed_hausdorff(a, b) < thr || directed_hausdorff(b, a) < thr) continue;
            for (std::size_t s = 0; s + 1 < a.size(); ++s) {
                for (std::size_t t = 0; t + 1 < b.size(); ++t) {
                    Complex where;
                    if (transversal_crossing(a[s], a[s + 1], b[t], b[t + 1], where)) {
                        add_vertex(where);
                    }
                }
            }
        }
    }
    std::sort(verts.begin(), verts.end(), [](Complex u, Complex v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    graph.vertices = std::move(verts);
    return graph;
}

double predicted_count(const CountingLaw& law, const LimitCurve& curve,
                       std::size_t from_idx, std::size_t to_idx, double eps) {
    if (to_idx >= curve.action.size() || from_idx >= to_idx) {
        raise("IndexOutOfRange", "arc indices must satisfy from < to < size");
    }
    auto part = [&law](Complex F) {
        switch (law.part) {
            case CountPart::modulus: return std::abs(F);
            case CountPart::imag: return F.imag();
            default: return F.real();
        }
    };
    return (law.kappa / eps) *
           std::abs(part(curve.action[to_idx]) - part(curve.action[from_idx]));
}

}  // namespace osp
