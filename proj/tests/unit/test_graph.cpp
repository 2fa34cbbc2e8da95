#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <osp/errors.hpp>
#include <osp/graph.hpp>
#include <osp/profile.hpp>
#include <osp/registry.hpp>

using osp::Complex;
using osp::QuadraticProfile;
using osp::Rect;
using osp::TraceOptions;

namespace {

const osp::Registry& bundled() {
    static const osp::Registry reg = osp::parse_registry(osp::default_registry_text());
    return reg;
}

double nearest_vertex_distance(const osp::LimitGraph& g, Complex target) {
    double best = 1e300;
    for (Complex v : g.vertices) best = std::min(best, std::abs(v - target));
    return best;
}

bool has_curve(const osp::LimitGraph& g, const std::string& id) {
    return std::any_of(g.curves.begin(), g.curves.end(),
                       [&](const osp::LimitCurve& c) { return c.condition_id == id; });
}

}  // namespace

TEST_CASE("the tracer follows a synthetic straight zero set") {
    // g = Re(lambda): the zero set is the imaginary axis.
    const auto eval = [](Complex z) { return std::make_pair(z.real(), z); };
    TraceOptions opts;
    const osp::TracedPath path = osp::trace_zero_set(eval, Complex(0.001, -1.0), opts);
    REQUIRE(path.points.size() > 100);
    REQUIRE(path.values.size() == path.points.size());
    double lowest = 0.0, highest = -10.0;
    for (Complex z : path.points) {
        CHECK(std::abs(z.real()) < 1e-9);
        lowest = std::min(lowest, z.imag());
        highest = std::max(highest, z.imag());
    }
    CHECK(lowest < -3.9);    // reached the bottom of the domain
    CHECK(highest > -0.01);  // reached the im_max = 0.05 cap
}

TEST_CASE("the tracer closes a synthetic circle and respects the domain") {
    const auto eval = [](Complex z) { return std::make_pair(std::norm(z) - 1.0, z); };
    SUBCASE("closed loop in an open domain") {
        TraceOptions opts;
        opts.domain = Rect{-2.0, 2.0, -2.0, 2.0};
        const osp::TracedPath path = osp::trace_zero_set(eval, Complex(0.0, -1.0), opts);
        REQUIRE(path.points.size() > 300);
        for (Complex z : path.points) {
            CHECK(std::abs(std::abs(z) - 1.0) < 1e-8);
        }
        // Closure: the end returns to the neighborhood of the start.
        CHECK(std::abs(path.points.front() - path.points.back()) < 3.0 * opts.step);
        double top = -10.0;
        for (Complex z : path.points) top = std::max(top, z.imag());
        CHECK(top > 0.9);  // went all the way around
    }
    SUBCASE("the default domain clips the upper arc") {
        TraceOptions opts;
        opts.domain = Rect{-2.0, 2.0, -2.0, 0.05};
        const osp::TracedPath path = osp::trace_zero_set(eval, Complex(0.0, -1.0), opts);
        REQUIRE(path.points.size() > 100);
        for (Complex z : path.points) {
            CHECK(z.imag() <= 0.05 + 1e-12);
        }
        // Both free ends stopped close to the clipping line.
        CHECK(path.points.front().imag() > 0.05 - 2.5 * opts.step);
        CHECK(path.points.back().imag() > 0.05 - 2.5 * opts.step);
    }
}

TEST_CASE("stop points capture and refine the trace endpoint") {
    const auto eval = [](Complex z) { return std::make_pair(z.real(), z); };
    TraceOptions opts;
    opts.stop_points = {Complex(0.0, -1.5)};
    const osp::TracedPath path = osp::trace_zero_set(eval, Complex(0.0005, -0.5), opts);
    const double d_front = std::abs(path.points.front() - opts.stop_points[0]);
    const double d_back = std::abs(path.points.back() - opts.stop_points[0]);
    CHECK(std::min(d_front, d_back) < 1e-6);
    // The other direction still runs to the im_max cap.
    double highest = -10.0;
    for (Complex z : path.points) highest = std::max(highest, z.imag());
    CHECK(highest > -0.01);
}

TEST_CASE("hopeless seeds and singular gradients are named failures") {
    TraceOptions opts;
    try {
        osp::trace_zero_set(
            [](Complex z) { return std::make_pair(1.0 + std::norm(z), z); },
            Complex(0.5, -0.5), opts);
        FAIL("expected SeedNotOnCurve");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "SeedNotOnCurve");
    }
    try {
        osp::trace_zero_set(
            [](Complex z) { return std::make_pair(std::norm(z), z); },
            Complex(0.0, 0.0), opts);
        FAIL("expected SingularGradient");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "SingularGradient");
    }
}

TEST_CASE("condition values: free profile stem is exactly computable") {
    const osp::CurveCondition& stem = *bundled().find_condition("stem");
    const QuadraticProfile free_q{0.0, 0.0, 0.0};
    // q = 0, lambda = -i s: F = e^{i pi/4} * 2 * sqrt(i s) = 2 i sqrt(s).
    for (const double s : {0.3, 0.7, 2.0}) {
        const osp::ConditionValue v =
            osp::condition_value(stem, free_q, Complex(0.0, -s));
        CHECK(std::abs(v.F - Complex(0.0, 2.0 * std::sqrt(s))) < 1e-10);
        CHECK(std::abs(v.g) < 1e-12);
    }
    // Off the curve the residual is the real part of F.
    const osp::ConditionValue off =
        osp::condition_value(stem, free_q, Complex(0.4, -0.5));
    CHECK(std::abs(off.g) > 1e-3);
    CHECK(off.g == off.F.real());
}

TEST_CASE("condition values: symmetric parabola inner action is i pi lambda / 2") {
    const osp::CurveCondition& inner = *bundled().find_condition("inner");
    const QuadraticProfile p{1.0, 0.0, 0.0};

    SUBCASE("on the diagonal ray the constraint vanishes") {
        for (const double t : {0.2, 0.5, 1.0, 2.0}) {
            const Complex lambda = t * std::polar(1.0, -M_PI / 4.0);
            const osp::ConditionValue v = osp::condition_value(inner, p, lambda);
            CHECK(std::abs(v.g) < 1e-9);
            CHECK(std::abs(v.F - Complex(0.0, M_PI / 2.0 * t)) < 1e-8);
        }
    }
    SUBCASE("off the ray F matches the closed form after normalization") {
        for (const Complex lambda : {Complex(0.4, 0.0), Complex(0.2, -0.6),
                                     Complex(0.8, -0.1)}) {
            Complex expect = std::polar(1.0, M_PI / 4.0) *
                             (Complex(0.0, M_PI / 2.0) * lambda);
            if (expect.imag() < 0.0) expect = -expect;
            const osp::ConditionValue v = osp::condition_value(inner, p, lambda);
            CHECK(std::abs(v.F - expect) < 1e-8);
            CHECK(v.F.imag() >= 0.0);
        }
    }
    SUBCASE("real lambda gives |Re F| = Im F") {
        const osp::ConditionValue v = osp::condition_value(inner, p, Complex(0.25, 0.0));
        CHECK(v.F.imag() > 0.0);
        CHECK(std::abs(std::abs(v.F.real()) - v.F.imag()) < 1e-9);
    }
}

TEST_CASE("condition values reject vertex zones and linear-profile inner terms") {
    const osp::CurveCondition& inner = *bundled().find_condition("inner");
    try {
        osp::condition_value(inner, QuadraticProfile{1.0, 0.0, 0.0}, Complex(1e-9, 0.0));
        FAIL("expected DegenerateTurningPoints");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "DegenerateTurningPoints");
    }
    // A linear profile has coincident turning points everywhere, so any
    // condition referencing them is unevaluable (the exact failure mode is an
    // implementation detail; it must surface as a library error).
    CHECK_THROWS_AS(
        osp::condition_value(inner, QuadraticProfile{0.0, 1.0, 0.0}, Complex(0.2, -0.4)),
        osp::Error);
}

TEST_CASE("a term plus its reversal cancels exactly") {
    osp::CurveCondition cond;
    cond.id = "null";
    cond.terms.push_back({osp::EndpointToken::x1, osp::EndpointToken::x2, Complex(1.0)});
    cond.terms.push_back({osp::EndpointToken::x2, osp::EndpointToken::x1, Complex(1.0)});
    const osp::ConditionValue v =
        osp::condition_value(cond, QuadraticProfile{1.0, 0.0, 0.0}, Complex(0.4, -0.7));
    CHECK(v.F == Complex(0.0));
    CHECK(v.g == 0.0);
}

TEST_CASE("segment actions add up to the stem action") {
    // The polyline -1 -> x1 -> x2 -> 1 deforms onto the straight segment
    // [-1, 1] without crossing a branch point, so the three sub-segment
    // actions sum to the stem action up to the per-condition branch and
    // normalization signs (hence the minimum over sign choices).
    const QuadraticProfile p{1.0, 0.0, 0.0};
    const Complex lambda(0.5, -0.4);
    const Complex Fl = osp::condition_value(*bundled().find_condition("left"), p, lambda).F;
    const Complex Fi = osp::condition_value(*bundled().find_condition("inner"), p, lambda).F;
    const Complex Fr = osp::condition_value(*bundled().find_condition("right"), p, lambda).F;
    const Complex Fs = osp::condition_value(*bundled().find_condition("stem"), p, lambda).F;
    double best = 1e300;
    for (const double sl : {1.0, -1.0})
        for (const double si : {1.0, -1.0})
            for (const double sr : {1.0, -1.0})
                best = std::min(best, std::abs(sl * Fl + si * Fi + sr * Fr - Fs));
    // The sub-segment integrals carry the truncated-endpoint extrapolation
    // error (~1e-9 each), so the additivity bound sits just above it.
    CHECK(best < 1e-8);
}

TEST_CASE("mirror profiles swap the left and right conditions") {
    const QuadraticProfile plus{1.0, 0.3, 0.0};
    const QuadraticProfile minus{1.0, -0.3, 0.0};
    const osp::CurveCondition& left = *bundled().find_condition("left");
    const osp::CurveCondition& right = *bundled().find_condition("right");
    const Complex samples[] = {Complex(0.3, -0.2), Complex(0.9, -0.05),
                               Complex(0.1, -0.8), Complex(1.2, -0.4),
                               Complex(-0.2, -1.1), Complex(0.6, -1.6)};
    for (const Complex lambda : samples) {
        const Complex a = osp::condition_value(left, plus, lambda).F;
        const Complex b = osp::condition_value(right, minus, lambda).F;
        CHECK(std::abs(a - b) < 1e-11 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("tracing the inner condition yields a consistent limit curve") {
    const QuadraticProfile p{1.0, 0.0, 0.0};
    const osp::CurveCondition& inner = *bundled().find_condition("inner");
    const Complex seed = 0.45 * std::polar(1.0, -M_PI / 4.0);
    const osp::LimitCurve curve = osp::trace_curve(inner, p, seed, TraceOptions{});

    REQUIRE(curve.points.size() > 100);
    REQUIRE(curve.arclength.size() == curve.points.size());
    REQUIRE(curve.action.size() == curve.points.size());
    CHECK(curve.condition_id == "inner");
    CHECK(curve.arclength.front() == 0.0);
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        CHECK(curve.points[k] != curve.points[k - 1]);
        CHECK(curve.arclength[k] > curve.arclength[k - 1]);
    }
    // The curve is the diagonal ray: one end refines toward the critical
    // lambda at the origin, the other leaves through the domain boundary.
    double lo = 1e300, hi = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, curve.points.size() / 12);
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        const Complex z = curve.points[k];
        CHECK(std::abs(z.real() + z.imag()) < 1e-6 * std::max(1.0, std::abs(z)));
        lo = std::min(lo, std::abs(z));
        hi = std::max(hi, std::abs(z));
        if (k % stride == 0) {
            CHECK(std::abs(osp::condition_value(inner, p, z).g) < 1e-8);
            CHECK(std::abs(curve.action[k] - Complex(0.0, M_PI / 2.0 * std::abs(z))) <
                  1e-6 * std::max(1.0, std::abs(z)));
        }
    }
    CHECK(lo < 1e-5);
    CHECK(hi > 5.0);  // reached the domain corner near (4, -4)
}

TEST_CASE("assembled graph of the symmetric parabola has the known junctions") {
    const QuadraticProfile p{1.0, 0.0, 0.0};
    const osp::LimitGraph g = osp::assemble_graph(bundled().conditions, p);
    CHECK(g.untraced.empty());
    for (const char* id : {"inner", "left", "right", "stem"}) CHECK(has_curve(g, id));
    REQUIRE(!g.vertices.empty());
    // Critical lambdas q(0) = 0 and q(+-1) = 1 lie on the graph.
    CHECK(nearest_vertex_distance(g, Complex(0.0, 0.0)) < 1e-3);
    CHECK(nearest_vertex_distance(g, Complex(1.0, 0.0)) < 1e-3);
    // The four curves cross at the diagonal junction.
    CHECK(nearest_vertex_distance(g, Complex(0.323712, -0.323712)) < 5e-3);
    CHECK(g.profile == p);
}

TEST_CASE("an asymmetric profile splits the junction and keeps all critical points") {
    const QuadraticProfile p{1.0, 0.3, 0.0};
    const osp::LimitGraph g = osp::assemble_graph(bundled().conditions, p);
    CHECK(g.untraced.empty());
    CHECK(nearest_vertex_distance(g, Complex(-0.0225, 0.0)) < 1e-3);
    CHECK(nearest_vertex_distance(g, Complex(0.7, 0.0)) < 1e-3);
    CHECK(nearest_vertex_distance(g, Complex(1.3, 0.0)) < 1e-3);
}

TEST_CASE("linear profile: inner is untraced and the junction sits at -i/sqrt(3)") {
    const QuadraticProfile couette{0.0, 1.0, 0.0};
    const osp::LimitGraph g = osp::assemble_graph(bundled().conditions, couette);
    REQUIRE(g.untraced.size() == 1);
    CHECK(g.untraced[0] == "inner");
    for (const char* id : {"left", "right", "stem"}) CHECK(has_curve(g, id));
    CHECK(nearest_vertex_distance(g, Complex(0.0, -1.0 / std::sqrt(3.0))) < 1e-4);
}

TEST_CASE("a window restricts the assembled curves") {
    const QuadraticProfile p{1.0, 0.0, 0.0};
    osp::AssembleOptions opts;
    opts.window = Rect{0.0, 0.5, -0.5, 0.0};
    std::vector<osp::CurveCondition> only_inner = {*bundled().find_condition("inner")};
    const osp::LimitGraph g = osp::assemble_graph(only_inner, p, opts);
    REQUIRE(!g.curves.empty());
    for (const osp::LimitCurve& c : g.curves) {
        for (Complex z : c.points) {
            CHECK(opts.window->contains(z));
        }
    }
}

TEST_CASE("when no condition can be traced the assembly fails by name") {
    const QuadraticProfile couette{0.0, 1.0, 0.0};
    std::vector<osp::CurveCondition> only_inner = {*bundled().find_condition("inner")};
    try {
        osp::assemble_graph(only_inner, couette);
        FAIL("expected NoTraceableCurve");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "NoTraceableCurve");
    }
}

TEST_CASE("counting predictions are linear along the stored action") {
    osp::LimitCurve curve;
    curve.condition_id = "demo";
    curve.points = {Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, -2.0)};
    curve.arclength = {0.0, 1.0, 2.0};
    curve.action = {Complex(0.5, 0.0), Complex(0.5, 1.0), Complex(0.5, 3.0)};
    osp::CountingLaw law;
    law.condition_id = "demo";
    law.kappa = M_1_PI;
    law.part = osp::CountPart::imag;

    const double whole = osp::predicted_count(law, curve, 0, 2, 0.1);
    CHECK(whole == doctest::Approx(3.0 / (M_PI * 0.1)).epsilon(1e-14));
    const double split = osp::predicted_count(law, curve, 0, 1, 0.1) +
                         osp::predicted_count(law, curve, 1, 2, 0.1);
    CHECK(split == doctest::Approx(whole).epsilon(1e-14));

    law.part = osp::CountPart::real;
    CHECK(osp::predicted_count(law, curve, 0, 2, 0.1) == 0.0);
    law.part = osp::CountPart::modulus;
    const double mod = osp::predicted_count(law, curve, 0, 2, 1.0);
    CHECK(mod == doctest::Approx(M_1_PI * (std::abs(Complex(0.5, 3.0)) -
                                           std::abs(Complex(0.5, 0.0)))));

    try {
        osp::predicted_count(law, curve, 2, 2, 0.1);
        FAIL("expected IndexOutOfRange");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "IndexOutOfRange");
    }
    try {
        osp::predicted_count(law, curve, 0, 3, 0.1);
        FAIL("expected IndexOutOfRange");
    } catch (const osp::Error& e) {
        CHECK(e.name() == "IndexOutOfRange");
    }
}

TEST_CASE("hausdorff distance of simple polylines") {
    const std::vector<Complex> base = {Complex(0.0), Complex(1.0)};
    const std::vector<Complex> shifted = {Complex(0.0, 0.25), Complex(1.0, 0.25)};
    CHECK(osp::hausdorff_distance(base, base) == 0.0);
    CHECK(osp::hausdorff_distance(base, shifted) == doctest::Approx(0.25));
    // A strict sub-polyline: the symmetric distance is the unmatched excess.
    const std::vector<Complex> longer = {Complex(0.0), Complex(1.0), Complex(2.0)};
    CHECK(osp::hausdorff_distance(base, longer) == doctest::Approx(1.0));
}
