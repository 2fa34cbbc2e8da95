#include "osp/profile.hpp"

#include <algorithm>
#include <cmath>

#include "osp/errors.hpp"

namespace osp {

Complex evaluate(const QuadraticProfile& p, Complex x) {
    return (p.a * x + p.b) * x + p.c;
}

namespace {

bool root_less(Complex u, Complex v) {
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
}

}  // namespace

TurningPair turning_points(const QuadraticProfile& p, Complex lambda) {
    if (p.a == 0.0) {
        if (p.b == 0.0) {
            raise("ConstantProfile", "constant profile has no turning points");
        }
        Complex root = (lambda - p.c) / p.b;
        return TurningPair{root, root, true};
    }
    // Solve a*x^2 + b*x + (c - lambda) = 0 without cancellation: pick the sign
    // that makes |b + s*sqrt(disc)| large, then use Vieta for the second root.
    const Complex c0 = Complex(p.c) - lambda;
    const Complex disc = Complex(p.b * p.b) - 4.0 * p.a * c0;
    const Complex sq = std::sqrt(disc);
    const double s = (p.b * sq.real() >= 0.0) ? 1.0 : -1.0;
    const Complex qf = -0.5 * (p.b + s * sq);

    Complex x1, x2;
    if (qf == Complex(0.0)) {
        x1 = x2 = Complex(-p.b / (2.0 * p.a));
    } else {
        x1 = qf / p.a;
        x2 = c0 / qf;
    }
    if (root_less(x2, x1)) std::swap(x1, x2);
    return TurningPair{x1, x2, x1 == x2};
}

std::vector<double> critical_lambdas(const QuadraticProfile& p) {
    std::vector<double> vals;
    vals.push_back(evaluate(p, Complex(-1.0)).real());
    vals.push_back(evaluate(p, Complex(1.0)).real());
    if (p.a != 0.0) {
        const double vx = -p.b / (2.0 * p.a);
        if (vx >= -1.0 && vx <= 1.0) {
            vals.push_back(evaluate(p, Complex(vx)).real());
        }
    }
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals) {
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
    }
    return out;
}

std::pair<double, double> range_on_interval(const QuadraticProfile& p) {
    const std::vector<double> vals = critical_lambdas(p);
    return {vals.front(), vals.back()};
}

}  // namespace osp
