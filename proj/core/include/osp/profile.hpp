#pragma once

#include <utility>
#include <vector>

#include "osp/types.hpp"

namespace osp {

// Real quadratic coefficient profile q(x) = a*x^2 + b*x + c on [-1, 1].
struct QuadraticProfile {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool operator==(const QuadraticProfile&) const = default;
};

// The two roots of q(x) = lambda, ordered by real part (imaginary part breaks
// ties). `degenerate` marks a genuine double root, or the single root of a
// linear profile (a == 0, b != 0), where x1 == x2 by construction.
struct TurningPair {
    Complex x1;
    Complex x2;
    bool degenerate = false;
};

Complex evaluate(const QuadraticProfile& p, Complex x);

// Throws ConstantProfile when a == b == 0.
TurningPair turning_points(const QuadraticProfile& p, Complex lambda);

// Values of q at the endpoints +-1 and, when inside the interval, at the
// vertex -b/(2a): the candidate branch points of the limit configuration.
// Sorted ascending, deduplicated with absolute tolerance 1e-12.
std::vector<double> critical_lambdas(const QuadraticProfile& p);

// {min, max} of q over [-1, 1].
std::pair<double, double> range_on_interval(const QuadraticProfile& p);

}  // namespace osp
