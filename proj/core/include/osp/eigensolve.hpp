#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "osp/discretize.hpp"
#include "osp/types.hpp"

namespace osp {

struct EigenPair {
    Complex lambda;
    // ||A v - lambda v||_2 / ||v||_2, present when the vector was computed.
    std::optional<double> residual;
    std::optional<Eigen::VectorXcd> vector;
    bool clustered = false;  // set when another eigenvalue lies within 1e-14 * scale
};

struct Spectrum {
    std::vector<EigenPair> pairs;  // sorted by (Re, Im), ascending
    QuadraticProfile profile;
    Scheme scheme = Scheme::chebyshev;
    double epsilon = 0.0;
    int n = 0;
};

// Dense complex eigensolve (QR iteration). Tridiagonal/Hessenberg inputs take
// a reduced path when vectors are not requested. Throws NoConvergence when
// the QR iteration exhausts its budget.
Spectrum compute_spectrum(const DiscretizedOperator& op, bool want_vectors = false);

// Keeps the eigenvalues of `low` that are reproduced by the finer spectrum
// `high` within tol * max(1, |lambda|). Requires matching profile, scheme and
// epsilon, and high.n >= 1.5 * low.n (throws MismatchedProblem otherwise).
Spectrum filter_spurious(const Spectrum& low, const Spectrum& high, double tol);

// Recomputed backward error of one pair; throws MissingVector.
double residual(const DiscretizedOperator& op, const EigenPair& pair);

namespace detail {
// Sort by (Re, Im) and mark near-coincident neighbors as clusters; shared by
// the solver and by deserialization so round-tripped spectra compare equal.
void sort_and_flag(std::vector<EigenPair>& pairs);
}  // namespace detail

}  // namespace osp
