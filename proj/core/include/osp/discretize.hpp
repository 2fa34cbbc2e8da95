#pragma once

#include <Eigen/Dense>
#include <vector>

#include "osp/profile.hpp"
#include "osp/types.hpp"

namespace osp {

enum class Scheme { chebyshev, fd2 };

// Interior collocation/difference nodes, strictly increasing in (-1, 1).
struct Grid {
    std::vector<double> nodes;
    Scheme scheme = Scheme::chebyshev;
};

// Dense matrix of i*eps*D2 + diag(q) with Dirichlet rows/columns eliminated.
struct DiscretizedOperator {
    Eigen::MatrixXcd matrix;
    Grid grid;
    QuadraticProfile profile;
    double epsilon = 0.0;

    int size() const { return static_cast<int>(matrix.rows()); }
};

// Chebyshev collocation on Gauss-Lobatto nodes; n interior nodes remain after
// eliminating the boundary rows/columns. Throws InvalidSize (n < 4) and
// NonPositiveEpsilon.
DiscretizedOperator build_chebyshev(const QuadraticProfile& p, double epsilon,
                                    int n);

// Second-order central differences on a uniform grid with n interior nodes.
DiscretizedOperator build_finite_difference(const QuadraticProfile& p,
                                            double epsilon, int n);

// Matrix-vector product; throws DimensionMismatch.
Eigen::VectorXcd apply(const DiscretizedOperator& op, const Eigen::VectorXcd& v);

// Resolution defaults used by sweeps: large enough that the eigenvalues of
// smallest |Im| are grid-converged at the given Reynolds number.
int default_resolution(Scheme scheme, double reynolds);

}  // namespace osp
