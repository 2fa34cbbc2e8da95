#include "osp/discretize.hpp"

#include <cmath>

#include "osp/errors.hpp"

namespace osp {

namespace {

void check_args(double epsilon, int n) {
    if (n < 4) raise("InvalidSize", "need at least 4 interior nodes");
    if (!(epsilon > 0.0)) raise("NonPositiveEpsilon", "epsilon must be positive");
}

}  // namespace

DiscretizedOperator build_chebyshev(const QuadraticProfile& p, double epsilon,
                                    int n) {
    check_args(epsilon, n);
    const int N = n + 1;  // polynomial degree; N+1 Gauss-Lobatto nodes

    // Standard differentiation matrix on x_j = cos(pi*j/N) (descending), with
    // the negative-sum trick for the diagonal.
    Eigen::VectorXd x(N + 1);
    for (int j = 0; j <= N; ++j) x(j) = std::cos(M_PI * j / N);
    Eigen::VectorXd c(N + 1);
    for (int j = 0; j <= N; ++j) c(j) = (j == 0 || j == N) ? 2.0 : 1.0;

    Eigen::MatrixXd D(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            D(i, j) = (c(i) / c(j)) * sign / (x(i) - x(j));
            row_sum += D(i, j);
        }
        D(i, i) = -row_sum;
    }
    const Eigen::MatrixXd D2 = D * D;

    // Dirichlet conditions eliminate the boundary rows/columns; reorder the
    // interior block so nodes increase.
    DiscretizedOperator op;
    op.grid.scheme = Scheme::chebyshev;
    op.grid.nodes.resize(n);
    op.profile = p;
    op.epsilon = epsilon;
    op.matrix.resize(n, n);
    const Complex ie(0.0, epsilon);
    for (int i = 0; i < n; ++i) {
        const int src_i = N - 1 - i;  // reverse interior indices 1..N-1
        op.grid.nodes[i] = x(src_i);
        for (int j = 0; j < n; ++j) {
            const int src_j = N - 1 - j;
            op.matrix(i, j) = ie * D2(src_i, src_j);
        }
        op.matrix(i, i) += evaluate(p, Complex(op.grid.nodes[i]));
    }
    return op;
}

DiscretizedOperator build_finite_difference(const QuadraticProfile& p,
                                            double epsilon, int n) {
    check_args(epsilon, n);
    const double h = 2.0 / (n + 1);

    DiscretizedOperator op;
    op.grid.scheme = Scheme::fd2;
    op.grid.nodes.resize(n);
    op.profile = p;
    op.epsilon = epsilon;
    op.matrix = Eigen::MatrixXcd::Zero(n, n);
    const Complex ie_h2 = Complex(0.0, epsilon) / (h * h);
    for (int j = 0; j < n; ++j) {
        op.grid.nodes[j] = -1.0 + (j + 1) * h;
        op.matrix(j, j) = -2.0 * ie_h2 + evaluate(p, Complex(op.grid.nodes[j]));
        if (j > 0) op.matrix(j, j - 1) = ie_h2;
        if (j + 1 < n) op.matrix(j, j + 1) = ie_h2;
    }
    return op;
}

Eigen::VectorXcd apply(const DiscretizedOperator& op, const Eigen::VectorXcd& v) {
    if (v.size() != op.matrix.rows()) {
        raise("DimensionMismatch", "vector length does not match operator size");
    }
    return op.matrix * v;
}

int default_resolution(Scheme scheme, double reynolds) {
    const int root = static_cast<int>(std::ceil(std::sqrt(std::max(reynolds, 1.0))));
    if (scheme == Scheme::chebyshev) return std::max(300, 4 * root);
    return std::max(2000, 40 * root);
}

}  // namespace osp
