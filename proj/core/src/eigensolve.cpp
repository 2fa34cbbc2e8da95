#include "osp/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osp/errors.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace osp {

namespace {

using LapackC = lapack_complex_double;

LapackC* lp(Complex* p) { return reinterpret_cast<LapackC*>(p); }

bool is_hessenberg(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    for (int j = 0; j + 2 < n; ++j) {
        for (int i = j + 2; i < n; ++i) {
            if (a(i, j) != Complex(0.0)) return false;
        }
    }
    return true;
}

void check_info(lapack_int info, const char* routine) {
    if (info < 0) {
        raise("InternalError", std::string(routine) + ": illegal argument " +
                                   std::to_string(-info));
    }
    if (info > 0) {
        raise("NoConvergence", std::string(routine) +
                                   ": QR iteration exhausted its budget; " +
                                   std::to_string(info) + " eigenvalues unconverged");
    }
}

}  // namespace

namespace detail {

void sort_and_flag(std::vector<EigenPair>& pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const EigenPair& u, const EigenPair& v) {
        if (u.lambda.real() != v.lambda.real())
            return u.lambda.real() < v.lambda.real();
        return u.lambda.imag() < v.lambda.imag();
    });
    double scale = 1.0;
    for (const EigenPair& e : pairs) scale = std::max(scale, std::abs(e.lambda));
    const double tol = 1e-14 * scale;
    for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
        if (std::abs(pairs[k + 1].lambda - pairs[k].lambda) < tol) {
            pairs[k].clustered = true;
            pairs[k + 1].clustered = true;
        }
    }
}

}  // namespace detail

Spectrum compute_spectrum(const DiscretizedOperator& op, bool want_vectors) {
    const int n = op.size();
    Eigen::MatrixXcd a = op.matrix;  // LAPACK overwrites its input
    std::vector<Complex> w(n);

    Spectrum spec;
    spec.profile = op.profile;
    spec.scheme = op.grid.scheme;
    spec.epsilon = op.epsilon;
    spec.n = n;
    spec.pairs.resize(n);

    if (!want_vectors && is_hessenberg(a)) {
        // Already in Hessenberg form: skip the reduction entirely.
        const lapack_int info =
            LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, 1, n, lp(a.data()), n,
                           lp(w.data()), nullptr, 1);
        check_info(info, "zhseqr");
        for (int k = 0; k < n; ++k) spec.pairs[k].lambda = w[k];
        detail::sort_and_flag(spec.pairs);
        return spec;
    }

    Eigen::MatrixXcd vr;
    if (want_vectors) vr.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, lp(a.data()), n,
        lp(w.data()), nullptr, 1, want_vectors ? lp(vr.data()) : nullptr,
        want_vectors ? n : 1);
    check_info(info, "zgeev");

    for (int k = 0; k < n; ++k) {
        spec.pairs[k].lambda = w[k];
        if (want_vectors) {
            Eigen::VectorXcd v = vr.col(k);
            const double nv = v.norm();
            spec.pairs[k].residual = (op.matrix * v - w[k] * v).norm() / nv;
            spec.pairs[k].vector = std::move(v);
        }
    }
    detail::sort_and_flag(spec.pairs);
    return spec;
}

Spectrum filter_spurious(const Spectrum& low, const Spectrum& high, double tol) {
    if (!(low.profile == high.profile) || low.scheme != high.scheme ||
        low.epsilon != high.epsilon) {
        raise("MismatchedProblem",
              "filter_spurious requires spectra of the same operator family");
    }
    if (high.n < 1.5 * low.n) {
        raise("MismatchedProblem",
              "reference spectrum must have at least 1.5x the resolution");
    }
    // Both sides are sorted by real part, so candidates live in a window.
    std::vector<double> re;
    re.reserve(high.pairs.size());
    for (const EigenPair& e : high.pairs) re.push_back(e.lambda.real());

    Spectrum out;
    out.profile = low.profile;
    out.scheme = low.scheme;
    out.epsilon = low.epsilon;
    out.n = low.n;
    for (const EigenPair& e : low.pairs) {
        const double d = tol * std::max(1.0, std::abs(e.lambda));
        const auto lo = std::lower_bound(re.begin(), re.end(), e.lambda.real() - d);
        const auto hi = std::upper_bound(re.begin(), re.end(), e.lambda.real() + d);
        bool keep = false;
        for (auto it = lo; it != hi && !keep; ++it) {
            const std::size_t k = static_cast<std::size_t>(it - re.begin());
            keep = std::abs(high.pairs[k].lambda - e.lambda) <= d;
        }
        if (keep) out.pairs.push_back(e);
    }
    return out;
}

double residual(const DiscretizedOperator& op, const EigenPair& pair) {
    if (!pair.vector) {
        raise("MissingVector", "residual needs the eigenvector");
    }
    const Eigen::VectorXcd& v = *pair.vector;
    if (v.size() != op.matrix.rows()) {
        raise("DimensionMismatch", "eigenvector length does not match operator");
    }
    return (op.matrix * v - pair.lambda * v).norm() / v.norm();
}

}  // namespace osp
