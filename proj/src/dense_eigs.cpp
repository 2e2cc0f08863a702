#include "eigenseg/dense_eigs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigenseg/errors.hpp"

// Householder + QL eigensolver for dense symmetric matrices, kept
// self-contained on purpose: it is the reference used to validate the
// Lanczos path, so it must not share numerical code with it.

namespace eigenseg {

namespace {

// Reduce a symmetric matrix (row-major, n x n) to tridiagonal form by
// Householder reflections, accumulating the orthogonal transform in place.
// d receives the diagonal, e the subdiagonal (e[0] unused).
void householder_reduce(int n, std::vector<double>& a, std::vector<double>& d,
                        std::vector<double>& e) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0;
        double scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(at(i, k));
            if (scale == 0.0) {
                e[i] = at(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    at(i, k) /= scale;
                    h += at(i, k) * at(i, k);
                }
                double f = at(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                at(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    at(j, i) = at(i, j) / h;  // stored for transform accumulation
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
                    for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
                    e[j] = g / h;
                    f += e[j] * at(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = at(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) {
                        at(j, k) -= f * e[k] + g * at(i, k);
                    }
                }
            }
        } else {
            e[i] = at(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    // accumulate the product of reflections into a
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += at(i, k) * at(k, j);
                for (int k = 0; k <= l; ++k) at(k, j) -= g * at(k, i);
            }
        }
        d[i] = at(i, i);
        at(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) {
            at(j, i) = 0.0;
            at(i, j) = 0.0;
        }
    }
}

// QL iteration with implicit shifts on the tridiagonal (d, e), rotating the
// columns of z (row-major n x n) into eigenvectors.
void ql_iterate(int n, std::vector<double>& d, std::vector<double>& e,
                std::vector<double>& z) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int mm;
        do {
            for (mm = l; mm < n - 1; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) break;
            }
            if (mm != l) {
                if (++iter > 50) {
                    throw SolverError("dense eigensolver: QL did not converge");
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                bool deflated = false;
                for (int i = mm - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[mm] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z[static_cast<std::size_t>(k) * n + i + 1];
                        z[static_cast<std::size_t>(k) * n + i + 1] =
                            s * z[static_cast<std::size_t>(k) * n + i] + c * f;
                        z[static_cast<std::size_t>(k) * n + i] =
                            c * z[static_cast<std::size_t>(k) * n + i] - s * f;
                    }
                }
                if (deflated) continue;
                d[l] -= p;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }
}

}  // namespace

DenseEigenResult dense_symmetric_eigen(int n, std::vector<double> matrix) {
    if (n <= 0 || matrix.size() != static_cast<std::size_t>(n) * n) {
        throw ContractError("dense_symmetric_eigen: bad matrix size");
    }
    DenseEigenResult res;
    res.n = n;
    res.values.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        res.values[0] = matrix[0];
        res.vectors = {1.0};
        return res;
    }
    householder_reduce(n, matrix, res.values, e);
    ql_iterate(n, res.values, e, matrix);
    res.vectors = std::move(matrix);

    // sort ascending, reordering eigenvector columns
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return res.values[a] < res.values[b]; });
    std::vector<double> vals(n);
    std::vector<double> vecs(res.vectors.size());
    for (int j = 0; j < n; ++j) {
        vals[j] = res.values[order[j]];
        for (int i = 0; i < n; ++i) {
            vecs[static_cast<std::size_t>(i) * n + j] =
                res.vectors[static_cast<std::size_t>(i) * n + order[j]];
        }
    }
    res.values = std::move(vals);
    res.vectors = std::move(vecs);
    return res;
}

DenseEigenResult dense_eigs_oracle(const SparseOperator& op) {
    if (op.n > 8192) {
        throw ContractError("dense_eigs_oracle: operator too large (n > 8192)");
    }
    if (op.n <= 0) {
        throw ContractError("dense_eigs_oracle: empty operator");
    }
    const int n = op.n;
    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            dense[static_cast<std::size_t>(i) * n + op.col[idx]] = op.val[idx];
        }
    }
    DenseEigenResult res = dense_symmetric_eigen(n, dense);

    // Rayleigh-quotient polish against the original matrix. The QL values
    // carry absolute noise at the eps*||A|| scale, which for the smallest
    // eigenvalues of a stiff operator is the dominant error; the quotient
    // over the computed eigenvector removes it to second order.
    std::vector<double> av(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double vv = 0.0;
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            const double* row = dense.data() + static_cast<std::size_t>(i) * n;
            for (int t = 0; t < n; ++t) {
                sum += row[t] * res.vectors[static_cast<std::size_t>(t) * n + j];
            }
            av[i] = sum;
        }
        double va = 0.0;
        for (int i = 0; i < n; ++i) {
            const double vi = res.vectors[static_cast<std::size_t>(i) * n + j];
            va += vi * av[i];
            vv += vi * vi;
        }
        res.values[j] = va / vv;
    }
    // the polish can reorder values inside clusters
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return res.values[a] < res.values[b]; });
    std::vector<double> vals(n);
    std::vector<double> vecs(res.vectors.size());
    for (int j = 0; j < n; ++j) {
        vals[j] = res.values[order[j]];
        for (int i = 0; i < n; ++i) {
            vecs[static_cast<std::size_t>(i) * n + j] =
                res.vectors[static_cast<std::size_t>(i) * n + order[j]];
        }
    }
    res.values = std::move(vals);
    res.vectors = std::move(vecs);
    return res;
}

}  // namespace eigenseg
