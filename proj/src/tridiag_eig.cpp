#include "eigenseg/tridiag_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eigenseg/errors.hpp"

namespace eigenseg {

void tridiag_eigen(std::vector<double>& diag, std::vector<double>& sub,
                   std::vector<double>* accumulate) {
    const int m = static_cast<int>(diag.size());
    if (m == 0) return;
    if (static_cast<int>(sub.size()) < m - 1) {
        throw ContractError("tridiag_eigen: subdiagonal too short");
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> e(sub.begin(), sub.begin() + std::max(0, m - 1));
    e.push_back(0.0);

    for (int l = 0; l < m; ++l) {
        int iter = 0;
        while (true) {
            // first negligible coupling at or above l ends the active block
            int blk = l;
            while (blk < m - 1) {
                const double scale = std::abs(diag[blk]) + std::abs(diag[blk + 1]);
                if (std::abs(e[blk]) <= eps * scale) break;
                ++blk;
            }
            if (blk == l) break;  // diag[l] converged
            if (++iter > 64) {
                throw SolverError("tridiag_eigen: QL sweep did not converge");
            }
            // Wilkinson-type shift from the top 2x2 of the block
            double g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = diag[blk] - diag[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = blk - 1; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    diag[i + 1] -= p;
                    e[blk] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if (accumulate) {
                    for (int row = 0; row < m; ++row) {
                        double& a0 = (*accumulate)[static_cast<std::size_t>(row) * m + i];
                        double& a1 = (*accumulate)[static_cast<std::size_t>(row) * m + i + 1];
                        f = a1;
                        a1 = s * a0 + c * f;
                        a0 = c * a0 - s * f;
                    }
                }
            }
            if (underflow) continue;
            diag[l] -= p;
            e[l] = g;
            e[blk] = 0.0;
        }
    }

    // ascending order, carrying eigenvector columns along
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return diag[a] < diag[b]; });
    std::vector<double> sorted_diag(m);
    for (int j = 0; j < m; ++j) sorted_diag[j] = diag[order[j]];
    diag = sorted_diag;
    if (accumulate) {
        std::vector<double> sorted(accumulate->size());
        for (int row = 0; row < m; ++row) {
            for (int j = 0; j < m; ++j) {
                sorted[static_cast<std::size_t>(row) * m + j] =
                    (*accumulate)[static_cast<std::size_t>(row) * m + order[j]];
            }
        }
        *accumulate = std::move(sorted);
    }
}

}  // namespace eigenseg
