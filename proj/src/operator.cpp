#include "eigenseg/operator.hpp"

#include <cmath>
#include <ostream>

#include "eigenseg/kernels.hpp"

namespace eigenseg {

double SparseOperator::norm1() const {
    std::vector<double> colsum(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t idx = row_ptr[i]; idx < row_ptr[i + 1]; ++idx) {
            colsum[col[idx]] += std::abs(val[idx]);
        }
    }
    double best = 0.0;
    for (double s : colsum) best = std::max(best, s);
    return best;
}

std::vector<double> BoundaryCoupling::rhs(const ScalarField& boundary_values) const {
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < n; ++r) {
        double sum = 0.0;
        for (std::int64_t idx = row_ptr[r]; idx < row_ptr[r + 1]; ++idx) {
            sum += conductance[idx] * boundary_values.values[boundary_node[idx]];
        }
        b[r] = sum;
    }
    return b;
}

namespace {

double face_conductance(double mu_p, double mu_q, FaceAverage average, double inv_h2) {
    const double avg = average == FaceAverage::harmonic
                           ? 2.0 * mu_p * mu_q / (mu_p + mu_q)
                           : 0.5 * (mu_p + mu_q);
    return avg * inv_h2;
}

}  // namespace

AssembledOperator assemble(const WeightField& weight, const DomainMask& mask,
                           FaceAverage average) {
    const ScalarField& mu = weight.mu;
    if (!mask.same_shape(mu)) {
        throw ContractError("assemble: weight and mask dimensions differ");
    }
    // mu must be positive wherever a face can touch it.
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mask.labels[i] != NodeLabel::excluded && !(mu.values[i] > 0.0)) {
            throw ContractError("assemble: weight must be strictly positive");
        }
    }
    const int n = mask.interior_count();
    const int w = mask.width;
    const double h = mask.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const bool one_d = mask.height == 1;

    AssembledOperator out;
    out.op.n = n;
    out.op.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    out.coupling.n = n;
    out.coupling.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

    // Neighbor offsets in ascending node order keep CSR columns sorted.
    const int offsets_2d[4] = {-w, -1, 1, w};
    const int offsets_1d[2] = {-1, 1};
    const int* offsets = one_d ? offsets_1d : offsets_2d;
    const int num_nb = one_d ? 2 : 4;

    for (int r = 0; r < n; ++r) {
        const int node = mask.interior_nodes[r];
        int inb = 0, bnb = 0;
        for (int q = 0; q < num_nb; ++q) {
            const NodeLabel l = mask.labels[node + offsets[q]];
            if (l == NodeLabel::interior) ++inb;
            else ++bnb;  // mask invariant: never excluded
        }
        out.op.row_ptr[r + 1] = out.op.row_ptr[r] + inb + 1;
        out.coupling.row_ptr[r + 1] = out.coupling.row_ptr[r] + bnb;
    }
    out.op.col.assign(static_cast<std::size_t>(out.op.row_ptr[n]), 0);
    out.op.val.assign(static_cast<std::size_t>(out.op.row_ptr[n]), 0.0);
    out.coupling.boundary_node.assign(static_cast<std::size_t>(out.coupling.row_ptr[n]), 0);
    out.coupling.conductance.assign(static_cast<std::size_t>(out.coupling.row_ptr[n]), 0.0);

#pragma omp parallel for schedule(static)
    for (int r = 0; r < n; ++r) {
        const int node = mask.interior_nodes[r];
        std::int64_t idx = out.op.row_ptr[r];
        std::int64_t cidx = out.coupling.row_ptr[r];
        double diag = 0.0;
        bool diag_written = false;
        for (int q = 0; q < num_nb; ++q) {
            const int nb = node + offsets[q];
            const double c = face_conductance(mu.values[node], mu.values[nb], average, inv_h2);
            diag += c;
            if (mask.labels[nb] == NodeLabel::interior) {
                if (!diag_written && nb > node) {
                    // diagonal slot comes before the first larger neighbor
                    out.op.col[idx] = r;
                    ++idx;
                    diag_written = true;
                }
                out.op.col[idx] = mask.interior_index[nb];
                out.op.val[idx] = -c;
                ++idx;
            } else {
                out.coupling.boundary_node[cidx] = nb;
                out.coupling.conductance[cidx] = c;
                ++cidx;
            }
        }
        if (!diag_written) {
            out.op.col[idx] = r;
            ++idx;
        }
        // fill the reserved diagonal slot
        for (std::int64_t t = out.op.row_ptr[r]; t < out.op.row_ptr[r + 1]; ++t) {
            if (out.op.col[t] == r) {
                out.op.val[t] = diag;
                break;
            }
        }
    }
    return out;
}

std::vector<double> apply(const SparseOperator& op, std::span<const double> v) {
    if (static_cast<std::int64_t>(v.size()) != op.n) {
        throw ContractError("apply: vector length does not match operator size");
    }
    std::vector<double> y(static_cast<std::size_t>(op.n), 0.0);
    kernels::csr_matvec(op.n, op.row_ptr.data(), op.col.data(), op.val.data(),
                        v.data(), y.data());
    return y;
}

void write_matrix_market(std::ostream& out, const SparseOperator& op) {
    std::int64_t lower = 0;
    for (std::int64_t i = 0; i < op.n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            if (op.col[idx] <= i) ++lower;
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << op.n << " " << op.n << " " << lower << "\n";
    out.precision(17);
    for (std::int64_t i = 0; i < op.n; ++i) {
        for (std::int64_t idx = op.row_ptr[i]; idx < op.row_ptr[i + 1]; ++idx) {
            if (op.col[idx] <= i) {
                out << (i + 1) << " " << (op.col[idx] + 1) << " " << op.val[idx] << "\n";
            }
        }
    }
}

}  // namespace eigenseg
