#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "eigenseg/field.hpp"
#include "eigenseg/weight.hpp"

namespace eigenseg {

/// Symmetric positive-definite sparse matrix over the interior degrees of
/// freedom, compressed sparse row, column indices sorted per row. Built by
/// assemble() as the flux-form discretization of -div(mu grad .) with
/// homogeneous Dirichlet conditions.
struct SparseOperator {
    int n = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }

    /// Maximum absolute column sum; equals the row version by symmetry.
    double norm1() const;
};

/// Face conductances from interior nodes to adjacent boundary nodes.
/// Row r lists (full-grid boundary node, conductance) pairs for interior
/// DOF r; rhs() turns Dirichlet data on the boundary into a load vector.
struct BoundaryCoupling {
    int n = 0;
    std::vector<std::int64_t> row_ptr;
    std::vector<int> boundary_node;
    std::vector<double> conductance;

    std::vector<double> rhs(const ScalarField& boundary_values) const;
};

struct AssembledOperator {
    SparseOperator op;
    BoundaryCoupling coupling;
};

enum class FaceAverage { harmonic, arithmetic };

/// Five-point (three-point in 1-D) assembly. The conductance of the face
/// between nodes p and q is face_avg(mu_p, mu_q)/h^2; the diagonal sums all
/// face conductances including faces to boundary nodes, which are recorded
/// in the coupling instead of the matrix. Harmonic averaging is the
/// default: it lets the conductance collapse across low-weight edges.
AssembledOperator assemble(const WeightField& weight, const DomainMask& mask,
                           FaceAverage average = FaceAverage::harmonic);

/// y = A * v. Deterministic for any thread count.
std::vector<double> apply(const SparseOperator& op, std::span<const double> v);

/// Matrix Market coordinate format, symmetric, lower triangle, 1-based.
void write_matrix_market(std::ostream& out, const SparseOperator& op);

}  // namespace eigenseg
