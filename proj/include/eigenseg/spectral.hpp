#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eigenseg/field.hpp"
#include "eigenseg/operator.hpp"

namespace eigenseg {

struct SolverInfo {
    std::string method;
    double tol = 0.0;
    int sweeps = 0;
    int iterations = 0;        // Lanczos steps (inverse applies) in total
    std::uint64_t seed = 0;
};

/// Ascending eigenpairs of the assembled operator. Eigenfunctions live on
/// the full grid (zero on boundary and excluded nodes) and are
/// mesh-orthonormal: inner_product(phi_i, phi_j) = delta_ij. The entry of
/// largest magnitude of each eigenfunction is positive. residuals holds
/// ||A phi - lambda phi||_2 / ||A||_1 per pair.
struct EigenBasis {
    std::vector<double> eigenvalues;
    std::vector<ScalarField> eigenfields;
    std::vector<double> residuals;
    DomainMask mask;
    double gamma = 0.0;
    bool gamma_degenerate = false;
    std::string weight_law;
    SolverInfo solver;

    int count() const { return static_cast<int>(eigenvalues.size()); }
};

struct EigsOptions {
    int k = 8;
    double tol = 1e-8;          // residual bound relative to ||A||_1
    int max_basis = 0;          // per-sweep Krylov cap, 0 = automatic
    int max_sweeps = 40;
    std::uint64_t seed = 0x0eac9c84d9f7b2a1ULL;
};

/// k smallest eigenpairs by shift-invert Lanczos: the operator inverse is
/// applied through a banded Cholesky factorization, the Krylov basis is
/// kept fully reorthogonalized, and repeated eigenvalues are resolved by
/// deflation sweeps with fresh start vectors. Throws SolverError (carrying
/// the best residuals) when the budget runs out.
EigenBasis smallest_eigenpairs(const SparseOperator& op, const DomainMask& mask,
                               const EigsOptions& options);

/// Same surface backed by the dense reference decomposition; used where a
/// complete basis of a small operator is needed.
EigenBasis eigenbasis_from_dense(const SparseOperator& op, const DomainMask& mask, int k);

/// Weighted-harmonic extension of boundary data: solves A u = C g by
/// preconditioned conjugate gradients to the given relative residual and
/// returns the full-grid field (u on the interior, g on the boundary, 0 on
/// excluded nodes). zero_boundary replaces g by 0, giving the zero field.
ScalarField solve_prolongation(const SparseOperator& op, const BoundaryCoupling& coupling,
                               const DomainMask& mask, const ScalarField& boundary_values,
                               bool zero_boundary = false, double rtol = 1e-10);

/// Expansion of an image over an eigenbasis: image = i0 + sum beta_m phi_m.
struct Expansion {
    ScalarField i0;
    std::vector<double> coefficients;
};

/// beta_m = <image - i0, phi_m>; exact by orthonormality.
Expansion project(const ScalarField& image, const EigenBasis& basis, const ScalarField& i0);

/// i0 + sum of the first K coefficient-weighted eigenfunctions. Values are
/// not clamped; clamping happens only at image export.
ScalarField reconstruct(const Expansion& expansion, const EigenBasis& basis, int K);

struct SparsifyResult {
    EigenBasis basis;
    std::vector<double> fraction_zeroed;  // per eigenfunction
    double tau = 0.0;
};

/// Zeroes eigenfunction entries below tau * max|phi| and reports the
/// fraction of entries zeroed per function.
SparsifyResult sparsify(const EigenBasis& basis, double tau = 1e-3);

/// spectrum.json: gamma, weight law, k, tol, eigenvalues, residuals.
void write_spectrum_json(const std::filesystem::path& path, const EigenBasis& basis);

}  // namespace eigenseg
