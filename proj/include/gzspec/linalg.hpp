// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gzspec/errors.hpp"

namespace gzspec {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct ToleranceConfig {
    double rank_rtol = 1e-10;      // relative singular-value cutoff
    double residual_tol = 1e-8;    // verification threshold
    double quadrature_tol = 1e-10; // contour convergence threshold

    static ToleranceConfig defaults() { return {}; }
    static ToleranceConfig strict() { return {1e-12, 1e-10, 1e-12}; }
    void validate() const;
};

struct SubspaceBasis {
    ComplexMatrix basis;  // orthonormal columns

    Eigen::Index dim() const { return basis.cols(); }
    Eigen::Index ambient() const { return basis.rows(); }
};

// Rank = number of singular values above rank_rtol * sigma_max.
Eigen::Index numerical_rank(const ComplexMatrix& a, const ToleranceConfig& cfg);
SubspaceBasis kernel_basis(const ComplexMatrix& a, const ToleranceConfig& cfg);
SubspaceBasis range_basis(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Smallest n <= dim with ||X^n|| <= residual_tol ||X||^{n-1}; absent when X is
// not numerically nilpotent. Normalized power norms keep the test meaningful
// for non-normal X.
std::optional<int> nilpotency_degree(const ComplexMatrix& x, const ToleranceConfig& cfg);

// Unitary split A = Q [B C; 0 N] Q^H with the numerically-zero eigenvalue
// cluster collected in the trailing block N. The kernel chains of A reduce to
// those of the small balanced block N, which keeps rank decisions meaningful
// under ill-conditioned similarity (explicit powers of A lose the smallest
// singular values to roundoff long before the chain stabilizes).
struct CoreNilSplit {
    ComplexMatrix q;       // unitary
    ComplexMatrix t;       // upper triangular, eigenvalue moduli descending
    Eigen::Index nil_dim;  // trailing numerically-nilpotent block size
};
CoreNilSplit core_nil_split(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Smallest n with N(A^n) = N(A^{n+1}) (resp. range stabilization); both are
// finite in finite dimension and always equal, which is asserted.
Eigen::Index ascent(const ComplexMatrix& a, const ToleranceConfig& cfg);
Eigen::Index descent(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Degree of stable iteration: smallest m with dim(N(A) n R(A^n)) constant for
// all n >= m.
Eigen::Index dis(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Reduced minimal modulus: smallest nonzero singular value. Undefined for 0.
double gamma(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Quasi-nilpotent part H0 = N(A^p) and analytic core K = R(A^p), p = ascent.
SubspaceBasis h0_basis(const ComplexMatrix& a, const ToleranceConfig& cfg);
SubspaceBasis k_basis(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Backward-stable dense eigenvalues (with multiplicity).
std::vector<std::complex<double>> eigenvalues(const ComplexMatrix& a);

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix matrix_power(const ComplexMatrix& a, Eigen::Index n);

// dim(span(U) n span(V)) for orthonormal bases, via the rank of [U V].
Eigen::Index subspace_intersection_dim(const SubspaceBasis& u, const SubspaceBasis& v,
                                       const ToleranceConfig& cfg);
// dim(span(U) + span(V)).
Eigen::Index subspace_sum_dim(const SubspaceBasis& u, const SubspaceBasis& v,
                              const ToleranceConfig& cfg);
// Principal-angle route to the intersection (basis of near-angle-zero
// directions); cross-checks the rank formula in tests.
SubspaceBasis subspace_intersection_basis(const SubspaceBasis& u, const SubspaceBasis& v,
                                          const ToleranceConfig& cfg);

void check_finite(const ComplexMatrix& a);

}  // namespace gzspec
