// SPDX-License-Identifier: Apache-2.0
//
// Numeric test oracles, independent of the contour/deflation code paths they
// check: spectral projections from a full eigendecomposition, and optimal
// eigenvalue-set matching via bitmask-DP assignment (exact for n <= ~20).
#pragma once

#include <bitset>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "gzspec/linalg.hpp"

namespace gzspec::testing {

using Cd = std::complex<double>;

// Sum of eigenprojections over the selected eigenvalues: V 1_sel V^{-1}.
// Requires a diagonalizable matrix.
inline ComplexMatrix eigenprojection_sum(const ComplexMatrix& a,
                                         const std::function<bool(Cd)>& selected) {
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    const Eigen::Index n = a.rows();
    ComplexMatrix indicator = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (selected(solver.eigenvalues()(i))) indicator(i, i) = 1.0;
    const ComplexMatrix& v = solver.eigenvectors();
    return v * indicator * v.partialPivLu().solve(ComplexMatrix::Identity(n, n));
}

// Minimum-total-cost perfect matching between two equal-size eigenvalue
// multisets; returns the largest matched pair distance. Exact DP over subsets.
inline double matched_eigenvalue_distance(std::vector<Cd> a, std::vector<Cd> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    if (n > 20) throw std::logic_error("matching oracle sized for small spectra");

    const std::size_t full = (1u << n) - 1u;
    std::vector<double> cost(n << n);  // unused; placeholder to keep sizes explicit
    std::vector<double> best(full + 1, std::numeric_limits<double>::infinity());
    std::vector<int> choice(full + 1, -1);
    best[0] = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
        if (!std::isfinite(best[mask])) continue;
        std::size_t i = static_cast<std::size_t>(std::bitset<32>(mask).count());
        for (std::size_t j = 0; j < n; ++j) {
            if (mask & (1u << j)) continue;
            std::size_t next = mask | (1u << j);
            double c = best[mask] + std::abs(a[i] - b[j]);
            if (c < best[next]) {
                best[next] = c;
                choice[next] = static_cast<int>(j);
            }
        }
    }
    // Recover the matching to report the bottleneck distance.
    double worst = 0.0;
    std::size_t mask = full;
    for (std::size_t i = n; i-- > 0;) {
        int j = choice[mask];
        if (j < 0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(a[i] - b[static_cast<std::size_t>(j)]));
        mask &= ~(1u << static_cast<unsigned>(j));
    }
    return worst;
}

}  // namespace gzspec::testing
