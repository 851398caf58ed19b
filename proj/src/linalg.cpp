// SPDX-License-Identifier: Apache-2.0
#include "gzspec/linalg.hpp"

#include <cmath>

namespace gzspec {

void ToleranceConfig::validate() const {
    if (!(rank_rtol > 0) || !(rank_rtol < 1) || !(residual_tol > 0) || !(quadrature_tol > 0))
        raise(ErrorCode::invalid_argument, "tolerances must be positive with rank_rtol < 1");
}

void check_finite(const ComplexMatrix& a) {
    if (!a.allFinite()) raise(ErrorCode::invalid_argument, "matrix has non-finite entries");
}

namespace {

Eigen::JacobiSVD<ComplexMatrix> svd_of(const ComplexMatrix& a, unsigned computation = 0) {
    return Eigen::JacobiSVD<ComplexMatrix>(a, computation);
}

Eigen::Index rank_from_svd(const Eigen::JacobiSVD<ComplexMatrix>& svd,
                           const ToleranceConfig& cfg) {
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double cutoff = cfg.rank_rtol * sv(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

}  // namespace

Eigen::Index numerical_rank(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    check_finite(a);
    if (a.size() == 0) return 0;
    return rank_from_svd(svd_of(a), cfg);
}

SubspaceBasis kernel_basis(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    check_finite(a);
    auto svd = svd_of(a, Eigen::ComputeFullV);
    Eigen::Index r = rank_from_svd(svd, cfg);
    return {svd.matrixV().rightCols(a.cols() - r)};
}

SubspaceBasis range_basis(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    check_finite(a);
    auto svd = svd_of(a, Eigen::ComputeFullU);
    Eigen::Index r = rank_from_svd(svd, cfg);
    return {svd.matrixU().leftCols(r)};
}

std::optional<int> nilpotency_degree(const ComplexMatrix& x, const ToleranceConfig& cfg) {
    if (x.rows() != x.cols())
        raise(ErrorCode::invalid_argument, "nilpotency test needs a square matrix");
    const Eigen::Index n = x.rows();
    double base = x.norm();
    ComplexMatrix power = x;
    for (int k = 1; k <= n; ++k) {
        if (k > 1) power = power * x;
        if (power.norm() <= cfg.residual_tol * std::pow(base, k - 1)) return k;
    }
    return std::nullopt;
}

namespace {

// Swap the adjacent diagonal entries T(k,k), T(k+1,k+1) of an upper
// triangular T by a unitary similarity, accumulating it into Q.
void swap_schur_entries(ComplexMatrix& t, ComplexMatrix& q, Eigen::Index k) {
    std::complex<double> a = t(k, k), b = t(k, k + 1), c = t(k + 1, k + 1);
    // eigenvector of [[a, b], [0, c]] for eigenvalue c
    std::complex<double> vx = b, vy = c - a;
    double norm = std::sqrt(std::norm(vx) + std::norm(vy));
    if (norm == 0) return;  // equal entries; nothing to do
    Eigen::Matrix2cd g;
    g << vx / norm, -std::conj(vy) / norm, vy / norm, std::conj(vx) / norm;
    t.middleCols(k, 2) = t.middleCols(k, 2) * g;
    t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
    q.middleCols(k, 2) = q.middleCols(k, 2) * g;
    t(k + 1, k) = 0;
}

}  // namespace

CoreNilSplit core_nil_split(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "split needs a square matrix");
    const Eigen::Index n = a.rows();

    Eigen::ComplexSchur<ComplexMatrix> schur(a, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        raise(ErrorCode::no_convergence, "Schur iteration failed");
    CoreNilSplit split;
    split.t = schur.matrixT();
    split.q = schur.matrixU();

    // Selection sort by |diagonal| descending via adjacent unitary swaps.
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = i;
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (std::abs(split.t(j, j)) > std::abs(split.t(best, best))) best = j;
        for (Eigen::Index k = best; k > i; --k) swap_schur_entries(split.t, split.q, k - 1);
    }

    // Size of the numerically-zero eigenvalue cluster. Gate: full-rank
    // matrices have none. All moduli below the rank-policy threshold means
    // the whole matrix counts as nilpotent. Otherwise the sorted moduli are
    // split at the outermost clear multiplicative gap (defective zeros
    // scatter by O(eps^{1/k}) but stay well under genuine eigenvalues),
    // falling back to the policy threshold when no gap qualifies.
    split.nil_dim = 0;
    if (numerical_rank(a, cfg) == n) return split;
    std::vector<double> moduli(n);
    for (Eigen::Index i = 0; i < n; ++i) moduli[i] = std::abs(split.t(i, i));
    std::sort(moduli.begin(), moduli.end());
    double m_max = moduli.back();
    double sigma_max = a.norm();
    if (m_max <= cfg.rank_rtol * sigma_max) {
        split.nil_dim = n;
        return split;
    }
    // Outermost gap below the cap: scatter from defective blocks of different
    // index spans many magnitudes internally, so the split sits at the last
    // qualifying jump, not the largest one.
    Eigen::Index gap_split = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (moduli[i] > 0.3 * m_max) break;
        double ratio = moduli[i + 1] / std::max(moduli[i], 1e-300);
        if (ratio >= 16.0) gap_split = i + 1;
    }
    if (gap_split > 0) {
        split.nil_dim = gap_split;
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            if (moduli[i] <= cfg.rank_rtol * sigma_max) split.nil_dim = i + 1;
    }
    return split;
}

namespace {

// Trailing block with its numerically-zero diagonal stripped: exactly
// nilpotent, so the rank chain of its powers has clean cutoffs (a 1x1
// scatter block would otherwise read as full rank against itself). The
// stripped scatter re-enters the powers as noise of size eps_diag ||N||^{m-1},
// so rank decisions carry that explicit absolute floor.
struct NilBlock {
    ComplexMatrix n0;
    double noise_scale = 0;  // max(stripped diagonal, eps ||N0||)
};

NilBlock nil_block_of(const CoreNilSplit& split) {
    const Eigen::Index k = split.nil_dim;
    NilBlock block;
    block.n0 = split.t.bottomRightCorner(k, k);
    double eps_diag = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        eps_diag = std::max(eps_diag, std::abs(block.n0(i, i)));
        block.n0(i, i) = 0;
    }
    block.noise_scale = std::max(eps_diag, 1e-15 * block.n0.norm());
    return block;
}

double power_noise_floor(const NilBlock& block, Eigen::Index m) {
    double norm = std::max(block.n0.norm(), 1.0);
    return 4.0 * block.n0.rows() * block.noise_scale * std::pow(norm, static_cast<double>(m - 1));
}

Eigen::Index rank_with_floor(const ComplexMatrix& a, double floor_abs,
                             const ToleranceConfig& cfg) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& sv = svd.singularValues();
    double cutoff = std::max(cfg.rank_rtol * sv(0), floor_abs);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

// dim N(A^k) = dim N(N^k) for the trailing block of the split; identical to
// the range-stabilization chain in finite dimension.
std::vector<Eigen::Index> kernel_dim_chain(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    CoreNilSplit split = core_nil_split(a, cfg);
    const Eigen::Index k = split.nil_dim;
    std::vector<Eigen::Index> dims;
    dims.push_back(0);
    if (k == 0) {
        dims.push_back(0);
        return dims;
    }
    NilBlock block = nil_block_of(split);
    ComplexMatrix power = ComplexMatrix::Identity(k, k);
    for (Eigen::Index j = 1; j <= k + 1; ++j) {
        power = power * block.n0;
        dims.push_back(k - rank_with_floor(power, power_noise_floor(block, j), cfg));
    }
    return dims;
}

Eigen::Index chain_stabilization(const std::vector<Eigen::Index>& dims) {
    for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
        if (dims[k] == dims[k + 1]) return static_cast<Eigen::Index>(k);
    }
    raise(ErrorCode::internal, "kernel chain failed to stabilize");
}

}  // namespace

Eigen::Index ascent(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "ascent needs a square matrix");
    return chain_stabilization(kernel_dim_chain(a, cfg));
}

Eigen::Index descent(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "descent needs a square matrix");
    // rank(A^k) = n - dim N(A^k) for square A: the chains stabilize together.
    return chain_stabilization(kernel_dim_chain(a, cfg));
}

Eigen::Index dis(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "dis needs a square matrix");
    // k_m = dim(N(A) n R(A^m)) = rank(A^m) - rank(A^{m+1}), so the whole
    // chain reads off the stabilized kernel dimensions.
    auto dims = kernel_dim_chain(a, cfg);
    std::vector<Eigen::Index> chain;
    for (std::size_t m = 0; m + 1 < dims.size(); ++m) chain.push_back(dims[m + 1] - dims[m]);
    Eigen::Index stable = chain.back();
    Eigen::Index m = static_cast<Eigen::Index>(chain.size()) - 1;
    while (m > 0 && chain[m - 1] == stable) --m;
    return m;
}

double gamma(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    check_finite(a);
    auto svd = svd_of(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0)
        raise(ErrorCode::undefined_gamma, "gamma undefined for the zero matrix");
    double cutoff = cfg.rank_rtol * sv(0);
    double smallest = -1;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) smallest = sv(i);
    if (smallest <= 0) raise(ErrorCode::undefined_gamma, "gamma undefined for the zero matrix");
    return smallest;
}

SubspaceBasis h0_basis(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    Eigen::Index p = ascent(a, cfg);
    return kernel_basis(matrix_power(a, p), cfg);
}

SubspaceBasis k_basis(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    Eigen::Index p = ascent(a, cfg);
    return range_basis(matrix_power(a, p), cfg);
}

std::vector<std::complex<double>> eigenvalues(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        raise(ErrorCode::invalid_argument, "eigenvalues need a square matrix");
    check_finite(a);
    if (a.rows() == 0) return {};
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        raise(ErrorCode::no_convergence, "eigenvalue iteration failed");
    std::vector<std::complex<double>> out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix matrix_power(const ComplexMatrix& a, Eigen::Index n) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "matrix power needs square");
    if (n < 0) raise(ErrorCode::invalid_argument, "matrix power needs n >= 0");
    ComplexMatrix out = ComplexMatrix::Identity(a.rows(), a.rows());
    for (Eigen::Index i = 0; i < n; ++i) out = out * a;
    return out;
}

Eigen::Index subspace_sum_dim(const SubspaceBasis& u, const SubspaceBasis& v,
                              const ToleranceConfig& cfg) {
    if (u.dim() == 0) return v.dim();
    if (v.dim() == 0) return u.dim();
    ComplexMatrix joined(u.ambient(), u.dim() + v.dim());
    joined << u.basis, v.basis;
    return numerical_rank(joined, cfg);
}

Eigen::Index subspace_intersection_dim(const SubspaceBasis& u, const SubspaceBasis& v,
                                       const ToleranceConfig& cfg) {
    if (u.dim() == 0 || v.dim() == 0) return 0;
    return u.dim() + v.dim() - subspace_sum_dim(u, v, cfg);
}

SubspaceBasis subspace_intersection_basis(const SubspaceBasis& u, const SubspaceBasis& v,
                                          const ToleranceConfig& cfg) {
    if (u.dim() == 0 || v.dim() == 0) return {ComplexMatrix(u.ambient(), 0)};
    // Principal vectors: singular values of U^H V near 1 mark the intersection.
    ComplexMatrix m = u.basis.adjoint() * v.basis;
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) >= 1.0 - cfg.residual_tol) ++count;
    }
    return {u.basis * svd.matrixU().leftCols(count)};
}

}  // namespace gzspec
