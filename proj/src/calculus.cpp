// SPDX-License-Identifier: Apache-2.0
#include "gzspec/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gzspec {

using Cd = std::complex<double>;

namespace {

constexpr double kConditionCap = 1e12;

ComplexMatrix trapezoid_pass(const ComplexMatrix& a, const Contour& contour, int nodes,
                             const std::function<Cd(Cd)>& weight) {
    const Eigen::Index n = a.rows();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    ComplexMatrix id = ComplexMatrix::Identity(n, n);
    for (int k = 0; k < nodes; ++k) {
        double theta = 2.0 * M_PI * k / nodes;
        Cd unit = std::polar(1.0, theta);
        Cd lambda = contour.center + contour.radius * unit;
        Eigen::PartialPivLU<ComplexMatrix> lu(lambda * id - a);
        sum += (weight(lambda) * unit) * lu.solve(id);
    }
    return (contour.radius / nodes) * sum;
}

}  // namespace

ComplexMatrix contour_integral(const ComplexMatrix& a, const Contour& contour,
                               const std::function<Cd(Cd)>& weight, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols())
        raise(ErrorCode::invalid_argument, "contour integral needs a square matrix");
    if (!(contour.radius > 0)) raise(ErrorCode::invalid_argument, "contour radius must be positive");

    for (const Cd& lambda : eigenvalues(a)) {
        double dist = std::abs(std::abs(lambda - contour.center) - contour.radius);
        if (dist < contour.clearance())
            raise(ErrorCode::contour_too_close,
                  "contour passes within clearance of an eigenvalue");
    }

    ComplexMatrix prev = trapezoid_pass(a, contour, contour.initial_nodes, weight);
    for (int nodes = 2 * contour.initial_nodes; nodes <= contour.max_nodes; nodes *= 2) {
        ComplexMatrix next = trapezoid_pass(a, contour, nodes, weight);
        if ((next - prev).norm() < cfg.quadrature_tol) return next;
        prev = std::move(next);
    }
    raise(ErrorCode::no_convergence, "contour quadrature exhausted the node budget");
}

ComplexMatrix riesz_projection(const ComplexMatrix& a, const Contour& contour,
                               const ToleranceConfig& cfg) {
    ComplexMatrix p = contour_integral(a, contour, [](Cd) { return Cd(1.0); }, cfg);

    double scale = std::max(1.0, p.norm());
    if ((p * p - p).norm() > cfg.residual_tol * scale)
        raise(ErrorCode::no_convergence, "projection is not idempotent to tolerance");
    if ((a * p - p * a).norm() > cfg.residual_tol * std::max(1.0, a.norm()) * scale)
        raise(ErrorCode::no_convergence, "projection does not commute to tolerance");

    Eigen::Index enclosed = 0;
    for (const Cd& lambda : eigenvalues(a))
        if (std::abs(lambda - contour.center) < contour.radius) ++enclosed;
    double trace = p.trace().real();
    if (std::abs(trace - static_cast<double>(enclosed)) > 1e-6 * std::max<double>(1, enclosed) ||
        numerical_rank(p, cfg) != enclosed)
        raise(ErrorCode::no_convergence, "projection rank does not match enclosed count");
    return p;
}

bool InverseCertificate::residuals_ok(const ComplexMatrix& a, const ToleranceConfig& cfg) const {
    double scale = std::max(1.0, a.norm() * inverse.norm());
    if (commutation_residual > cfg.residual_tol * scale) return false;
    if (inner_residual > cfg.residual_tol * std::max(1.0, inverse.norm())) return false;
    if (route_difference > cfg.residual_tol * std::max(1.0, inverse.norm())) return false;
    if (r_independence > cfg.residual_tol * std::max(1.0, inverse.norm())) return false;
    return true;
}

namespace {

std::optional<int> drazin_index(const ComplexMatrix& a, const ComplexMatrix& s,
                                const ToleranceConfig& cfg) {
    const Eigen::Index n = a.rows();
    ComplexMatrix power = ComplexMatrix::Identity(n, n);
    for (int k = 0; k <= 2 * n; ++k) {
        if (k > 0) power = power * a;
        double scale = std::max(power.norm(), 1e-300);
        if ((power * s * a - power).norm() <= cfg.residual_tol * scale) return k;
    }
    return std::nullopt;
}

void fill_certificate(InverseCertificate& cert, const ComplexMatrix& a, const ToleranceConfig& cfg) {
    const ComplexMatrix& s = cert.inverse;
    cert.commutation_residual = (a * s - s * a).norm();
    cert.inner_residual = (s * a * s - s).norm();
    cert.core_degree = nilpotency_degree(a * a * s - a, cfg);
    cert.claimed_index = drazin_index(a, s, cfg);
    cert.dis_of_input = dis(a, cfg);
}

}  // namespace

InverseCertificate drazin_inverse(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "drazin needs a square matrix");
    const Eigen::Index n = a.rows();

    CoreNilSplit split = core_nil_split(a, cfg);
    const Eigen::Index nil_dim = split.nil_dim;

    InverseCertificate cert;
    if (nil_dim == n) {
        cert.inverse = ComplexMatrix::Zero(n, n);
        fill_certificate(cert, a, cfg);
        return cert;
    }

    const Eigen::Index r = n - nil_dim;
    ComplexMatrix b = split.t.topLeftCorner(r, r);
    double sigma_min = Eigen::JacobiSVD<ComplexMatrix>(b).singularValues()(r - 1);
    if (!(sigma_min > 0) || a.norm() / sigma_min > kConditionCap)
        raise(ErrorCode::conditioning, "core block too ill-conditioned");

    // Drazin inverse of [[B, C], [0, N]] with N (numerically) nilpotent:
    // [[B^{-1}, W], [0, 0]], W = sum_i B^{-(i+2)} C N^i. The series is summed
    // to convergence: the scattered zero eigenvalues leave N with a tiny
    // nonzero diagonal, and truncating at nil_dim would leave their residue
    // in the inverse identities. One step of iterative refinement per solve
    // removes the cond(B)-amplified part of the solve error, which the
    // certificate residual bounds cannot absorb at high conditioning.
    Eigen::PartialPivLU<ComplexMatrix> b_lu(b);
    auto refined_solve = [&](const ComplexMatrix& rhs) {
        ComplexMatrix x = b_lu.solve(rhs);
        x += b_lu.solve(rhs - b * x);
        return x;
    };
    ComplexMatrix block = ComplexMatrix::Zero(n, n);
    block.topLeftCorner(r, r) = refined_solve(ComplexMatrix::Identity(r, r));
    if (nil_dim > 0) {
        ComplexMatrix c = split.t.topRightCorner(r, nil_dim);
        ComplexMatrix nil = split.t.bottomRightCorner(nil_dim, nil_dim);
        ComplexMatrix term = c;
        ComplexMatrix sum = term;
        for (int i = 1; i <= 512; ++i) {
            term = refined_solve(term * nil);
            if (term.norm() <= 1e-18 * std::max(1.0, sum.norm()) && i >= nil_dim) break;
            sum += term;
            if (i == 512)
                raise(ErrorCode::conditioning,
                      "coupling series did not converge; zero cluster not separated");
        }
        block.topRightCorner(r, nil_dim) = refined_solve(refined_solve(sum));
    }
    cert.inverse = split.q * block * split.q.adjoint();
    fill_certificate(cert, a, cfg);
    return cert;
}

double clustering_gap(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    // The 10 rank_rtol ||A|| separation from the precondition, floored to
    // absorb the O(eps^{1/k}) scatter of computed defective eigenvalues. The
    // floor scales with the spectral radius, not ||A||: non-normality inflates
    // the norm without moving the eigenvalues.
    double radius = 0;
    for (const Cd& ev : eigenvalues(a)) radius = std::max(radius, std::abs(ev));
    double scatter_scale = std::max(1.0, radius);
    return std::max(10.0 * cfg.rank_rtol * std::max(1.0, a.norm()), 2e-3 * scatter_scale);
}

std::vector<std::vector<std::size_t>> cluster_eigenvalues(const std::vector<Cd>& eigs,
                                                          double gap) {
    const std::size_t n = eigs.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(eigs[i] - eigs[j]) <= gap) parent[find(i)] = find(j);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> group_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (group_of[root] < 0) {
            group_of[root] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(group_of[root])].push_back(i);
    }
    return groups;
}

GzInverseResult gz_inverse_for_set(const ComplexMatrix& a, const EigenvalueSelection& sel,
                                   std::optional<Cd> r_opt, const ToleranceConfig& cfg) {
    if (a.rows() != a.cols()) raise(ErrorCode::invalid_argument, "gz inverse needs square matrix");
    const Eigen::Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);

    std::vector<Cd> eigs = eigenvalues(a);
    double gap = clustering_gap(a, cfg);
    auto groups = cluster_eigenvalues(eigs, gap);

    double match_tol = std::max(gap, 1e-6 * std::max(1.0, a.norm()));
    std::vector<bool> selected(groups.size(), false);
    for (const Cd& anchor : sel.anchors) {
        bool matched = false;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            for (std::size_t idx : groups[g]) {
                if (std::abs(eigs[idx] - anchor) <= match_tol) {
                    selected[g] = true;
                    matched = true;
                    break;
                }
            }
        }
        if (!matched)
            raise(ErrorCode::invalid_spectral_set, "anchor matches no eigenvalue cluster");
    }

    // 0's cluster must be selected whenever 0 is in the spectrum.
    for (std::size_t g = 0; g < groups.size(); ++g) {
        bool has_zero = false;
        for (std::size_t idx : groups[g])
            if (std::abs(eigs[idx]) <= gap) has_zero = true;
        if (has_zero && !selected[g])
            raise(ErrorCode::invalid_spectral_set, "0 lies in sigma(A) \\ sigma");
    }

    GzInverseResult result;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t idx : groups[g])
            (selected[g] ? result.sigma : result.complement).push_back(eigs[idx]);

    // Separation between the two sides.
    for (const Cd& s : result.sigma)
        for (const Cd& k : result.complement)
            if (std::abs(s - k) < 10.0 * cfg.rank_rtol * std::max(1.0, a.norm()))
                raise(ErrorCode::invalid_spectral_set, "sigma is not separated from its complement");

    double sigma_radius = 0;
    for (const Cd& s : result.sigma) sigma_radius = std::max(sigma_radius, std::abs(s));
    Cd r = r_opt.value_or(Cd(2.0 * (1.0 + sigma_radius)));
    if (!(std::abs(r) > sigma_radius))
        raise(ErrorCode::invalid_argument, "|r| must exceed max |lambda| over sigma");
    result.r_used = r;

    InverseCertificate& cert = result.certificate;
    if (result.complement.empty()) {
        result.projection = id;
        cert.inverse = ComplexMatrix::Zero(n, n);
        fill_certificate(cert, a, cfg);
        return result;
    }

    // One circle around the complement: inside it the complement, outside it
    // sigma and the origin (the contour route integrates (1/lambda) R(lambda)).
    Cd center(0, 0);
    for (const Cd& k : result.complement) center += k;
    center /= static_cast<double>(result.complement.size());
    double lower = 0;
    for (const Cd& k : result.complement) lower = std::max(lower, std::abs(k - center));
    double upper = std::abs(center);
    for (const Cd& s : result.sigma) upper = std::min(upper, std::abs(s - center));
    if (!(upper > lower * 1.01 + 2e-3 * std::max(1.0, a.norm())))
        raise(ErrorCode::no_separating_contour,
              "no circle about the complement centroid separates the spectra");
    Contour contour{center, 0.5 * (lower + upper), 32, 4096};

    ComplexMatrix p_complement = riesz_projection(a, contour, cfg);
    result.projection = id - p_complement;

    auto solve_route = [&](Cd rv) {
        ComplexMatrix shifted = a + rv * result.projection;
        Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
        double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
        if (!(cond < kConditionCap))
            raise(ErrorCode::conditioning, "A + r P_sigma too ill-conditioned");
        return ComplexMatrix(shifted.partialPivLu().solve(id - result.projection));
    };

    cert.inverse = solve_route(r);
    ComplexMatrix via_contour =
        contour_integral(a, contour, [](Cd lambda) { return 1.0 / lambda; }, cfg);
    cert.route_difference = (cert.inverse - via_contour).norm();

    Cd r2 = r + Cd(1.0 + sigma_radius);
    cert.r_independence = (cert.inverse - solve_route(r2)).norm();

    fill_certificate(cert, a, cfg);
    return result;
}

CertificateCheck verify_certificate(const ComplexMatrix& a, const ComplexMatrix& s,
                                    const ToleranceConfig& cfg) {
    if (a.rows() != s.rows() || a.cols() != s.cols() || a.rows() != a.cols())
        raise(ErrorCode::invalid_argument, "certificate shapes do not match");
    CertificateCheck check;
    check.certificate.inverse = s;
    fill_certificate(check.certificate, a, cfg);

    if (s.norm() > 0) {
        check.s_ascent = ascent(s, cfg);
        check.s_descent = descent(s, cfg);
        check.s_dis = dis(s, cfg);
    } else {
        // ascent/descent of the zero matrix are 1 unless the space is trivial
        check.s_ascent = s.rows() > 0 ? 1 : 0;
        check.s_descent = check.s_ascent;
        check.s_dis = check.s_ascent;
    }
    check.regularity_ok =
        check.s_ascent == check.s_descent && check.s_ascent == check.s_dis && check.s_dis <= 1;

    InverseCertificate s_drazin = drazin_inverse(s, cfg);
    check.tst_drazin_residual = (a * s * a - s_drazin.inverse).norm();
    return check;
}

namespace {

void require_commuting_projection(const ComplexMatrix& a, const ComplexMatrix& p,
                                  const ToleranceConfig& cfg) {
    if (p.rows() != p.cols() || p.rows() != a.rows())
        raise(ErrorCode::invalid_projection, "projection shape mismatch");
    double scale = std::max(1.0, p.norm());
    if ((p * p - p).norm() > cfg.residual_tol * scale)
        raise(ErrorCode::invalid_projection, "P is not idempotent to tolerance");
    if ((a * p - p * a).norm() > cfg.residual_tol * std::max(1.0, a.norm()) * scale)
        raise(ErrorCode::invalid_projection, "P does not commute with A to tolerance");
}

}  // namespace

SplitResult additive_split(const ComplexMatrix& a, const ComplexMatrix& p,
                           const ToleranceConfig& cfg) {
    require_commuting_projection(a, p, cfg);
    SplitResult out;
    out.s = a * p;
    out.r = a - out.s;
    double scale = std::max(1.0, a.norm() * a.norm());
    if ((out.r * out.s).norm() > cfg.residual_tol * scale ||
        (out.s * out.r).norm() > cfg.residual_tol * scale)
        raise(ErrorCode::internal, "additive split identities violated");
    return out;
}

SplitResult multiplicative_split(const ComplexMatrix& a, const ComplexMatrix& p,
                                 const ToleranceConfig& cfg) {
    require_commuting_projection(a, p, cfg);
    const ComplexMatrix id = ComplexMatrix::Identity(a.rows(), a.cols());
    SplitResult out;
    out.s = a * p + (id - p);
    out.r = p + a * (id - p);
    double scale = std::max(1.0, (1.0 + a.norm()) * (1.0 + a.norm()));
    if ((out.s * out.r - a).norm() > cfg.residual_tol * scale ||
        (out.r * out.s - a).norm() > cfg.residual_tol * scale ||
        (out.s + out.r - id - a).norm() > cfg.residual_tol * scale)
        raise(ErrorCode::internal, "multiplicative split identities violated");
    return out;
}

PuncturedReport punctured_neighborhood_check(const ComplexMatrix& a, const ComplexMatrix& p,
                                             int sample_count, const ToleranceConfig& cfg,
                                             std::uint64_t seed) {
    require_commuting_projection(a, p, cfg);
    if (sample_count <= 0) raise(ErrorCode::invalid_argument, "sample_count must be positive");

    SubspaceBasis m_basis = range_basis(p, cfg);
    if (m_basis.dim() == 0)
        raise(ErrorCode::degenerate_restriction, "restriction subspace is trivial");
    ComplexMatrix a_m = m_basis.basis.adjoint() * a * m_basis.basis;

    PuncturedReport report;
    report.gamma_m = gamma(a_m, cfg);  // throws undefined-gamma for A_M = 0
    report.alpha_m = kernel_basis(a_m, cfg).dim();
    report.beta_m = a_m.cols() - numerical_rank(a_m, cfg);

    const Eigen::Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

    report.all_pass = true;
    for (int t = 0; t < sample_count; ++t) {
        PuncturedSample sample;
        sample.lambda = std::polar(report.gamma_m / 2.0, angle(rng));
        ComplexMatrix b = a - sample.lambda * id;

        SubspaceBasis kernel = kernel_basis(b, cfg);
        SubspaceBasis core = k_basis(b, cfg);
        sample.dim_kernel_core = subspace_intersection_dim(kernel, core, cfg);

        SubspaceBasis range = range_basis(b, cfg);
        SubspaceBasis h0 = h0_basis(b, cfg);
        sample.codim_range_h0 = n - subspace_sum_dim(range, h0, cfg);

        sample.pass = sample.dim_kernel_core == report.alpha_m &&
                      sample.codim_range_h0 == report.beta_m;
        report.all_pass = report.all_pass && sample.pass;
        report.samples.push_back(sample);
    }
    return report;
}

}  // namespace gzspec
