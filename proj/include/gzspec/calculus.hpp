// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gzspec/linalg.hpp"

namespace gzspec {

struct Contour {
    std::complex<double> center;
    double radius = 1.0;
    int initial_nodes = 32;
    int max_nodes = 4096;

    // The circle must keep this clearance from every eigenvalue.
    double clearance() const { return 1e-3 * radius; }
};

// (1/2 pi i) contour integral of weight(lambda) (lambda I - A)^{-1} d lambda
// by trapezoidal quadrature with node doubling until successive estimates
// differ by less than quadrature_tol.
ComplexMatrix contour_integral(const ComplexMatrix& a, const Contour& contour,
                               const std::function<std::complex<double>(std::complex<double>)>& weight,
                               const ToleranceConfig& cfg);

// Spectral projection onto the eigenvalues strictly inside the contour.
// Verifies P^2 = P, AP = PA and rank(P) = enclosed eigenvalue count.
ComplexMatrix riesz_projection(const ComplexMatrix& a, const Contour& contour,
                               const ToleranceConfig& cfg);

struct InverseCertificate {
    ComplexMatrix inverse;
    double commutation_residual = 0;  // ||TS - ST||_F
    double inner_residual = 0;        // ||STS - S||_F
    // Smallest n <= dim with ||(T^2 S - T)^n|| <= residual_tol ||T^2 S - T||^{n-1};
    // absent when no such n exists ("not nilpotent").
    std::optional<int> core_degree;
    // Smallest n with ||T^n S T - T^n|| <= residual_tol ||T^n||; absent when the
    // Drazin relation fails for every n <= 2 dim (possible for g_z inverses
    // whose sigma contains nonzero spectrum).
    std::optional<int> claimed_index;
    Eigen::Index dis_of_input = 0;

    // g_z extras
    double route_difference = 0;  // algebraic vs contour construction
    double r_independence = 0;    // two admissible r values

    bool residuals_ok(const ComplexMatrix& a, const ToleranceConfig& cfg) const;
};

// Core-nilpotent construction: p = ascent(A), S inverts A on R(A^p) and
// vanishes on N(A^p).
InverseCertificate drazin_inverse(const ComplexMatrix& a, const ToleranceConfig& cfg);

// Single-linkage eigenvalue clustering; the gap floor absorbs the O(eps^{1/k})
// scatter of defective eigenvalues.
double clustering_gap(const ComplexMatrix& a, const ToleranceConfig& cfg);
std::vector<std::vector<std::size_t>> cluster_eigenvalues(
    const std::vector<std::complex<double>>& eigs, double gap);

// sigma is named by anchors: every eigenvalue cluster containing a value
// within matching distance of an anchor is selected.
struct EigenvalueSelection {
    std::vector<std::complex<double>> anchors;
};

struct GzInverseResult {
    InverseCertificate certificate;
    ComplexMatrix projection;  // P_sigma
    std::vector<std::complex<double>> sigma;
    std::vector<std::complex<double>> complement;
    std::complex<double> r_used;
};

GzInverseResult gz_inverse_for_set(const ComplexMatrix& a, const EigenvalueSelection& sel,
                                   std::optional<std::complex<double>> r,
                                   const ToleranceConfig& cfg);

struct CertificateCheck {
    InverseCertificate certificate;
    Eigen::Index s_ascent = 0;
    Eigen::Index s_descent = 0;
    Eigen::Index s_dis = 0;
    bool regularity_ok = false;      // ascent(S) = descent(S) = dis(S) <= 1
    double tst_drazin_residual = 0;  // ||T S T - drazin(S)||_F
};

// Recomputes every residual for an externally supplied S; never throws on a
// failing check, the certificate carries the numbers.
CertificateCheck verify_certificate(const ComplexMatrix& a, const ComplexMatrix& s,
                                    const ToleranceConfig& cfg);

struct SplitResult {
    ComplexMatrix s;
    ComplexMatrix r;
};

// T = S + R with SR = RS = 0 (S = AP, R = A(I-P)).
SplitResult additive_split(const ComplexMatrix& a, const ComplexMatrix& p,
                           const ToleranceConfig& cfg);
// SR = RS = (S + R) - I = A with S = AP + (I-P), R = P + A(I-P).
SplitResult multiplicative_split(const ComplexMatrix& a, const ComplexMatrix& p,
                                 const ToleranceConfig& cfg);

struct PuncturedSample {
    std::complex<double> lambda;
    Eigen::Index dim_kernel_core = 0;   // dim(N(A - lambda) n K(A - lambda))
    Eigen::Index codim_range_h0 = 0;    // codim(R(A - lambda) + H0(A - lambda))
    bool pass = false;
};

struct PuncturedReport {
    double gamma_m = 0;
    Eigen::Index alpha_m = 0;
    Eigen::Index beta_m = 0;
    std::vector<PuncturedSample> samples;
    bool all_pass = false;
};

// Samples lambda on |lambda| = gamma(A_M)/2 and checks the punctured
// neighborhood identities against alpha/beta of the restriction A_M, M = R(P).
PuncturedReport punctured_neighborhood_check(const ComplexMatrix& a, const ComplexMatrix& p,
                                             int sample_count, const ToleranceConfig& cfg,
                                             std::uint64_t seed = 0x5eed);

}  // namespace gzspec
