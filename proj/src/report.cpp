// SPDX-License-Identifier: Apache-2.0
#include "gzspec/report.hpp"

#include <algorithm>

namespace gzspec {

using Cd = std::complex<double>;

Json tolerances_to_json(const ToleranceConfig& cfg) {
    Json j;
    j["rank_rtol"] = cfg.rank_rtol;
    j["residual_tol"] = cfg.residual_tol;
    j["quadrature_tol"] = cfg.quadrature_tol;
    return j;
}

Json certificate_to_json(const InverseCertificate& cert, bool include_matrix) {
    Json j;
    if (include_matrix) j["inverse"] = matrix_to_json(cert.inverse);
    j["commutation_residual"] = cert.commutation_residual;
    j["inner_residual"] = cert.inner_residual;
    if (cert.core_degree) j["core_residual"] = *cert.core_degree;
    else j["core_residual"] = "not nilpotent";
    if (cert.claimed_index) j["claimed_index"] = *cert.claimed_index;
    else j["claimed_index"] = nullptr;
    j["dis"] = cert.dis_of_input;
    j["route_difference"] = cert.route_difference;
    j["r_independence"] = cert.r_independence;
    return j;
}

Json diagonal_certificate_to_json(const DiagonalGzCertificate& cert) {
    Json j;
    j["commutes"] = cert.commutes;
    j["inner_identity"] = cert.inner_identity;
    j["core_zeroloid"] = cert.core_zeroloid;
    j["inverse_regularity"] = cert.inverse_regularity;
    j["spectrum_matches"] = cert.spectrum_matches;
    j["core_entries"] = to_json(cert.core_entries);
    j["expected_spectrum"] = to_json(cert.expected_spectrum);
    return j;
}

Json checks_to_json(std::vector<CheckResult> checks) {
    std::sort(checks.begin(), checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    Json out = Json::array();
    for (const auto& c : checks) {
        Json j;
        j["name"] = c.name;
        j["pass"] = c.pass;
        j["residual"] = c.residual;
        if (!c.detail.empty()) j["detail"] = c.detail;
        out.push_back(std::move(j));
    }
    return out;
}

namespace {

Json extended_nat_to_json(const ExtendedNat& n) {
    if (n.infinite) return "inf";
    return n.value;
}

}  // namespace

Json analyze_report(const std::string& operator_id, const OperatorModel& m,
                    const ExactComplex& point, const ToleranceConfig& cfg) {
    Classification c = classify(m, point);
    PointData pd = point_data(m, point);

    Json j;
    j["tool"] = "gzspec";
    j["tool_version"] = kToolVersion;
    j["operator_id"] = operator_id;
    j["point"] = to_json(point);
    j["classification"] = tier_name(c.tier);
    j["browder"] = c.browder;
    Json tiers;
    tiers["in_spectrum"] = c.in_spectrum;
    tiers["in_acc"] = c.in_acc;
    tiers["in_acc_acc"] = c.in_acc_acc;
    j["spectral_tiers"] = std::move(tiers);
    Json sided;
    sided["left_invertible"] = c.left_invertible;
    sided["right_invertible"] = c.right_invertible;
    j["one_sided"] = std::move(sided);
    Json data;
    data["alpha"] = extended_nat_to_json(pd.alpha);
    data["beta"] = extended_nat_to_json(pd.beta);
    data["isolated"] = pd.isolated;
    j["point_data"] = std::move(data);
    j["certificates"] = Json::array();
    j["checks"] = Json::array();
    j["tolerances"] = tolerances_to_json(cfg);
    return j;
}

// --------------------------------------------------------------------------
// Verify suites
// --------------------------------------------------------------------------

namespace {

bool matrix_like(const OperatorModel& m) {
    return m.kind == OperatorModel::Kind::finite_matrix ||
           m.kind == OperatorModel::Kind::diagonal ||
           m.kind == OperatorModel::Kind::perturbation;
}

// The matrix a suite works on: finite matrices directly, diagonal models via
// a fixed-size compression (valid there: compression commutes with the
// entrywise inverse construction).
ComplexMatrix working_matrix(const OperatorModel& m) {
    if (m.kind == OperatorModel::Kind::finite_matrix) return m.matrix;
    return truncate(m, 12);
}

CheckResult check_leq(std::string name, double residual, double bound) {
    return {std::move(name), residual <= bound, residual, {}};
}

CheckResult check_flag(std::string name, bool pass) { return {std::move(name), pass, 0.0, {}}; }

std::vector<CheckResult> suite_drazin(const OperatorModel& m, const ToleranceConfig& cfg) {
    ComplexMatrix a = working_matrix(m);
    InverseCertificate cert = drazin_inverse(a, cfg);
    double scale = std::max(1.0, a.norm() * cert.inverse.norm());
    std::vector<CheckResult> checks;
    checks.push_back(check_leq("drazin.commutes", cert.commutation_residual,
                               cfg.residual_tol * scale));
    checks.push_back(check_leq("drazin.sts_equals_s", cert.inner_residual,
                               cfg.residual_tol * std::max(1.0, cert.inverse.norm())));
    CheckResult idx = check_flag("drazin.index_equals_dis",
                                 cert.claimed_index && *cert.claimed_index == cert.dis_of_input);
    idx.detail = cert.claimed_index ? "index " + std::to_string(*cert.claimed_index) +
                                          ", dis " + std::to_string(cert.dis_of_input)
                                    : "index not found";
    checks.push_back(std::move(idx));
    checks.push_back(check_flag("drazin.core_nilpotent",
                                cert.core_degree &&
                                    (!cert.claimed_index || *cert.core_degree <=
                                                                std::max(1, *cert.claimed_index))));
    return checks;
}

std::vector<CheckResult> suite_gz_matrix(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    EigenvalueSelection sel;
    double zero_tol = clustering_gap(a, cfg);
    bool has_zero = false;
    for (const Cd& ev : eigenvalues(a))
        if (std::abs(ev) <= zero_tol) has_zero = true;
    if (has_zero) sel.anchors.push_back(Cd(0.0));
    GzInverseResult res = gz_inverse_for_set(a, sel, std::nullopt, cfg);
    const InverseCertificate& cert = res.certificate;
    double s_scale = std::max(1.0, cert.inverse.norm());

    std::vector<CheckResult> checks;
    checks.push_back(
        check_leq("gz.routes_agree", cert.route_difference, cfg.residual_tol * s_scale));
    checks.push_back(
        check_leq("gz.r_independent", cert.r_independence, cfg.residual_tol * s_scale));
    checks.push_back(check_leq("gz.commutes", cert.commutation_residual,
                               cfg.residual_tol * std::max(1.0, a.norm() * s_scale)));
    checks.push_back(
        check_leq("gz.sts_equals_s", cert.inner_residual, cfg.residual_tol * s_scale));

    CertificateCheck verify = verify_certificate(a, cert.inverse, cfg);
    checks.push_back(check_flag("gz.inverse_regularity", verify.regularity_ok));
    checks.push_back(check_leq("gz.tst_is_drazin_of_s", verify.tst_drazin_residual,
                               cfg.residual_tol * std::max(1.0, a.norm() * a.norm() * s_scale)));
    return checks;
}

// The canonical sigma for a diagonal model: the part of the spectrum that
// meets or accumulates at 0 (zero points, depth-1 clusters limited at 0, and
// individual atoms equal to 0 moved across).
SpectralSetSelection canonical_zero_selection(const SpectrumModel& sp) {
    ExactComplex zero;
    SpectralSetSelection sigma;
    for (std::size_t i = 0; i < sp.points.size(); ++i)
        if (sp.points[i].is_zero()) sigma.selected_points.push_back(i);
    for (std::size_t i = 0; i < sp.clusters.size(); ++i) {
        const Cluster& c = sp.clusters[i];
        if (c.limit_value() == zero) {
            if (c.depth2())
                raise(ErrorCode::unsupported_spectral_shape,
                      "0 is a second-order accumulation point; no g_z inverse exists");
            sigma.selected_clusters.push_back({i, ClusterMode::whole});
        } else if (auto n = c.find_atom(zero)) {
            sigma.boundary_moves.push_back({i, *n});
        } else if (c.contains(zero)) {
            raise(ErrorCode::unsupported_spectral_shape,
                  "0 sits on a depth-2 leaf; move the enclosing child explicitly");
        }
    }
    return sigma;
}

std::vector<CheckResult> suite_gz_diagonal(const OperatorModel& m) {
    SpectrumModel sp = spectrum(m).countable;
    auto [inverse, cert] = gz_inverse_diagonal(m, canonical_zero_selection(sp));
    std::vector<CheckResult> checks;
    checks.push_back(check_flag("gz.commutes_exact", cert.commutes));
    checks.push_back(check_flag("gz.sts_equals_s_exact", cert.inner_identity));
    checks.push_back(check_flag("gz.core_zeroloid", cert.core_zeroloid));
    checks.push_back(check_flag("gz.inverse_regularity", cert.inverse_regularity));
    checks.push_back(check_flag("gz.spectrum_mapping", cert.spectrum_matches));
    return checks;
}

std::vector<CheckResult> suite_gz(const OperatorModel& m, const ToleranceConfig& cfg) {
    if (m.kind == OperatorModel::Kind::diagonal) return suite_gz_diagonal(m);
    return suite_gz_matrix(working_matrix(m), cfg);
}

// Projection onto the cluster of eigenvalues nearest zero (identity when the
// spectrum forms a single cluster).
ComplexMatrix zero_cluster_projection(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    std::vector<Cd> eigs = eigenvalues(a);
    auto groups = cluster_eigenvalues(eigs, clustering_gap(a, cfg));
    if (groups.size() == 1) return ComplexMatrix::Identity(a.rows(), a.cols());
    std::size_t best = 0;
    double best_abs = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t idx : groups[g]) {
            if (std::abs(eigs[idx]) < best_abs) {
                best_abs = std::abs(eigs[idx]);
                best = g;
            }
        }
    }
    Cd center(0, 0);
    for (std::size_t idx : groups[best]) center += eigs[idx];
    center /= static_cast<double>(groups[best].size());
    double inner = 0, outer = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t idx : groups[g]) {
            double d = std::abs(eigs[idx] - center);
            if (g == best) inner = std::max(inner, d);
            else outer = std::min(outer, d);
        }
    }
    if (!(outer > inner * 1.01))
        raise(ErrorCode::no_separating_contour, "zero cluster is not separated");
    return riesz_projection(a, Contour{center, 0.5 * (inner + outer)}, cfg);
}

std::vector<CheckResult> suite_splits(const OperatorModel& m, const ToleranceConfig& cfg) {
    ComplexMatrix a = working_matrix(m);
    ComplexMatrix p = zero_cluster_projection(a, cfg);
    double scale2 = std::max(1.0, (1.0 + a.norm()) * (1.0 + a.norm()));

    std::vector<CheckResult> checks;
    SplitResult add = additive_split(a, p, cfg);
    checks.push_back(check_leq("splits.additive_sum", (add.s + add.r - a).norm(),
                               cfg.residual_tol * scale2));
    checks.push_back(check_leq("splits.additive_annihilate",
                               std::max((add.s * add.r).norm(), (add.r * add.s).norm()),
                               cfg.residual_tol * scale2));
    SplitResult mul = multiplicative_split(a, p, cfg);
    checks.push_back(check_leq("splits.multiplicative_product",
                               std::max((mul.s * mul.r - a).norm(), (mul.r * mul.s - a).norm()),
                               cfg.residual_tol * scale2));
    ComplexMatrix id = ComplexMatrix::Identity(a.rows(), a.cols());
    checks.push_back(check_leq("splits.multiplicative_sum", (mul.s + mul.r - id - a).norm(),
                               cfg.residual_tol * scale2));
    return checks;
}

bool has_separated_invertible_part(const ComplexMatrix& a, const ToleranceConfig& cfg) {
    std::vector<Cd> eigs = eigenvalues(a);
    auto groups = cluster_eigenvalues(eigs, clustering_gap(a, cfg));
    if (groups.size() < 2) return false;
    double zero_tol = clustering_gap(a, cfg);
    for (const auto& g : groups) {
        bool has_zero = false;
        for (std::size_t idx : g)
            if (std::abs(eigs[idx]) <= zero_tol) has_zero = true;
        if (has_zero) return true;
    }
    return false;
}

std::vector<CheckResult> suite_punctured(const OperatorModel& m, int samples,
                                         const ToleranceConfig& cfg) {
    ComplexMatrix a = working_matrix(m);
    if (!has_separated_invertible_part(a, cfg))
        raise(ErrorCode::unsupported_spectral_shape,
              "punctured suite needs a separated invertible part");
    ComplexMatrix p0 = zero_cluster_projection(a, cfg);
    ComplexMatrix p = ComplexMatrix::Identity(a.rows(), a.cols()) - p0;
    PuncturedReport report = punctured_neighborhood_check(a, p, samples, cfg);
    std::vector<CheckResult> checks;
    CheckResult all = check_flag("punctured.all_samples", report.all_pass);
    all.detail = std::to_string(report.samples.size()) + " samples at radius " +
                 std::to_string(report.gamma_m / 2.0);
    checks.push_back(std::move(all));
    return checks;
}

const OperatorModel* find_shift(const OperatorModel& m) {
    if (m.kind == OperatorModel::Kind::shift) return &m;
    if (m.kind == OperatorModel::Kind::direct_sum) {
        for (const auto& c : m.children)
            if (const OperatorModel* s = find_shift(c)) return s;
    }
    return nullptr;
}

std::vector<CheckResult> suite_index(const OperatorModel& m) {
    const OperatorModel* shift = find_shift(m);
    if (!shift) raise(ErrorCode::unsupported_spectral_shape, "index suite needs a shift model");
    ExactComplex zero;
    long base = index_at(*shift, zero);
    long expected = shift->shift.direction == ShiftDirection::left ? 1 : -1;
    std::vector<CheckResult> checks;
    checks.push_back(check_flag("index.base", base == expected));
    checks.push_back(check_flag("index.adjoint", index_at(adjoint_model(*shift), zero) == -base));
    checks.push_back(check_flag("index.power3", index_at(make_power(*shift, 3), zero) == 3 * base));
    checks.push_back(check_flag(
        "index.sum_with_adjoint",
        index_at(make_direct_sum({*shift, adjoint_model(*shift)}), zero) == 0));
    return checks;
}

std::vector<CheckResult> suite_perturbation(const OperatorModel& m) {
    if (m.kind != OperatorModel::Kind::diagonal)
        raise(ErrorCode::unsupported_spectral_shape, "perturbation suite needs a diagonal model");
    ExactComplex zero;
    Classification before = classify(m, zero);

    // Edit only positions whose spectrum edit is representable.
    std::vector<std::size_t> editable = editable_entry_indices(m, 12);
    if (editable.empty())
        raise(ErrorCode::unsupported_spectral_shape, "no editable diagonal entries");
    auto clamp = [&](std::size_t idx) { return editable[idx % editable.size()]; };
    std::vector<std::vector<std::pair<std::size_t, ExactComplex>>> edits = {
        {{clamp(0), ExactComplex(7)}},
        {{clamp(1), ExactComplex(0)}},
        {{clamp(2), ExactComplex(make_rational(1, 2), make_rational(-1, 3))},
         {clamp(3), ExactComplex(5)}},
    };
    std::vector<CheckResult> checks;
    for (std::size_t i = 0; i < edits.size(); ++i) {
        // dedupe clamped indices within one edit set
        std::vector<std::pair<std::size_t, ExactComplex>> support;
        for (const auto& [idx, v] : edits[i]) {
            bool dup = false;
            for (const auto& [j, w] : support) dup = dup || j == idx;
            if (!dup) support.push_back({idx, v});
        }
        OperatorModel edited = perturb(m, support);
        Classification after = classify(edited, zero);
        bool same_gz = (before.tier == Classification::Tier::none) ==
                       (after.tier == Classification::Tier::none);
        checks.push_back(
            check_flag("perturbation.gz_tier_stable_" + std::to_string(i), same_gz));
    }
    return checks;
}

}  // namespace

bool suite_known(const std::string& suite) {
    return suite == "drazin" || suite == "gz" || suite == "splits" || suite == "punctured" ||
           suite == "index" || suite == "perturbation" || suite == "all";
}

bool suite_applicable(const OperatorModel& m, const std::string& suite) {
    if (suite == "drazin" || suite == "splits") return matrix_like(m);
    if (suite == "punctured") {
        if (!matrix_like(m)) return false;
        ToleranceConfig cfg;
        return has_separated_invertible_part(working_matrix(m), cfg);
    }
    if (suite == "gz") {
        if (!matrix_like(m)) return false;
        if (m.kind == OperatorModel::Kind::diagonal)
            return classify(m, ExactComplex()).tier != Classification::Tier::none;
        return true;
    }
    if (suite == "index") return find_shift(m) != nullptr;
    if (suite == "perturbation") return m.kind == OperatorModel::Kind::diagonal;
    return suite == "all";
}

std::vector<CheckResult> run_verify_suite(const OperatorModel& m, const std::string& suite,
                                          int samples, const ToleranceConfig& cfg) {
    if (!suite_known(suite)) raise(ErrorCode::parse_error, "unknown suite: " + suite);
    if (suite == "all") {
        std::vector<CheckResult> checks;
        for (const char* name : {"drazin", "gz", "splits", "punctured", "index", "perturbation"}) {
            if (!suite_applicable(m, name)) continue;
            auto part = run_verify_suite(m, name, samples, cfg);
            checks.insert(checks.end(), part.begin(), part.end());
        }
        if (checks.empty())
            raise(ErrorCode::unsupported_spectral_shape, "no suite applies to this model");
        return checks;
    }
    if (!suite_applicable(m, suite))
        raise(ErrorCode::unsupported_spectral_shape, "suite does not apply to this model shape");
    if (suite == "drazin") return suite_drazin(m, cfg);
    if (suite == "gz") return suite_gz(m, cfg);
    if (suite == "splits") return suite_splits(m, cfg);
    if (suite == "punctured") return suite_punctured(m, samples, cfg);
    if (suite == "index") return suite_index(m);
    return suite_perturbation(m);
}

}  // namespace gzspec
