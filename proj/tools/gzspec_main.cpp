// SPDX-License-Identifier: Apache-2.0
//
// gzspec: analyze / invert / verify structured operator models.
//
//   gzspec analyze  operator.json --point 0 [--out report.json]
//   gzspec inverse  operator.json --spectral-set sigma.json [--r 3] [--out inv.json]
//   gzspec verify   operator.json --suite all [--samples 16]
//   gzspec truncate operator.json --n 8 [--out matrix.json]
//
// Exit codes: 0 success, 2 parse/usage error, 3 unsupported model query,
// 4 invalid spectral set, 5 residuals or numerics out of tolerance.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gzspec/report.hpp"

namespace {

using namespace gzspec;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitInvalidSpectralSet = 4;
constexpr int kExitResiduals = 5;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::parse_error:
        case ErrorCode::malformed_selection:
        case ErrorCode::invalid_argument:
            return kExitParse;
        case ErrorCode::unsupported_spectral_shape:
        case ErrorCode::not_semi_fredholm:
            return kExitUnsupported;
        case ErrorCode::invalid_spectral_set:
            return kExitInvalidSpectralSet;
        case ErrorCode::contour_too_close:
        case ErrorCode::no_convergence:
        case ErrorCode::no_separating_contour:
        case ErrorCode::conditioning:
        case ErrorCode::invalid_projection:
        case ErrorCode::degenerate_restriction:
        case ErrorCode::undefined_gamma:
            return kExitResiduals;
        case ErrorCode::depth_overflow:
            return kExitUnsupported;
        case ErrorCode::internal:
            return 1;
    }
    return 1;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::parse_error, "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(ErrorCode::parse_error, std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

void emit(const Json& j, const std::string& out_path) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) raise(ErrorCode::parse_error, "cannot write " + out_path);
    out << text;
}

std::string operator_id_of(const std::string& path, const Json& j) {
    if (j.is_object() && j.contains("id") && j.at("id").is_string())
        return j.at("id").get<std::string>();
    return std::filesystem::path(path).stem().string();
}

ToleranceConfig tolerance_profile() {
    const char* profile = std::getenv("GZSPEC_TOL_PROFILE");
    if (profile && std::string(profile) == "strict") return ToleranceConfig::strict();
    if (profile && std::string(profile) != "default" && std::string(profile)[0] != '\0')
        raise(ErrorCode::parse_error, "GZSPEC_TOL_PROFILE must be strict or default");
    return ToleranceConfig::defaults();
}

struct CommonArgs {
    std::string operator_path;
    std::string out_path;
    double tol_rank = -1;
    double tol_residual = -1;

    ToleranceConfig tolerances() const {
        ToleranceConfig cfg = tolerance_profile();
        if (tol_rank > 0) cfg.rank_rtol = tol_rank;
        if (tol_residual > 0) cfg.residual_tol = tol_residual;
        cfg.validate();
        return cfg;
    }
};

int cmd_analyze(const CommonArgs& args, const std::string& point_text) {
    Json oj = load_json(args.operator_path);
    OperatorModel m = operator_model_from_json(oj);
    ExactComplex point = exact_complex_from_string(point_text);
    ToleranceConfig cfg = args.tolerances();
    Json report = analyze_report(operator_id_of(args.operator_path, oj), m, point, cfg);
    emit(report, args.out_path);
    return kExitOk;
}

int cmd_inverse(const CommonArgs& args, const std::string& set_path, const std::string& r_text) {
    Json oj = load_json(args.operator_path);
    OperatorModel m = operator_model_from_json(oj);
    ToleranceConfig cfg = args.tolerances();
    Json set_json = set_path.empty() ? Json::object() : load_json(set_path);

    Json out;
    out["tool"] = "gzspec";
    out["tool_version"] = kToolVersion;
    out["operator_id"] = operator_id_of(args.operator_path, oj);
    out["tolerances"] = tolerances_to_json(cfg);

    bool ok = true;
    if (m.kind == OperatorModel::Kind::diagonal) {
        SpectralSetSelection sigma = selection_from_json(set_json);
        auto [inverse, cert] = gz_inverse_diagonal(m, sigma);
        out["inverse"] = to_json(inverse);
        out["certificate"] = diagonal_certificate_to_json(cert);
        ok = cert.commutes && cert.inner_identity && cert.inverse_regularity &&
             cert.spectrum_matches;
    } else if (m.kind == OperatorModel::Kind::finite_matrix) {
        EigenvalueSelection sel;
        if (set_json.contains("anchors"))
            for (const auto& a : set_json.at("anchors"))
                sel.anchors.push_back(exact_complex_from_json(a).to_complex());
        std::optional<std::complex<double>> r;
        if (!r_text.empty()) r = exact_complex_from_string(r_text).to_complex();
        GzInverseResult res = gz_inverse_for_set(m.matrix, sel, r, cfg);
        out["inverse"] = matrix_to_json(res.certificate.inverse);
        out["certificate"] = certificate_to_json(res.certificate, /*include_matrix=*/false);
        out["r_used"] = Json::array({res.r_used.real(), res.r_used.imag()});
        ok = res.certificate.residuals_ok(m.matrix, cfg);
    } else {
        raise(ErrorCode::unsupported_spectral_shape,
              "inverse construction needs a diagonal model or a finite matrix");
    }
    out["within_tolerance"] = ok;
    emit(out, args.out_path);
    return ok ? kExitOk : kExitResiduals;
}

int cmd_verify(const CommonArgs& args, const std::string& suite, int samples) {
    Json oj = load_json(args.operator_path);
    OperatorModel m = operator_model_from_json(oj);
    ToleranceConfig cfg = args.tolerances();
    auto checks = run_verify_suite(m, suite, samples, cfg);

    std::sort(checks.begin(), checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    bool all_pass = true;
    for (const auto& c : checks) {
        all_pass = all_pass && c.pass;
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
        if (c.residual != 0.0) std::cout << " (residual " << c.residual << ")";
        if (!c.detail.empty()) std::cout << " [" << c.detail << "]";
        std::cout << "\n";
    }
    if (!args.out_path.empty()) {
        Json out;
        out["tool"] = "gzspec";
        out["tool_version"] = kToolVersion;
        out["operator_id"] = operator_id_of(args.operator_path, oj);
        out["suite"] = suite;
        out["checks"] = checks_to_json(checks);
        out["all_pass"] = all_pass;
        out["tolerances"] = tolerances_to_json(cfg);
        emit(out, args.out_path);
    }
    return all_pass ? kExitOk : kExitResiduals;
}

int cmd_truncate(const CommonArgs& args, long n) {
    Json oj = load_json(args.operator_path);
    OperatorModel m = operator_model_from_json(oj);
    ComplexMatrix t = truncate(m, static_cast<Eigen::Index>(n));
    emit(matrix_to_json(t), args.out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral generalized-inverse toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string point_text = "0";
    std::string set_path;
    std::string r_text;
    std::string suite = "all";
    int samples = 16;
    long truncate_n = 8;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("operator", args.operator_path, "operator spec JSON")->required();
        cmd->add_option("--out", args.out_path, "output path (stdout when omitted)");
        cmd->add_option("--tol-rank", args.tol_rank, "relative singular value cutoff");
        cmd->add_option("--tol-residual", args.tol_residual, "verification threshold");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "classify a point against the lattice");
    add_common(analyze);
    analyze->add_option("--point", point_text, "query point (complex, exact)");

    CLI::App* inverse = app.add_subcommand("inverse", "construct a g_z / Drazin inverse");
    add_common(inverse);
    inverse->add_option("--spectral-set", set_path, "selection JSON (or anchors for matrices)");
    inverse->add_option("--r", r_text, "shift scalar r");

    CLI::App* verify = app.add_subcommand("verify", "run a named property suite");
    add_common(verify);
    verify->add_option("--suite", suite,
                       "drazin | gz | splits | punctured | index | perturbation | all");
    verify->add_option("--samples", samples, "sample count for sampled suites");

    CLI::App* trunc = app.add_subcommand("truncate", "emit the N x N compression");
    add_common(trunc);
    trunc->add_option("--n", truncate_n, "truncation size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParse;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(args, point_text);
        if (app.got_subcommand(inverse)) return cmd_inverse(args, set_path, r_text);
        if (app.got_subcommand(verify)) return cmd_verify(args, suite, samples);
        if (app.got_subcommand(trunc)) return cmd_truncate(args, truncate_n);
    } catch (const gzspec::Error& e) {
        std::cerr << "gzspec: " << error_code_name(e.code()) << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "gzspec: internal: " << e.what() << "\n";
        return 1;
    }
    return kExitParse;
}
