// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "gzspec/calculus.hpp"
#include "gzspec/json_io.hpp"

namespace gzspec {

inline constexpr const char* kToolVersion = "0.1.0";

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

Json tolerances_to_json(const ToleranceConfig& cfg);
Json certificate_to_json(const InverseCertificate& cert, bool include_matrix = true);
Json diagonal_certificate_to_json(const DiagonalGzCertificate& cert);
// Canonical order: sorted by check name.
Json checks_to_json(std::vector<CheckResult> checks);

// Full analyze report for one point query.
Json analyze_report(const std::string& operator_id, const OperatorModel& m,
                    const ExactComplex& point, const ToleranceConfig& cfg);

// Named property suites driven by cmd_verify. "all" runs every suite that is
// applicable to the model's shape.
bool suite_known(const std::string& suite);
bool suite_applicable(const OperatorModel& m, const std::string& suite);
std::vector<CheckResult> run_verify_suite(const OperatorModel& m, const std::string& suite,
                                          int samples, const ToleranceConfig& cfg);

}  // namespace gzspec
