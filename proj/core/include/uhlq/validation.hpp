#pragma once

#include <string>
#include <vector>

namespace uhlq {

enum class ValidationLevel { fast, full };

/// One registered check: `measured` must stay under `bound` (upper) or
/// above it (lower) to pass.
struct CheckResult {
    std::string name;
    int criterion = 0; // grouping index used by the acceptance suite
    double measured = 0.0;
    double bound = 0.0;
    enum class Kind { upper, lower } kind = Kind::upper;
    bool pass = false;
    std::string detail;
};

CheckResult upper_check(std::string name, int criterion, double measured, double bound,
                        std::string detail = {});
CheckResult lower_check(std::string name, int criterion, double measured, double bound,
                        std::string detail = {});

/// Runs the identity/oracle suites (transport identity, vanishing dynamic
/// phase, analytic-vs-numeric holonomy and Loschmidt amplitude, limits,
/// incompatibility, cyclicity, detector soundness, representation
/// equivalence, figure preset structure).
std::vector<CheckResult> run_validation(ValidationLevel level);

bool all_passed(const std::vector<CheckResult>& checks);

std::string validation_report_json(const std::vector<CheckResult>& checks, ValidationLevel level);

} // namespace uhlq
