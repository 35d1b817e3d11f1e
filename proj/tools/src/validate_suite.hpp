#pragma once

#include <string>
#include <vector>

namespace pbftpool::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Built-in oracle suite: brute-force stationary solve, closed-form queue
// reduction, generator well-formedness, solver cross-check, simulator guard
// equivalence, and a short simulation cross-validation. `inject_fault`
// flips one simulator guard so the equivalence check must fail.
std::vector<CheckResult> run_validation_suite(bool inject_fault);

}  // namespace pbftpool::cli
