#pragma once

// Runtime invariant suite behind `natrans validate`.

#include <string>
#include <vector>

namespace natrans {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<CheckResult> run_self_checks();

} // namespace natrans
