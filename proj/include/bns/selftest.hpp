#pragma once

#include <string>
#include <vector>

namespace bns {

struct SelftestResult {
    bool ok = false;
    std::string json;  ///< per-suite results, one object
};

/// Compact invariant suites (transforms, wavelets, norms, flows, solver
/// smoke) at desk scale; the full acceptance program lives in the test tree.
SelftestResult selftest();

}  // namespace bns
