#pragma once

namespace atraj::acceptance {

/// Runs one acceptance criterion (1-8), printing a PASS/FAIL line with the
/// measured quantities. Returns true on pass.
bool run_criterion(int criterion);

}  // namespace atraj::acceptance
