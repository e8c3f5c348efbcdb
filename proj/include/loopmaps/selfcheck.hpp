#pragma once

#include <iosfwd>

namespace loopmaps::selfcheck {

// Runs the cross-cutting invariant suite (ring oracles, enumeration
// landmarks, zeta identities, closed-form critical points, twist model)
// printing one line per check. Returns the number of failures.
int run(std::ostream& os);

}  // namespace loopmaps::selfcheck
