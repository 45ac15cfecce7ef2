#pragma once

#include <ostream>

namespace dlc {

/// Runs every acceptance criterion, printing one PASS/FAIL line per
/// criterion. Returns the number of failed criteria.
int run_acceptance(std::ostream& os);

}  // namespace dlc
