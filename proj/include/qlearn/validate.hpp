#pragma once

#include <string>
#include <vector>

namespace qlearn {

struct InvariantCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool at_least = false;  // lower bound instead of upper bound

  /// Distance to the bound; non-negative when passing.
  [[nodiscard]] double margin() const { return at_least ? measured - tolerance : tolerance - measured; }
  [[nodiscard]] bool passed() const { return margin() >= 0.0; }
};

/// Every module invariant at pinned small sizes.
std::vector<InvariantCheck> run_validation();

}  // namespace qlearn
