#pragma once

#include "hmpst/kernel.hpp"

namespace hmpst::detail {

// Shared body of the two merges. Branchings of kind `union_kind` take the
// label union; every other branching needs identical labels and payloads.
Type merge_with(const Type& a, const Type& b, Kind union_kind);
Type merge_all_with(const std::vector<Type>& hs, Kind union_kind);

}  // namespace hmpst::detail
