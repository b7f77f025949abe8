#pragma once

#include "hmpst/kernel.hpp"

namespace hmpst {

// Localiser merge: union on Send labels, identical labels elsewhere.
Type merge_loc(const Type& a, const Type& b);
Type merge_loc_all(const std::vector<Type>& hs);

// Erases global messages, keeps Send/Recv openings. Throws Failure when
// undefined.
Type localise(const Type& h);

Result<Type> try_merge_loc(const Type& a, const Type& b);
Result<Type> try_localise(const Type& h);

}  // namespace hmpst
