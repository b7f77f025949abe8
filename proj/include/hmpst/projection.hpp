#pragma once

#include "hmpst/kernel.hpp"

namespace hmpst {

// Full merge. Throws Failure (rule "merge-failure") when undefined; the
// diagnostic path points into the first argument.
Type merge_proj(const Type& a, const Type& b);
// Left fold over a non-empty list.
Type merge_proj_all(const std::vector<Type>& hs);

// Projection onto a role set. Throws Failure when undefined.
Type project(const Type& h, const RoleSet& e);
Type project_role(const Type& h, const Role& r);

Result<Type> try_merge_proj(const Type& a, const Type& b);
Result<Type> try_project(const Type& h, const RoleSet& e);
Result<Type> try_project_role(const Type& h, const Role& r);

}  // namespace hmpst
