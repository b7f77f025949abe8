#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hmpst/kernel.hpp"

namespace hmpst {

struct Component {
    Type protocol;
    RoleSet roles;
};

enum class Mode { Standard, Optimised };

struct CompositionSpec {
    Type compat;
    std::vector<Component> components;
    Mode mode = Mode::Standard;
    RoleSet compat_roles;  // only meaningful in Optimised mode
};

struct CompatEntry {
    std::size_t index = 0;
    RoleSet roles;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

struct CompositionResult {
    std::optional<Type> global_type;
    std::map<Role, Type> locals;
    std::vector<CompatEntry> compat_report;
    std::vector<Diagnostic> errors;
    bool ok() const { return global_type.has_value() && errors.empty(); }
};

struct VerifyStats {
    std::size_t unmerge_checks = 0;
    std::size_t buildback_checks = 0;
};

struct ComposeOptions {
    // Re-check the unmerge equations and the round-trip equations on
    // every internal call. A violation raises rule "lemma-violation".
    bool verify = false;
    VerifyStats* stats = nullptr;
};

using Matrix = std::vector<std::vector<Type>>;

std::vector<Diagnostic> check_compat(const Type& gdagger, const Component& c);
// Component and spec invariants; empty when the spec is usable.
std::vector<Diagnostic> validate_component(const Component& c);
std::vector<Diagnostic> validate_spec(const CompositionSpec& spec);

// Row i re-merges under the localiser merge to ps[i]; column j re-merges
// under the projection merge to ls[j].
Matrix unmerge_lp(const std::vector<Type>& ps, const std::vector<Type>& ls,
                  const ComposeOptions& opts = {});
// Row i re-merges under the projection merge to ls[i]; column j re-merges
// under the localiser merge to ps[j].
Matrix unmerge_pl(const std::vector<Type>& ls, const std::vector<Type>& ps,
                  const ComposeOptions& opts = {});
std::vector<Type> unmerge_l(const Type& hdagger, const std::vector<Type>& ls, const RoleSet& e,
                            const ComposeOptions& opts = {});
std::vector<Type> unmerge_p(const Type& he, const std::vector<Type>& ps, const RoleSet& e,
                            const ComposeOptions& opts = {});

// All of these throw Failure when undefined.
Type build_back_one(const Type& gdagger, const Component& c, const ComposeOptions& opts = {});
Type build_back(const Type& gdagger, const std::vector<Component>& cs,
                const ComposeOptions& opts = {});

CompositionResult compose_spec(const CompositionSpec& spec, const ComposeOptions& opts = {});

}  // namespace hmpst
