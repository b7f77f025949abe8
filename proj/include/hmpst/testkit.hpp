#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hmpst/compose.hpp"
#include "hmpst/kernel.hpp"

namespace hmpst::testkit {

struct GenParams {
    std::size_t max_depth = 4;
    std::size_t max_branches = 2;
    std::vector<RoleSet> role_pool;  // the partition E1..EN
    std::vector<Label> label_pool;
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument when the params break their invariants.
void check_params(const GenParams& p);

// Closed, guarded, well-formed, Msg-only. With two or more pools and
// max_depth >= 2 the result contains a message crossing two pools.
Type gen_global(const GenParams& p);

// Closed well-formed hybrid type. Roles of the first pool are internal,
// the rest external; Send/Recv prefixes cross that boundary.
Type gen_hybrid(const GenParams& p);

struct CompatibleInstance {
    Type gdagger;
    std::vector<Component> components;
    std::vector<Type> skeletons;  // project(gdagger, Ei) before decoration
};

CompatibleInstance gen_compatible(const GenParams& p);

// Every well-formed type of depth <= bound over the alphabets, one per
// alpha class (binders are named by nesting level), in a fixed order.
// `free` lists variables that may occur unbound; empty means closed types.
std::vector<Type> enumerate_small(std::size_t bound, const RoleSet& roles, const std::vector<Label>& labels,
                                  const std::vector<TypeVar>& free = {});

struct CorpusCase {
    std::string name;
    std::filesystem::path manifest;
    std::filesystem::path expected_dir;  // may not exist
};

// Every *.hmanifest under the fixtures tree, sorted by path.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& fixtures_root);

}  // namespace hmpst::testkit
