#pragma once

#include <filesystem>
#include <string>

#include "hmpst/kernel.hpp"
#include "hmpst/surface.hpp"

namespace fixtures {

inline std::filesystem::path root() { return FIXTURES_DIR; }
inline std::filesystem::path mutants() { return MUTANTS_DIR; }
inline hmpst::Type load(const std::string& rel) { return hmpst::load_type(root() / rel); }

}  // namespace fixtures

inline hmpst::Type T(const std::string& s) { return hmpst::parse_type(s); }
