#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmpst/compose.hpp"
#include "hmpst/kernel.hpp"

namespace hmpst {

struct SourceSpan {
    std::size_t byte_start = 0;
    std::size_t byte_end = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

struct ParseError {
    SourceSpan span;
    std::string expected;
    std::string found;
    std::string source;  // file name, when known
};

std::string to_string(const ParseError& e);

class ParseException : public std::runtime_error {
public:
    explicit ParseException(ParseError e);
    const ParseError& error() const { return err_; }

private:
    ParseError err_;
};

// Throws ParseException on syntax errors and Failure when the text violates
// a construction invariant (self-interaction, duplicate label, shadowing).
Type parse_type(const std::string& text);

struct ParseOutcome {
    std::optional<Type> type;
    std::optional<ParseError> error;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return type.has_value(); }
};
ParseOutcome try_parse_type(const std::string& text);

// Canonical multi-line rendering with two-space indentation.
std::string print_type(const Type& h);
// One-line rendering, for messages.
std::string print_inline(const Type& h);
// Just the head constructor, e.g. "p -> q" or "rec X".
std::string print_inline_head(const Type& h);
std::string print_sort(const Sort& s);

// Paths in the manifest are resolved against base_dir. Throws
// ParseException or Failure; the spec is validated before returning.
CompositionSpec parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
CompositionSpec load_manifest(const std::filesystem::path& file);
Type load_type(const std::filesystem::path& file);

std::string read_file(const std::filesystem::path& file);

}  // namespace hmpst
