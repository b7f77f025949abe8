#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmpst {

using Role = std::string;
using Label = std::string;
using TypeVar = std::string;
using RoleSet = std::set<Role>;
using Path = std::vector<std::size_t>;

class Sort {
public:
    enum class Kind { Unit, Nat, Int, Bool, Sum, Product };

    Sort() = default;
    static Sort unit() { return Sort(Kind::Unit); }
    static Sort nat() { return Sort(Kind::Nat); }
    static Sort integer() { return Sort(Kind::Int); }
    static Sort boolean() { return Sort(Kind::Bool); }
    static Sort sum(Sort l, Sort r);
    static Sort product(Sort l, Sort r);

    Kind kind() const { return kind_; }
    const Sort& left() const { return *left_; }
    const Sort& right() const { return *right_; }
    bool is_unit() const { return kind_ == Kind::Unit; }

    friend bool operator==(const Sort& a, const Sort& b);
    friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }

private:
    explicit Sort(Kind k) : kind_(k) {}
    Kind kind_ = Kind::Unit;
    std::shared_ptr<const Sort> left_, right_;
};

std::string to_string(const Sort& s);

class Node;
using Type = std::shared_ptr<const Node>;

struct Branch {
    Label label;
    Sort payload;
    Type cont;
};

enum class Kind { End, Var, Rec, Par, Msg, Send, Recv };

// Immutable AST node. Build through the factory functions below; branches
// are sorted by label on construction.
class Node {
public:
    Kind kind() const { return kind_; }
    const TypeVar& var() const { return a_; }
    const Role& from() const { return a_; }
    const Role& to() const { return b_; }
    const Type& body() const { return left_; }
    const Type& left() const { return left_; }
    const Type& right() const { return right_; }
    const std::vector<Branch>& branches() const { return branches_; }
    bool is_interaction() const {
        return kind_ == Kind::Msg || kind_ == Kind::Send || kind_ == Kind::Recv;
    }
    std::size_t child_count() const;
    const Type& child(std::size_t i) const;

    friend Type end();
    friend Type var(TypeVar x);
    friend Type rec(TypeVar x, Type body);
    friend Type par(Type l, Type r);
    friend Type interaction(Kind k, Role from, Role to, std::vector<Branch> bs);

private:
    Node() = default;
    Kind kind_ = Kind::End;
    std::string a_, b_;
    Type left_, right_;
    std::vector<Branch> branches_;
};

Type end();
Type var(TypeVar x);
Type rec(TypeVar x, Type body);
Type par(Type l, Type r);
Type interaction(Kind k, Role from, Role to, std::vector<Branch> bs);
inline Type msg(Role p, Role q, std::vector<Branch> bs) {
    return interaction(Kind::Msg, std::move(p), std::move(q), std::move(bs));
}
inline Type send(Role p, Role q, std::vector<Branch> bs) {
    return interaction(Kind::Send, std::move(p), std::move(q), std::move(bs));
}
inline Type recv(Role p, Role q, std::vector<Branch> bs) {
    return interaction(Kind::Recv, std::move(p), std::move(q), std::move(bs));
}
// Same head as h, new branches.
Type with_branches(const Type& h, std::vector<Branch> bs);
// Same branch labels and payloads as h, continuations replaced.
Type with_conts(const Type& h, const std::vector<Type>& conts);

struct Diagnostic {
    std::string rule;
    Path path;
    std::string message;
};

std::string path_string(const Path& p);
std::string to_string(const Diagnostic& d);

// Thrown internally by partial operations; public entry points convert it
// into a Result.
class Failure : public std::runtime_error {
public:
    explicit Failure(Diagnostic d);
    const Diagnostic& diagnostic() const { return diag_; }
    Diagnostic& diagnostic() { return diag_; }

private:
    Diagnostic diag_;
};

[[noreturn]] void fail(std::string rule, std::string message, Path path = {});

template <class T>
class Result {
public:
    Result(T v) : value_(std::move(v)) {}
    Result(Diagnostic d) : error_(std::move(d)) {}

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }
    const T& value() const {
        if (!value_) throw Failure(*error_);
        return *value_;
    }
    const T& operator*() const { return value(); }
    const T* operator->() const { return &value(); }
    const Diagnostic& error() const { return *error_; }

private:
    std::optional<T> value_;
    std::optional<Diagnostic> error_;
};

template <class F>
auto capture(F&& f) -> Result<decltype(f())> {
    try {
        return f();
    } catch (const Failure& e) {
        return e.diagnostic();
    }
}

RoleSet parts(const Type& h);
RoleSet eparts(const Type& h);
inline RoleSet participants(const Type& h) {
    RoleSet s = parts(h);
    RoleSet e = eparts(h);
    s.insert(e.begin(), e.end());
    return s;
}
bool is_guarded(const Type& h);
bool is_closed(const Type& h);
RoleSet free_vars(const Type& h);
bool is_global(const Type& h);
bool is_local(const Type& h);
std::vector<Diagnostic> check_wellformed(const Type& h);
std::size_t depth(const Type& h);
bool equal(const Type& a, const Type& b);
// Index of the first branch with that label, or -1.
int find_branch(const Type& h, const Label& l);
// Path of the first position where a and b differ; nullopt if equal.
std::optional<Path> first_difference(const Type& a, const Type& b);
const Type& subterm(const Type& h, const Path& p);

bool intersects(const RoleSet& a, const RoleSet& b);
bool subset(const RoleSet& a, const RoleSet& b);
std::string to_string(const RoleSet& s);

}  // namespace hmpst
