#include "hmpst/kernel.hpp"

#include <algorithm>
#include <sstream>

namespace hmpst {

Sort Sort::sum(Sort l, Sort r) {
    Sort s(Kind::Sum);
    s.left_ = std::make_shared<const Sort>(std::move(l));
    s.right_ = std::make_shared<const Sort>(std::move(r));
    return s;
}

Sort Sort::product(Sort l, Sort r) {
    Sort s(Kind::Product);
    s.left_ = std::make_shared<const Sort>(std::move(l));
    s.right_ = std::make_shared<const Sort>(std::move(r));
    return s;
}

bool operator==(const Sort& a, const Sort& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Sort::Kind::Sum || a.kind_ == Sort::Kind::Product)
        return *a.left_ == *b.left_ && *a.right_ == *b.right_;
    return true;
}

std::string to_string(const Sort& s) {
    switch (s.kind()) {
    case Sort::Kind::Unit: return "unit";
    case Sort::Kind::Nat: return "nat";
    case Sort::Kind::Int: return "int";
    case Sort::Kind::Bool: return "bool";
    case Sort::Kind::Sum: return "(" + to_string(s.left()) + " + " + to_string(s.right()) + ")";
    case Sort::Kind::Product: return "(" + to_string(s.left()) + " * " + to_string(s.right()) + ")";
    }
    return "?";
}

std::size_t Node::child_count() const {
    switch (kind_) {
    case Kind::End:
    case Kind::Var: return 0;
    case Kind::Rec: return 1;
    case Kind::Par: return 2;
    default: return branches_.size();
    }
}

const Type& Node::child(std::size_t i) const {
    switch (kind_) {
    case Kind::Rec: return left_;
    case Kind::Par: return i == 0 ? left_ : right_;
    default: return branches_.at(i).cont;
    }
}

Type end() {
    static const Type e = Type(new Node());
    return e;
}

Type var(TypeVar x) {
    auto n = new Node();
    n->kind_ = Kind::Var;
    n->a_ = std::move(x);
    return Type(n);
}

Type rec(TypeVar x, Type body) {
    auto n = new Node();
    n->kind_ = Kind::Rec;
    n->a_ = std::move(x);
    n->left_ = std::move(body);
    return Type(n);
}

Type par(Type l, Type r) {
    auto n = new Node();
    n->kind_ = Kind::Par;
    n->left_ = std::move(l);
    n->right_ = std::move(r);
    return Type(n);
}

Type interaction(Kind k, Role from, Role to, std::vector<Branch> bs) {
    auto n = new Node();
    n->kind_ = k;
    n->a_ = std::move(from);
    n->b_ = std::move(to);
    std::stable_sort(bs.begin(), bs.end(),
                     [](const Branch& x, const Branch& y) { return x.label < y.label; });
    n->branches_ = std::move(bs);
    return Type(n);
}

Type with_branches(const Type& h, std::vector<Branch> bs) {
    return interaction(h->kind(), h->from(), h->to(), std::move(bs));
}

Type with_conts(const Type& h, const std::vector<Type>& conts) {
    std::vector<Branch> bs = h->branches();
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i].cont = conts.at(i);
    return with_branches(h, std::move(bs));
}

std::string path_string(const Path& p) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + "]";
}

std::string to_string(const Diagnostic& d) {
    return d.rule + " at " + path_string(d.path) + ": " + d.message;
}

Failure::Failure(Diagnostic d) : std::runtime_error(to_string(d)), diag_(std::move(d)) {}

void fail(std::string rule, std::string message, Path path) {
    throw Failure(Diagnostic{std::move(rule), std::move(path), std::move(message)});
}

namespace {

void collect_parts(const Type& h, RoleSet& out, bool external) {
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return;
    case Kind::Rec: collect_parts(h->body(), out, external); return;
    case Kind::Par:
        collect_parts(h->left(), out, external);
        collect_parts(h->right(), out, external);
        return;
    case Kind::Msg:
        if (!external) {
            out.insert(h->from());
            out.insert(h->to());
        }
        break;
    case Kind::Send: out.insert(external ? h->to() : h->from()); break;
    case Kind::Recv: out.insert(external ? h->from() : h->to()); break;
    }
    for (const auto& b : h->branches()) collect_parts(b.cont, out, external);
}

bool pure_rec_of(const TypeVar& x, const Type& h) {
    const Node* n = h.get();
    while (n->kind() == Kind::Rec) n = n->body().get();
    return n->kind() == Kind::Var && n->var() == x;
}

void collect_free(const Type& h, std::vector<TypeVar>& bound, std::set<TypeVar>& out) {
    switch (h->kind()) {
    case Kind::End: return;
    case Kind::Var:
        if (std::find(bound.begin(), bound.end(), h->var()) == bound.end()) out.insert(h->var());
        return;
    case Kind::Rec:
        bound.push_back(h->var());
        collect_free(h->body(), bound, out);
        bound.pop_back();
        return;
    default:
        for (std::size_t i = 0; i < h->child_count(); ++i) collect_free(h->child(i), bound, out);
    }
}

bool contains_kind(const Type& h, Kind k1, Kind k2) {
    if (h->kind() == k1 || h->kind() == k2) return true;
    for (std::size_t i = 0; i < h->child_count(); ++i)
        if (contains_kind(h->child(i), k1, k2)) return true;
    return false;
}

void wf_walk(const Type& h, Path& path, std::vector<TypeVar>& bound,
             std::vector<Diagnostic>& out) {
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return;
    case Kind::Rec: {
        if (std::find(bound.begin(), bound.end(), h->var()) != bound.end())
            out.push_back({"shadowed-rec", path, "recursion variable " + h->var() + " is rebound"});
        if (pure_rec_of(h->var(), h->body()))
            out.push_back({"unguarded-rec", path, "rec " + h->var() + " has no prefix before " + h->var()});
        bound.push_back(h->var());
        path.push_back(0);
        wf_walk(h->body(), path, bound, out);
        path.pop_back();
        bound.pop_back();
        return;
    }
    case Kind::Par: {
        if (!is_closed(h->left()) || !is_closed(h->right()))
            out.push_back({"parallel-open", path, "parallel sides must be closed"});
        RoleSet l = participants(h->left()), r = participants(h->right());
        RoleSet common;
        std::set_intersection(l.begin(), l.end(), r.begin(), r.end(),
                              std::inserter(common, common.begin()));
        if (!common.empty())
            out.push_back({"parallel-overlap", path, "roles " + to_string(common) + " occur on both sides"});
        // Par sides are closed, so the outer binders do not reach inside.
        std::vector<TypeVar> inner;
        for (std::size_t i = 0; i < 2; ++i) {
            path.push_back(i);
            wf_walk(h->child(i), path, inner, out);
            path.pop_back();
        }
        return;
    }
    default: {
        if (h->from() == h->to())
            out.push_back({"self-interaction", path, "role " + h->from() + " interacts with itself"});
        if (h->branches().empty())
            out.push_back({"empty-branching", path, "branching has no branches"});
        const auto& bs = h->branches();
        for (std::size_t i = 1; i < bs.size(); ++i)
            if (bs[i].label == bs[i - 1].label)
                out.push_back({"duplicate-label", path, "label " + bs[i].label + " occurs twice"});
        for (std::size_t i = 0; i < bs.size(); ++i) {
            path.push_back(i);
            wf_walk(bs[i].cont, path, bound, out);
            path.pop_back();
        }
    }
    }
}

}  // namespace

RoleSet parts(const Type& h) {
    RoleSet s;
    collect_parts(h, s, false);
    return s;
}

RoleSet eparts(const Type& h) {
    RoleSet s;
    collect_parts(h, s, true);
    return s;
}

bool is_guarded(const Type& h) {
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return true;
    case Kind::Rec: return is_guarded(h->body()) && !pure_rec_of(h->var(), h->body());
    default:
        for (std::size_t i = 0; i < h->child_count(); ++i)
            if (!is_guarded(h->child(i))) return false;
        return true;
    }
}

std::set<TypeVar> free_vars_impl(const Type& h) {
    std::vector<TypeVar> bound;
    std::set<TypeVar> out;
    collect_free(h, bound, out);
    return out;
}

RoleSet free_vars(const Type& h) { return free_vars_impl(h); }

bool is_closed(const Type& h) { return free_vars_impl(h).empty(); }

bool is_global(const Type& h) { return !contains_kind(h, Kind::Send, Kind::Recv); }

bool is_local(const Type& h) { return parts(h).size() <= 1 && !contains_kind(h, Kind::Msg, Kind::Msg); }

std::vector<Diagnostic> check_wellformed(const Type& h) {
    std::vector<Diagnostic> out;
    Path path;
    std::vector<TypeVar> bound;
    wf_walk(h, path, bound, out);
    RoleSet p = parts(h), e = eparts(h), common;
    std::set_intersection(p.begin(), p.end(), e.begin(), e.end(),
                          std::inserter(common, common.begin()));
    if (!common.empty())
        out.push_back({"parts-eparts-overlap", {}, "roles " + to_string(common) +
                                                       " are both internal and external"});
    return out;
}

std::size_t depth(const Type& h) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < h->child_count(); ++i) d = std::max(d, depth(h->child(i)));
    return d + 1;
}

bool equal(const Type& a, const Type& b) {
    if (a == b) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
    case Kind::End: return true;
    case Kind::Var: return a->var() == b->var();
    case Kind::Rec: return a->var() == b->var() && equal(a->body(), b->body());
    case Kind::Par: return equal(a->left(), b->left()) && equal(a->right(), b->right());
    default: {
        if (a->from() != b->from() || a->to() != b->to()) return false;
        const auto& x = a->branches();
        const auto& y = b->branches();
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].label != y[i].label || x[i].payload != y[i].payload || !equal(x[i].cont, y[i].cont))
                return false;
        return true;
    }
    }
}

int find_branch(const Type& h, const Label& l) {
    const auto& bs = h->branches();
    for (std::size_t i = 0; i < bs.size(); ++i)
        if (bs[i].label == l) return static_cast<int>(i);
    return -1;
}

std::optional<Path> first_difference(const Type& a, const Type& b) {
    if (equal(a, b)) return std::nullopt;
    bool same_head = a->kind() == b->kind();
    if (same_head) {
        switch (a->kind()) {
        case Kind::Var: same_head = false; break;
        case Kind::Rec: same_head = a->var() == b->var(); break;
        case Kind::Par: break;
        case Kind::End: break;
        default: {
            same_head = a->from() == b->from() && a->to() == b->to() &&
                        a->branches().size() == b->branches().size();
            for (std::size_t i = 0; same_head && i < a->branches().size(); ++i)
                same_head = a->branches()[i].label == b->branches()[i].label &&
                            a->branches()[i].payload == b->branches()[i].payload;
        }
        }
    }
    if (!same_head) return Path{};
    for (std::size_t i = 0; i < a->child_count(); ++i) {
        if (auto p = first_difference(a->child(i), b->child(i))) {
            p->insert(p->begin(), i);
            return p;
        }
    }
    return Path{};
}

const Type& subterm(const Type& h, const Path& p) {
    const Type* cur = &h;
    for (std::size_t i : p) cur = &(*cur)->child(i);
    return *cur;
}

bool intersects(const RoleSet& a, const RoleSet& b) {
    for (const auto& r : a)
        if (b.count(r)) return true;
    return false;
}

bool subset(const RoleSet& a, const RoleSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string to_string(const RoleSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& r : s) {
        if (!first) out += ",";
        out += r;
        first = false;
    }
    return out + "}";
}

}  // namespace hmpst
