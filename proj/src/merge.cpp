#include "merge.hpp"

namespace hmpst::detail {

namespace {

std::string head(const Type& h) {
    switch (h->kind()) {
    case Kind::End: return "end";
    case Kind::Var: return h->var();
    case Kind::Rec: return "rec " + h->var();
    case Kind::Par: return "parallel";
    case Kind::Msg: return h->from() + "->" + h->to();
    case Kind::Send: return h->from() + "!" + h->to();
    case Kind::Recv: return h->from() + "?" + h->to();
    }
    return "?";
}

[[noreturn]] void merge_mismatch(const Type& a, const Type& b, const Path& path, const std::string& why) {
    fail("merge-failure", "cannot merge " + head(a) + " with " + head(b) + ": " + why, path);
}

Type go(const Type& a, const Type& b, Kind union_kind, Path& path) {
    if (equal(a, b)) return a;
    if (a->kind() != b->kind()) merge_mismatch(a, b, path, "different constructors");
    switch (a->kind()) {
    case Kind::End: return a;
    case Kind::Var: merge_mismatch(a, b, path, "different variables");
    case Kind::Rec: {
        if (a->var() != b->var()) merge_mismatch(a, b, path, "different variables");
        path.push_back(0);
        Type body = go(a->body(), b->body(), union_kind, path);
        path.pop_back();
        return rec(a->var(), body);
    }
    case Kind::Par: {
        path.push_back(0);
        Type l = go(a->left(), b->left(), union_kind, path);
        path.back() = 1;
        Type r = go(a->right(), b->right(), union_kind, path);
        path.pop_back();
        return par(l, r);
    }
    default: break;
    }
    if (a->from() != b->from() || a->to() != b->to()) merge_mismatch(a, b, path, "different roles");
    const auto& x = a->branches();
    const auto& y = b->branches();
    std::vector<Branch> out;
    std::size_t i = 0, j = 0;
    bool allow_union = a->kind() == union_kind;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].label < y[j].label)) {
            if (!allow_union) merge_mismatch(a, b, path, "label " + x[i].label + " only on one side");
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].label < x[i].label) {
            if (!allow_union) merge_mismatch(a, b, path, "label " + y[j].label + " only on one side");
            out.push_back(y[j++]);
        } else {
            if (x[i].payload != y[j].payload)
                merge_mismatch(a, b, path, "label " + x[i].label + " carries different payloads");
            path.push_back(i);
            Type c = go(x[i].cont, y[j].cont, union_kind, path);
            path.pop_back();
            out.push_back({x[i].label, x[i].payload, c});
            ++i;
            ++j;
        }
    }
    return with_branches(a, std::move(out));
}

}  // namespace

Type merge_with(const Type& a, const Type& b, Kind union_kind) {
    Path path;
    return go(a, b, union_kind, path);
}

Type merge_all_with(const std::vector<Type>& hs, Kind union_kind) {
    if (hs.empty()) fail("merge-failure", "merge of an empty family");
    Type acc = hs.front();
    for (std::size_t i = 1; i < hs.size(); ++i) acc = merge_with(acc, hs[i], union_kind);
    return acc;
}

}  // namespace hmpst::detail
