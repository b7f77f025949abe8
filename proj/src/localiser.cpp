#include "hmpst/localiser.hpp"

#include "merge.hpp"

namespace hmpst {

Type merge_loc(const Type& a, const Type& b) { return detail::merge_with(a, b, Kind::Send); }

Type merge_loc_all(const std::vector<Type>& hs) { return detail::merge_all_with(hs, Kind::Send); }

namespace {

Type go(const Type& h, Path& path) {
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return h;
    case Kind::Rec: {
        // A closed loop of purely internal messages has no external face.
        if (eparts(h).empty() && is_closed(h)) return end();
        path.push_back(0);
        Type body = go(h->body(), path);
        path.pop_back();
        Type r = rec(h->var(), body);
        if (is_guarded(r)) return r;
        if (is_closed(h)) return end();
        fail("loc-rec", "localised rec " + h->var() + " is unguarded and the loop is open", path);
    }
    case Kind::Par: {
        path.push_back(0);
        Type l = go(h->left(), path);
        path.back() = 1;
        Type r = go(h->right(), path);
        path.pop_back();
        return par(l, r);
    }
    default: break;
    }
    std::vector<Type> conts;
    for (std::size_t i = 0; i < h->branches().size(); ++i) {
        path.push_back(i);
        conts.push_back(go(h->branches()[i].cont, path));
        path.pop_back();
    }
    if (h->kind() != Kind::Msg) return with_conts(h, conts);
    try {
        return merge_loc_all(conts);
    } catch (const Failure& f) {
        fail("loc-merge-failure",
             "continuations of " + h->from() + "->" + h->to() + " do not merge: " + f.diagnostic().message,
             path);
    }
}

}  // namespace

Type localise(const Type& h) {
    Path path;
    return go(h, path);
}

Result<Type> try_merge_loc(const Type& a, const Type& b) {
    return capture([&] { return merge_loc(a, b); });
}

Result<Type> try_localise(const Type& h) {
    return capture([&] { return localise(h); });
}

}  // namespace hmpst
