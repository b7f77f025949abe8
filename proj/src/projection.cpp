#include "hmpst/projection.hpp"

#include "merge.hpp"

namespace hmpst {

Type merge_proj(const Type& a, const Type& b) { return detail::merge_with(a, b, Kind::Recv); }

Type merge_proj_all(const std::vector<Type>& hs) { return detail::merge_all_with(hs, Kind::Recv); }

namespace {

Type go(const Type& h, const RoleSet& e, Path& path);

std::vector<Type> project_conts(const Type& h, const RoleSet& e, Path& path) {
    std::vector<Type> out;
    for (std::size_t i = 0; i < h->branches().size(); ++i) {
        path.push_back(i);
        out.push_back(go(h->branches()[i].cont, e, path));
        path.pop_back();
    }
    return out;
}

Type merged(const Type& h, const RoleSet& e, Path& path) {
    std::vector<Type> conts = project_conts(h, e, path);
    try {
        return merge_proj_all(conts);
    } catch (const Failure& f) {
        fail("proj-merge-failure",
             "continuations of " + h->from() + "/" + h->to() + " do not merge: " + f.diagnostic().message,
             path);
    }
}

Type go(const Type& h, const RoleSet& e, Path& path) {
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return h;
    case Kind::Rec: {
        // A closed loop that none of e takes part in is invisible to e.
        if (!intersects(parts(h), e) && is_closed(h)) return end();
        path.push_back(0);
        Type body = go(h->body(), e, path);
        path.pop_back();
        Type r = rec(h->var(), body);
        if (is_guarded(r)) return r;
        if (is_closed(h)) return end();
        fail("proj-rec", "projection of rec " + h->var() + " is unguarded and the loop is open", path);
    }
    case Kind::Par: {
        if (!intersects(e, parts(h->right()))) {
            path.push_back(0);
            Type r = go(h->left(), e, path);
            path.pop_back();
            return r;
        }
        if (!intersects(e, parts(h->left()))) {
            path.push_back(1);
            Type r = go(h->right(), e, path);
            path.pop_back();
            return r;
        }
        fail("proj-par", "roles " + to_string(e) + " meet both parallel sides", path);
    }
    case Kind::Send: {
        bool p = e.count(h->from()) > 0, q = e.count(h->to()) > 0;
        if (q) fail("proj-precondition", "external role " + h->to() + " is in the target set", path);
        if (p) return with_conts(h, project_conts(h, e, path));
        return merged(h, e, path);
    }
    case Kind::Recv: {
        bool p = e.count(h->from()) > 0, q = e.count(h->to()) > 0;
        if (p) fail("proj-precondition", "external role " + h->from() + " is in the target set", path);
        if (q) return with_conts(h, project_conts(h, e, path));
        return merged(h, e, path);
    }
    case Kind::Msg: {
        bool p = e.count(h->from()) > 0, q = e.count(h->to()) > 0;
        if (!p && !q) return merged(h, e, path);
        std::vector<Type> conts = project_conts(h, e, path);
        std::vector<Branch> bs = h->branches();
        for (std::size_t i = 0; i < bs.size(); ++i) bs[i].cont = conts[i];
        Kind k = p && q ? Kind::Msg : (p ? Kind::Send : Kind::Recv);
        return interaction(k, h->from(), h->to(), std::move(bs));
    }
    }
    return h;
}

}  // namespace

Type project(const Type& h, const RoleSet& e) {
    RoleSet ext = eparts(h);
    for (const auto& r : e)
        if (ext.count(r)) fail("proj-precondition", "external role " + r + " is in the target set");
    Path path;
    return go(h, e, path);
}

Type project_role(const Type& h, const Role& r) { return project(h, RoleSet{r}); }

Result<Type> try_merge_proj(const Type& a, const Type& b) {
    return capture([&] { return merge_proj(a, b); });
}

Result<Type> try_project(const Type& h, const RoleSet& e) {
    return capture([&] { return project(h, e); });
}

Result<Type> try_project_role(const Type& h, const Role& r) {
    return capture([&] { return project_role(h, r); });
}

}  // namespace hmpst
