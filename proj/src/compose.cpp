#include "hmpst/compose.hpp"

#include <algorithm>

#include "hmpst/localiser.hpp"
#include "hmpst/projection.hpp"
#include "hmpst/surface.hpp"
#include "merge.hpp"

namespace hmpst {

namespace {

[[noreturn]] void undefined(const std::string& fn, const std::string& why) {
    fail("undefined-unmerge", fn + ": " + why);
}

[[noreturn]] void violated(const std::string& what) { fail("lemma-violation", what); }

bool all_equal(const std::vector<Type>& hs) {
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (!equal(hs[0], hs[i])) return false;
    return true;
}

bool same_head(const Type& a, const Type& b) {
    return a->kind() == b->kind() && a->from() == b->from() && a->to() == b->to();
}

const Branch* branch_of(const Type& h, const Label& l) {
    int i = find_branch(h, l);
    return i < 0 ? nullptr : &h->branches()[static_cast<std::size_t>(i)];
}

std::vector<Label> labels(const Type& h) {
    std::vector<Label> out;
    for (const auto& b : h->branches()) out.push_back(b.label);
    return out;
}

std::vector<Type> slice(const std::vector<Type>& v, std::size_t from) {
    return std::vector<Type>(v.begin() + static_cast<std::ptrdiff_t>(from), v.end());
}

// ---------------------------------------------------------------------------
// Matrix unmerges. Rows re-merge with `row_union`'s merge, columns with
// `col_union`'s. unmLP: rows under the localiser merge, columns under the
// projection merge. unmPL is the dual.

struct MatrixKind {
    Kind row_union;
    Kind col_union;
    const char* name;
};

const MatrixKind kLP{Kind::Send, Kind::Recv, "unmLP"};
const MatrixKind kPL{Kind::Recv, Kind::Send, "unmPL"};

struct Ctx {
    RoleSet e;
    ComposeOptions opts;
};

void count_unmerge(const ComposeOptions& o) {
    if (o.stats) ++o.stats->unmerge_checks;
}

Matrix matrix_bin(const Type& r1, const Type& r2, const Type& c1, const Type& c2, const MatrixKind& mk) {
    if (equal(c1, c2)) return {{r1, r1}, {r2, r2}};
    if (equal(r1, r2)) return {{c1, c2}, {c1, c2}};
    Kind k = r1->kind();
    if (r2->kind() != k || c1->kind() != k || c2->kind() != k)
        undefined(mk.name, "arguments have different constructors");
    if (k == Kind::Rec) {
        if (r2->var() != r1->var() || c1->var() != r1->var() || c2->var() != r1->var())
            undefined(mk.name, "recursion variables differ");
        Matrix sub = matrix_bin(r1->body(), r2->body(), c1->body(), c2->body(), mk);
        for (auto& row : sub)
            for (auto& x : row) x = rec(r1->var(), x);
        return sub;
    }
    if (!r1->is_interaction()) undefined(mk.name, "no clause for this constructor");
    if (!same_head(r1, r2) || !same_head(r1, c1) || !same_head(r1, c2))
        undefined(mk.name, "arguments have different prefixes");

    const Type* rows[2] = {&r1, &r2};
    const Type* cols[2] = {&c1, &c2};
    Matrix out(2, std::vector<Type>(2));
    // Shared labels recurse once; labels present on one side only are forced.
    auto sub_for = [&](const Label& l) {
        return matrix_bin(branch_of(r1, l)->cont, branch_of(r2, l)->cont, branch_of(c1, l)->cont,
                          branch_of(c2, l)->cont, mk);
    };
    if (k == mk.row_union) {
        if (labels(r1) != labels(r2)) undefined(mk.name, "row labels differ");
        for (std::size_t j = 0; j < 2; ++j) {
            std::vector<Branch> bs[2];
            for (const auto& b : (*cols[j])->branches()) {
                bool shared = branch_of(*cols[1 - j], b.label) != nullptr;
                if (!branch_of(r1, b.label)) undefined(mk.name, "column label " + b.label + " missing in rows");
                Matrix sub;
                if (shared) sub = sub_for(b.label);
                for (std::size_t i = 0; i < 2; ++i)
                    bs[i].push_back({b.label, b.payload,
                                     shared ? sub[i][j] : branch_of(*rows[i], b.label)->cont});
            }
            for (std::size_t i = 0; i < 2; ++i) out[i][j] = with_branches(r1, bs[i]);
        }
        return out;
    }
    if (k == mk.col_union) {
        if (labels(c1) != labels(c2)) undefined(mk.name, "column labels differ");
        for (std::size_t i = 0; i < 2; ++i) {
            std::vector<Branch> bs[2];
            for (const auto& b : (*rows[i])->branches()) {
                bool shared = branch_of(*rows[1 - i], b.label) != nullptr;
                if (!branch_of(c1, b.label)) undefined(mk.name, "row label " + b.label + " missing in columns");
                Matrix sub;
                if (shared) sub = sub_for(b.label);
                for (std::size_t j = 0; j < 2; ++j)
                    bs[j].push_back({b.label, b.payload,
                                     shared ? sub[i][j] : branch_of(*cols[j], b.label)->cont});
            }
            for (std::size_t j = 0; j < 2; ++j) out[i][j] = with_branches(r1, bs[j]);
        }
        return out;
    }
    if (labels(r1) != labels(r2) || labels(r1) != labels(c1) || labels(r1) != labels(c2))
        undefined(mk.name, "label sets differ");
    std::vector<Branch> bs[2][2];
    for (const auto& b : r1->branches()) {
        Matrix sub = sub_for(b.label);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) bs[i][j].push_back({b.label, b.payload, sub[i][j]});
    }
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out[i][j] = with_branches(r1, bs[i][j]);
    return out;
}

void check_matrix(const Matrix& m, const std::vector<Type>& rows, const std::vector<Type>& cols,
                  const MatrixKind& mk) {
    if (rows.empty() || cols.empty()) return;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!equal(detail::merge_all_with(m[i], mk.row_union), rows[i]))
            violated(std::string(mk.name) + ": row " + std::to_string(i) + " does not re-merge");
    for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<Type> col;
        for (const auto& row : m) col.push_back(row[j]);
        if (!equal(detail::merge_all_with(col, mk.col_union), cols[j]))
            violated(std::string(mk.name) + ": column " + std::to_string(j) + " does not re-merge");
    }
}

Matrix matrix_nary(const std::vector<Type>& rows, const std::vector<Type>& cols, const MatrixKind& mk,
                   const ComposeOptions& opts) {
    Matrix out;
    std::size_t n = rows.size(), m = cols.size();
    if (n == 0) return out;
    if (n == 1) {
        out.push_back(cols);
    } else if (all_equal(cols) && m > 0) {
        for (const auto& r : rows) out.push_back(std::vector<Type>(m, r));
    } else if (all_equal(rows)) {
        out.assign(n, cols);
    } else if (n == 2) {
        if (m == 0) {
            out.assign(2, {});
        } else if (m == 1) {
            out = {{rows[0]}, {rows[1]}};
        } else if (m == 2) {
            out = matrix_bin(rows[0], rows[1], cols[0], cols[1], mk);
        } else {
            std::vector<Type> rest = slice(cols, 1);
            Matrix u = matrix_bin(rows[0], rows[1], cols[0], detail::merge_all_with(rest, mk.row_union), mk);
            Matrix x = matrix_nary({u[0][1], u[1][1]}, rest, mk, opts);
            for (std::size_t i = 0; i < 2; ++i) {
                std::vector<Type> row{u[i][0]};
                row.insert(row.end(), x[i].begin(), x[i].end());
                out.push_back(std::move(row));
            }
        }
    } else {
        std::vector<Type> tail = slice(rows, 1);
        Matrix top = matrix_nary({rows[0], detail::merge_all_with(tail, mk.col_union)}, cols, mk, opts);
        Matrix rest = matrix_nary(tail, top[1], mk, opts);
        out.push_back(top[0]);
        out.insert(out.end(), rest.begin(), rest.end());
    }
    if (opts.verify) {
        count_unmerge(opts);
        check_matrix(out, rows, cols, mk);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Unmerge for the localiser.

std::vector<Type> unml_nary(const Type& g, const std::vector<Type>& ls, const Ctx& c);

std::pair<Type, Type> unml_bin(const Type& g, const Type& l1, const Type& l2, const Ctx& c) {
    if (equal(l1, l2)) return {g, g};
    switch (g->kind()) {
    case Kind::End:
    case Kind::Var: return {g, g};
    case Kind::Rec: {
        if (l1->kind() == Kind::Rec && l2->kind() == Kind::Rec && l1->var() == g->var() &&
            l2->var() == g->var()) {
            auto [a, b] = unml_bin(g->body(), l1->body(), l2->body(), c);
            return {rec(g->var(), a), rec(g->var(), b)};
        }
        if (l1->kind() == Kind::End && l2->kind() == Kind::End) return {g, g};
        undefined("unmL", "rec " + g->var() + " against non-matching localised types");
    }
    case Kind::Par: {
        if (!intersects(c.e, parts(g->right()))) {
            auto [a, b] = unml_bin(g->left(), l1, l2, c);
            return {par(a, g->right()), par(b, g->right())};
        }
        if (!intersects(c.e, parts(g->left()))) {
            auto [a, b] = unml_bin(g->right(), l1, l2, c);
            return {par(g->left(), a), par(g->left(), b)};
        }
        undefined("unmL", "roles meet both parallel sides");
    }
    default: break;
    }

    auto split = [&]() {
        // l1, l2 carry label sets J and K whose union is the labels of g.
        std::vector<Branch> a, b;
        for (const auto& br : g->branches()) {
            const Branch* x = branch_of(l1, br.label);
            const Branch* y = branch_of(l2, br.label);
            if (!x && !y) undefined("unmL", "label " + br.label + " absent from both sides");
            if (x && y) {
                auto [u, v] = unml_bin(br.cont, x->cont, y->cont, c);
                a.push_back({br.label, br.payload, u});
                b.push_back({br.label, br.payload, v});
            } else if (x) {
                a.push_back(br);
            } else {
                b.push_back(br);
            }
        }
        return std::pair{with_branches(g, a), with_branches(g, b)};
    };
    auto pointwise = [&]() {
        if (labels(l1) != labels(g) || labels(l2) != labels(g)) undefined("unmL", "label sets differ");
        std::vector<Type> a, b;
        for (std::size_t i = 0; i < g->branches().size(); ++i) {
            auto [u, v] = unml_bin(g->branches()[i].cont, l1->branches()[i].cont, l2->branches()[i].cont, c);
            a.push_back(u);
            b.push_back(v);
        }
        return std::pair{with_conts(g, a), with_conts(g, b)};
    };
    auto other = [&]() {
        // g's prefix is invisible to e: split each continuation's projection
        // across the two localised types first.
        std::vector<Type> ps;
        for (const auto& br : g->branches()) ps.push_back(project(br.cont, c.e));
        Matrix m = matrix_nary(ps, {l1, l2}, kLP, c.opts);
        std::vector<Type> a, b;
        for (std::size_t i = 0; i < g->branches().size(); ++i) {
            auto [u, v] = unml_bin(g->branches()[i].cont, m[i][0], m[i][1], c);
            a.push_back(u);
            b.push_back(v);
        }
        return std::pair{with_conts(g, a), with_conts(g, b)};
    };

    auto matches = [&](Kind k) {
        return l1->kind() == k && l2->kind() == k && l1->from() == g->from() && l1->to() == g->to() &&
               l2->from() == g->from() && l2->to() == g->to();
    };
    switch (g->kind()) {
    case Kind::Send:
        if (matches(Kind::Send)) return split();
        return other();
    case Kind::Recv:
        if (matches(Kind::Recv)) return pointwise();
        return other();
    default:
        if (matches(Kind::Send)) return split();
        if (matches(Kind::Recv) || matches(Kind::Msg)) return pointwise();
        return other();
    }
}

void check_unml(const Type& g, const std::vector<Type>& ls, const std::vector<Type>& out, const Ctx& c) {
    count_unmerge(c.opts);
    for (std::size_t t = 0; t < ls.size(); ++t)
        if (!equal(project(out[t], c.e), ls[t]))
            violated("unmL: output " + std::to_string(t) + " does not project to its localised type");
    RoleSet ext = eparts(g);
    for (const auto& r : participants(g)) {
        if (c.e.count(r) || ext.count(r)) continue;
        auto whole = try_project_role(g, r);
        if (!whole) continue;
        std::vector<Type> ps;
        for (const auto& o : out) ps.push_back(project_role(o, r));
        auto merged = capture([&] { return merge_proj_all(ps); });
        if (!merged || !equal(*merged, *whole))
            violated("unmL: projections onto " + r + " do not re-merge");
    }
}

std::vector<Type> unml_nary(const Type& g, const std::vector<Type>& ls, const Ctx& c) {
    std::vector<Type> out;
    if (ls.empty()) undefined("unmL", "empty list");
    if (ls.size() == 1) {
        out = {g};
    } else if (ls.size() == 2) {
        auto [a, b] = unml_bin(g, ls[0], ls[1], c);
        out = {a, b};
    } else {
        std::vector<Type> rest = slice(ls, 1);
        auto [a, b] = unml_bin(g, ls[0], merge_loc_all(rest), c);
        out = {a};
        std::vector<Type> more = unml_nary(b, rest, c);
        out.insert(out.end(), more.begin(), more.end());
    }
    if (c.opts.verify) check_unml(g, ls, out, c);
    return out;
}

// ---------------------------------------------------------------------------
// Unmerge for projection.

std::pair<Type, Type> unmp_bin(const Type& h, const Type& p1, const Type& p2, const Ctx& c) {
    if (equal(p1, p2)) return {h, h};
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: return {h, h};
    case Kind::Rec: {
        if (p1->kind() == Kind::Rec && p2->kind() == Kind::Rec && p1->var() == h->var() &&
            p2->var() == h->var()) {
            auto [a, b] = unmp_bin(h->body(), p1->body(), p2->body(), c);
            return {rec(h->var(), a), rec(h->var(), b)};
        }
        if (p1->kind() == Kind::End && p2->kind() == Kind::End) return {h, h};
        undefined("unmP", "rec " + h->var() + " against non-matching projections");
    }
    case Kind::Par: undefined("unmP", "no clause for parallel composition");
    default: break;
    }
    auto matches = [&](Kind k) {
        return p1->kind() == k && p2->kind() == k && same_head(p1, h) && same_head(p2, h);
    };
    if (h->kind() == Kind::Send) {
        if (!matches(Kind::Send) || labels(p1) != labels(h) || labels(p2) != labels(h))
            undefined("unmP", "send against non-matching projections");
        std::vector<Type> a, b;
        for (std::size_t i = 0; i < h->branches().size(); ++i) {
            auto [u, v] = unmp_bin(h->branches()[i].cont, p1->branches()[i].cont, p2->branches()[i].cont, c);
            a.push_back(u);
            b.push_back(v);
        }
        return {with_conts(h, a), with_conts(h, b)};
    }
    if (h->kind() == Kind::Recv) {
        if (!matches(Kind::Recv)) undefined("unmP", "receive against non-matching projections");
        std::vector<Branch> a, b;
        for (const auto& br : h->branches()) {
            const Branch* x = branch_of(p1, br.label);
            const Branch* y = branch_of(p2, br.label);
            if (!x && !y) undefined("unmP", "label " + br.label + " absent from both sides");
            if (x && y) {
                auto [u, v] = unmp_bin(br.cont, x->cont, y->cont, c);
                a.push_back({br.label, br.payload, u});
                b.push_back({br.label, br.payload, v});
            } else if (x) {
                a.push_back(br);
            } else {
                b.push_back(br);
            }
        }
        return {with_branches(h, a), with_branches(h, b)};
    }
    // Internal message: split the localised continuations across p1, p2.
    std::vector<Type> ls;
    for (const auto& br : h->branches()) ls.push_back(localise(br.cont));
    Matrix m = matrix_nary(ls, {p1, p2}, kPL, c.opts);
    std::vector<Type> a, b;
    for (std::size_t i = 0; i < h->branches().size(); ++i) {
        auto [u, v] = unmp_bin(h->branches()[i].cont, m[i][0], m[i][1], c);
        a.push_back(u);
        b.push_back(v);
    }
    return {with_conts(h, a), with_conts(h, b)};
}

void check_unmp(const Type& h, const std::vector<Type>& ps, const std::vector<Type>& out, const Ctx& c) {
    count_unmerge(c.opts);
    for (std::size_t t = 0; t < ps.size(); ++t)
        if (!equal(localise(out[t]), ps[t]))
            violated("unmP: output " + std::to_string(t) + " does not localise to its projection");
    auto merged = capture([&] { return merge_proj_all(out); });
    if (!merged || !equal(*merged, h)) violated("unmP: outputs do not re-merge to the component");
}

std::vector<Type> unmp_nary(const Type& h, const std::vector<Type>& ps, const Ctx& c) {
    std::vector<Type> out;
    if (ps.empty()) undefined("unmP", "empty list");
    if (ps.size() == 1) {
        out = {h};
    } else if (ps.size() == 2) {
        auto [a, b] = unmp_bin(h, ps[0], ps[1], c);
        out = {a, b};
    } else {
        std::vector<Type> rest = slice(ps, 1);
        auto [a, b] = unmp_bin(h, ps[0], merge_proj_all(rest), c);
        out = {a};
        std::vector<Type> more = unmp_nary(b, rest, c);
        out.insert(out.end(), more.begin(), more.end());
    }
    if (c.opts.verify) check_unmp(h, ps, out, c);
    return out;
}

// ---------------------------------------------------------------------------
// Build-back of one component.

[[noreturn]] void no_clause(const Type& g, const Type& h, const std::string& why) {
    fail("undefined-buildback", why + " (compat head " + print_inline_head(g) + ", component head " +
                                    print_inline_head(h) + ")");
}

Type bb(const Type& g, const Type& h, const Ctx& c);

Type internal_first(const Type& g, const Type& h, const Ctx& c) {
    std::vector<Type> conts;
    for (const auto& br : h->branches()) conts.push_back(bb(g, br.cont, c));
    return with_conts(h, conts);
}

Type via_unml(const Type& g, const Type& h, const Ctx& c) {
    std::vector<Type> ls;
    for (const auto& br : h->branches()) ls.push_back(localise(br.cont));
    std::vector<Type> gs = unml_nary(g, ls, c);
    std::vector<Type> conts;
    for (std::size_t j = 0; j < gs.size(); ++j) conts.push_back(bb(gs[j], h->branches()[j].cont, c));
    return with_conts(h, conts);
}

Type via_unmp(const Type& g, const Type& h, const Ctx& c) {
    std::vector<Type> ps;
    for (const auto& br : g->branches()) ps.push_back(project(br.cont, c.e));
    std::vector<Type> hs = unmp_nary(h, ps, c);
    std::vector<Type> conts;
    for (std::size_t i = 0; i < hs.size(); ++i) conts.push_back(bb(g->branches()[i].cont, hs[i], c));
    return with_conts(g, conts);
}

Type pointwise_bb(const Type& g, const Type& h, Kind result, const Ctx& c) {
    if (labels(g) != labels(h)) no_clause(g, h, "label sets differ");
    std::vector<Branch> bs = g->branches();
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i].cont = bb(bs[i].cont, h->branches()[i].cont, c);
    return interaction(result, g->from(), g->to(), std::move(bs));
}

Type bb(const Type& g, const Type& h, const Ctx& c) {
    bool h_msg = h->kind() == Kind::Msg;
    switch (g->kind()) {
    case Kind::End:
    case Kind::Var: return h;
    case Kind::Rec: {
        bool h_rec = h->kind() == Kind::Rec && h->var() == g->var();
        if (!intersects(parts(g->body()), c.e)) {
            if (is_closed(g) && is_closed(h)) return par(g, h);
            if (h_msg) return internal_first(g, h, c);
            if (h_rec) return rec(g->var(), bb(g->body(), h->body(), c));
            no_clause(g, h, "open loop disjoint from the component");
        }
        if (h_rec) return rec(g->var(), bb(g->body(), h->body(), c));
        if (h_msg) return via_unml(g, h, c);
        no_clause(g, h, "loop against a component that is neither a loop nor an internal message");
    }
    case Kind::Par: {
        if (!intersects(parts(g->right()), c.e)) return par(bb(g->left(), h, c), g->right());
        if (!intersects(parts(g->left()), c.e)) return par(g->left(), bb(g->right(), h, c));
        no_clause(g, h, "component roles meet both parallel sides");
    }
    default: break;
    }
    bool p = c.e.count(g->from()) > 0, q = c.e.count(g->to()) > 0;
    if (g->kind() == Kind::Send || g->kind() == Kind::Recv) {
        bool subject = g->kind() == Kind::Send ? p : q;
        if (same_head(g, h)) return pointwise_bb(g, h, g->kind(), c);
        if (h_msg && subject) return via_unml(g, h, c);
        if (!subject) {
            if (h_msg && !intersects(parts(g), c.e)) return internal_first(g, h, c);
            return via_unmp(g, h, c);
        }
        no_clause(g, h, "local prefix does not match the component");
    }
    // Global message.
    if (p && q) no_clause(g, h, "both message endpoints belong to the component");
    if ((h->kind() == Kind::Send || h->kind() == Kind::Recv) && h->from() == g->from() && h->to() == g->to())
        return pointwise_bb(g, h, Kind::Msg, c);
    if (h_msg && (p || q)) return via_unml(g, h, c);
    if (!p && !q) {
        if (h_msg && !intersects(parts(g), c.e)) return internal_first(g, h, c);
        return via_unmp(g, h, c);
    }
    no_clause(g, h, "message prefix does not match the component");
}

void check_round_trip(const Type& g, const Type& result, const Component& comp, const ComposeOptions& o) {
    if (o.stats) ++o.stats->buildback_checks;
    if (!equal(project(result, comp.roles), comp.protocol))
        violated("build-back: result does not project to the component");
    RoleSet ext = eparts(g);
    for (const auto& r : participants(g)) {
        if (comp.roles.count(r) || ext.count(r)) continue;
        auto before = try_project_role(g, r);
        if (!before) continue;
        auto after = try_project_role(result, r);
        if (!after || !equal(*after, *before))
            violated("build-back: projection onto " + r + " changed");
    }
    if (is_global(g) && !is_global(result)) violated("build-back: result is not global");
}

}  // namespace

// ---------------------------------------------------------------------------

Matrix unmerge_lp(const std::vector<Type>& ps, const std::vector<Type>& ls, const ComposeOptions& opts) {
    return matrix_nary(ps, ls, kLP, opts);
}

Matrix unmerge_pl(const std::vector<Type>& ls, const std::vector<Type>& ps, const ComposeOptions& opts) {
    return matrix_nary(ls, ps, kPL, opts);
}

std::vector<Type> unmerge_l(const Type& hdagger, const std::vector<Type>& ls, const RoleSet& e,
                            const ComposeOptions& opts) {
    for (const auto& l : ls)
        if (!subset(parts(l), e)) undefined("unmL", "a localised type has roles outside " + to_string(e));
    return unml_nary(hdagger, ls, Ctx{e, opts});
}

std::vector<Type> unmerge_p(const Type& he, const std::vector<Type>& ps, const RoleSet& e,
                            const ComposeOptions& opts) {
    if (!subset(parts(he), e)) undefined("unmP", "component has roles outside " + to_string(e));
    return unmp_nary(he, ps, Ctx{e, opts});
}

Type build_back_one(const Type& gdagger, const Component& c, const ComposeOptions& opts) {
    if (!subset(parts(c.protocol), c.roles))
        fail("undefined-buildback", "component uses roles outside " + to_string(c.roles));
    Type result = bb(gdagger, c.protocol, Ctx{c.roles, opts});
    if (opts.verify) check_round_trip(gdagger, result, c, opts);
    return result;
}

Type build_back(const Type& gdagger, const std::vector<Component>& cs, const ComposeOptions& opts) {
    if (cs.empty()) fail("undefined-buildback", "no components");
    Type acc = gdagger;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        try {
            acc = build_back_one(acc, cs[i], opts);
        } catch (Failure& f) {
            f.diagnostic().message = "component " + std::to_string(i) + ": " + f.diagnostic().message;
            throw Failure(f.diagnostic());
        }
    }
    return acc;
}

std::vector<Diagnostic> check_compat(const Type& gdagger, const Component& c) {
    auto proj = try_project(gdagger, c.roles);
    if (!proj) {
        Diagnostic d = proj.error();
        d.message = "projection of the compat type onto " + to_string(c.roles) + ": " + d.message;
        return {d};
    }
    auto loc = try_localise(c.protocol);
    if (!loc) {
        Diagnostic d = loc.error();
        d.message = "localisation of the component: " + d.message;
        return {d};
    }
    if (auto diff = first_difference(*proj, *loc)) {
        return {{"compat-mismatch", *diff,
                 "projection onto " + to_string(c.roles) + " has `" + print_inline(subterm(*proj, *diff)) +
                     "` where the component's localisation has `" + print_inline(subterm(*loc, *diff)) + "`"}};
    }
    return {};
}

std::vector<Diagnostic> validate_component(const Component& c) {
    std::vector<Diagnostic> out = check_wellformed(c.protocol);
    RoleSet p = parts(c.protocol), e = eparts(c.protocol);
    if (!subset(p, c.roles))
        out.push_back({"component-roles", {}, "component uses internal roles outside " + to_string(c.roles)});
    if (intersects(e, c.roles))
        out.push_back({"component-roles", {}, "component has external roles inside " + to_string(c.roles)});
    return out;
}

std::vector<Diagnostic> validate_spec(const CompositionSpec& spec) {
    std::vector<Diagnostic> out;
    RoleSet all;
    for (const auto& c : spec.components)
        for (const auto& r : c.roles) {
            if (all.count(r))
                out.push_back({"roles-overlap", {}, "role " + r + " belongs to more than one component"});
            all.insert(r);
        }
    for (const auto& d : check_wellformed(spec.compat)) out.push_back(d);
    if (!is_global(spec.compat)) out.push_back({"compat-not-global", {}, "compat type has send/receive nodes"});
    if (spec.components.empty()) out.push_back({"no-components", {}, "manifest lists no components"});
    for (std::size_t i = 0; i < spec.components.size(); ++i)
        for (auto d : validate_component(spec.components[i])) {
            d.message = "component " + std::to_string(i) + ": " + d.message;
            out.push_back(d);
        }
    RoleSet allowed = all;
    if (spec.mode == Mode::Optimised) {
        if (spec.compat_roles.empty())
            out.push_back({"compat-roles", {}, "optimised mode needs compat-roles"});
        for (const auto& r : spec.compat_roles) {
            if (all.count(r))
                out.push_back({"roles-overlap", {}, "compat role " + r + " also belongs to a component"});
            allowed.insert(r);
        }
    } else if (!spec.compat_roles.empty()) {
        out.push_back({"compat-roles", {}, "compat-roles given in standard mode"});
    }
    if (!subset(parts(spec.compat), allowed))
        out.push_back({"compat-roles", {}, "compat type uses roles not covered by the components"});
    return out;
}

CompositionResult compose_spec(const CompositionSpec& spec, const ComposeOptions& opts) {
    CompositionResult res;
    res.errors = validate_spec(spec);
    if (!res.errors.empty()) return res;
    bool compat_ok = true;
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        CompatEntry entry{i, spec.components[i].roles, check_compat(spec.compat, spec.components[i])};
        compat_ok = compat_ok && entry.ok();
        res.compat_report.push_back(std::move(entry));
    }
    if (!compat_ok) return res;

    auto global = capture([&] { return build_back(spec.compat, spec.components, opts); });
    if (!global) {
        res.errors.push_back(global.error());
        return res;
    }
    std::map<Role, Type> locals;
    try {
        for (const auto& c : spec.components)
            for (const auto& r : c.roles) locals[r] = project_role(c.protocol, r);
        if (spec.mode == Mode::Optimised)
            for (const auto& r : spec.compat_roles) locals[r] = project_role(spec.compat, r);
    } catch (const Failure& f) {
        res.errors.push_back(f.diagnostic());
        return res;
    }
    for (const auto& [r, l] : locals) {
        auto got = try_project_role(*global, r);
        if (!got || !equal(*got, l)) {
            res.errors.push_back({"post-verification-failed", {},
                                  "projection of the composed type onto " + r + " differs from its local type"});
        }
    }
    if (!res.errors.empty()) return res;
    res.global_type = *global;
    res.locals = std::move(locals);
    return res;
}

}  // namespace hmpst
