#include <doctest.h>

#include "hmpst/compose.hpp"
#include "hmpst/localiser.hpp"
#include "hmpst/projection.hpp"
#include "support.hpp"

using namespace hmpst;

namespace {

Component comp(const std::string& text, RoleSet e) { return {T(text), std::move(e)}; }

CompositionSpec company() {
    return {fixtures::load("company/gdagger.hmpst"),
            {{fixtures::load("company/str.hmpst"), {"d", "ad"}},
             {fixtures::load("company/sales.hmpst"), {"s", "w"}},
             {fixtures::load("company/fin.hmpst"), {"f1", "f2"}}},
            Mode::Standard,
            {}};
}

// p!q:lj . r?p:mi . end, so row i re-merges by send union and column j by
// receive union.
Type cell(int i, int j) {
    return T("p ! q : l" + std::to_string(j) + " . r ? p : m" + std::to_string(i) + " . end");
}

}  // namespace

TEST_CASE("check_compat") {
    Type gd = fixtures::load("company/gdagger.hmpst");
    CHECK(check_compat(gd, {fixtures::load("company/str.hmpst"), {"d", "ad"}}).empty());
    CHECK(check_compat(fixtures::load("oauth/standard/gdagger.hmpst"),
                       {fixtures::load("oauth/standard/res.hmpst"), {"ua", "res"}})
              .empty());
    auto ds = check_compat(T("p -> q : l . end"), comp("r ! t : m . end", {"r", "s"}));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].rule == "compat-mismatch");
    CHECK(ds[0].path.empty());
}

TEST_CASE("unmerge_lp base cases") {
    std::vector<Type> ls = {T("p ! q : a . end"), T("p ! q : b . end")};
    CHECK(unmerge_lp({}, ls).empty());
    Matrix one = unmerge_lp({T("p ! q { a . end, b . end }")}, ls);
    REQUIRE(one.size() == 1);
    REQUIRE(one[0].size() == 2);
    CHECK(equal(one[0][0], ls[0]));
    CHECK(equal(one[0][1], ls[1]));
}

TEST_CASE("unmerge_lp on a 2x2 send/receive grid") {
    std::vector<Type> ps, ls;
    for (int i = 1; i <= 2; ++i) ps.push_back(merge_loc(cell(i, 1), cell(i, 2)));
    for (int j = 1; j <= 2; ++j) ls.push_back(merge_proj(cell(1, j), cell(2, j)));
    Matrix m = unmerge_lp(ps, ls, {true, nullptr});
    REQUIRE(m.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(m[i].size() == 2);
        CHECK(equal(merge_loc_all(m[i]), ps[i]));
        for (std::size_t j = 0; j < 2; ++j) CHECK(equal(m[i][j], cell(int(i) + 1, int(j) + 1)));
    }
    for (std::size_t j = 0; j < 2; ++j) CHECK(equal(merge_proj(m[0][j], m[1][j]), ls[j]));
}

TEST_CASE("unmerge_pl is the dual grid") {
    std::vector<Type> ps, ls;
    for (int i = 1; i <= 2; ++i) ps.push_back(merge_loc(cell(i, 1), cell(i, 2)));
    for (int j = 1; j <= 2; ++j) ls.push_back(merge_proj(cell(1, j), cell(2, j)));
    Matrix m = unmerge_pl(ls, ps, {true, nullptr});
    REQUIRE(m.size() == 2);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(equal(merge_proj_all(m[j]), ls[j]));
        for (std::size_t i = 0; i < 2; ++i) CHECK(equal(m[j][i], cell(int(i) + 1, int(j) + 1)));
    }
    CHECK(unmerge_pl({}, ps).empty());
    Matrix one = unmerge_pl({ls[0]}, ps);
    REQUIRE(one.size() == 1);
    CHECK(equal(one[0][1], ps[1]));
}

TEST_CASE("unmerge_lp with three columns") {
    std::vector<Type> ps, ls;
    auto c3 = [](int i, int j) {
        return T("p ! q : l" + std::to_string(j) + " . r ? p : m" + std::to_string(i) + " . end");
    };
    for (int i = 1; i <= 3; ++i) ps.push_back(merge_loc_all({c3(i, 1), c3(i, 2), c3(i, 3)}));
    for (int j = 1; j <= 3; ++j) ls.push_back(merge_proj_all({c3(1, j), c3(2, j), c3(3, j)}));
    Matrix m = unmerge_lp(ps, ls, {true, nullptr});
    REQUIRE(m.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(equal(m[i][j], c3(int(i) + 1, int(j) + 1)));
}

TEST_CASE("unmerge_l on the unmerge example") {
    RoleSet e = {"s", "r"};
    auto out = unmerge_l(T("s -> p { l21 . end, l22 . end }"), {T("s ! p : l21 . end"), T("s ! p : l22 . end")}, e);
    REQUIRE(out.size() == 2);
    CHECK(equal(out[0], T("s -> p : l21 . end")));
    CHECK(equal(out[1], T("s -> p : l22 . end")));
    Type h = T("p -> q : a . end");
    auto single = unmerge_l(h, {T("end")}, {"r"});
    REQUIRE(single.size() == 1);
    CHECK(equal(single[0], h));
}

TEST_CASE("unmerge_p") {
    RoleSet e = {"q", "r"};
    Type he = T("p ? q { a . r -> q : x . end, b . r -> q : y . end }");
    auto out = unmerge_p(he, {T("p ? q : a . end"), T("p ? q : b . end")}, e, {true, nullptr});
    REQUIRE(out.size() == 2);
    CHECK(equal(out[0], T("p ? q : a . r -> q : x . end")));
    CHECK(equal(out[1], T("p ? q : b . r -> q : y . end")));
    auto single = unmerge_p(he, {T("end")}, e);
    REQUIRE(single.size() == 1);
    CHECK(equal(single[0], he));
    auto trivial = unmerge_p(end(), {end()}, e);
    CHECK(equal(trivial.at(0), end()));
}

TEST_CASE("build_back_one") {
    CHECK(equal(build_back_one(T("p -> q : l0 . s -> p : l2 . end"), comp("s -> r : l1 . s ! p : l2 . end", {"s", "r"})),
                T("p -> q : l0 . s -> r : l1 . s -> p : l2 . end")));
    CHECK(equal(build_back_one(T("p -> q : l0 . s -> p { l21 . end, l22 . end }"),
                               comp("s -> r { l11 . s ! p : l21 . end, l12 . s ! p : l22 . end }", {"s", "r"})),
                T("p -> q : l0 . s -> r { l11 . s -> p : l21 . end, l12 . s -> p : l22 . end }")));
    Type h = T("p -> q : a . end");
    CHECK(equal(build_back_one(end(), {h, {"p", "q"}}), h));
    CHECK(equal(build_back_one(fixtures::load("company/gdagger.hmpst"), {fixtures::load("company/str.hmpst"), {"d", "ad"}}),
                fixtures::load("company/expected/hdagger1.hmpst")));
}

TEST_CASE("build_back_one keeps unrelated recursion alongside") {
    Type g = build_back_one(T("rec X . p -> q { a . X, b . end }"), comp("r -> s : c . end", {"r", "s"}));
    CHECK(equal(g, T("(rec X . p -> q { a . X, b . end } | r -> s : c . end)")));
}

TEST_CASE("build_back_one reports undefined cases") {
    auto r = capture([] { return build_back_one(T("p -> q : a . end"), comp("p -> q : a . end", {"p", "q"})); });
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().rule == "undefined-buildback");
}

TEST_CASE("build_back composes all components") {
    auto spec = company();
    Type g = build_back(spec.compat, spec.components);
    CHECK(equal(g, fixtures::load("company/expected/global.hmpst")));
    CHECK(is_global(g));
    CHECK(equal(build_back(spec.compat, {spec.components[0]}), build_back_one(spec.compat, spec.components[0])));
    Type par = build_back(fixtures::load("parallel/gdagger.hmpst"),
                          {{fixtures::load("parallel/h1.hmpst"), {"p", "q"}}, {fixtures::load("parallel/h2.hmpst"), {"r", "s"}}});
    CHECK(equal(par, fixtures::load("parallel/expected/global.hmpst")));
}

TEST_CASE("verify mode counts its checks") {
    auto spec = company();
    VerifyStats stats;
    Type g = build_back(spec.compat, spec.components, {true, &stats});
    CHECK(equal(g, fixtures::load("company/expected/global.hmpst")));
    CHECK(stats.buildback_checks == 3);
    CHECK(stats.unmerge_checks > 0);
}

TEST_CASE("compose_spec on the company corpus") {
    auto res = compose_spec(company());
    REQUIRE(res.ok());
    CHECK(res.compat_report.size() == 3);
    CHECK(equal(res.locals.at("d"), fixtures::load("company/expected/d.hmpst")));
    CHECK(equal(res.locals.at("f1"), fixtures::load("company/expected/f1.hmpst")));
    CHECK(equal(res.locals.at("f2"), fixtures::load("company/expected/f2.hmpst")));
    CHECK(res.locals.size() == 6);
}

TEST_CASE("compose_spec in optimised mode") {
    CompositionSpec spec{fixtures::load("oauth/optimised/gdagger.hmpst"),
                         {{fixtures::load("oauth/optimised/res.hmpst"), {"ua", "res"}}},
                         Mode::Optimised,
                         {"oa", "ow"}};
    auto res = compose_spec(spec);
    REQUIRE(res.ok());
    CHECK(res.compat_report.size() == 1);
    CHECK(equal(res.locals.at("oa"), project_role(spec.compat, "oa")));
    Type auth = fixtures::load("oauth/standard/auth.hmpst");
    for (const Role& r : {"oa", "ow"}) CHECK(equal(project_role(auth, r), project_role(spec.compat, r)));
}

TEST_CASE("compose_spec reports failures without a result") {
    auto spec = company();
    spec.components[2].protocol = load_type(fixtures::mutants() / "fin_mutated.hmpst");
    auto res = compose_spec(spec);
    CHECK_FALSE(res.ok());
    CHECK_FALSE(res.global_type.has_value());
    CHECK(res.locals.empty());
    REQUIRE(res.compat_report.size() == 3);
    CHECK(res.compat_report[0].ok());
    REQUIRE_FALSE(res.compat_report[2].ok());
    CHECK(res.compat_report[2].diagnostics[0].rule == "compat-mismatch");
}

TEST_CASE("validate_spec") {
    auto spec = company();
    CHECK(validate_spec(spec).empty());
    spec.components[1].roles = {"d", "w"};
    auto ds = validate_spec(spec);
    REQUIRE_FALSE(ds.empty());
    CHECK(ds[0].rule == "roles-overlap");

    CompositionSpec local{T("p ! q : a . end"), {comp("p -> r : a . end", {"p", "r"})}, Mode::Standard, {}};
    ds = validate_spec(local);
    REQUIRE_FALSE(ds.empty());
    bool saw = false;
    for (const auto& d : ds) saw = saw || d.rule == "compat-not-global";
    CHECK(saw);

    CompositionSpec none{T("end"), {}, Mode::Standard, {}};
    CHECK(validate_spec(none)[0].rule == "no-components");
}
