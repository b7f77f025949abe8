#include <doctest.h>

#include "hmpst/projection.hpp"
#include "support.hpp"

using namespace hmpst;

TEST_CASE("full merge") {
    Type l = T("p ! q : a . end");
    CHECK(equal(merge_proj(l, l), l));
    CHECK(equal(merge_proj(T("f1 ? d : ok . end"), T("f1 ? d : wait . X")), T("f1 ? d { ok . end, wait . X }")));
    CHECK_FALSE(try_merge_proj(T("p ! q : a . end"), T("p ! q : b . end")).ok());
    CHECK(try_merge_proj(T("p ! q : a . end"), T("p ! q : b . end")).error().rule == "merge-failure");
    // shared receive labels merge their continuations
    CHECK(equal(merge_proj(T("q ? p { a . r ? p : x . end, b . end }"), T("q ? p { a . r ? p : y . end, c . end }")),
                T("q ? p { a . r ? p { x . end, y . end }, b . end, c . end }")));
    CHECK_FALSE(try_merge_proj(T("q ? p : a(nat) . end"), T("q ? p : a(int) . end")).ok());
    CHECK_FALSE(try_merge_proj(T("rec X . p ! q : a . X"), T("rec Y . p ! q : a . Y")).ok());
    CHECK_FALSE(try_merge_proj(end(), var("X")).ok());
}

TEST_CASE("merge failure path points into the first argument") {
    auto r = try_merge_proj(T("q ? p : a . p ! q : x . end"), T("q ? p : a . p ! q : y . end"));
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().path == Path{0});
}

TEST_CASE("projection of the company coordination type") {
    Type gd = fixtures::load("company/gdagger.hmpst");
    CHECK(equal(project(gd, {"d", "ad"}), T("d ! s : prod(nat) . d ! f1 : prod(nat) . rec X . f1 ? d { ok . end, wait . X }")));
    CHECK(equal(project(gd, {"s", "w"}), T("d ? s : prod(nat) . rec X . f1 ? s { price(nat) . end, wait . X }")));
    CHECK(equal(project(gd, {"f1", "f2"}),
                T("d ? f1 : prod(nat) . rec X . f1 ! d { ok . f1 ! s : price(nat) . end, wait . f1 ! s : wait . X }")));
}

TEST_CASE("projection base cases") {
    CHECK(equal(project(end(), {"p"}), end()));
    CHECK(equal(project(T("p -> q : l(nat) . end"), {"r"}), end()));
    CHECK(equal(project(T("p -> q : l . end"), {"p", "q"}), T("p -> q : l . end")));
    CHECK(equal(project(T("p -> q : l . end"), {"p"}), T("p ! q : l . end")));
    CHECK(equal(project(T("p -> q : l . end"), {"q"}), T("p ? q : l . end")));
}

TEST_CASE("projection of a single role yields a local type") {
    Type str = fixtures::load("company/str.hmpst");
    Type d = project_role(str, "d");
    CHECK(is_local(d));
    CHECK(equal(d, T("d ! ad : prod(nat) . d ! s : prod(nat) . d ! f1 : prod(nat) . rec X . f1 ? d {"
                     " ok . d ! ad : go . end, wait . d ! ad : wait . X }")));
    CHECK(equal(project_role(fixtures::load("company/fin.hmpst"), "f2"),
                T("f1 ? f2 : prod(nat) . rec X . f2 ! f1 { price(nat) . end, wait . X }")));
    CHECK(equal(project_role(end(), "p"), end()));
}

TEST_CASE("recursion") {
    // the body is guarded after projection
    CHECK(equal(project(T("rec X . p -> q : a . X"), {"p"}), T("rec X . p ! q : a . X")));
    // recursion the projected roles never take part in disappears
    CHECK(equal(project(T("rec X . p -> q { a . end, b . X }"), {"r"}), end()));
    CHECK(equal(project(T("rec X . p -> q : a . end"), {"r"}), end()));
    // a free variable other than the binder still counts as guarded
    CHECK(equal(project(T("rec Y . p -> q : a . X"), {"r"}), T("rec Y . X")));
    // a role that drops out in one branch only cannot be merged
    CHECK_FALSE(try_project(T("rec X . p -> q { a . p -> r : x . X, b . end }"), {"r"}).ok());
}

TEST_CASE("parallel composition") {
    Type g = T("(p -> q : a . end | r -> s : b . end)");
    CHECK(equal(project(g, {"p", "q"}), T("p -> q : a . end")));
    CHECK(equal(project(g, {"r"}), T("r ! s : b . end")));
    auto r = try_project(g, {"p", "r"});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().rule == "proj-par");
    CHECK(equal(project(g, {"t"}), end()));
}

TEST_CASE("projection precondition on external roles") {
    auto r = try_project(T("p ! q : a . end"), {"q"});
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().rule == "proj-precondition");
}

TEST_CASE("hybrid prefixes") {
    Type h = T("p ! q : a . p -> r : b . end");
    CHECK(equal(project(h, {"p"}), T("p ! q : a . p ! r : b . end")));
    CHECK(equal(project(h, {"r"}), T("p ? r : b . end")));
    // sends of an unprojected role merge like messages
    CHECK(equal(project(T("p ! q { a . p -> r : x . end, b . p -> r : y . end }"), {"r"}), T("p ? r { x . end, y . end }")));
    auto bad = try_project(T("r -> p { a . p ! q : x . end, b . p ! q : y . end }"), {"p"});
    CHECK(bad.ok());
    auto fails = try_project(T("r -> s { a . p -> q : x . end, b . p -> q : y . end }"), {"p"});
    REQUIRE_FALSE(fails.ok());
    CHECK(fails.error().rule == "proj-merge-failure");
}
