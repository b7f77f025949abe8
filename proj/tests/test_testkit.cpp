#include <doctest.h>

#include <functional>
#include <set>

#include "hmpst/compose.hpp"
#include "hmpst/projection.hpp"
#include "hmpst/testkit.hpp"
#include "support.hpp"

using namespace hmpst;
using namespace hmpst::testkit;

namespace {

GenParams params(std::uint64_t seed, std::size_t depth, std::vector<RoleSet> pools) {
    GenParams p;
    p.seed = seed;
    p.max_depth = depth;
    p.role_pool = std::move(pools);
    p.label_pool = {"a", "b", "c"};
    return p;
}

bool cross_pool(const GenParams& p, const Type& h) {
    if (h->kind() == Kind::Msg) {
        for (const auto& pool : p.role_pool)
            if (pool.count(h->from()) && !pool.count(h->to())) return true;
    }
    for (std::size_t i = 0; i < h->child_count(); ++i)
        if (cross_pool(p, h->child(i))) return true;
    return false;
}

}  // namespace

TEST_CASE("params are validated") {
    GenParams p = params(0, 3, {{"p"}, {"p"}});
    CHECK_THROWS_AS(check_params(p), std::invalid_argument);
    p.role_pool = {{"p"}, {}};
    CHECK_THROWS_AS(check_params(p), std::invalid_argument);
    p.role_pool = {{"p"}};
    p.max_branches = 0;
    CHECK_THROWS_AS(gen_global(p), std::invalid_argument);
}

TEST_CASE("depth one gives end or nothing larger") {
    Type t = gen_global(params(1, 1, {{"p", "q"}}));
    CHECK(depth(t) == 1);
    CHECK(t->kind() == Kind::End);
    CHECK(depth(gen_global(params(1, 2, {{"p", "q"}}))) <= 2);
}

TEST_CASE("gen_global output is well-formed, global and closed") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        GenParams p = params(s, 5, {{"p", "q"}, {"r", "s"}, {"t"}});
        Type t = gen_global(p);
        REQUIRE(check_wellformed(t).empty());
        CHECK(is_global(t));
        CHECK(is_closed(t));
        CHECK(depth(t) <= 5);
        CHECK(cross_pool(p, t));
    }
}

TEST_CASE("generators are reproducible") {
    GenParams p = params(42, 6, {{"p", "q"}, {"r", "s"}});
    CHECK(equal(gen_global(p), gen_global(p)));
    CHECK(equal(gen_hybrid(p), gen_hybrid(p)));
    auto a = gen_compatible(p), b = gen_compatible(p);
    CHECK(equal(a.gdagger, b.gdagger));
    for (std::size_t i = 0; i < a.components.size(); ++i) CHECK(equal(a.components[i].protocol, b.components[i].protocol));
}

TEST_CASE("gen_hybrid keeps the internal/external split") {
    for (std::uint64_t s = 0; s < 300; ++s) {
        GenParams p = params(s, 5, {{"p", "q"}, {"r", "s"}});
        Type t = gen_hybrid(p);
        REQUIRE(check_wellformed(t).empty());
        CHECK(subset(parts(t), p.role_pool[0]));
        CHECK(subset(eparts(t), p.role_pool[1]));
    }
}

TEST_CASE("gen_compatible instances pass compatibility") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        GenParams p = params(s, 5, {{"p", "q"}, {"r", "s"}, {"t", "u"}});
        auto inst = gen_compatible(p);
        REQUIRE(inst.components.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(check_compat(inst.gdagger, inst.components[i]).empty());
            CHECK(equal(project(inst.gdagger, p.role_pool[i]), inst.skeletons[i]));
            CHECK(validate_component(inst.components[i]).empty());
        }
    }
}

TEST_CASE("components with one role are never decorated") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto inst = gen_compatible(params(s, 4, {{"p"}, {"q"}}));
        for (std::size_t i = 0; i < 2; ++i) CHECK(equal(inst.components[i].protocol, inst.skeletons[i]));
    }
}

TEST_CASE("enumerate_small at depth one") {
    auto ts = enumerate_small(1, {"p", "q"}, {"l"});
    REQUIRE(ts.size() == 1);
    CHECK(ts[0]->kind() == Kind::End);
    auto open = enumerate_small(1, {"p", "q"}, {"l"}, {"X"});
    CHECK(open.size() == 2);
}

TEST_CASE("enumerate_small at depth two, counted by hand") {
    // end, rec X . end, (end | end), and p->q / q->p in three kinds with
    // end continuations
    auto ts = enumerate_small(2, {"p", "q"}, {"l"});
    CHECK(ts.size() == 9);
    // two labels give three label sets per direction and kind
    CHECK(enumerate_small(2, {"p", "q"}, {"a", "b"}).size() == 3 + 2 * 3 * 3);
}

TEST_CASE("enumerate_small output is well-formed and duplicate-free") {
    auto ts = enumerate_small(3, {"p", "q", "r"}, {"a", "b"});
    CHECK(ts.size() > 1000);
    std::set<std::string> seen;
    for (const auto& t : ts) {
        REQUIRE(check_wellformed(t).empty());
        CHECK(depth(t) <= 3);
        seen.insert(print_inline(t));
    }
    CHECK(seen.size() == ts.size());
    CHECK_THROWS_AS(enumerate_small(5, {"p"}, {"a"}), std::invalid_argument);
}

TEST_CASE("load_corpus finds every manifest") {
    auto cs = load_corpus(fixtures::root());
    REQUIRE(cs.size() == 4);
    CHECK(cs[0].name == "company/company");
    for (const auto& c : cs) CHECK(std::filesystem::exists(c.expected_dir));
}

TEST_CASE("generated components cover every constructor") {
    std::set<Kind> seen;
    bool var_under_rec = false, par_built = false;
    std::function<void(const Type&, bool)> scan = [&](const Type& h, bool in_rec) {
        seen.insert(h->kind());
        if (h->kind() == Kind::Var && in_rec) var_under_rec = true;
        for (std::size_t i = 0; i < h->child_count(); ++i) scan(h->child(i), in_rec || h->kind() == Kind::Rec);
    };
    auto has_par = [](const Type& h) {
        std::function<bool(const Type&)> go = [&](const Type& t) {
            if (t->kind() == Kind::Par) return true;
            for (std::size_t i = 0; i < t->child_count(); ++i)
                if (go(t->child(i))) return true;
            return false;
        };
        return go(h);
    };
    for (std::uint64_t s = 0; s < 1000; ++s) {
        auto inst = gen_compatible(params(s, 5, {{"p", "q"}, {"r", "s"}, {"t"}}));
        for (const auto& c : inst.components) scan(c.protocol, false);
        if (has_par(inst.gdagger) && has_par(build_back(inst.gdagger, inst.components))) par_built = true;
    }
    for (Kind k : {Kind::End, Kind::Rec, Kind::Msg, Kind::Send, Kind::Recv}) CHECK(seen.count(k) == 1);
    CHECK(var_under_rec);
    // projection never produces a parallel node, so it shows up in the
    // coordination type and the composed result instead
    CHECK(seen.count(Kind::Par) == 0);
    CHECK(par_built);
}
