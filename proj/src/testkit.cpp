#include "hmpst/testkit.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

#include "hmpst/projection.hpp"

namespace hmpst::testkit {

void check_params(const GenParams& p) {
    if (p.max_branches < 1) throw std::invalid_argument("max_branches must be at least 1");
    if (p.label_pool.empty()) throw std::invalid_argument("label_pool is empty");
    if (p.role_pool.empty()) throw std::invalid_argument("role_pool is empty");
    RoleSet seen;
    for (const auto& pool : p.role_pool) {
        if (pool.empty()) throw std::invalid_argument("role_pool contains an empty set");
        for (const auto& r : pool)
            if (!seen.insert(r).second) throw std::invalid_argument("role " + r + " is in two pools");
    }
}

namespace {

constexpr int kMaxAttempts = 10000;

enum class Flavour { Global, CrossPool, Hybrid };

// Roles available to a subtree. Global: `groups` holds one group. CrossPool:
// one group per pool. Hybrid: groups[0] internal, groups[1] external.
struct Alphabet {
    std::vector<std::vector<Role>> groups;
};

struct Scope {
    std::vector<TypeVar> bound;
    std::set<TypeVar> unguarded;
};

class Gen {
public:
    Gen(const GenParams& p, Flavour f, std::uint64_t salt) : p_(p), f_(f), rng_(p.seed ^ salt) {}

    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }
    bool chance(unsigned pct) { return below(100) < pct; }
    std::mt19937_64& rng() { return rng_; }

    Type node(std::size_t budget, const Scope& s, const Alphabet& a) {
        if (budget <= 1) return leaf(s);
        std::size_t r = below(100);
        if (r < 10) return leaf(s);
        if (r < 25) return recursion(budget, s, a);
        if (r < 33) {
            if (auto t = parallel(budget, a)) return t;
        }
        if (auto t = message(budget, s, a)) return t;
        return leaf(s);
    }

    Sort sort() {
        std::size_t r = below(100);
        if (r < 50) return Sort::unit();
        if (r < 75) return Sort::nat();
        if (r < 83) return Sort::boolean();
        if (r < 90) return Sort::integer();
        if (r < 95) return Sort::product(Sort::nat(), sort());
        return Sort::sum(Sort::boolean(), sort());
    }

private:
    Type leaf(const Scope& s) {
        std::vector<TypeVar> usable;
        for (const auto& x : s.bound)
            if (!s.unguarded.count(x)) usable.push_back(x);
        if (!usable.empty() && chance(60)) return var(usable[below(usable.size())]);
        return end();
    }

    Type recursion(std::size_t budget, const Scope& s, const Alphabet& a) {
        static const char* letters[] = {"X", "Y", "Z", "W", "V", "U"};
        std::size_t k = counter_++;
        TypeVar x = std::string(letters[k % 6]) + (k >= 6 ? std::to_string(k / 6) : "");
        Scope inner = s;
        inner.bound.push_back(x);
        inner.unguarded.insert(x);
        return rec(x, node(budget - 1, inner, a));
    }

    Type parallel(std::size_t budget, const Alphabet& a) {
        Alphabet l, r;
        if (f_ == Flavour::Hybrid) {
            l.groups.resize(2);
            r.groups.resize(2);
            for (std::size_t g = 0; g < 2; ++g)
                for (const auto& role : a.groups[g]) (chance(50) ? l : r).groups[g].push_back(role);
        } else if (f_ == Flavour::Global) {
            if (a.groups[0].size() < 2) return nullptr;
            l.groups.resize(1);
            r.groups.resize(1);
            for (const auto& role : a.groups[0]) (chance(50) ? l : r).groups[0].push_back(role);
        } else {
            if (a.groups.size() < 2) return nullptr;
            for (const auto& g : a.groups) (chance(50) ? l : r).groups.push_back(g);
        }
        return par(node(budget - 1, Scope{}, l), node(budget - 1, Scope{}, r));
    }

    Type message(std::size_t budget, const Scope& s, const Alphabet& a) {
        Kind kind = Kind::Msg;
        Role p, q;
        auto pick = [&](const std::vector<Role>& v) { return v[below(v.size())]; };
        if (f_ == Flavour::Global) {
            const auto& rs = a.groups[0];
            if (rs.size() < 2) return nullptr;
            std::size_t i = below(rs.size()), j = below(rs.size() - 1);
            if (j >= i) ++j;
            p = rs[i];
            q = rs[j];
        } else if (f_ == Flavour::CrossPool) {
            std::vector<std::size_t> live;
            for (std::size_t i = 0; i < a.groups.size(); ++i)
                if (!a.groups[i].empty()) live.push_back(i);
            if (live.size() < 2) return nullptr;
            std::size_t i = below(live.size()), j = below(live.size() - 1);
            if (j >= i) ++j;
            p = pick(a.groups[live[i]]);
            q = pick(a.groups[live[j]]);
        } else {
            const auto& in = a.groups[0];
            const auto& ex = a.groups[1];
            std::vector<Kind> options;
            if (in.size() >= 2) options.push_back(Kind::Msg);
            if (!in.empty() && !ex.empty()) {
                options.push_back(Kind::Send);
                options.push_back(Kind::Recv);
            }
            if (options.empty()) return nullptr;
            kind = options[below(options.size())];
            if (kind == Kind::Msg) {
                std::size_t i = below(in.size()), j = below(in.size() - 1);
                if (j >= i) ++j;
                p = in[i];
                q = in[j];
            } else if (kind == Kind::Send) {
                p = pick(in);
                q = pick(ex);
            } else {
                p = pick(ex);
                q = pick(in);
            }
        }
        std::vector<Label> ls = p_.label_pool;
        std::shuffle(ls.begin(), ls.end(), rng_);
        std::size_t n = std::min(ls.size(), 1 + below(p_.max_branches));
        Scope guarded{s.bound, {}};
        std::vector<Branch> bs;
        for (std::size_t i = 0; i < n; ++i) bs.push_back({ls[i], sort(), node(budget - 1, guarded, a)});
        return interaction(kind, p, q, std::move(bs));
    }

    const GenParams& p_;
    Flavour f_;
    std::mt19937_64 rng_;
    std::size_t counter_ = 0;
};

std::vector<Role> all_roles(const GenParams& p) {
    std::vector<Role> out;
    for (const auto& pool : p.role_pool) out.insert(out.end(), pool.begin(), pool.end());
    return out;
}

std::size_t pool_of(const GenParams& p, const Role& r) {
    for (std::size_t i = 0; i < p.role_pool.size(); ++i)
        if (p.role_pool[i].count(r)) return i;
    return p.role_pool.size();
}

bool has_cross_pool_msg(const GenParams& p, const Type& h) {
    if (h->kind() == Kind::Msg && pool_of(p, h->from()) != pool_of(p, h->to())) return true;
    for (std::size_t i = 0; i < h->child_count(); ++i)
        if (has_cross_pool_msg(p, h->child(i))) return true;
    return false;
}

Type decorate(const Type& h, const std::vector<Role>& roles, Gen& g, std::size_t& fresh,
              const std::vector<Label>& taken) {
    Type inner;
    switch (h->kind()) {
    case Kind::End:
    case Kind::Var: inner = h; break;
    case Kind::Rec: inner = rec(h->var(), decorate(h->body(), roles, g, fresh, taken)); break;
    case Kind::Par:
        inner = par(decorate(h->left(), roles, g, fresh, taken), decorate(h->right(), roles, g, fresh, taken));
        break;
    default: {
        std::vector<Type> conts;
        for (const auto& b : h->branches()) conts.push_back(decorate(b.cont, roles, g, fresh, taken));
        inner = with_conts(h, conts);
    }
    }
    if (roles.size() < 2) return inner;
    while (g.chance(25)) {
        std::size_t i = g.below(roles.size()), j = g.below(roles.size() - 1);
        if (j >= i) ++j;
        Label l;
        do {
            l = "m" + std::to_string(fresh++);
        } while (std::find(taken.begin(), taken.end(), l) != taken.end());
        inner = msg(roles[i], roles[j], {{l, g.sort(), inner}});
    }
    return inner;
}

}  // namespace

Type gen_global(const GenParams& p) {
    check_params(p);
    Alphabet a{{all_roles(p)}};
    bool need_cross = p.role_pool.size() >= 2 && p.max_depth >= 2;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Gen g(p, Flavour::Global, static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
        Type t = g.node(p.max_depth, Scope{}, a);
        if (need_cross && !has_cross_pool_msg(p, t)) continue;
        if (!check_wellformed(t).empty()) continue;
        return t;
    }
    throw std::runtime_error("gen_global: no valid type within the attempt bound");
}

Type gen_hybrid(const GenParams& p) {
    check_params(p);
    Alphabet a;
    a.groups.resize(2);
    std::vector<Role> all = all_roles(p);
    for (const auto& r : all) (p.role_pool[0].count(r) ? a.groups[0] : a.groups[1]).push_back(r);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Gen g(p, Flavour::Hybrid, 0xA5A5A5A5ULL + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
        Type t = g.node(p.max_depth, Scope{}, a);
        if (check_wellformed(t).empty()) return t;
    }
    throw std::runtime_error("gen_hybrid: no valid type within the attempt bound");
}

CompatibleInstance gen_compatible(const GenParams& p) {
    check_params(p);
    Alphabet a;
    for (const auto& pool : p.role_pool) a.groups.emplace_back(pool.begin(), pool.end());
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Gen g(p, Flavour::CrossPool, 0x5EEDULL + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
        Type gd = g.node(p.max_depth, Scope{}, a);
        if (!check_wellformed(gd).empty()) continue;
        CompatibleInstance inst{gd, {}, {}};
        bool ok = true;
        for (const auto& pool : p.role_pool) {
            auto s = try_project(gd, pool);
            if (!s) {
                ok = false;
                break;
            }
            inst.skeletons.push_back(*s);
        }
        if (!ok) continue;
        std::size_t fresh = 0;
        for (std::size_t i = 0; i < p.role_pool.size(); ++i) {
            std::vector<Role> roles(p.role_pool[i].begin(), p.role_pool[i].end());
            inst.components.push_back({decorate(inst.skeletons[i], roles, g, fresh, p.label_pool), p.role_pool[i]});
        }
        return inst;
    }
    throw std::runtime_error("gen_compatible: no projectable type within the attempt bound");
}

namespace {

class Enumerator {
public:
    Enumerator(const RoleSet& roles, const std::vector<Label>& labels, const std::vector<TypeVar>& free)
        : roles_(roles.begin(), roles.end()), free_(free) {
        std::size_t n = labels.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
            std::vector<Label> sub;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::size_t{1} << i)) sub.push_back(labels[i]);
            label_sets_.push_back(sub);
        }
        std::sort(label_sets_.begin(), label_sets_.end(), [](const auto& x, const auto& y) {
            return x.size() != y.size() ? x.size() < y.size() : x < y;
        });
        static const char* names[] = {"X", "Y", "Z", "W", "V", "U", "T", "S"};
        for (const char* nm : names)
            if (std::find(free_.begin(), free_.end(), nm) == free_.end()) binders_.push_back(nm);
    }

    // Types of depth <= d. `level` binders are in scope; bit k of
    // `unguarded` marks binder k as not yet guarded. `closed` drops the
    // free variables (for parallel sides).
    const std::vector<Type>& at(std::size_t d, std::size_t level, unsigned unguarded, bool closed) {
        auto key = std::make_tuple(d, level, unguarded, closed);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<Type> out;
        if (d >= 1) {
            out.push_back(end());
            for (std::size_t k = 0; k < level; ++k)
                if (!(unguarded & (1u << k))) out.push_back(var(binders_[k]));
            if (!closed)
                for (const auto& f : free_) out.push_back(var(f));
        }
        if (d >= 2) {
            const std::vector<Type>& conts = at(d - 1, level, 0, closed);
            for (Kind k : {Kind::Msg, Kind::Send, Kind::Recv})
                for (const auto& p : roles_)
                    for (const auto& q : roles_) {
                        if (p == q) continue;
                        for (const auto& ls : label_sets_) branchings(k, p, q, ls, conts, out);
                    }
            if (level < binders_.size()) {
                const std::vector<Type>& bodies = at(d - 1, level + 1, unguarded | (1u << level), closed);
                for (const auto& b : bodies) out.push_back(rec(binders_[level], b));
            }
            const std::vector<Type>& sides = at(d - 1, 0, 0, true);
            for (const auto& l : sides)
                for (const auto& r : sides) {
                    if (intersects(participants(l), participants(r))) continue;
                    out.push_back(par(l, r));
                }
        }
        // Drop subterms that can never sit inside a well-formed type.
        std::vector<Type> kept;
        for (const auto& t : out)
            if (!intersects(parts(t), eparts(t))) kept.push_back(t);
        return memo_[key] = std::move(kept);
    }

private:
    void branchings(Kind k, const Role& p, const Role& q, const std::vector<Label>& ls,
                    const std::vector<Type>& conts, std::vector<Type>& out) {
        std::vector<std::size_t> idx(ls.size(), 0);
        for (;;) {
            std::vector<Branch> bs;
            for (std::size_t i = 0; i < ls.size(); ++i) bs.push_back({ls[i], Sort::unit(), conts[idx[i]]});
            out.push_back(interaction(k, p, q, std::move(bs)));
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == conts.size()) idx[i++] = 0;
            if (i == idx.size()) return;
        }
    }

    std::vector<Role> roles_;
    std::vector<TypeVar> free_;
    std::vector<std::vector<Label>> label_sets_;
    std::vector<TypeVar> binders_;
    std::map<std::tuple<std::size_t, std::size_t, unsigned, bool>, std::vector<Type>> memo_;
};

}  // namespace

std::vector<Type> enumerate_small(std::size_t bound, const RoleSet& roles, const std::vector<Label>& labels,
                                  const std::vector<TypeVar>& free) {
    if (bound > 4) throw std::invalid_argument("enumerate_small: bound must be at most 4");
    Enumerator en(roles, labels, free);
    std::vector<Type> out;
    for (const auto& t : en.at(bound, 0, 0, free.empty()))
        if (check_wellformed(t).empty()) out.push_back(t);
    return out;
}

std::vector<CorpusCase> load_corpus(const std::filesystem::path& fixtures_root) {
    std::vector<CorpusCase> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(fixtures_root)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".hmanifest") continue;
        const auto& m = entry.path();
        std::string name = std::filesystem::relative(m, fixtures_root).replace_extension().string();
        out.push_back({name, m, m.parent_path() / "expected"});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.manifest < b.manifest; });
    return out;
}

}  // namespace hmpst::testkit
