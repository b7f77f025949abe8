#include "hmpst/surface.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hmpst {

std::string to_string(const ParseError& e) {
    std::string where = e.source.empty() ? "" : e.source + ":";
    return where + std::to_string(e.span.line) + ":" + std::to_string(e.span.column) + ": expected " +
           e.expected + ", found " + e.found;
}

ParseException::ParseException(ParseError e) : std::runtime_error(to_string(e)), err_(std::move(e)) {}

namespace {

enum class Tok { Lower, Upper, Arrow, Bang, Quest, Colon, LBrace, RBrace, Comma, Dot, LParen, RParen, Bar, Plus, Star, Eof };

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "end of input";
    return "'" + t.text + "'";
}

class Lexer {
public:
    explicit Lexer(const std::string& s) : src_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            SourceSpan sp{pos_, pos_, line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back({Tok::Eof, "", sp});
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = pos_;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    advance();
                sp.byte_end = pos_;
                Tok k = std::isupper(static_cast<unsigned char>(c)) ? Tok::Upper : Tok::Lower;
                out.push_back({k, src_.substr(start, pos_ - start), sp});
                continue;
            }
            Tok k;
            std::string text(1, c);
            switch (c) {
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    advance();
                    text = "->";
                    k = Tok::Arrow;
                    break;
                }
                bad(sp, c);
            case '!': k = Tok::Bang; break;
            case '?': k = Tok::Quest; break;
            case ':': k = Tok::Colon; break;
            case '{': k = Tok::LBrace; break;
            case '}': k = Tok::RBrace; break;
            case ',': k = Tok::Comma; break;
            case '.': k = Tok::Dot; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '|': k = Tok::Bar; break;
            case '+': k = Tok::Plus; break;
            case '*': k = Tok::Star; break;
            default: bad(sp, c);
            }
            advance();
            sp.byte_end = pos_;
            out.push_back({k, text, sp});
        }
    }

private:
    [[noreturn]] void bad(SourceSpan sp, char c) {
        sp.byte_end = sp.byte_start + 1;
        std::string found = std::isprint(static_cast<unsigned char>(c)) ? std::string("'") + c + "'"
                                                                          : "byte " + std::to_string(static_cast<unsigned char>(c));
        throw ParseException({sp, "a token", found, ""});
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

bool is_keyword(const std::string& s) { return s == "end" || s == "rec"; }

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Type whole() {
        Type t = type();
        expect(Tok::Eof, "end of input");
        return t;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

    [[noreturn]] void error(const std::string& expected) {
        throw ParseException({peek().span, expected, describe(peek()), ""});
    }

    Token expect(Tok k, const std::string& what) {
        if (peek().kind != k) error(what);
        return next();
    }

    std::string ident(const std::string& what) {
        if (peek().kind != Tok::Lower || is_keyword(peek().text)) error(what);
        return next().text;
    }

    Type type() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Upper: return var(next().text);
        case Tok::LParen: {
            next();
            std::vector<Type> sides{type()};
            expect(Tok::Bar, "'|'");
            sides.push_back(type());
            while (peek().kind == Tok::Bar) {
                next();
                sides.push_back(type());
            }
            expect(Tok::RParen, "')' or '|'");
            Type acc = sides.back();
            for (std::size_t k = sides.size() - 1; k-- > 0;) acc = par(sides[k], acc);
            return acc;
        }
        case Tok::Lower:
            if (t.text == "end") {
                next();
                return end();
            }
            if (t.text == "rec") {
                next();
                std::string x = expect(Tok::Upper, "a type variable").text;
                expect(Tok::Dot, "'.'");
                return rec(x, type());
            }
            return interaction_();
        default: error("a type");
        }
    }

    Type interaction_() {
        std::string p = ident("a role");
        Kind k;
        switch (peek().kind) {
        case Tok::Arrow: k = Kind::Msg; break;
        case Tok::Bang: k = Kind::Send; break;
        case Tok::Quest: k = Kind::Recv; break;
        default: error("'->', '!' or '?'");
        }
        next();
        std::string q = ident("a role");
        std::vector<Branch> bs;
        if (peek().kind == Tok::Colon) {
            next();
            bs.push_back(branch());
        } else if (peek().kind == Tok::LBrace) {
            next();
            bs.push_back(branch());
            while (peek().kind == Tok::Comma) {
                next();
                bs.push_back(branch());
            }
            expect(Tok::RBrace, "',' or '}'");
        } else {
            error("':' or '{'");
        }
        return interaction(k, p, q, std::move(bs));
    }

    Branch branch() {
        std::string l = ident("a label");
        Sort s = Sort::unit();
        if (peek().kind == Tok::LParen) {
            next();
            s = sort();
            expect(Tok::RParen, "')'");
        }
        expect(Tok::Dot, "'.'");
        return {l, s, type()};
    }

    Sort sort() {
        if (peek().kind == Tok::LParen) {
            next();
            Sort a = sort();
            bool is_sum;
            if (peek().kind == Tok::Plus) is_sum = true;
            else if (peek().kind == Tok::Star) is_sum = false;
            else error("'+' or '*'");
            next();
            Sort b = sort();
            expect(Tok::RParen, "')'");
            return is_sum ? Sort::sum(a, b) : Sort::product(a, b);
        }
        if (peek().kind == Tok::Lower) {
            const std::string& w = peek().text;
            if (w == "unit") return next(), Sort::unit();
            if (w == "nat") return next(), Sort::nat();
            if (w == "int") return next(), Sort::integer();
            if (w == "bool") return next(), Sort::boolean();
        }
        error("a sort");
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

std::vector<Diagnostic> construction_violations(const Type& t) {
    std::vector<Diagnostic> out;
    for (auto& d : check_wellformed(t))
        if (d.rule == "self-interaction" || d.rule == "duplicate-label" || d.rule == "shadowed-rec")
            out.push_back(std::move(d));
    return out;
}

std::string op(Kind k) {
    switch (k) {
    case Kind::Msg: return " -> ";
    case Kind::Send: return " ! ";
    default: return " ? ";
    }
}

std::string branch_head(const Branch& b) {
    return b.payload.is_unit() ? b.label : b.label + "(" + print_sort(b.payload) + ")";
}

void pp(const Type& h, std::size_t indent, std::string& out) {
    std::string pad(indent, ' ');
    switch (h->kind()) {
    case Kind::End: out += "end"; return;
    case Kind::Var: out += h->var(); return;
    case Kind::Rec:
        out += "rec " + h->var() + " . ";
        pp(h->body(), indent, out);
        return;
    case Kind::Par:
        out += "(\n" + pad + "  ";
        pp(h->left(), indent + 2, out);
        out += "\n" + pad + "|\n" + pad + "  ";
        pp(h->right(), indent + 2, out);
        out += "\n" + pad + ")";
        return;
    default: break;
    }
    out += h->from() + op(h->kind()) + h->to();
    const auto& bs = h->branches();
    if (bs.size() == 1) {
        out += " : " + branch_head(bs[0]) + " . ";
        pp(bs[0].cont, indent, out);
        return;
    }
    out += " {\n";
    for (std::size_t i = 0; i < bs.size(); ++i) {
        out += pad + "  " + branch_head(bs[i]) + " . ";
        pp(bs[i].cont, indent + 2, out);
        out += i + 1 < bs.size() ? ",\n" : "\n";
    }
    out += pad + "}";
}

void inline_pp(const Type& h, std::string& out) {
    switch (h->kind()) {
    case Kind::End: out += "end"; return;
    case Kind::Var: out += h->var(); return;
    case Kind::Rec:
        out += "rec " + h->var() + " . ";
        inline_pp(h->body(), out);
        return;
    case Kind::Par:
        out += "(";
        inline_pp(h->left(), out);
        out += " | ";
        inline_pp(h->right(), out);
        out += ")";
        return;
    default: break;
    }
    out += h->from() + op(h->kind()) + h->to();
    const auto& bs = h->branches();
    if (bs.size() == 1) {
        out += " : " + branch_head(bs[0]) + " . ";
        inline_pp(bs[0].cont, out);
        return;
    }
    out += " { ";
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (i) out += ", ";
        out += branch_head(bs[i]) + " . ";
        inline_pp(bs[i].cont, out);
    }
    out += " }";
}

}  // namespace

ParseOutcome try_parse_type(const std::string& text) {
    ParseOutcome r;
    try {
        Type t = Parser(Lexer(text).run()).whole();
        r.diagnostics = construction_violations(t);
        if (r.diagnostics.empty()) r.type = t;
    } catch (const ParseException& e) {
        r.error = e.error();
    }
    return r;
}

Type parse_type(const std::string& text) {
    ParseOutcome r = try_parse_type(text);
    if (r.error) throw ParseException(*r.error);
    if (!r.diagnostics.empty()) throw Failure(r.diagnostics.front());
    return *r.type;
}

std::string print_sort(const Sort& s) { return to_string(s); }

std::string print_type(const Type& h) {
    std::string out;
    pp(h, 0, out);
    return out;
}

std::string print_inline(const Type& h) {
    std::string out;
    inline_pp(h, out);
    return out;
}

std::string print_inline_head(const Type& h) {
    switch (h->kind()) {
    case Kind::End: return "end";
    case Kind::Var: return h->var();
    case Kind::Rec: return "rec " + h->var();
    case Kind::Par: return "( | )";
    default: return h->from() + op(h->kind()) + h->to();
    }
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseException({{}, "a readable file", "cannot open " + file.string(), file.string()});
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Type load_type(const std::filesystem::path& file) {
    std::string text = read_file(file);
    try {
        return parse_type(text);
    } catch (const ParseException& e) {
        ParseError err = e.error();
        err.source = file.string();
        throw ParseException(err);
    } catch (const Failure& f) {
        Diagnostic d = f.diagnostic();
        d.message = file.string() + ": " + d.message;
        throw Failure(d);
    }
}

namespace {

struct Word {
    std::string text;
    SourceSpan span;
};

bool valid_role(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0])) || is_keyword(s)) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

CompositionSpec parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    CompositionSpec spec;
    std::optional<std::string> compat_path;
    bool have_mode = false, have_compat_roles = false;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0, offset = 0;
    auto err = [&](const Word& w, const std::string& expected, const std::string& found) {
        throw ParseException({w.span, expected, found, ""});
    };
    std::vector<std::pair<std::string, RoleSet>> component_files;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t line_start = offset;
        offset += line.size() + 1;
        std::string body = line.substr(0, line.find('#'));
        std::vector<Word> ws;
        for (std::size_t i = 0; i < body.size();) {
            if (std::isspace(static_cast<unsigned char>(body[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < body.size() && !std::isspace(static_cast<unsigned char>(body[j]))) ++j;
            ws.push_back({body.substr(i, j - i), {line_start + i, line_start + j, lineno, i + 1}});
            i = j;
        }
        if (ws.empty()) continue;
        Word eol{"", {line_start + body.size(), line_start + body.size(), lineno, body.size() + 1}};
        const std::string& kw = ws[0].text;
        auto roles_from = [&](std::size_t k) {
            RoleSet rs;
            if (k >= ws.size()) err(eol, "a role", "end of line");
            for (; k < ws.size(); ++k) {
                if (!valid_role(ws[k].text)) err(ws[k], "a role", "'" + ws[k].text + "'");
                if (!rs.insert(ws[k].text).second) err(ws[k], "distinct roles", "'" + ws[k].text + "' twice");
            }
            return rs;
        };
        if (kw == "compat") {
            if (compat_path) err(ws[0], "a single compat line", "a second compat line");
            if (ws.size() != 2) err(ws.size() < 2 ? eol : ws[2], ws.size() < 2 ? "a path" : "end of line",
                                    ws.size() < 2 ? "end of line" : "'" + ws[2].text + "'");
            compat_path = ws[1].text;
        } else if (kw == "component") {
            if (ws.size() < 2) err(eol, "a path", "end of line");
            if (ws.size() < 3 || ws[2].text != "roles")
                err(ws.size() < 3 ? eol : ws[2], "'roles'", ws.size() < 3 ? "end of line" : "'" + ws[2].text + "'");
            component_files.emplace_back(ws[1].text, roles_from(3));
        } else if (kw == "mode") {
            if (have_mode) err(ws[0], "a single mode line", "a second mode line");
            if (ws.size() != 2 || (ws[1].text != "standard" && ws[1].text != "optimised"))
                err(ws.size() < 2 ? eol : ws[1], "'standard' or 'optimised'",
                    ws.size() < 2 ? "end of line" : "'" + ws[1].text + "'");
            spec.mode = ws[1].text == "standard" ? Mode::Standard : Mode::Optimised;
            have_mode = true;
        } else if (kw == "compat-roles") {
            if (have_compat_roles) err(ws[0], "a single compat-roles line", "a second compat-roles line");
            spec.compat_roles = roles_from(1);
            have_compat_roles = true;
        } else {
            err(ws[0], "'compat', 'component', 'mode' or 'compat-roles'", "'" + kw + "'");
        }
    }
    SourceSpan eof{text.size(), text.size(), lineno + 1, 1};
    if (!compat_path) throw ParseException({eof, "a compat line", "end of manifest", ""});
    if (component_files.empty()) throw ParseException({eof, "a component line", "end of manifest", ""});
    if (spec.mode == Mode::Optimised && !have_compat_roles)
        throw ParseException({eof, "a compat-roles line (mode optimised)", "end of manifest", ""});
    if (spec.mode == Mode::Standard && have_compat_roles)
        throw ParseException({eof, "mode optimised (compat-roles given)", "mode standard", ""});

    spec.compat = load_type(base_dir / *compat_path);
    for (auto& [path, roles] : component_files) spec.components.push_back({load_type(base_dir / path), roles});
    auto diags = validate_spec(spec);
    if (!diags.empty()) throw Failure(diags.front());
    return spec;
}

CompositionSpec load_manifest(const std::filesystem::path& file) {
    std::string text = read_file(file);
    try {
        return parse_manifest(text, file.parent_path());
    } catch (const ParseException& e) {
        ParseError err = e.error();
        if (err.source.empty()) err.source = file.string();
        throw ParseException(err);
    }
}

}  // namespace hmpst
