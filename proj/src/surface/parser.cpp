#include "rtc/surface.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace rtc {

namespace {

enum class Tok {
    Ident,
    Nat,
    Arrow,  // ->
    Equals, // =
    LBrace,
    RBrace,
    LParen,
    RParen,
    Lt,
    Gt,
    Colon,
    Comma,
    Dot,
    Bang,
    Query,
    Plus,
    Amp,
    At,
    Star,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

struct Lexer {
    const std::string& src;
    std::string file;
    size_t pos = 0;
    int line = 1, col = 1;

    Lexer(const std::string& s, std::string f) : src(s), file(std::move(f)) {}

    SourceSpan here(int len = 1) const { return SourceSpan{file, line, col, len}; }

    void advance() {
        if (pos < src.size() && src[pos] == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        pos++;
    }

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n')
                    advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::variant<Token, ParseError> next() {
        skip_ws();
        if (pos >= src.size())
            return Token{Tok::End, "", here(0)};
        char c = src[pos];
        SourceSpan sp = here();
        auto one = [&](Tok k) {
            advance();
            return Token{k, std::string(1, c), sp};
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
                    src[pos] == '\'')) {
                s += src[pos];
                advance();
            }
            sp.length = static_cast<int>(s.size());
            return Token{Tok::Ident, s, sp};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                s += src[pos];
                advance();
            }
            sp.length = static_cast<int>(s.size());
            return Token{Tok::Nat, s, sp};
        }
        switch (c) {
        case '-':
            if (pos + 1 < src.size() && src[pos + 1] == '>') {
                advance();
                advance();
                sp.length = 2;
                return Token{Tok::Arrow, "->", sp};
            }
            return ParseError{sp, "expected '->'"};
        case '=':
            return one(Tok::Equals);
        case '{':
            return one(Tok::LBrace);
        case '}':
            return one(Tok::RBrace);
        case '(':
            return one(Tok::LParen);
        case ')':
            return one(Tok::RParen);
        case '<':
            return one(Tok::Lt);
        case '>':
            return one(Tok::Gt);
        case ':':
            return one(Tok::Colon);
        case ',':
            return one(Tok::Comma);
        case '.':
            return one(Tok::Dot);
        case '!':
            return one(Tok::Bang);
        case '?':
            return one(Tok::Query);
        case '+':
            return one(Tok::Plus);
        case '&':
            return one(Tok::Amp);
        case '@':
            return one(Tok::At);
        case '*':
            return one(Tok::Star);
        default:
            return ParseError{sp, std::string("unexpected character '") + c + "'"};
        }
    }
};

bool is_basic(const std::string& s) {
    return s == "unit" || s == "bool" || s == "int" || s == "str";
}

struct Parser {
    std::vector<Token> toks;
    size_t i = 0;
    std::vector<std::string> warnings;
    std::vector<RecVar> bound;

    const Token& peek(size_t k = 0) const { return toks[std::min(i + k, toks.size() - 1)]; }
    const Token& get() { return toks[std::min(i++, toks.size() - 1)]; }

    [[nodiscard]] std::optional<ParseError> expect(Tok k, const char* what) {
        if (peek().kind != k)
            return ParseError{peek().span, std::string("expected ") + what};
        ++i;
        return std::nullopt;
    }

    bool at_kw(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    // ----- message types -----

    std::variant<MsgRef, ParseError> parse_msg() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Bang:
        case Tok::Query: {
            bool send = t.kind == Tok::Bang;
            SourceSpan sp = t.span;
            ++i;
            auto ann = parse_ann(sp);
            if (auto* e = std::get_if<ParseError>(&ann))
                return *e;
            auto payload = parse_msg_atom();
            if (auto* e = std::get_if<ParseError>(&payload))
                return *e;
            if (auto e = expect(Tok::Dot, "'.' after payload"))
                return *e;
            auto cont = parse_msg();
            if (auto* e = std::get_if<ParseError>(&cont))
                return *e;
            auto a = std::get<std::optional<std::uint64_t>>(ann);
            return send ? m_send(std::get<MsgRef>(payload), std::get<MsgRef>(cont), a)
                        : m_recv(std::get<MsgRef>(payload), std::get<MsgRef>(cont), a);
        }
        case Tok::Plus:
        case Tok::Amp: {
            bool select = t.kind == Tok::Plus;
            SourceSpan sp = t.span;
            ++i;
            auto ann_v = parse_ann(sp);
            if (auto* e = std::get_if<ParseError>(&ann_v))
                return *e;
            auto ann = std::get<std::optional<std::uint64_t>>(ann_v);
            if (auto e = expect(Tok::LBrace, "'{'"))
                return *e;
            std::map<Label, MsgRef> bs;
            while (true) {
                auto lbl = parse_label();
                if (auto* e = std::get_if<ParseError>(&lbl))
                    return *e;
                if (auto e = expect(Tok::Colon, "':' after label"))
                    return *e;
                auto b = parse_msg();
                if (auto* e = std::get_if<ParseError>(&b))
                    return *e;
                if (!bs.emplace(std::get<Label>(lbl), std::get<MsgRef>(b)).second)
                    return ParseError{sp, "duplicate label in choice type"};
                if (peek().kind == Tok::Comma) {
                    ++i;
                    continue;
                }
                break;
            }
            if (auto e = expect(Tok::RBrace, "'}'"))
                return *e;
            return select ? m_select(std::move(bs), ann) : m_branch(std::move(bs), ann);
        }
        default:
            return parse_msg_atom();
        }
    }

    std::variant<std::optional<std::uint64_t>, ParseError> parse_ann(const SourceSpan& sp) {
        if (peek().kind == Tok::At) {
            ++i;
            if (peek().kind != Tok::Nat)
                return ParseError{peek().span, "expected natural number after '@'"};
            const std::string& digits = peek().text;
            if (digits.size() > 18)
                return ParseError{peek().span, "priority annotation too large"};
            ++i;
            return std::optional<std::uint64_t>{std::stoull(digits)};
        }
        warnings.push_back(sp.str() +
                           ": connective without '@' priority; extraction defaults it to 0");
        return std::optional<std::uint64_t>{};
    }

    std::variant<MsgRef, ParseError> parse_msg_atom() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            ++i;
            auto m = parse_msg();
            if (auto* e = std::get_if<ParseError>(&m))
                return *e;
            if (auto e = expect(Tok::RParen, "')'"))
                return *e;
            return m;
        }
        if (t.kind == Tok::Ident && t.text == "end") {
            ++i;
            return m_end();
        }
        if (t.kind == Tok::Ident && is_basic(t.text)) {
            std::string surface = get().text;
            while (peek().kind == Tok::Star) {
                ++i;
                if (peek().kind != Tok::Ident || !is_basic(peek().text))
                    return ParseError{peek().span, "expected basic type after '*'"};
                surface += " * " + get().text;
            }
            return m_end(surface);
        }
        return ParseError{t.span, "expected payload type"};
    }

    std::variant<Label, ParseError> parse_label() {
        const Token& t = peek();
        if (t.kind == Tok::Ident || t.kind == Tok::Nat)
            return get().text;
        return ParseError{t.span, "expected label"};
    }

    // ----- global types -----

    std::variant<GlobalRef, ParseError> parse_global_type() {
        const Token& t = peek();
        if (t.kind == Tok::Ident) {
            if (t.text == "end") {
                ++i;
                return g_end();
            }
            if (t.text == "skip") {
                ++i;
                if (auto e = expect(Tok::Dot, "'.' after skip"))
                    return *e;
                auto g = parse_global_type();
                if (auto* e = std::get_if<ParseError>(&g))
                    return *e;
                return g_skip(std::get<GlobalRef>(g));
            }
            if (t.text == "mu") {
                ++i;
                if (peek().kind != Tok::Ident)
                    return ParseError{peek().span, "expected recursion variable after 'mu'"};
                RecVar x = get().text;
                if (auto e = expect(Tok::Dot, "'.' after recursion variable"))
                    return *e;
                bound.push_back(x);
                auto g = parse_global_type();
                bound.pop_back();
                if (auto* e = std::get_if<ParseError>(&g))
                    return *e;
                auto body = std::get<GlobalRef>(g);
                // reject mu X1 . mu X2 ... . Xk where Xk is one of the binders
                std::vector<RecVar> chain{x};
                GlobalRef h = body;
                while (h->kind == GlobalKind::Rec) {
                    chain.push_back(h->var);
                    h = h->body;
                }
                if (h->kind == GlobalKind::Var) {
                    for (auto& v : chain)
                        if (v == h->var)
                            return ParseError{t.span, "non-contractive recursion on '" + v + "'"};
                }
                return g_rec(x, body);
            }
            // participant or recursion variable
            if (peek(1).kind == Tok::Arrow) {
                Participant s = get().text;
                ++i; // arrow
                if (peek().kind != Tok::Ident)
                    return ParseError{peek().span, "expected receiver participant"};
                SourceSpan sp = peek().span;
                Participant r = get().text;
                if (s == r)
                    return ParseError{sp, "sender and receiver must differ"};
                std::map<Label, GlobalBranch> bs;
                if (peek().kind == Tok::Colon) {
                    ++i;
                    auto b = parse_branch();
                    if (auto* e = std::get_if<ParseError>(&b))
                        return *e;
                    auto [lbl, br] = std::get<std::pair<Label, GlobalBranch>>(b);
                    bs.emplace(lbl, br);
                } else if (peek().kind == Tok::LBrace) {
                    ++i;
                    while (true) {
                        auto b = parse_branch();
                        if (auto* e = std::get_if<ParseError>(&b))
                            return *e;
                        auto [lbl, br] = std::get<std::pair<Label, GlobalBranch>>(b);
                        if (!bs.emplace(lbl, br).second)
                            return ParseError{sp, "duplicate label '" + lbl + "'"};
                        if (peek().kind == Tok::Comma) {
                            ++i;
                            continue;
                        }
                        break;
                    }
                    if (auto e = expect(Tok::RBrace, "'}'"))
                        return *e;
                } else {
                    return ParseError{peek().span, "expected ':' or '{' after exchange header"};
                }
                return g_exchange(s, r, std::move(bs), t.span);
            }
            // recursion variable
            for (auto it = bound.rbegin(); it != bound.rend(); ++it)
                if (*it == t.text) {
                    ++i;
                    return g_var(t.text);
                }
            return ParseError{t.span, "unbound recursion variable '" + t.text + "'"};
        }
        return ParseError{t.span, "expected global type"};
    }

    std::variant<std::pair<Label, GlobalBranch>, ParseError> parse_branch() {
        auto lbl = parse_label();
        if (auto* e = std::get_if<ParseError>(&lbl))
            return *e;
        MsgRef payload = m_end();
        if (peek().kind == Tok::Lt) {
            ++i;
            auto m = parse_msg();
            if (auto* e = std::get_if<ParseError>(&m))
                return *e;
            payload = std::get<MsgRef>(m);
            if (auto e = expect(Tok::Gt, "'>' after payload type"))
                return *e;
        }
        if (auto e = expect(Tok::Dot, "'.' after branch label"))
            return *e;
        auto g = parse_global_type();
        if (auto* e = std::get_if<ParseError>(&g))
            return *e;
        return std::make_pair(std::get<Label>(lbl),
                              GlobalBranch{payload, std::get<GlobalRef>(g)});
    }
};

std::variant<std::vector<Token>, ParseError> tokenize(const std::string& text,
                                                      const std::string& file) {
    Lexer lx(text, file);
    std::vector<Token> out;
    while (true) {
        auto t = lx.next();
        if (auto* e = std::get_if<ParseError>(&t))
            return *e;
        out.push_back(std::get<Token>(t));
        if (out.back().kind == Tok::End)
            return out;
    }
}

} // namespace

std::variant<ProtocolFile, ParseError> parse_protocol_file(const std::string& text,
                                                           const std::string& filename) {
    auto toks = tokenize(text, filename);
    if (auto* e = std::get_if<ParseError>(&toks))
        return *e;
    Parser ps;
    ps.toks = std::move(std::get<std::vector<Token>>(toks));
    ProtocolFile out;
    std::set<std::string> seen;
    if (ps.peek().kind == Tok::Ident && ps.peek(1).kind == Tok::Equals) {
        while (ps.peek().kind != Tok::End) {
            if (ps.peek().kind != Tok::Ident || ps.peek(1).kind != Tok::Equals)
                return ParseError{ps.peek().span, "expected declaration 'name = G'"};
            std::string name = ps.get().text;
            ps.get(); // '='
            if (!seen.insert(name).second)
                return ParseError{ps.peek().span, "duplicate declaration '" + name + "'"};
            auto g = ps.parse_global_type();
            if (auto* e = std::get_if<ParseError>(&g))
                return *e;
            out.declarations.emplace_back(name, std::get<GlobalRef>(g));
        }
    } else {
        auto g = ps.parse_global_type();
        if (auto* e = std::get_if<ParseError>(&g))
            return *e;
        if (ps.peek().kind != Tok::End)
            return ParseError{ps.peek().span, "trailing input after global type"};
        out.declarations.emplace_back("", std::get<GlobalRef>(g));
    }
    out.warnings = std::move(ps.warnings);
    return out;
}

std::variant<GlobalRef, ParseError> parse_global(const std::string& text,
                                                 const std::string& filename) {
    auto f = parse_protocol_file(text, filename);
    if (auto* e = std::get_if<ParseError>(&f))
        return *e;
    auto& pf = std::get<ProtocolFile>(f);
    if (pf.declarations.size() != 1)
        return ParseError{SourceSpan{filename, 1, 1, 0},
                          "expected exactly one global type in input"};
    return pf.declarations[0].second;
}

} // namespace rtc
