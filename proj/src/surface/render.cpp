#include "rtc/surface.hpp"

#include <map>
#include <set>
#include <sstream>

namespace rtc {

namespace {

// ----- message types (ASCII, parseable) -----

std::string ann_str(const std::optional<std::uint64_t>& a) {
    return a ? "@" + std::to_string(*a) : std::string{};
}

std::string msg_str(const MsgRef& m);

std::string msg_atom_str(const MsgRef& m) {
    if (m->kind == MsgKind::End)
        return m->surface.empty() ? "end" : m->surface;
    return "(" + msg_str(m) + ")";
}

std::string msg_str(const MsgRef& m) {
    switch (m->kind) {
    case MsgKind::End:
        return msg_atom_str(m);
    case MsgKind::Send:
        return "!" + ann_str(m->prio_ann) + " " + msg_atom_str(m->payload) + " . " +
               msg_str(m->cont);
    case MsgKind::Recv:
        return "?" + ann_str(m->prio_ann) + " " + msg_atom_str(m->payload) + " . " +
               msg_str(m->cont);
    case MsgKind::Select:
    case MsgKind::Branch: {
        std::string s = (m->kind == MsgKind::Select ? "+" : "&") + ann_str(m->prio_ann) + "{ ";
        bool first = true;
        for (auto& [l, b] : m->branches) {
            if (!first)
                s += ", ";
            first = false;
            s += l + ": " + msg_str(b);
        }
        return s + " }";
    }
    }
    return "?";
}

// A payload slot renders as "<S>" unless it is a bare `end` with no surface
// spelling, in which case it is omitted entirely.
std::string payload_str(const MsgRef& m) {
    if (m->kind == MsgKind::End && m->surface.empty())
        return "";
    return "<" + msg_str(m) + ">";
}

// ----- global types -----

std::string global_str(const GlobalRef& g) {
    switch (g->kind) {
    case GlobalKind::End:
        return "end";
    case GlobalKind::Skip:
        return "skip . " + global_str(g->cont);
    case GlobalKind::Var:
        return g->var;
    case GlobalKind::Rec:
        return "mu " + g->var + " . " + global_str(g->body);
    case GlobalKind::Exchange: {
        std::string head = g->sender + " -> " + g->receiver;
        auto branch = [](const Label& l, const GlobalBranch& b) {
            return l + payload_str(b.payload) + " . " + global_str(b.cont);
        };
        if (g->branches.size() == 1) {
            auto& [l, b] = *g->branches.begin();
            return head + " : " + branch(l, b);
        }
        std::string s = head + " { ";
        bool first = true;
        for (auto& [l, b] : g->branches) {
            if (!first)
                s += ", ";
            first = false;
            s += branch(l, b);
        }
        return s + " }";
    }
    }
    return "?";
}

// ----- relative types -----

std::string rel_str(const RelRef& r) {
    switch (r->kind) {
    case RelKind::End:
        return "end";
    case RelKind::Skip:
        return "skip . " + rel_str(r->cont);
    case RelKind::Var:
        return r->var;
    case RelKind::Rec:
        return "mu " + r->var + " . " + rel_str(r->body);
    case RelKind::Msg: {
        auto branch = [](const Label& l, const RelBranch& b) {
            return l + payload_str(b.payload) + " . " + rel_str(b.cont);
        };
        if (r->branches.size() == 1) {
            auto& [l, b] = *r->branches.begin();
            return r->who + " : " + branch(l, b);
        }
        std::string s = r->who + " { ";
        bool first = true;
        for (auto& [l, b] : r->branches) {
            if (!first)
                s += ", ";
            first = false;
            s += branch(l, b);
        }
        return s + " }";
    }
    case RelKind::DepIn:
    case RelKind::DepOut: {
        std::string s = r->who + (r->kind == RelKind::DepIn ? "?" : "!") + r->other + " { ";
        bool first = true;
        for (auto& [l, b] : r->dep_branches) {
            if (!first)
                s += ", ";
            first = false;
            s += l + " . " + rel_str(b);
        }
        return s + " }";
    }
    }
    return "?";
}

// ----- session types (display form with superscript priorities) -----

std::string sup_str(const Priority& p) {
    if (p.is_omega())
        return "^w";
    static const char* dig[10] = {"⁰", "¹", "²", "³", "⁴",
                                  "⁵", "⁶", "⁷", "⁸", "⁹"};
    std::string s = std::to_string(p.value()), out;
    for (char c : s)
        out += dig[c - '0'];
    return out;
}

std::string session_str(const TypeRef& a);

std::string session_opnd(const TypeRef& a, bool left) {
    bool parens = a->kind == TypeKind::Tensor || a->kind == TypeKind::Parr ||
                  (left && a->kind == TypeKind::Rec);
    return parens ? "(" + session_str(a) + ")" : session_str(a);
}

std::string session_str(const TypeRef& a) {
    switch (a->kind) {
    case TypeKind::Bullet:
        return "•";
    case TypeKind::Var:
        return a->var;
    case TypeKind::Rec:
        return "μ" + a->var + "." + session_str(a->body);
    case TypeKind::Tensor:
        return session_opnd(a->left, true) + "⊗" + sup_str(a->prio) +
               session_opnd(a->right, false);
    case TypeKind::Parr:
        return session_opnd(a->left, true) + "⅋" + sup_str(a->prio) +
               session_opnd(a->right, false);
    case TypeKind::Plus:
    case TypeKind::With: {
        std::string s = (a->kind == TypeKind::Plus ? "⊕" : "&") + sup_str(a->prio) + "{";
        bool first = true;
        for (auto& [l, b] : a->branches) {
            if (!first)
                s += ", ";
            first = false;
            s += l + ": " + session_str(b);
        }
        return s + "}";
    }
    }
    return "?";
}

// ----- local types -----

std::string local_str(const LocalRef& l) {
    switch (l->kind) {
    case LocalKind::End:
        return "end";
    case LocalKind::Skip:
        return "skip . " + local_str(l->cont);
    case LocalKind::Var:
        return l->var;
    case LocalKind::Rec:
        return "mu " + l->var + " . " + local_str(l->body);
    case LocalKind::Send:
    case LocalKind::Recv: {
        std::string s = (l->kind == LocalKind::Send ? "!" : "?") + l->peer + " { ";
        bool first = true;
        for (auto& [lb, b] : l->branches) {
            if (!first)
                s += ", ";
            first = false;
            s += lb + payload_str(b.payload) + " . " + local_str(b.cont);
        }
        return s + " }";
    }
    }
    return "?";
}

// ----- processes -----

struct ProcPrinter {
    // Sugared outputs and selections rename the subject's continuation
    // endpoint; `merge` folds those renamings so both display as one name.
    std::map<std::uint64_t, std::uint64_t> merge;
    // hint -> distinct representative ids using it; a hint shared by several
    // representatives is shown with an id suffix so output stays unambiguous.
    std::map<std::string, std::set<std::uint64_t>> hints;
    std::map<const Process*, ProcRef> sugar_atom; // Res node -> its Out/Sel atom

    std::uint64_t rep(std::uint64_t id) const {
        auto it = merge.find(id);
        while (it != merge.end()) {
            id = it->second;
            it = merge.find(id);
        }
        return id;
    }

    // The expansion of the sugared output x!(y). P is
    //   nu(y a) nu(z b) (x[a,b] || P{z/x}).
    static ProcRef match_out(const Process& p) {
        if (p.body->kind != ProcKind::Res)
            return nullptr;
        const auto& inner = *p.body;
        auto ok = [&](const ProcRef& q) {
            return q->kind == ProcKind::Out && q->y.id == p.y.id && q->z.id == inner.y.id;
        };
        if (inner.body->kind == ProcKind::Out && ok(inner.body))
            return inner.body;
        if (inner.body->kind == ProcKind::Par)
            for (auto& q : inner.body->parts)
                if (ok(q))
                    return q;
        return nullptr;
    }

    // The expansion of the sugared selection x! <| l. P is
    //   nu(z b) (x[b] <| l || P{z/x}).
    static ProcRef match_sel(const Process& p) {
        auto ok = [&](const ProcRef& q) {
            return q->kind == ProcKind::Sel && q->z.id == p.y.id;
        };
        if (p.body->kind == ProcKind::Sel && ok(p.body))
            return p.body;
        if (p.body->kind == ProcKind::Par)
            for (auto& q : p.body->parts)
                if (ok(q))
                    return q;
        return nullptr;
    }

    void find_sugar(const ProcRef& p) {
        if (p->kind == ProcKind::Res) {
            if (auto o = match_out(*p)) {
                sugar_atom[p.get()] = o;
                merge[p->body->x.id] = o->x.id; // z displays as x
            } else if (auto s = match_sel(*p)) {
                sugar_atom[p.get()] = s;
                merge[p->x.id] = s->x.id; // z displays as x
            }
        }
        if (p->body)
            find_sugar(p->body);
        for (auto& q : p->parts)
            find_sugar(q);
        for (auto& [l, b] : p->branches)
            find_sugar(b);
    }

    void collect_ep(const Endpoint& e) { hints[e.hint].insert(rep(e.id)); }

    void collect(const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Par:
            for (auto& q : p->parts)
                collect(q);
            return;
        case ProcKind::Res:
            collect_ep(p->x);
            collect_ep(p->y);
            collect(p->body);
            return;
        case ProcKind::Out:
            collect_ep(p->x);
            collect_ep(p->y);
            collect_ep(p->z);
            return;
        case ProcKind::In:
            collect_ep(p->x);
            collect_ep(p->y);
            collect_ep(p->z);
            collect(p->body);
            return;
        case ProcKind::Sel:
            collect_ep(p->x);
            collect_ep(p->z);
            return;
        case ProcKind::Bra:
            collect_ep(p->x);
            collect_ep(p->z);
            for (auto& [l, b] : p->branches)
                collect(b);
            return;
        case ProcKind::Fwd:
            collect_ep(p->x);
            collect_ep(p->y);
            return;
        case ProcKind::RecDef:
            for (auto& e : p->args)
                collect_ep(e);
            collect(p->body);
            return;
        case ProcKind::RecCall:
        case ProcKind::Alarm:
            for (auto& e : p->args)
                collect_ep(e);
            return;
        case ProcKind::ConstP:
            collect_ep(p->x);
            return;
        case ProcKind::Nil:
            return;
        }
    }

    std::string name(const Endpoint& e) const {
        std::string h = e.hint.empty() ? "e" : e.hint;
        auto it = hints.find(e.hint);
        if (it != hints.end() && it->second.size() == 1)
            return h;
        return h + "#" + std::to_string(rep(e.id));
    }

    std::string cont_without(const ProcRef& body, const ProcRef& atom) {
        if (body.get() == atom.get())
            return "0";
        std::vector<ProcRef> rest;
        for (auto& q : body->parts)
            if (q.get() != atom.get())
                rest.push_back(q);
        if (rest.empty())
            return "0";
        if (rest.size() == 1)
            return str(rest[0]);
        return str(par(std::move(rest)));
    }

    std::string str(const ProcRef& p) {
        switch (p->kind) {
        case ProcKind::Nil:
            return "0";
        case ProcKind::Par: {
            std::string s = "(";
            bool first = true;
            for (auto& q : p->parts) {
                if (!first)
                    s += " || ";
                first = false;
                s += str(q);
            }
            return s + ")";
        }
        case ProcKind::Res: {
            if (auto it = sugar_atom.find(p.get()); it != sugar_atom.end()) {
                const ProcRef& atom = it->second;
                if (atom->kind == ProcKind::Out)
                    return name(atom->x) + "!(" + name(p->x) + "). " +
                           cont_without(p->body->body, atom);
                return name(atom->x) + "! <| " + atom->label + ". " +
                       cont_without(p->body, atom);
            }
            std::string a = p->ann ? ": " + render_session(*p->ann) : std::string{};
            return "nu(" + name(p->x) + " " + name(p->y) + a + ") " + str(p->body);
        }
        case ProcKind::Out:
            return name(p->x) + "[" + name(p->y) + "," + name(p->z) + "]";
        case ProcKind::In:
            return name(p->x) + "(" + name(p->y) + "," + name(p->z) + "). " + str(p->body);
        case ProcKind::Sel:
            return name(p->x) + "[" + name(p->z) + "] <| " + p->label;
        case ProcKind::Bra: {
            std::string s = name(p->x) + "(" + name(p->z) + ") |> { ";
            bool first = true;
            for (auto& [l, b] : p->branches) {
                if (!first)
                    s += ", ";
                first = false;
                s += l + ": " + str(b);
            }
            return s + " }";
        }
        case ProcKind::Fwd:
            return name(p->x) + " <-> " + name(p->y);
        case ProcKind::RecDef: {
            std::string s = "mu " + p->var + "(";
            bool first = true;
            for (auto& e : p->args) {
                if (!first)
                    s += ",";
                first = false;
                s += name(e);
            }
            return s + "). " + str(p->body);
        }
        case ProcKind::RecCall: {
            std::string s = p->var + "<";
            bool first = true;
            for (auto& e : p->args) {
                if (!first)
                    s += ",";
                first = false;
                s += name(e);
            }
            return s + ">";
        }
        case ProcKind::Alarm: {
            std::string s = "error<";
            bool first = true;
            for (auto& e : p->args) {
                if (!first)
                    s += ",";
                first = false;
                s += name(e);
            }
            return s + ">";
        }
        case ProcKind::ConstP:
            return "const " + name(p->x) + " := " + p->literal;
        }
        return "?";
    }
};

} // namespace

std::string render_global(const GlobalRef& g) { return global_str(g); }
std::string render_msg(const MsgRef& m) { return msg_str(m); }
std::string render_relative(const RelRef& r) { return rel_str(r); }
std::string render_session(const TypeRef& a) { return session_str(a); }
std::string render_local(const LocalRef& l) { return local_str(l); }

std::string render_process(const ProcRef& p) {
    ProcPrinter pp;
    pp.find_sugar(p);
    pp.collect(p);
    return pp.str(p);
}

std::string render_endpoint(const Endpoint& e) {
    return (e.hint.empty() ? "e" : e.hint) + "#" + std::to_string(e.id);
}

} // namespace rtc
