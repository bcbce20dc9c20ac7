#include "rtc/surface.hpp"

namespace rtc {

using nlohmann::ordered_json;

namespace {

ordered_json prio_json(const Priority& p) {
    if (p.is_omega())
        return "w";
    return p.value();
}

ordered_json ann_json(const std::optional<std::uint64_t>& a) {
    if (a)
        return *a;
    return nullptr;
}

} // namespace

ordered_json json_of_msg(const MsgRef& m) {
    ordered_json j;
    switch (m->kind) {
    case MsgKind::End:
        j["kind"] = "end";
        if (!m->surface.empty())
            j["surface"] = m->surface;
        return j;
    case MsgKind::Send:
    case MsgKind::Recv:
        j["kind"] = m->kind == MsgKind::Send ? "send" : "recv";
        j["prio"] = ann_json(m->prio_ann);
        j["payload"] = json_of_msg(m->payload);
        j["cont"] = json_of_msg(m->cont);
        return j;
    case MsgKind::Select:
    case MsgKind::Branch: {
        j["kind"] = m->kind == MsgKind::Select ? "select" : "branch";
        j["prio"] = ann_json(m->prio_ann);
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : m->branches)
            bs[l] = json_of_msg(b);
        j["branches"] = bs;
        return j;
    }
    }
    return j;
}

ordered_json json_of_global(const GlobalRef& g) {
    ordered_json j;
    switch (g->kind) {
    case GlobalKind::End:
        j["kind"] = "end";
        return j;
    case GlobalKind::Skip:
        j["kind"] = "skip";
        j["cont"] = json_of_global(g->cont);
        return j;
    case GlobalKind::Var:
        j["kind"] = "var";
        j["name"] = g->var;
        return j;
    case GlobalKind::Rec:
        j["kind"] = "rec";
        j["var"] = g->var;
        j["body"] = json_of_global(g->body);
        return j;
    case GlobalKind::Exchange: {
        j["kind"] = "exchange";
        j["from"] = g->sender;
        j["to"] = g->receiver;
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : g->branches) {
            ordered_json e;
            e["payload"] = json_of_msg(b.payload);
            e["cont"] = json_of_global(b.cont);
            bs[l] = e;
        }
        j["branches"] = bs;
        return j;
    }
    }
    return j;
}

ordered_json json_of_relative(const RelRef& r) {
    ordered_json j;
    switch (r->kind) {
    case RelKind::End:
        j["kind"] = "end";
        return j;
    case RelKind::Skip:
        j["kind"] = "skip";
        j["cont"] = json_of_relative(r->cont);
        return j;
    case RelKind::Var:
        j["kind"] = "var";
        j["name"] = r->var;
        return j;
    case RelKind::Rec:
        j["kind"] = "rec";
        j["var"] = r->var;
        j["body"] = json_of_relative(r->body);
        return j;
    case RelKind::Msg: {
        j["kind"] = "msg";
        j["from"] = r->who;
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : r->branches) {
            ordered_json e;
            e["payload"] = json_of_msg(b.payload);
            e["cont"] = json_of_relative(b.cont);
            bs[l] = e;
        }
        j["branches"] = bs;
        return j;
    }
    case RelKind::DepIn:
    case RelKind::DepOut: {
        j["kind"] = r->kind == RelKind::DepIn ? "dep_in" : "dep_out";
        j["who"] = r->who;
        j["other"] = r->other;
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : r->dep_branches)
            bs[l] = json_of_relative(b);
        j["branches"] = bs;
        return j;
    }
    }
    return j;
}

ordered_json json_of_session(const TypeRef& a) {
    ordered_json j;
    switch (a->kind) {
    case TypeKind::Bullet:
        j["kind"] = "bullet";
        return j;
    case TypeKind::Var:
        j["kind"] = "var";
        j["name"] = a->var;
        return j;
    case TypeKind::Rec:
        j["kind"] = "rec";
        j["var"] = a->var;
        j["body"] = json_of_session(a->body);
        return j;
    case TypeKind::Tensor:
    case TypeKind::Parr:
        j["kind"] = a->kind == TypeKind::Tensor ? "tensor" : "parr";
        j["prio"] = prio_json(a->prio);
        j["left"] = json_of_session(a->left);
        j["right"] = json_of_session(a->right);
        return j;
    case TypeKind::Plus:
    case TypeKind::With: {
        j["kind"] = a->kind == TypeKind::Plus ? "plus" : "with";
        j["prio"] = prio_json(a->prio);
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : a->branches)
            bs[l] = json_of_session(b);
        j["branches"] = bs;
        return j;
    }
    }
    return j;
}

ordered_json json_of_local(const LocalRef& l) {
    ordered_json j;
    switch (l->kind) {
    case LocalKind::End:
        j["kind"] = "end";
        return j;
    case LocalKind::Skip:
        j["kind"] = "skip";
        j["cont"] = json_of_local(l->cont);
        return j;
    case LocalKind::Var:
        j["kind"] = "var";
        j["name"] = l->var;
        return j;
    case LocalKind::Rec:
        j["kind"] = "rec";
        j["var"] = l->var;
        j["body"] = json_of_local(l->body);
        return j;
    case LocalKind::Send:
    case LocalKind::Recv: {
        j["kind"] = l->kind == LocalKind::Send ? "send" : "recv";
        j["peer"] = l->peer;
        ordered_json bs = ordered_json::object();
        for (auto& [lb, b] : l->branches) {
            ordered_json e;
            e["payload"] = json_of_msg(b.payload);
            e["cont"] = json_of_local(b.cont);
            bs[lb] = e;
        }
        j["branches"] = bs;
        return j;
    }
    }
    return j;
}

ordered_json json_of_endpoint(const Endpoint& e) {
    ordered_json j;
    j["id"] = e.id;
    j["hint"] = e.hint;
    return j;
}

ordered_json json_of_process(const ProcRef& p) {
    ordered_json j;
    auto eps = [](const std::vector<Endpoint>& v) {
        ordered_json a = ordered_json::array();
        for (auto& e : v)
            a.push_back(json_of_endpoint(e));
        return a;
    };
    switch (p->kind) {
    case ProcKind::Nil:
        j["kind"] = "nil";
        return j;
    case ProcKind::Par: {
        j["kind"] = "par";
        ordered_json a = ordered_json::array();
        for (auto& q : p->parts)
            a.push_back(json_of_process(q));
        j["parts"] = a;
        return j;
    }
    case ProcKind::Res:
        j["kind"] = "res";
        j["a"] = json_of_endpoint(p->x);
        j["b"] = json_of_endpoint(p->y);
        if (p->ann)
            j["type"] = json_of_session(*p->ann);
        j["body"] = json_of_process(p->body);
        return j;
    case ProcKind::Out:
        j["kind"] = "out";
        j["on"] = json_of_endpoint(p->x);
        j["payload"] = json_of_endpoint(p->y);
        j["cont"] = json_of_endpoint(p->z);
        return j;
    case ProcKind::In:
        j["kind"] = "in";
        j["on"] = json_of_endpoint(p->x);
        j["payload"] = json_of_endpoint(p->y);
        j["cont"] = json_of_endpoint(p->z);
        j["body"] = json_of_process(p->body);
        return j;
    case ProcKind::Sel:
        j["kind"] = "sel";
        j["on"] = json_of_endpoint(p->x);
        j["cont"] = json_of_endpoint(p->z);
        j["label"] = p->label;
        return j;
    case ProcKind::Bra: {
        j["kind"] = "bra";
        j["on"] = json_of_endpoint(p->x);
        j["cont"] = json_of_endpoint(p->z);
        ordered_json bs = ordered_json::object();
        for (auto& [l, b] : p->branches)
            bs[l] = json_of_process(b);
        j["branches"] = bs;
        return j;
    }
    case ProcKind::Fwd:
        j["kind"] = "fwd";
        j["a"] = json_of_endpoint(p->x);
        j["b"] = json_of_endpoint(p->y);
        return j;
    case ProcKind::RecDef:
        j["kind"] = "rec";
        j["var"] = p->var;
        j["params"] = eps(p->args);
        j["body"] = json_of_process(p->body);
        return j;
    case ProcKind::RecCall:
        j["kind"] = "call";
        j["var"] = p->var;
        j["args"] = eps(p->args);
        return j;
    case ProcKind::Alarm:
        j["kind"] = "alarm";
        j["args"] = eps(p->args);
        return j;
    case ProcKind::ConstP:
        j["kind"] = "const";
        j["on"] = json_of_endpoint(p->x);
        j["value"] = p->literal;
        return j;
    }
    return j;
}

std::string export_json(const std::string& kind, ordered_json data) {
    ordered_json j;
    j["schema"] = 1;
    j["kind"] = kind;
    j["data"] = std::move(data);
    return j.dump(2);
}

} // namespace rtc
