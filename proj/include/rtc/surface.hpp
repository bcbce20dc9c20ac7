#pragma once

#include "rtc/global.hpp"
#include "rtc/process.hpp"
#include "rtc/types.hpp"

#include <json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace rtc {

struct ParseError {
    SourceSpan span;
    std::string message;

    std::string str() const { return span.str() + ": " + message; }
};

struct ProtocolFile {
    // Declarations in file order: `name = G`, or a single unnamed global.
    std::vector<std::pair<std::string, GlobalRef>> declarations;
    std::vector<std::string> warnings; // e.g. defaulted payload priorities
};

// Concrete syntax (UTF-8, '#' line comments, extension .gt):
//   file    := decl+ | G
//   decl    := name '=' G
//   G       := 'end' | 'skip' '.' G | 'mu' X '.' G | X
//            | p '->' q ':' branch | p '->' q '{' branch (',' branch)* '}'
//   branch  := label ('<' S '>')? '.' G
//   S       := '!' ('@' n)? atom '.' S | '?' ('@' n)? atom '.' S
//            | '+' ('@' n)? '{' label ':' S (',' ...)* '}'
//            | '&' ('@' n)? '{' ... '}' | atom
//   atom    := 'end' | basic ('*' basic)* | '(' S ')'
//   basic   := 'unit' | 'bool' | 'int' | 'str'
std::variant<ProtocolFile, ParseError> parse_protocol_file(const std::string& text,
                                                           const std::string& filename = "");

// Single global type (bare `G`, or the sole declaration of the file).
std::variant<GlobalRef, ParseError> parse_global(const std::string& text,
                                                 const std::string& filename = "");

// Renderers. render_global emits the grammar above and round-trips through
// parse_global up to alpha-equivalence; the others are display forms.
std::string render_global(const GlobalRef& g);
std::string render_msg(const MsgRef& m);
std::string render_relative(const RelRef& r);
std::string render_session(const TypeRef& a);
std::string render_local(const LocalRef& l);
std::string render_process(const ProcRef& p);

std::string render_endpoint(const Endpoint& e);

// JSON export. Every top-level document carries {"schema": 1, "kind": ...,
// "data": ...}; field order is fixed by construction order below, so equal
// inputs produce byte-identical output.
nlohmann::ordered_json json_of_global(const GlobalRef& g);
nlohmann::ordered_json json_of_msg(const MsgRef& m);
nlohmann::ordered_json json_of_relative(const RelRef& r);
nlohmann::ordered_json json_of_session(const TypeRef& a);
nlohmann::ordered_json json_of_local(const LocalRef& l);
nlohmann::ordered_json json_of_process(const ProcRef& p);
nlohmann::ordered_json json_of_endpoint(const Endpoint& e);

std::string export_json(const std::string& kind, nlohmann::ordered_json data);

} // namespace rtc
