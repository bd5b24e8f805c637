#include "msgsynth/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace msgsynth {

namespace {

std::string format_diagnostics(const std::string& source, const std::vector<Diagnostic>& diagnostics)
{
    std::string out;
    for (const Diagnostic& d : diagnostics) {
        if (!out.empty()) {
            out += '\n';
        }
        out += source + ":" + std::to_string(d.where.line) + ":" + std::to_string(d.where.column) + ": " +
               d.message;
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::string source, std::vector<Diagnostic> diagnostics)
    : Error(format_diagnostics(source, diagnostics)), source_(std::move(source)), diagnostics_(std::move(diagnostics))
{
}

const Bmsc& Specification::chart(std::string_view name) const
{
    for (const auto& [n, b] : charts) {
        if (n == name) {
            return b;
        }
    }
    throw Error("unknown bMSC " + std::string(name));
}

namespace {

enum class TokenKind { identifier, symbol, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    SourceLocation where;
};

// Thrown on the first syntax error; semantic errors are collected instead.
struct SyntaxError {
    Diagnostic diagnostic;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> tokens()
    {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.where = {line_, column_};
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            const char c = text_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = TokenKind::identifier;
                while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                               text_[pos_] == '_' || text_[pos_] == '\'')) {
                    t.text += advance();
                }
            } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                t.kind = TokenKind::symbol;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view("{};:!?").find(c) != std::string_view::npos) {
                t.kind = TokenKind::symbol;
                t.text = std::string(1, advance());
            } else {
                throw SyntaxError{{t.where, std::string("unexpected character '") + c + "'"}};
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance()
    {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space()
    {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#' || (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

struct MsgDecl {
    Message message;
    SourceLocation where;
};

struct OrderDecl {
    std::string process;
    std::vector<std::pair<EventKind, std::string>> events;
    SourceLocation where;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, bool check_invariants)
        : tokens_(std::move(tokens)), check_invariants_(check_invariants)
    {
    }

    Specification parse()
    {
        while (peek_is("bmsc")) {
            parse_bmsc();
        }
        if (!peek_is("graph")) {
            fail("expected 'bmsc' or 'graph'");
        }
        parse_graph();
        if (peek().kind != TokenKind::end) {
            fail("unexpected text after the graph");
        }
        return std::move(spec_);
    }

    std::vector<Diagnostic> errors;

private:
    const Token& peek() const { return tokens_[pos_]; }
    bool peek_is(std::string_view text) const { return peek().kind != TokenKind::end && peek().text == text; }

    [[noreturn]] void fail(const std::string& message) const
    {
        const Token& t = peek();
        throw SyntaxError{{t.where, message + (t.kind == TokenKind::end ? " at end of input" : ", found '" + t.text + "'")}};
    }

    const Token& expect(std::string_view text)
    {
        if (!peek_is(text)) {
            fail("expected '" + std::string(text) + "'");
        }
        return tokens_[pos_++];
    }

    const Token& identifier(std::string_view what)
    {
        if (peek().kind != TokenKind::identifier) {
            fail("expected " + std::string(what));
        }
        return tokens_[pos_++];
    }

    void error(SourceLocation where, std::string message) { errors.push_back({where, std::move(message)}); }

    void parse_bmsc()
    {
        const SourceLocation where = expect("bmsc").where;
        const Token& name = identifier("bMSC name");
        expect("{");
        expect("processes");
        std::vector<ProcessId> processes;
        std::set<std::string> declared;
        do {
            const Token& p = identifier("process name");
            if (!declared.insert(p.text).second) {
                error(p.where, "duplicate process " + p.text);
            }
            processes.emplace_back(p.text);
        } while (peek().kind == TokenKind::identifier);
        expect(";");

        std::vector<MsgDecl> messages;
        std::map<std::string, std::size_t> message_index;
        while (peek_is("msg")) {
            const SourceLocation at = expect("msg").where;
            const Token& id = identifier("message id");
            expect(":");
            const Token& from = identifier("sender");
            expect("->");
            const Token& to = identifier("receiver");
            expect("label");
            const Token& label = identifier("message label");
            expect(";");
            if (!message_index.emplace(id.text, messages.size()).second) {
                error(id.where, "duplicate message " + id.text);
                continue;
            }
            for (const Token* p : {&from, &to}) {
                if (!declared.contains(p->text)) {
                    error(at, "message " + id.text + " uses undeclared process " + p->text);
                }
            }
            if (from.text == to.text) {
                error(at, "message " + id.text + " is sent by " + from.text + " to itself");
            }
            messages.push_back({{id.text, ProcessId(from.text), ProcessId(to.text), MessageLabel(label.text), 0}, at});
        }

        std::vector<OrderDecl> orders;
        while (peek_is("order")) {
            OrderDecl o;
            o.where = expect("order").where;
            o.process = identifier("process name").text;
            expect(":");
            do {
                EventKind kind = EventKind::send;
                if (peek_is("!")) {
                    expect("!");
                } else if (peek_is("?")) {
                    expect("?");
                    kind = EventKind::receive;
                } else {
                    fail("expected '!' or '?'");
                }
                o.events.emplace_back(kind, identifier("message id").text);
            } while (peek_is("!") || peek_is("?"));
            expect(";");
            orders.push_back(std::move(o));
        }
        expect("}");

        std::vector<Message> plain;
        for (const MsgDecl& m : messages) {
            plain.push_back(m.message);
        }
        Bmsc b = make_bmsc(processes, plain);
        std::set<std::string> ordered;
        for (const OrderDecl& o : orders) {
            if (!declared.contains(o.process)) {
                error(o.where, "order for undeclared process " + o.process);
                continue;
            }
            if (!ordered.insert(o.process).second) {
                error(o.where, "duplicate order for process " + o.process);
                continue;
            }
            std::vector<EventId> events;
            std::set<EventId> seen;
            for (const auto& [kind, id] : o.events) {
                auto it = message_index.find(id);
                if (it == message_index.end()) {
                    error(o.where, "order of " + o.process + " names unknown message " + id);
                    continue;
                }
                const Message& m = messages[it->second].message;
                const ProcessId& owner = kind == EventKind::send ? m.sender : m.receiver;
                if (owner.str() != o.process) {
                    error(o.where, std::string(kind == EventKind::send ? "send" : "receive") + " of " + id +
                                       " does not belong to " + o.process);
                    continue;
                }
                const EventId e = kind == EventKind::send ? send_of(it->second) : receive_of(it->second);
                if (!seen.insert(e).second) {
                    error(o.where, "order of " + o.process + " lists an event of " + id + " twice");
                    continue;
                }
                events.push_back(e);
            }
            const auto& expected = b.events_on(ProcessId(o.process));
            if (events.size() == seen.size() && seen.size() != expected.size()) {
                error(o.where, "order of " + o.process + " does not list all of its events");
            }
            b.order[ProcessId(o.process)] = std::move(events);
        }

        if (check_invariants_) {
            for (const auto& v : validate_bmsc(b)) {
                if (v.kind == BmscViolationKind::fifo || v.kind == BmscViolationKind::cycle) {
                    error(where, "bMSC " + name.text + ": " + v.detail);
                }
            }
        }
        for (const auto& [n, existing] : spec_.charts) {
            if (n == name.text) {
                error(name.where, "duplicate bMSC " + name.text);
            }
        }
        spec_.charts.emplace_back(name.text, std::move(b));
    }

    void parse_graph()
    {
        const SourceLocation where = expect("graph").where;
        spec_.graph.name = identifier("graph name").text;
        expect("{");
        expect("init");
        const Token init = identifier("initial node");
        expect(";");
        expect("final");
        const Token final_node = identifier("terminal node");
        expect(";");

        MsgGraph& g = spec_.graph;
        while (peek_is("node")) {
            expect("node");
            const Token& id = identifier("node id");
            expect(":");
            const Token& chart = identifier("bMSC name or 'empty'");
            expect(";");
            if (g.find(id.text)) {
                error(id.where, "duplicate node " + id.text);
                continue;
            }
            Bmsc label;
            if (chart.text != "empty") {
                bool found = false;
                for (const auto& [n, b] : spec_.charts) {
                    if (n == chart.text) {
                        label = b;
                        found = true;
                    }
                }
                if (!found) {
                    error(chart.where, "unknown bMSC " + chart.text);
                }
            }
            g.add_node(id.text, std::move(label));
            spec_.node_charts.push_back(chart.text);
        }
        for (const Token* special : {&init, &final_node}) {
            if (!g.find(special->text)) {
                g.add_node(special->text, Bmsc{});
                spec_.node_charts.emplace_back("empty");
            }
        }
        g.initial = g.index_of(init.text);
        g.terminal = g.index_of(final_node.text);

        while (peek().kind == TokenKind::identifier) {
            const Token& from = identifier("node id");
            expect("->");
            const Token& to = identifier("node id");
            expect(";");
            auto a = g.find(from.text);
            auto b = g.find(to.text);
            if (!a) {
                error(from.where, "edge from unknown node " + from.text);
            }
            if (!b) {
                error(to.where, "edge to unknown node " + to.text);
            }
            if (a && b) {
                g.add_edge(*a, *b);
            }
        }
        expect("}");

        if (check_invariants_ && errors.empty()) {
            for (const auto& v : validate_graph(g)) {
                error(where, v.detail);
            }
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool check_invariants_;
    Specification spec_;
};

}  // namespace

Specification parse_spec(std::string_view text, std::string source, const ParseOptions& options)
{
    try {
        Parser parser(Lexer(text).tokens(), options.check_invariants);
        Specification spec = parser.parse();
        if (!parser.errors.empty()) {
            throw ParseError(std::move(source), std::move(parser.errors));
        }
        return spec;
    } catch (const SyntaxError& e) {
        throw ParseError(std::move(source), {e.diagnostic});
    }
}

Specification load_spec(const std::filesystem::path& path, const ParseOptions& options)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::stringstream text;
    text << in.rdbuf();
    return parse_spec(text.str(), path.string(), options);
}

std::string print_spec(const Specification& spec)
{
    std::ostringstream out;
    for (const auto& [name, b] : spec.charts) {
        out << "bmsc " << name << " {\n  processes";
        for (const ProcessId& p : b.processes) {
            out << ' ' << p.str();
        }
        out << ";\n";
        for (const Message& m : b.messages) {
            out << "  msg " << m.id << ": " << m.sender.str() << " -> " << m.receiver.str() << " label "
                << m.label.str() << ";\n";
        }
        for (const ProcessId& p : b.processes) {
            const auto& events = b.events_on(p);
            if (events.empty()) {
                continue;
            }
            out << "  order " << p.str() << ":";
            for (EventId e : events) {
                out << ' ' << (kind_of(e) == EventKind::send ? '!' : '?') << b.messages[message_of(e)].id;
            }
            out << ";\n";
        }
        out << "}\n\n";
    }
    const MsgGraph& g = spec.graph;
    out << "graph " << g.name << " {\n";
    out << "  init " << g.nodes[g.initial] << ";\n";
    out << "  final " << g.nodes[g.terminal] << ";\n";
    for (NodeIndex n = 0; n < g.size(); ++n) {
        out << "  node " << g.nodes[n] << ": " << (n < spec.node_charts.size() ? spec.node_charts[n] : "empty")
            << ";\n";
    }
    for (NodeIndex n = 0; n < g.size(); ++n) {
        for (NodeIndex t : g.successors[n]) {
            out << "  " << g.nodes[n] << " -> " << g.nodes[t] << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace msgsynth
