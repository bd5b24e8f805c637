#pragma once

// The .msg specification language, canonical printing, DOT export and
// JSON export/import of analysis results and machines.

#include "msgsynth/cfm.hpp"
#include "msgsynth/choice.hpp"
#include "msgsynth/core.hpp"
#include "msgsynth/runtime.hpp"
#include "msgsynth/verification.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace msgsynth {

struct SourceLocation {
    std::size_t line = 1;
    std::size_t column = 1;
};

struct Diagnostic {
    SourceLocation where;
    std::string message;
};

class ParseError : public Error {
public:
    ParseError(std::string source, std::vector<Diagnostic> diagnostics);

    const std::string& source() const { return source_; }
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::string source_;
    std::vector<Diagnostic> diagnostics_;
};

struct Specification {
    // Charts in declaration order.
    std::vector<std::pair<std::string, Bmsc>> charts;
    // Chart name of every graph node, or "empty".
    std::vector<std::string> node_charts;
    MsgGraph graph;

    const Bmsc& chart(std::string_view name) const;
};

struct ParseOptions {
    // Report FIFO, cycle and graph-shape violations as parse errors.
    bool check_invariants = true;
};

/// Parses a specification. Syntax and semantic errors are collected with
/// source locations and thrown as one ParseError.
Specification parse_spec(std::string_view text, std::string source = "<input>", const ParseOptions& options = {});
Specification load_spec(const std::filesystem::path& path, const ParseOptions& options = {});

/// Canonical text form: explicit order clauses, declaration order kept.
std::string print_spec(const Specification& spec);

std::string export_dot(const MsgGraph& g);
std::string export_dot(const Cfm& cfm);

nlohmann::json to_json(const MsgGraph& g, const Classification& c);
nlohmann::json to_json(const MsgGraph& g, const std::vector<PredictionPath>& paths);
nlohmann::json to_json(const EquivalenceReport& r);
nlohmann::json to_json(const ExplorationResult& r);
nlohmann::json to_json(const Cfm& cfm);

/// Reads machines written by to_json(const Cfm&). The result carries no
/// synthesis context.
Cfm cfm_from_json(const nlohmann::json& j);

std::string render_text(const Cfm& cfm);

}  // namespace msgsynth
