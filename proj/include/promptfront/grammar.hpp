#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptfront/errors.hpp"

namespace promptfront {

// One slot of a prompt rule. USER_INPUT is a placeholder-only kind: it marks
// where the query text is inserted and has no content pool.
enum class ComponentKind { Context, Cot, Examples, Req, Instr, UserInput };

inline constexpr std::array<ComponentKind, 6> all_component_kinds = {
    ComponentKind::Context, ComponentKind::Cot,  ComponentKind::Examples,
    ComponentKind::Req,     ComponentKind::Instr, ComponentKind::UserInput,
};

// Kinds that carry selectable text, in a fixed order used wherever operators
// or serialization need deterministic iteration.
inline constexpr std::array<ComponentKind, 5> content_component_kinds = {
    ComponentKind::Context, ComponentKind::Cot, ComponentKind::Examples,
    ComponentKind::Req,     ComponentKind::Instr,
};

inline constexpr std::string_view user_input_placeholder = "{user_input}";

inline std::string_view to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::Context: return "CONTEXT";
        case ComponentKind::Cot: return "COT";
        case ComponentKind::Examples: return "EXAMPLES";
        case ComponentKind::Req: return "REQ";
        case ComponentKind::Instr: return "INSTR";
        case ComponentKind::UserInput: return "USER_INPUT";
    }
    return "?";
}

inline std::optional<ComponentKind> component_kind_from_string(std::string_view name) {
    for (ComponentKind kind : all_component_kinds) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

// Ordered so that iteration (and the JSON encoding) is deterministic.
using SelectionMap = std::map<ComponentKind, int>;

struct GrammarRule {
    int rule_id = 0;
    std::vector<ComponentKind> sequence;

    bool contains(ComponentKind kind) const {
        for (ComponentKind k : sequence)
            if (k == kind) return true;
        return false;
    }
};

struct ContentPool {
    ComponentKind kind = ComponentKind::Req;
    std::vector<std::string> variants;
};

struct PromptGrammar {
    std::string task_id;
    std::vector<GrammarRule> rules;
    std::map<ComponentKind, ContentPool> pools;

    const GrammarRule& rule(int rule_id) const {
        if (rule_id < 0 || static_cast<std::size_t>(rule_id) >= rules.size())
            throw ValidationError("unknown rule_id " + std::to_string(rule_id));
        return rules[static_cast<std::size_t>(rule_id)];
    }

    const ContentPool& pool(ComponentKind kind) const {
        auto it = pools.find(kind);
        if (it == pools.end())
            throw ValidationError(std::string("no content pool for kind ") + std::string(to_string(kind)));
        return it->second;
    }
};

// A genotype's phenotype minus the query: the rule-ordered component texts
// joined by '\n', with {user_input} standing in at the USER_INPUT slot.
struct InstantiatedPrompt {
    std::string text_template;
    int rule_id = 0;
    SelectionMap selections;
};

// Rules used when a grammar file does not declare its own.
inline std::vector<GrammarRule> default_rules() {
    using K = ComponentKind;
    return {
        {0, {K::Req, K::UserInput, K::Instr}},
        {1, {K::Cot, K::Examples, K::Req, K::UserInput, K::Instr}},
        {2, {K::Req, K::Examples, K::UserInput, K::Instr}},
        {3, {K::Context, K::Req, K::UserInput, K::Instr}},
    };
}

inline void validate(const PromptGrammar& grammar) {
    if (grammar.task_id.empty()) throw ValidationError("grammar: task_id must be non-empty");
    if (grammar.rules.empty()) throw ValidationError("grammar: rules must be non-empty");

    for (std::size_t i = 0; i < grammar.rules.size(); ++i) {
        const GrammarRule& rule = grammar.rules[i];
        const std::string where = "rules[" + std::to_string(i) + "]";
        if (rule.rule_id != static_cast<int>(i))
            throw ValidationError(where + ": rule_ids must be dense from 0, got " + std::to_string(rule.rule_id));
        int user_inputs = 0;
        std::set<ComponentKind> seen;
        for (ComponentKind kind : rule.sequence) {
            if (!seen.insert(kind).second)
                throw ValidationError(where + ": duplicate component " + std::string(to_string(kind)));
            if (kind == ComponentKind::UserInput) ++user_inputs;
        }
        if (user_inputs != 1)
            throw ValidationError(where + ": USER_INPUT must appear exactly once");
        if (!rule.contains(ComponentKind::Req) && !rule.contains(ComponentKind::Context))
            throw ValidationError(where + ": rule must contain REQ or CONTEXT");
        for (ComponentKind kind : rule.sequence) {
            if (kind == ComponentKind::UserInput) continue;
            if (grammar.pools.find(kind) == grammar.pools.end())
                throw ValidationError(where + ": no content pool for " + std::string(to_string(kind)));
        }
    }

    for (const auto& [kind, pool] : grammar.pools) {
        const std::string where = "pools." + std::string(to_string(kind));
        if (kind == ComponentKind::UserInput)
            throw ValidationError("pools: USER_INPUT is placeholder-only and cannot have a pool");
        if (pool.kind != kind) throw ValidationError(where + ": pool kind mismatch");
        if (pool.variants.empty() || pool.variants.size() > 100)
            throw ValidationError(where + ": pool must hold between 1 and 100 variants, got " +
                                  std::to_string(pool.variants.size()));
        std::set<std::string_view> distinct;
        for (std::size_t v = 0; v < pool.variants.size(); ++v) {
            const std::string& text = pool.variants[v];
            const std::string at = where + "[" + std::to_string(v) + "]";
            if (text.empty()) throw ValidationError(at + ": variant must be non-empty");
            if (text.find(user_input_placeholder) != std::string::npos)
                throw ValidationError(at + ": variant must not contain the placeholder token");
            if (!distinct.insert(text).second)
                throw ValidationError(at + ": duplicate variant text");
        }
    }
}

// -- JSON format --------------------------------------------------------------
//
// {
//   "task_id": "...",
//   "rules":   [["REQ", "USER_INPUT", "INSTR"], ...],   // optional; defaults apply
//   "pools":   {"REQ": ["...", ...], ...}
// }

inline PromptGrammar grammar_from_json(const nlohmann::json& doc, const std::string& origin = "grammar") {
    if (!doc.is_object()) throw ParseError(origin + ": top-level value must be an object");
    PromptGrammar grammar;

    if (!doc.contains("task_id") || !doc["task_id"].is_string())
        throw ParseError(origin + ": field 'task_id' (string) is required");
    grammar.task_id = doc["task_id"].get<std::string>();

    if (doc.contains("rules")) {
        const nlohmann::json& rules = doc["rules"];
        if (!rules.is_array()) throw ParseError(origin + ": field 'rules' must be an array of kind arrays");
        int rule_id = 0;
        for (const nlohmann::json& seq : rules) {
            const std::string where = origin + ": rules[" + std::to_string(rule_id) + "]";
            if (!seq.is_array()) throw ParseError(where + " must be an array of kind names");
            GrammarRule rule;
            rule.rule_id = rule_id++;
            for (const nlohmann::json& item : seq) {
                if (!item.is_string()) throw ParseError(where + ": kinds must be strings");
                auto kind = component_kind_from_string(item.get<std::string>());
                if (!kind) throw ParseError(where + ": unknown component kind '" + item.get<std::string>() + "'");
                rule.sequence.push_back(*kind);
            }
            grammar.rules.push_back(std::move(rule));
        }
    } else {
        grammar.rules = default_rules();
    }

    if (!doc.contains("pools") || !doc["pools"].is_object())
        throw ParseError(origin + ": field 'pools' (object) is required");
    for (const auto& [key, value] : doc["pools"].items()) {
        auto kind = component_kind_from_string(key);
        if (!kind) throw ParseError(origin + ": pools: unknown component kind '" + key + "'");
        if (!value.is_array()) throw ParseError(origin + ": pools." + key + " must be an array of strings");
        ContentPool pool;
        pool.kind = *kind;
        for (const nlohmann::json& item : value) {
            if (!item.is_string()) throw ParseError(origin + ": pools." + key + ": variants must be strings");
            pool.variants.push_back(item.get<std::string>());
        }
        grammar.pools.emplace(*kind, std::move(pool));
    }

    validate(grammar);
    return grammar;
}

inline nlohmann::json grammar_to_json(const PromptGrammar& grammar) {
    nlohmann::json rules = nlohmann::json::array();
    for (const GrammarRule& rule : grammar.rules) {
        nlohmann::json seq = nlohmann::json::array();
        for (ComponentKind kind : rule.sequence) seq.push_back(std::string(to_string(kind)));
        rules.push_back(std::move(seq));
    }
    nlohmann::json pools = nlohmann::json::object();
    for (const auto& [kind, pool] : grammar.pools) pools[std::string(to_string(kind))] = pool.variants;
    return {{"task_id", grammar.task_id}, {"rules", std::move(rules)}, {"pools", std::move(pools)}};
}

// Reports the 1-based line of a byte offset, for parse diagnostics.
inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
}

inline PromptGrammar load_grammar(const std::filesystem::path& path) {
    return grammar_from_json(parse_json_file(path), path.string());
}

// Assembles the prompt template for one (rule, selections) choice. The
// selections map must cover exactly the non-USER_INPUT kinds of the rule.
inline InstantiatedPrompt instantiate(const PromptGrammar& grammar, int rule_id, const SelectionMap& selections) {
    const GrammarRule& rule = grammar.rule(rule_id);

    for (const auto& [kind, index] : selections) {
        if (!rule.contains(kind) || kind == ComponentKind::UserInput)
            throw ValidationError("selection for " + std::string(to_string(kind)) + " not allowed by rule " +
                                  std::to_string(rule_id));
        (void)index;
    }

    std::string text;
    for (std::size_t i = 0; i < rule.sequence.size(); ++i) {
        if (i > 0) text += '\n';
        const ComponentKind kind = rule.sequence[i];
        if (kind == ComponentKind::UserInput) {
            text += user_input_placeholder;
            continue;
        }
        auto it = selections.find(kind);
        if (it == selections.end())
            throw ValidationError("missing selection for " + std::string(to_string(kind)) + " in rule " +
                                  std::to_string(rule_id));
        const ContentPool& pool = grammar.pool(kind);
        const int index = it->second;
        if (index < 0 || static_cast<std::size_t>(index) >= pool.variants.size())
            throw ValidationError("selection index " + std::to_string(index) + " out of range for " +
                                  std::string(to_string(kind)) + " pool of size " +
                                  std::to_string(pool.variants.size()));
        text += pool.variants[static_cast<std::size_t>(index)];
    }

    return InstantiatedPrompt{std::move(text), rule_id, selections};
}

// Single-pass, non-recursive substitution of the placeholder.
inline std::string render(const InstantiatedPrompt& prompt, std::string_view query) {
    std::string out = prompt.text_template;
    const std::size_t pos = out.find(user_input_placeholder);
    if (pos != std::string::npos) out.replace(pos, user_input_placeholder.size(), query);
    return out;
}

} // namespace promptfront
