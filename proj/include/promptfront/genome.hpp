#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "promptfront/errors.hpp"
#include "promptfront/grammar.hpp"
#include "promptfront/rng.hpp"

namespace promptfront {

struct ModelId {
    int index = 0;
    std::string name;

    friend bool operator==(const ModelId& a, const ModelId& b) { return a.index == b.index && a.name == b.name; }
};

// One individual: a point in prompt-space x model-space.
struct Genotype {
    ModelId model;
    int rule_id = 0;
    SelectionMap selections;

    friend bool operator==(const Genotype& a, const Genotype& b) {
        return a.model == b.model && a.rule_id == b.rule_id && a.selections == b.selections;
    }
};

struct OperatorConfig {
    double p_cx_model = 0.9;
    double p_cx_attr = 0.9;
    double p_mut_model = 0.2;
    double p_mut_param = 0.2;
};

inline void validate(const OperatorConfig& cfg) {
    for (double p : {cfg.p_cx_model, cfg.p_cx_attr, cfg.p_mut_model, cfg.p_mut_param}) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("operator probabilities must be in [0, 1], got " + std::to_string(p));
    }
}

inline std::vector<ComponentKind> content_kinds_of_rule(const GrammarRule& rule) {
    std::vector<ComponentKind> kinds;
    for (ComponentKind kind : rule.sequence)
        if (kind != ComponentKind::UserInput) kinds.push_back(kind);
    return kinds;
}

// Uniform sample over the full genotype space. Draw order: model, rule, then
// one variant per content kind in rule order.
inline Genotype random_genotype(const PromptGrammar& grammar, const std::vector<std::string>& model_pool, Rng& rng) {
    Genotype g;
    g.model.index = static_cast<int>(rng.index(model_pool.size()));
    g.model.name = model_pool[static_cast<std::size_t>(g.model.index)];
    g.rule_id = static_cast<int>(rng.index(grammar.rules.size()));
    for (ComponentKind kind : content_kinds_of_rule(grammar.rule(g.rule_id)))
        g.selections[kind] = static_cast<int>(rng.index(grammar.pool(kind).variants.size()));
    return g;
}

// Uniform draw over [0, n) \ {exclude}; n must be >= 2.
inline int resample_excluding(int exclude, std::size_t n, Rng& rng) {
    int draw = static_cast<int>(rng.index(n - 1));
    if (draw >= exclude) ++draw;
    return draw;
}

// With probability p_mut_model, replaces the model with a different one;
// independently, with probability p_mut_param, re-draws the content of one
// uniformly chosen component among the other variants of its pool. Either
// change is a guaranteed change whenever an alternative exists.
inline Genotype mutate(const Genotype& g, const PromptGrammar& grammar, const std::vector<std::string>& model_pool,
                       const OperatorConfig& cfg, Rng& rng) {
    Genotype out = g;

    if (rng.chance(cfg.p_mut_model) && model_pool.size() > 1) {
        out.model.index = resample_excluding(out.model.index, model_pool.size(), rng);
        out.model.name = model_pool[static_cast<std::size_t>(out.model.index)];
    }

    if (rng.chance(cfg.p_mut_param)) {
        const std::vector<ComponentKind> kinds = content_kinds_of_rule(grammar.rule(out.rule_id));
        if (!kinds.empty()) {
            const ComponentKind kind = kinds[rng.index(kinds.size())];
            const std::size_t pool_size = grammar.pool(kind).variants.size();
            if (pool_size > 1) out.selections[kind] = resample_excluding(out.selections[kind], pool_size, rng);
        }
    }

    return out;
}

// Conditional uniform crossover. Offspring keep their primary parent's rule;
// with one coin per pair the models are swapped; each content kind present in
// BOTH rules gets an independent swap coin. Kinds absent from either parent,
// the rule itself, and USER_INPUT never move.
inline std::pair<Genotype, Genotype> crossover(const Genotype& a, const Genotype& b, const PromptGrammar& grammar,
                                               const OperatorConfig& cfg, Rng& rng) {
    Genotype c1 = a;
    Genotype c2 = b;

    if (rng.chance(cfg.p_cx_model)) std::swap(c1.model, c2.model);

    const GrammarRule& rule_a = grammar.rule(a.rule_id);
    const GrammarRule& rule_b = grammar.rule(b.rule_id);
    for (ComponentKind kind : content_component_kinds) {
        if (!rule_a.contains(kind) || !rule_b.contains(kind)) continue;
        if (rng.chance(cfg.p_cx_attr)) std::swap(c1.selections.at(kind), c2.selections.at(kind));
    }

    return {std::move(c1), std::move(c2)};
}

// Identity used for duplicate removal: model name plus the instantiated
// template with the placeholder token deleted, so text-level equality governs
// regardless of which (rule, selections) path produced the text.
inline std::string dedup_key(const Genotype& g, const PromptGrammar& grammar) {
    std::string text = instantiate(grammar, g.rule_id, g.selections).text_template;
    const std::size_t pos = text.find(user_input_placeholder);
    if (pos != std::string::npos) text.erase(pos, user_input_placeholder.size());
    return g.model.name + '\x1f' + text;
}

// -- serialization --------------------------------------------------------------

inline nlohmann::json genotype_to_json(const Genotype& g, const PromptGrammar& grammar) {
    nlohmann::json selections = nlohmann::json::object();
    for (const auto& [kind, index] : g.selections) selections[std::string(to_string(kind))] = index;
    return {{"model", g.model.name},
            {"rule_id", g.rule_id},
            {"selections", std::move(selections)},
            {"template", instantiate(grammar, g.rule_id, g.selections).text_template}};
}

inline Genotype genotype_from_json(const nlohmann::json& doc, const std::vector<std::string>& model_pool) {
    if (!doc.is_object() || !doc.contains("model") || !doc.contains("rule_id") || !doc.contains("selections"))
        throw ParseError("genotype: fields 'model', 'rule_id', 'selections' are required");
    Genotype g;
    g.model.name = doc["model"].get<std::string>();
    g.model.index = -1;
    for (std::size_t i = 0; i < model_pool.size(); ++i)
        if (model_pool[i] == g.model.name) g.model.index = static_cast<int>(i);
    if (g.model.index < 0) throw ValidationError("genotype: model '" + g.model.name + "' not in the model pool");
    g.rule_id = doc["rule_id"].get<int>();
    for (const auto& [key, value] : doc["selections"].items()) {
        auto kind = component_kind_from_string(key);
        if (!kind) throw ParseError("genotype: unknown component kind '" + key + "'");
        g.selections[*kind] = value.get<int>();
    }
    return g;
}

} // namespace promptfront
