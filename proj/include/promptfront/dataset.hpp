#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptfront/errors.hpp"
#include "promptfront/grammar.hpp"
#include "promptfront/rng.hpp"

namespace promptfront {

struct TaskInstance {
    std::string id;
    std::string query;
    std::string target;
};

// Binary-output task: exactly two canonical labels.
struct TaskDataset {
    std::string task_id;
    std::vector<std::string> label_set;
    std::vector<TaskInstance> instances;
};

inline void validate(const TaskDataset& dataset) {
    if (dataset.task_id.empty()) throw ValidationError("dataset: task_id must be non-empty");
    if (dataset.label_set.size() != 2)
        throw ValidationError("dataset: label_set must hold exactly 2 labels, got " +
                              std::to_string(dataset.label_set.size()));
    if (dataset.label_set[0] == dataset.label_set[1]) throw ValidationError("dataset: labels must differ");
    if (dataset.instances.empty()) throw ValidationError("dataset: instances must be non-empty");
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
        const TaskInstance& inst = dataset.instances[i];
        const std::string where = "instances[" + std::to_string(i) + "]";
        if (inst.id.empty()) throw ValidationError(where + ": id must be non-empty");
        if (!ids.insert(inst.id).second) throw ValidationError(where + ": duplicate id '" + inst.id + "'");
        if (inst.target != dataset.label_set[0] && inst.target != dataset.label_set[1])
            throw ValidationError(where + ": target '" + inst.target + "' not in label_set");
    }
}

inline TaskDataset dataset_from_json(const nlohmann::json& doc, const std::string& origin = "dataset") {
    if (!doc.is_object()) throw ParseError(origin + ": top-level value must be an object");
    TaskDataset dataset;
    if (!doc.contains("task_id") || !doc["task_id"].is_string())
        throw ParseError(origin + ": field 'task_id' (string) is required");
    dataset.task_id = doc["task_id"].get<std::string>();
    if (!doc.contains("label_set") || !doc["label_set"].is_array())
        throw ParseError(origin + ": field 'label_set' (array) is required");
    for (const nlohmann::json& label : doc["label_set"]) dataset.label_set.push_back(label.get<std::string>());
    if (!doc.contains("instances") || !doc["instances"].is_array())
        throw ParseError(origin + ": field 'instances' (array) is required");
    for (const nlohmann::json& item : doc["instances"]) {
        if (!item.contains("id") || !item.contains("query") || !item.contains("target"))
            throw ParseError(origin + ": instances need 'id', 'query', 'target'");
        dataset.instances.push_back(
            {item["id"].get<std::string>(), item["query"].get<std::string>(), item["target"].get<std::string>()});
    }
    validate(dataset);
    return dataset;
}

inline nlohmann::json dataset_to_json(const TaskDataset& dataset) {
    nlohmann::json instances = nlohmann::json::array();
    for (const TaskInstance& inst : dataset.instances)
        instances.push_back({{"id", inst.id}, {"query", inst.query}, {"target", inst.target}});
    return {{"task_id", dataset.task_id}, {"label_set", dataset.label_set}, {"instances", std::move(instances)}};
}

inline TaskDataset load_dataset(const std::filesystem::path& path) {
    return dataset_from_json(parse_json_file(path), path.string());
}

// The instance indices every genotype of a run is evaluated on. Fixed once
// per run so all individuals see the same queries.
struct EvalSample {
    std::uint64_t seed = 0;
    std::vector<std::size_t> indices;
};

// Uniform draw without replacement (partial Fisher-Yates), deterministic in
// the seed.
inline EvalSample draw_sample(const TaskDataset& dataset, std::size_t sample_size, std::uint64_t seed) {
    const std::size_t n = dataset.instances.size();
    if (sample_size == 0) throw ConfigError("sample_size must be >= 1");
    if (sample_size > n)
        throw ConfigError("sample_size " + std::to_string(sample_size) + " exceeds dataset size " + std::to_string(n));
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    Rng rng(derive_seed(seed, fnv1a64("sample")));
    for (std::size_t i = 0; i < sample_size; ++i)
        std::swap(pool[i], pool[i + rng.index(n - i)]);
    pool.resize(sample_size);
    return EvalSample{seed, std::move(pool)};
}

inline std::string sample_hash(const EvalSample& sample) {
    std::uint64_t h = fnv1a64("sample-indices");
    for (std::size_t idx : sample.indices) {
        for (int b = 0; b < 8; ++b) {
            const char byte = static_cast<char>((idx >> (8 * b)) & 0xff);
            h = fnv1a64(std::string_view(&byte, 1), h);
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Earliest position where `needle` occurs standalone in `haystack` (bounded
// by non-alphanumeric characters or the string edges).
inline std::size_t find_standalone(const std::string& haystack, const std::string& needle) {
    std::size_t pos = haystack.find(needle);
    while (pos != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]) || !is_word_char(needle.front());
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]) || !is_word_char(needle.back());
        if (left_ok && right_ok) return pos;
        pos = haystack.find(needle, pos + 1);
    }
    return std::string::npos;
}

// "(a)"-style labels also match a standalone bare letter.
inline std::optional<char> parenthesized_letter(const std::string& label) {
    if (label.size() == 3 && label.front() == '(' && label.back() == ')' && is_word_char(label[1]))
        return label[1];
    return std::nullopt;
}

} // namespace detail

// Case-insensitive earliest-match scan for a canonical label. Labels must
// appear as standalone tokens ("no" does not match inside "cannot"); letter
// labels like "(b)" match either the parenthesized form or a bare standalone
// letter. Returns nullopt when no label occurs.
inline std::optional<std::string> extract_answer(std::string_view raw_output,
                                                 const std::vector<std::string>& label_set) {
    const std::string haystack = detail::to_lower(raw_output);
    std::size_t best_pos = std::string::npos;
    std::optional<std::string> best;
    for (const std::string& label : label_set) {
        const std::string needle = detail::to_lower(label);
        std::size_t pos = detail::find_standalone(haystack, needle);
        if (auto letter = detail::parenthesized_letter(needle)) {
            const std::size_t bare = detail::find_standalone(haystack, std::string(1, *letter));
            pos = std::min(pos, bare);
        }
        if (pos < best_pos) {
            best_pos = pos;
            best = label;
        }
    }
    return best;
}

// Converts a BIG-bench-style task JSON ({"examples": [{"input", "target_scores"}]})
// into a TaskDataset. When every example scores the same two choices, those
// become the label set; otherwise per-example choices are appended to the
// query as (a)/(b) options.
inline TaskDataset import_bigbench(const nlohmann::json& doc, const std::string& task_id,
                                   const std::string& origin = "bigbench") {
    if (!doc.is_object() || !doc.contains("examples") || !doc["examples"].is_array())
        throw ParseError(origin + ": field 'examples' (array) is required");
    const nlohmann::json& examples = doc["examples"];
    if (examples.empty()) throw ValidationError(origin + ": no examples");

    bool shared_labels = true;
    std::vector<std::string> first_keys;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const nlohmann::json& ex = examples[i];
        const std::string where = origin + ": examples[" + std::to_string(i) + "]";
        if (!ex.contains("input") || !ex.contains("target_scores") || !ex["target_scores"].is_object())
            throw ParseError(where + ": needs 'input' and 'target_scores'");
        if (ex["target_scores"].size() != 2)
            throw ValidationError(where + ": binary tasks need exactly 2 target_scores, got " +
                                  std::to_string(ex["target_scores"].size()));
        std::vector<std::string> keys;
        for (const auto& [key, value] : ex["target_scores"].items()) {
            keys.push_back(key);
            (void)value;
        }
        if (i == 0) {
            first_keys = keys;
        } else if (keys != first_keys) {
            shared_labels = false;
        }
    }

    TaskDataset dataset;
    dataset.task_id = task_id;
    dataset.label_set = shared_labels ? first_keys : std::vector<std::string>{"(a)", "(b)"};

    for (std::size_t i = 0; i < examples.size(); ++i) {
        const nlohmann::json& ex = examples[i];
        TaskInstance inst;
        if (ex.contains("id") && ex["id"].is_string()) {
            inst.id = ex["id"].get<std::string>();
        } else {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%05zu", i);
            inst.id = buf;
        }
        std::vector<std::pair<std::string, double>> scores;
        for (const auto& [key, value] : ex["target_scores"].items())
            scores.emplace_back(key, value.get<double>());
        if (shared_labels) {
            inst.query = ex["input"].get<std::string>();
            inst.target = scores[0].second >= scores[1].second ? scores[0].first : scores[1].first;
        } else {
            inst.query = ex["input"].get<std::string>() + "\n(a) " + scores[0].first + "\n(b) " + scores[1].first;
            inst.target = scores[0].second >= scores[1].second ? "(a)" : "(b)";
        }
        dataset.instances.push_back(std::move(inst));
    }

    validate(dataset);
    return dataset;
}

} // namespace promptfront
