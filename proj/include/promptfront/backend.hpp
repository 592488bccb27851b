#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "promptfront/errors.hpp"
#include "promptfront/rng.hpp"

namespace promptfront {

struct GenerationResult {
    std::string raw_output;
    long input_tokens = 0;
    long output_tokens = 0;
};

// Abstract model function: (model, prompt) -> answer plus token accounting.
// Implementations must tolerate concurrent generate() calls.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual GenerationResult generate(const std::string& model_name, const std::string& prompt_text) = 0;
};

inline long whitespace_token_count(std::string_view text) {
    long count = 0;
    bool in_token = false;
    for (unsigned char c : text) {
        const bool space = std::isspace(c) != 0;
        if (!space && !in_token) ++count;
        in_token = !space;
    }
    return count;
}

// Offline backend: a pure function of (model_name, prompt_text). The emitted
// label follows a hash of both, so accuracy varies pseudo-randomly per
// (model, prompt) pair; the filler length follows the model name alone, so
// models differ in verbosity and hence token cost.
class SimulatedBackend : public ModelBackend {
public:
    SimulatedBackend(std::vector<std::string> model_names, std::vector<std::string> label_set)
        : model_names_(std::move(model_names)), label_set_(std::move(label_set)) {}

    GenerationResult generate(const std::string& model_name, const std::string& prompt_text) override {
        bool known = false;
        for (const std::string& name : model_names_) known = known || name == model_name;
        if (!known) throw BackendError("unknown simulated model '" + model_name + "'");

        const std::uint64_t h = fnv1a64(prompt_text, fnv1a64(model_name, fnv1a64("sim-v1")));
        const std::string& label = label_set_[h % label_set_.size()];

        GenerationResult result;
        result.raw_output = "The answer is " + label + ".";
        const std::size_t filler_words = 3 + fnv1a64(model_name) % 38;
        for (std::size_t i = 0; i < filler_words; ++i) {
            result.raw_output += ' ';
            result.raw_output += filler_word(h + i);
        }
        result.input_tokens = whitespace_token_count(prompt_text);
        result.output_tokens = whitespace_token_count(result.raw_output);
        return result;
    }

private:
    // None of these can collide with a label token under standalone matching.
    static std::string_view filler_word(std::uint64_t h) {
        static constexpr std::string_view words[] = {"reasoning", "continues", "across",  "several",
                                                     "tokens",    "while",     "weighing", "both",
                                                     "readings",  "before",    "settling", "down"};
        return words[h % (sizeof(words) / sizeof(words[0]))];
    }

    std::vector<std::string> model_names_;
    std::vector<std::string> label_set_;
};

} // namespace promptfront
