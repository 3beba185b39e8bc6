#include "taigr/llm/prompts.hpp"

#include <stdexcept>

#include "taigr/gen/prompt_assets.gen.hpp"

namespace taigr {

const std::string& prompt_template(const std::string& stage_tag) {
    const auto& prompts = detail::embedded_prompts();
    auto it = prompts.find(stage_tag);
    if (it == prompts.end()) {
        throw std::invalid_argument("unknown prompt template: " + stage_tag);
    }
    return it->second;
}

std::set<std::string> template_placeholders(const std::string& template_text) {
    std::set<std::string> names;
    for (size_t i = 0; i < template_text.size(); ++i) {
        char c = template_text[i];
        if (c == '{') {
            if (i + 1 < template_text.size() && template_text[i + 1] == '{') {
                ++i;  // escaped literal brace
                continue;
            }
            auto end = template_text.find('}', i + 1);
            if (end == std::string::npos) {
                throw std::invalid_argument("unterminated placeholder in template");
            }
            names.insert(template_text.substr(i + 1, end - i - 1));
            i = end;
        } else if (c == '}') {
            if (i + 1 < template_text.size() && template_text[i + 1] == '}') ++i;
        }
    }
    return names;
}

std::string render_template(const std::string& template_text,
                            const std::map<std::string, std::string>& fields) {
    const auto placeholders = template_placeholders(template_text);
    for (const auto& [name, _] : fields) {
        if (placeholders.count(name) == 0) {
            throw std::invalid_argument("template has no placeholder named '" + name + "'");
        }
    }
    for (const auto& name : placeholders) {
        if (fields.count(name) == 0) {
            throw std::invalid_argument("missing value for placeholder '" + name + "'");
        }
    }

    std::string out;
    out.reserve(template_text.size());
    for (size_t i = 0; i < template_text.size(); ++i) {
        char c = template_text[i];
        if (c == '{') {
            if (i + 1 < template_text.size() && template_text[i + 1] == '{') {
                out.push_back('{');
                ++i;
                continue;
            }
            auto end = template_text.find('}', i + 1);
            out += fields.at(template_text.substr(i + 1, end - i - 1));
            i = end;
        } else if (c == '}' && i + 1 < template_text.size() && template_text[i + 1] == '}') {
            out.push_back('}');
            ++i;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string render_stage_prompt(const std::string& stage_tag,
                                const std::map<std::string, std::string>& fields) {
    return render_template(prompt_template(stage_tag), fields);
}

}  // namespace taigr
