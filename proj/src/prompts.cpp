#include "omidet/prompts.hpp"

#include <stdexcept>

namespace omidet {

namespace {

std::string quote_join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ' ';
        out += '"';
        out += parts[i];
        out += '"';
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '\n';
        out += parts[i];
    }
    return out;
}

}  // namespace

PromptPair render_veracity_prompt(const std::string& news_text) {
    if (news_text.empty()) {
        throw std::invalid_argument("render_veracity_prompt: empty news text");
    }
    PromptPair p;
    p.system =
        "Given the following news piece, predict the veracity of this news "
        "piece. If the news piece is more likely to be fake, return 1; "
        "otherwise, return 0. Please refrain from providing ambiguous "
        "assessments, such as undetermined.";
    p.context = "News: [" + news_text + "]. The answer (Arabic numerals) is:";
    return p;
}

PromptPair render_intent_prompt(const std::vector<std::string>& target_segments,
                                const std::vector<std::string>& env_segments) {
    if (target_segments.empty()) {
        throw std::invalid_argument("render_intent_prompt: empty target segments");
    }
    if (env_segments.empty()) {
        throw std::invalid_argument("render_intent_prompt: empty environment segments");
    }
    PromptPair p;
    p.system =
        "You are an AI annotator. You will be provided with two sets of news "
        "segments: [Target] and [Environment]. Your task is to detect potential "
        "omissions in the [Target] news content by comparing it against the "
        "contextual information provided in [Environment]. These omissions "
        "reflect intentional selective exclusion of information to better "
        "support the narrative. For each such pair, also analyze its omission "
        "intent (e.g., \"to prevent readers from thinking of the "
        "unreasonableness behind the overly high statistics\"). Output in this "
        "format: {[Environment segment], [omission intent], [Target segment]}\n"
        "Example:\n"
        "[The Start of Target] \"t1\" \"t2\" [The End of Target]\n"
        "[The Start of Environment] \"e2\" \"e2\" [The End of Environment] \n"
        "Your Answer:\n"
        "{[\"t1\"], [omission intent], [ \"e1\"] \n [\"t2\"], [omission intent], "
        "[ \"e2\"]}";
    p.context = "[The Start of Target]\n[" + quote_join(target_segments) +
                "]\n[The End of Target]\n[The Start of Environment]\n[" +
                quote_join(env_segments) + "]\n[The End of Environment]\nYour Answer:";
    return p;
}

PromptPair render_batch_type_prompt(const std::vector<std::string>& sample_lines) {
    if (sample_lines.empty()) {
        throw std::invalid_argument("render_batch_type_prompt: empty sample list");
    }
    PromptPair p;
    p.system =
        "You need to analyze the following omission intent analysis samples "
        "and summarize common omission types. \n"
        "Example output format:\n"
        "[Numerical Comparison Omission, Omitting relevant comparative data to "
        "exaggerate or downplay the importance of certain statistics]\n"
        "[Background Information Omission, Deliberately omitting event "
        "background to prevent readers from understanding the complete "
        "situation]";
    p.context =
        "Based on the following omission intent analysis samples, summarize "
        "the omission types that appear in this batch. Each sample contains: "
        "[segment with omission, omission intent, omitted information]\n"
        "Please analyze these samples and output in the format: [Omission "
        "Type, Typical Intent Description].\n"
        "Focus on identifying 3-8 distinct patterns in this batch:\n[" +
        join_lines(sample_lines) + "]";
    return p;
}

PromptPair render_consolidate_prompt(const std::vector<std::string>& batch_lines) {
    if (batch_lines.empty()) {
        throw std::invalid_argument("render_consolidate_prompt: empty batch list");
    }
    PromptPair p;
    p.system =
        "Please remove duplicates, merge similar patterns, and output the "
        "final omission type summary.";
    p.context =
        "Based on the following omission patterns summarized from different "
        "batches, merge similar types and extract the final 5-8 core omission "
        "patterns:\n[" +
        join_lines(batch_lines) + "]\n";
    return p;
}

std::string sim_mode_name(SimMode mode) {
    return mode == SimMode::Zero ? "sim-zero" : "sim-rule";
}

SimMode sim_mode_from_name(const std::string& name) {
    if (name == "sim-zero") return SimMode::Zero;
    if (name == "sim-rule") return SimMode::Rule;
    throw std::invalid_argument("unknown simulation mode '" + name + "'");
}

PromptPair render_sim_prompt(const std::vector<std::string>& target_segments,
                             SimMode mode) {
    if (target_segments.empty()) {
        throw std::invalid_argument("render_sim_prompt: empty target segments");
    }
    PromptPair p;
    p.system =
        "You are an AI annotator. Given a set of news segments grouped by "
        "[Target], generate omitted information that reflects intentional "
        "omission to support specific narratives, and analyze omission intent "
        "for each pair.";
    if (mode == SimMode::Rule) {
        p.system +=
            " (e.g., [Contextual Omission] omitting background information, "
            "[Complexity Omission] simplifying complex issues, [Comparative "
            "Omission] excluding comparative data, [Impact Omission] omitting "
            "potential consequences, [Accountability Omission] ignoring "
            "responsibility issues, [Severity Omission] minimizing perceived "
            "risks, [Stakeholder Omission] excluding diverse viewpoints, and "
            "[Political Context Omission] downplaying political motivations";
    }
    p.system +=
        "\nOutput format: {[Potential omitted information], [omission intent], "
        "[Target segment]}";
    p.context = "[The Start of Target Segments]\n[" + quote_join(target_segments) +
                "]\n[The End of Target Segments]\nYour Answer:";
    return p;
}

}  // namespace omidet
