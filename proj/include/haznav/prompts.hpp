#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "haznav/hazard_pipeline.hpp"

namespace haznav {

// Default system prompts for the two reasoning stages. The same texts ship as
// editable asset files under assets/prompts/.

inline constexpr const char* kHazardReasonerPrompt =
    "You are the hazard reasoner of a mobile robot navigating indoor and outdoor "
    "environments. You receive the robot's current camera view. Describe the scene, "
    "list every object you can see, then reason step by step about which objects or "
    "regions could endanger the robot's navigation, including dynamic risks such as "
    "doors that may open, people who may stand up or step out, blind corners, and "
    "slippery surfaces. Finally list only the objects you consider hazardous.\n"
    "Respond with a single JSON object with exactly these fields:\n"
    "  \"textual_description\": string, a detailed description of the scene.\n"
    "  \"object_list\": array of strings, every detected object.\n"
    "  \"hazard_reasoning\": string, your step-by-step reasoning about potential hazards.\n"
    "  \"hazardous_objects\": array of strings, the objects that pose a navigation risk; "
    "each entry must also appear in object_list.";

inline constexpr const char* kEmotionEvaluatorPrompt =
    "You are the emotion evaluator of a mobile robot. You receive the robot's camera "
    "view, a hazard reasoning text, and a list of hazardous objects. For each hazardous "
    "object, rate how anxious the robot should be about approaching it on an integer "
    "scale from 1 (mild caution) to 3 (strong avoidance), and justify each score in one "
    "sentence.\n"
    "Respond with a single JSON object with exactly these fields:\n"
    "  \"scores\": object mapping each hazardous object to an integer 1-3.\n"
    "  \"justifications\": object mapping each hazardous object to a one-sentence reason.";

inline constexpr const char* kHazardSchema =
    R"({"textual_description":"string","object_list":["string"],"hazard_reasoning":"string","hazardous_objects":["string"]})";

inline constexpr const char* kEmotionSchema =
    R"({"scores":{"<object>":"integer 1-3"},"justifications":{"<object>":"string"}})";

inline PromptSet default_prompts() {
    return PromptSet{kHazardReasonerPrompt, kEmotionEvaluatorPrompt, kHazardSchema, kEmotionSchema};
}

/// Loads a prompt text file, falling back to `fallback` when missing.
inline std::string load_prompt_file(const std::string& path, const std::string& fallback) {
    std::ifstream in(path);
    if (!in) return fallback;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace haznav
