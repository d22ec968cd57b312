#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "haznav/hazard_pipeline.hpp"

namespace haznav {

struct VlmEndpointConfig {
    std::string host{"localhost"};
    int port{8000};
    std::string path{"/v1/chat/completions"};
    std::string hazard_model{"gpt-4o"};
    std::string emotion_model{"gpt-4o-mini"};
    std::string api_key;  // CLI fills this from the environment
    int max_retries{3};
    int timeout_s{30};
};

namespace vlm_detail {

inline std::string base64_encode(const std::string& bytes) {
    static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < bytes.size()) {
        const std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                static_cast<unsigned char>(bytes[i + 2]);
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        out += alphabet[(n >> 6) & 63];
        out += alphabet[n & 63];
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t n = static_cast<unsigned char>(bytes[i]) << 16;
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t n = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += alphabet[(n >> 18) & 63];
        out += alphabet[(n >> 12) & 63];
        out += alphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

/// Encodes the frame as a binary PPM wrapped in a data URL.
inline std::string image_data_url(const SceneImage& image) {
    std::ostringstream ppm;
    ppm << "P6\n" << image.width << " " << image.height << "\n255\n";
    ppm.write(reinterpret_cast<const char*>(image.rgb.data()),
              static_cast<std::streamsize>(image.rgb.size()));
    return "data:image/x-portable-pixmap;base64," + base64_encode(ppm.str());
}

}  // namespace vlm_detail

/// Chat-completions adapter for the two reasoning stages. Responses must be
/// single JSON objects matching the stage schemas; malformed output is
/// retried up to max_retries before MalformedResponse is thrown. Opt-in: the
/// deterministic mock stays canonical for every test.
class LiveVlmBackend : public HazardBackend {
public:
    explicit LiveVlmBackend(VlmEndpointConfig config) : config_(std::move(config)) {}

    HazardReport reason_hazards(const SceneImage& image, const PromptSet& prompts) override {
        nlohmann::json request = make_request(config_.hazard_model, prompts.hazard_prompt, image,
                                              "Identify the potential hazards in this view.");
        return request_with_retries<HazardReport>("hazard reasoner", request, [](const nlohmann::json& j) {
            HazardReport report;
            report.textual_description = j.at("textual_description").get<std::string>();
            report.object_list = j.at("object_list").get<std::vector<std::string>>();
            report.hazard_reasoning = j.at("hazard_reasoning").get<std::string>();
            report.hazardous_objects = j.at("hazardous_objects").get<std::vector<std::string>>();
            for (const auto& h : report.hazardous_objects) {
                if (std::find(report.object_list.begin(), report.object_list.end(), h) ==
                    report.object_list.end()) {
                    report.object_list.push_back(h);  // repair the subset invariant
                }
            }
            return report;
        });
    }

    AnxietyAssessment evaluate_emotion(const std::string& reasoning,
                                       const std::vector<std::string>& hazards,
                                       const SceneImage& image, const PromptSet& prompts) override {
        std::string user = "Hazard reasoning: " + reasoning + "\nHazardous objects:";
        for (const auto& h : hazards) user += " \"" + h + "\"";
        nlohmann::json request = make_request(config_.emotion_model, prompts.emotion_prompt, image, user);
        return request_with_retries<AnxietyAssessment>(
            "emotion evaluator", request, [&hazards](const nlohmann::json& j) {
                AnxietyAssessment out;
                const nlohmann::json& scores = j.at("scores");
                for (const auto& label : hazards) {
                    if (!scores.contains(label))
                        throw MalformedResponse("missing score for \"" + label + "\"");
                    int s = scores.at(label).get<int>();
                    if (s < 1 || s > 3) {
                        std::cerr << "[haznav] warning: anxiety score " << s << " for \"" << label
                                  << "\" outside {1,2,3}, clamping\n";
                        s = std::clamp(s, 1, 3);
                    }
                    out.scores[label] = s;
                }
                if (j.contains("justifications")) {
                    for (const auto& label : hazards) {
                        if (j.at("justifications").contains(label))
                            out.justifications[label] = j.at("justifications").at(label).get<std::string>();
                    }
                }
                // scores for objects outside the hazard list are dropped
                return out;
            });
    }

private:
    nlohmann::json make_request(const std::string& model, const std::string& system_prompt,
                                const SceneImage& image, const std::string& user_text) const {
        nlohmann::json content = nlohmann::json::array();
        content.push_back({{"type", "text"}, {"text", user_text}});
        if (!image.rgb.empty()) {
            content.push_back({{"type", "image_url"},
                               {"image_url", {{"url", vlm_detail::image_data_url(image)}}}});
        }
        return {{"model", model},
                {"response_format", {{"type", "json_object"}}},
                {"messages",
                 {{{"role", "system"}, {"content", system_prompt}},
                  {{"role", "user"}, {"content", content}}}}};
    }

    template <typename T, typename Parse>
    T request_with_retries(const char* stage, const nlohmann::json& request, Parse parse) {
        std::string last_error = "no attempts made";
        for (int attempt = 0; attempt < std::max(1, config_.max_retries); ++attempt) {
            try {
                return parse(post_and_extract(request));
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        throw MalformedResponse(std::string(stage) + ": " + last_error);
    }

    nlohmann::json post_and_extract(const nlohmann::json& request) {
        httplib::Client client(config_.host, config_.port);
        client.set_read_timeout(config_.timeout_s, 0);
        client.set_connection_timeout(config_.timeout_s, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto res = client.Post(config_.path, headers, request.dump(), "application/json");
        if (!res) throw std::runtime_error("no response from endpoint");
        if (res->status != 200) throw std::runtime_error("HTTP " + std::to_string(res->status));
        const nlohmann::json body = nlohmann::json::parse(res->body);
        const std::string content =
            body.at("choices").at(0).at("message").at("content").get<std::string>();
        return nlohmann::json::parse(content);
    }

    VlmEndpointConfig config_;
};

}  // namespace haznav
