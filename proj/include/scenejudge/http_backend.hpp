#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scenejudge/errors.hpp"
#include "scenejudge/gateway.hpp"
#include "scenejudge/png_io.hpp"

namespace scenejudge {

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t chunk = data[i] << 16;
        if (i + 1 < data.size()) chunk |= data[i + 1] << 8;
        if (i + 2 < data.size()) chunk |= data[i + 2];
        out.push_back(alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < data.size() ? alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < data.size() ? alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

// OpenAI-compatible chat endpoint. Base URL from SJ_MODEL_BASE_URL, key
// from SJ_MODEL_API_KEY; images travel base64-encoded as PNG data URLs.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(std::string model, std::string base_url = "",
                         std::string api_key = "")
        : model_(std::move(model)),
          base_url_(std::move(base_url)),
          api_key_(std::move(api_key)) {
        if (base_url_.empty())
            if (const char* env = std::getenv("SJ_MODEL_BASE_URL"))
                base_url_ = env;
        if (api_key_.empty())
            if (const char* env = std::getenv("SJ_MODEL_API_KEY"))
                api_key_ = env;
        if (base_url_.empty())
            throw PreconditionError(
                "remote backend needs SJ_MODEL_BASE_URL to be set");
    }

    std::string complete(const std::string& prompt,
                         const std::vector<ImageBuffer>& images,
                         double temperature) override {
        nlohmann::json content = nlohmann::json::array();
        content.push_back({{"type", "text"}, {"text", prompt}});
        for (const auto& img : images) {
            std::string b64 = base64_encode(encode_png(img));
            content.push_back(
                {{"type", "image_url"},
                 {"image_url", {{"url", "data:image/png;base64," + b64}}}});
        }
        nlohmann::json body = {
            {"model", model_},
            {"temperature", temperature},
            {"messages",
             nlohmann::json::array(
                 {{{"role", "user"}, {"content", content}}})}};

        httplib::Client client(base_url_);
        client.set_read_timeout(300, 0);
        httplib::Headers headers;
        if (!api_key_.empty())
            headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post("/v1/chat/completions", headers, body.dump(),
                               "application/json");
        if (!res)
            throw std::runtime_error("transport failure contacting " + base_url_);
        if (res->status != 200)
            throw std::runtime_error("backend returned HTTP " +
                                     std::to_string(res->status) + ": " +
                                     res->body);
        nlohmann::json parsed = nlohmann::json::parse(res->body);
        return parsed.at("choices").at(0).at("message").at("content")
            .get<std::string>();
    }

private:
    std::string model_;
    std::string base_url_;
    std::string api_key_;
};

}  // namespace scenejudge
