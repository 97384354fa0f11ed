#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenejudge/errors.hpp"
#include "scenejudge/font.hpp"
#include "scenejudge/image.hpp"
#include "scenejudge/prompts.hpp"
#include "scenejudge/scene_io.hpp"

namespace scenejudge {

struct ChatRequest {
    std::string template_id;
    std::map<std::string, std::string> variables;
    std::vector<ImageBuffer> images;
    double temperature = 0.0;  // deterministic by default
    int max_attempts = 3;
};

struct BackendProfile {
    std::string name = "mock";
    int image_target_px = 1200;            // longest side after resize
    std::optional<int> image_cap;          // concat pairs above this count
};

inline BackendProfile remote_profile() { return {"remote", 1200, std::nullopt}; }
inline BackendProfile local_profile() { return {"local", 335, 4}; }
inline BackendProfile mock_profile() { return {"mock", 1200, std::nullopt}; }

struct Transcript {
    std::string template_id;
    std::string prompt;
    std::map<std::string, std::string> variables;
    int image_count = 0;
    std::string raw_response;
    Json parsed;
    double latency_ms = 0.0;
    int attempts = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const std::string& prompt,
                                 const std::vector<ImageBuffer>& images,
                                 double temperature) = 0;
};

inline std::string stable_variables_hash(
    const std::map<std::string, std::string>& variables) {
    // FNV-1a over the canonical serialization (std::map orders keys).
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& [k, v] : variables) {
        mix(k);
        mix(v);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

inline std::string mock_key(const std::string& template_id,
                            const std::map<std::string, std::string>& variables) {
    return template_id + "#" + stable_variables_hash(variables);
}

// Deterministic scripted backend. Responses are keyed by
// (template_id, variables hash); entries may also match on substrings so
// fixture scripts stay hand-writable. Unscripted requests fail loudly.
class MockBackend : public Backend {
public:
    struct SubstringRule {
        std::string template_id;
        std::map<std::string, std::string> contains;  // var -> substring
        std::vector<std::string> responses;           // consumed in order
        mutable size_t next = 0;
    };

    void script(const std::string& template_id,
                const std::map<std::string, std::string>& variables,
                const std::string& response) {
        exact_[mock_key(template_id, variables)] = response;
    }

    void script_key(const std::string& key, const std::string& response) {
        exact_[key] = response;
    }

    void script_contains(SubstringRule rule) {
        rules_.push_back(std::move(rule));
    }

    static std::shared_ptr<MockBackend> from_script_file(const std::string& path) {
        auto backend = std::make_shared<MockBackend>();
        Json doc = Json::parse(read_file(path));
        for (const auto& entry : doc.at("responses")) {
            std::string response = entry.at("response").is_string()
                                       ? entry["response"].get<std::string>()
                                       : entry["response"].dump();
            if (entry.contains("key")) {
                backend->script_key(entry["key"].get<std::string>(), response);
            } else if (entry.contains("variables")) {
                std::map<std::string, std::string> vars;
                for (const auto& [k, v] : entry["variables"].items())
                    vars[k] = v.get<std::string>();
                backend->script(entry.at("template_id").get<std::string>(),
                                vars, response);
            } else {
                SubstringRule rule;
                rule.template_id = entry.at("template_id").get<std::string>();
                if (entry.contains("contains"))
                    for (const auto& [k, v] : entry["contains"].items())
                        rule.contains[k] = v.get<std::string>();
                if (entry.contains("responses"))
                    for (const auto& r : entry["responses"])
                        rule.responses.push_back(
                            r.is_string() ? r.get<std::string>() : r.dump());
                else
                    rule.responses.push_back(response);
                backend->script_contains(std::move(rule));
            }
        }
        return backend;
    }

    std::string complete(const std::string& prompt,
                         const std::vector<ImageBuffer>&, double) override {
        std::lock_guard<std::mutex> lock(mutex_);
        // The gateway embeds the lookup key in a trailer line.
        std::string key = extract_trailer(prompt, "MOCK-KEY: ");
        auto it = exact_.find(key);
        if (it != exact_.end()) return it->second;

        std::string template_id = key.substr(0, key.find('#'));
        for (const auto& rule : rules_) {
            if (rule.template_id != template_id) continue;
            bool all = true;
            for (const auto& [var, substr] : rule.contains)
                if (prompt.find(substr) == std::string::npos) all = false;
            if (!all) continue;
            size_t i = std::min(rule.next, rule.responses.size() - 1);
            ++rule.next;
            return rule.responses[i];
        }
        throw GatewayError("mock backend has no script for key '" + key + "'");
    }

private:
    static std::string extract_trailer(const std::string& prompt,
                                       const std::string& marker) {
        size_t pos = prompt.rfind(marker);
        if (pos == std::string::npos) return "";
        size_t start = pos + marker.size();
        size_t end = prompt.find('\n', start);
        return prompt.substr(start, end == std::string::npos ? std::string::npos
                                                             : end - start);
    }

    std::mutex mutex_;
    std::map<std::string, std::string> exact_;
    std::vector<SubstringRule> rules_;
};

struct GatewayConfig {
    BackendProfile profile = mock_profile();
    std::string model;
    int max_parallel = 4;
    std::string transcript_path;  // JSON-lines, appended per call
    bool embed_mock_key = true;   // trailer used by MockBackend lookups
};

inline ImageBuffer resize_longest_side(const ImageBuffer& img, int target) {
    int longest = std::max(img.width, img.height);
    if (longest == target) return img;
    double factor = static_cast<double>(target) / longest;
    int w = std::max(1, static_cast<int>(std::lround(img.width * factor)));
    int h = std::max(1, static_cast<int>(std::lround(img.height * factor)));
    ImageBuffer out(w, h);
    out.label = img.label;
    for (int y = 0; y < h; ++y) {
        int sy = std::min(img.height - 1,
                          static_cast<int>(static_cast<double>(y) * img.height / h));
        for (int x = 0; x < w; ++x) {
            int sx = std::min(img.width - 1,
                              static_cast<int>(static_cast<double>(x) * img.width / w));
            out.set(x, y, img.at(sx, sy));
        }
    }
    return out;
}

// Side-by-side pairing with burned-in names, repeated until the count
// fits the backend's cap.
inline std::vector<ImageBuffer> concat_for_small_backend(
    std::vector<ImageBuffer> images, int cap) {
    while (static_cast<int>(images.size()) > cap) {
        std::vector<ImageBuffer> next;
        for (size_t i = 0; i + 1 < images.size(); i += 2) {
            const ImageBuffer& a = images[i];
            const ImageBuffer& b = images[i + 1];
            int h = std::max(a.height, b.height);
            ImageBuffer merged(a.width + b.width, h, {255, 255, 255, 255});
            for (int y = 0; y < a.height; ++y)
                for (int x = 0; x < a.width; ++x)
                    merged.set(x, y, a.at(x, y));
            for (int y = 0; y < b.height; ++y)
                for (int x = 0; x < b.width; ++x)
                    merged.set(a.width + x, y, b.at(x, y));
            draw_text(merged, 2, 2, a.label, {0, 0, 0, 255});
            draw_text(merged, a.width + 2, 2, b.label, {0, 0, 0, 255});
            merged.label = a.label + "+" + b.label;
            next.push_back(std::move(merged));
        }
        if (images.size() % 2 == 1) next.push_back(images.back());
        images = std::move(next);
    }
    return images;
}

inline std::optional<Json> extract_fenced_json(const std::string& text) {
    size_t fence = text.find("```json");
    size_t start;
    if (fence != std::string::npos) {
        start = fence + 7;
    } else {
        fence = text.find("```");
        if (fence == std::string::npos) {
            Json direct = Json::parse(text, nullptr, false);
            if (direct.is_discarded()) return std::nullopt;
            return direct;
        }
        start = fence + 3;
    }
    size_t end = text.find("```", start);
    std::string block = text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    Json parsed = Json::parse(block, nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

// Single abstraction for all model calls: templating, image prep,
// bounded retries with a repair suffix, a concurrency ceiling, and a
// transcript per completed call.
class ModelGateway {
public:
    ModelGateway(std::shared_ptr<Backend> backend, GatewayConfig config = {})
        : backend_(std::move(backend)), config_(std::move(config)) {}

    Json chat(const ChatRequest& request) {
        const PromptTemplate& tmpl = require_template(request.template_id);
        if (tmpl.expects_images && request.images.empty())
            throw PreconditionError("template '" + tmpl.id +
                                    "' expects images but none were attached");
        if (!tmpl.expects_images && !request.images.empty())
            throw PreconditionError("template '" + tmpl.id +
                                    "' does not take images");
        if (request.max_attempts < 1)
            throw PreconditionError("max_attempts must be >= 1");

        std::string prompt = render_template(tmpl, request.variables);
        if (config_.embed_mock_key)
            prompt += "\nMOCK-KEY: " +
                      mock_key(request.template_id, request.variables) + "\n";

        std::vector<ImageBuffer> images;
        for (const auto& img : request.images)
            images.push_back(
                resize_longest_side(img, config_.profile.image_target_px));
        if (config_.profile.image_cap &&
            static_cast<int>(images.size()) > *config_.profile.image_cap)
            images = concat_for_small_backend(std::move(images),
                                              *config_.profile.image_cap);

        auto t0 = std::chrono::steady_clock::now();
        std::string attempt_prompt = prompt;
        std::string raw;
        std::optional<Json> parsed;
        int attempt = 0;
        std::string last_transport_error;
        while (attempt < request.max_attempts) {
            ++attempt;
            try {
                ConcurrencyTicket ticket(*this);
                raw = backend_->complete(attempt_prompt, images,
                                         request.temperature);
            } catch (const GatewayError&) {
                throw;  // unscripted mock keys are bugs, not transport noise
            } catch (const std::exception& e) {
                last_transport_error = e.what();
                continue;
            }
            parsed = extract_fenced_json(raw);
            if (parsed) break;
            attempt_prompt = prompt + kRepairSuffix;
        }
        double latency =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - t0)
                .count();
        if (!parsed && !last_transport_error.empty() && raw.empty())
            throw GatewayError("backend transport failed after " +
                               std::to_string(attempt) + " attempts: " +
                               last_transport_error);

        Transcript transcript{request.template_id, prompt, request.variables,
                              static_cast<int>(images.size()), raw,
                              parsed.value_or(Json()), latency, attempt};
        record(transcript);
        if (!parsed)
            throw ParseError("no parseable answer block after " +
                             std::to_string(attempt) + " attempts for '" +
                             request.template_id + "'");
        return *parsed;
    }

    const std::vector<Transcript>& transcripts() const { return transcripts_; }

    int peak_concurrency() const { return peak_in_flight_; }

    void write_transcripts(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write '" + path + "'");
        std::lock_guard<std::mutex> lock(mutex_);
        for (const auto& t : transcripts_) {
            Json j;
            j["template_id"] = t.template_id;
            j["variables"] = t.variables;
            j["image_count"] = t.image_count;
            j["raw_response"] = t.raw_response;
            j["parsed"] = t.parsed;
            j["attempts"] = t.attempts;
            out << j.dump() << "\n";
        }
    }

    const GatewayConfig& config() const { return config_; }

private:
    // RAII slot in the in-flight window; blocks when the ceiling is hit.
    class ConcurrencyTicket {
    public:
        explicit ConcurrencyTicket(ModelGateway& gw) : gw_(gw) {
            std::unique_lock<std::mutex> lock(gw_.mutex_);
            gw_.slot_available_.wait(lock, [&] {
                return gw_.in_flight_ < gw_.config_.max_parallel;
            });
            ++gw_.in_flight_;
            gw_.peak_in_flight_ = std::max(gw_.peak_in_flight_, gw_.in_flight_);
        }
        ~ConcurrencyTicket() {
            {
                std::lock_guard<std::mutex> lock(gw_.mutex_);
                --gw_.in_flight_;
            }
            gw_.slot_available_.notify_one();
        }

    private:
        ModelGateway& gw_;
    };

    void record(const Transcript& transcript) {
        std::lock_guard<std::mutex> lock(mutex_);
        transcripts_.push_back(transcript);
        if (!config_.transcript_path.empty()) {
            std::ofstream out(config_.transcript_path, std::ios::app);
            Json j;
            j["template_id"] = transcript.template_id;
            j["attempts"] = transcript.attempts;
            j["image_count"] = transcript.image_count;
            j["raw_response"] = transcript.raw_response;
            out << j.dump() << "\n";
        }
    }

    std::shared_ptr<Backend> backend_;
    GatewayConfig config_;
    mutable std::mutex mutex_;
    std::condition_variable slot_available_;
    int in_flight_ = 0;
    int peak_in_flight_ = 0;
    std::vector<Transcript> transcripts_;
};

}  // namespace scenejudge
