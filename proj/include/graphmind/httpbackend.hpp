#pragma once
// HTTP chat-completion backend. Posts
//   {model, messages: [{role, content}...],
//    options: {temperature, seed, top_k, num_predict}}
// to a configurable endpoint and reads the reply from message.content.
// Split from llmio.hpp so only the CLI and its tests pay for httplib.

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/llmio.hpp"

namespace graphmind {

class HttpBackend final : public LlmBackend {
public:
    HttpBackend(std::string endpoint_url, std::string model)
        : url_(std::move(endpoint_url)), model_(std::move(model)) {
        split_url(url_, base_, path_);
    }

    std::string complete(const RenderedRequest& request, const GenerationConfig& cfg) override {
        count_call();
        nlohmann::json body;
        body["model"] = model_;
        body["messages"] = nlohmann::json::array();
        if (!request.system.empty())
            body["messages"].push_back({{"role", "system"}, {"content", request.system}});
        body["messages"].push_back({{"role", "user"}, {"content", request.user}});
        if (!request.assistant_prefix.empty())
            body["messages"].push_back(
                {{"role", "assistant"}, {"content", request.assistant_prefix}});
        body["options"] = {{"temperature", cfg.temperature},
                           {"seed", cfg.seed},
                           {"top_k", cfg.top_k},
                           {"num_predict", cfg.max_tokens}};
        body["stream"] = false;

        httplib::Client client(base_);
        client.set_read_timeout(300, 0);
        auto res = client.Post(path_, body.dump(), "application/json");
        if (!res) throw Error(ErrorCode::BackendUnreachable, url_);
        if (res->status != 200)
            throw Error(ErrorCode::BackendError, "status " + std::to_string(res->status))
                .with_status(res->status);
        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("message") ||
            !reply["message"].contains("content"))
            throw Error(ErrorCode::BackendError, "malformed response body").with_status(200);
        return reply["message"]["content"].get<std::string>();
    }

    std::string id() const override { return "http:" + url_ + ":" + model_; }

private:
    static void split_url(const std::string& url, std::string& base, std::string& path) {
        auto scheme_end = url.find("://");
        size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
        auto slash = url.find('/', host_start);
        if (slash == std::string::npos) {
            base = url;
            path = "/";
        } else {
            base = url.substr(0, slash);
            path = url.substr(slash);
        }
    }

    std::string url_;
    std::string model_;
    std::string base_;
    std::string path_;
};

}  // namespace graphmind
