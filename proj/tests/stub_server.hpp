#pragma once

#include <atomic>
#include <deque>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"

namespace stub
{

//! Local annotation endpoint that plays back scripted replies.
class Server
{
  public:
    struct Reply
    {
        int status;
        std::string body;
    };

    //! Once the script runs out, `fallback` is served.
    explicit Server(std::vector<Reply> script, Reply fallback = {200, R"({"text":"ok"})"})
        : script_(script.begin(), script.end()), fallback_(std::move(fallback))
    {
        server_.Post("/annotate", [this](const httplib::Request& req, httplib::Response& res) {
            Reply r;
            {
                std::lock_guard lock(mutex_);
                bodies_.push_back(req.body);
                authorization_.push_back(req.get_header_value("Authorization"));
                if (script_.empty())
                    r = fallback_;
                else
                {
                    r = script_.front();
                    script_.pop_front();
                }
            }
            res.status = r.status;
            res.set_content(r.body, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~Server()
    {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/annotate"; }

    std::size_t hits() const
    {
        std::lock_guard lock(mutex_);
        return bodies_.size();
    }
    std::vector<std::string> bodies() const
    {
        std::lock_guard lock(mutex_);
        return bodies_;
    }
    std::vector<std::string> authorization() const
    {
        std::lock_guard lock(mutex_);
        return authorization_;
    }

  private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    mutable std::mutex mutex_;
    std::deque<Reply> script_;
    Reply fallback_;
    std::vector<std::string> bodies_;
    std::vector<std::string> authorization_;
};

} // namespace stub
