#include "cellforge/annotate.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <openssl/evp.h>

#include "httplib.h"

#include "cellforge/error.hpp"

namespace cellforge
{
namespace
{
struct Endpoint
{
    std::string origin; // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw TransportError("annotation URL needs a scheme: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

struct AnnotationClient::Gate
{
    std::mutex mutex;
    std::condition_variable cv;
    int available;

    explicit Gate(int n) : available(n) {}

    void acquire()
    {
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return available > 0; });
        --available;
    }
    void release()
    {
        {
            std::lock_guard lock(mutex);
            ++available;
        }
        cv.notify_one();
    }
};

AnnotationClient::AnnotationClient(AnnotateConfig cfg)
    : cfg_(std::move(cfg)), gate_(std::make_unique<Gate>(std::max(1, cfg_.max_concurrent)))
{
    if (cfg_.retries < 0)
        throw std::invalid_argument("retries must be >= 0");
}

AnnotationClient::~AnnotationClient() = default;

std::string AnnotationClient::annotate(std::span<const ViewImage> images) const
{
    if (cfg_.url.empty())
        throw TransportError("no annotation endpoint configured (annotate.url)");
    const Endpoint ep = split_url(cfg_.url);
    const std::string body = build_annotation_request(images, cfg_).dump();

    httplib::Headers headers;
    if (const char* key = std::getenv("CELLFORGE_API_KEY"); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    gate_->acquire();
    struct Release
    {
        Gate& g;
        ~Release() { g.release(); }
    } release{*gate_};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt)
    {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<long long>(cfg_.backoff_ms) << std::min(attempt - 1, 20)));

        httplib::Client client(ep.origin);
        const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        auto res = client.Post(ep.path, headers, body, "application/json");
        if (!res)
        {
            last_error = "request failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500)
        {
            last_error = "server returned HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw TransportError("server returned HTTP " + std::to_string(res->status));

        Json reply;
        try
        {
            reply = Json::parse(res->body);
        }
        catch (const Json::parse_error&)
        {
            throw ProtocolError("annotation reply is not JSON");
        }
        if (!reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
            throw ProtocolError("annotation reply lacks a string \"text\" field");
        return reply["text"].get<std::string>();
    }
    throw TransportError(last_error + " (after " + std::to_string(cfg_.retries + 1) + " attempts)");
}

std::string annotate(std::span<const ViewImage> images, const AnnotateConfig& cfg)
{
    return AnnotationClient(cfg).annotate(images);
}

Json build_annotation_request(std::span<const ViewImage> images, const AnnotateConfig& cfg)
{
    Json encoded = Json::array();
    for (const auto& img : images)
        encoded.push_back(base64_encode(encode_pgm(img)));
    return {{"model", cfg.model}, {"prompt", cfg.prompt}, {"images", encoded}};
}

std::string base64_encode(std::string_view bytes)
{
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

} // namespace cellforge
