#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "cellforge/part_json.hpp"
#include "cellforge/render.hpp"

namespace cellforge
{
//! Instruction sent with every annotation request unless overridden.
inline constexpr std::string_view kDefaultPrompt =
    "You are shown a part or a set of parts from 4 different angles. Describe the 3D shape "
    "of the part(s) in one or more very short informal notes. Do not mention different "
    "views. Keep it insanely short. Do not write a full sentence.";

struct AnnotateConfig
{
    std::string url; //!< e.g. http://localhost:8080/annotate
    std::string model;
    std::string prompt{kDefaultPrompt};
    int timeout_ms = 30000;
    int retries = 2;
    int max_concurrent = 4;
    //! First retry delay; doubles on every further attempt.
    int backoff_ms = 250;
};

/*!
 * Thread-safe client for a vision-LLM annotation endpoint.
 *
 * Request: POST <url> with JSON {"model", "prompt", "images": [base64 PGM, ...]}
 * and, when CELLFORGE_API_KEY is set, "Authorization: Bearer <key>".
 * Response: JSON object whose "text" field is the annotation.
 *
 * 5xx replies and transport failures are retried with exponential backoff
 * up to `retries` times, then raise TransportError. Other non-2xx statuses
 * raise TransportError immediately; a 2xx reply without a string "text"
 * raises ProtocolError. At most `max_concurrent` requests are in flight.
 */
class AnnotationClient
{
  public:
    explicit AnnotationClient(AnnotateConfig cfg);
    ~AnnotationClient();
    AnnotationClient(const AnnotationClient&) = delete;
    AnnotationClient& operator=(const AnnotationClient&) = delete;

    std::string annotate(std::span<const ViewImage> images) const;
    const AnnotateConfig& config() const noexcept { return cfg_; }

  private:
    struct Gate;
    AnnotateConfig cfg_;
    std::unique_ptr<Gate> gate_;
};

//! One-shot convenience wrapper around AnnotationClient.
std::string annotate(std::span<const ViewImage> images, const AnnotateConfig& cfg);

//! The JSON body the client sends.
Json build_annotation_request(std::span<const ViewImage> images, const AnnotateConfig& cfg);

std::string base64_encode(std::string_view bytes);

} // namespace cellforge
