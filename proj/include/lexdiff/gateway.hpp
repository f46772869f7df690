#pragma once

#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexdiff/ec_graph.hpp"
#include "lexdiff/formal_model.hpp"
#include "lexdiff/triage.hpp"

namespace lexdiff {

using Bindings = std::map<std::string, std::string>;

/// Prompt text with `{{NAME}}` placeholders.
struct PromptTemplate {
  std::string name;
  std::string body;

  /// Placeholder names occurring in the body.
  std::set<std::string> required() const;
  /// Throws RenderError naming every unbound placeholder.
  std::string render(const Bindings& bindings) const;
};

/// Built-in templates: "formalize", "formalize_correction", "matching",
/// "matching_correction", "verbalize", "verbalize_correction".
const PromptTemplate& default_template(std::string_view name);
/// `dir/<name>.md` when present, otherwise the built-in template.
PromptTemplate load_template(const std::optional<std::filesystem::path>& dir, std::string_view name);

struct GatewayConfig {
  std::string endpoint;                   // full chat-completions URL
  std::string model;
  std::string token_env = "LEXDIFF_API_TOKEN";  // variable holding the bearer token
  int max_retries = 2;                    // correction rounds after the first attempt
  double timeout_seconds = 120.0;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::size_t max_concurrency = 4;
  std::optional<std::filesystem::path> templates_dir;
  std::optional<std::filesystem::path> record_dir;

  /// Throws ConfigError.
  void validate() const;
  static GatewayConfig parse(std::string_view json_text);
};

/// Sends one request body and returns the raw response body.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws TransportError.
  virtual std::string post(const std::string& request_body) = 0;
};

/// HTTP(S) POST to the configured endpoint with a bearer token from the
/// environment.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(GatewayConfig config);
  std::string post(const std::string& request_body) override;

 private:
  GatewayConfig config_;
};

/// Serves recorded responses in order. In strict mode each request must
/// equal the recorded one byte for byte.
class ReplayTransport : public Transport {
 public:
  struct Exchange {
    std::string request;
    std::string response;
  };

  explicit ReplayTransport(std::vector<Exchange> exchanges, bool strict = false);
  static ReplayTransport from_transcript(std::string_view transcript_json, bool strict = false);
  std::string post(const std::string& request_body) override;

  const std::vector<std::string>& requests() const { return requests_; }
  std::size_t remaining() const { return exchanges_.size() - next_; }

 private:
  std::vector<Exchange> exchanges_;
  std::size_t next_ = 0;
  bool strict_;
  std::vector<std::string> requests_;
};

/// Answers each request through a callback; handy for scripted mocks.
class CallbackTransport : public Transport {
 public:
  explicit CallbackTransport(std::function<std::string(const std::string&)> handler)
      : handler_(std::move(handler)) {}
  std::string post(const std::string& request_body) override { return handler_(request_body); }

 private:
  std::function<std::string(const std::string&)> handler_;
};

/// Forwards to another transport and keeps every exchange for writing out
/// as a transcript. Only bodies are kept, never headers.
class RecordingTransport : public Transport {
 public:
  explicit RecordingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  std::string post(const std::string& request_body) override;
  std::string transcript() const;

 private:
  std::shared_ptr<Transport> inner_;
  std::mutex mutex_;
  std::vector<ReplayTransport::Exchange> exchanges_;
};

/// Chat-completions request body for a message list.
std::string chat_request_body(const GatewayConfig& config,
                              std::span<const std::pair<std::string, std::string>> messages);
/// Assistant text of a chat-completions response. Throws TransportError.
std::string extract_content(std::string_view response_body);
/// Strips surrounding markdown code fences from model output.
std::string strip_code_fences(std::string_view text);

/// Checks model output; throws lexdiff::Error with a description on failure.
using Validator = std::function<void(const std::string& content)>;

Validator formalization_validator();
Validator matching_validator(std::vector<Formalization> formalizations);
Validator verbalization_validator(Assignment stipulated);

struct StructuredResult {
  std::string document;  // validated model output (fences stripped)
  int requests = 0;
};

struct Verbalization {
  std::string scenario;
  std::string question;
  std::string conclusion_a;
  std::string conclusion_b;
  Assignment stipulated;
  int requests = 0;
};

/// Chat client with schema validation and the correction-retry protocol.
class Gateway {
 public:
  Gateway(GatewayConfig config, std::shared_ptr<Transport> transport);

  /// Renders `prompt` and sends it; when the answer fails `validate`, sends
  /// `correction` (bound with {{ERROR}} and the original bindings) up to
  /// max_retries times. Throws ValidationExhausted when all attempts fail.
  StructuredResult request_structured(const PromptTemplate& prompt, const Bindings& bindings,
                                      const Validator& validate, const PromptTemplate& correction);

  Verbalization verbalize(const Representative& rep, std::string_view provision_text,
                          const Matching& m);

  const GatewayConfig& config() const { return config_; }

 private:
  class Slot;

  GatewayConfig config_;
  std::shared_ptr<Transport> transport_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
};

/// Prompt bindings used for verbalizing a representative.
Bindings verbalization_bindings(const Representative& rep, std::string_view provision_text,
                                const Matching& m);

}  // namespace lexdiff
