#include "lexdiff/gateway.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "lexdiff/errors.hpp"
#include "support.hpp"

namespace lexdiff {

using detail::json;

namespace {

const std::regex& placeholder_pattern() {
  static const std::regex pattern(R"(\{\{([A-Z0-9_]+)\}\})");
  return pattern;
}

const std::map<std::string, PromptTemplate, std::less<>>& builtin_templates() {
  static const std::map<std::string, PromptTemplate, std::less<>> templates = [] {
    std::map<std::string, PromptTemplate, std::less<>> t;
    t["formalize"] = {"formalize", R"(You formalize legal provisions as decision trees.

Produce one rooted tree describing how a lawyer decides whether the provision
applies to a concrete case. Leaves are factual conditions. Every internal node
combines its children with exactly one of AND, OR, NAND, NOR. The root is the
legal consequence.

Answer with a single JSON document matching this schema and nothing else:
{{SCHEMA}}

Use tree_id "{{TREE_ID}}" and provision_id "{{PROVISION_ID}}".

Provision:
{{LAW_TEXT}}
)"};
    t["formalize_correction"] = {"formalize_correction", R"(Your previous answer was rejected:
{{ERROR}}

Return the corrected formalization as a single JSON document matching the
schema, with no commentary.
)"};
    t["matching"] = {"matching", R"(Several formalizations of the same legal provision follow. Group their
nodes into equivalence classes: nodes in one class express the same legal
concept. A class holds at most one node per formalization, and every node of
every formalization belongs to exactly one class (a class may be a
singleton).

Answer with a single JSON document matching this schema and nothing else:
{{SCHEMA}}

Use provision_id "{{PROVISION_ID}}".

Provision:
{{LAW_TEXT}}

Formalizations:
{{FORMALIZATIONS}}
)"};
    t["matching_correction"] = {"matching_correction", R"(Your previous matching was rejected:
{{ERROR}}

Return the corrected matching as a single JSON document, with no commentary.
)"};
    t["verbalize"] = {"verbalize", R"(Two formalizations of the same legal provision reach different conclusions
on a family of cases. Describe one concrete factual scenario from that family
so a legal expert can judge which formalization is right.

Provision:
{{LAW_TEXT}}

Formalization {{TREE_A}}:
{{FORMALIZATION_A}}

Formalization {{TREE_B}}:
{{FORMALIZATION_B}}

Stipulated facts (the scenario must make each one hold as stated):
{{STIPULATED_FACTS}}

Conditions left open (choose anything plausible):
{{OPEN_CONDITIONS}}

Where the formalizations diverge:
{{ROOT_CAUSES}}

Answer with a single JSON object:
{"scenario": str, "question": str, "conclusion_a": str, "conclusion_b": str,
 "stipulated_facts": [{"variable": str, "value": bool}]}
where stipulated_facts repeats every stipulated fact above by its variable id.
)"};
    t["verbalize_correction"] = {"verbalize_correction", R"(Your previous answer was rejected:
{{ERROR}}

Return the corrected JSON object with every field filled in, with no commentary.
)"};
    return t;
  }();
  return templates;
}

}  // namespace

std::set<std::string> PromptTemplate::required() const {
  std::set<std::string> out;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), placeholder_pattern());
       it != std::sregex_iterator(); ++it) {
    out.insert((*it)[1].str());
  }
  return out;
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::vector<std::string> missing;
  for (const auto& name : required()) {
    if (!bindings.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& name : missing) list += (list.empty() ? "" : ", ") + name;
    throw RenderError("template '" + this->name + "' has unbound placeholders: " + list);
  }
  std::string out;
  auto last = body.cbegin();
  for (auto it = std::sregex_iterator(body.begin(), body.end(), placeholder_pattern());
       it != std::sregex_iterator(); ++it) {
    out.append(last, body.cbegin() + it->position());
    out += bindings.at((*it)[1].str());
    last = body.cbegin() + it->position() + it->length();
  }
  out.append(last, body.cend());
  return out;
}

const PromptTemplate& default_template(std::string_view name) {
  const auto& all = builtin_templates();
  auto it = all.find(name);
  if (it == all.end()) throw ConfigError("no built-in template named '" + std::string(name) + "'");
  return it->second;
}

PromptTemplate load_template(const std::optional<std::filesystem::path>& dir, std::string_view name) {
  if (dir) {
    auto path = *dir / (std::string(name) + ".md");
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      return {std::string(name), body.str()};
    }
  }
  return default_template(name);
}

void GatewayConfig::validate() const {
  if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
    throw ConfigError("endpoint must be an http:// or https:// URL");
  }
  if (model.empty()) throw ConfigError("model must be set");
  if (token_env.empty()) throw ConfigError("token_env must name an environment variable");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!(timeout_seconds > 0)) throw ConfigError("timeout_seconds must be positive");
  if (max_concurrency == 0) throw ConfigError("max_concurrency must be positive");
}

GatewayConfig GatewayConfig::parse(std::string_view json_text) {
  json doc;
  try {
    doc = detail::parse_strict(json_text, "gateway config");
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
  if (!doc.is_object()) throw ConfigError("gateway config must be a JSON object");
  GatewayConfig c;
  try {
    c.endpoint = doc.value("endpoint", std::string{});
    c.model = doc.value("model", std::string{});
    c.token_env = doc.value("token_env", c.token_env);
    c.max_retries = doc.value("max_retries", c.max_retries);
    c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
    if (doc.contains("temperature") && !doc["temperature"].is_null()) c.temperature = doc["temperature"].get<double>();
    if (doc.contains("max_tokens") && !doc["max_tokens"].is_null()) c.max_tokens = doc["max_tokens"].get<int>();
    c.max_concurrency = doc.value("max_concurrency", c.max_concurrency);
    if (doc.contains("templates_dir")) c.templates_dir = doc["templates_dir"].get<std::string>();
    if (doc.contains("record_dir")) c.record_dir = doc["record_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("gateway config: ") + e.what());
  }
  c.validate();
  return c;
}

ReplayTransport::ReplayTransport(std::vector<Exchange> exchanges, bool strict)
    : exchanges_(std::move(exchanges)), strict_(strict) {}

ReplayTransport ReplayTransport::from_transcript(std::string_view transcript_json, bool strict) {
  json doc = detail::parse_strict(transcript_json, "transcript");
  std::vector<Exchange> exchanges;
  try {
    for (const auto& entry : doc.at("exchanges")) {
      exchanges.push_back({entry.at("request").dump(), entry.at("response").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("transcript: ") + e.what());
  }
  return ReplayTransport(std::move(exchanges), strict);
}

std::string ReplayTransport::post(const std::string& request_body) {
  requests_.push_back(request_body);
  if (next_ >= exchanges_.size()) throw TransportError("transcript exhausted");
  const auto& exchange = exchanges_[next_++];
  if (strict_ && json::parse(request_body) != json::parse(exchange.request)) {
    throw TransportError("request " + std::to_string(next_) + " differs from the recorded one");
  }
  return exchange.response;
}

std::string RecordingTransport::post(const std::string& request_body) {
  auto response = inner_->post(request_body);
  std::lock_guard lock(mutex_);
  exchanges_.push_back({request_body, response});
  return response;
}

std::string RecordingTransport::transcript() const {
  json entries = json::array();
  for (const auto& e : exchanges_) {
    entries.push_back({{"request", json::parse(e.request)}, {"response", e.response}});
  }
  return json{{"exchanges", std::move(entries)}}.dump(2) + "\n";
}

std::string chat_request_body(const GatewayConfig& config,
                              std::span<const std::pair<std::string, std::string>> messages) {
  json msgs = json::array();
  for (const auto& [role, content] : messages) msgs.push_back({{"role", role}, {"content", content}});
  json body{{"model", config.model}, {"messages", std::move(msgs)}};
  if (config.temperature) body["temperature"] = *config.temperature;
  if (config.max_tokens) body["max_tokens"] = *config.max_tokens;
  return body.dump();
}

std::string extract_content(std::string_view response_body) {
  json doc;
  try {
    doc = json::parse(response_body.begin(), response_body.end());
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw TransportError("response content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat response: ") + e.what());
  }
}

std::string strip_code_fences(std::string_view text) {
  auto trim = [](std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string_view{};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  auto body = trim(text);
  if (body.rfind("```", 0) == 0) {
    auto first_newline = body.find('\n');
    auto closing = body.rfind("```");
    if (first_newline != std::string_view::npos && closing > first_newline) {
      body = trim(body.substr(first_newline + 1, closing - first_newline - 1));
    }
  }
  return std::string(body);
}

Validator formalization_validator() {
  return [](const std::string& content) { parse_formalization(content); };
}

Validator matching_validator(std::vector<Formalization> formalizations) {
  return [trees = std::move(formalizations)](const std::string& content) { parse_matching(content, trees); };
}

Validator verbalization_validator(Assignment stipulated) {
  return [facts = std::move(stipulated)](const std::string& content) {
    json doc = detail::parse_strict(content, "verbalization");
    if (!doc.is_object()) throw SchemaError("verbalization must be a JSON object");
    for (const char* field : {"scenario", "question", "conclusion_a", "conclusion_b"}) {
      auto it = doc.find(field);
      if (it == doc.end() || !it->is_string()) {
        throw SchemaError(std::string("verbalization: '") + field + "' must be a string");
      }
    }
    if (doc["scenario"].get<std::string>().empty()) throw SchemaError("verbalization: empty scenario");
    auto list = doc.find("stipulated_facts");
    if (list == doc.end() || !list->is_array()) {
      throw SchemaError("verbalization: 'stipulated_facts' must be an array");
    }
    Assignment echoed;
    for (const auto& fact : *list) {
      if (!fact.is_object() || !fact.contains("variable") || !fact.contains("value") ||
          !fact["variable"].is_string() || !fact["value"].is_boolean()) {
        throw SchemaError("verbalization: malformed stipulated fact");
      }
      echoed[fact["variable"].get<std::string>()] = fact["value"].get<bool>();
    }
    if (echoed != facts) throw SchemaError("verbalization: stipulated_facts do not match the stipulated facts");
  };
}

class Gateway::Slot {
 public:
  explicit Slot(Gateway& g) : g_(g) {
    std::unique_lock lock(g_.mutex_);
    g_.cv_.wait(lock, [&] { return g_.in_flight_ < g_.config_.max_concurrency; });
    ++g_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(g_.mutex_);
      --g_.in_flight_;
    }
    g_.cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Gateway& g_;
};

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!transport_) throw ConfigError("gateway needs a transport");
}

StructuredResult Gateway::request_structured(const PromptTemplate& prompt, const Bindings& bindings,
                                             const Validator& validate, const PromptTemplate& correction) {
  std::vector<std::pair<std::string, std::string>> messages{{"user", prompt.render(bindings)}};
  {
    // Fail before sending anything if the correction prompt cannot render.
    Bindings probe = bindings;
    probe["ERROR"] = "";
    correction.render(probe);
  }

  StructuredResult result;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    std::string response;
    {
      Slot slot(*this);
      response = transport_->post(chat_request_body(config_, messages));
    }
    ++result.requests;
    std::string content = extract_content(response);
    std::string document = strip_code_fences(content);
    try {
      validate(document);
      result.document = std::move(document);
      return result;
    } catch (const Error& e) {
      last_error = e.what();
    } catch (const std::exception& e) {
      last_error = e.what();
    }
    Bindings correction_bindings = bindings;
    correction_bindings["ERROR"] = last_error;
    messages.emplace_back("assistant", content);
    messages.emplace_back("user", correction.render(correction_bindings));
  }
  throw ValidationExhausted("'" + prompt.name + "' failed validation after " +
                                std::to_string(result.requests) + " attempts: " + last_error,
                            result.requests);
}

Bindings verbalization_bindings(const Representative& rep, std::string_view provision_text, const Matching& m) {
  auto label = [&](const std::string& var) {
    auto it = rep.variable_labels.find(var);
    return it == rep.variable_labels.end() ? var : it->second;
  };
  std::string facts;
  for (const auto& [var, value] : rep.pi.fixed) {
    facts += "- [" + var + "] " + label(var) + ": " + (value ? "true" : "false") + "\n";
  }
  if (facts.empty()) facts = "(none: the formalizations disagree on every case)\n";
  std::string open;
  for (const auto& [var, text] : rep.variable_labels) {
    if (!rep.pi.fixed.count(var)) open += "- [" + var + "] " + text + "\n";
  }
  if (open.empty()) open = "(none)\n";
  std::string causes;
  for (const auto& cause : rep.root_causes) {
    causes += "- [" + cause.ec_id + "] " + ec_label(m, cause.ec_id);
    if (cause.true_tree) causes += " (holds for " + *cause.true_tree + ")";
    causes += "\n";
  }
  if (causes.empty()) causes = "(not localized)\n";

  return {{"LAW_TEXT", std::string(provision_text)},
          {"TREE_A", rep.pi.pair.tree_a},
          {"TREE_B", rep.pi.pair.tree_b},
          {"FORMALIZATION_A", serialize(m.tree(rep.pi.pair.tree_a))},
          {"FORMALIZATION_B", serialize(m.tree(rep.pi.pair.tree_b))},
          {"STIPULATED_FACTS", facts},
          {"OPEN_CONDITIONS", open},
          {"ROOT_CAUSES", causes}};
}

Verbalization Gateway::verbalize(const Representative& rep, std::string_view provision_text, const Matching& m) {
  auto bindings = verbalization_bindings(rep, provision_text, m);
  auto prompt = load_template(config_.templates_dir, "verbalize");
  auto correction = load_template(config_.templates_dir, "verbalize_correction");
  auto result = request_structured(prompt, bindings, verbalization_validator(rep.pi.fixed), correction);

  json doc = json::parse(result.document);
  Verbalization out;
  out.scenario = doc["scenario"].get<std::string>();
  out.question = doc["question"].get<std::string>();
  out.conclusion_a = doc["conclusion_a"].get<std::string>();
  out.conclusion_b = doc["conclusion_b"].get<std::string>();
  out.stipulated = rep.pi.fixed;
  out.requests = result.requests;
  return out;
}

}  // namespace lexdiff
