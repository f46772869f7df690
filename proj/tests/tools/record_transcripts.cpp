// Regenerates the gateway transcripts under tests/fixtures/transcripts from
// scripted model answers. Usage: record_transcripts <output dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexdiff/errors.hpp"
#include "lexdiff/gateway.hpp"

namespace {

const char* kTree = R"({
  "tree_id": "t1",
  "provision_id": "vote",
  "root": "may_vote",
  "nodes": {
    "may_vote": {"label": "may vote", "operator": "AND", "children": ["adult", "resident"]},
    "adult": {"label": "is 18 or older", "operator": null, "children": []},
    "resident": {"label": "is resident", "operator": null, "children": []}
  }
})";

std::string chat_response(const std::string& content) {
  nlohmann::json r{{"id", "scripted"},
                   {"object", "chat.completion"},
                   {"choices", {{{"index", 0},
                                 {"message", {{"role", "assistant"}, {"content", content}}},
                                 {"finish_reason", "stop"}}}}};
  return r.dump();
}

void record(const std::filesystem::path& out, const std::string& name, std::vector<std::string> answers) {
  lexdiff::GatewayConfig config;
  config.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  config.model = "replay";
  config.max_retries = 2;
  std::size_t next = 0;
  auto scripted = std::make_shared<lexdiff::CallbackTransport>(
      [&](const std::string&) { return chat_response(answers.at(next++)); });
  auto recorder = std::make_shared<lexdiff::RecordingTransport>(scripted);
  lexdiff::Gateway gw(config, recorder);
  const lexdiff::Bindings bindings{
      {"LAW_TEXT", "A person who is 18 or older and resident may vote."},
      {"SCHEMA", "{\"tree_id\": str, \"provision_id\": str, \"root\": str, \"nodes\": {}}"},
      {"TREE_ID", "t1"},
      {"PROVISION_ID", "vote"}};
  try {
    gw.request_structured(lexdiff::default_template("formalize"), bindings, lexdiff::formalization_validator(),
                          lexdiff::default_template("formalize_correction"));
  } catch (const lexdiff::ValidationExhausted&) {
  }
  std::ofstream(out / (name + ".json")) << recorder->transcript();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: record_transcripts <output dir>\n";
    return 2;
  }
  const std::filesystem::path out = argv[1];
  const std::string fenced = std::string("```json\n") + kTree + "\n```";
  const std::string cyclic = R"({"tree_id": "t1", "provision_id": "vote", "root": "a", "nodes": {
    "a": {"label": "a", "operator": "AND", "children": ["b"]},
    "b": {"label": "b", "operator": "OR", "children": ["a"]}}})";
  record(out, "valid_first_try", {fenced});
  record(out, "correction_retry", {"Here is the tree you asked for: {tree_id: t1", kTree});
  record(out, "exhausted", {"I cannot help with that.", cyclic, R"({"tree_id": "t1"})"});
  return 0;
}
