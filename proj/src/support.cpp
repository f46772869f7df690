#include "support.hpp"

#include <array>
#include <charconv>
#include <set>
#include <vector>

#include "lexdiff/errors.hpp"

namespace lexdiff::detail {
namespace {

class DuplicateKeyScanner : public nlohmann::json_sax<json> {
 public:
  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }

  bool start_object(std::size_t) override {
    auto segment = child_segment();
    frames_.push_back({true, {}, 0, {}, std::move(segment)});
    return true;
  }
  bool key(string_t& name) override {
    auto& top = frames_.back();
    if (!top.keys.insert(name).second) {
      duplicate_ = pointer() + "/" + name;
      return false;
    }
    top.pending_key = name;
    return true;
  }
  bool end_object() override {
    frames_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    auto segment = child_segment();
    frames_.push_back({false, {}, 0, {}, std::move(segment)});
    return true;
  }
  bool end_array() override {
    frames_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

  const std::optional<std::string>& duplicate() const { return duplicate_; }

 private:
  struct Frame {
    bool is_object;
    std::set<std::string> keys;
    std::size_t next_index;
    std::string pending_key;
    std::string segment;
  };

  bool value() {
    child_segment();
    return true;
  }

  std::string child_segment() {
    if (frames_.empty()) return {};
    auto& top = frames_.back();
    if (top.is_object) return top.pending_key;
    return std::to_string(top.next_index++);
  }

  std::string pointer() const {
    std::string out;
    for (std::size_t i = 1; i < frames_.size(); ++i) out += "/" + frames_[i].segment;
    return out;
  }

  std::vector<Frame> frames_;
  std::optional<std::string> duplicate_;
};

}  // namespace

std::optional<std::string> first_duplicate_key(std::string_view text) {
  DuplicateKeyScanner scanner;
  json::sax_parse(text.begin(), text.end(), &scanner);
  return scanner.duplicate();
}

json parse_strict(std::string_view text, std::string_view what) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (auto dup = first_duplicate_key(text)) {
    throw SchemaError(std::string(what) + ": duplicate key at " + *dup);
  }
  return doc;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), end);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

}  // namespace lexdiff::detail
