#include "nuggetgen/text.hpp"

#include <cctype>

namespace nuggetgen {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(s.substr(pos));
      break;
    }
    std::string_view line = s.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_sentence_end(s[i])) {
      while (i + 1 < s.size() && is_sentence_end(s[i + 1])) ++i;
      if (i + 1 == s.size() || is_space(s[i + 1])) {
        std::string sentence = trim(s.substr(start, i + 1 - start));
        if (!sentence.empty()) sentences.push_back(std::move(sentence));
        start = i + 1;
      }
    }
    ++i;
  }
  std::string rest = trim(s.substr(start));
  if (!rest.empty()) sentences.push_back(std::move(rest));
  return sentences;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string render_template(std::string tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values) {
  for (const auto& [name, value] : values) {
    tmpl = replace_all(std::move(tmpl), "{" + name + "}", value);
  }
  return tmpl;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string content_digest(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  const std::uint64_t a = fnv1a64(data);
  // Second pass over the data with a shifted basis, then mix in the length so
  // the two halves do not degenerate to the same function.
  const std::uint64_t b = fnv1a64(data, 0xcbf29ce484222325ULL ^ 0x9e3779b97f4a7c15ULL) ^
                          (static_cast<std::uint64_t>(data.size()) * 0x100000001b3ULL);
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[i] = hex[(a >> (60 - 4 * i)) & 0xF];
    out[16 + i] = hex[(b >> (60 - 4 * i)) & 0xF];
  }
  return out;
}

}  // namespace nuggetgen
