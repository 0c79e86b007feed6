#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace nuggetgen {

// Named prompt templates. The defaults are compiled in from the repository's
// assets/prompts/ directory; a directory of .txt overrides can replace any of
// them at runtime without a code change.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary load(const std::filesystem::path& override_dir);

  const std::string& get(const std::string& name) const;  // throws on unknown name
  bool has(const std::string& name) const;

  // Digest over all effective templates; changes when any asset changes.
  std::string digest() const;

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace nuggetgen
