#include "nuggetgen/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nuggetgen/text.hpp"

namespace nuggetgen {

namespace {

const std::pair<const char*, const char*> kBuiltinTemplates[] = {
#include "prompt_assets.inc"
};

}  // namespace

PromptLibrary PromptLibrary::builtin() {
  PromptLibrary lib;
  for (const auto& [name, text] : kBuiltinTemplates) {
    lib.templates_[name] = text;
  }
  return lib;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& override_dir) {
  PromptLibrary lib = builtin();
  if (override_dir.empty()) return lib;
  if (!std::filesystem::is_directory(override_dir)) {
    throw std::runtime_error("prompts: not a directory: " + override_dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(override_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::stringstream buffer;
    buffer << in.rdbuf();
    lib.templates_[entry.path().stem().string()] = buffer.str();
  }
  return lib;
}

const std::string& PromptLibrary::get(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw std::runtime_error("prompts: unknown template " + name);
  return it->second;
}

bool PromptLibrary::has(const std::string& name) const { return templates_.count(name) > 0; }

std::string PromptLibrary::digest() const {
  std::string all;
  for (const auto& [name, text] : templates_) {  // std::map iterates sorted
    all += name;
    all += '\x1e';
    all += text;
    all += '\x1e';
  }
  return content_digest(all);
}

}  // namespace nuggetgen
