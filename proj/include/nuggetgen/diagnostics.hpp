#pragma once

#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace nuggetgen {

// Structured record of a recoverable failure somewhere in the pipeline.
struct Diagnostic {
  std::string query_id;
  std::string passage_id;  // empty when not passage-scoped
  std::string kind;        // e.g. "unbalanced-tags", "ungrounded-span"
  std::string detail;
};

class DiagnosticLog {
 public:
  void add(Diagnostic d);
  void add(std::string query_id, std::string passage_id, std::string kind, std::string detail);

  std::vector<Diagnostic> records() const;
  std::size_t count(std::string_view kind) const;
  std::size_t size() const;

  // Echo records to stderr as they arrive (off by default).
  void set_echo(bool echo) { echo_ = echo; }

 private:
  mutable std::mutex mu_;
  std::vector<Diagnostic> records_;
  bool echo_ = false;
};

}  // namespace nuggetgen
