#include "nuggetgen/diagnostics.hpp"

#include <iostream>

namespace nuggetgen {

void DiagnosticLog::add(Diagnostic d) {
  std::lock_guard<std::mutex> lock(mu_);
  if (echo_) {
    std::cerr << "[diag] query=" << d.query_id << " passage=" << d.passage_id
              << " kind=" << d.kind << " " << d.detail << "\n";
  }
  records_.push_back(std::move(d));
}

void DiagnosticLog::add(std::string query_id, std::string passage_id, std::string kind,
                        std::string detail) {
  add(Diagnostic{std::move(query_id), std::move(passage_id), std::move(kind), std::move(detail)});
}

std::vector<Diagnostic> DiagnosticLog::records() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

std::size_t DiagnosticLog::count(std::string_view kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (const auto& record : records_) {
    if (record.kind == kind) ++n;
  }
  return n;
}

std::size_t DiagnosticLog::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

}  // namespace nuggetgen
