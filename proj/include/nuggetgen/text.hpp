#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nuggetgen {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Lowercase, strip ASCII punctuation, split on whitespace. This exact rule is
// shared by the LSA term matrix, BM25 and the mock embedder so that scores
// computed from token counts are reproducible.
std::vector<std::string> tokenize(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

// Sentence segments, each keeping its trailing terminator run (. ! ?).
// Text without a terminator forms a final segment.
std::vector<std::string> split_sentences(std::string_view s);

std::string replace_all(std::string s, std::string_view from, std::string_view to);

// Replaces {name} placeholders; unknown placeholders are left untouched.
std::string render_template(std::string tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 1469598103934665603ULL);

// 32 hex chars built from two FNV-1a passes with different bases. Not
// cryptographic; used for cache keys and manifest digests.
std::string content_digest(std::string_view data);

}  // namespace nuggetgen
