#pragma once

#include "tokaudit/lang_registry.hpp"
#include "tokaudit/tok_engine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tokaudit {

// Share of a language's character universe that has no standalone token in
// a vocabulary, counting prefix/marker/byte-remap surface variants.
struct CoverageResult {
    std::string code;
    size_t missing = 0;
    size_t total = 0;
    double proportion = 0.0;
    std::vector<char32_t> missing_chars; // ascending, for diagnostics
};

// One tokenizer output token with its byte-level reading.
struct TokenInspection {
    std::string token;
    int64_t id = -1;
    std::string raw_bytes; // after remap inversion for byte-level models
    std::optional<std::string> recovered; // mojibake-decoded form
    bool fragment_of_char = false; // raw bytes are a strict slice of one codepoint
    bool mojibake_suspect = false; // recovery succeeded; original kept as-is
};

CoverageResult missing_char_proportion(const TokenizerModel& model,
                                       const LanguageProfile& profile);

// Latin-1/byte-remap reading of a token: maps each character back to a byte
// (codepoints <= U+00FF to their value, remapped printables via the inverse
// table) and reports the UTF-8 decoding when it is valid and contains at
// least one multi-byte character. Plain ASCII never fires.
std::optional<std::string> detect_mojibake(std::string_view token_text);

std::vector<TokenInspection> inspect(const TokenizerModel& model, std::string_view text);

} // namespace tokaudit
