#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tokaudit::uni {

inline constexpr char32_t kMaxCodepoint = 0x10FFFF;

bool is_scalar(char32_t cp);

// Number of UTF-8 bytes needed for cp. cp must be a scalar value.
int utf8_length(char32_t cp);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);
std::string encode_utf8(char32_t cp);

// Strict UTF-8 decoding: rejects overlong forms, surrogates, values past
// U+10FFFF and truncated sequences. Returns false and the byte offset of the
// first offending byte on failure.
bool try_decode_utf8(std::string_view s, std::vector<char32_t>& out,
                     size_t* error_offset = nullptr);

// Throwing variant; raises EncodingError carrying the byte offset.
std::vector<char32_t> decode_utf8(std::string_view s);

bool is_valid_utf8(std::string_view s, size_t* error_offset = nullptr);

// ASCII whitespace used for pretokenization: space, \t, \n, \r, \v, \f.
bool is_ascii_space(unsigned char c);

// General-category P* (all punctuation classes).
bool is_punctuation(char32_t cp);

// Simple (1:1) Unicode lowercase mapping; codepoints without a single-char
// lowering are returned unchanged.
char32_t to_lower(char32_t cp);
std::string lower_utf8(std::string_view s);

enum class NormForm { None, Nfc, Nfkc };

std::optional<NormForm> parse_norm_form(std::string_view name);
const char* norm_form_name(NormForm form);

// Canonical (NFC) or compatibility (NFKC) normalization. None returns the
// input unchanged. Input must be valid UTF-8.
std::string normalize(std::string_view s, NormForm form);

} // namespace tokaudit::uni
