#pragma once

#include "tokaudit/unicode.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tokaudit {

enum class TokKind { ByteBPE, WordPiece, BoundaryGreedy };

const char* tok_kind_name(TokKind kind);

// Bijective byte -> printable codepoint map used by byte-level BPE. Every
// byte has a visible one-character form, so any input is tokenizable and
// token strings stay printable.
class ByteRemapTable {
public:
    // The standard table: printable Latin-1 bytes map to themselves, the 68
    // remaining bytes map to U+0100 + n in byte order (space becomes U+0120,
    // rendered as the familiar leading-dot prefix on word tokens).
    static const ByteRemapTable& standard();

    char32_t forward(uint8_t byte) const { return forward_[byte]; }
    // -1 when the codepoint is not a remapped byte form.
    int inverse(char32_t cp) const;

    // Raw bytes -> printable token text.
    std::string render(std::string_view bytes) const;
    // Printable token text -> raw bytes; throws DataError on undecodable
    // codepoints.
    std::string unrender(std::string_view token_text) const;
    bool try_unrender(std::string_view token_text, std::string& bytes_out) const;

private:
    ByteRemapTable();
    std::array<char32_t, 256> forward_{};
    std::unordered_map<char32_t, uint8_t> inverse_;
};

using MergeList = std::vector<std::pair<std::string, std::string>>;

struct TokenizerModel {
    TokKind kind = TokKind::ByteBPE;
    std::string name; // report label, defaults to the model file stem
    std::unordered_map<std::string, int64_t> vocab;
    MergeList merges;                        // ByteBPE; rank = list position
    std::string continuation_prefix = "##";  // WordPiece
    std::string boundary_marker = "▁";  // BoundaryGreedy
    std::string unk_token;
    std::unordered_set<std::string> specials; // excluded from counting
    bool lowercase = false;
    bool split_punctuation = false; // WordPiece: punctuation chars become words
    uni::NormForm normalize = uni::NormForm::None;

    // Derived at load/validate time.
    std::unordered_map<std::string, int32_t> merge_ranks; // key = pair_key(l, r)
    size_t max_token_cps = 0;

    int64_t id_of(const std::string& token) const; // -1 when absent
};

// Lookup key for a merge pair; token strings never contain NUL.
inline std::string pair_key(std::string_view left, std::string_view right) {
    std::string k;
    k.reserve(left.size() + right.size() + 1);
    k.append(left);
    k.push_back('\0');
    k.append(right);
    return k;
}

struct TokenSeq {
    std::vector<std::string> tokens;
    std::vector<int64_t> ids;
    size_t count = 0; // length excluding special tokens
};

// Validates all model invariants; fills derived fields. Throws FormatError /
// IntegrityError.
void finalize_model(TokenizerModel& model);

TokenizerModel load_tokenizer(const std::filesystem::path& path);
TokenizerModel parse_tokenizer(std::string_view text, std::string_view origin = "<tokenizer>");
std::string serialize_tokenizer(const TokenizerModel& model);

TokenSeq tokenize(const TokenizerModel& model, std::string_view text);
std::string detokenize(const TokenizerModel& model, const TokenSeq& seq);
std::string detokenize(const TokenizerModel& model, const std::vector<std::string>& tokens);

// Core merge loop, exposed for oracle testing: repeatedly merges the
// adjacent pair with the lowest rank; the leftmost occurrence wins ties at
// equal rank.
std::vector<std::string> apply_bpe(const MergeList& merges, std::vector<std::string> symbols);

// Greedy longest-prefix segmentation of a whitespace-free word; non-initial
// pieces carry the continuation prefix; unmatchable words map to [unk].
std::vector<std::string> wordpiece_match(const TokenizerModel& model, std::string_view word);

// Lossless whitespace-aware split for byte-level models: a single preceding
// space attaches to the following word; concatenating the pieces reproduces
// the input bytes exactly.
std::vector<std::string> pretokenize_bytes(std::string_view text);

} // namespace tokaudit
