#include "tokaudit/coverage_diag.hpp"

#include "tokaudit/errors.hpp"

namespace tokaudit {

namespace {

bool has_surface_form(const TokenizerModel& model, char32_t cp) {
    std::string raw = uni::encode_utf8(cp);
    if (model.vocab.count(raw)) return true;
    if (!model.continuation_prefix.empty() &&
        model.vocab.count(model.continuation_prefix + raw)) {
        return true;
    }
    if (!model.boundary_marker.empty() && model.vocab.count(model.boundary_marker + raw)) {
        return true;
    }
    if (model.kind == TokKind::ByteBPE) {
        const ByteRemapTable& remap = ByteRemapTable::standard();
        if (model.vocab.count(remap.render(raw))) return true;
        // The space-prefixed form is the byte-level analogue of a boundary
        // marker.
        if (model.vocab.count(remap.render(" " + raw))) return true;
    }
    return false;
}

bool is_continuation_byte(unsigned char b) {
    return (b & 0xC0) == 0x80;
}

// True when `bytes` is a strict prefix/suffix/infix of a single codepoint's
// UTF-8 encoding: either all continuation bytes, or an incomplete lead +
// continuations.
bool is_char_fragment(std::string_view bytes) {
    if (bytes.empty() || bytes.size() >= 4) return false;
    bool all_continuation = true;
    for (unsigned char b : bytes) {
        if (!is_continuation_byte(b)) {
            all_continuation = false;
            break;
        }
    }
    if (all_continuation) return true;

    unsigned char lead = static_cast<unsigned char>(bytes[0]);
    size_t seq_len;
    if ((lead & 0xE0) == 0xC0) {
        seq_len = 2;
    } else if ((lead & 0xF0) == 0xE0) {
        seq_len = 3;
    } else if ((lead & 0xF8) == 0xF0) {
        seq_len = 4;
    } else {
        return false;
    }
    if (bytes.size() >= seq_len) return false;
    for (size_t i = 1; i < bytes.size(); ++i) {
        if (!is_continuation_byte(static_cast<unsigned char>(bytes[i]))) return false;
    }
    return true;
}

} // namespace

CoverageResult missing_char_proportion(const TokenizerModel& model,
                                       const LanguageProfile& profile) {
    std::vector<char32_t> universe = char_set(profile);
    if (universe.empty()) {
        throw ArgumentError("coverage(" + profile.code + "): empty character universe");
    }
    CoverageResult result;
    result.code = profile.code;
    result.total = universe.size();
    for (char32_t cp : universe) {
        if (!has_surface_form(model, cp)) {
            ++result.missing;
            result.missing_chars.push_back(cp);
        }
    }
    result.proportion =
        static_cast<double>(result.missing) / static_cast<double>(result.total);
    return result;
}

std::optional<std::string> detect_mojibake(std::string_view token_text) {
    std::vector<char32_t> cps;
    if (!uni::try_decode_utf8(token_text, cps)) return std::nullopt;
    if (cps.empty()) return std::nullopt;

    const ByteRemapTable& remap = ByteRemapTable::standard();
    std::string bytes;
    bytes.reserve(cps.size());
    for (char32_t cp : cps) {
        if (cp <= 0xFF) {
            bytes.push_back(static_cast<char>(cp));
            continue;
        }
        int b = remap.inverse(cp);
        if (b < 0) return std::nullopt;
        bytes.push_back(static_cast<char>(b));
    }

    std::vector<char32_t> decoded;
    if (!uni::try_decode_utf8(bytes, decoded)) return std::nullopt;
    bool multibyte = false;
    for (char32_t cp : decoded) {
        if (cp >= 0x80) {
            multibyte = true;
            break;
        }
    }
    if (!multibyte) return std::nullopt;
    return bytes;
}

std::vector<TokenInspection> inspect(const TokenizerModel& model, std::string_view text) {
    TokenSeq seq = tokenize(model, text);
    const ByteRemapTable& remap = ByteRemapTable::standard();

    std::vector<TokenInspection> records;
    records.reserve(seq.tokens.size());
    for (size_t i = 0; i < seq.tokens.size(); ++i) {
        TokenInspection rec;
        rec.token = seq.tokens[i];
        rec.id = seq.ids[i];
        if (model.kind == TokKind::ByteBPE) {
            rec.raw_bytes = remap.unrender(rec.token);
        } else {
            rec.raw_bytes = rec.token;
        }
        rec.recovered = detect_mojibake(rec.token);
        rec.mojibake_suspect = rec.recovered.has_value();
        rec.fragment_of_char = is_char_fragment(rec.raw_bytes);
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace tokaudit
