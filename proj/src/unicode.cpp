#include "tokaudit/unicode.hpp"

#include "tokaudit/errors.hpp"

#include <algorithm>
#include <array>
#include <cstddef>

namespace tokaudit::uni {

namespace {

struct CaseMap {
    char32_t from;
    char32_t to;
};

struct DecompEntry {
    char32_t cp;
    uint32_t offset;
    uint8_t len;
};

struct CccEntry {
    char32_t cp;
    uint8_t ccc;
};

struct CompPair {
    char32_t a;
    char32_t b;
    char32_t c;
};

struct PunctRange {
    char32_t lo;
    char32_t hi;
};

#include "generated/unicode_tables.inc"

char32_t key_of(const CaseMap& e) { return e.from; }
char32_t key_of(const DecompEntry& e) { return e.cp; }
char32_t key_of(const CccEntry& e) { return e.cp; }

template <typename Entry, size_t N>
const Entry* table_find(const Entry (&table)[N], char32_t cp) {
    auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                               [](const Entry& e, char32_t key) { return key_of(e) < key; });
    if (it != std::end(table) && key_of(*it) == cp) return it;
    return nullptr;
}

// Hangul syllable composition/decomposition is algorithmic.
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

bool is_hangul_syllable(char32_t cp) {
    return cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount;
}

uint8_t ccc(char32_t cp) {
    const CccEntry* e = table_find(kCccTable, cp);
    return e ? e->ccc : 0;
}

void decompose_cp(char32_t cp, bool compat, std::vector<char32_t>& out) {
    if (is_hangul_syllable(cp)) {
        int s = static_cast<int>(cp - kHangulSBase);
        out.push_back(kHangulLBase + s / kHangulNCount);
        out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
        int t = s % kHangulTCount;
        if (t > 0) out.push_back(kHangulTBase + t);
        return;
    }
    // Pool entries are fully recursive expansions, so no further lookup is
    // needed; kNfkdTable holds only codepoints whose NFKD differs from NFD.
    const DecompEntry* e = nullptr;
    if (compat) e = table_find(kNfkdTable, cp);
    if (!e) e = table_find(kNfdTable, cp);
    if (!e) {
        out.push_back(cp);
        return;
    }
    for (uint32_t i = 0; i < e->len; ++i) out.push_back(kDecompPool[e->offset + i]);
}

// Canonical ordering: stable sort of combining marks by class.
void canonical_order(std::vector<char32_t>& cps) {
    for (size_t i = 1; i < cps.size(); ++i) {
        uint8_t cc = ccc(cps[i]);
        if (cc == 0) continue;
        size_t j = i;
        while (j > 0 && ccc(cps[j - 1]) > cc) {
            std::swap(cps[j - 1], cps[j]);
            --j;
        }
    }
}

std::optional<char32_t> compose_pair(char32_t a, char32_t b) {
    // Hangul LV and LVT composition.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount && b >= kHangulVBase &&
        b < kHangulVBase + kHangulVCount) {
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (is_hangul_syllable(a) && (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
        b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    auto it = std::lower_bound(std::begin(kCompTable), std::end(kCompTable), std::pair(a, b),
                               [](const CompPair& e, const std::pair<char32_t, char32_t>& key) {
                                   return e.a != key.first ? e.a < key.first : e.b < key.second;
                               });
    if (it != std::end(kCompTable) && it->a == a && it->b == b) return it->c;
    return std::nullopt;
}

void compose(std::vector<char32_t>& cps) {
    if (cps.empty()) return;
    std::vector<char32_t> out;
    out.reserve(cps.size());
    // Index of the last starter in `out`, or npos if none seen yet. Because
    // the input is canonically ordered, a character is unblocked from that
    // starter iff it is adjacent to it, or it is a combining mark with a
    // class strictly above the last emitted one.
    size_t starter = std::string::npos;
    int last_ccc = -1;
    for (char32_t cp : cps) {
        uint8_t cc = ccc(cp);
        if (starter != std::string::npos) {
            bool adjacent = out.size() == starter + 1;
            bool unblocked = adjacent || (cc > 0 && last_ccc < static_cast<int>(cc));
            if (unblocked) {
                if (auto merged = compose_pair(out[starter], cp)) {
                    out[starter] = *merged;
                    continue;
                }
            }
        }
        if (cc == 0) starter = out.size();
        last_ccc = cc;
        out.push_back(cp);
    }
    cps = std::move(out);
}

} // namespace

bool is_scalar(char32_t cp) {
    return cp <= kMaxCodepoint && !(cp >= 0xD800 && cp <= 0xDFFF);
}

int utf8_length(char32_t cp) {
    if (cp < 0x80) return 1;
    if (cp < 0x800) return 2;
    if (cp < 0x10000) return 3;
    return 4;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::string encode_utf8(char32_t cp) {
    std::string out;
    append_utf8(out, cp);
    return out;
}

bool try_decode_utf8(std::string_view s, std::vector<char32_t>& out, size_t* error_offset) {
    out.clear();
    out.reserve(s.size());
    size_t i = 0;
    const auto fail = [&](size_t at) {
        if (error_offset) *error_offset = at;
        return false;
    };
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len;
        char32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return fail(i);
        }
        if (i + len > s.size()) return fail(i);
        for (int k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) return fail(i + k);
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMinByLen[len]) return fail(i); // overlong
        if (!is_scalar(cp)) return fail(i);
        out.push_back(cp);
        i += len;
    }
    return true;
}

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    size_t off = 0;
    if (!try_decode_utf8(s, out, &off)) {
        throw EncodingError("invalid UTF-8 at byte offset " + std::to_string(off), off);
    }
    return out;
}

bool is_valid_utf8(std::string_view s, size_t* error_offset) {
    std::vector<char32_t> scratch;
    return try_decode_utf8(s, scratch, error_offset);
}

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_punctuation(char32_t cp) {
    auto it = std::upper_bound(std::begin(kPunctTable), std::end(kPunctTable), cp,
                               [](char32_t key, const PunctRange& r) { return key < r.lo; });
    if (it == std::begin(kPunctTable)) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

char32_t to_lower(char32_t cp) {
    const CaseMap* e = table_find(kLowerTable, cp);
    return e ? e->to : cp;
}

std::string lower_utf8(std::string_view s) {
    std::vector<char32_t> cps = decode_utf8(s);
    for (char32_t& cp : cps) cp = to_lower(cp);
    return encode_utf8(cps);
}

std::optional<NormForm> parse_norm_form(std::string_view name) {
    if (name == "none") return NormForm::None;
    if (name == "nfc") return NormForm::Nfc;
    if (name == "nfkc") return NormForm::Nfkc;
    return std::nullopt;
}

const char* norm_form_name(NormForm form) {
    switch (form) {
    case NormForm::None: return "none";
    case NormForm::Nfc: return "nfc";
    case NormForm::Nfkc: return "nfkc";
    }
    return "none";
}

std::string normalize(std::string_view s, NormForm form) {
    if (form == NormForm::None) return std::string(s);
    std::vector<char32_t> cps = decode_utf8(s);
    std::vector<char32_t> decomposed;
    decomposed.reserve(cps.size() * 2);
    for (char32_t cp : cps) decompose_cp(cp, form == NormForm::Nfkc, decomposed);
    canonical_order(decomposed);
    compose(decomposed);
    return encode_utf8(decomposed);
}

} // namespace tokaudit::uni
