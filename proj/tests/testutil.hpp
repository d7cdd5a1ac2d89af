#pragma once

#include "tokaudit/tok_engine.hpp"
#include "tokaudit/unicode.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

namespace testutil {

// Scratch directory removed on scope exit.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("tokaudit_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_text(const std::filesystem::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// ByteBPE model over the full byte alphabet plus the given merges; merge
// results are added to the vocabulary automatically.
inline tokaudit::TokenizerModel make_byte_bpe(const tokaudit::MergeList& merges,
                                              const std::string& name = "toy_bpe") {
    using namespace tokaudit;
    TokenizerModel model;
    model.kind = TokKind::ByteBPE;
    model.name = name;
    const ByteRemapTable& remap = ByteRemapTable::standard();
    int64_t next_id = 0;
    for (int b = 0; b < 256; ++b) {
        model.vocab.emplace(uni::encode_utf8(remap.forward(static_cast<uint8_t>(b))), next_id++);
    }
    for (const auto& [l, r] : merges) {
        model.merges.emplace_back(l, r);
        std::string merged = l + r;
        if (!model.vocab.count(merged)) model.vocab.emplace(merged, next_id++);
    }
    finalize_model(model);
    return model;
}

// Random ByteBPE model grown the way a trainer would: each merge joins two
// existing vocabulary entries and registers the concatenation.
inline tokaudit::TokenizerModel random_byte_bpe(std::mt19937_64& rng, size_t n_merges,
                                                const std::string& name) {
    using namespace tokaudit;
    const ByteRemapTable& remap = ByteRemapTable::standard();
    std::vector<std::string> pool;
    pool.reserve(256 + n_merges);
    for (int b = 0; b < 256; ++b) {
        pool.push_back(uni::encode_utf8(remap.forward(static_cast<uint8_t>(b))));
    }
    MergeList merges;
    for (size_t i = 0; i < n_merges; ++i) {
        const std::string& l = pool[rng() % pool.size()];
        const std::string& r = pool[rng() % pool.size()];
        merges.emplace_back(l, r);
        pool.push_back(l + r);
    }
    return make_byte_bpe(merges, name);
}

inline tokaudit::TokenizerModel make_wordpiece(const std::vector<std::string>& tokens,
                                               const std::string& unk = "[UNK]",
                                               const std::string& name = "toy_wp") {
    using namespace tokaudit;
    TokenizerModel model;
    model.kind = TokKind::WordPiece;
    model.name = name;
    int64_t next_id = 0;
    for (const std::string& t : tokens) model.vocab.emplace(t, next_id++);
    if (!model.vocab.count(unk)) model.vocab.emplace(unk, next_id++);
    model.unk_token = unk;
    finalize_model(model);
    return model;
}

// Mixed-script codepoint pools for random text generation.
inline char32_t random_codepoint(std::mt19937_64& rng) {
    switch (rng() % 10) {
    case 0:
    case 1:
    case 2: return static_cast<char32_t>('a' + rng() % 26);
    case 3: return ' ';
    case 4: return static_cast<char32_t>(0x00C0 + rng() % 0x30); // Latin-1 letters
    case 5: return static_cast<char32_t>(0x0900 + rng() % 0x80); // Devanagari
    case 6: return static_cast<char32_t>(0x0600 + rng() % 0x100); // Arabic
    case 7: return static_cast<char32_t>(0x4E00 + rng() % 0x200); // CJK
    case 8: return static_cast<char32_t>(0x1F600 + rng() % 0x50); // emoji
    default: {
        char32_t cp = static_cast<char32_t>(rng() % 0x10FFFF);
        while (cp >= 0xD800 && cp <= 0xDFFF) cp = static_cast<char32_t>(rng() % 0x10FFFF);
        return cp;
    }
    }
}

inline std::string random_utf8(std::mt19937_64& rng, size_t max_cps) {
    size_t n = max_cps == 0 ? 0 : rng() % (max_cps + 1);
    std::string out;
    for (size_t i = 0; i < n; ++i) tokaudit::uni::append_utf8(out, random_codepoint(rng));
    return out;
}

// Independent BPE oracle: every round, scan all adjacent pairs, pick the one
// with the lowest rank (leftmost on ties) and merge that single occurrence.
inline std::vector<std::string> bpe_oracle(const tokaudit::MergeList& merges,
                                           std::vector<std::string> symbols) {
    auto rank_of = [&](const std::string& l, const std::string& r) -> int {
        for (size_t k = 0; k < merges.size(); ++k) {
            if (merges[k].first == l && merges[k].second == r) return static_cast<int>(k);
        }
        return -1;
    };
    while (symbols.size() >= 2) {
        int best_rank = -1;
        size_t best_pos = 0;
        for (size_t i = 0; i + 1 < symbols.size(); ++i) {
            int rank = rank_of(symbols[i], symbols[i + 1]);
            if (rank >= 0 && (best_rank < 0 || rank < best_rank)) {
                best_rank = rank;
                best_pos = i;
            }
        }
        if (best_rank < 0) break;
        symbols[best_pos] += symbols[best_pos + 1];
        symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
    }
    return symbols;
}

// Direct-formula Pearson oracle (naive single-pass sums).
inline double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    double dn = static_cast<double>(n);
    double cov = sxy - sx * sy / dn;
    double vx = sxx - sx * sx / dn;
    double vy = syy - sy * sy / dn;
    return cov / std::sqrt(vx * vy);
}

} // namespace testutil
