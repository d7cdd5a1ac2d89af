#include "tokaudit/tok_engine.hpp"

#include "tokaudit/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

using nlohmann::json;

namespace tokaudit {

const char* tok_kind_name(TokKind kind) {
    switch (kind) {
    case TokKind::ByteBPE: return "byte_bpe";
    case TokKind::WordPiece: return "wordpiece";
    case TokKind::BoundaryGreedy: return "boundary_greedy";
    }
    return "byte_bpe";
}

ByteRemapTable::ByteRemapTable() {
    std::array<bool, 256> printable{};
    for (int b = '!'; b <= '~'; ++b) printable[b] = true;
    for (int b = 0xA1; b <= 0xAC; ++b) printable[b] = true;
    for (int b = 0xAE; b <= 0xFF; ++b) printable[b] = true;
    char32_t next = 256;
    for (int b = 0; b < 256; ++b) {
        forward_[b] = printable[b] ? static_cast<char32_t>(b) : next++;
    }
    for (int b = 0; b < 256; ++b) inverse_.emplace(forward_[b], static_cast<uint8_t>(b));
}

const ByteRemapTable& ByteRemapTable::standard() {
    static const ByteRemapTable table;
    return table;
}

int ByteRemapTable::inverse(char32_t cp) const {
    auto it = inverse_.find(cp);
    return it == inverse_.end() ? -1 : it->second;
}

std::string ByteRemapTable::render(std::string_view bytes) const {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) uni::append_utf8(out, forward_[b]);
    return out;
}

bool ByteRemapTable::try_unrender(std::string_view token_text, std::string& bytes_out) const {
    bytes_out.clear();
    std::vector<char32_t> cps;
    if (!uni::try_decode_utf8(token_text, cps)) return false;
    for (char32_t cp : cps) {
        int b = inverse(cp);
        if (b < 0) return false;
        bytes_out.push_back(static_cast<char>(b));
    }
    return true;
}

std::string ByteRemapTable::unrender(std::string_view token_text) const {
    std::string bytes;
    if (!try_unrender(token_text, bytes)) {
        throw DataError("token text is not decodable under the byte remap: '" +
                        std::string(token_text) + "'");
    }
    return bytes;
}

int64_t TokenizerModel::id_of(const std::string& token) const {
    auto it = vocab.find(token);
    return it == vocab.end() ? -1 : it->second;
}

void finalize_model(TokenizerModel& model) {
    if (model.vocab.empty()) throw IntegrityError("tokenizer: empty vocabulary");

    std::unordered_set<int64_t> seen_ids;
    seen_ids.reserve(model.vocab.size());
    model.max_token_cps = 0;
    for (const auto& [token, id] : model.vocab) {
        if (!seen_ids.insert(id).second) {
            throw IntegrityError("tokenizer: duplicate id " + std::to_string(id) + " (token '" +
                                 token + "')");
        }
        size_t cps = uni::decode_utf8(token).size();
        model.max_token_cps = std::max(model.max_token_cps, cps);
    }

    if (model.kind != TokKind::ByteBPE) {
        if (!model.merges.empty()) {
            throw FormatError("tokenizer: merges are only valid for byte_bpe models");
        }
        if (model.unk_token.empty() || !model.vocab.count(model.unk_token)) {
            throw IntegrityError("tokenizer: unk token '" + model.unk_token +
                                 "' must be present in the vocabulary");
        }
    }

    model.merge_ranks.clear();
    for (size_t i = 0; i < model.merges.size(); ++i) {
        const auto& [left, right] = model.merges[i];
        if (left.empty() || right.empty()) {
            throw IntegrityError("tokenizer: merge " + std::to_string(i) + " has an empty side");
        }
        if (!model.vocab.count(left + right)) {
            throw IntegrityError("tokenizer: merge (" + left + ", " + right +
                                 ") concatenation is missing from the vocabulary");
        }
        // First occurrence wins; duplicate pairs keep the lower rank.
        model.merge_ranks.emplace(pair_key(left, right), static_cast<int32_t>(i));
    }

    for (const std::string& s : model.specials) {
        if (!model.vocab.count(s)) {
            throw IntegrityError("tokenizer: special token '" + s +
                                 "' is missing from the vocabulary");
        }
    }

    if (model.kind == TokKind::ByteBPE) {
        const ByteRemapTable& remap = ByteRemapTable::standard();
        for (int b = 0; b < 256; ++b) {
            std::string sym = uni::encode_utf8(remap.forward(static_cast<uint8_t>(b)));
            if (!model.vocab.count(sym)) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "0x%02X", b);
                throw IntegrityError(std::string("tokenizer: byte_bpe vocabulary lacks the "
                                                 "single-byte token for byte ") +
                                     buf);
            }
        }
    }
}

TokenizerModel parse_tokenizer(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(origin) + ": " + e.what());
    }
    if (!doc.is_object()) throw FormatError(std::string(origin) + ": expected a JSON object");

    TokenizerModel model;
    std::string kind = doc.value("kind", std::string());
    if (kind == "byte_bpe") {
        model.kind = TokKind::ByteBPE;
    } else if (kind == "wordpiece") {
        model.kind = TokKind::WordPiece;
    } else if (kind == "boundary_greedy") {
        model.kind = TokKind::BoundaryGreedy;
    } else {
        throw FormatError(std::string(origin) + ": unknown tokenizer kind '" + kind + "'");
    }

    if (!doc.contains("vocab") || !doc["vocab"].is_object()) {
        throw FormatError(std::string(origin) + ": missing 'vocab' object");
    }
    for (auto it = doc["vocab"].begin(); it != doc["vocab"].end(); ++it) {
        if (!it.value().is_number_integer() && !it.value().is_number_unsigned()) {
            throw FormatError(std::string(origin) + ": vocab id for '" + it.key() +
                              "' must be an integer");
        }
        model.vocab.emplace(it.key(), it.value().get<int64_t>());
    }

    if (doc.contains("merges")) {
        for (const json& m : doc["merges"]) {
            if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) {
                throw FormatError(std::string(origin) +
                                  ": each merge must be a [left, right] string pair");
            }
            model.merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
        }
    }

    model.unk_token = doc.value("unk_token", std::string());
    model.continuation_prefix = doc.value("continuation_prefix", std::string("##"));
    model.boundary_marker = doc.value("boundary_marker", std::string("▁"));
    model.lowercase = doc.value("lowercase", false);
    model.split_punctuation = doc.value("split_punctuation", false);
    if (doc.contains("specials")) {
        for (const json& s : doc["specials"]) {
            if (!s.is_string()) {
                throw FormatError(std::string(origin) + ": specials must be strings");
            }
            model.specials.insert(s.get<std::string>());
        }
    }
    std::string norm = doc.value("normalize", std::string("none"));
    auto form = uni::parse_norm_form(norm);
    if (!form) {
        throw FormatError(std::string(origin) + ": normalize must be 'none', 'nfc' or 'nfkc'");
    }
    model.normalize = *form;
    model.name = doc.value("name", std::string());

    finalize_model(model);
    return model;
}

TokenizerModel load_tokenizer(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tokenizer model: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    TokenizerModel model = parse_tokenizer(buf.str(), path.string());
    if (model.name.empty()) model.name = path.stem().string();
    return model;
}

std::string serialize_tokenizer(const TokenizerModel& model) {
    json doc;
    doc["kind"] = tok_kind_name(model.kind);
    if (!model.name.empty()) doc["name"] = model.name;
    json vocab = json::object();
    // Emit in id order for stable output.
    std::vector<std::pair<int64_t, const std::string*>> by_id;
    by_id.reserve(model.vocab.size());
    for (const auto& [tok, id] : model.vocab) by_id.emplace_back(id, &tok);
    std::sort(by_id.begin(), by_id.end());
    for (const auto& [id, tok] : by_id) vocab[*tok] = id;
    doc["vocab"] = std::move(vocab);
    if (!model.merges.empty()) {
        json merges = json::array();
        for (const auto& [l, r] : model.merges) merges.push_back(json::array({l, r}));
        doc["merges"] = std::move(merges);
    }
    if (!model.unk_token.empty()) doc["unk_token"] = model.unk_token;
    if (model.kind == TokKind::WordPiece) doc["continuation_prefix"] = model.continuation_prefix;
    if (model.kind == TokKind::BoundaryGreedy) doc["boundary_marker"] = model.boundary_marker;
    if (!model.specials.empty()) {
        std::vector<std::string> specials(model.specials.begin(), model.specials.end());
        std::sort(specials.begin(), specials.end());
        doc["specials"] = specials;
    }
    doc["lowercase"] = model.lowercase;
    if (model.split_punctuation) doc["split_punctuation"] = true;
    doc["normalize"] = uni::norm_form_name(model.normalize);
    return doc.dump(2) + "\n";
}

namespace {

// Merge engine: doubly-linked symbol list plus a lazily invalidated min-heap
// keyed by (rank, position of the left symbol). Node slots never move, and a
// merge keeps the left slot, so slot order always reflects sequence order.
struct HeapEntry {
    int32_t rank;
    int32_t pos;
    int32_t left;
    int32_t right;
    uint32_t left_gen;
    uint32_t right_gen;
};

struct HeapCompare {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.pos > b.pos;
    }
};

std::vector<std::string> run_merges(const std::unordered_map<std::string, int32_t>& ranks,
                                    std::vector<std::string> symbols) {
    if (symbols.size() < 2 || ranks.empty()) return symbols;

    const size_t n = symbols.size();
    std::vector<int32_t> prev(n), next(n);
    std::vector<uint32_t> gen(n, 0);
    std::vector<bool> alive(n, true);
    for (size_t i = 0; i < n; ++i) {
        prev[i] = static_cast<int32_t>(i) - 1;
        next[i] = i + 1 < n ? static_cast<int32_t>(i) + 1 : -1;
    }

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCompare> heap;
    auto push_pair = [&](int32_t l, int32_t r) {
        auto it = ranks.find(pair_key(symbols[l], symbols[r]));
        if (it != ranks.end()) heap.push({it->second, l, l, r, gen[l], gen[r]});
    };
    for (size_t i = 0; i + 1 < n; ++i) {
        push_pair(static_cast<int32_t>(i), static_cast<int32_t>(i + 1));
    }

    while (!heap.empty()) {
        HeapEntry e = heap.top();
        heap.pop();
        if (!alive[e.left] || !alive[e.right] || gen[e.left] != e.left_gen ||
            gen[e.right] != e.right_gen || next[e.left] != e.right) {
            continue;
        }
        symbols[e.left] += symbols[e.right];
        alive[e.right] = false;
        ++gen[e.left];
        next[e.left] = next[e.right];
        if (next[e.left] >= 0) prev[next[e.left]] = e.left;
        if (prev[e.left] >= 0) push_pair(prev[e.left], e.left);
        if (next[e.left] >= 0) push_pair(e.left, next[e.left]);
    }

    std::vector<std::string> out;
    out.reserve(n);
    for (int32_t i = 0; i >= 0; i = next[i]) {
        if (alive[i]) out.push_back(std::move(symbols[i]));
    }
    return out;
}

std::string preprocess(const TokenizerModel& model, std::string_view text) {
    std::string out = uni::normalize(text, model.normalize);
    if (model.lowercase) out = uni::lower_utf8(out);
    return out;
}

// Greedy longest vocab prefix starting at codepoint index `start` of `word`
// (`bounds` holds byte offsets per codepoint plus the end offset). `prefix`
// is prepended to every candidate. Returns matched codepoint count, 0 if
// none.
size_t longest_match(const TokenizerModel& model, std::string_view word,
                     const std::vector<size_t>& bounds, size_t start, std::string_view prefix,
                     std::string* matched) {
    size_t n_cps = bounds.size() - 1;
    size_t max_len = std::min(n_cps - start, model.max_token_cps);
    std::string candidate;
    for (size_t len = max_len; len >= 1; --len) {
        candidate.assign(prefix);
        candidate.append(word.substr(bounds[start], bounds[start + len] - bounds[start]));
        if (model.vocab.count(candidate)) {
            *matched = std::move(candidate);
            return len;
        }
    }
    return 0;
}

std::vector<size_t> cp_bounds(std::string_view s) {
    std::vector<size_t> bounds;
    size_t i = 0;
    while (i < s.size()) {
        bounds.push_back(i);
        unsigned char b = static_cast<unsigned char>(s[i]);
        if (b < 0x80) {
            i += 1;
        } else if ((b & 0xE0) == 0xC0) {
            i += 2;
        } else if ((b & 0xF0) == 0xE0) {
            i += 3;
        } else {
            i += 4;
        }
    }
    bounds.push_back(s.size());
    return bounds;
}

void emit_token(const TokenizerModel& model, std::string token, TokenSeq& seq) {
    seq.ids.push_back(model.id_of(token));
    if (!model.specials.count(token)) ++seq.count;
    seq.tokens.push_back(std::move(token));
}

void tokenize_byte_bpe(const TokenizerModel& model, std::string_view text, TokenSeq& seq) {
    const ByteRemapTable& remap = ByteRemapTable::standard();
    for (const std::string& piece : pretokenize_bytes(text)) {
        std::vector<std::string> symbols;
        symbols.reserve(piece.size());
        for (unsigned char b : piece) {
            symbols.push_back(uni::encode_utf8(remap.forward(b)));
        }
        for (std::string& sym : run_merges(model.merge_ranks, std::move(symbols))) {
            emit_token(model, std::move(sym), seq);
        }
    }
}

void match_word(const TokenizerModel& model, std::string_view word, TokenSeq& seq) {
    for (std::string& tok : wordpiece_match(model, word)) {
        emit_token(model, std::move(tok), seq);
    }
}

void tokenize_wordpiece(const TokenizerModel& model, std::string_view text, TokenSeq& seq) {
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && uni::is_ascii_space(text[i])) ++i;
        size_t start = i;
        while (i < text.size() && !uni::is_ascii_space(text[i])) ++i;
        if (i == start) continue;
        std::string_view chunk = text.substr(start, i - start);
        if (!model.split_punctuation) {
            match_word(model, chunk, seq);
            continue;
        }
        // every punctuation character becomes its own word
        std::vector<size_t> bounds = cp_bounds(chunk);
        std::vector<char32_t> cps = uni::decode_utf8(chunk);
        size_t word_start = 0;
        for (size_t c = 0; c < cps.size(); ++c) {
            if (!uni::is_punctuation(cps[c])) continue;
            if (bounds[c] > word_start) {
                match_word(model, chunk.substr(word_start, bounds[c] - word_start), seq);
            }
            match_word(model, chunk.substr(bounds[c], bounds[c + 1] - bounds[c]), seq);
            word_start = bounds[c + 1];
        }
        if (word_start < chunk.size()) match_word(model, chunk.substr(word_start), seq);
    }
}

void tokenize_boundary_greedy(const TokenizerModel& model, std::string_view text, TokenSeq& seq) {
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && uni::is_ascii_space(text[i])) ++i;
        size_t start = i;
        while (i < text.size() && !uni::is_ascii_space(text[i])) ++i;
        if (i == start) continue;

        std::string marked = model.boundary_marker + std::string(text.substr(start, i - start));
        std::vector<size_t> bounds = cp_bounds(marked);
        size_t n_cps = bounds.size() - 1;
        size_t pos = 0;
        while (pos < n_cps) {
            std::string matched;
            size_t len = longest_match(model, marked, bounds, pos, {}, &matched);
            if (len == 0) {
                // No vocabulary entry covers this position; fall back to the
                // unknown token for a single character.
                emit_token(model, model.unk_token, seq);
                pos += 1;
            } else {
                emit_token(model, std::move(matched), seq);
                pos += len;
            }
        }
    }
}

} // namespace

std::vector<std::string> pretokenize_bytes(std::string_view text) {
    std::vector<std::string> pieces;
    size_t i = 0;
    while (i < text.size()) {
        if (uni::is_ascii_space(text[i])) {
            size_t start = i;
            while (i < text.size() && uni::is_ascii_space(text[i])) ++i;
            // A single trailing space attaches to a following word.
            bool donate = i < text.size() && text[i - 1] == ' ';
            size_t end = donate ? i - 1 : i;
            if (end > start) pieces.emplace_back(text.substr(start, end - start));
            if (donate) {
                size_t word_start = i - 1;
                while (i < text.size() && !uni::is_ascii_space(text[i])) ++i;
                pieces.emplace_back(text.substr(word_start, i - word_start));
            }
        } else {
            size_t start = i;
            while (i < text.size() && !uni::is_ascii_space(text[i])) ++i;
            pieces.emplace_back(text.substr(start, i - start));
        }
    }
    return pieces;
}

std::vector<std::string> wordpiece_match(const TokenizerModel& model, std::string_view word) {
    std::vector<size_t> bounds = cp_bounds(word);
    size_t n_cps = bounds.size() - 1;
    std::vector<std::string> pieces;
    size_t pos = 0;
    while (pos < n_cps) {
        std::string matched;
        std::string_view prefix = pos == 0 ? std::string_view{} : model.continuation_prefix;
        size_t len = longest_match(model, word, bounds, pos, prefix, &matched);
        if (len == 0) return {model.unk_token};
        pieces.push_back(std::move(matched));
        pos += len;
    }
    return pieces;
}

std::vector<std::string> apply_bpe(const MergeList& merges, std::vector<std::string> symbols) {
    if (symbols.empty()) throw ArgumentError("apply_bpe: empty symbol list");
    std::unordered_map<std::string, int32_t> ranks;
    ranks.reserve(merges.size());
    for (size_t i = 0; i < merges.size(); ++i) {
        ranks.emplace(pair_key(merges[i].first, merges[i].second), static_cast<int32_t>(i));
    }
    return run_merges(ranks, std::move(symbols));
}

TokenSeq tokenize(const TokenizerModel& model, std::string_view text) {
    TokenSeq seq;
    if (text.empty()) return seq;
    std::string prepared = preprocess(model, text);
    switch (model.kind) {
    case TokKind::ByteBPE: tokenize_byte_bpe(model, prepared, seq); break;
    case TokKind::WordPiece: tokenize_wordpiece(model, prepared, seq); break;
    case TokKind::BoundaryGreedy: tokenize_boundary_greedy(model, prepared, seq); break;
    }
    return seq;
}

std::string detokenize(const TokenizerModel& model, const std::vector<std::string>& tokens) {
    switch (model.kind) {
    case TokKind::ByteBPE: {
        const ByteRemapTable& remap = ByteRemapTable::standard();
        std::string bytes;
        for (const std::string& tok : tokens) bytes += remap.unrender(tok);
        return bytes;
    }
    case TokKind::WordPiece: {
        std::string out;
        const std::string& prefix = model.continuation_prefix;
        for (const std::string& tok : tokens) {
            if (!out.empty() && !prefix.empty() && tok.rfind(prefix, 0) == 0 &&
                tok.size() > prefix.size()) {
                out += tok.substr(prefix.size());
            } else {
                if (!out.empty()) out += ' ';
                out += tok;
            }
        }
        return out;
    }
    case TokKind::BoundaryGreedy: {
        std::string joined;
        for (const std::string& tok : tokens) joined += tok;
        std::string out;
        size_t i = 0;
        const std::string& marker = model.boundary_marker;
        while (i < joined.size()) {
            if (!marker.empty() && joined.compare(i, marker.size(), marker) == 0) {
                if (!out.empty()) out += ' ';
                i += marker.size();
            } else {
                out += joined[i++];
            }
        }
        return out;
    }
    }
    return {};
}

std::string detokenize(const TokenizerModel& model, const TokenSeq& seq) {
    return detokenize(model, seq.tokens);
}

} // namespace tokaudit
