#include "tokaudit/corpus.hpp"

#include "tokaudit/errors.hpp"
#include "tokaudit/unicode.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

using nlohmann::json;

namespace tokaudit {

const SentenceList& ParallelCorpus::at(const std::string& code) const {
    auto it = languages.find(code);
    if (it == languages.end()) {
        throw LookupError("language '" + code + "' is not in the corpus");
    }
    return it->second;
}

namespace {

SentenceList read_sentence_file(const std::filesystem::path& path, const std::string& code) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("missing corpus file for '" + code + "': " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string data = buf.str();

    size_t bad_offset = 0;
    if (!uni::is_valid_utf8(data, &bad_offset)) {
        throw EncodingError(path.string() + ": invalid UTF-8 at byte offset " +
                                std::to_string(bad_offset),
                            bad_offset);
    }

    SentenceList list;
    size_t start = 0;
    while (start <= data.size()) {
        size_t nl = data.find('\n', start);
        if (nl == std::string::npos) {
            // Final line without newline; an empty remainder after a trailing
            // newline is not a line.
            if (start < data.size()) list.sentences.push_back(data.substr(start));
            break;
        }
        std::string line = data.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        list.sentences.push_back(std::move(line));
        start = nl + 1;
    }
    return list;
}

} // namespace

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw FormatError(path.string() + ": manifest must be an object mapping code to path");
    }
    CorpusManifest manifest;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_string()) {
            throw FormatError(path.string() + ": path for '" + it.key() + "' must be a string");
        }
        manifest[it.key()] = std::filesystem::path(it.value().get<std::string>());
    }
    return manifest;
}

ParallelCorpus load_parallel(const std::filesystem::path& dir,
                             const std::vector<std::string>& codes, const std::string& ref_code,
                             const CorpusManifest& manifest) {
    std::vector<std::string> all = codes;
    if (std::find(all.begin(), all.end(), ref_code) == all.end()) all.push_back(ref_code);

    ParallelCorpus corpus;
    corpus.ref_code = ref_code;
    for (const std::string& code : all) {
        auto mit = manifest.find(code);
        std::filesystem::path path =
            mit != manifest.end() ? mit->second : dir / (code + ".txt");
        auto [it, inserted] = corpus.languages.emplace(code, read_sentence_file(path, code));
        (void)it;
        if (!inserted) throw ArgumentError("duplicate language code '" + code + "' requested");
    }

    corpus.n_lines = corpus.languages.at(ref_code).sentences.size();
    std::string mismatches;
    for (const auto& [code, list] : corpus.languages) {
        if (list.sentences.size() != corpus.n_lines) {
            mismatches += "  " + code + ": " + std::to_string(list.sentences.size()) + "\n";
        }
    }
    if (!mismatches.empty()) {
        throw AlignmentError("corpus line counts disagree with reference " + ref_code + " (" +
                             std::to_string(corpus.n_lines) + " lines):\n" + mismatches);
    }
    return corpus;
}

ParallelCorpus subsample(const ParallelCorpus& corpus, size_t n, uint64_t seed) {
    if (n < 1 || n > corpus.n_lines) {
        throw ArgumentError("subsample size " + std::to_string(n) + " out of range [1, " +
                            std::to_string(corpus.n_lines) + "]");
    }
    // Partial Fisher-Yates over the index array. mt19937_64 plus an explicit
    // modulo draw keeps the selection identical across platforms.
    std::vector<size_t> indices(corpus.n_lines);
    std::iota(indices.begin(), indices.end(), size_t{0});
    std::mt19937_64 rng(seed);
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + static_cast<size_t>(rng() % (indices.size() - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(n);
    std::sort(indices.begin(), indices.end());

    ParallelCorpus out;
    out.ref_code = corpus.ref_code;
    out.n_lines = n;
    for (const auto& [code, list] : corpus.languages) {
        SentenceList sel;
        sel.sentences.reserve(n);
        for (size_t idx : indices) sel.sentences.push_back(list.sentences[idx]);
        out.languages.emplace(code, std::move(sel));
    }
    return out;
}

} // namespace tokaudit
