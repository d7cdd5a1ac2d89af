#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tokaudit {

struct SentenceList {
    std::vector<std::string> sentences; // file order, no trailing newline

    bool operator==(const SentenceList&) const = default;
};

// Line-aligned parallel corpus: sentence i of every language refers to the
// same content slot. Immutable after load.
struct ParallelCorpus {
    std::string ref_code;
    std::map<std::string, SentenceList> languages;
    size_t n_lines = 0;

    const SentenceList& at(const std::string& code) const; // LookupError

    bool operator==(const ParallelCorpus&) const = default;
};

// Optional per-code path overrides; codes without an entry resolve to
// "<dir>/<code>.txt".
using CorpusManifest = std::map<std::string, std::filesystem::path>;

CorpusManifest load_manifest(const std::filesystem::path& path);

// Loads one file per code (the reference code is included automatically if
// absent from `codes`), validates UTF-8 and line alignment.
ParallelCorpus load_parallel(const std::filesystem::path& dir,
                             const std::vector<std::string>& codes,
                             const std::string& ref_code,
                             const CorpusManifest& manifest = {});

// Selects n lines (same indices for every language, ascending order),
// deterministically for a given seed. n = n_lines returns the input corpus.
ParallelCorpus subsample(const ParallelCorpus& corpus, size_t n, uint64_t seed);

} // namespace tokaudit
