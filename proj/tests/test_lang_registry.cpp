#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tokaudit/errors.hpp"
#include "tokaudit/lang_registry.hpp"

#include "testutil.hpp"

using namespace tokaudit;

TEST_CASE("builtin registry mirrors the published grouping") {
    const Registry& reg = Registry::builtin();
    CHECK(reg.reference() == "eng_Latn");
    CHECK(reg.profiles().size() == 55); // 54 evaluation languages + reference

    CHECK(classify(reg, "spa_Latn") == std::pair(Script::Latin, Tier::High));
    CHECK(classify(reg, "deu_Latn") == std::pair(Script::Latin, Tier::High));
    CHECK(classify(reg, "hin_Deva") == std::pair(Script::NonLatin, Tier::High));
    CHECK(classify(reg, "kan_Knda") == std::pair(Script::NonLatin, Tier::Low));
    CHECK(classify(reg, "tur_Latn") == std::pair(Script::Latin, Tier::Middle));
    CHECK(classify(reg, "jpn_Jpan") == std::pair(Script::NonLatin, Tier::Middle));
    // Grouped by script of the variety, not the code suffix.
    CHECK(classify(reg, "vie_Latn") == std::pair(Script::NonLatin, Tier::Middle));
    CHECK(classify(reg, "azj_Latn") == std::pair(Script::NonLatin, Tier::Low));

    CHECK_THROWS_AS(classify(reg, "xxx_Xxxx"), LookupError);

    size_t latin_low = 0, nonlatin_low = 0;
    for (const auto& p : reg.profiles()) {
        if (p.script == Script::Latin && p.tier == Tier::Low) ++latin_low;
        if (p.script == Script::NonLatin && p.tier == Tier::Low) ++nonlatin_low;
    }
    CHECK(latin_low == 16);
    CHECK(nonlatin_low == 22);
}

TEST_CASE("char_set sizes match the published ranges") {
    const Registry& reg = Registry::builtin();
    CHECK(char_set(reg.at("hin_Deva")).size() == 128);
    CHECK(char_set(reg.at("arb_Arab")).size() == 256);
    CHECK(char_set(reg.at("eng_Latn")).size() == 52);
    CHECK(char_set(reg.at("spa_Latn")).size() == 14);
    CHECK(char_set(reg.at("fra_Latn")).size() == 30);
    CHECK(char_set(reg.at("deu_Latn")).size() == 7);
    CHECK(char_set(reg.at("kan_Knda")).empty()); // no published ranges

    // ascending, deduplicated
    auto hindi = char_set(reg.at("hin_Deva"));
    CHECK(hindi.front() == 0x0900);
    CHECK(hindi.back() == 0x097F);
    CHECK(std::is_sorted(hindi.begin(), hindi.end()));
}

TEST_CASE("char_set combines ranges and specials without double counting") {
    LanguageProfile p;
    p.code = "test";
    p.ranges = {{0x41, 0x44}};          // A..D
    p.specials = {0x43, 0x5A};          // C (inside range), Z
    auto cs = char_set(p);
    CHECK(cs == std::vector<char32_t>{0x41, 0x42, 0x43, 0x44, 0x5A});

    LanguageProfile empty;
    empty.code = "empty";
    CHECK(char_set(empty).empty());
}

TEST_CASE("registry file parsing") {
    std::string text = R"({
      "reference": "eng_Latn",
      "languages": [
        {"code": "eng_Latn", "script": "latin", "tier": "high",
         "ranges": [["0x41", "0x5A"], ["0x61", "0x7A"]]},
        {"code": "spa_Latn", "script": "latin", "tier": "high",
         "specials": ["á", "0x00E9"]},
        {"code": "kan_Knda", "script": "nonlatin", "tier": "low"}
      ]
    })";
    Registry reg = parse_registry(text);
    CHECK(classify(reg, "spa_Latn") == std::pair(Script::Latin, Tier::High));
    CHECK(classify(reg, "kan_Knda") == std::pair(Script::NonLatin, Tier::Low));
    CHECK(reg.at("spa_Latn").specials == std::vector<char32_t>{0xE1, 0xE9});
    CHECK(char_set(reg.at("eng_Latn")).size() == 52);
}

TEST_CASE("registry rejects bad input") {
    CHECK_THROWS_AS(parse_registry(""), FormatError);
    CHECK_THROWS_AS(parse_registry("   \n "), FormatError);
    CHECK_THROWS_AS(parse_registry("{\"languages\": 3}"), FormatError);
    // duplicate code
    CHECK_THROWS_AS(parse_registry(R"({"languages": [
        {"code": "a_A", "script": "latin", "tier": "high"},
        {"code": "a_A", "script": "latin", "tier": "low"}],
        "reference": "a_A"})"),
                    FormatError);
    // missing reference profile
    CHECK_THROWS_AS(parse_registry(R"({"reference": "zzz_Zzz", "languages": [
        {"code": "a_A", "script": "latin", "tier": "high"}]})"),
                    ConfigError);
    // lo > hi
    CHECK_THROWS_AS(parse_registry(R"({"reference": "a_A", "languages": [
        {"code": "a_A", "script": "latin", "tier": "high",
         "ranges": [["0x50", "0x40"]]}]})"),
                    FormatError);
    // overlapping ranges
    CHECK_THROWS_AS(parse_registry(R"({"reference": "a_A", "languages": [
        {"code": "a_A", "script": "latin", "tier": "high",
         "ranges": [["0x40", "0x50"], ["0x48", "0x60"]]}]})"),
                    FormatError);
    // unknown tier
    CHECK_THROWS_AS(parse_registry(R"({"reference": "a_A", "languages": [
        {"code": "a_A", "script": "latin", "tier": "extreme"}]})"),
                    FormatError);
}

TEST_CASE("serialize/load round-trips to an equal registry") {
    const Registry& reg = Registry::builtin();
    std::string text = serialize_registry(reg);
    Registry back = parse_registry(text);
    CHECK(back == reg);

    testutil::TempDir dir("registry");
    testutil::write_text(dir.path / "reg.json", text);
    Registry loaded = load_registry(dir.path / "reg.json");
    CHECK(loaded == reg);
}

#ifdef TOKAUDIT_SOURCE_DIR
TEST_CASE("shipped registry file matches the builtin") {
    std::filesystem::path shipped =
        std::filesystem::path(TOKAUDIT_SOURCE_DIR) / "data" / "registry.json";
    REQUIRE(std::filesystem::exists(shipped));
    Registry loaded = load_registry(shipped);
    CHECK(loaded == Registry::builtin());
}
#endif

TEST_CASE("classification is pure") {
    const Registry& reg = Registry::builtin();
    auto a = classify(reg, "ben_Beng");
    auto b = classify(reg, "ben_Beng");
    CHECK(a == b);
}

TEST_CASE("tier collapse") {
    CHECK(collapse_tier(Tier::Middle, true) == Tier::Low);
    CHECK(collapse_tier(Tier::Middle, false) == Tier::Middle);
    CHECK(collapse_tier(Tier::High, true) == Tier::High);
    CHECK(collapse_tier(Tier::Low, true) == Tier::Low);
}

TEST_CASE("char_set size identity over random profiles") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 100; ++iter) {
        LanguageProfile p;
        p.code = "rand";
        char32_t base = 0x100 + static_cast<char32_t>(rng() % 0x1000);
        size_t n_ranges = rng() % 4;
        char32_t cursor = base;
        size_t range_total = 0;
        for (size_t i = 0; i < n_ranges; ++i) {
            char32_t lo = cursor + static_cast<char32_t>(rng() % 16);
            char32_t hi = lo + static_cast<char32_t>(rng() % 32);
            p.ranges.push_back({lo, hi});
            range_total += hi - lo + 1;
            cursor = hi + 2;
        }
        size_t extra = 0;
        for (size_t i = 0; i < rng() % 8; ++i) {
            char32_t cp = base + static_cast<char32_t>(rng() % 0x80);
            bool in_range = false;
            for (const auto& r : p.ranges) in_range |= cp >= r.lo && cp <= r.hi;
            bool dup = std::find(p.specials.begin(), p.specials.end(), cp) != p.specials.end();
            p.specials.push_back(cp);
            if (!in_range && !dup) ++extra;
        }
        CHECK(char_set(p).size() == range_total + extra);
    }
}
