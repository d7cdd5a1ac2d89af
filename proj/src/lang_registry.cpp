#include "tokaudit/lang_registry.hpp"

#include "tokaudit/errors.hpp"
#include "tokaudit/unicode.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace tokaudit {

const char* script_name(Script s) {
    return s == Script::Latin ? "latin" : "nonlatin";
}

const char* tier_name(Tier t) {
    switch (t) {
    case Tier::High: return "high";
    case Tier::Middle: return "middle";
    case Tier::Low: return "low";
    }
    return "high";
}

std::vector<char32_t> char_set(const LanguageProfile& profile) {
    std::vector<char32_t> out;
    for (const CharRange& r : profile.ranges) {
        for (char32_t cp = r.lo; cp <= r.hi; ++cp) out.push_back(cp);
    }
    out.insert(out.end(), profile.specials.begin(), profile.specials.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void validate_profile(const LanguageProfile& p) {
    if (p.code.empty()) throw FormatError("registry: empty language code");
    for (size_t i = 0; i < p.ranges.size(); ++i) {
        const CharRange& r = p.ranges[i];
        if (!uni::is_scalar(r.lo) || !uni::is_scalar(r.hi)) {
            throw FormatError("registry: " + p.code + ": range " + std::to_string(i) +
                              " is not a valid scalar codepoint range");
        }
        if (r.lo > r.hi) {
            throw FormatError("registry: " + p.code + ": range " + std::to_string(i) +
                              " has lo > hi");
        }
        for (size_t j = 0; j < i; ++j) {
            if (r.lo <= p.ranges[j].hi && p.ranges[j].lo <= r.hi) {
                throw FormatError("registry: " + p.code + ": ranges " + std::to_string(j) +
                                  " and " + std::to_string(i) + " overlap");
            }
        }
    }
    for (char32_t cp : p.specials) {
        if (!uni::is_scalar(cp)) {
            throw FormatError("registry: " + p.code + ": special is not a valid codepoint");
        }
    }
}

std::vector<char32_t> decode_specials(const char* utf8) {
    return uni::decode_utf8(utf8);
}

LanguageProfile make_profile(const char* code, Script script, Tier tier,
                             std::vector<CharRange> ranges = {}, const char* specials = "") {
    LanguageProfile p;
    p.code = code;
    p.script = script;
    p.tier = tier;
    p.ranges = std::move(ranges);
    p.specials = decode_specials(specials);
    return p;
}

std::vector<LanguageProfile> builtin_profiles() {
    constexpr Script L = Script::Latin;
    constexpr Script N = Script::NonLatin;
    std::vector<LanguageProfile> v;
    // Reference first; character universe is the 52 ASCII letters.
    v.push_back(make_profile("eng_Latn", L, Tier::High, {{0x41, 0x5A}, {0x61, 0x7A}}));
    // Latin / High
    v.push_back(make_profile("spa_Latn", L, Tier::High, {},
                             "áéíóúüñÁÉÍÓÚÜÑ"));
    v.push_back(make_profile("deu_Latn", L, Tier::High, {}, "äöüÄÖÜß"));
    v.push_back(make_profile("fra_Latn", L, Tier::High, {},
                             "àâäçéèêëîïôöùûüÀÂÄÇÉÈÊËÎÏÔÖÙÛÜ"));
    // Latin / Middle
    v.push_back(make_profile("nld_Latn", L, Tier::Middle));
    v.push_back(make_profile("ita_Latn", L, Tier::Middle));
    v.push_back(make_profile("ron_Latn", L, Tier::Middle));
    v.push_back(make_profile("tur_Latn", L, Tier::Middle));
    v.push_back(make_profile("por_Latn", L, Tier::Middle));
    // Latin / Low
    v.push_back(make_profile("quy_Latn", L, Tier::Low));
    v.push_back(make_profile("hat_Latn", L, Tier::Low));
    v.push_back(make_profile("eus_Latn", L, Tier::Low));
    v.push_back(make_profile("hun_Latn", L, Tier::Low));
    v.push_back(make_profile("cat_Latn", L, Tier::Low));
    v.push_back(make_profile("dan_Latn", L, Tier::Low));
    v.push_back(make_profile("est_Latn", L, Tier::Low));
    v.push_back(make_profile("ind_Latn", L, Tier::Low));
    v.push_back(make_profile("lvs_Latn", L, Tier::Low));
    v.push_back(make_profile("zsm_Latn", L, Tier::Low));
    v.push_back(make_profile("fin_Latn", L, Tier::Low));
    v.push_back(make_profile("swh_Latn", L, Tier::Low));
    v.push_back(make_profile("nob_Latn", L, Tier::Low));
    v.push_back(make_profile("hrv_Latn", L, Tier::Low));
    v.push_back(make_profile("ces_Latn", L, Tier::Low));
    v.push_back(make_profile("lij_Latn", L, Tier::Low));
    // Non-Latin / High
    v.push_back(make_profile("arb_Arab", N, Tier::High, {{0x0600, 0x06FF}}));
    v.push_back(make_profile("rus_Cyrl", N, Tier::High));
    v.push_back(make_profile("zho_Hans", N, Tier::High));
    v.push_back(make_profile("hin_Deva", N, Tier::High, {{0x0900, 0x097F}}));
    // Non-Latin / Middle
    v.push_back(make_profile("urd_Arab", N, Tier::Middle));
    v.push_back(make_profile("kor_Hang", N, Tier::Middle));
    v.push_back(make_profile("vie_Latn", N, Tier::Middle));
    v.push_back(make_profile("jpn_Jpan", N, Tier::Middle));
    // Non-Latin / Low
    v.push_back(make_profile("azj_Latn", N, Tier::Low));
    v.push_back(make_profile("tha_Thai", N, Tier::Low));
    v.push_back(make_profile("mar_Deva", N, Tier::Low));
    v.push_back(make_profile("ory_Orya", N, Tier::Low));
    v.push_back(make_profile("guj_Gujr", N, Tier::Low));
    v.push_back(make_profile("npi_Deva", N, Tier::Low));
    v.push_back(make_profile("mya_Mymr", N, Tier::Low));
    v.push_back(make_profile("asm_Beng", N, Tier::Low));
    v.push_back(make_profile("ckb_Arab", N, Tier::Low));
    v.push_back(make_profile("tam_Taml", N, Tier::Low));
    v.push_back(make_profile("mal_Mlym", N, Tier::Low));
    v.push_back(make_profile("bul_Cyrl", N, Tier::Low));
    v.push_back(make_profile("pan_Guru", N, Tier::Low));
    v.push_back(make_profile("ukr_Cyrl", N, Tier::Low));
    v.push_back(make_profile("ben_Beng", N, Tier::Low));
    v.push_back(make_profile("kan_Knda", N, Tier::Low));
    v.push_back(make_profile("ell_Grek", N, Tier::Low));
    v.push_back(make_profile("nso_Latn", N, Tier::Low));
    v.push_back(make_profile("srp_Cyrl", N, Tier::Low));
    v.push_back(make_profile("tel_Telu", N, Tier::Low));
    v.push_back(make_profile("heb_Hebr", N, Tier::Low));
    v.push_back(make_profile("kat_Geor", N, Tier::Low));
    return v;
}

// Codepoint values in registry files: integer, hex string ("0x0900" or
// "U+0900"), or a single-character string.
char32_t parse_codepoint(const json& v, const std::string& where) {
    if (v.is_number_unsigned() || v.is_number_integer()) {
        int64_t n = v.get<int64_t>();
        if (n < 0 || n > static_cast<int64_t>(uni::kMaxCodepoint)) {
            throw FormatError("registry: " + where + ": codepoint out of range");
        }
        return static_cast<char32_t>(n);
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0 || s.rfind("U+", 0) == 0) {
            try {
                size_t pos = 0;
                unsigned long n = std::stoul(s.substr(2), &pos, 16);
                if (pos != s.size() - 2) throw std::invalid_argument(s);
                return static_cast<char32_t>(n);
            } catch (const std::exception&) {
                throw FormatError("registry: " + where + ": bad hex codepoint '" + s + "'");
            }
        }
        std::vector<char32_t> cps = uni::decode_utf8(s);
        if (cps.size() != 1) {
            throw FormatError("registry: " + where + ": expected a single character, got '" + s +
                              "'");
        }
        return cps[0];
    }
    throw FormatError("registry: " + where + ": codepoint must be an integer or string");
}

} // namespace

Registry::Registry(std::vector<LanguageProfile> profiles, std::string reference)
    : profiles_(std::move(profiles)), reference_(std::move(reference)) {
    for (size_t i = 0; i < profiles_.size(); ++i) {
        validate_profile(profiles_[i]);
        auto [it, inserted] = index_.emplace(profiles_[i].code, i);
        (void)it;
        if (!inserted) {
            throw FormatError("registry: duplicate language code '" + profiles_[i].code + "'");
        }
    }
    if (index_.find(reference_) == index_.end()) {
        throw ConfigError("registry: reference language '" + reference_ +
                          "' has no profile entry");
    }
}

const Registry& Registry::builtin() {
    static const Registry reg(builtin_profiles(), "eng_Latn");
    return reg;
}

const LanguageProfile* Registry::find(std::string_view code) const {
    auto it = index_.find(std::string(code));
    return it == index_.end() ? nullptr : &profiles_[it->second];
}

const LanguageProfile& Registry::at(std::string_view code) const {
    const LanguageProfile* p = find(code);
    if (!p) throw LookupError("unknown language code '" + std::string(code) + "'");
    return *p;
}

std::vector<std::string> Registry::codes() const {
    std::vector<std::string> out;
    out.reserve(profiles_.size());
    for (const auto& p : profiles_) out.push_back(p.code);
    return out;
}

bool Registry::operator==(const Registry& other) const {
    return reference_ == other.reference_ && profiles_ == other.profiles_;
}

std::pair<Script, Tier> classify(const Registry& registry, std::string_view code) {
    const LanguageProfile& p = registry.at(code);
    return {p.script, p.tier};
}

Tier collapse_tier(Tier t, bool collapse_middle) {
    if (collapse_middle && t == Tier::Middle) return Tier::Low;
    return t;
}

Registry parse_registry(std::string_view text, std::string_view origin) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw FormatError(std::string(origin) + ": empty registry file");
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(origin) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("languages") || !doc["languages"].is_array()) {
        throw FormatError(std::string(origin) + ": expected an object with a 'languages' array");
    }
    std::string reference = doc.value("reference", std::string("eng_Latn"));
    std::vector<LanguageProfile> profiles;
    size_t idx = 0;
    for (const json& entry : doc["languages"]) {
        std::string where = "languages[" + std::to_string(idx++) + "]";
        if (!entry.is_object()) throw FormatError("registry: " + where + ": expected an object");
        LanguageProfile p;
        if (!entry.contains("code") || !entry["code"].is_string()) {
            throw FormatError("registry: " + where + ": missing 'code'");
        }
        p.code = entry["code"].get<std::string>();
        std::string script = entry.value("script", std::string());
        if (script == "latin") {
            p.script = Script::Latin;
        } else if (script == "nonlatin") {
            p.script = Script::NonLatin;
        } else {
            throw FormatError("registry: " + where + ".script: expected 'latin' or 'nonlatin'");
        }
        std::string tier = entry.value("tier", std::string());
        if (tier == "high") {
            p.tier = Tier::High;
        } else if (tier == "middle") {
            p.tier = Tier::Middle;
        } else if (tier == "low") {
            p.tier = Tier::Low;
        } else {
            throw FormatError("registry: " + where + ".tier: expected 'high', 'middle' or 'low'");
        }
        if (entry.contains("ranges")) {
            size_t ri = 0;
            for (const json& r : entry["ranges"]) {
                std::string rwhere = where + ".ranges[" + std::to_string(ri++) + "]";
                if (!r.is_array() || r.size() != 2) {
                    throw FormatError("registry: " + rwhere + ": expected a [lo, hi] pair");
                }
                p.ranges.push_back(
                    {parse_codepoint(r[0], rwhere), parse_codepoint(r[1], rwhere)});
            }
        }
        if (entry.contains("specials")) {
            size_t si = 0;
            for (const json& s : entry["specials"]) {
                p.specials.push_back(
                    parse_codepoint(s, where + ".specials[" + std::to_string(si++) + "]"));
            }
        }
        profiles.push_back(std::move(p));
    }
    return Registry(std::move(profiles), std::move(reference));
}

Registry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open registry file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_registry(buf.str(), path.string());
}

std::string serialize_registry(const Registry& registry) {
    json doc;
    doc["reference"] = registry.reference();
    json langs = json::array();
    for (const LanguageProfile& p : registry.profiles()) {
        json e;
        e["code"] = p.code;
        e["script"] = script_name(p.script);
        e["tier"] = tier_name(p.tier);
        json ranges = json::array();
        for (const CharRange& r : p.ranges) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "0x%04X", static_cast<uint32_t>(r.lo));
            std::string lo = buf;
            std::snprintf(buf, sizeof buf, "0x%04X", static_cast<uint32_t>(r.hi));
            ranges.push_back(json::array({lo, std::string(buf)}));
        }
        e["ranges"] = ranges;
        json specials = json::array();
        for (char32_t cp : p.specials) specials.push_back(uni::encode_utf8(cp));
        e["specials"] = specials;
        langs.push_back(std::move(e));
    }
    doc["languages"] = std::move(langs);
    return doc.dump(2) + "\n";
}

} // namespace tokaudit
