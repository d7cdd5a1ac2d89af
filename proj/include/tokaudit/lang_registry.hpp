#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tokaudit {

enum class Script { Latin, NonLatin };
enum class Tier { High, Middle, Low };

const char* script_name(Script s);
const char* tier_name(Tier t);

// Inclusive codepoint range. Half-open ranges in source material are
// normalized to closed form at load time.
struct CharRange {
    char32_t lo;
    char32_t hi;

    bool operator==(const CharRange&) const = default;
};

struct LanguageProfile {
    std::string code; // FLORES-style identifier, e.g. "kan_Knda"
    Script script = Script::Latin;
    Tier tier = Tier::High;
    std::vector<CharRange> ranges;
    std::vector<char32_t> specials; // supplementary letters for Latin languages

    bool operator==(const LanguageProfile&) const = default;
};

// Union of all ranges plus specials, deduplicated, ascending codepoint order.
std::vector<char32_t> char_set(const LanguageProfile& profile);

class Registry {
public:
    Registry(std::vector<LanguageProfile> profiles, std::string reference);

    // The registry mirroring the published script/tier grouping of the 54
    // evaluation languages, with character ranges for the six languages
    // that have them, plus the English reference.
    static const Registry& builtin();

    const std::string& reference() const { return reference_; }
    const std::vector<LanguageProfile>& profiles() const { return profiles_; }

    const LanguageProfile* find(std::string_view code) const;
    const LanguageProfile& at(std::string_view code) const; // LookupError

    std::vector<std::string> codes() const; // registry (file) order

    bool operator==(const Registry& other) const;

private:
    std::vector<LanguageProfile> profiles_;
    std::unordered_map<std::string, size_t> index_;
    std::string reference_;
};

// (script, tier) of a registered language. Unknown codes raise LookupError,
// never a silent default.
std::pair<Script, Tier> classify(const Registry& registry, std::string_view code);

// Optional tier collapse used when grouping into the four headline
// categories: Middle folds into Low.
Tier collapse_tier(Tier t, bool collapse_middle);

Registry load_registry(const std::filesystem::path& path);
Registry parse_registry(std::string_view text, std::string_view origin = "<registry>");
std::string serialize_registry(const Registry& registry);

} // namespace tokaudit
