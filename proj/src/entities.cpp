#include "invox/entities.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>

#include "invox/errors.hpp"
#include "invox/text.hpp"

namespace invox {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Registry

AnnotatorRegistry& AnnotatorRegistry::instance() {
    static AnnotatorRegistry registry;
    return registry;
}

void AnnotatorRegistry::register_factory(
    const std::string& name, std::function<std::shared_ptr<EntityAnnotator>()> factory) {
    factories_[name] = std::move(factory);
}

std::shared_ptr<EntityAnnotator> AnnotatorRegistry::create(const std::string& name) const {
    auto it = factories_.find(name);
    if (it == factories_.end()) throw ConfigError("no entity annotator registered as '" + name + "'");
    return it->second();
}

std::vector<std::string> AnnotatorRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : factories_) out.push_back(name);
    return out;
}

// ---------------------------------------------------------------------------
// Gazetteer

namespace {

/// Folded copy with punctuation removed: "s.r.o." -> "sro", "Pty" -> "pty".
std::string normalize_token(std::u32string_view token, bool fold_lookalikes = false) {
    std::u32string out;
    for (char32_t c : token) {
        if (text::is_punct(c)) continue;
        char32_t f = text::fold_char(c);
        if (fold_lookalikes) {
            switch (f) {
                case U'0': f = U'o'; break;
                case U'1': f = U'l'; break;
                case U'5': f = U's'; break;
                case U'8': f = U'b'; break;
                case U'2': f = U'z'; break;
                default: break;
            }
        }
        out.push_back(f);
    }
    return text::encode_utf8(out);
}

std::string normalize_phrase(const std::string& phrase, bool fold_lookalikes = false) {
    std::string out;
    for (const std::string& tok : text::split_words(phrase)) {
        std::string key = normalize_token(text::decode_utf8(tok), fold_lookalikes);
        if (key.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += key;
    }
    return out;
}

std::set<std::string> load_word_list(const fs::path& path) {
    std::set<std::string> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.insert(text::fold_utf8(t));
    }
    return out;
}

} // namespace

bool Gazetteer::has_first_name(const std::string& token) const {
    return first_names.count(normalize_phrase(token)) > 0;
}

bool Gazetteer::has_legal_suffix(const std::string& token) const {
    return legal_suffixes.count(normalize_phrase(token, true)) > 0;
}

bool Gazetteer::has_street_suffix(const std::string& token) const {
    return street_suffixes.count(normalize_phrase(token)) > 0;
}

Gazetteer Gazetteer::load(const std::string& dir, const std::vector<std::string>& languages) {
    Gazetteer gaz;
    bool any = false;
    for (const std::string& lang : languages) {
        fs::path base = fs::path(dir) / lang;
        for (const std::string& entry : load_word_list(base / "first_names.txt")) {
            gaz.first_names.insert(normalize_phrase(entry));
            any = true;
        }
        for (const std::string& entry : load_word_list(base / "cities.txt")) {
            gaz.cities.insert(normalize_phrase(entry));
            any = true;
        }
        for (const std::string& entry : load_word_list(base / "countries.txt")) {
            gaz.countries.insert(normalize_phrase(entry));
            any = true;
        }
        for (const std::string& entry : load_word_list(base / "legal_suffixes.txt")) {
            gaz.legal_suffixes.insert(normalize_phrase(entry, true));
            any = true;
        }
        for (const std::string& entry : load_word_list(base / "street_suffixes.txt")) {
            gaz.street_suffixes.insert(normalize_phrase(entry));
            any = true;
        }
    }
    if (!any) throw ConfigError("gazetteer: no word lists found under " + dir);
    return gaz;
}

// ---------------------------------------------------------------------------
// Tokenization shared by the annotators

namespace {

struct Token {
    std::u32string raw;
    std::string key;           // normalized
    int begin = 0;             // code point offsets
    int end = 0;
    int trimmed_end = 0;       // end without trailing , ; :
};

std::vector<Token> tokenize(const std::string& line_text) {
    std::u32string u = text::decode_utf8(line_text);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < u.size()) {
        while (i < u.size() && text::is_space(u[i])) ++i;
        std::size_t start = i;
        while (i < u.size() && !text::is_space(u[i])) ++i;
        if (i == start) break;
        Token t;
        t.raw = u.substr(start, i - start);
        t.key = normalize_token(t.raw);
        t.begin = static_cast<int>(start);
        t.end = static_cast<int>(i);
        std::size_t te = i;
        while (te > start && (u[te - 1] == U',' || u[te - 1] == U';' || u[te - 1] == U':'))
            --te;
        t.trimmed_end = static_cast<int>(te);
        tokens.push_back(std::move(t));
    }
    return tokens;
}

bool is_capitalized(const std::u32string& raw) {
    bool has_upper = false, has_lower = false, first_alpha_upper = false, seen_alpha = false;
    for (char32_t c : raw) {
        if (!text::is_alpha(c)) continue;
        if (!seen_alpha) {
            seen_alpha = true;
            first_alpha_upper = text::is_upper(c);
        }
        if (text::is_upper(c)) has_upper = true;
        else has_lower = true;
    }
    if (!seen_alpha) return false;
    return first_alpha_upper || (has_upper && !has_lower);
}

bool has_digit_cp(const std::u32string& raw) {
    return std::any_of(raw.begin(), raw.end(), text::is_digit);
}

/// Longest gazetteer phrase (in tokens) starting at position i; 0 = none.
std::size_t phrase_match(const std::vector<Token>& tokens, std::size_t i,
                         const std::set<std::string>& phrases, std::size_t max_tokens = 3) {
    std::string joined;
    std::size_t best = 0;
    for (std::size_t len = 1; len <= max_tokens && i + len <= tokens.size(); ++len) {
        if (!joined.empty()) joined.push_back(' ');
        joined += tokens[i + len - 1].key;
        if (phrases.count(joined)) best = len;
    }
    return best;
}

/// Longest legal suffix token sequence ending exactly at token e (inclusive).
std::size_t suffix_match_ending_at(const std::vector<Token>& tokens, std::size_t e,
                                   const Gazetteer& gaz) {
    for (std::size_t len = std::min<std::size_t>(3, e + 1); len >= 1; --len) {
        std::string joined;
        for (std::size_t k = e + 1 - len; k <= e; ++k) {
            if (!joined.empty()) joined.push_back(' ');
            joined += normalize_token(tokens[k].raw, true);
        }
        if (gaz.legal_suffixes.count(joined)) return len;
    }
    return 0;
}

const std::set<std::string>& org_connector_tokens() {
    static const std::set<std::string> connectors = {"spol", "s", "r", "o", "a", "co", "and",
                                                     "of", "the", "und", "en", "&"};
    return connectors;
}

struct RawSpan {
    std::string label;
    int line = 0;
    int begin = 0;
    int end = 0;
};

bool overlaps(const RawSpan& a, int line, int begin, int end) {
    return a.line == line && a.begin < end && begin < a.end;
}

Annotation make_annotation(AnnotationKind kind, const std::string& label, int line, int begin,
                           int end, const std::string& line_text, const char* source) {
    Annotation a;
    a.kind = kind;
    a.label = label;
    a.line = line;
    a.begin = begin;
    a.end = end;
    a.matched_text = text::substr_utf8(line_text, begin, end);
    a.score = 1.0;
    a.source = source;
    return a;
}

} // namespace

// ---------------------------------------------------------------------------
// Baseline NER

std::vector<Annotation> gazetteer_annotate(const Block& block, const Gazetteer& gaz) {
    std::vector<Annotation> out;
    for (int li = 0; li < block.num_lines(); ++li) {
        const std::string& line_text = block.lines[li].text;
        std::vector<Token> tokens = tokenize(line_text);
        std::vector<RawSpan> org_spans;

        // organizations: capitalized run ending in a legal-form suffix
        for (std::size_t e = 0; e < tokens.size(); ++e) {
            std::size_t suffix_len = suffix_match_ending_at(tokens, e, gaz);
            if (suffix_len == 0) continue;
            std::size_t start = e + 1 - suffix_len;
            std::size_t first = start;
            bool saw_capitalized = false;
            while (first > 0) {
                const Token& prev = tokens[first - 1];
                if (is_capitalized(prev.raw) && !has_digit_cp(prev.raw)) {
                    saw_capitalized = true;
                    --first;
                } else if (org_connector_tokens().count(prev.key)) {
                    --first;
                } else {
                    break;
                }
            }
            // connectors alone do not make an organization
            while (first < start && !is_capitalized(tokens[first].raw)) ++first;
            if (!saw_capitalized) continue;
            RawSpan span{"ORGANIZATION", li, tokens[first].begin, tokens[e].trimmed_end};
            bool dup = std::any_of(org_spans.begin(), org_spans.end(), [&](const RawSpan& s) {
                return overlaps(s, span.line, span.begin, span.end);
            });
            if (!dup) org_spans.push_back(span);
        }
        for (const RawSpan& s : org_spans)
            out.push_back(make_annotation(AnnotationKind::Entity, s.label, li, s.begin, s.end,
                                          line_text, "ner-gazetteer"));

        auto inside_org = [&](int begin, int end) {
            return std::any_of(org_spans.begin(), org_spans.end(), [&](const RawSpan& s) {
                return overlaps(s, li, begin, end);
            });
        };

        // persons: two consecutive capitalized tokens, first in the name list
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            const Token& a = tokens[i];
            const Token& b = tokens[i + 1];
            if (!is_capitalized(a.raw) || !is_capitalized(b.raw)) continue;
            if (has_digit_cp(a.raw) || has_digit_cp(b.raw)) continue;
            if (!gaz.first_names.count(a.key)) continue;
            if (inside_org(a.begin, b.trimmed_end)) continue;
            out.push_back(make_annotation(AnnotationKind::Entity, "PERSON", li, a.begin,
                                          b.trimmed_end, line_text, "ner-gazetteer"));
        }

        // places
        std::vector<RawSpan> place_spans;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            std::size_t country_len = phrase_match(tokens, i, gaz.countries);
            std::size_t city_len = phrase_match(tokens, i, gaz.cities);
            std::string label;
            std::size_t len = 0;
            if (country_len >= city_len && country_len > 0) {
                label = "COUNTRY";
                len = country_len;
            } else if (city_len > 0) {
                label = "CITY";
                len = city_len;
            }
            if (len == 0) continue;
            int begin = tokens[i].begin;
            int end = tokens[i + len - 1].trimmed_end;
            if (inside_org(begin, end)) continue;
            bool dup = std::any_of(place_spans.begin(), place_spans.end(), [&](const RawSpan& s) {
                return overlaps(s, li, begin, end);
            });
            if (dup) continue;
            place_spans.push_back({label, li, begin, end});
            out.push_back(
                make_annotation(AnnotationKind::Entity, label, li, begin, end, line_text,
                                "ner-gazetteer"));
        }
    }
    std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
        if (a.line != b.line) return a.line < b.line;
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.label < b.label;
    });
    return out;
}

namespace {

class GazetteerAnnotator : public EntityAnnotator {
public:
    explicit GazetteerAnnotator(std::shared_ptr<const Gazetteer> gaz) : gaz_(std::move(gaz)) {}
    std::string name() const override { return "gazetteer"; }
    std::vector<Annotation> annotate(const Block& block) const override {
        return gazetteer_annotate(block, *gaz_);
    }

private:
    std::shared_ptr<const Gazetteer> gaz_;
};

} // namespace

std::shared_ptr<EntityAnnotator> make_gazetteer_annotator(std::shared_ptr<const Gazetteer> gaz) {
    return std::make_shared<GazetteerAnnotator>(std::move(gaz));
}

// ---------------------------------------------------------------------------
// Address parsing

std::string to_string(AddressLabel l) {
    switch (l) {
        case AddressLabel::Country: return "country";
        case AddressLabel::City: return "city";
        case AddressLabel::CityDistrict: return "city_district";
        case AddressLabel::Suburb: return "suburb";
        case AddressLabel::Postcode: return "postcode";
        case AddressLabel::Road: return "road";
        case AddressLabel::HouseNumber: return "house_number";
        case AddressLabel::House: return "house";
    }
    return "road";
}

int address_label_rank(AddressLabel l) {
    return static_cast<int>(l);
}

namespace {

bool is_house_number_token(const std::u32string& raw) {
    // 9/181, 68a, 341 -- short numeric tokens, optionally with a slash part
    std::string s = text::encode_utf8(raw);
    while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.back())) && s.back() != '/')
        s.pop_back();
    static const std::regex re("^\\d{1,4}([a-z])?(/\\d{1,4}([a-z])?)?$");
    return std::regex_match(s, re);
}

int house_token_trimmed_end(const Token& t) {
    // trailing punctuation other than the slash is not part of the number
    std::u32string raw = t.raw;
    int end = t.end;
    while (!raw.empty() && text::is_punct(raw.back()) && raw.back() != U'/') {
        raw.pop_back();
        --end;
    }
    return end;
}

} // namespace

std::vector<AddressPart> parse_address_parts(const std::string& line_text, const Gazetteer& gaz) {
    std::vector<Token> tokens = tokenize(line_text);
    std::vector<AddressPart> parts;
    auto taken = [&](int begin, int end) {
        return std::any_of(parts.begin(), parts.end(), [&](const AddressPart& p) {
            return p.begin < end && begin < p.end;
        });
    };

    // roads with street suffixes: [number] Capitalized+ Suffix
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!gaz.has_street_suffix(text::encode_utf8(tokens[i].raw))) continue;
        std::size_t first = i;
        while (first > 0 && is_capitalized(tokens[first - 1].raw) &&
               !has_digit_cp(tokens[first - 1].raw) &&
               !gaz.cities.count(tokens[first - 1].key))
            --first;
        if (first == i) continue; // suffix token alone is not a road
        int begin = tokens[first].begin;
        int end = tokens[i].trimmed_end;
        if (taken(begin, end)) continue;
        parts.push_back({AddressLabel::Road, begin, end});
        if (first > 0 && is_house_number_token(tokens[first - 1].raw) &&
            !taken(tokens[first - 1].begin, house_token_trimmed_end(tokens[first - 1])))
            parts.push_back({AddressLabel::HouseNumber, tokens[first - 1].begin,
                             house_token_trimmed_end(tokens[first - 1])});
    }

    // czech style: Capitalized+ house-number
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (!is_capitalized(tokens[i].raw) || has_digit_cp(tokens[i].raw)) continue;
        if (!is_house_number_token(tokens[i + 1].raw)) continue;
        if (gaz.cities.count(tokens[i].key) || gaz.countries.count(tokens[i].key)) continue;
        std::size_t first = i;
        while (first > 0 && is_capitalized(tokens[first - 1].raw) &&
               !has_digit_cp(tokens[first - 1].raw) &&
               !gaz.cities.count(tokens[first - 1].key))
            --first;
        int begin = tokens[first].begin;
        int end = tokens[i].trimmed_end;
        int hbegin = tokens[i + 1].begin;
        int hend = house_token_trimmed_end(tokens[i + 1]);
        if (taken(begin, end) || taken(hbegin, hend)) continue;
        parts.push_back({AddressLabel::Road, begin, end});
        parts.push_back({AddressLabel::HouseNumber, hbegin, hend});
    }

    // postcodes
    {
        static const std::regex uk_re("[A-Z]{1,2}\\d[A-Z\\d]? \\d[A-Z]{2}");
        static const std::regex zip4_re("\\d{5}-\\d{4}");
        static const std::regex cs_re("\\d{3} ?\\d{2}");
        static const std::regex generic_re("\\d{4,6}");
        for (const std::regex* re : {&uk_re, &zip4_re, &cs_re, &generic_re}) {
            for (auto it = std::sregex_iterator(line_text.begin(), line_text.end(), *re);
                 it != std::sregex_iterator(); ++it) {
                std::size_t b = static_cast<std::size_t>(it->position());
                std::size_t e = b + static_cast<std::size_t>(it->length());
                if (b > 0 && std::isalnum(static_cast<unsigned char>(line_text[b - 1]))) continue;
                if (e < line_text.size() &&
                    (std::isalnum(static_cast<unsigned char>(line_text[e])) ||
                     line_text[e] == '/'))
                    continue;
                if (b > 0 && line_text[b - 1] == '/') continue;
                int cb = static_cast<int>(text::codepoint_of_byte(line_text, b));
                int ce = static_cast<int>(text::codepoint_of_byte(line_text, e));
                if (taken(cb, ce)) continue;
                parts.push_back({AddressLabel::Postcode, cb, ce});
            }
        }
    }

    // cities and countries from the gazetteer
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::size_t country_len = phrase_match(tokens, i, gaz.countries);
        std::size_t city_len = phrase_match(tokens, i, gaz.cities);
        AddressLabel label = AddressLabel::City;
        std::size_t len = 0;
        if (country_len >= city_len && country_len > 0) {
            label = AddressLabel::Country;
            len = country_len;
        } else if (city_len > 0) {
            label = AddressLabel::City;
            len = city_len;
        }
        if (len == 0) continue;
        int begin = tokens[i].begin;
        int end = tokens[i + len - 1].trimmed_end;
        if (taken(begin, end)) continue;
        parts.push_back({label, begin, end});
    }

    std::sort(parts.begin(), parts.end(), [](const AddressPart& a, const AddressPart& b) {
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.end < b.end;
    });
    return parts;
}

std::vector<Annotation> address_annotate(const Block& block, const Gazetteer& gaz) {
    std::vector<Annotation> out;
    for (int li = 0; li < block.num_lines(); ++li) {
        const std::string& line_text = block.lines[li].text;
        for (const AddressPart& p : parse_address_parts(line_text, gaz))
            out.push_back(make_annotation(AnnotationKind::AddressPart, to_string(p.label), li,
                                          p.begin, p.end, line_text, "address-parser"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Location ensemble

void ensemble_locations(Block& block, const std::vector<Annotation>& ner_annots,
                        const std::vector<Annotation>& addr_annots,
                        const PipelineConfig& cfg) {
    std::set<std::string> items;
    for (const Annotation& a : addr_annots) items.insert(a.label);
    for (const Annotation& a : ner_annots) {
        if (a.label == "CITY") items.insert("city");
        else if (a.label == "COUNTRY") items.insert("country");
        else if (a.label == "LOCATION") items.insert("location");
    }
    bool keep_address = static_cast<int>(items.size()) >= cfg.min_address_items;

    auto span_overlap = [](const Annotation& a, const Annotation& b) {
        return a.line == b.line && a.begin < b.end && b.begin < a.end;
    };

    for (const Annotation& a : addr_annots) {
        if (!keep_address) break;
        if (a.label == "road" || a.label == "house_number" || a.label == "house") {
            bool org_claim = std::any_of(
                ner_annots.begin(), ner_annots.end(), [&](const Annotation& n) {
                    return n.label == "ORGANIZATION" && span_overlap(a, n);
                });
            if (org_claim) continue; // the NER organization label wins
        }
        block.annotations.push_back(a);
    }

    for (const Annotation& n : ner_annots) {
        if (n.label == "PERSON") {
            bool road_claim = keep_address &&
                              std::any_of(addr_annots.begin(), addr_annots.end(),
                                          [&](const Annotation& a) {
                                              return a.label == "road" && span_overlap(a, n);
                                          });
            if (road_claim) continue; // the address parser road label wins
        }
        block.annotations.push_back(n);
    }
}

} // namespace invox
