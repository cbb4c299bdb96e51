#include "invox/textannot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"
#include "invox/text.hpp"

namespace invox {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ConfusionTable

void ConfusionTable::add_pair(char32_t a, char32_t b) {
    a = text::fold_char(a);
    b = text::fold_char(b);
    pairs.insert({a, b});
    pairs.insert({b, a});
}

bool ConfusionTable::is_pair(char32_t a, char32_t b) const {
    return pairs.count({a, b}) > 0;
}

bool ConfusionTable::cheap_insert_delete(char32_t c) const {
    return text::is_punct(c) || text::is_space(c);
}

ConfusionTable ConfusionTable::defaults() {
    ConfusionTable t;
    t.add_pair(U'l', U't');
    t.add_pair(U't', U'f');
    t.add_pair(U'l', U'f');
    t.add_pair(U'u', U'v');
    t.add_pair(U'o', U'0');
    t.add_pair(U'l', U'1');
    t.add_pair(U'i', U'l');
    t.add_pair(U's', U'5');
    t.add_pair(U'b', U'8');
    t.add_pair(U'z', U'2');
    t.digraphs.push_back({U"rn", U'm'});
    return t;
}

ConfusionTable ConfusionTable::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open confusion table: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const ordered_json::exception& e) {
        throw ConfigError("confusion table " + path + ": " + e.what());
    }
    ConfusionTable t;
    t.common_cost = j.value("common_cost", 0.1);
    t.default_cost = j.value("default_cost", 1.0);
    if (!(t.common_cost > 0.0 && t.common_cost < t.default_cost))
        throw ConfigError("confusion table: common_cost must be in (0, default_cost)");
    for (const auto& p : j.value("pairs", ordered_json::array())) {
        std::u32string a = text::decode_utf8(p.at(0).get<std::string>());
        std::u32string b = text::decode_utf8(p.at(1).get<std::string>());
        if (a.size() != 1 || b.size() != 1)
            throw ConfigError("confusion table: pair entries must be single characters");
        t.add_pair(a[0], b[0]);
    }
    for (const auto& p : j.value("digraphs", ordered_json::array())) {
        std::u32string a = text::fold(text::decode_utf8(p.at(0).get<std::string>()));
        std::u32string b = text::fold(text::decode_utf8(p.at(1).get<std::string>()));
        if (a.size() != 2 || b.size() != 1)
            throw ConfigError("confusion table: digraph entries must map two chars to one");
        t.digraphs.push_back({a, b[0]});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Distances

namespace {

double sub_cost(char32_t a, char32_t b, const ConfusionTable& t) {
    if (a == b) return 0.0;
    if (t.is_pair(a, b)) return t.common_cost;
    return t.default_cost;
}

double indel_cost(char32_t c, const ConfusionTable& t) {
    return t.cheap_insert_delete(c) ? t.common_cost : t.default_cost;
}

double wed_u32(const std::u32string& a, const std::u32string& b, const ConfusionTable& t) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 1; i <= m; ++i) dp[i][0] = dp[i - 1][0] + indel_cost(a[i - 1], t);
    for (std::size_t j = 1; j <= n; ++j) dp[0][j] = dp[0][j - 1] + indel_cost(b[j - 1], t);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            double best = dp[i - 1][j - 1] + sub_cost(a[i - 1], b[j - 1], t);
            best = std::min(best, dp[i - 1][j] + indel_cost(a[i - 1], t));
            best = std::min(best, dp[i][j - 1] + indel_cost(b[j - 1], t));
            for (const auto& [dg, ch] : t.digraphs) {
                if (i >= 2 && a[i - 2] == dg[0] && a[i - 1] == dg[1] && b[j - 1] == ch)
                    best = std::min(best, dp[i - 2][j - 1] + t.common_cost);
                if (j >= 2 && b[j - 2] == dg[0] && b[j - 1] == dg[1] && a[i - 1] == ch)
                    best = std::min(best, dp[i - 1][j - 2] + t.common_cost);
            }
            dp[i][j] = best;
        }
    }
    return dp[m][n];
}

} // namespace

double weighted_edit_distance(const std::string& a, const std::string& b,
                              const ConfusionTable& table) {
    return wed_u32(text::fold(text::decode_utf8(a)), text::fold(text::decode_utf8(b)), table);
}

int levenshtein(const std::string& a, const std::string& b) {
    std::u32string ua = text::decode_utf8(a), ub = text::decode_utf8(b);
    const std::size_t m = ua.size(), n = ub.size();
    std::vector<int> prev(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= n; ++j) {
            int cost = ua[i - 1] == ub[j - 1] ? 0 : 1;
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

// ---------------------------------------------------------------------------
// Approximate keyword search

namespace {

/// Cheapest conversion of the phrase into any substring of the line
/// (start and end free). Lower bound for every windowed span distance.
double free_substring_distance(const std::u32string& phrase, const std::u32string& line,
                               const ConfusionTable& t) {
    const std::size_t m = phrase.size(), n = line.size();
    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 1; i <= m; ++i) dp[i][0] = dp[i - 1][0] + indel_cost(phrase[i - 1], t);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            double best = dp[i - 1][j - 1] + sub_cost(phrase[i - 1], line[j - 1], t);
            best = std::min(best, dp[i - 1][j] + indel_cost(phrase[i - 1], t));
            best = std::min(best, dp[i][j - 1] + indel_cost(line[j - 1], t));
            for (const auto& [dg, ch] : t.digraphs) {
                if (i >= 2 && phrase[i - 2] == dg[0] && phrase[i - 1] == dg[1] && line[j - 1] == ch)
                    best = std::min(best, dp[i - 2][j - 1] + t.common_cost);
                if (j >= 2 && line[j - 2] == dg[0] && line[j - 1] == dg[1] && phrase[i - 1] == ch)
                    best = std::min(best, dp[i - 1][j - 2] + t.common_cost);
            }
            dp[i][j] = best;
        }
    }
    double best = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j <= n; ++j) best = std::min(best, dp[m][j]);
    return best;
}

struct StartScan {
    // dist[L] for span lengths minL..maxL starting at a fixed offset
    std::vector<double> dist;
};

/// Distances from the phrase to line[s..s+L) for all L in [minL, maxL],
/// or empty when every row exceeds the threshold early.
std::vector<double> scan_from(const std::u32string& phrase, const std::u32string& line,
                              std::size_t s, std::size_t min_len, std::size_t max_len,
                              double threshold, const ConfusionTable& t) {
    const std::size_t m = phrase.size();
    const std::size_t n = std::min(max_len, line.size() - s);
    if (n < min_len) return {};
    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
    for (std::size_t j = 1; j <= n; ++j) dp[0][j] = dp[0][j - 1] + indel_cost(line[s + j - 1], t);
    for (std::size_t i = 1; i <= m; ++i) {
        dp[i][0] = dp[i - 1][0] + indel_cost(phrase[i - 1], t);
        double row_min = dp[i][0];
        for (std::size_t j = 1; j <= n; ++j) {
            double best = dp[i - 1][j - 1] + sub_cost(phrase[i - 1], line[s + j - 1], t);
            best = std::min(best, dp[i - 1][j] + indel_cost(phrase[i - 1], t));
            best = std::min(best, dp[i][j - 1] + indel_cost(line[s + j - 1], t));
            for (const auto& [dg, ch] : t.digraphs) {
                if (i >= 2 && phrase[i - 2] == dg[0] && phrase[i - 1] == dg[1] &&
                    line[s + j - 1] == ch)
                    best = std::min(best, dp[i - 2][j - 1] + t.common_cost);
                if (j >= 2 && line[s + j - 2] == dg[0] && line[s + j - 1] == dg[1] &&
                    phrase[i - 1] == ch)
                    best = std::min(best, dp[i - 1][j - 2] + t.common_cost);
            }
            dp[i][j] = best;
            row_min = std::min(row_min, best);
        }
        if (row_min > threshold) return {};
    }
    std::vector<double> out(n + 1, std::numeric_limits<double>::max());
    for (std::size_t L = min_len; L <= n; ++L) out[L] = dp[m][L];
    return out;
}

constexpr double kDistEps = 1e-9;

} // namespace

std::vector<SpanMatch> find_keyword_similar_all(const std::string& line_text,
                                                const std::string& phrase,
                                                const ConfusionTable& table,
                                                const PipelineConfig& cfg) {
    std::u32string uphrase = text::fold(text::decode_utf8(phrase));
    std::u32string uline = text::fold(text::decode_utf8(line_text));
    if (uphrase.empty() || uline.empty()) return {};

    const std::size_t m = uphrase.size();
    const double threshold = cfg.similarity_threshold_ratio * static_cast<double>(m);
    const std::size_t window =
        static_cast<std::size_t>(std::ceil(cfg.similarity_threshold_ratio * static_cast<double>(m)));
    const std::size_t min_len = m > window ? m - window : 1;
    const std::size_t max_len = m + window;

    if (uline.size() < min_len) return {};
    if (free_substring_distance(uphrase, uline, table) > threshold + kDistEps) return {};

    std::vector<SpanMatch> out;
    for (std::size_t s = 0; s + min_len <= uline.size(); ++s) {
        std::vector<double> dist = scan_from(uphrase, uline, s, min_len, max_len, threshold, table);
        if (dist.empty()) continue;
        double best = std::numeric_limits<double>::max();
        std::size_t best_len = 0;
        for (std::size_t L = min_len; L < dist.size(); ++L) {
            if (dist[L] + kDistEps < best) {
                best = dist[L];
                best_len = L;
            }
        }
        if (best_len > 0 && best <= threshold + kDistEps)
            out.push_back(SpanMatch{static_cast<int>(s), static_cast<int>(s + best_len), best});
    }
    return out;
}

std::optional<SpanMatch> find_keyword_similar(const std::string& line_text,
                                              const std::string& phrase,
                                              const ConfusionTable& table,
                                              const PipelineConfig& cfg) {
    std::vector<SpanMatch> all = find_keyword_similar_all(line_text, phrase, table, cfg);
    if (all.empty()) return std::nullopt;
    const SpanMatch* best = &all.front();
    for (const SpanMatch& s : all)
        if (s.distance + kDistEps < best->distance) best = &s;
    return *best;
}

// ---------------------------------------------------------------------------
// Keyword sets

const std::set<std::string>& keyword_labels() {
    static const std::set<std::string> labels = {
        "INVOICE NUMBER", "ORDER NUMBER",   "INVOICE DATE",  "DUE DATE",
        "PAYMENT DATE",   "PAYMENT METHOD", "TOTAL DUE",     "AMOUNT PAID",
        "SELLER",         "BUYER",          "DELIVERY",      "BANK",
        "VAT NUMBER",     "IBAN",           "SWIFT",         "ACCOUNT NUMBER",
        "PAGE NUMBER",    "COMPANY ID",     "EMAIL",         "PHONE NUMBER",
        "WEBSITE",        "TITLE",          "CONTACT",
    };
    return labels;
}

void KeywordSet::validate() const {
    if (language.empty()) throw ConfigError("keyword set: language must be set");
    for (const auto& [label, phrases] : entries) {
        if (!keyword_labels().count(label))
            throw ConfigError("keyword set '" + language + "': unknown label '" + label + "'");
        if (phrases.empty())
            throw ConfigError("keyword set '" + language + "': label '" + label + "' has no phrases");
        for (const auto& p : phrases) {
            if (p.phrase.empty())
                throw ConfigError("keyword set '" + language + "': empty phrase under '" + label + "'");
            if (p.phrase != text::fold_utf8(p.phrase))
                throw ConfigError("keyword set '" + language + "': phrase '" + p.phrase +
                                  "' must be lowercase");
        }
    }
}

KeywordSet KeywordSet::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open keyword set: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const ordered_json::exception& e) {
        throw ConfigError("keyword set " + path + ": " + e.what());
    }
    KeywordSet ks;
    ks.language = j.value("language", "");
    for (const auto& [label, arr] : j.value("keywords", ordered_json::object()).items()) {
        std::vector<KeywordPhrase> phrases;
        for (const auto& entry : arr) {
            KeywordPhrase p;
            if (entry.is_string()) {
                p.phrase = entry.get<std::string>();
            } else {
                p.phrase = entry.at("phrase").get<std::string>();
                p.line_initial_only = entry.value("line_initial", false);
            }
            phrases.push_back(std::move(p));
        }
        ks.entries[label] = std::move(phrases);
    }
    ks.validate();
    return ks;
}

// ---------------------------------------------------------------------------
// Keyword annotation

namespace {

struct KeywordCandidate {
    std::string label;
    std::size_t phrase_len = 0;
    int line = 0;
    int begin = 0;
    int end = 0;
    double distance = 0.0;
};

/// Exact case-insensitive occurrences of the phrase (code point offsets).
std::vector<std::pair<int, int>> exact_occurrences(const std::u32string& folded_line,
                                                   const std::u32string& folded_phrase) {
    std::vector<std::pair<int, int>> spans;
    if (folded_phrase.empty()) return spans;
    std::size_t pos = 0;
    while ((pos = folded_line.find(folded_phrase, pos)) != std::u32string::npos) {
        spans.push_back({static_cast<int>(pos), static_cast<int>(pos + folded_phrase.size())});
        pos += 1;
    }
    return spans;
}

bool spans_overlap(int line_a, int b1, int e1, int line_b, int b2, int e2) {
    return line_a == line_b && b1 < e2 && b2 < e1;
}

} // namespace

void annotate_keywords(Block& block, const KeywordSet& keywords, MatchMode mode,
                       const ConfusionTable& table, const PipelineConfig& cfg) {
    std::vector<KeywordCandidate> candidates;
    for (int li = 0; li < block.num_lines(); ++li) {
        const std::string& line_text = block.lines[li].text;
        std::u32string folded_line = text::fold(text::decode_utf8(line_text));
        for (const auto& [label, phrases] : keywords.entries) {
            for (const KeywordPhrase& kp : phrases) {
                std::u32string folded_phrase = text::fold(text::decode_utf8(kp.phrase));
                if (mode == MatchMode::Regex) {
                    for (auto [b, e] : exact_occurrences(folded_line, folded_phrase)) {
                        if (kp.line_initial_only && b != 0) continue;
                        candidates.push_back(
                            {label, folded_phrase.size(), li, b, e, 0.0});
                    }
                } else {
                    for (const SpanMatch& s :
                         find_keyword_similar_all(line_text, kp.phrase, table, cfg)) {
                        if (kp.line_initial_only && s.begin != 0) continue;
                        candidates.push_back(
                            {label, folded_phrase.size(), li, s.begin, s.end, s.distance});
                    }
                }
            }
        }
    }

    // longest phrase first, then lowest distance, then leftmost
    std::sort(candidates.begin(), candidates.end(),
              [](const KeywordCandidate& a, const KeywordCandidate& b) {
                  if (a.phrase_len != b.phrase_len) return a.phrase_len > b.phrase_len;
                  if (a.distance != b.distance) return a.distance < b.distance;
                  if (a.line != b.line) return a.line < b.line;
                  if (a.begin != b.begin) return a.begin < b.begin;
                  return a.label < b.label;
              });

    std::vector<KeywordCandidate> accepted;
    for (const KeywordCandidate& c : candidates) {
        bool clash = false;
        for (const KeywordCandidate& a : accepted) {
            if (spans_overlap(c.line, c.begin, c.end, a.line, a.begin, a.end)) {
                clash = true;
                break;
            }
        }
        if (!clash) accepted.push_back(c);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const KeywordCandidate& a, const KeywordCandidate& b) {
                  if (a.line != b.line) return a.line < b.line;
                  return a.begin < b.begin;
              });

    const char* source = mode == MatchMode::Regex ? "keyword-regex" : "keyword-similarity";
    for (const KeywordCandidate& c : accepted) {
        Annotation a;
        a.kind = AnnotationKind::Keyword;
        a.label = c.label;
        a.line = c.line;
        a.begin = c.begin;
        a.end = c.end;
        a.matched_text = text::substr_utf8(block.lines[c.line].text, c.begin, c.end);
        a.score = std::max(0.0, 1.0 - c.distance / static_cast<double>(std::max<std::size_t>(
                                                       1, c.phrase_len)));
        a.source = source;
        block.annotations.push_back(std::move(a));
    }
}

// ---------------------------------------------------------------------------
// Data type annotation

namespace {

const char* kMonths =
    "january|february|march|april|may|june|july|august|september|october|november|december";

std::string date_pattern() {
    std::string months(kMonths);
    return "\\d{1,2}\\.\\s?\\d{1,2}\\.\\s?\\d{4}"
           "|\\d{4}-\\d{2}-\\d{2}"
           "|\\d{1,2}/\\d{1,2}/\\d{4}"
           "|\\d{1,2}\\s+(" + months + ")\\s+\\d{4}"
           "|(" + months + ")\\s+\\d{1,2},\\s*\\d{4}";
}

std::string price_pattern() {
    // decimal part required, or an explicit currency token on either side
    const std::string cur = "(€|\\$|£|Kč|CZK|EUR|USD|GBP)";
    const std::string amount = "\\d{1,3}([ ,.]\\d{3})*";
    return "(" + cur + "\\s?)?" + amount + "[.,]\\d{2}(\\s?" + cur + ")?"
           "|" + cur + "\\s?" + amount +
           "|" + amount + "\\s?" + cur;
}

struct CompiledPattern {
    DataTypePattern spec;
    std::regex re;
};

bool pattern_case_insensitive(const std::string& label) {
    return label == "DATE" || label == "PAGE NUMBER" || label == "URL";
}

} // namespace

const std::vector<DataTypePattern>& default_datatype_patterns() {
    static const std::vector<DataTypePattern> patterns = {
        {"IBAN", "[A-Z]{2}\\d{2}[A-Z0-9]{11,30}", "iban_mod97", 1},
        {"VAT NUMBER", "[A-Z]{2}\\d{8,12}", "vat_country", 2},
        {"SWIFT", "[A-Z]{6}[A-Z0-9]{2}([A-Z0-9]{3})?", "swift_structure", 3},
        {"EMAIL", "[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\\.[A-Za-z]{2,}", "", 4},
        {"URL",
         "https?://[^\\s]+|www\\.[A-Za-z0-9.-]+\\.[A-Za-z]{2,}(/[^\\s]*)?|"
         "[A-Za-z0-9-]+\\.(com|org|net|cz|de|uk|eu|io|info)(/[A-Za-z0-9._/-]*)?",
         "", 5},
        {"DATE", date_pattern(), "date_plausible", 6},
        {"PAGE NUMBER",
         "(page|strana|str\\.?|p\\.)\\s*:?\\s*\\d{1,3}(\\s*(of|z|/)\\s*\\d{1,3})?|"
         "\\d{1,3}\\s*/\\s*\\d{1,3}",
         "", 7},
        {"PHONE", "(\\+\\d{1,3}[ .-]?)?(\\(\\d{1,4}\\)[ .-]?)?\\d{2,4}([ .-]\\d{2,4}){1,3}",
         "phone_digits", 8},
        {"ACCOUNT NUMBER", "(\\d{2,6}-)?\\d{2,10}/\\d{4}|\\d{3}-\\d{6,10}", "", 9},
        {"COMPANY ID", "\\d{8}", "ico_mod11", 10},
        {"PRICE", price_pattern(), "", 11},
        {"NUMBER", "[A-Z0-9][A-Z0-9/-]{4,}", "has_digit", 12},
    };
    return patterns;
}

bool iban_mod97_valid(const std::string& iban) {
    if (iban.size() < 15 || iban.size() > 34) return false;
    for (char c : iban)
        if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    if (!std::isalpha(static_cast<unsigned char>(iban[0])) ||
        !std::isalpha(static_cast<unsigned char>(iban[1])) ||
        !std::isdigit(static_cast<unsigned char>(iban[2])) ||
        !std::isdigit(static_cast<unsigned char>(iban[3])))
        return false;
    std::string rearranged = iban.substr(4) + iban.substr(0, 4);
    long long rem = 0;
    for (char c : rearranged) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            rem = (rem * 10 + (c - '0')) % 97;
        } else {
            int v = std::toupper(static_cast<unsigned char>(c)) - 'A' + 10;
            rem = (rem * 100 + v) % 97;
        }
    }
    return rem == 1;
}

bool ico_mod11_valid(const std::string& ico) {
    if (ico.size() != 8) return false;
    for (char c : ico)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    int sum = 0;
    for (int i = 0; i < 7; ++i) sum += (ico[i] - '0') * (8 - i);
    int check = (11 - (sum % 11)) % 10;
    return check == ico[7] - '0';
}

namespace {

const std::set<std::string>& iso_country_codes() {
    static const std::set<std::string> codes = {
        "AD", "AE", "AL", "AT", "AU", "BA", "BE", "BG", "BH", "BR", "BY", "CA", "CH", "CN",
        "CY", "CZ", "DE", "DK", "DO", "EE", "EG", "ES", "FI", "FO", "FR", "GB", "GE", "GI",
        "GL", "GR", "GT", "HR", "HU", "IE", "IL", "IN", "IS", "IT", "JO", "JP", "KR", "KW",
        "KZ", "LB", "LI", "LT", "LU", "LV", "MC", "MD", "ME", "MK", "MT", "MX", "NL", "NO",
        "NZ", "PK", "PL", "PT", "QA", "RO", "RS", "RU", "SA", "SE", "SG", "SI", "SK", "SM",
        "TN", "TR", "UA", "US", "VA", "XK", "ZA",
    };
    return codes;
}

bool vat_country_valid(const std::string& vat) {
    if (vat.size() < 10) return false;
    std::string cc = vat.substr(0, 2);
    if (cc == "EL") return true; // Greece uses EL on VAT ids
    return iso_country_codes().count(cc) > 0;
}

bool phone_digits_valid(const std::string& s) {
    int digits = 0;
    for (char c : s)
        if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
    return digits >= 9 && digits <= 15;
}

bool has_digit(const std::string& s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool date_plausible(const std::string& s) {
    std::vector<int> groups;
    int cur = -1;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            cur = cur < 0 ? c - '0' : cur * 10 + (c - '0');
        } else if (cur >= 0) {
            groups.push_back(cur);
            cur = -1;
        }
    }
    if (cur >= 0) groups.push_back(cur);
    bool alpha_month = std::any_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalpha(c) != 0;
    });
    if (alpha_month) {
        // day + year
        if (groups.size() != 2) return false;
        int day = groups[0] <= 31 ? groups[0] : groups[1];
        return day >= 1 && day <= 31;
    }
    if (groups.size() != 3) return false;
    if (s.find('-') != std::string::npos) {
        // yyyy-mm-dd
        return groups[1] >= 1 && groups[1] <= 12 && groups[2] >= 1 && groups[2] <= 31;
    }
    // d.m.yyyy or d/m/yyyy
    return groups[0] >= 1 && groups[0] <= 31 && groups[1] >= 1 && groups[1] <= 12;
}

} // namespace

bool swift_structure_valid(const std::string& swift) {
    if (swift.size() != 8 && swift.size() != 11) return false;
    for (int i = 0; i < 6; ++i)
        if (!std::isupper(static_cast<unsigned char>(swift[i]))) return false;
    if (!iso_country_codes().count(swift.substr(4, 2))) return false;
    for (std::size_t i = 6; i < swift.size(); ++i)
        if (!std::isalnum(static_cast<unsigned char>(swift[i]))) return false;
    // all-letter English words pass the structural test too; require a digit
    // or an explicit primary-office suffix
    bool digit = has_digit(swift);
    bool primary = swift.size() == 11 && swift.substr(8) == "XXX";
    return digit || primary;
}

bool run_validator(const std::string& name, const std::string& value) {
    if (name.empty()) return true;
    if (name == "iban_mod97") return iban_mod97_valid(value);
    if (name == "ico_mod11") return ico_mod11_valid(value);
    if (name == "swift_structure") return swift_structure_valid(value);
    if (name == "vat_country") return vat_country_valid(value);
    if (name == "phone_digits") return phone_digits_valid(value);
    if (name == "has_digit") return has_digit(value);
    if (name == "date_plausible") return date_plausible(value);
    throw ConfigError("unknown validator: '" + name + "'");
}

namespace {

void require_validator_resolvable(const std::string& name) {
    if (name.empty()) return;
    static const std::set<std::string> known = {
        "iban_mod97", "ico_mod11",    "swift_structure", "vat_country",
        "phone_digits", "has_digit", "date_plausible",
    };
    if (!known.count(name)) throw ConfigError("unknown validator: '" + name + "'");
}

} // namespace

namespace {

const std::vector<CompiledPattern>& compile(const std::vector<DataTypePattern>& patterns) {
    static std::map<const std::vector<DataTypePattern>*, std::vector<CompiledPattern>> cache;
    auto it = cache.find(&patterns);
    if (it != cache.end()) return it->second;
    std::vector<CompiledPattern> compiled;
    for (const DataTypePattern& p : patterns) {
        require_validator_resolvable(p.validator);
        auto flags = std::regex::ECMAScript;
        if (pattern_case_insensitive(p.label)) flags |= std::regex::icase;
        try {
            compiled.push_back({p, std::regex(p.pattern, flags)});
        } catch (const std::regex_error& e) {
            throw ConfigError("datatype pattern '" + p.label + "' does not compile: " + e.what());
        }
    }
    std::stable_sort(compiled.begin(), compiled.end(),
                     [](const CompiledPattern& a, const CompiledPattern& b) {
                         return a.spec.priority < b.spec.priority;
                     });
    return cache.emplace(&patterns, std::move(compiled)).first->second;
}

bool boundary_ok(const std::string& line, std::size_t begin, std::size_t end) {
    if (begin > 0 && std::isalnum(static_cast<unsigned char>(line[begin - 1]))) return false;
    if (end < line.size() && std::isalnum(static_cast<unsigned char>(line[end]))) return false;
    return true;
}

} // namespace

void annotate_datatypes(Block& block, const std::vector<DataTypePattern>& patterns) {
    const std::vector<CompiledPattern>& compiled = compile(patterns);
    for (int li = 0; li < block.num_lines(); ++li) {
        const std::string& line_text = block.lines[li].text;
        std::vector<std::pair<std::size_t, std::size_t>> taken; // byte spans
        for (const CompiledPattern& cp : compiled) {
            auto begin_it = std::sregex_iterator(line_text.begin(), line_text.end(), cp.re);
            for (auto mit = begin_it; mit != std::sregex_iterator(); ++mit) {
                std::size_t b = static_cast<std::size_t>(mit->position());
                std::size_t e = b + static_cast<std::size_t>(mit->length());
                if (b == e) continue;
                if (!boundary_ok(line_text, b, e)) continue;
                bool overlap = false;
                for (auto [tb, te] : taken)
                    if (b < te && tb < e) {
                        overlap = true;
                        break;
                    }
                if (overlap) continue;
                std::string value = mit->str();
                if (!run_validator(cp.spec.validator, value)) continue;
                taken.push_back({b, e});
                Annotation a;
                a.kind = AnnotationKind::DataType;
                a.label = cp.spec.label;
                a.line = li;
                a.begin = static_cast<int>(text::codepoint_of_byte(line_text, b));
                a.end = static_cast<int>(text::codepoint_of_byte(line_text, e));
                a.matched_text = std::move(value);
                a.score = 1.0;
                a.source = "datatype";
                block.annotations.push_back(std::move(a));
            }
        }
    }
    std::stable_sort(block.annotations.begin(), block.annotations.end(),
                     [](const Annotation& a, const Annotation& b) {
                         if (a.line != b.line) return a.line < b.line;
                         return a.begin < b.begin;
                     });
}

// ---------------------------------------------------------------------------
// Validation and correction

namespace {

char digit_to_letter(char c) {
    switch (c) {
        case '0': return 'O';
        case '1': return 'I';
        case '2': return 'Z';
        case '5': return 'S';
        case '8': return 'B';
        case '6': return 'G';
        default: return c;
    }
}

char letter_to_digit(char c) {
    switch (c) {
        case 'O': case 'o': return '0';
        case 'I': case 'l': return '1';
        case 'S': case 's': return '5';
        case 'B': return '8';
        case 'Z': case 'z': return '2';
        default: return c;
    }
}

bool is_lookalike(char c) {
    return std::string("O0Il1S5B8Z2oszb").find(c) != std::string::npos;
}

void fix_position_to_letter(std::string& v, std::size_t i, CorrectionResult& r) {
    if (i >= v.size()) return;
    char c = v[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
        char fixed = digit_to_letter(c);
        if (fixed != c) {
            r.applied.push_back(std::string("digit '") + c + "' -> letter '" + fixed +
                                "' at position " + std::to_string(i));
            v[i] = fixed;
        }
    }
}

void fix_position_to_digit(std::string& v, std::size_t i, CorrectionResult& r) {
    if (i >= v.size()) return;
    char c = v[i];
    if (std::isalpha(static_cast<unsigned char>(c))) {
        char fixed = letter_to_digit(c);
        if (fixed != c) {
            r.applied.push_back(std::string("letter '") + c + "' -> digit '" + fixed +
                                "' at position " + std::to_string(i));
            v[i] = fixed;
        }
    }
}

void correct_email(CorrectionResult& r) {
    std::string& v = r.value;
    if (v.find('@') != std::string::npos) return;
    static const std::regex re(
        "^([A-Za-z0-9._%+-]+?)(&&|&|Q|\xC2\xA9)([A-Za-z0-9.-]+\\.[A-Za-z]{2,})$");
    std::smatch m;
    if (std::regex_match(v, m, re)) {
        r.applied.push_back("'" + m[2].str() + "' -> '@'");
        v = m[1].str() + "@" + m[3].str();
    }
}

void correct_vat(CorrectionResult& r) {
    std::string& v = r.value;
    if (v.size() < 4) return;
    fix_position_to_letter(v, 0, r);
    fix_position_to_letter(v, 1, r);
    if (std::isalpha(static_cast<unsigned char>(v[0])) &&
        std::isalpha(static_cast<unsigned char>(v[1]))) {
        for (std::size_t i = 2; i < v.size(); ++i) fix_position_to_digit(v, i, r);
    }
}

void correct_iban(CorrectionResult& r) {
    std::string& v = r.value;
    if (v.size() < 15) return;
    fix_position_to_letter(v, 0, r);
    fix_position_to_letter(v, 1, r);
    fix_position_to_digit(v, 2, r);
    fix_position_to_digit(v, 3, r);
}

void correct_all_digits(CorrectionResult& r, const std::string& separators) {
    std::string& v = r.value;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (separators.find(v[i]) != std::string::npos) continue;
        fix_position_to_digit(v, i, r);
    }
}

/// Digit-context repair: lookalike letters flanked by digits or separators.
void correct_digit_context(CorrectionResult& r, const std::string& separators) {
    std::string& v = r.value;
    auto digitish = [&](std::size_t i) {
        if (i >= v.size()) return true; // treat the ends as neutral
        return std::isdigit(static_cast<unsigned char>(v[i])) != 0 ||
               separators.find(v[i]) != std::string::npos;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        char c = v[i];
        if (!std::isalpha(static_cast<unsigned char>(c)) || letter_to_digit(c) == c) continue;
        bool left = i == 0 ? digitish(i + 1) : digitish(i - 1);
        bool right = i + 1 >= v.size() ? digitish(i - 1) : digitish(i + 1);
        if (left && right) fix_position_to_digit(v, i, r);
    }
}

void correct_swift(CorrectionResult& r) {
    std::string& v = r.value;
    if (v.size() != 8 && v.size() != 11) return;
    for (std::size_t i = 0; i < 6; ++i) fix_position_to_letter(v, i, r);
}

} // namespace

CorrectionResult validate_and_correct(const std::string& value, FieldType field) {
    CorrectionResult r;
    r.value = value;
    switch (field) {
        case FieldType::VatNumber:
            correct_vat(r);
            break;
        case FieldType::Email:
            correct_email(r);
            break;
        case FieldType::Iban:
            correct_iban(r);
            break;
        case FieldType::Swift:
            correct_swift(r);
            break;
        case FieldType::CompanyId:
            correct_all_digits(r, "");
            break;
        case FieldType::AccountNumber:
            correct_all_digits(r, "-/ ");
            break;
        case FieldType::PhoneNumber:
            correct_all_digits(r, "+()-./ ");
            break;
        case FieldType::InvoiceDate:
        case FieldType::DueDate:
        case FieldType::PaymentDate:
        case FieldType::TotalDue:
        case FieldType::AmountPaid:
        case FieldType::PageNumber:
            correct_digit_context(r, "+()-,./ ");
            break;
        case FieldType::InvoiceNumber:
        case FieldType::OrderNumber: {
            // mixed alphanumeric codes do not constrain positions
            bool ambiguous = std::any_of(value.begin(), value.end(), is_lookalike);
            if (ambiguous) r.applied.push_back("ambiguous lookalike characters left unchanged");
            break;
        }
        default:
            break;
    }
    return r;
}

} // namespace invox
