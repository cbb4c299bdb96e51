#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "invox/config.hpp"
#include "invox/document.hpp"
#include "invox/fields.hpp"

namespace invox {

/// Cost table for the weighted edit distance: substitutions of common OCR
/// confusion pairs and insertion/deletion of punctuation or whitespace get
/// a small cost, every other edit costs 1.0. Comparison is case-insensitive.
struct ConfusionTable {
    std::set<std::pair<char32_t, char32_t>> pairs;        // stored folded, both orders
    std::vector<std::pair<std::u32string, char32_t>> digraphs; // e.g. "rn" <-> 'm'
    double common_cost = 0.1;
    double default_cost = 1.0;

    void add_pair(char32_t a, char32_t b);
    bool is_pair(char32_t a, char32_t b) const;
    bool cheap_insert_delete(char32_t c) const; // punctuation or whitespace

    /// Pairs {l,t},{t,f},{l,f},{u,v} plus standard OCR lookalikes and the
    /// rn<->m digraph.
    static ConfusionTable defaults();
    static ConfusionTable from_json_file(const std::string& path);
};

/// Weighted Levenshtein distance (substitution/insertion/deletion, no
/// transposition) with the table's costs, case-insensitive.
double weighted_edit_distance(const std::string& a, const std::string& b,
                              const ConfusionTable& table);

/// Plain unweighted Levenshtein distance over code points.
int levenshtein(const std::string& a, const std::string& b);

struct SpanMatch {
    int begin = 0; // code point offsets into the line text
    int end = 0;
    double distance = 0.0;
};

/// Best substring of line_text within the weighted distance threshold
/// (similarity_threshold_ratio x phrase length). Span lengths are examined
/// within +-ceil(0.15 x len) of the phrase length; the leftmost span of
/// lowest distance wins. Empty optional when nothing qualifies.
std::optional<SpanMatch> find_keyword_similar(const std::string& line_text,
                                              const std::string& phrase,
                                              const ConfusionTable& table,
                                              const PipelineConfig& cfg);

/// All qualifying spans (used by SIMILARITY annotation before overlap
/// resolution); at most one span per start offset.
std::vector<SpanMatch> find_keyword_similar_all(const std::string& line_text,
                                                const std::string& phrase,
                                                const ConfusionTable& table,
                                                const PipelineConfig& cfg);

struct KeywordPhrase {
    std::string phrase;           // lowercase
    bool line_initial_only = false;
};

/// Keyword label -> phrase list for one language.
struct KeywordSet {
    std::string language;
    std::map<std::string, std::vector<KeywordPhrase>> entries;

    void validate() const; // throws ConfigError
    static KeywordSet from_json_file(const std::string& path);
};

/// The fixed keyword label vocabulary.
const std::set<std::string>& keyword_labels();

enum class MatchMode { Regex, Similarity };

/// Adds KEYWORD annotations for phrase matches in the block's lines.
/// Regex mode requires exact case-insensitive occurrences; similarity mode
/// accepts spans within the weighted distance threshold. Overlapping matches
/// are resolved longest-phrase-first.
void annotate_keywords(Block& block, const KeywordSet& keywords, MatchMode mode,
                       const ConfusionTable& table, const PipelineConfig& cfg);

struct DataTypePattern {
    std::string label;     // DATE, PRICE, IBAN, ...
    std::string pattern;   // ECMAScript regular expression source
    std::string validator; // named check, empty for none
    int priority = 0;      // lower value matched first
};

/// The built-in recognizers for dates, prices, numbers, VAT numbers, IBAN,
/// SWIFT, email, phone, URL, account number, page number and company id.
const std::vector<DataTypePattern>& default_datatype_patterns();

/// Adds DATATYPE annotations for every non-overlapping pattern match that
/// passes its validator.
void annotate_datatypes(Block& block, const std::vector<DataTypePattern>& patterns);

/// Named validators.
bool iban_mod97_valid(const std::string& iban);
bool ico_mod11_valid(const std::string& ico);
bool swift_structure_valid(const std::string& swift);
bool run_validator(const std::string& name, const std::string& value);

struct CorrectionResult {
    std::string value;
    std::vector<std::string> applied; // one entry per applied rule
};

/// Field-specific OCR repair: VAT country prefixes, email at-symbol
/// replacements and lookalike digit/letter normalization where the field
/// format constrains the position. Idempotent; unknown situations are
/// logged and left unchanged.
CorrectionResult validate_and_correct(const std::string& value, FieldType field);

} // namespace invox
