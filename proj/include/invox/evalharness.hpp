#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invox/config.hpp"
#include "invox/extract.hpp"
#include "invox/fields.hpp"
#include "invox/ingest.hpp"

namespace invox {

struct GoldItem {
    FieldType field = FieldType::InvoiceNumber;
    PartyRole role = PartyRole::None;
    std::string value;

    bool operator==(const GoldItem&) const = default;
};

struct GoldRecord {
    std::string source_id;
    std::vector<GoldItem> items;

    bool operator==(const GoldRecord&) const = default;
};

std::string gold_to_jsonl(const std::vector<GoldRecord>& records);
std::vector<GoldRecord> gold_from_jsonl(const std::string& text);

enum class MatchClass { Match, Partial, Mismatch };
std::string to_string(MatchClass m);

/// Plain Levenshtein protocol: distance 0 is a match, below the threshold a
/// partial match, otherwise a mismatch. Company name and address first try
/// the containment relaxation: the main tokens (tokens minus legal-form
/// suffixes and punctuation) of one side contained in the other count as a
/// match.
MatchClass classify_match(const std::string& gold, const std::string& extracted, FieldType field,
                          const PipelineConfig& cfg);

struct FieldScore {
    int match = 0;
    int partial = 0;
    int mismatch = 0;
    int total() const { return match + partial + mismatch; }
    double match_rate() const { return total() ? static_cast<double>(match) / total() : 0.0; }
};

struct ScoreReport {
    std::map<std::string, FieldScore> per_field;
    FieldScore overall;
};

/// Scores extraction reports against gold records. Role-tagged subfields are
/// compared only within the same role, so role misclassification counts all
/// subfields as mismatches. Throws MissingReportError when a gold source_id
/// has no report.
ScoreReport score_run(const std::vector<GoldRecord>& gold,
                      const std::vector<ExtractionReport>& reports, const PipelineConfig& cfg);

std::string score_to_json(const ScoreReport& report);
std::string score_to_csv(const ScoreReport& report);

/// OCR noise injection knobs; all probabilities are per character.
struct NoiseModel {
    double char_substitution = 0.0; // confusion-pair swap
    double punct_drop = 0.0;
    double digit_duplication = 0.0;
    double at_symbol_error = 0.0;   // @ -> &&, Q, or the copyright sign

    static NoiseModel uniform(double p) { return NoiseModel{p, p, p, p}; }
};

/// Layout template for the synthetic corpus, loaded from JSON.
struct TemplateElement {
    std::string type;        // title, page_number, field, party, bank, footer_contact, text
    std::string field;       // for type == field
    std::string arrangement; // keyword_left, keyword_above, data_right_block
    std::string role;        // SELLER, BUYER, DELIVERY for party/footer_contact
    std::string heading;     // above, inline, none
    std::string text;        // for title/text elements
    std::vector<std::string> items;
    int x = 0;
    int y = 0;
    int font = 0; // 0 = template body font
};

struct CorpusTemplate {
    std::string name;
    std::string language = "en";
    int page_width = 1240;
    int page_height = 1754;
    int body_font = 20;
    std::vector<TemplateElement> elements;
};

CorpusTemplate template_from_json(const std::string& json_text);
std::vector<CorpusTemplate> load_templates(const std::string& dir);

struct PageLabel {
    std::string source_id;
    int page = 1;
    int label = 0; // 1 = invoice first page
};

struct GeneratedDocument {
    std::string source_id;
    std::string language;
    std::vector<PageWords> pages;
    std::optional<GoldRecord> gold; // absent for non-invoice documents
    std::vector<PageLabel> page_labels;
};

struct CorpusOptions {
    int count = 10;
    std::uint64_t seed = 1;
    NoiseModel noise;
    double continuation_fraction = 0.0; // invoices gaining a second page
    double other_fraction = 0.0;        // extra non-invoice documents
};

/// Deterministic synthetic corpus: templates are cycled, values are drawn
/// from the seed, noise is applied to the word boxes while the gold values
/// stay clean.
std::vector<GeneratedDocument> generate_corpus(const std::vector<CorpusTemplate>& templates,
                                               const CorpusOptions& opts);

std::string page_labels_to_jsonl(const std::vector<PageLabel>& labels);
std::vector<PageLabel> page_labels_from_jsonl(const std::string& text);

} // namespace invox
