#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invox/config.hpp"
#include "invox/document.hpp"
#include "invox/fields.hpp"

namespace invox {

/// One extraction run over a document.
struct ExtractionReport {
    std::string source_id;
    std::vector<ExtractedField> fields;

    bool operator==(const ExtractionReport&) const = default;
};

/// Keyword-anchored field extraction: locate the keyword, look for the
/// expected data on the keyword line, then score the right and bottom /
/// bottom-right neighbor blocks, then fall back to the keyword line tail;
/// keywordless structured fields are recovered from the first validated
/// data match document-wide.
std::optional<ExtractedField> extract_field(const Document& doc, const FieldSpec& spec,
                                            const PipelineConfig& cfg);

struct AddressSpan {
    int start_line = 0;
    int end_line = 0;
    std::string value;
    double confidence = 0.0;
};

/// Multi-line address extraction: starts at the first line with a road or
/// house_number part and ends at the line holding the highest ranked label.
std::optional<AddressSpan> extract_address_span(const Block& block, const PipelineConfig& cfg);

/// Emits company name, address, vat number, company id, email, phone,
/// website and contact person for every role-labeled block group.
std::vector<ExtractedField> assemble_role_groups(const Document& doc, const PipelineConfig& cfg);

/// One pass per field spec plus the role groups.
ExtractionReport extract_all(const Document& doc, const std::vector<FieldSpec>& specs,
                             const PipelineConfig& cfg);

std::string report_to_json(const ExtractionReport& report);
ExtractionReport report_from_json_value(const std::string& json_text);
std::string reports_to_json(const std::vector<ExtractionReport>& reports);
std::vector<ExtractionReport> reports_from_json(const std::string& json_text);

} // namespace invox
