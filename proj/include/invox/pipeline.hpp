#pragma once

#include <string>

#include "invox/document.hpp"
#include "invox/extract.hpp"
#include "invox/resources.hpp"
#include "invox/textannot.hpp"

namespace invox {

struct AnnotateOptions {
    MatchMode mode = MatchMode::Similarity;
    std::string language;          // empty = detect from the document text
    bool enable_keywords = true;   // ablation switch
    bool enable_datatypes = true;  // ablation switch, covers data/entity/address annotators
};

/// Detects the language, runs the annotators over every block, then block
/// type detection and role classification.
void annotate_document(Document& doc, const ResourceBundle& res, const AnnotateOptions& opts);

/// analyze + annotate + extract in one call.
ExtractionReport run_pipeline(const std::vector<PageWords>& pages, const std::string& source_id,
                              const ResourceBundle& res, const AnnotateOptions& opts,
                              Document* out_doc = nullptr);

} // namespace invox
