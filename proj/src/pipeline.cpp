#include "invox/pipeline.hpp"

#include "invox/layout.hpp"

namespace invox {

void annotate_document(Document& doc, const ResourceBundle& res, const AnnotateOptions& opts) {
    std::string language = opts.language;
    if (language.empty())
        language = detect_main_language(doc.full_text(), res.term_dicts,
                                        res.cfg.fallback_language);
    doc.main_language = language;

    const KeywordSet& keywords = res.keywords_for(language);
    for (Page& page : doc.pages) {
        for (Block& block : page.blocks) {
            if (opts.enable_keywords)
                annotate_keywords(block, keywords, opts.mode, res.confusions, res.cfg);
            if (opts.enable_datatypes) {
                annotate_datatypes(block, default_datatype_patterns());
                std::vector<Annotation> ner = gazetteer_annotate(block, *res.gazetteer);
                std::vector<Annotation> addr = address_annotate(block, *res.gazetteer);
                ensemble_locations(block, ner, addr, res.cfg);
            }
        }
        detect_block_types(page, res.block_type_rules, res.cfg);
        classify_roles(page, res.role_rules, res.global_rules, res.cfg);
    }
}

ExtractionReport run_pipeline(const std::vector<PageWords>& pages, const std::string& source_id,
                              const ResourceBundle& res, const AnnotateOptions& opts,
                              Document* out_doc) {
    Document doc = analyze_document(pages, res.cfg, source_id);
    annotate_document(doc, res, opts);
    ExtractionReport report = extract_all(doc, res.field_specs, res.cfg);
    if (out_doc) *out_doc = std::move(doc);
    return report;
}

} // namespace invox
