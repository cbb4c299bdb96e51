#include "invox/extract.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "invox/errors.hpp"
#include "invox/text.hpp"
#include "invox/textannot.hpp"

namespace invox {

using nlohmann::ordered_json;

namespace {

struct AnnotationRef {
    int page_index = 0;
    const Page* page = nullptr;
    const Block* block = nullptr;
    const Annotation* annotation = nullptr;
};

bool label_in(const std::vector<std::string>& labels, const std::string& label) {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

/// All annotations of one kind with a label from the given set, in reading
/// order (page, block top, block id, line, begin).
std::vector<AnnotationRef> collect(const Document& doc, AnnotationKind kind,
                                   const std::vector<std::string>& labels) {
    std::vector<AnnotationRef> out;
    for (std::size_t pi = 0; pi < doc.pages.size(); ++pi) {
        const Page& page = doc.pages[pi];
        for (const Block& block : page.blocks) {
            for (const Annotation& a : block.annotations) {
                if (a.kind != kind) continue;
                if (!labels.empty() && !label_in(labels, a.label)) continue;
                out.push_back({static_cast<int>(pi), &page, &block, &a});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const AnnotationRef& x, const AnnotationRef& y) {
        if (x.page_index != y.page_index) return x.page_index < y.page_index;
        if (x.block->bbox.top != y.block->bbox.top) return x.block->bbox.top < y.block->bbox.top;
        if (x.block->id != y.block->id) return x.block->id < y.block->id;
        if (x.annotation->line != y.annotation->line) return x.annotation->line < y.annotation->line;
        return x.annotation->begin < y.annotation->begin;
    });
    return out;
}

/// Neighbor block score for off-line data search: the expected data type
/// counts high, any other data counts low and foreign keywords count as a
/// penalty.
double neighbor_score(const Block& block, const FieldSpec& spec, const PipelineConfig& cfg) {
    double score = 0.0;
    for (const Annotation& a : block.annotations) {
        if (a.kind == AnnotationKind::Keyword) {
            if (!label_in(spec.keyword_labels, a.label)) score += cfg.score_other_keyword;
        } else if (a.kind == AnnotationKind::DataType && a.label == spec.expected_data) {
            score += cfg.score_expected_data;
        } else {
            score += cfg.score_other_data;
        }
    }
    return score;
}

const Annotation* first_expected_data(const Block& block, const std::string& expected) {
    const Annotation* best = nullptr;
    for (const Annotation& a : block.annotations) {
        if (a.kind != AnnotationKind::DataType || a.label != expected) continue;
        if (!best || a.line < best->line || (a.line == best->line && a.begin < best->begin))
            best = &a;
    }
    return best;
}

std::string line_tail_after(const std::string& line_text, int end_cp) {
    std::string tail = text::substr_utf8(line_text, static_cast<std::size_t>(end_cp),
                                         text::length_utf8(line_text));
    std::size_t b = 0;
    while (b < tail.size() && (std::isspace(static_cast<unsigned char>(tail[b])) ||
                               tail[b] == ':' || tail[b] == '-' || tail[b] == '.' ||
                               tail[b] == ',' || tail[b] == ';' || tail[b] == '#'))
        ++b;
    return text::trim(tail.substr(b));
}

ExtractedField make_field(const FieldSpec& spec, std::string value, double key_conf,
                          double data_conf, double combine_conf, const AnnotationRef& where,
                          int line) {
    ExtractedField f;
    f.field = spec.field;
    f.role = PartyRole::None;
    CorrectionResult corrected = validate_and_correct(value, spec.field);
    f.value = corrected.value;
    f.key_conf = key_conf;
    f.data_conf = data_conf;
    f.combine_conf = combine_conf;
    f.page = where.page->number;
    f.block = where.block->id;
    f.line = line;
    return f;
}

} // namespace

std::optional<ExtractedField> extract_field(const Document& doc, const FieldSpec& spec,
                                            const PipelineConfig& cfg) {
    // (1) locate the keyword; general info blocks win, then topmost
    std::vector<AnnotationRef> keywords = collect(doc, AnnotationKind::Keyword, spec.keyword_labels);
    std::stable_sort(keywords.begin(), keywords.end(),
                     [](const AnnotationRef& x, const AnnotationRef& y) {
                         bool gx = x.block->has_type(BlockType::GeneralInfo);
                         bool gy = y.block->has_type(BlockType::GeneralInfo);
                         if (gx != gy) return gx;
                         return false;
                     });

    if (!keywords.empty()) {
        const AnnotationRef kw = keywords.front();
        const Annotation& ka = *kw.annotation;

        if (!spec.expected_data.empty()) {
            // (2) expected data on the keyword line, after the keyword span
            const Annotation* same_line = nullptr;
            for (const Annotation& a : kw.block->annotations) {
                if (a.kind != AnnotationKind::DataType || a.label != spec.expected_data) continue;
                if (a.line != ka.line || a.begin < ka.end) continue;
                if (!same_line || a.begin < same_line->begin) same_line = &a;
            }
            if (same_line)
                return make_field(spec, same_line->matched_text, cfg.key_conf, cfg.data_conf, 1.0,
                                  kw, same_line->line);

            // (3) weighted right vs bottom/bottom-right neighbor search
            const Block* winner = nullptr;
            double winner_score = 0.0;
            for (Direction d : {Direction::Right, Direction::Bottom, Direction::BottomRight}) {
                auto nid = kw.block->neighbor(d);
                if (!nid) continue;
                const Block* nb = kw.page->block_by_id(*nid);
                if (!nb || !first_expected_data(*nb, spec.expected_data)) continue;
                double score = neighbor_score(*nb, spec, cfg);
                if (score > 0.0 && (!winner || score > winner_score)) {
                    winner = nb;
                    winner_score = score;
                }
            }
            if (winner) {
                const Annotation* data = first_expected_data(*winner, spec.expected_data);
                AnnotationRef where{kw.page_index, kw.page, winner, data};
                return make_field(spec, data->matched_text, cfg.key_conf, cfg.data_conf, 1.0,
                                  where, data->line);
            }
        }

        // (4) keyword only: the keyword line's tail text
        std::string tail = line_tail_after(kw.block->lines[ka.line].text, ka.end);
        if (!tail.empty())
            return make_field(spec, tail, cfg.key_conf_only, 0.0, cfg.key_conf_only, kw, ka.line);
        return std::nullopt;
    }

    // (5) no keyword: unique structured information only
    if (spec.keyword_required || spec.expected_data.empty()) return std::nullopt;
    std::vector<AnnotationRef> data = collect(doc, AnnotationKind::DataType, {spec.expected_data});
    if (data.empty()) return std::nullopt;
    const AnnotationRef& d = data.front();
    return make_field(spec, d.annotation->matched_text, 0.0, cfg.data_conf_only,
                      cfg.data_conf_only, d, d.annotation->line);
}

std::optional<AddressSpan> extract_address_span(const Block& block, const PipelineConfig& cfg) {
    // start: first line with a road or house_number signpost
    int start = -1;
    for (const Annotation& a : block.annotations) {
        if (a.kind != AnnotationKind::AddressPart) continue;
        if (a.label != "road" && a.label != "house_number") continue;
        if (start < 0 || a.line < start) start = a.line;
    }
    if (start < 0) return std::nullopt;

    // end: the line holding the highest ranked label at or after the start
    int best_rank = std::numeric_limits<int>::max();
    int end = start;
    for (const Annotation& a : block.annotations) {
        if (a.kind != AnnotationKind::AddressPart || a.line < start) continue;
        int rank = 0;
        if (a.label == "country") rank = 0;
        else if (a.label == "city") rank = 1;
        else if (a.label == "city_district") rank = 2;
        else if (a.label == "suburb") rank = 3;
        else if (a.label == "postcode") rank = 4;
        else if (a.label == "road") rank = 5;
        else if (a.label == "house_number") rank = 6;
        else rank = 7;
        if (rank < best_rank || (rank == best_rank && a.line > end)) {
            best_rank = rank;
            end = a.line;
        }
    }

    AddressSpan span;
    span.start_line = start;
    span.end_line = end;
    for (int li = start; li <= end; ++li) {
        if (li > start) span.value += ", ";
        span.value += block.lines[li].text;
    }

    bool strong = false;
    for (const Annotation& a : block.annotations) {
        if (a.kind != AnnotationKind::AddressPart) continue;
        if (a.line < start || a.line > end) continue;
        if (a.label == "country" || a.label == "city") strong = true;
    }
    span.confidence = strong ? cfg.addr_conf_high : cfg.addr_conf_low;
    for (const Annotation& a : block.annotations) {
        if (a.kind != AnnotationKind::Entity) continue;
        if (a.line < start || a.line > end) continue;
        if (a.label == "LOCATION" || a.label == "CITY" || a.label == "COUNTRY") {
            span.confidence = std::min(1.0, span.confidence + cfg.addr_conf_entity_bonus);
            break;
        }
    }
    return span;
}

namespace {

struct RoleGroup {
    BlockType type;
    PartyRole role;
};

struct BlockRef {
    int page_index;
    const Page* page;
    const Block* block;
};

/// Keyword of the matching label on the same line before the data span.
bool keyworded_on_line(const Block& block, const Annotation& data,
                       const std::string& keyword_label) {
    for (const Annotation& a : block.annotations)
        if (a.kind == AnnotationKind::Keyword && a.label == keyword_label &&
            a.line == data.line && a.end <= data.begin)
            return true;
    return false;
}

void emit_datatype_field(std::vector<ExtractedField>& out, const std::vector<BlockRef>& blocks,
                         FieldType field, const std::string& data_label,
                         const std::string& keyword_label, PartyRole role,
                         const PipelineConfig& cfg) {
    for (const BlockRef& b : blocks) {
        for (const Annotation& a : b.block->annotations) {
            if (a.kind != AnnotationKind::DataType || a.label != data_label) continue;
            ExtractedField f;
            f.field = field;
            f.role = role;
            f.value = validate_and_correct(a.matched_text, field).value;
            bool kw = keyworded_on_line(*b.block, a, keyword_label);
            f.key_conf = kw ? cfg.key_conf : 0.0;
            f.data_conf = kw ? cfg.data_conf : cfg.data_conf_only;
            f.combine_conf = kw ? 1.0 : cfg.data_conf_only;
            f.page = b.page->number;
            f.block = b.block->id;
            f.line = a.line;
            out.push_back(std::move(f));
            return;
        }
    }
}

void emit_entity_field(std::vector<ExtractedField>& out, const std::vector<BlockRef>& blocks,
                       FieldType field, const std::string& entity_label, PartyRole role,
                       const PipelineConfig& cfg) {
    for (const BlockRef& b : blocks) {
        for (const Annotation& a : b.block->annotations) {
            if (a.kind != AnnotationKind::Entity || a.label != entity_label) continue;
            ExtractedField f;
            f.field = field;
            f.role = role;
            f.value = validate_and_correct(a.matched_text, field).value;
            f.key_conf = 0.0;
            f.data_conf = cfg.data_conf_only;
            f.combine_conf = cfg.data_conf_only;
            f.page = b.page->number;
            f.block = b.block->id;
            f.line = a.line;
            out.push_back(std::move(f));
            return;
        }
    }
}

} // namespace

std::vector<ExtractedField> assemble_role_groups(const Document& doc, const PipelineConfig& cfg) {
    static const RoleGroup kGroups[] = {
        {BlockType::SellerInfo, PartyRole::Seller},
        {BlockType::BuyerInfo, PartyRole::Buyer},
        {BlockType::DeliveryInfo, PartyRole::Delivery},
    };
    std::vector<ExtractedField> out;
    for (const RoleGroup& group : kGroups) {
        std::vector<BlockRef> blocks;
        for (std::size_t pi = 0; pi < doc.pages.size(); ++pi)
            for (const Block& b : doc.pages[pi].blocks)
                if (b.has_type(group.type)) blocks.push_back({static_cast<int>(pi), &doc.pages[pi], &b});
        if (blocks.empty()) continue;
        std::sort(blocks.begin(), blocks.end(), [](const BlockRef& x, const BlockRef& y) {
            if (x.page_index != y.page_index) return x.page_index < y.page_index;
            if (x.block->bbox.top != y.block->bbox.top) return x.block->bbox.top < y.block->bbox.top;
            return x.block->id < y.block->id;
        });

        emit_entity_field(out, blocks, FieldType::CompanyName, "ORGANIZATION", group.role, cfg);

        for (const BlockRef& b : blocks) {
            std::optional<AddressSpan> span = extract_address_span(*b.block, cfg);
            if (!span) continue;
            ExtractedField f;
            f.field = FieldType::Address;
            f.role = group.role;
            f.value = span->value;
            f.key_conf = 0.0;
            f.data_conf = span->confidence;
            f.combine_conf = span->confidence;
            f.page = b.page->number;
            f.block = b.block->id;
            f.line = span->start_line;
            out.push_back(std::move(f));
            break;
        }

        emit_datatype_field(out, blocks, FieldType::VatNumber, "VAT NUMBER", "VAT NUMBER",
                            group.role, cfg);
        emit_datatype_field(out, blocks, FieldType::CompanyId, "COMPANY ID", "COMPANY ID",
                            group.role, cfg);
        emit_datatype_field(out, blocks, FieldType::Email, "EMAIL", "EMAIL", group.role, cfg);
        emit_datatype_field(out, blocks, FieldType::PhoneNumber, "PHONE", "PHONE NUMBER",
                            group.role, cfg);
        emit_datatype_field(out, blocks, FieldType::Website, "URL", "WEBSITE", group.role, cfg);
        emit_entity_field(out, blocks, FieldType::Contacts, "PERSON", group.role, cfg);
    }
    return out;
}

ExtractionReport extract_all(const Document& doc, const std::vector<FieldSpec>& specs,
                             const PipelineConfig& cfg) {
    ExtractionReport report;
    report.source_id = doc.source_id;
    for (const FieldSpec& spec : specs) {
        std::optional<ExtractedField> f = extract_field(doc, spec, cfg);
        if (f) report.fields.push_back(std::move(*f));
    }
    std::vector<ExtractedField> groups = assemble_role_groups(doc, cfg);
    report.fields.insert(report.fields.end(), groups.begin(), groups.end());

    // drop exact duplicates, keeping first occurrences
    std::vector<ExtractedField> unique;
    for (const ExtractedField& f : report.fields) {
        bool dup = std::any_of(unique.begin(), unique.end(), [&](const ExtractedField& u) {
            return u.field == f.field && u.role == f.role && u.value == f.value;
        });
        if (!dup) unique.push_back(f);
    }
    report.fields = std::move(unique);
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

namespace {

ordered_json field_to_json(const ExtractedField& f) {
    ordered_json j;
    j["field"] = to_string(f.field);
    j["role"] = to_string(f.role);
    j["value"] = f.value;
    j["key_conf"] = f.key_conf;
    j["data_conf"] = f.data_conf;
    j["combine_conf"] = f.combine_conf;
    j["page"] = f.page;
    j["block"] = f.block;
    j["line"] = f.line;
    return j;
}

ExtractedField field_from_json(const ordered_json& j) {
    ExtractedField f;
    f.field = field_type_from_string(j.at("field").get<std::string>());
    f.role = party_role_from_string(j.at("role").get<std::string>());
    f.value = j.at("value").get<std::string>();
    f.key_conf = j.value("key_conf", 0.0);
    f.data_conf = j.value("data_conf", 0.0);
    f.combine_conf = j.value("combine_conf", 0.0);
    f.page = j.value("page", 0);
    f.block = j.value("block", -1);
    f.line = j.value("line", -1);
    return f;
}

ordered_json report_to_json_value(const ExtractionReport& report) {
    ordered_json j;
    j["source_id"] = report.source_id;
    ordered_json fields = ordered_json::array();
    for (const ExtractedField& f : report.fields) fields.push_back(field_to_json(f));
    j["fields"] = fields;
    return j;
}

ExtractionReport report_from_json_impl(const ordered_json& j) {
    ExtractionReport report;
    report.source_id = j.at("source_id").get<std::string>();
    for (const auto& fj : j.value("fields", ordered_json::array()))
        report.fields.push_back(field_from_json(fj));
    return report;
}

} // namespace

std::string report_to_json(const ExtractionReport& report) {
    return report_to_json_value(report).dump(2);
}

ExtractionReport report_from_json_value(const std::string& json_text) {
    try {
        return report_from_json_impl(ordered_json::parse(json_text));
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("report: ") + e.what());
    }
}

std::string reports_to_json(const std::vector<ExtractionReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const ExtractionReport& r : reports) arr.push_back(report_to_json_value(r));
    return arr.dump(2);
}

std::vector<ExtractionReport> reports_from_json(const std::string& json_text) {
    ordered_json arr;
    try {
        arr = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("reports: ") + e.what());
    }
    std::vector<ExtractionReport> out;
    if (!arr.is_array()) throw SchemaError("reports: expected a JSON array");
    for (const auto& j : arr) out.push_back(report_from_json_impl(j));
    return out;
}

} // namespace invox
