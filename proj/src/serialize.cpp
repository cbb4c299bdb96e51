#include "invox/serialize.hpp"

#include <charconv>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"

namespace invox {

using nlohmann::ordered_json;

namespace {

ordered_json bbox_to_json(const BBox& b) {
    return ordered_json{{"left", b.left}, {"top", b.top}, {"width", b.width}, {"height", b.height}};
}

BBox bbox_from_json(const ordered_json& j, const std::string& path) {
    try {
        return BBox{j.at("left").get<int>(), j.at("top").get<int>(), j.at("width").get<int>(),
                    j.at("height").get<int>()};
    } catch (const ordered_json::exception& e) {
        throw SchemaError(path + ": bad bbox: " + e.what());
    }
}

ordered_json word_to_json(const WordBox& w) {
    ordered_json j;
    j["text"] = w.text;
    j["bbox"] = bbox_to_json(w.bbox);
    if (w.ocr_confidence) j["conf"] = *w.ocr_confidence;
    j["font_height"] = w.style.font_height;
    return j;
}

ordered_json document_to_json(const Document& doc) {
    ordered_json root;
    root["schema_version"] = kDocSchemaVersion;
    root["source_id"] = doc.source_id;
    root["main_language"] = doc.main_language;
    ordered_json pages = ordered_json::array();
    for (const Page& page : doc.pages) {
        ordered_json pj;
        pj["number"] = page.number;
        pj["width"] = page.width;
        pj["height"] = page.height;
        if (page.is_invoice_first_page) pj["is_invoice_first_page"] = *page.is_invoice_first_page;
        ordered_json blocks = ordered_json::array();
        for (const Block& block : page.blocks) {
            ordered_json bj;
            bj["id"] = block.id;
            bj["bbox"] = bbox_to_json(block.bbox);
            bj["zone_v"] = to_string(block.zone_v);
            bj["zone_h"] = to_string(block.zone_h);
            ordered_json nj = ordered_json::object();
            for (Direction d : kAllDirections)
                if (auto n = block.neighbor(d)) nj[to_string(d)] = *n;
            bj["neighbors"] = nj;
            ordered_json types = ordered_json::array();
            for (BlockType t : block.block_types) types.push_back(to_string(t));
            bj["block_types"] = types;
            ordered_json lines = ordered_json::array();
            for (const Line& line : block.lines) {
                ordered_json lj;
                lj["bbox"] = bbox_to_json(line.bbox);
                ordered_json words = ordered_json::array();
                for (const WordBox& w : line.words) words.push_back(word_to_json(w));
                lj["words"] = words;
                lines.push_back(lj);
            }
            bj["lines"] = lines;
            ordered_json annots = ordered_json::array();
            for (const Annotation& a : block.annotations) {
                ordered_json aj;
                aj["kind"] = to_string(a.kind);
                aj["label"] = a.label;
                aj["line"] = a.line;
                aj["begin"] = a.begin;
                aj["end"] = a.end;
                aj["matched_text"] = a.matched_text;
                aj["score"] = a.score;
                aj["source"] = a.source;
                annots.push_back(aj);
            }
            bj["annotations"] = annots;
            blocks.push_back(bj);
        }
        pj["blocks"] = blocks;
        pages.push_back(pj);
    }
    root["pages"] = pages;
    return root;
}

std::string rebuild_line_text(const std::vector<WordBox>& words) {
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) text.push_back(' ');
        text += words[i].text;
    }
    return text;
}

Document document_from_json(const ordered_json& root) {
    Document doc;
    try {
        if (!root.contains("schema_version"))
            throw SchemaError("document: missing schema_version");
        int ver = root.at("schema_version").get<int>();
        if (ver != kDocSchemaVersion)
            throw SchemaError("document: unsupported schema_version " + std::to_string(ver));
        doc.source_id = root.value("source_id", "");
        doc.main_language = root.value("main_language", "");
        std::size_t pi = 0;
        for (const auto& pj : root.at("pages")) {
            std::string ppath = "pages[" + std::to_string(pi++) + "]";
            Page page;
            page.number = pj.at("number").get<int>();
            page.width = pj.at("width").get<int>();
            page.height = pj.at("height").get<int>();
            if (pj.contains("is_invoice_first_page"))
                page.is_invoice_first_page = pj.at("is_invoice_first_page").get<bool>();
            std::size_t bi = 0;
            for (const auto& bj : pj.value("blocks", ordered_json::array())) {
                std::string bpath = ppath + ".blocks[" + std::to_string(bi++) + "]";
                Block block;
                block.id = bj.at("id").get<int>();
                block.bbox = bbox_from_json(bj.at("bbox"), bpath);
                block.zone_v = zone_v_from_string(bj.at("zone_v").get<std::string>());
                block.zone_h = zone_h_from_string(bj.at("zone_h").get<std::string>());
                for (const auto& [key, val] : bj.value("neighbors", ordered_json::object()).items())
                    block.set_neighbor(direction_from_string(key), val.get<int>());
                for (const auto& tj : bj.value("block_types", ordered_json::array()))
                    block.block_types.insert(block_type_from_string(tj.get<std::string>()));
                for (const auto& lj : bj.at("lines")) {
                    Line line;
                    line.bbox = bbox_from_json(lj.at("bbox"), bpath);
                    for (const auto& wj : lj.at("words")) {
                        WordBox w;
                        w.text = wj.at("text").get<std::string>();
                        w.bbox = bbox_from_json(wj.at("bbox"), bpath);
                        if (wj.contains("conf")) w.ocr_confidence = wj.at("conf").get<double>();
                        w.style.font_height = wj.value("font_height", w.bbox.height);
                        line.words.push_back(std::move(w));
                    }
                    line.text = rebuild_line_text(line.words);
                    block.lines.push_back(std::move(line));
                }
                for (const auto& aj : bj.value("annotations", ordered_json::array())) {
                    Annotation a;
                    a.kind = annotation_kind_from_string(aj.at("kind").get<std::string>());
                    a.label = aj.at("label").get<std::string>();
                    a.line = aj.at("line").get<int>();
                    a.begin = aj.at("begin").get<int>();
                    a.end = aj.at("end").get<int>();
                    a.matched_text = aj.value("matched_text", "");
                    a.score = aj.value("score", 1.0);
                    a.source = aj.value("source", "");
                    block.annotations.push_back(std::move(a));
                }
                page.blocks.push_back(std::move(block));
            }
            doc.pages.push_back(std::move(page));
        }
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("document: ") + e.what());
    }
    validate_document(doc);
    return doc;
}

// ---------------------------------------------------------------------------
// XML: a minimal element/attribute subset sufficient for the schema below.

void xml_escape(std::ostream& os, const std::string& s) {
    for (char c : s) {
        switch (c) {
            case '&': os << "&amp;"; break;
            case '<': os << "&lt;"; break;
            case '>': os << "&gt;"; break;
            case '"': os << "&quot;"; break;
            case '\'': os << "&apos;"; break;
            default: os << c;
        }
    }
}

struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;
    std::string content;

    const std::string* attr(const std::string& key) const {
        for (const auto& [k, v] : attrs)
            if (k == key) return &v;
        return nullptr;
    }
    const std::string& require_attr(const std::string& key) const {
        const std::string* v = attr(key);
        if (!v) throw SchemaError("xml: element <" + name + "> missing attribute '" + key + "'");
        return *v;
    }
};

class XmlParser {
public:
    explicit XmlParser(const std::string& input) : s_(input) {}

    XmlNode parse() {
        skip_prolog();
        XmlNode root = parse_element();
        skip_ws();
        if (pos_ != s_.size()) throw SchemaError("xml: trailing content after root element");
        return root;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw SchemaError("xml: " + msg + " at byte " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    void skip_prolog() {
        skip_ws();
        while (pos_ + 1 < s_.size() && s_[pos_] == '<' &&
               (s_[pos_ + 1] == '?' || s_[pos_ + 1] == '!')) {
            std::size_t end = s_.find('>', pos_);
            if (end == std::string::npos) fail("unterminated prolog");
            pos_ = end + 1;
            skip_ws();
        }
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                s_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) fail("expected name");
        return s_.substr(start, pos_ - start);
    }

    std::string unescape(const std::string& raw) {
        std::string out;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string::npos) fail("unterminated entity");
            std::string ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else fail("unknown entity &" + ent + ";");
            i = semi;
        }
        return out;
    }

    XmlNode parse_element() {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected '<'");
        ++pos_;
        XmlNode node;
        node.name = parse_name();
        while (true) {
            skip_ws();
            if (pos_ >= s_.size()) fail("unterminated element <" + node.name + ">");
            if (s_[pos_] == '/') {
                if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '>') fail("expected '/>'");
                pos_ += 2;
                return node;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            std::string key = parse_name();
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '=') fail("expected '=' after attribute name");
            ++pos_;
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '"') fail("expected '\"'");
            ++pos_;
            std::size_t end = s_.find('"', pos_);
            if (end == std::string::npos) fail("unterminated attribute value");
            node.attrs.emplace_back(key, unescape(s_.substr(pos_, end - pos_)));
            pos_ = end + 1;
        }
        // children and/or text content until the closing tag
        while (true) {
            std::size_t lt = s_.find('<', pos_);
            if (lt == std::string::npos) fail("unterminated element <" + node.name + ">");
            node.content += unescape(s_.substr(pos_, lt - pos_));
            pos_ = lt;
            if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != node.name)
                    fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                skip_ws();
                if (pos_ >= s_.size() || s_[pos_] != '>') fail("expected '>'");
                ++pos_;
                return node;
            }
            node.children.push_back(parse_element());
        }
    }
};

int to_int(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("xml: " + where + ": expected integer, got '" + s + "'");
    }
}

double to_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("xml: " + where + ": expected number, got '" + s + "'");
    }
}

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_bbox_attrs(std::ostream& os, const BBox& b) {
    os << " left=\"" << b.left << "\" top=\"" << b.top << "\" width=\"" << b.width
       << "\" height=\"" << b.height << "\"";
}

BBox bbox_from_attrs(const XmlNode& n) {
    return BBox{to_int(n.require_attr("left"), n.name), to_int(n.require_attr("top"), n.name),
                to_int(n.require_attr("width"), n.name),
                to_int(n.require_attr("height"), n.name)};
}

std::string document_to_xml(const Document& doc) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<document schema_version=\"" << kDocSchemaVersion << "\" source_id=\"";
    xml_escape(os, doc.source_id);
    os << "\" main_language=\"";
    xml_escape(os, doc.main_language);
    os << "\">\n";
    for (const Page& page : doc.pages) {
        os << "  <page number=\"" << page.number << "\" width=\"" << page.width
           << "\" height=\"" << page.height << "\"";
        if (page.is_invoice_first_page)
            os << " first_page=\"" << (*page.is_invoice_first_page ? "true" : "false") << "\"";
        os << ">\n";
        for (const Block& block : page.blocks) {
            os << "    <block id=\"" << block.id << "\" zone_v=\"" << to_string(block.zone_v)
               << "\" zone_h=\"" << to_string(block.zone_h) << "\"";
            write_bbox_attrs(os, block.bbox);
            os << ">\n";
            for (Direction d : kAllDirections)
                if (auto n = block.neighbor(d))
                    os << "      <neighbor dir=\"" << to_string(d) << "\" ref=\"" << *n << "\"/>\n";
            for (BlockType t : block.block_types)
                os << "      <type>" << to_string(t) << "</type>\n";
            for (const Line& line : block.lines) {
                os << "      <line";
                write_bbox_attrs(os, line.bbox);
                os << ">\n";
                for (const WordBox& w : line.words) {
                    os << "        <word";
                    write_bbox_attrs(os, w.bbox);
                    os << " font_height=\"" << w.style.font_height << "\"";
                    if (w.ocr_confidence) os << " conf=\"" << fmt_double(*w.ocr_confidence) << "\"";
                    os << ">";
                    xml_escape(os, w.text);
                    os << "</word>\n";
                }
                os << "      </line>\n";
            }
            for (const Annotation& a : block.annotations) {
                os << "      <annotation kind=\"" << to_string(a.kind) << "\" label=\"";
                xml_escape(os, a.label);
                os << "\" line=\"" << a.line << "\" begin=\"" << a.begin << "\" end=\"" << a.end
                   << "\" score=\"" << fmt_double(a.score) << "\" source=\"";
                xml_escape(os, a.source);
                os << "\">";
                xml_escape(os, a.matched_text);
                os << "</annotation>\n";
            }
            os << "    </block>\n";
        }
        os << "  </page>\n";
    }
    os << "</document>\n";
    return os.str();
}

Document document_from_xml(const std::string& bytes) {
    XmlNode root = XmlParser(bytes).parse();
    if (root.name != "document") throw SchemaError("xml: root element must be <document>");
    int ver = to_int(root.require_attr("schema_version"), "document");
    if (ver != kDocSchemaVersion)
        throw SchemaError("xml: unsupported schema_version " + std::to_string(ver));
    Document doc;
    doc.source_id = root.require_attr("source_id");
    doc.main_language = root.require_attr("main_language");
    for (const XmlNode& pn : root.children) {
        if (pn.name != "page") throw SchemaError("xml: unexpected element <" + pn.name + ">");
        Page page;
        page.number = to_int(pn.require_attr("number"), "page");
        page.width = to_int(pn.require_attr("width"), "page");
        page.height = to_int(pn.require_attr("height"), "page");
        if (const std::string* fp = pn.attr("first_page")) page.is_invoice_first_page = (*fp == "true");
        for (const XmlNode& bn : pn.children) {
            if (bn.name != "block") throw SchemaError("xml: unexpected element <" + bn.name + ">");
            Block block;
            block.id = to_int(bn.require_attr("id"), "block");
            block.zone_v = zone_v_from_string(bn.require_attr("zone_v"));
            block.zone_h = zone_h_from_string(bn.require_attr("zone_h"));
            block.bbox = bbox_from_attrs(bn);
            for (const XmlNode& cn : bn.children) {
                if (cn.name == "neighbor") {
                    block.set_neighbor(direction_from_string(cn.require_attr("dir")),
                                       to_int(cn.require_attr("ref"), "neighbor"));
                } else if (cn.name == "type") {
                    block.block_types.insert(block_type_from_string(cn.content));
                } else if (cn.name == "line") {
                    Line line;
                    line.bbox = bbox_from_attrs(cn);
                    for (const XmlNode& wn : cn.children) {
                        if (wn.name != "word")
                            throw SchemaError("xml: unexpected element <" + wn.name + "> in line");
                        WordBox w;
                        w.text = wn.content;
                        w.bbox = bbox_from_attrs(wn);
                        w.style.font_height = to_int(wn.require_attr("font_height"), "word");
                        if (const std::string* conf = wn.attr("conf"))
                            w.ocr_confidence = to_double(*conf, "word conf");
                        line.words.push_back(std::move(w));
                    }
                    line.text = rebuild_line_text(line.words);
                    block.lines.push_back(std::move(line));
                } else if (cn.name == "annotation") {
                    Annotation a;
                    a.kind = annotation_kind_from_string(cn.require_attr("kind"));
                    a.label = cn.require_attr("label");
                    a.line = to_int(cn.require_attr("line"), "annotation");
                    a.begin = to_int(cn.require_attr("begin"), "annotation");
                    a.end = to_int(cn.require_attr("end"), "annotation");
                    a.score = to_double(cn.require_attr("score"), "annotation");
                    a.source = cn.require_attr("source");
                    a.matched_text = cn.content;
                    block.annotations.push_back(std::move(a));
                } else {
                    throw SchemaError("xml: unexpected element <" + cn.name + "> in block");
                }
            }
            page.blocks.push_back(std::move(block));
        }
        doc.pages.push_back(std::move(page));
    }
    validate_document(doc);
    return doc;
}

} // namespace

std::string serialize_document(const Document& doc, DocFormat format) {
    if (format == DocFormat::Json) return document_to_json(doc).dump(2);
    return document_to_xml(doc);
}

Document deserialize_document(const std::string& bytes, DocFormat format) {
    if (format == DocFormat::Json) {
        ordered_json root;
        try {
            root = ordered_json::parse(bytes);
        } catch (const ordered_json::exception& e) {
            throw SchemaError(std::string("document: invalid JSON: ") + e.what());
        }
        return document_from_json(root);
    }
    return document_from_xml(bytes);
}

} // namespace invox
