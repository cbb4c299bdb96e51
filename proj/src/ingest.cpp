#include "invox/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"
#include "invox/text.hpp"

namespace invox {

using nlohmann::ordered_json;

void TermDictionary::validate() const {
    if (language.empty()) throw ConfigError("term dictionary: language must be set");
    if (terms.empty()) throw ConfigError("term dictionary '" + language + "': no terms");
    for (const auto& t : terms)
        if (t != text::fold_utf8(t))
            throw ConfigError("term dictionary '" + language + "': term '" + t +
                              "' must be lowercase");
}

namespace {

std::vector<std::string> split_tsv_row(std::string_view row) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = row.find('\t', start);
        if (tab == std::string_view::npos) {
            cols.emplace_back(row.substr(start));
            break;
        }
        cols.emplace_back(row.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

int tsv_int(const std::string& s, int row_no, const char* col) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("tsv row " + std::to_string(row_no) + ": column '" + col +
                          "' is not an integer: '" + s + "'");
    }
}

double tsv_double(const std::string& s, int row_no, const char* col) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("tsv row " + std::to_string(row_no) + ": column '" + col +
                          "' is not a number: '" + s + "'");
    }
}

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

std::vector<PageWords> parse_tesseract_tsv(std::string_view tsv) {
    std::vector<PageWords> pages;
    std::size_t pos = 0;
    int row_no = 0;
    bool header_seen = false;
    while (pos < tsv.size()) {
        std::size_t eol = tsv.find('\n', pos);
        std::string_view raw =
            tsv.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? tsv.size() : eol + 1;
        ++row_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty()) continue;
        if (!header_seen) {
            header_seen = true; // first non-empty row is the column header
            continue;
        }
        std::vector<std::string> cols = split_tsv_row(raw);
        if (cols.size() != 12)
            throw SchemaError("tsv row " + std::to_string(row_no) + ": expected 12 columns, got " +
                              std::to_string(cols.size()));
        int level = tsv_int(cols[0], row_no, "level");
        int page_num = tsv_int(cols[1], row_no, "page_num");
        int left = tsv_int(cols[6], row_no, "left");
        int top = tsv_int(cols[7], row_no, "top");
        int width = tsv_int(cols[8], row_no, "width");
        int height = tsv_int(cols[9], row_no, "height");
        if (level == 1) {
            PageWords page;
            page.number = page_num;
            page.width = width;
            page.height = height;
            pages.push_back(std::move(page));
            continue;
        }
        if (level != 5 || blank(cols[11])) continue;
        if (pages.empty() || pages.back().number != page_num) {
            // level-5 row without a preceding level-1 page row
            PageWords page;
            page.number = page_num;
            pages.push_back(std::move(page));
        }
        WordBox w;
        w.text = cols[11];
        w.bbox = BBox{left, top, width, height};
        double conf = tsv_double(cols[10], row_no, "conf");
        if (conf >= 0.0) w.ocr_confidence = conf / 100.0;
        w.style.font_height = height;
        pages.back().words.push_back(std::move(w));
    }
    return pages;
}

std::vector<PageWords> parse_wordbox_json(std::string_view json_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("wordbox json: invalid JSON: ") + e.what());
    }
    std::vector<PageWords> pages;
    try {
        std::size_t pi = 0;
        for (const auto& pj : root.at("pages")) {
            std::string ppath = "pages[" + std::to_string(pi++) + "]";
            PageWords page;
            page.number = pj.at("number").get<int>();
            page.width = pj.at("width").get<int>();
            page.height = pj.at("height").get<int>();
            std::size_t wi = 0;
            for (const auto& wj : pj.value("words", ordered_json::array())) {
                std::string wpath = ppath + ".words[" + std::to_string(wi++) + "]";
                WordBox w;
                w.text = wj.at("text").get<std::string>();
                w.bbox = BBox{wj.at("left").get<int>(), wj.at("top").get<int>(),
                              wj.at("width").get<int>(), wj.at("height").get<int>()};
                if (wj.contains("conf")) w.ocr_confidence = wj.at("conf").get<double>();
                w.style.font_height = wj.value("font_height", w.bbox.height);
                if (w.text.empty())
                    throw InvariantError(wpath + ": word text must be non-empty");
                if (w.bbox.width <= 0 || w.bbox.height <= 0)
                    throw InvariantError(wpath + ": word bbox must have positive size");
                if (w.bbox.left < 0 || w.bbox.top < 0)
                    throw InvariantError(wpath + ": word bbox must have non-negative position");
                if (w.ocr_confidence && (*w.ocr_confidence < 0.0 || *w.ocr_confidence > 1.0))
                    throw InvariantError(wpath + ": conf must be in [0,1]");
                page.words.push_back(std::move(w));
            }
            pages.push_back(std::move(page));
        }
    } catch (const ordered_json::exception& e) {
        throw SchemaError(std::string("wordbox json: ") + e.what());
    }
    return pages;
}

std::string write_wordbox_json(const std::vector<PageWords>& pages) {
    ordered_json root;
    ordered_json parr = ordered_json::array();
    for (const PageWords& page : pages) {
        ordered_json pj;
        pj["number"] = page.number;
        pj["width"] = page.width;
        pj["height"] = page.height;
        ordered_json words = ordered_json::array();
        for (const WordBox& w : page.words) {
            ordered_json wj;
            wj["text"] = w.text;
            wj["left"] = w.bbox.left;
            wj["top"] = w.bbox.top;
            wj["width"] = w.bbox.width;
            wj["height"] = w.bbox.height;
            if (w.ocr_confidence) wj["conf"] = *w.ocr_confidence;
            if (w.style.font_height != w.bbox.height) wj["font_height"] = w.style.font_height;
            words.push_back(wj);
        }
        pj["words"] = words;
        parr.push_back(pj);
    }
    root["pages"] = parr;
    return root.dump(2);
}

namespace {

/// Whole-phrase occurrence: the match must not butt against letters or
/// digits on either side.
bool contains_phrase(const std::string& folded_text, const std::string& phrase) {
    std::size_t pos = 0;
    while ((pos = folded_text.find(phrase, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(folded_text[pos - 1]));
        std::size_t end = pos + phrase.size();
        bool right_ok =
            end >= folded_text.size() || !std::isalnum(static_cast<unsigned char>(folded_text[end]));
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

} // namespace

std::string detect_main_language(const std::string& doc_text,
                                 const std::vector<TermDictionary>& dicts,
                                 const std::string& fallback_language) {
    if (dicts.empty()) throw ConfigError("language detection: no term dictionaries supplied");
    for (const auto& d : dicts) d.validate();

    std::string folded = text::fold_utf8(doc_text);
    std::string best_lang;
    std::size_t best_hits = 0;
    for (const TermDictionary& dict : dicts) {
        std::size_t hits = 0;
        for (const std::string& term : dict.terms)
            if (contains_phrase(folded, term)) ++hits;
        if (hits > best_hits) {
            best_hits = hits;
            best_lang = dict.language;
        }
    }
    return best_hits == 0 ? fallback_language : best_lang;
}

TermDictionary load_term_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open term dictionary: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ordered_json j;
    try {
        j = ordered_json::parse(ss.str());
    } catch (const ordered_json::exception& e) {
        throw ConfigError("term dictionary " + path + ": " + e.what());
    }
    TermDictionary dict;
    dict.language = j.value("language", "");
    for (const auto& t : j.value("terms", ordered_json::array()))
        dict.terms.insert(t.get<std::string>());
    dict.validate();
    return dict;
}

} // namespace invox
