#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "invox/document.hpp"

namespace invox {

/// Raw words of one page before layout analysis.
struct PageWords {
    int number = 1;
    int width = 0;
    int height = 0;
    std::vector<WordBox> words;

    bool operator==(const PageWords&) const = default;
};

/// Field-name phrases of one language, used for main-language detection.
struct TermDictionary {
    std::string language;
    std::set<std::string> terms; // lowercase phrases

    void validate() const; // throws ConfigError
};

/// Parses Tesseract TSV (12 columns, header row). Only level-5 word rows
/// with non-blank text are kept; Tesseract's own block/par/line grouping is
/// discarded so the layout module is the sole grouping authority. Page
/// dimensions come from the level-1 row; conf -1 maps to absent confidence.
/// Throws SchemaError, naming the row, on wrong column count or non-numeric
/// geometry.
std::vector<PageWords> parse_tesseract_tsv(std::string_view tsv);

/// Parses the canonical word-box JSON interchange format:
/// {pages:[{number,width,height,words:[{text,left,top,width,height,conf?}]}]}
std::vector<PageWords> parse_wordbox_json(std::string_view json_text);

/// Writes the canonical word-box JSON for the given pages.
std::string write_wordbox_json(const std::vector<PageWords>& pages);

/// Returns the language whose dictionary has the most distinct term hits in
/// the text (case-insensitive whole-phrase matching). Ties are broken by
/// dictionary order; zero hits everywhere returns fallback_language.
std::string detect_main_language(const std::string& doc_text,
                                 const std::vector<TermDictionary>& dicts,
                                 const std::string& fallback_language);

/// Loads one term dictionary from config/keywords/<lang>/terms.json.
TermDictionary load_term_dictionary(const std::string& path);

} // namespace invox
