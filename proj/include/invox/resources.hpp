#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "invox/config.hpp"
#include "invox/entities.hpp"
#include "invox/fields.hpp"
#include "invox/ingest.hpp"
#include "invox/ruleengine.hpp"
#include "invox/textannot.hpp"

namespace invox {

/// Everything the pipeline loads from the config tree:
///   config.json, keywords/<lang>/{terms,keywords}.json, confusions.json,
///   gazetteers/<lang>/*.txt, rules/{block_types,roles,global}.rules
struct ResourceBundle {
    PipelineConfig cfg;
    std::vector<std::string> languages; // detection tie-break order
    std::vector<TermDictionary> term_dicts;
    std::map<std::string, KeywordSet> keywords;
    ConfusionTable confusions;
    std::shared_ptr<const Gazetteer> gazetteer;
    std::vector<Rule> block_type_rules;
    std::vector<Rule> role_rules;
    std::vector<Rule> global_rules;
    std::vector<FieldSpec> field_specs;

    const KeywordSet& keywords_for(const std::string& language) const;

    static ResourceBundle load(const std::string& config_dir);
};

} // namespace invox
