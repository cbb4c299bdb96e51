#include "invox/resources.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"

namespace invox {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const KeywordSet& ResourceBundle::keywords_for(const std::string& language) const {
    auto it = keywords.find(language);
    if (it != keywords.end()) return it->second;
    it = keywords.find(cfg.fallback_language);
    if (it != keywords.end()) return it->second;
    throw ConfigError("no keyword set for language '" + language + "' or the fallback '" +
                      cfg.fallback_language + "'");
}

ResourceBundle ResourceBundle::load(const std::string& config_dir) {
    fs::path root(config_dir);
    if (!fs::is_directory(root)) throw ConfigError("config directory not found: " + config_dir);

    ResourceBundle res;
    fs::path cfg_path = root / "config.json";
    if (fs::exists(cfg_path)) {
        res.cfg = PipelineConfig::from_json_file(cfg_path.string());
        std::ifstream in(cfg_path);
        std::stringstream ss;
        ss << in.rdbuf();
        ordered_json j = ordered_json::parse(ss.str());
        for (const auto& lang : j.value("languages", ordered_json::array()))
            res.languages.push_back(lang.get<std::string>());
    } else {
        res.cfg = PipelineConfig{};
    }

    if (res.languages.empty()) {
        // fall back to the keyword directory listing, sorted for determinism
        std::vector<std::string> langs;
        fs::path kw_dir = root / "keywords";
        if (fs::is_directory(kw_dir))
            for (const auto& entry : fs::directory_iterator(kw_dir))
                if (entry.is_directory()) langs.push_back(entry.path().filename().string());
        std::sort(langs.begin(), langs.end());
        res.languages = std::move(langs);
    }
    if (res.languages.empty())
        throw ConfigError("config: no languages configured under " + config_dir);

    for (const std::string& lang : res.languages) {
        fs::path terms = root / "keywords" / lang / "terms.json";
        if (fs::exists(terms)) res.term_dicts.push_back(load_term_dictionary(terms.string()));
        fs::path kw = root / "keywords" / lang / "keywords.json";
        if (fs::exists(kw)) res.keywords[lang] = KeywordSet::from_json_file(kw.string());
    }
    if (res.keywords.empty())
        throw ConfigError("config: no keyword sets found under " + config_dir);

    fs::path confusions = root / "confusions.json";
    res.confusions = fs::exists(confusions) ? ConfusionTable::from_json_file(confusions.string())
                                            : ConfusionTable::defaults();

    res.gazetteer = std::make_shared<Gazetteer>(
        Gazetteer::load((root / "gazetteers").string(), res.languages));

    res.block_type_rules = parse_rules_file((root / "rules" / "block_types.rules").string());
    res.role_rules = parse_rules_file((root / "rules" / "roles.rules").string());
    res.global_rules = parse_rules_file((root / "rules" / "global.rules").string());

    res.field_specs = default_field_specs();
    return res;
}

} // namespace invox
