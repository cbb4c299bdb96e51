#include "invox/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invox/errors.hpp"

namespace invox {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw ConfigError(std::string("config: ") + name + " must be > 0");
}

void require_ratio(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0))
        throw ConfigError(std::string("config: ") + name + " must be in (0,1]");
}

} // namespace

void PipelineConfig::validate() const {
    require_positive(line_gap_factor, "line_gap_factor");
    require_positive(block_gap_factor, "block_gap_factor");
    require_positive(similarity_common_cost, "similarity_common_cost");
    require_positive(similarity_default_cost, "similarity_default_cost");
    require_positive(score_expected_data, "score_expected_data");
    require_positive(score_other_data, "score_other_data");
    if (!(similarity_common_cost < similarity_default_cost))
        throw ConfigError("config: similarity_common_cost must be below the default cost");
    if (!(score_other_keyword < 0.0))
        throw ConfigError("config: score_other_keyword must be a penalty (< 0)");
    require_ratio(similarity_threshold_ratio, "similarity_threshold_ratio");
    require_ratio(line_overlap_min, "line_overlap_min");
    require_ratio(font_height_tolerance, "font_height_tolerance");
    require_ratio(neighbor_overlap_min, "neighbor_overlap_min");
    require_ratio(key_conf_only, "key_conf_only");
    require_ratio(data_conf_only, "data_conf_only");
    require_ratio(addr_conf_high, "addr_conf_high");
    require_ratio(addr_conf_low, "addr_conf_low");
    if (!(zone_header_max < zone_top_max && zone_top_max < zone_middle_max &&
          zone_middle_max < zone_bottom_max && zone_bottom_max < 1.0))
        throw ConfigError("config: zone boundaries must increase and stay below 1");
    if (partial_match_levenshtein < 1)
        throw ConfigError("config: partial_match_levenshtein must be >= 1");
    if (min_address_items < 1)
        throw ConfigError("config: min_address_items must be >= 1");
    if (fallback_language.empty())
        throw ConfigError("config: fallback_language must be set");
}

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    read_if(j, "line_gap_factor", cfg.line_gap_factor);
    read_if(j, "block_gap_factor", cfg.block_gap_factor);
    read_if(j, "line_overlap_min", cfg.line_overlap_min);
    read_if(j, "font_height_tolerance", cfg.font_height_tolerance);
    read_if(j, "neighbor_overlap_min", cfg.neighbor_overlap_min);
    read_if(j, "zone_header_max", cfg.zone_header_max);
    read_if(j, "zone_top_max", cfg.zone_top_max);
    read_if(j, "zone_middle_max", cfg.zone_middle_max);
    read_if(j, "zone_bottom_max", cfg.zone_bottom_max);
    read_if(j, "similarity_common_cost", cfg.similarity_common_cost);
    read_if(j, "similarity_default_cost", cfg.similarity_default_cost);
    read_if(j, "similarity_threshold_ratio", cfg.similarity_threshold_ratio);
    read_if(j, "key_conf_only", cfg.key_conf_only);
    read_if(j, "data_conf_only", cfg.data_conf_only);
    read_if(j, "key_conf", cfg.key_conf);
    read_if(j, "data_conf", cfg.data_conf);
    read_if(j, "score_expected_data", cfg.score_expected_data);
    read_if(j, "score_other_data", cfg.score_other_data);
    read_if(j, "score_other_keyword", cfg.score_other_keyword);
    read_if(j, "min_address_items", cfg.min_address_items);
    read_if(j, "addr_conf_high", cfg.addr_conf_high);
    read_if(j, "addr_conf_low", cfg.addr_conf_low);
    read_if(j, "addr_conf_entity_bonus", cfg.addr_conf_entity_bonus);
    read_if(j, "partial_match_levenshtein", cfg.partial_match_levenshtein);
    read_if(j, "fallback_language", cfg.fallback_language);
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string PipelineConfig::to_json_text() const {
    json j;
    j["line_gap_factor"] = line_gap_factor;
    j["block_gap_factor"] = block_gap_factor;
    j["line_overlap_min"] = line_overlap_min;
    j["font_height_tolerance"] = font_height_tolerance;
    j["neighbor_overlap_min"] = neighbor_overlap_min;
    j["zone_header_max"] = zone_header_max;
    j["zone_top_max"] = zone_top_max;
    j["zone_middle_max"] = zone_middle_max;
    j["zone_bottom_max"] = zone_bottom_max;
    j["similarity_common_cost"] = similarity_common_cost;
    j["similarity_default_cost"] = similarity_default_cost;
    j["similarity_threshold_ratio"] = similarity_threshold_ratio;
    j["key_conf_only"] = key_conf_only;
    j["data_conf_only"] = data_conf_only;
    j["key_conf"] = key_conf;
    j["data_conf"] = data_conf;
    j["score_expected_data"] = score_expected_data;
    j["score_other_data"] = score_other_data;
    j["score_other_keyword"] = score_other_keyword;
    j["min_address_items"] = min_address_items;
    j["addr_conf_high"] = addr_conf_high;
    j["addr_conf_low"] = addr_conf_low;
    j["addr_conf_entity_bonus"] = addr_conf_entity_bonus;
    j["partial_match_levenshtein"] = partial_match_levenshtein;
    j["fallback_language"] = fallback_language;
    return j.dump(2);
}

} // namespace invox
