#pragma once

#include <string>

namespace invox {

/// All numeric knobs of the pipeline in one place. Defaults follow the
/// shipped configuration; everything is overridable from a JSON file.
struct PipelineConfig {
    // layout: words -> lines -> blocks
    double line_gap_factor = 1.0;    // x first-word height
    double block_gap_factor = 2.0;   // x previous-line height
    double line_overlap_min = 0.5;   // vertical overlap vs smaller height
    double font_height_tolerance = 0.4;
    double neighbor_overlap_min = 0.2;

    // vertical zone boundaries as fractions of page height
    double zone_header_max = 0.08;
    double zone_top_max = 0.33;
    double zone_middle_max = 0.66;
    double zone_bottom_max = 0.92;

    // approximate keyword matching
    double similarity_common_cost = 0.1;
    double similarity_default_cost = 1.0;
    double similarity_threshold_ratio = 0.15;

    // confidence triple
    double key_conf_only = 0.7;
    double data_conf_only = 0.8;
    double key_conf = 0.7;  // keyword component when both sides match
    double data_conf = 0.8; // data component when both sides match

    // neighbor block scoring for off-line data search
    double score_expected_data = 2.0;
    double score_other_data = 0.5;
    double score_other_keyword = -1.0;

    // address span extraction
    int min_address_items = 2;
    double addr_conf_high = 0.9;
    double addr_conf_low = 0.6;
    double addr_conf_entity_bonus = 0.05;

    // evaluation
    int partial_match_levenshtein = 2;

    std::string fallback_language = "en";

    /// Throws ConfigError when a factor is non-positive or a ratio is
    /// outside (0, 1].
    void validate() const;

    static PipelineConfig from_json_file(const std::string& path);
    static PipelineConfig from_json_text(const std::string& json_text);
    std::string to_json_text() const;
};

} // namespace invox
