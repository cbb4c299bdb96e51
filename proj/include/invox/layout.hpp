#pragma once

#include <vector>

#include "invox/config.hpp"
#include "invox/document.hpp"
#include "invox/ingest.hpp"

namespace invox {

/// Bottom-up line building. Words are scanned in reading order; a word joins
/// the line being built when it is vertically aligned with it (overlap of at
/// least line_overlap_min of the smaller height), its height is within
/// font_height_tolerance of the line's first word, and the horizontal gap to
/// the line's last word is below line_gap_factor times the first word height.
std::vector<Line> group_words_into_lines(const std::vector<WordBox>& words,
                                         const PipelineConfig& cfg);

/// Groups lines (sorted by top) into blocks: a line joins the block above it
/// when the two share horizontal overlap or an edge/center alignment within
/// one average character width, their font heights are similar, and the
/// vertical gap is below block_gap_factor times the previous line height.
std::vector<Block> group_lines_into_blocks(const std::vector<Line>& lines,
                                           const PipelineConfig& cfg);

/// Fills zone_v / zone_h of every block from its bbox center. A center on
/// the horizontal midline counts as left.
void assign_zones(Page& page, const PipelineConfig& cfg);

/// Fills the neighbor graph. Top/bottom/left/right neighbors are mutual
/// nearest blocks whose perpendicular projections overlap by at least
/// neighbor_overlap_min of the smaller extent; the bottom-right neighbor is
/// the nearest block strictly below and strictly right.
void compute_neighbors(Page& page, const PipelineConfig& cfg);

/// words -> lines -> blocks -> zones -> neighbors for one page.
Page analyze_page(const PageWords& raw, const PipelineConfig& cfg);

/// Runs analyze_page over all pages of a parsed input.
Document analyze_document(const std::vector<PageWords>& pages, const PipelineConfig& cfg,
                          const std::string& source_id);

} // namespace invox
