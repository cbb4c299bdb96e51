#include "invox/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace invox {

namespace {

Line finalize_line(std::vector<WordBox> words) {
    std::stable_sort(words.begin(), words.end(),
                     [](const WordBox& a, const WordBox& b) { return a.bbox.left < b.bbox.left; });
    Line line;
    line.bbox = words.front().bbox;
    for (const WordBox& w : words) line.bbox = line.bbox.united(w.bbox);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) line.text.push_back(' ');
        line.text += words[i].text;
    }
    line.words = std::move(words);
    return line;
}

bool similar_height(int h, int ref, double tolerance) {
    return h >= (1.0 - tolerance) * ref && h <= (1.0 + tolerance) * ref;
}

} // namespace

std::vector<Line> group_words_into_lines(const std::vector<WordBox>& words,
                                         const PipelineConfig& cfg) {
    if (words.empty()) return {};

    // Reading order: top bucketed to half the word height, then left.
    std::vector<WordBox> sorted = words;
    auto bucket = [](const WordBox& w) {
        int half = std::max(1, w.bbox.height / 2);
        return w.bbox.top / half;
    };
    std::stable_sort(sorted.begin(), sorted.end(), [&](const WordBox& a, const WordBox& b) {
        int ba = bucket(a), bb = bucket(b);
        if (ba != bb) return ba < bb;
        if (a.bbox.left != b.bbox.left) return a.bbox.left < b.bbox.left;
        return a.bbox.top < b.bbox.top;
    });

    std::vector<Line> lines;
    std::vector<WordBox> current;
    BBox current_bbox;
    int first_height = 0;

    for (const WordBox& w : sorted) {
        if (current.empty()) {
            current.push_back(w);
            current_bbox = w.bbox;
            first_height = w.bbox.height;
            continue;
        }
        int overlap = w.bbox.overlap_y(current_bbox);
        int smaller = std::min(w.bbox.height, current_bbox.height);
        bool aligned = overlap >= cfg.line_overlap_min * smaller;
        bool style_ok = similar_height(w.bbox.height, first_height, cfg.font_height_tolerance);
        int gap = w.bbox.left - current.back().bbox.right();
        bool close = gap < cfg.line_gap_factor * first_height;
        if (aligned && style_ok && close) {
            current.push_back(w);
            current_bbox = current_bbox.united(w.bbox);
        } else {
            lines.push_back(finalize_line(std::move(current)));
            current.clear();
            current.push_back(w);
            current_bbox = w.bbox;
            first_height = w.bbox.height;
        }
    }
    if (!current.empty()) lines.push_back(finalize_line(std::move(current)));

    std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
        return a.bbox.left < b.bbox.left;
    });
    return lines;
}

namespace {

/// Left/center/right alignment or plain horizontal overlap, with a one
/// character tolerance taken from the previous line.
bool blockwise_aligned(const Line& prev, const Line& next) {
    if (prev.bbox.overlap_x(next.bbox) > 0) return true;
    double tol = prev.avg_char_width();
    if (std::abs(prev.bbox.left - next.bbox.left) <= tol) return true;
    if (std::abs(prev.bbox.center_x() - next.bbox.center_x()) <= tol) return true;
    if (std::abs(prev.bbox.right() - next.bbox.right()) <= tol) return true;
    return false;
}

} // namespace

std::vector<Block> group_lines_into_blocks(const std::vector<Line>& lines,
                                           const PipelineConfig& cfg) {
    std::vector<Block> blocks;
    for (const Line& line : lines) {
        // candidate: open block whose last line satisfies all three criteria,
        // preferring the smallest vertical gap
        Block* best = nullptr;
        int best_gap = std::numeric_limits<int>::max();
        for (Block& block : blocks) {
            const Line& prev = block.lines.back();
            int gap = line.bbox.top - prev.bbox.bottom();
            if (gap < 0) continue;
            if (gap >= cfg.block_gap_factor * prev.bbox.height) continue;
            if (!similar_height(line.font_height(), prev.font_height(),
                                cfg.font_height_tolerance))
                continue;
            if (!blockwise_aligned(prev, line)) continue;
            if (gap < best_gap) {
                best_gap = gap;
                best = &block;
            }
        }
        if (best) {
            best->bbox = best->bbox.united(line.bbox);
            best->lines.push_back(line);
        } else {
            Block block;
            block.bbox = line.bbox;
            block.lines.push_back(line);
            blocks.push_back(std::move(block));
        }
    }
    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
        if (a.bbox.top != b.bbox.top) return a.bbox.top < b.bbox.top;
        return a.bbox.left < b.bbox.left;
    });
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].id = static_cast<int>(i);
    return blocks;
}

void assign_zones(Page& page, const PipelineConfig& cfg) {
    for (Block& block : page.blocks) {
        double vc = block.bbox.center_y() / std::max(1, page.height);
        if (vc < cfg.zone_header_max) block.zone_v = ZoneV::Header;
        else if (vc < cfg.zone_top_max) block.zone_v = ZoneV::Top;
        else if (vc < cfg.zone_middle_max) block.zone_v = ZoneV::Middle;
        else if (vc <= cfg.zone_bottom_max) block.zone_v = ZoneV::Bottom;
        else block.zone_v = ZoneV::Footer;
        block.zone_h = block.bbox.center_x() <= page.width / 2.0 ? ZoneH::Left : ZoneH::Right;
    }
}

namespace {

struct Nearest {
    int id = -1;
    int gap = std::numeric_limits<int>::max();
};

void keep_nearest(Nearest& n, int id, int gap) {
    if (gap < n.gap || (gap == n.gap && id < n.id)) n = {id, gap};
}

} // namespace

void compute_neighbors(Page& page, const PipelineConfig& cfg) {
    const std::size_t n = page.blocks.size();
    for (Block& b : page.blocks) b.neighbors = {};

    std::vector<Nearest> below(n), above(n), rightward(n), leftward(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BBox& a = page.blocks[i].bbox;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const BBox& b = page.blocks[j].bbox;
            int ox = a.overlap_x(b);
            int oy = a.overlap_y(b);
            if (ox >= cfg.neighbor_overlap_min * std::min(a.width, b.width)) {
                if (b.top >= a.bottom())
                    keep_nearest(below[i], page.blocks[j].id, b.top - a.bottom());
                if (b.bottom() <= a.top)
                    keep_nearest(above[i], page.blocks[j].id, a.top - b.bottom());
            }
            if (oy >= cfg.neighbor_overlap_min * std::min(a.height, b.height)) {
                if (b.left >= a.right())
                    keep_nearest(rightward[i], page.blocks[j].id, b.left - a.right());
                if (b.right() <= a.left)
                    keep_nearest(leftward[i], page.blocks[j].id, a.left - b.right());
            }
        }
    }

    auto idx = [&](int id) -> std::size_t {
        for (std::size_t i = 0; i < n; ++i)
            if (page.blocks[i].id == id) return i;
        return 0;
    };

    // Mutual nearest pairs keep the neighbor relation antisymmetric:
    // A.bottom = B exactly when B.top = A.
    for (std::size_t i = 0; i < n; ++i) {
        int bid = below[i].id;
        if (bid >= 0 && above[idx(bid)].id == page.blocks[i].id) {
            page.blocks[i].set_neighbor(Direction::Bottom, bid);
            page.blocks[idx(bid)].set_neighbor(Direction::Top, page.blocks[i].id);
        }
        int rid = rightward[i].id;
        if (rid >= 0 && leftward[idx(rid)].id == page.blocks[i].id) {
            page.blocks[i].set_neighbor(Direction::Right, rid);
            page.blocks[idx(rid)].set_neighbor(Direction::Left, page.blocks[i].id);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const BBox& a = page.blocks[i].bbox;
        Nearest best;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const BBox& b = page.blocks[j].bbox;
            if (b.top < a.bottom() || b.left < a.right()) continue;
            int dist = (b.top - a.bottom()) + (b.left - a.right());
            keep_nearest(best, page.blocks[j].id, dist);
        }
        if (best.id >= 0) page.blocks[i].set_neighbor(Direction::BottomRight, best.id);
    }
}

Page analyze_page(const PageWords& raw, const PipelineConfig& cfg) {
    Page page;
    page.number = raw.number;
    page.width = raw.width;
    page.height = raw.height;
    std::vector<Line> lines = group_words_into_lines(raw.words, cfg);
    page.blocks = group_lines_into_blocks(lines, cfg);
    if (page.width <= 0 || page.height <= 0) {
        // inputs without a page size: use the content extent
        int w = 1, h = 1;
        for (const Block& b : page.blocks) {
            w = std::max(w, b.bbox.right());
            h = std::max(h, b.bbox.bottom());
        }
        page.width = w;
        page.height = h;
    }
    assign_zones(page, cfg);
    compute_neighbors(page, cfg);
    return page;
}

Document analyze_document(const std::vector<PageWords>& pages, const PipelineConfig& cfg,
                          const std::string& source_id) {
    Document doc;
    doc.source_id = source_id;
    for (const PageWords& raw : pages) doc.pages.push_back(analyze_page(raw, cfg));
    std::stable_sort(doc.pages.begin(), doc.pages.end(),
                     [](const Page& a, const Page& b) { return a.number < b.number; });
    for (std::size_t i = 0; i < doc.pages.size(); ++i)
        doc.pages[i].number = static_cast<int>(i) + 1;
    return doc;
}

} // namespace invox
