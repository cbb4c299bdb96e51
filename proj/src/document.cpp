#include "invox/document.hpp"

#include <algorithm>

#include "invox/errors.hpp"
#include "invox/text.hpp"

namespace invox {

BBox BBox::united(const BBox& other) const {
    int l = std::min(left, other.left);
    int t = std::min(top, other.top);
    int r = std::max(right(), other.right());
    int b = std::max(bottom(), other.bottom());
    return BBox{l, t, r - l, b - t};
}

int BBox::overlap_x(const BBox& other) const {
    return std::max(0, std::min(right(), other.right()) - std::max(left, other.left));
}

int BBox::overlap_y(const BBox& other) const {
    return std::max(0, std::min(bottom(), other.bottom()) - std::max(top, other.top));
}

int Line::font_height() const {
    if (words.empty()) return 0;
    std::vector<int> hs;
    hs.reserve(words.size());
    for (const auto& w : words) hs.push_back(w.style.font_height > 0 ? w.style.font_height : w.bbox.height);
    std::sort(hs.begin(), hs.end());
    return hs[hs.size() / 2];
}

double Line::avg_char_width() const {
    std::size_t n = text::length_utf8(text);
    if (n == 0) return 1.0;
    return static_cast<double>(bbox.width) / static_cast<double>(n);
}

const Block* Page::block_by_id(int id) const {
    for (const auto& b : blocks)
        if (b.id == id) return &b;
    return nullptr;
}

std::string Document::full_text() const {
    std::string out;
    for (const auto& page : pages)
        for (const auto& block : page.blocks)
            for (const auto& line : block.lines) {
                out += line.text;
                out.push_back('\n');
            }
    return out;
}

namespace {

template <typename E>
[[noreturn]] void bad_name(const char* what, const std::string& s) {
    throw SchemaError(std::string("unknown ") + what + " name: '" + s + "'");
}

} // namespace

std::string to_string(ZoneV z) {
    switch (z) {
        case ZoneV::Header: return "header";
        case ZoneV::Top: return "top";
        case ZoneV::Middle: return "middle";
        case ZoneV::Bottom: return "bottom";
        case ZoneV::Footer: return "footer";
    }
    return "middle";
}

std::string to_string(ZoneH z) {
    return z == ZoneH::Left ? "left" : "right";
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::Top: return "top";
        case Direction::Bottom: return "bottom";
        case Direction::Left: return "left";
        case Direction::Right: return "right";
        case Direction::BottomRight: return "bottom_right";
    }
    return "top";
}

std::string to_string(AnnotationKind k) {
    switch (k) {
        case AnnotationKind::Keyword: return "KEYWORD";
        case AnnotationKind::DataType: return "DATATYPE";
        case AnnotationKind::Entity: return "ENTITY";
        case AnnotationKind::AddressPart: return "ADDRESS_PART";
    }
    return "KEYWORD";
}

std::string to_string(BlockType t) {
    switch (t) {
        case BlockType::GeneralInfo: return "general info";
        case BlockType::SellerInfo: return "seller info";
        case BlockType::BuyerInfo: return "buyer info";
        case BlockType::DeliveryInfo: return "delivery info";
        case BlockType::BankInfo: return "bank info";
        case BlockType::Title: return "title";
        case BlockType::PageNumber: return "page number";
        case BlockType::Empty: return "empty";
    }
    return "empty";
}

ZoneV zone_v_from_string(const std::string& s) {
    if (s == "header") return ZoneV::Header;
    if (s == "top") return ZoneV::Top;
    if (s == "middle") return ZoneV::Middle;
    if (s == "bottom") return ZoneV::Bottom;
    if (s == "footer") return ZoneV::Footer;
    bad_name<ZoneV>("vertical zone", s);
}

ZoneH zone_h_from_string(const std::string& s) {
    if (s == "left") return ZoneH::Left;
    if (s == "right") return ZoneH::Right;
    bad_name<ZoneH>("horizontal zone", s);
}

Direction direction_from_string(const std::string& s) {
    if (s == "top") return Direction::Top;
    if (s == "bottom") return Direction::Bottom;
    if (s == "left") return Direction::Left;
    if (s == "right") return Direction::Right;
    if (s == "bottom_right") return Direction::BottomRight;
    bad_name<Direction>("direction", s);
}

AnnotationKind annotation_kind_from_string(const std::string& s) {
    if (s == "KEYWORD") return AnnotationKind::Keyword;
    if (s == "DATATYPE") return AnnotationKind::DataType;
    if (s == "ENTITY") return AnnotationKind::Entity;
    if (s == "ADDRESS_PART") return AnnotationKind::AddressPart;
    bad_name<AnnotationKind>("annotation kind", s);
}

BlockType block_type_from_string(const std::string& s) {
    if (s == "general info") return BlockType::GeneralInfo;
    if (s == "seller info") return BlockType::SellerInfo;
    if (s == "buyer info") return BlockType::BuyerInfo;
    if (s == "delivery info") return BlockType::DeliveryInfo;
    if (s == "bank info") return BlockType::BankInfo;
    if (s == "title") return BlockType::Title;
    if (s == "page number") return BlockType::PageNumber;
    if (s == "empty") return BlockType::Empty;
    bad_name<BlockType>("block type", s);
}

namespace {

void check(bool cond, const std::string& msg) {
    if (!cond) throw InvariantError(msg);
}

void validate_bbox(const BBox& b, const std::string& where) {
    check(b.width > 0 && b.height > 0, where + ": bbox must have positive size");
    check(b.left >= 0 && b.top >= 0, where + ": bbox must have non-negative position");
}

bool encloses(const BBox& outer, const BBox& inner) {
    return outer.left <= inner.left && outer.top <= inner.top &&
           outer.right() >= inner.right() && outer.bottom() >= inner.bottom();
}

} // namespace

void validate_document(const Document& doc) {
    for (std::size_t pi = 0; pi < doc.pages.size(); ++pi) {
        const Page& page = doc.pages[pi];
        std::string pwhere = "page " + std::to_string(page.number);
        check(page.number == static_cast<int>(pi) + 1,
              pwhere + ": page numbers must be consecutive from 1");
        check(page.width > 0 && page.height > 0, pwhere + ": page size must be positive");

        std::set<int> ids;
        for (const Block& block : page.blocks) ids.insert(block.id);
        check(ids.size() == page.blocks.size(), pwhere + ": duplicate block ids");

        for (const Block& block : page.blocks) {
            std::string bwhere = pwhere + ", block " + std::to_string(block.id);
            validate_bbox(block.bbox, bwhere);
            check(block.bbox.right() <= page.width && block.bbox.bottom() <= page.height,
                  bwhere + ": block bbox outside page bounds");
            check(!block.lines.empty(), bwhere + ": block must have lines");
            if (block.block_types.count(BlockType::Empty))
                check(block.block_types.size() == 1,
                      bwhere + ": empty type must not co-occur with another type");

            int prev_top = -1;
            for (const Line& line : block.lines) {
                validate_bbox(line.bbox, bwhere);
                check(line.bbox.top >= prev_top, bwhere + ": lines must be sorted by top");
                prev_top = line.bbox.top;
                check(!line.words.empty(), bwhere + ": line must have words");
                int prev_left = -1;
                for (const WordBox& w : line.words) {
                    validate_bbox(w.bbox, bwhere);
                    check(!w.text.empty(), bwhere + ": word text must be non-empty");
                    check(w.text.find('\n') == std::string::npos &&
                              w.text.find('\r') == std::string::npos,
                          bwhere + ": word text must not contain line breaks");
                    check(w.bbox.left >= prev_left, bwhere + ": words must be sorted by left");
                    prev_left = w.bbox.left;
                    check(encloses(line.bbox, w.bbox), bwhere + ": line bbox must enclose words");
                    if (w.ocr_confidence)
                        check(*w.ocr_confidence >= 0.0 && *w.ocr_confidence <= 1.0,
                              bwhere + ": confidence must be in [0,1]");
                }
                check(encloses(block.bbox, line.bbox), bwhere + ": block bbox must enclose lines");
            }

            for (Direction d : kAllDirections) {
                auto n = block.neighbor(d);
                if (!n) continue;
                check(*n != block.id, bwhere + ": block must not be its own neighbor");
                check(ids.count(*n) > 0,
                      bwhere + ": neighbor id " + std::to_string(*n) + " does not exist");
            }

            for (const Annotation& a : block.annotations) {
                std::string awhere = bwhere + ", annotation '" + a.label + "'";
                check(a.line >= 0 && a.line < block.num_lines(), awhere + ": line out of range");
                std::size_t len = text::length_utf8(block.lines[a.line].text);
                check(a.begin >= 0 && a.end >= a.begin &&
                          static_cast<std::size_t>(a.end) <= len,
                      awhere + ": span outside line text");
                check(a.score >= 0.0 && a.score <= 1.0, awhere + ": score must be in [0,1]");
            }
        }
    }
}

} // namespace invox
