#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace invox {

/// Axis-aligned box in page pixel coordinates, origin top-left, y grows down.
struct BBox {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;

    int right() const { return left + width; }
    int bottom() const { return top + height; }
    double center_x() const { return left + width / 2.0; }
    double center_y() const { return top + height / 2.0; }

    /// Smallest box containing both.
    BBox united(const BBox& other) const;

    /// Overlap length of the horizontal projections (0 when disjoint).
    int overlap_x(const BBox& other) const;
    /// Overlap length of the vertical projections.
    int overlap_y(const BBox& other) const;

    bool operator==(const BBox&) const = default;
};

struct WordStyle {
    int font_height = 0;
    bool operator==(const WordStyle&) const = default;
};

/// One OCR-recognized word, the pipeline's atomic input.
struct WordBox {
    std::string text;
    BBox bbox;
    std::optional<double> ocr_confidence; // fraction in [0,1]
    WordStyle style;

    bool operator==(const WordBox&) const = default;
};

/// A horizontal run of words. `text` is the words joined by single spaces.
struct Line {
    std::vector<WordBox> words;
    BBox bbox;
    std::string text;

    /// Representative font height (median of word font heights).
    int font_height() const;
    /// Average character width of the rendered text, used as an
    /// alignment tolerance unit.
    double avg_char_width() const;

    bool operator==(const Line&) const = default;
};

enum class ZoneV { Header, Top, Middle, Bottom, Footer };
enum class ZoneH { Left, Right };

enum class Direction { Top, Bottom, Left, Right, BottomRight };
inline constexpr std::array<Direction, 5> kAllDirections = {
    Direction::Top, Direction::Bottom, Direction::Left, Direction::Right,
    Direction::BottomRight};

enum class AnnotationKind { Keyword, DataType, Entity, AddressPart };

/// A typed label attached to a span of a block line. Offsets are measured
/// in code points of the line's text.
struct Annotation {
    AnnotationKind kind = AnnotationKind::Keyword;
    std::string label;
    int line = 0;
    int begin = 0;
    int end = 0;
    std::string matched_text;
    double score = 1.0;
    std::string source;

    bool operator==(const Annotation&) const = default;
};

enum class BlockType {
    GeneralInfo,
    SellerInfo,
    BuyerInfo,
    DeliveryInfo,
    BankInfo,
    Title,
    PageNumber,
    Empty,
};

/// Group of vertically aligned lines; the unit of typing and extraction.
struct Block {
    int id = 0;
    std::vector<Line> lines;
    BBox bbox;
    ZoneV zone_v = ZoneV::Middle;
    ZoneH zone_h = ZoneH::Left;
    std::array<std::optional<int>, 5> neighbors; // indexed by Direction
    std::vector<Annotation> annotations;
    std::set<BlockType> block_types;

    std::optional<int> neighbor(Direction d) const {
        return neighbors[static_cast<std::size_t>(d)];
    }
    void set_neighbor(Direction d, std::optional<int> id_) {
        neighbors[static_cast<std::size_t>(d)] = id_;
    }
    int num_lines() const { return static_cast<int>(lines.size()); }
    bool has_type(BlockType t) const { return block_types.count(t) > 0; }

    bool operator==(const Block&) const = default;
};

struct Page {
    int number = 1;
    int width = 0;
    int height = 0;
    std::vector<Block> blocks;
    std::optional<bool> is_invoice_first_page;

    const Block* block_by_id(int id) const;

    bool operator==(const Page&) const = default;
};

struct Document {
    std::vector<Page> pages;
    std::string main_language;
    std::string source_id;

    /// All line text joined with newlines, for language detection and
    /// frequent-word features.
    std::string full_text() const;

    bool operator==(const Document&) const = default;
};

// Enum <-> string names used by serialization, rules and feature schemas.
std::string to_string(ZoneV z);
std::string to_string(ZoneH z);
std::string to_string(Direction d);
std::string to_string(AnnotationKind k);
std::string to_string(BlockType t);
ZoneV zone_v_from_string(const std::string& s);
ZoneH zone_h_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);
AnnotationKind annotation_kind_from_string(const std::string& s);
BlockType block_type_from_string(const std::string& s);

/// Throws InvariantError when any documented invariant is violated.
void validate_document(const Document& doc);

} // namespace invox
