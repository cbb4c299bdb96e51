#include "invox/ruleengine.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "invox/errors.hpp"
#include "invox/text.hpp"

namespace invox {

std::string to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "==";
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

enum class TokKind { Word, Arrow, Dot, Comma, LParen, RParen, LBracket, RBracket, Cmp, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string textv;
    int line = 1;
    int column = 1;
};

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::vector<Token> tokenize(const std::string& input) {
    std::vector<Token> tokens;
    int line = 1, column = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (input[i + k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        i += n;
    };
    while (i < input.size()) {
        char c = input[i];
        if (c == '#') {
            while (i < input.size() && input[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = column;
        if (word_char(c)) {
            std::size_t start = i;
            while (i < input.size() && word_char(input[i])) advance(1);
            t.kind = TokKind::Word;
            t.textv = input.substr(start, i - start);
        } else if (c == '-' && i + 1 < input.size() && input[i + 1] == '>') {
            t.kind = TokKind::Arrow;
            t.textv = "->";
            advance(2);
        } else if (c == '.') {
            t.kind = TokKind::Dot;
            t.textv = ".";
            advance(1);
        } else if (c == ',') {
            t.kind = TokKind::Comma;
            t.textv = ",";
            advance(1);
        } else if (c == '(') {
            t.kind = TokKind::LParen;
            t.textv = "(";
            advance(1);
        } else if (c == ')') {
            t.kind = TokKind::RParen;
            t.textv = ")";
            advance(1);
        } else if (c == '[') {
            t.kind = TokKind::LBracket;
            t.textv = "[";
            advance(1);
        } else if (c == ']') {
            t.kind = TokKind::RBracket;
            t.textv = "]";
            advance(1);
        } else if (c == '=' || c == '!' || c == '<' || c == '>') {
            std::size_t start = i;
            advance(1);
            if (i < input.size() && input[i] == '=') advance(1);
            t.kind = TokKind::Cmp;
            t.textv = input.substr(start, i - start);
            if (t.textv == "=" )
                throw ParseError("rule: unexpected '=', expected '=='", t.line, t.column);
        } else {
            throw ParseError(std::string("rule: unexpected character '") + c + "'", line, column);
        }
        tokens.push_back(std::move(t));
    }
    Token end;
    end.kind = TokKind::End;
    end.line = line;
    end.column = column;
    tokens.push_back(end);
    return tokens;
}

const std::set<std::string>& path_roots() {
    static const std::set<std::string> roots = {
        "block_annot", "top_blocks",     "bottom_blocks", "left_blocks",
        "right_blocks", "bottom_right_blocks", "num_lines", "zone_v",
        "zone_h",      "page",
    };
    return roots;
}

const std::set<std::string>& neighbor_roots() {
    static const std::set<std::string> roots = {
        "top_blocks", "bottom_blocks", "left_blocks", "right_blocks", "bottom_right_blocks",
    };
    return roots;
}

bool valid_leaf_path(const std::vector<std::string>& parts) {
    if (parts.size() == 1)
        return parts[0] == "num_lines" || parts[0] == "zone_v" || parts[0] == "zone_h" ||
               parts[0] == "page";
    if (parts.size() == 2)
        return parts[0] == "block_annot" && (parts[1] == "data" || parts[1] == "keyword");
    return false;
}

bool valid_path(const std::vector<std::string>& parts) {
    if (parts.empty()) return false;
    if (neighbor_roots().count(parts[0])) {
        std::vector<std::string> rest(parts.begin() + 1, parts.end());
        return valid_leaf_path(rest);
    }
    return valid_leaf_path(parts);
}

class RuleParser {
public:
    explicit RuleParser(const std::string& input) : tokens_(tokenize(input)) {}

    std::vector<Rule> parse_all() {
        std::vector<Rule> rules;
        while (peek().kind != TokKind::End) rules.push_back(parse_one());
        return rules;
    }

    Rule parse_single() {
        Rule r = parse_one();
        expect_end();
        return r;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t p = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[p];
    }
    const Token& next() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        std::string got = t.kind == TokKind::End ? "end of input" : "'" + t.textv + "'";
        throw ParseError("rule: expected " + expected + ", got " + got, t.line, t.column);
    }

    void expect_end() {
        if (peek().kind != TokKind::End) fail("end of input");
    }

    Rule parse_one() {
        Rule rule;
        // target: words up to '->'
        std::vector<std::string> words;
        while (peek().kind == TokKind::Word) words.push_back(next().textv);
        if (words.empty()) fail("a rule target");
        if (peek().kind != TokKind::Arrow) fail("'->'");
        next();
        for (std::size_t k = 0; k < words.size(); ++k) {
            if (k) rule.target.push_back(' ');
            rule.target += words[k];
        }
        rule.condition.conjuncts.push_back(parse_atom());
        while (peek().kind == TokKind::Word && peek().textv == "and") {
            next();
            rule.condition.conjuncts.push_back(parse_atom());
        }
        return rule;
    }

    PathExpr finish_path(std::string first, const Token& at) {
        PathExpr path;
        path.parts.push_back(std::move(first));
        while (peek().kind == TokKind::Dot) {
            next();
            if (peek().kind != TokKind::Word) fail("identifier after '.'");
            path.parts.push_back(next().textv);
        }
        if (!path_roots().count(path.parts[0]))
            throw ParseError("rule: unknown path root '" + path.parts[0] + "'", at.line,
                             at.column);
        if (!valid_path(path.parts)) {
            std::string joined;
            for (std::size_t k = 0; k < path.parts.size(); ++k) {
                if (k) joined.push_back('.');
                joined += path.parts[k];
            }
            throw ParseError("rule: path '" + joined + "' has no defined accessor", at.line,
                             at.column);
        }
        return path;
    }

    std::vector<std::string> parse_list() {
        if (peek().kind != TokKind::LBracket) fail("'['");
        next();
        std::vector<std::string> items;
        while (true) {
            std::vector<std::string> words;
            while (peek().kind == TokKind::Word) words.push_back(next().textv);
            if (words.empty()) fail("a list item");
            std::string item;
            for (std::size_t k = 0; k < words.size(); ++k) {
                if (k) item.push_back(' ');
                item += words[k];
            }
            items.push_back(std::move(item));
            if (peek().kind == TokKind::Comma) {
                next();
                continue;
            }
            if (peek().kind == TokKind::RBracket) {
                next();
                break;
            }
            fail("',' or ']'");
        }
        return items;
    }

    RuleAtom parse_atom() {
        const Token& first = peek();
        if (first.kind != TokKind::Word) fail("an atom");

        // builtins
        if ((first.textv == "aligned_with" || first.textv == "content_disjoint") &&
            peek(1).kind == TokKind::LParen) {
            std::string name = next().textv;
            next(); // (
            if (peek().kind != TokKind::Word) fail("a role name");
            std::string role = next().textv;
            if (name == "aligned_with") {
                if (peek().kind != TokKind::RParen) fail("')'");
                next();
                return AtomAlignedWith{role};
            }
            if (peek().kind != TokKind::Comma) fail("','");
            next();
            std::vector<std::string> cats = parse_list();
            if (peek().kind != TokKind::RParen) fail("')'");
            next();
            return AtomContentDisjoint{role, std::move(cats)};
        }

        // collect leading words (a path is a single word possibly dotted;
        // multiple plain words form a literal)
        std::vector<std::string> words;
        Token start = first;
        words.push_back(next().textv);
        bool dotted = peek().kind == TokKind::Dot;
        if (!dotted) {
            while (peek().kind == TokKind::Word && peek().textv != "in" && peek().textv != "and")
                words.push_back(next().textv);
        }

        if (peek().kind == TokKind::Word && peek().textv == "in") {
            next();
            if (peek().kind == TokKind::LBracket) {
                // path in [list]
                if (words.size() != 1)
                    throw ParseError("rule: left side of 'in [..]' must be a path", start.line,
                                     start.column);
                PathExpr path = finish_path_from_words(words, start);
                return AtomPathInList{std::move(path), parse_list()};
            }
            // literal in path
            std::string literal;
            for (std::size_t k = 0; k < words.size(); ++k) {
                if (k) literal.push_back(' ');
                literal += words[k];
            }
            if (peek().kind != TokKind::Word) fail("a path");
            Token at = peek();
            std::string root = next().textv;
            PathExpr path = finish_path(std::move(root), at);
            return AtomLiteralInPath{std::move(literal), std::move(path)};
        }

        if (peek().kind == TokKind::Cmp || dotted) {
            if (words.size() != 1)
                throw ParseError("rule: left side of a comparison must be a path", start.line,
                                 start.column);
            PathExpr path = finish_path_from_words(words, start);
            if (peek().kind != TokKind::Cmp) fail("'in' or a comparison operator");
            std::string op_text = next().textv;
            CmpOp op;
            if (op_text == "==") op = CmpOp::Eq;
            else if (op_text == "!=") op = CmpOp::Ne;
            else if (op_text == "<") op = CmpOp::Lt;
            else if (op_text == "<=") op = CmpOp::Le;
            else if (op_text == ">") op = CmpOp::Gt;
            else if (op_text == ">=") op = CmpOp::Ge;
            else fail("a comparison operator");
            if (peek().kind != TokKind::Word) fail("a literal");
            std::string value = next().textv;
            AtomCompare atom;
            atom.path = std::move(path);
            atom.op = op;
            bool numeric = std::all_of(value.begin(), value.end(), [](unsigned char c) {
                return std::isdigit(c) != 0;
            });
            if (numeric) {
                atom.numeric = true;
                atom.int_value = std::stoi(value);
            } else {
                if (op != CmpOp::Eq && op != CmpOp::Ne)
                    throw ParseError("rule: ordered comparison needs an integer literal",
                                     start.line, start.column);
                atom.numeric = false;
                atom.str_value = std::move(value);
            }
            return atom;
        }
        fail("'in' or a comparison operator");
    }

    PathExpr finish_path_from_words(const std::vector<std::string>& words, const Token& at) {
        return finish_path(words[0], at);
    }
};

} // namespace

Rule parse_rule(const std::string& rule_text) {
    return RuleParser(rule_text).parse_single();
}

std::vector<Rule> parse_rules(const std::string& file_text) {
    return RuleParser(file_text).parse_all();
}

std::vector<Rule> parse_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rule file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rules(ss.str());
}

// ---------------------------------------------------------------------------
// Pretty printer

namespace {

std::string print_path(const PathExpr& path) {
    std::string out;
    for (std::size_t i = 0; i < path.parts.size(); ++i) {
        if (i) out.push_back('.');
        out += path.parts[i];
    }
    return out;
}

std::string print_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    out += "]";
    return out;
}

struct AtomPrinter {
    std::string operator()(const AtomPathInList& a) const {
        return print_path(a.path) + " in " + print_list(a.items);
    }
    std::string operator()(const AtomLiteralInPath& a) const {
        return a.literal + " in " + print_path(a.path);
    }
    std::string operator()(const AtomCompare& a) const {
        std::string rhs = a.numeric ? std::to_string(a.int_value) : a.str_value;
        return print_path(a.path) + " " + to_string(a.op) + " " + rhs;
    }
    std::string operator()(const AtomAlignedWith& a) const {
        return "aligned_with(" + a.role + ")";
    }
    std::string operator()(const AtomContentDisjoint& a) const {
        return "content_disjoint(" + a.role + ", " + print_list(a.categories) + ")";
    }
};

} // namespace

std::string print_rule(const Rule& rule) {
    std::string out = rule.target + " -> ";
    for (std::size_t i = 0; i < rule.condition.conjuncts.size(); ++i) {
        if (i) out += " and ";
        out += std::visit(AtomPrinter{}, rule.condition.conjuncts[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Value {
    enum class Kind { Absent, Int, Str, StrSet } kind = Kind::Absent;
    int i = 0;
    std::string s;
    std::set<std::string> set;
};

std::set<std::string> annotation_labels(const Block& block, bool keywords) {
    std::set<std::string> out;
    for (const Annotation& a : block.annotations) {
        bool is_kw = a.kind == AnnotationKind::Keyword;
        if (is_kw == keywords) out.insert(a.label);
    }
    return out;
}

Value eval_leaf(const std::vector<std::string>& parts, const Block& block, const Page& page) {
    Value v;
    if (parts.size() == 1) {
        if (parts[0] == "num_lines") {
            v.kind = Value::Kind::Int;
            v.i = block.num_lines();
        } else if (parts[0] == "zone_v") {
            v.kind = Value::Kind::Str;
            v.s = to_string(block.zone_v);
        } else if (parts[0] == "zone_h") {
            v.kind = Value::Kind::Str;
            v.s = to_string(block.zone_h);
        } else if (parts[0] == "page") {
            v.kind = Value::Kind::Int;
            v.i = page.number;
        } else {
            throw EvalError("rule: path '" + parts[0] + "' has no defined accessor");
        }
        return v;
    }
    if (parts.size() == 2 && parts[0] == "block_annot") {
        v.kind = Value::Kind::StrSet;
        v.set = annotation_labels(block, parts[1] == "keyword");
        return v;
    }
    throw EvalError("rule: path has no defined accessor");
}

Direction neighbor_direction(const std::string& root) {
    if (root == "top_blocks") return Direction::Top;
    if (root == "bottom_blocks") return Direction::Bottom;
    if (root == "left_blocks") return Direction::Left;
    if (root == "right_blocks") return Direction::Right;
    return Direction::BottomRight;
}

Value eval_path(const PathExpr& path, const Block& block, const Page& page) {
    if (neighbor_roots().count(path.parts[0])) {
        auto nid = block.neighbor(neighbor_direction(path.parts[0]));
        if (!nid) return Value{}; // absent neighbor -> atom is false
        const Block* nb = page.block_by_id(*nid);
        if (!nb) return Value{};
        std::vector<std::string> rest(path.parts.begin() + 1, path.parts.end());
        return eval_leaf(rest, *nb, page);
    }
    return eval_leaf(path.parts, block, page);
}

std::string normalize_content(const std::string& s) {
    std::u32string folded = text::fold(text::decode_utf8(s));
    std::u32string out;
    for (char32_t c : folded)
        if (!text::is_punct(c) && !text::is_space(c)) out.push_back(c);
    return text::encode_utf8(out);
}

/// Matched texts of the block's annotations in a named content category.
std::set<std::string> category_content(const Block& block, const std::string& category) {
    std::set<std::string> out;
    for (const Annotation& a : block.annotations) {
        bool hit = false;
        if (category == "COMPANY")
            hit = a.kind == AnnotationKind::Entity && a.label == "ORGANIZATION";
        else if (category == "ADDRESS")
            hit = a.kind == AnnotationKind::AddressPart;
        else if (category == "ID")
            hit = a.kind == AnnotationKind::DataType && a.label == "COMPANY ID";
        else if (category == "VAT NUMBER")
            hit = a.kind == AnnotationKind::DataType && a.label == "VAT NUMBER";
        else if (category == "EMAIL")
            hit = a.kind == AnnotationKind::DataType && a.label == "EMAIL";
        else if (category == "PHONE")
            hit = a.kind == AnnotationKind::DataType && a.label == "PHONE";
        if (hit) out.insert(normalize_content(a.matched_text));
    }
    return out;
}

std::vector<const Block*> blocks_with_role(const Page& page, const Block& self, BlockType role) {
    std::vector<const Block*> out;
    for (const Block& b : page.blocks)
        if (b.id != self.id && b.has_type(role)) out.push_back(&b);
    return out;
}

struct AtomEvaluator {
    const Block& block;
    const Page& page;
    const PipelineConfig& cfg;

    bool operator()(const AtomPathInList& a) const {
        Value v = eval_path(a.path, block, page);
        switch (v.kind) {
            case Value::Kind::Absent: return false;
            case Value::Kind::StrSet:
                return std::any_of(a.items.begin(), a.items.end(),
                                   [&](const std::string& item) { return v.set.count(item) > 0; });
            case Value::Kind::Str:
                return std::find(a.items.begin(), a.items.end(), v.s) != a.items.end();
            case Value::Kind::Int:
                return std::find(a.items.begin(), a.items.end(), std::to_string(v.i)) !=
                       a.items.end();
        }
        return false;
    }

    bool operator()(const AtomLiteralInPath& a) const {
        Value v = eval_path(a.path, block, page);
        switch (v.kind) {
            case Value::Kind::Absent: return false;
            case Value::Kind::StrSet: return v.set.count(a.literal) > 0;
            case Value::Kind::Str: return v.s == a.literal;
            case Value::Kind::Int: return std::to_string(v.i) == a.literal;
        }
        return false;
    }

    bool operator()(const AtomCompare& a) const {
        Value v = eval_path(a.path, block, page);
        if (v.kind == Value::Kind::Absent) return false;
        if (a.numeric) {
            if (v.kind != Value::Kind::Int) return false;
            switch (a.op) {
                case CmpOp::Eq: return v.i == a.int_value;
                case CmpOp::Ne: return v.i != a.int_value;
                case CmpOp::Lt: return v.i < a.int_value;
                case CmpOp::Le: return v.i <= a.int_value;
                case CmpOp::Gt: return v.i > a.int_value;
                case CmpOp::Ge: return v.i >= a.int_value;
            }
            return false;
        }
        if (v.kind != Value::Kind::Str) return false;
        return a.op == CmpOp::Eq ? v.s == a.str_value : v.s != a.str_value;
    }

    bool operator()(const AtomAlignedWith& a) const {
        BlockType role = role_target_to_type(a.role);
        for (const Block* other : blocks_with_role(page, block, role)) {
            const BBox& x = block.bbox;
            const BBox& y = other->bbox;
            bool vertical =
                x.overlap_x(y) >= cfg.neighbor_overlap_min * std::min(x.width, y.width);
            bool horizontal =
                x.overlap_y(y) >= cfg.neighbor_overlap_min * std::min(x.height, y.height);
            if (vertical || horizontal) return true;
        }
        return false;
    }

    bool operator()(const AtomContentDisjoint& a) const {
        BlockType role = role_target_to_type(a.role);
        std::vector<const Block*> others = blocks_with_role(page, block, role);
        if (others.empty()) return false; // nothing to compare against
        for (const std::string& category : a.categories) {
            std::set<std::string> mine = category_content(block, category);
            if (mine.empty()) continue;
            std::set<std::string> theirs;
            for (const Block* other : others) {
                std::set<std::string> c = category_content(*other, category);
                theirs.insert(c.begin(), c.end());
            }
            if (theirs.empty()) continue;
            bool common = std::any_of(mine.begin(), mine.end(), [&](const std::string& v) {
                return theirs.count(v) > 0;
            });
            if (!common) return false; // both sides have values and they differ
        }
        return true;
    }
};

} // namespace

BlockType role_target_to_type(const std::string& target) {
    if (target == "seller") return BlockType::SellerInfo;
    if (target == "buyer") return BlockType::BuyerInfo;
    if (target == "delivery") return BlockType::DeliveryInfo;
    throw ConfigError("unknown role target: '" + target + "'");
}

bool eval_rule(const Rule& rule, const Block& block, const Page& page,
               const PipelineConfig& cfg) {
    AtomEvaluator evaluator{block, page, cfg};
    for (const RuleAtom& atom : rule.condition.conjuncts)
        if (!std::visit(evaluator, atom)) return false;
    return true;
}

void detect_block_types(Page& page, const std::vector<Rule>& rules, const PipelineConfig& cfg) {
    std::vector<std::pair<const Rule*, BlockType>> typed;
    for (const Rule& r : rules) typed.push_back({&r, block_type_from_string(r.target)});
    for (Block& block : page.blocks) {
        for (const auto& [rule, type] : typed)
            if (eval_rule(*rule, block, page, cfg)) block.block_types.insert(type);
        if (block.block_types.empty()) block.block_types.insert(BlockType::Empty);
    }
}

namespace {

bool has_role(const Block& block) {
    return block.has_type(BlockType::SellerInfo) || block.has_type(BlockType::BuyerInfo) ||
           block.has_type(BlockType::DeliveryInfo);
}

void apply_role_rules(Page& page, const std::vector<Rule>& rules, const PipelineConfig& cfg) {
    std::vector<std::pair<const Rule*, BlockType>> typed;
    for (const Rule& r : rules) typed.push_back({&r, role_target_to_type(r.target)});
    for (Block& block : page.blocks) {
        if (has_role(block)) continue;
        for (const auto& [rule, type] : typed) {
            if (eval_rule(*rule, block, page, cfg)) {
                block.block_types.erase(BlockType::Empty);
                block.block_types.insert(type);
                break; // first match wins, remaining rules are ignored
            }
        }
    }
}

} // namespace

void classify_roles(Page& page, const std::vector<Rule>& role_rules,
                    const std::vector<Rule>& global_rules, const PipelineConfig& cfg) {
    apply_role_rules(page, role_rules, cfg);
    apply_role_rules(page, global_rules, cfg);
}

} // namespace invox
