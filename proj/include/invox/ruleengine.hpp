#pragma once

#include <string>
#include <variant>
#include <vector>

#include "invox/config.hpp"
#include "invox/document.hpp"

namespace invox {

/// Dotted accessor path. Recognized roots: block_annot, top_blocks,
/// bottom_blocks, left_blocks, right_blocks, bottom_right_blocks, num_lines,
/// zone_v, zone_h, page. Unknown roots are parse-time errors.
struct PathExpr {
    std::vector<std::string> parts;
    bool operator==(const PathExpr&) const = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string to_string(CmpOp op);

/// path in [a, b, ...] -- set intersection when the path yields a set.
struct AtomPathInList {
    PathExpr path;
    std::vector<std::string> items;
    bool operator==(const AtomPathInList&) const = default;
};

/// LITERAL in path -- membership in the path's set value.
struct AtomLiteralInPath {
    std::string literal;
    PathExpr path;
    bool operator==(const AtomLiteralInPath&) const = default;
};

/// path <op> integer, or path ==/!= word.
struct AtomCompare {
    PathExpr path;
    CmpOp op = CmpOp::Eq;
    bool numeric = true;
    int int_value = 0;
    std::string str_value;
    bool operator==(const AtomCompare&) const = default;
};

/// aligned_with(role): the block shares vertical or horizontal alignment
/// with a block already labeled with the role.
struct AtomAlignedWith {
    std::string role;
    bool operator==(const AtomAlignedWith&) const = default;
};

/// content_disjoint(role, [categories]): true when the block has no content
/// in the listed categories that differs from the role-labeled blocks.
struct AtomContentDisjoint {
    std::string role;
    std::vector<std::string> categories;
    bool operator==(const AtomContentDisjoint&) const = default;
};

using RuleAtom = std::variant<AtomPathInList, AtomLiteralInPath, AtomCompare, AtomAlignedWith,
                              AtomContentDisjoint>;

/// Conjunction of atoms (the grammar's only connective).
struct RuleExpr {
    std::vector<RuleAtom> conjuncts;
    bool operator==(const RuleExpr&) const = default;
};

struct Rule {
    std::string target; // block type ("seller info") or role label ("seller")
    RuleExpr condition;
    bool operator==(const Rule&) const = default;
};

/// Parses one rule. Throws ParseError with line/column and the expected
/// token set on malformed input.
Rule parse_rule(const std::string& rule_text);

/// Parses a rule file: one `target -> condition` clause per rule, `#`
/// comments, rules may span lines.
std::vector<Rule> parse_rules(const std::string& file_text);
std::vector<Rule> parse_rules_file(const std::string& path);

/// Canonical one-line form; print_rule(parse_rule(t)) reparses to an
/// equal AST.
std::string print_rule(const Rule& rule);

/// Evaluates the rule's condition on a block in its page context.
bool eval_rule(const Rule& rule, const Block& block, const Page& page,
               const PipelineConfig& cfg);

/// Applies every rule to every block additively; blocks matching no rule
/// get the EMPTY type. Rule targets must name block types.
void detect_block_types(Page& page, const std::vector<Rule>& rules, const PipelineConfig& cfg);

/// Role classification: rules are tried in descending confidence order and
/// the first match wins; global rules run afterwards on still-unlabeled
/// blocks. Targets are "seller", "buyer" or "delivery".
void classify_roles(Page& page, const std::vector<Rule>& role_rules,
                    const std::vector<Rule>& global_rules, const PipelineConfig& cfg);

/// Role label ("seller") -> block type (seller info).
BlockType role_target_to_type(const std::string& target);

} // namespace invox
