#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace survey {

class MalformedBlockId : public std::runtime_error {
public:
    explicit MalformedBlockId(std::string_view input)
        : std::runtime_error("malformed block id: \"" + std::string(input) + "\""),
          input_(input) {}
    const std::string& input() const { return input_; }

private:
    std::string input_;
};

/// Ordering relation between two block ids. Floating segments make the
/// blocks incomparable: their placement is randomized per respondent.
enum class BlockOrder { Less, Equal, Greater, Incomparable };

/// Hierarchical block identifier, e.g. "1", "2.3", "1.b2".
///
/// The leading segment is always a number (top-level blocks are numbered,
/// no leading zeros). Nested segments are either numbers or a lowercase
/// letter followed by digits; a letter-led segment marks the block as
/// floating within its parent.
class BlockId {
public:
    BlockId() = default;

    static std::optional<BlockId> try_parse(std::string_view s);
    static BlockId parse(std::string_view s);  // throws MalformedBlockId

    const std::vector<std::string>& segments() const { return segments_; }
    std::size_t depth() const { return segments_.size(); }
    bool valid() const { return !segments_.empty(); }

    std::string str() const;

    bool is_top_level() const { return segments_.size() == 1; }
    /// A block is floating iff its last segment is letter-led.
    bool is_floating() const;
    /// True if this block or any ancestor is floating.
    bool has_floating_segment() const;

    /// Numeric value of the first segment.
    std::uint64_t top_number() const;

    BlockId parent() const;                       // pre: depth() > 1
    BlockId child(std::string_view segment) const;
    bool is_ancestor_of(const BlockId& other) const;

    friend bool operator==(const BlockId&, const BlockId&) = default;

private:
    std::vector<std::string> segments_;
};

/// Partial order used for question-ordering guarantees: numeric siblings
/// order by value, a floating segment at the point of divergence makes the
/// pair incomparable, and so does containment (a parent interleaves freely
/// with its children).
BlockOrder compare_blocks(const BlockId& a, const BlockId& b);

bool segment_is_floating(std::string_view segment);
std::uint64_t segment_number(std::string_view segment);  // pre: numeric segment

/// Deterministic storage order for sibling blocks: numeric ascending by
/// value, then floating ascending by label. This is a storage convention,
/// not a display order.
bool sibling_less(const BlockId& a, const BlockId& b);

}  // namespace survey
