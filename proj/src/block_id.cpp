#include "survey/block_id.hpp"

#include <algorithm>
#include <cctype>

namespace survey {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

// Leading segment: [1-9][0-9]*.  Nested segment: [a-z1-9][0-9]*.
bool valid_segment(std::string_view seg, bool leading) {
    if (seg.empty()) return false;
    char head = seg[0];
    bool head_ok = leading ? (head >= '1' && head <= '9')
                           : (is_lower(head) || (head >= '1' && head <= '9'));
    if (!head_ok) return false;
    return std::all_of(seg.begin() + 1, seg.end(), is_digit);
}

}  // namespace

bool segment_is_floating(std::string_view segment) {
    return !segment.empty() && is_lower(segment[0]);
}

std::uint64_t segment_number(std::string_view segment) {
    std::uint64_t v = 0;
    for (char c : segment) v = v * 10 + static_cast<std::uint64_t>(c - '0');
    return v;
}

std::optional<BlockId> BlockId::try_parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    BlockId id;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = s.find('.', start);
        std::string_view seg = s.substr(start, dot == std::string_view::npos ? dot : dot - start);
        if (!valid_segment(seg, id.segments_.empty())) return std::nullopt;
        id.segments_.emplace_back(seg);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return id;
}

BlockId BlockId::parse(std::string_view s) {
    auto id = try_parse(s);
    if (!id) throw MalformedBlockId(s);
    return *std::move(id);
}

std::string BlockId::str() const {
    std::string out;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (i) out += '.';
        out += segments_[i];
    }
    return out;
}

bool BlockId::is_floating() const {
    return valid() && segment_is_floating(segments_.back());
}

bool BlockId::has_floating_segment() const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [](const std::string& s) { return segment_is_floating(s); });
}

std::uint64_t BlockId::top_number() const {
    return segment_number(segments_.front());
}

BlockId BlockId::parent() const {
    BlockId p;
    p.segments_.assign(segments_.begin(), segments_.end() - 1);
    return p;
}

BlockId BlockId::child(std::string_view segment) const {
    BlockId c = *this;
    c.segments_.emplace_back(segment);
    return c;
}

bool BlockId::is_ancestor_of(const BlockId& other) const {
    if (depth() >= other.depth()) return false;
    return std::equal(segments_.begin(), segments_.end(), other.segments_.begin());
}

BlockOrder compare_blocks(const BlockId& a, const BlockId& b) {
    std::size_t n = std::min(a.depth(), b.depth());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& sa = a.segments()[i];
        const std::string& sb = b.segments()[i];
        if (sa == sb) continue;
        if (segment_is_floating(sa) || segment_is_floating(sb)) return BlockOrder::Incomparable;
        return segment_number(sa) < segment_number(sb) ? BlockOrder::Less : BlockOrder::Greater;
    }
    if (a.depth() == b.depth()) return BlockOrder::Equal;
    // Containment: questions of a block interleave freely with its subblocks.
    return BlockOrder::Incomparable;
}

bool sibling_less(const BlockId& a, const BlockId& b) {
    const std::string& sa = a.segments().back();
    const std::string& sb = b.segments().back();
    bool fa = segment_is_floating(sa);
    bool fb = segment_is_floating(sb);
    if (fa != fb) return !fa;
    if (fa) return sa < sb;
    return segment_number(sa) < segment_number(sb);
}

}  // namespace survey
