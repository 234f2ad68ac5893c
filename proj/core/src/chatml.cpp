#include "vistok/chatml.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace vistok {

namespace {

constexpr std::string_view k_nl_function = "\n*FUNCTION*: ";
constexpr std::string_view k_nl_result = "\n*RESULT*: ";
constexpr std::string_view k_nl_return = "\n*RETURN*: ";
constexpr std::string_view k_sp_args = " *ARGS*: ";

bool starts_with_at(std::string_view text, size_t pos, std::string_view token) {
    return text.size() - pos >= token.size() && text.compare(pos, token.size(), token) == 0;
}

bool at_line_start(std::string_view text, size_t pos) {
    return pos == 0 || text[pos - 1] == '\n';
}

const std::array<std::string_view, 8> k_video_exts = {".mp4", ".avi",  ".mov", ".mkv",
                                                      ".webm", ".m4v", ".mpg", ".mpeg"};

bool looks_like_video(std::string_view ref) {
    const size_t dot = ref.rfind('.');
    if (dot == std::string_view::npos) return false;
    std::string ext(ref.substr(dot));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& v : k_video_exts)
        if (ext == v) return true;
    return false;
}

void append_box(std::string& out, const normalized_box& b) {
    out += '(';
    out += std::to_string(b.x0);
    out += ',';
    out += std::to_string(b.y0);
    out += "),(";
    out += std::to_string(b.x1);
    out += ',';
    out += std::to_string(b.y1);
    out += ')';
}

void check_box(const normalized_box& b) {
    if (b.x0 < 0 || b.y0 < 0 || b.x1 > 999 || b.y1 > 999 || b.x0 > b.x1 || b.y0 > b.y1)
        throw box_error(box_error::kind::out_of_bounds, "box corners must be ordered within 0..999");
}

// ---- rendering ----

struct render_state {
    std::string out;
    std::vector<std::pair<size_t, size_t>> result_holes;
};

void render_segments_into(const std::vector<segment>& segs, render_state& st);

void render_step(const agent_step& step, render_state& st) {
    st.out += k_function_kw;
    st.out += step.function;
    st.out += k_sp_args;
    st.out += render_args(step.args);
    st.out += k_nl_result;
    const size_t hole_begin = st.out.size();
    render_segments_into(step.result, st);
    st.result_holes.emplace_back(hole_begin, st.out.size());
    if (!step.return_text.empty()) {
        st.out += k_nl_return;
        st.out += step.return_text;
    }
}

void render_segments_into(const std::vector<segment>& segs, render_state& st) {
    bool prev_was_step = false;
    for (const auto& seg : segs) {
        const bool is_step = std::holds_alternative<agent_step>(seg.value);
        if (is_step && prev_was_step) st.out += '\n';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, text_segment>) {
                    st.out += v.text;
                } else if constexpr (std::is_same_v<T, image_ref> || std::is_same_v<T, video_ref>) {
                    st.out += k_vision_start;
                    st.out += v.path;
                    st.out += k_vision_end;
                } else if constexpr (std::is_same_v<T, object_ref>) {
                    check_box(v.box);
                    st.out += k_object_ref_start;
                    st.out += v.label;
                    st.out += k_object_ref_end;
                    st.out += k_box_start;
                    append_box(st.out, v.box);
                    st.out += k_box_end;
                } else {
                    render_step(v, st);
                }
            },
            seg.value);
        prev_was_step = is_step;
    }
}

// ---- parsing ----

std::vector<segment> parse_content(std::string_view v, size_t base, bool allow_steps);

int64_t parse_int_at(std::string_view v, size_t& pos, size_t base) {
    int64_t out = 0;
    const char* first = v.data() + pos;
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr == first)
        throw parse_error(parse_error::kind::args_not_parseable, base + pos, "expected an integer");
    pos += static_cast<size_t>(ptr - first);
    return out;
}

void skip_spaces(std::string_view v, size_t& pos) {
    while (pos < v.size() && v[pos] == ' ') ++pos;
}

// Parses a {...} literal starting at pos; returns the map and leaves pos just
// past the closing brace.
arg_map parse_args_at(std::string_view v, size_t& pos, size_t base) {
    if (pos >= v.size() || v[pos] != '{')
        throw parse_error(parse_error::kind::args_not_parseable, base + pos, "expected '{'");
    ++pos;
    arg_map args;
    skip_spaces(v, pos);
    if (pos < v.size() && v[pos] == '}') {
        ++pos;
        return args;
    }
    while (true) {
        skip_spaces(v, pos);
        if (pos >= v.size() || v[pos] != '"')
            throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                              "expected a quoted key");
        const size_t key_begin = pos + 1;
        const size_t key_end = v.find('"', key_begin);
        if (key_end == std::string_view::npos || v.find('\n', key_begin) < key_end)
            throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                              "unterminated key");
        std::string key(v.substr(key_begin, key_end - key_begin));
        pos = key_end + 1;
        if (pos >= v.size() || v[pos] != ':')
            throw parse_error(parse_error::kind::args_not_parseable, base + pos, "expected ':'");
        ++pos;
        skip_spaces(v, pos);
        if (pos >= v.size())
            throw parse_error(parse_error::kind::args_not_parseable, base + pos, "missing value");
        arg_value val;
        if (v[pos] == '"') {
            const size_t s_begin = pos + 1;
            const size_t s_end = v.find('"', s_begin);
            if (s_end == std::string_view::npos || v.find('\n', s_begin) < s_end)
                throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                                  "unterminated string");
            val = arg_value::str(std::string(v.substr(s_begin, s_end - s_begin)));
            pos = s_end + 1;
        } else if (v[pos] == '(') {
            ++pos;
            skip_spaces(v, pos);
            const int64_t x = parse_int_at(v, pos, base);
            skip_spaces(v, pos);
            if (pos >= v.size() || v[pos] != ',')
                throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                                  "expected ',' in point");
            ++pos;
            skip_spaces(v, pos);
            const int64_t y = parse_int_at(v, pos, base);
            skip_spaces(v, pos);
            if (pos >= v.size() || v[pos] != ')')
                throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                                  "expected ')' in point");
            ++pos;
            val = arg_value::point(x, y);
        } else {
            val = arg_value::integer(parse_int_at(v, pos, base));
        }
        args.emplace_back(std::move(key), std::move(val));
        skip_spaces(v, pos);
        if (pos < v.size() && v[pos] == ',') {
            ++pos;
            continue;
        }
        if (pos < v.size() && v[pos] == '}') {
            ++pos;
            return args;
        }
        throw parse_error(parse_error::kind::args_not_parseable, base + pos,
                          "expected ',' or '}'");
    }
}

// Parses the box group that must follow an object ref:
// <|box_start|>(x0,y0),(x1,y1)<|box_end|>. pos starts at <|box_start|>.
normalized_box parse_box_group(std::string_view v, size_t& pos, size_t base) {
    if (!starts_with_at(v, pos, k_box_start))
        throw parse_error(parse_error::kind::malformed_box, base + pos,
                          "object ref without box group");
    pos += k_box_start.size();
    auto corner = [&](int64_t& x, int64_t& y) {
        if (pos >= v.size() || v[pos] != '(')
            throw parse_error(parse_error::kind::malformed_box, base + pos, "expected '('");
        ++pos;
        x = parse_int_at(v, pos, base);
        if (pos >= v.size() || v[pos] != ',')
            throw parse_error(parse_error::kind::malformed_box, base + pos, "expected ','");
        ++pos;
        y = parse_int_at(v, pos, base);
        if (pos >= v.size() || v[pos] != ')')
            throw parse_error(parse_error::kind::malformed_box, base + pos, "expected ')'");
        ++pos;
    };
    const size_t group_off = base + pos;
    int64_t x0, y0, x1, y1;
    try {
        corner(x0, y0);
        if (pos >= v.size() || v[pos] != ',')
            throw parse_error(parse_error::kind::malformed_box, base + pos,
                              "expected ',' between corners");
        ++pos;
        corner(x1, y1);
    } catch (const parse_error& e) {
        // integer errors surface as malformed boxes here
        throw parse_error(parse_error::kind::malformed_box, e.offset, "bad box coordinates");
    }
    if (!starts_with_at(v, pos, k_box_end))
        throw parse_error(parse_error::kind::malformed_box, base + pos, "missing box end");
    pos += k_box_end.size();
    if (x0 < 0 || y0 < 0 || x1 > 999 || y1 > 999 || x0 > x1 || y0 > y1)
        throw parse_error(parse_error::kind::malformed_box, group_off,
                          "box corners must be ordered within 0..999");
    return normalized_box{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1),
                          static_cast<int>(y1)};
}

// pos starts at <|object_ref_start|>; returns (label, box).
std::pair<std::string, normalized_box> parse_object_group(std::string_view v, size_t& pos,
                                                          size_t base) {
    const size_t group_off = base + pos;
    pos += k_object_ref_start.size();
    const size_t label_end = v.find(k_object_ref_end, pos);
    if (label_end == std::string_view::npos)
        throw parse_error(parse_error::kind::malformed_box, group_off, "unterminated object ref");
    std::string label(v.substr(pos, label_end - pos));
    pos = label_end + k_object_ref_end.size();
    normalized_box box = parse_box_group(v, pos, base);
    return {std::move(label), box};
}

// pos starts at a line-start *FUNCTION* keyword; consumes steps to the end of
// the region and appends them to segs.
void parse_steps(std::string_view v, size_t pos, size_t base, std::vector<segment>* segs) {
    while (true) {
        const size_t step_off = base + pos;
        pos += k_function_kw.size();
        const size_t line_end = std::min(v.find('\n', pos), v.size());
        const size_t args_kw = v.find(k_sp_args, pos);
        if (args_kw == std::string_view::npos || args_kw > line_end)
            throw parse_error(parse_error::kind::missing_keyword, step_off,
                              "expected *ARGS* on the *FUNCTION* line");
        agent_step step;
        step.function = std::string(v.substr(pos, args_kw - pos));
        if (step.function.empty())
            throw parse_error(parse_error::kind::missing_keyword, step_off, "empty function name");
        pos = args_kw + k_sp_args.size();
        step.args = parse_args_at(v, pos, base);
        if (!starts_with_at(v, pos, k_nl_result))
            throw parse_error(parse_error::kind::missing_keyword, base + pos,
                              "expected *RESULT* after *ARGS*");
        pos += k_nl_result.size();
        const size_t ret_kw = v.find(k_nl_return, pos);
        const size_t next_fn = v.find(k_nl_function, pos);
        const size_t result_end = std::min({ret_kw, next_fn, v.size()});
        step.result = parse_content(v.substr(pos, result_end - pos), base + pos, false);
        size_t after;
        if (result_end == ret_kw && ret_kw < next_fn) {
            const size_t ret_begin = ret_kw + k_nl_return.size();
            const size_t fn2 = v.find(k_nl_function, ret_begin);
            const size_t ret_end = std::min(fn2, v.size());
            step.return_text = std::string(v.substr(ret_begin, ret_end - ret_begin));
            after = ret_end;
        } else {
            after = result_end;
        }
        segs->push_back(segment::step(std::move(step)));
        if (after >= v.size()) return;
        pos = after + 1;  // skip the separator newline onto the next *FUNCTION*
    }
}

std::vector<segment> parse_content(std::string_view v, size_t base, bool allow_steps) {
    std::vector<segment> segs;
    size_t run = 0;
    size_t cur = 0;
    auto flush = [&](size_t upto) {
        if (upto > run) segs.push_back(segment::text(std::string(v.substr(run, upto - run))));
    };
    while (cur < v.size()) {
        if (starts_with_at(v, cur, k_vision_start)) {
            flush(cur);
            const size_t open_off = base + cur;
            const size_t ref_begin = cur + k_vision_start.size();
            const size_t close = v.find(k_vision_end, ref_begin);
            const size_t reopen = v.find(k_vision_start, ref_begin);
            if (close == std::string_view::npos || reopen < close)
                throw parse_error(parse_error::kind::mismatched_vision_delimiters, open_off,
                                  "unterminated or nested vision delimiter");
            std::string ref(v.substr(ref_begin, close - ref_begin));
            segs.push_back(looks_like_video(ref) ? segment::video(std::move(ref))
                                                 : segment::image(std::move(ref)));
            cur = close + k_vision_end.size();
            run = cur;
        } else if (starts_with_at(v, cur, k_vision_end)) {
            throw parse_error(parse_error::kind::mismatched_vision_delimiters, base + cur,
                              "vision end without a matching start");
        } else if (starts_with_at(v, cur, k_object_ref_start)) {
            flush(cur);
            auto [label, box] = parse_object_group(v, cur, base);
            segs.push_back(segment::object(std::move(label), box));
            run = cur;
        } else if (allow_steps && at_line_start(v, cur) && starts_with_at(v, cur, k_function_kw)) {
            flush(cur);
            parse_steps(v, cur, base, &segs);
            cur = v.size();
            run = cur;
        } else {
            ++cur;
        }
    }
    flush(v.size());
    return segs;
}

bool role_from_name(std::string_view name, role* out) {
    if (name == "system") *out = role::system;
    else if (name == "user") *out = role::user;
    else if (name == "assistant") *out = role::assistant;
    else return false;
    return true;
}

}  // namespace

std::string_view role_name(role r) {
    switch (r) {
        case role::system: return "system";
        case role::user: return "user";
        case role::assistant: return "assistant";
    }
    return "user";
}

bool operator==(const agent_step& a, const agent_step& b) {
    return a.function == b.function && a.args == b.args && a.result == b.result &&
           a.return_text == b.return_text;
}

bool operator==(const segment& a, const segment& b) { return a.value == b.value; }

bool operator==(const message& a, const message& b) {
    return a.r == b.r && a.segments == b.segments;
}

bool supervision_mask::covers(size_t offset) const {
    for (const auto& [b, e] : spans)
        if (offset >= b && offset < e) return true;
    return false;
}

std::string serialize_segments(const std::vector<segment>& segs) {
    render_state st;
    render_segments_into(segs, st);
    return std::move(st.out);
}

serialized_conversation serialize(const std::vector<message>& msgs,
                                  const supervision_policy& policy) {
    serialized_conversation out;
    render_state st;
    auto& spans = out.mask.spans;
    for (const auto& m : msgs) {
        const size_t msg_start = st.out.size();
        st.out += k_im_start;
        if (policy.start_tokens) spans.emplace_back(msg_start, st.out.size());
        st.out += role_name(m.r);
        st.out += '\n';
        const size_t content_start = st.out.size();
        const size_t holes_before = st.result_holes.size();
        render_segments_into(m.segments, st);
        const size_t end_start = st.out.size();
        st.out += k_im_end;
        const size_t end_end = st.out.size();
        if (m.r == role::assistant && policy.assistant_content) {
            size_t cursor = content_start;
            if (!policy.supervise_results) {
                for (size_t h = holes_before; h < st.result_holes.size(); ++h) {
                    const auto& [hb, he] = st.result_holes[h];
                    if (cursor < hb) spans.emplace_back(cursor, hb);
                    cursor = he;
                }
            }
            if (cursor < end_end) spans.emplace_back(cursor, end_end);
        } else if (policy.closing_ends) {
            spans.emplace_back(end_start, end_end);
        }
        st.out += '\n';
    }
    out.text = std::move(st.out);
    return out;
}

std::vector<message> parse(std::string_view text) {
    std::vector<message> msgs;
    size_t pos = 0;
    while (pos < text.size()) {
        if (!starts_with_at(text, pos, k_im_start))
            throw parse_error(parse_error::kind::expected_message_start, pos,
                              "expected <|im_start|>");
        const size_t msg_start = pos;
        pos += k_im_start.size();
        const size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            throw parse_error(parse_error::kind::unterminated_message, msg_start,
                              "message has no role line terminator");
        message m;
        if (!role_from_name(text.substr(pos, nl - pos), &m.r))
            throw parse_error(parse_error::kind::unknown_role, pos,
                              "role must be system, user or assistant");
        const size_t content_start = nl + 1;
        const size_t end_pos = text.find(k_im_end, content_start);
        const size_t next_start = text.find(k_im_start, content_start);
        if (end_pos == std::string_view::npos || next_start < end_pos)
            throw parse_error(parse_error::kind::unterminated_message, msg_start,
                              "message is not closed by <|im_end|>");
        m.segments = parse_content(text.substr(content_start, end_pos - content_start),
                                   content_start, m.r == role::assistant);
        msgs.push_back(std::move(m));
        pos = end_pos + k_im_end.size();
        if (pos < text.size() && text[pos] == '\n') ++pos;
    }
    return msgs;
}

normalized_box normalize_box(double x0, double y0, double x1, double y1, int64_t img_w,
                             int64_t img_h) {
    if (img_w < 1 || img_h < 1)
        throw box_error(box_error::kind::degenerate_box, "image extent must be >= 1");
    if (x0 < 0 || y0 < 0 || x1 > static_cast<double>(img_w) || y1 > static_cast<double>(img_h) ||
        x0 > x1 || y0 > y1)
        throw box_error(box_error::kind::out_of_bounds,
                        "box corners must be ordered within the image");
    auto q = [](double v, int64_t extent) {
        const int64_t scaled = std::llround(v / static_cast<double>(extent) * 1000.0);
        return static_cast<int>(std::clamp<int64_t>(scaled, 0, 999));
    };
    return normalized_box{q(x0, img_w), q(y0, img_h), q(x1, img_w), q(y1, img_h)};
}

std::string render_grounding(std::string_view label, const normalized_box& box) {
    check_box(box);
    std::string out;
    out += k_object_ref_start;
    out += label;
    out += k_object_ref_end;
    out += k_box_start;
    append_box(out, box);
    out += k_box_end;
    return out;
}

std::vector<std::pair<std::string, normalized_box>> parse_grounding(std::string_view text) {
    std::vector<std::pair<std::string, normalized_box>> out;
    size_t pos = 0;
    while ((pos = text.find(k_object_ref_start, pos)) != std::string_view::npos) {
        size_t cur = pos;
        out.push_back(parse_object_group(text, cur, 0));
        pos = cur;
    }
    return out;
}

std::vector<agent_step> parse_agent_transcript(std::string_view text) {
    std::vector<agent_step> steps;
    auto collect = [&steps](const std::vector<segment>& segs) {
        for (const auto& seg : segs)
            if (const auto* st = std::get_if<agent_step>(&seg.value)) steps.push_back(*st);
    };

    if (text.find(k_im_start) != std::string_view::npos) {
        for (const auto& m : parse(text))
            if (m.r == role::assistant) collect(m.segments);
        return steps;
    }

    // Raw transcript: locate the first line-start keyword; anything before it
    // is free text.
    const std::array<std::string_view, 4> kws = {k_function_kw, k_args_kw, k_result_kw,
                                                 k_return_kw};
    size_t first = std::string_view::npos;
    size_t first_kw = 0;
    for (size_t i = 0; i < kws.size(); ++i) {
        size_t p = 0;
        while ((p = text.find(kws[i], p)) != std::string_view::npos) {
            if (at_line_start(text, p)) {
                if (p < first) {
                    first = p;
                    first_kw = i;
                }
                break;
            }
            ++p;
        }
    }
    if (first == std::string_view::npos) return steps;
    if (first_kw != 0)
        throw parse_error(parse_error::kind::missing_keyword, first,
                          "transcript keyword appears before *FUNCTION*");
    std::vector<segment> segs;
    parse_steps(text, first, 0, &segs);
    collect(segs);
    return steps;
}

std::string render_args(const arg_map& args) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, val] : args) {
        if (!first) out += ", ";
        first = false;
        out += '"';
        out += key;
        out += "\": ";
        std::visit(
            [&out](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, int64_t>) {
                    out += std::to_string(v);
                } else if constexpr (std::is_same_v<T, std::string>) {
                    out += '"';
                    out += v;
                    out += '"';
                } else {
                    out += '(';
                    out += std::to_string(v.first);
                    out += ',';
                    out += std::to_string(v.second);
                    out += ')';
                }
            },
            val.value);
    }
    out += '}';
    return out;
}

arg_map parse_args(std::string_view text) {
    size_t pos = 0;
    arg_map args = parse_args_at(text, pos, 0);
    if (pos != text.size())
        throw parse_error(parse_error::kind::args_not_parseable, pos,
                          "trailing bytes after argument map");
    return args;
}

}  // namespace vistok
