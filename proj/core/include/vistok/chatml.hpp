#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace vistok {

inline constexpr std::string_view k_im_start = "<|im_start|>";
inline constexpr std::string_view k_im_end = "<|im_end|>";
inline constexpr std::string_view k_vision_start = "<|vision_start|>";
inline constexpr std::string_view k_vision_end = "<|vision_end|>";
inline constexpr std::string_view k_object_ref_start = "<|object_ref_start|>";
inline constexpr std::string_view k_object_ref_end = "<|object_ref_end|>";
inline constexpr std::string_view k_box_start = "<|box_start|>";
inline constexpr std::string_view k_box_end = "<|box_end|>";

inline constexpr std::string_view k_function_kw = "*FUNCTION*: ";
inline constexpr std::string_view k_args_kw = "*ARGS*: ";
inline constexpr std::string_view k_result_kw = "*RESULT*: ";
inline constexpr std::string_view k_return_kw = "*RETURN*: ";

enum class role { system, user, assistant };

std::string_view role_name(role r);

// Box corners on the fixed 0..999 grid, (x0, y0) top-left inclusive.
struct normalized_box {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    friend bool operator==(const normalized_box&, const normalized_box&) = default;
};

// Function-call argument value: integer, quoted string or coordinate pair.
struct arg_value {
    std::variant<int64_t, std::string, std::pair<int64_t, int64_t>> value;

    static arg_value integer(int64_t v) { return {v}; }
    static arg_value str(std::string v) { return {std::move(v)}; }
    static arg_value point(int64_t x, int64_t y) { return {std::make_pair(x, y)}; }

    friend bool operator==(const arg_value&, const arg_value&) = default;
};

using arg_map = std::vector<std::pair<std::string, arg_value>>;

struct segment;

// One environment interaction:
//   *FUNCTION*: name *ARGS*: {...}
//   *RESULT*: <observation segments>
//   *RETURN*: reply
// The *RETURN* line is omitted when return_text is empty (an episode's last
// step may end on the environment result).
struct agent_step {
    std::string function;
    arg_map args;
    std::vector<segment> result;
    std::string return_text;
};

struct text_segment {
    std::string text;
    friend bool operator==(const text_segment&, const text_segment&) = default;
};
struct image_ref {
    std::string path;
    friend bool operator==(const image_ref&, const image_ref&) = default;
};
struct video_ref {
    std::string path;
    friend bool operator==(const video_ref&, const video_ref&) = default;
};
struct object_ref {
    std::string label;
    normalized_box box;
    friend bool operator==(const object_ref&, const object_ref&) = default;
};

struct segment {
    std::variant<text_segment, image_ref, video_ref, object_ref, agent_step> value;

    static segment text(std::string t) { return {text_segment{std::move(t)}}; }
    static segment image(std::string path) { return {image_ref{std::move(path)}}; }
    static segment video(std::string path) { return {video_ref{std::move(path)}}; }
    static segment object(std::string label, normalized_box box) {
        return {object_ref{std::move(label), box}};
    }
    static segment step(agent_step s) { return {std::move(s)}; }
};

bool operator==(const agent_step& a, const agent_step& b);
bool operator==(const segment& a, const segment& b);
inline bool operator!=(const segment& a, const segment& b) { return !(a == b); }

struct message {
    role r = role::user;
    std::vector<segment> segments;
};

bool operator==(const message& a, const message& b);
inline bool operator!=(const message& a, const message& b) { return !(a == b); }

// Sorted, disjoint, half-open byte ranges of the serialized text that carry
// the training loss.
struct supervision_mask {
    std::vector<std::pair<size_t, size_t>> spans;

    bool covers(size_t offset) const;
};

struct supervision_policy {
    bool start_tokens = true;        // every <|im_start|>
    bool assistant_content = true;   // assistant content including its <|im_end|>
    bool closing_ends = true;        // <|im_end|> closing non-assistant turns
    bool supervise_results = false;  // observations after *RESULT*: come from the
                                     // environment and stay masked by default
};

struct serialized_conversation {
    std::string text;
    supervision_mask mask;
};

struct parse_error : std::runtime_error {
    enum class kind {
        expected_message_start,
        unterminated_message,
        unknown_role,
        mismatched_vision_delimiters,
        malformed_box,
        missing_keyword,
        args_not_parseable,
    };
    parse_error(kind k, size_t off, const std::string& msg)
        : std::runtime_error(msg + " (byte " + std::to_string(off) + ")"), which(k), offset(off) {}
    kind which;
    size_t offset;
};

struct box_error : std::runtime_error {
    enum class kind { out_of_bounds, degenerate_box };
    box_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
    kind which;
};

// Renders "<|im_start|>ROLE\nCONTENT<|im_end|>\n" per message. parse() of the
// result reproduces the input for conversations in canonical form: text runs
// are maximal, refs carry a recognizable extension, and no text segment
// immediately follows an agent step inside one message (the step separator
// newline belongs to the serializer).
serialized_conversation serialize(const std::vector<message>& msgs,
                                  const supervision_policy& policy = {});

// Content-level rendering without the role envelope. Adjacent agent steps are
// joined with a single newline.
std::string serialize_segments(const std::vector<segment>& segs);

std::vector<message> parse(std::string_view text);

// Pixel box to the 0..999 grid: clamp(round(v / extent * 1000), 0, 999) per
// coordinate, rounding half away from zero.
normalized_box normalize_box(double x0, double y0, double x1, double y1, int64_t img_w,
                             int64_t img_h);

// "<|object_ref_start|>LABEL<|object_ref_end|><|box_start|>(x0,y0),(x1,y1)<|box_end|>"
// with no spaces inside the coordinate list.
std::string render_grounding(std::string_view label, const normalized_box& box);

// All grounding annotations in the text, in order. Other bytes are ignored.
std::vector<std::pair<std::string, normalized_box>> parse_grounding(std::string_view text);

// Ordered function-call groups. Conversations (texts containing <|im_start|>)
// are parsed first and only assistant content is scanned, so protocol
// descriptions in system prompts do not count as steps.
std::vector<agent_step> parse_agent_transcript(std::string_view text);

std::string render_args(const arg_map& args);
arg_map parse_args(std::string_view text);

}  // namespace vistok
