#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "vistok/chatml.hpp"

using vistok::agent_step;
using vistok::arg_map;
using vistok::arg_value;
using vistok::box_error;
using vistok::message;
using vistok::normalized_box;
using vistok::parse_error;
using vistok::role;
using vistok::segment;
using vistok::supervision_policy;

namespace {

std::string read_file(const std::string& name) {
    std::ifstream in(std::string(VISTOK_FIXTURES_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<message> two_picture_dialogue() {
    std::vector<message> msgs;
    msgs.push_back({role::user,
                    {segment::image("Picture1.jpg"), segment::image("Picture2.jpg"),
                     segment::text("What do the two pictures have in common?")}});
    msgs.push_back(
        {role::assistant, {segment::text("Both pictures are of SpongeBob SquarePants. ")}});
    msgs.push_back({role::user,
                    {segment::text("What is happening in the video?"),
                     segment::video("video.mp4")}});
    msgs.push_back(
        {role::assistant, {segment::text("The protagonist in the video is frying an egg.")}});
    return msgs;
}

bool span_covered(const vistok::supervision_mask& mask, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
        if (!mask.covers(i)) return false;
    return true;
}

bool span_untouched(const vistok::supervision_mask& mask, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
        if (mask.covers(i)) return false;
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("chatml");

TEST_CASE("the two-picture dialogue serializes to the stored golden bytes") {
    const auto out = vistok::serialize(two_picture_dialogue());
    CHECK(out.text == read_file("chatml_dialogue.txt"));
    CHECK(out.text.find("<|vision_start|>Picture1.jpg<|vision_end|>"
                        "<|vision_start|>Picture2.jpg<|vision_end|>"
                        "What do the two pictures have in common?") != std::string::npos);
}

TEST_CASE("the supervision mask covers assistant content and structure only") {
    const auto out = vistok::serialize(two_picture_dialogue());
    const std::string target = "Both pictures are of SpongeBob SquarePants. <|im_end|>";
    const size_t at = out.text.find(target);
    REQUIRE(at != std::string::npos);
    CHECK(span_covered(out.mask, at, at + target.size()));

    const std::string question = "What do the two pictures have in common?";
    const size_t q_at = out.text.find(question);
    REQUIRE(q_at != std::string::npos);
    CHECK(span_untouched(out.mask, q_at, q_at + question.size()));

    // Every <|im_start|> is supervised, as is the <|im_end|> of user turns.
    size_t pos = 0;
    int starts = 0;
    while ((pos = out.text.find("<|im_start|>", pos)) != std::string::npos) {
        CHECK(span_covered(out.mask, pos, pos + 12));
        pos += 12;
        ++starts;
    }
    CHECK(starts == 4);
    const size_t user_end = out.text.find("<|im_end|>");  // first close = first user turn
    CHECK(span_covered(out.mask, user_end, user_end + 10));

    // Spans are sorted, disjoint and inside the text.
    size_t prev_end = 0;
    for (const auto& [b, e] : out.mask.spans) {
        CHECK(b >= prev_end);
        CHECK(b < e);
        CHECK(e <= out.text.size());
        prev_end = e;
    }
}

TEST_CASE("supervision policy switches prune the mask") {
    const auto msgs = two_picture_dialogue();
    supervision_policy no_starts;
    no_starts.start_tokens = false;
    const auto out = vistok::serialize(msgs, no_starts);
    const size_t first_start = out.text.find("<|im_start|>");
    CHECK(span_untouched(out.mask, first_start, first_start + 12));

    supervision_policy no_closes;
    no_closes.closing_ends = false;
    const auto out2 = vistok::serialize(msgs, no_closes);
    const size_t user_end = out2.text.find("<|im_end|>");
    CHECK(span_untouched(out2.mask, user_end, user_end + 10));
}

TEST_CASE("empty conversations serialize to nothing") {
    const auto out = vistok::serialize({});
    CHECK(out.text.empty());
    CHECK(out.mask.spans.empty());
}

TEST_CASE("parsing the dialogue golden restores the message list") {
    const auto msgs = vistok::parse(read_file("chatml_dialogue.txt"));
    REQUIRE(msgs.size() == 4);
    CHECK(msgs == two_picture_dialogue());
}

TEST_CASE("unknown special-looking tokens stay plain text") {
    const std::string text = "<|im_start|>user\nfoo <|weird|> bar<|im_end|>\n";
    const auto msgs = vistok::parse(text);
    REQUIRE(msgs.size() == 1);
    REQUIRE(msgs[0].segments.size() == 1);
    CHECK(msgs[0].segments[0] == segment::text("foo <|weird|> bar"));
    CHECK(vistok::serialize(msgs).text == text);
}

TEST_CASE("parse reports structural failures with byte offsets") {
    try {
        static_cast<void>(vistok::parse("<|im_start|>user\nhi"));
        FAIL("expected unterminated message");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::unterminated_message);
    }
    CHECK_THROWS_AS(static_cast<void>(vistok::parse("<|im_start|>user")), parse_error);
    try {
        static_cast<void>(vistok::parse("hello"));
        FAIL("expected message-start error");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::expected_message_start);
        CHECK(e.offset == 0);
    }
    try {
        static_cast<void>(vistok::parse("<|im_start|>narrator\nhi<|im_end|>\n"));
        FAIL("expected unknown role");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::unknown_role);
    }
}

TEST_CASE("vision delimiters must pair up") {
    const auto expect_mismatch = [](const std::string& content) {
        try {
            static_cast<void>(
                vistok::parse("<|im_start|>user\n" + content + "<|im_end|>\n"));
            FAIL("expected vision delimiter error");
        } catch (const parse_error& e) {
            CHECK(e.which == parse_error::kind::mismatched_vision_delimiters);
        }
    };
    expect_mismatch("<|vision_start|>a.jpg");                               // unterminated
    expect_mismatch("a.jpg<|vision_end|>");                                 // stray close
    expect_mismatch("<|vision_start|><|vision_start|>a.jpg<|vision_end|>"); // nested
}

TEST_CASE("normalize_box quantizes to the thousandth grid") {
    CHECK(vistok::normalize_box(0, 0, 640, 480, 640, 480) ==
          normalized_box{0, 0, 999, 999});
    CHECK(vistok::normalize_box(176, 106, 232, 160, 1000, 1000) ==
          normalized_box{176, 106, 232, 160});
    CHECK(vistok::normalize_box(1000, 0, 1000, 0, 2000, 1000).x0 == 500);
}

TEST_CASE("normalize_box is idempotent and monotone") {
    gen::engine rng(81);
    for (int i = 0; i < 200; ++i) {
        const auto b = gen::random_box(rng);
        const auto again = vistok::normalize_box(b.x0, b.y0, b.x1, b.y1, 1000, 1000);
        CHECK(again == b);
    }
    // Growing a pixel coordinate never shrinks the normalized one.
    int prev = -1;
    for (int x = 0; x <= 640; x += 7) {
        const auto b = vistok::normalize_box(x, 0, 640, 480, 640, 480);
        CHECK(b.x0 >= prev);
        prev = b.x0;
    }
}

TEST_CASE("normalize_box rejects impossible boxes") {
    try {
        static_cast<void>(vistok::normalize_box(10, 10, 5, 20, 100, 100));
        FAIL("expected out-of-bounds");
    } catch (const box_error& e) {
        CHECK(e.which == box_error::kind::out_of_bounds);
    }
    CHECK_THROWS_AS(static_cast<void>(vistok::normalize_box(-1, 0, 5, 5, 100, 100)), box_error);
    CHECK_THROWS_AS(static_cast<void>(vistok::normalize_box(0, 0, 101, 5, 100, 100)), box_error);
    try {
        static_cast<void>(vistok::normalize_box(0, 0, 0, 0, 0, 100));
        FAIL("expected degenerate image");
    } catch (const box_error& e) {
        CHECK(e.which == box_error::kind::degenerate_box);
    }
}

TEST_CASE("grounding renders byte-exactly and round-trips") {
    const normalized_box giraffe{176, 106, 232, 160};
    const std::string rendered = vistok::render_grounding("the eyes on a giraffe", giraffe);
    CHECK(rendered ==
          "<|object_ref_start|>the eyes on a giraffe<|object_ref_end|>"
          "<|box_start|>(176,106),(232,160)<|box_end|>");
    CHECK(vistok::render_grounding("x", normalized_box{0, 0, 0, 0}) ==
          "<|object_ref_start|>x<|object_ref_end|><|box_start|>(0,0),(0,0)<|box_end|>");

    const auto found = vistok::parse_grounding(rendered);
    REQUIRE(found.size() == 1);
    CHECK(found[0].first == "the eyes on a giraffe");
    CHECK(found[0].second == giraffe);
}

TEST_CASE("the grounding golden file reproduces from segments") {
    const std::vector<segment> segs = {
        segment::image("Picture1.jpg"), segment::text("\n"),
        segment::object("the eyes on a giraffe", normalized_box{176, 106, 232, 160})};
    CHECK(vistok::serialize_segments(segs) == read_file("referring_grounding.txt"));

    const auto found = vistok::parse_grounding(read_file("referring_grounding.txt"));
    REQUIRE(found.size() == 1);
    CHECK(found[0].second == normalized_box{176, 106, 232, 160});
}

TEST_CASE("grounding scan ignores unrelated text and flags bad boxes") {
    CHECK(vistok::parse_grounding("no annotations here").empty());
    const std::string bad =
        "<|object_ref_start|>x<|object_ref_end|><|box_start|>(1000,0),(0,0)<|box_end|>";
    try {
        static_cast<void>(vistok::parse_grounding(bad));
        FAIL("expected malformed box");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::malformed_box);
        CHECK(e.offset > 0);
    }
    CHECK_THROWS_AS(static_cast<void>(vistok::parse_grounding(
                        "<|object_ref_start|>x<|object_ref_end|>"
                        "<|box_start|>(1,2)(3,4)<|box_end|>")),
                    parse_error);
}

TEST_CASE("argument maps render in the fixed literal grammar") {
    CHECK(vistok::render_args({}) == "{}");
    arg_map point = {{"point", arg_value::point(348, 291)}};
    CHECK(vistok::render_args(point) == "{\"point\": (348,291)}");
    arg_map mixed = {{"n", arg_value::integer(-4)}, {"s", arg_value::str("hi there")}};
    CHECK(vistok::render_args(mixed) == "{\"n\": -4, \"s\": \"hi there\"}");

    CHECK(vistok::parse_args("{}") == arg_map{});
    CHECK(vistok::parse_args("{\"point\": (348,291)}") == point);
    CHECK(vistok::parse_args("{\"n\": -4, \"s\": \"hi there\"}") == mixed);
}

TEST_CASE("argument parsing failures carry offsets") {
    try {
        static_cast<void>(vistok::parse_args("{bad}"));
        FAIL("expected args failure");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::args_not_parseable);
    }
    CHECK_THROWS_AS(static_cast<void>(vistok::parse_args("{\"k\": }")), parse_error);
    CHECK_THROWS_AS(static_cast<void>(vistok::parse_args("{\"k\": 1} ")), parse_error);
    CHECK_THROWS_AS(static_cast<void>(vistok::parse_args("{\"k\": (1,)}")), parse_error);
}

TEST_CASE("agent steps render the four-keyword protocol") {
    agent_step st;
    st.function = "Tap";
    st.args = {{"point", arg_value::point(348, 291)}};
    st.result = {segment::image("Screenshot_3.jpg")};
    st.return_text = "The Map app is open.";
    CHECK(vistok::serialize_segments({segment::step(st)}) ==
          "*FUNCTION*: Tap *ARGS*: {\"point\": (348,291)}\n"
          "*RESULT*: <|vision_start|>Screenshot_3.jpg<|vision_end|>\n"
          "*RETURN*: The Map app is open.");

    agent_step bare;
    bare.function = "Stand";
    bare.result = {segment::text("Player win!")};
    CHECK(vistok::serialize_segments({segment::step(bare)}) ==
          "*FUNCTION*: Stand *ARGS*: {}\n*RESULT*: Player win!");

    // Adjacent steps joined by one newline.
    CHECK(vistok::serialize_segments({segment::step(bare), segment::step(bare)}) ==
          "*FUNCTION*: Stand *ARGS*: {}\n*RESULT*: Player win!\n"
          "*FUNCTION*: Stand *ARGS*: {}\n*RESULT*: Player win!");
}

TEST_CASE("the agent golden file parses into the pizza action sequence") {
    const auto text = read_file("visual_agent.txt");
    const auto steps = vistok::parse_agent_transcript(text);
    REQUIRE(steps.size() == 3);
    CHECK(steps[0].function == "Home");
    CHECK(steps[0].args.empty());
    CHECK(steps[1].function == "Tap");
    CHECK(steps[1].args == arg_map{{"point", arg_value::point(348, 291)}});
    CHECK(steps[2].function == "Tap");
    CHECK(steps[2].args == arg_map{{"point", arg_value::point(512, 131)}});
    // The system prompt describes the protocol with the same keywords but
    // contributes no steps: only assistant content is scanned.
    const auto msgs = vistok::parse(text);
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[0].r == role::system);
    // Round-trip of the golden is byte-exact.
    CHECK(vistok::serialize(msgs).text == text);
}

TEST_CASE("raw transcripts parse without a conversation wrapper") {
    const std::string raw =
        "*FUNCTION*: Hit *ARGS*: {}\n*RESULT*: you drew a 7\n*RETURN*: Hit again.\n"
        "*FUNCTION*: Stand *ARGS*: {}\n*RESULT*: dealer busts";
    const auto steps = vistok::parse_agent_transcript(raw);
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].function == "Hit");
    CHECK(steps[0].return_text == "Hit again.");
    CHECK(steps[1].function == "Stand");
    CHECK(steps[1].return_text.empty());
}

TEST_CASE("keyword order violations are rejected") {
    try {
        static_cast<void>(
            vistok::parse_agent_transcript("*ARGS*: {}\n*FUNCTION*: Tap *ARGS*: {}"));
        FAIL("expected missing keyword");
    } catch (const parse_error& e) {
        CHECK(e.which == parse_error::kind::missing_keyword);
    }
    // A function line with no *ARGS* on the same line.
    CHECK_THROWS_AS(
        static_cast<void>(vistok::parse_agent_transcript("*FUNCTION*: Tap\n*ARGS*: {}")),
        parse_error);
}

TEST_CASE("result observations stay unsupervised unless opted in") {
    agent_step st;
    st.function = "Look";
    st.result = {segment::text("environment text")};
    st.return_text = "done";
    const std::vector<message> msgs = {{role::user, {segment::text("go")}},
                                       {role::assistant, {segment::step(st)}}};
    const auto out = vistok::serialize(msgs);
    const size_t obs = out.text.find("environment text");
    REQUIRE(obs != std::string::npos);
    CHECK(span_untouched(out.mask, obs, obs + 16));
    const size_t ret = out.text.find("*RETURN*: done");
    CHECK(span_covered(out.mask, ret, ret + 14));

    supervision_policy everything;
    everything.supervise_results = true;
    const auto out2 = vistok::serialize(msgs, everything);
    CHECK(span_covered(out2.mask, obs, obs + 16));
}

TEST_CASE("serialize and parse are inverse on canonical conversations") {
    gen::engine rng(82);
    for (int trial = 0; trial < 250; ++trial) {
        const auto msgs = gen::random_conversation(rng);
        const auto out = vistok::serialize(msgs);
        CAPTURE(out.text);
        const auto back = vistok::parse(out.text);
        REQUIRE(back == msgs);
        // Serializing the parse is byte-identical.
        REQUIRE(vistok::serialize(back).text == out.text);
    }
}

TEST_SUITE_END();
