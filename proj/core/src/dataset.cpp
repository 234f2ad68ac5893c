#include "vistok/dataset.hpp"

#include <utility>

#include "json_conv.hpp"

namespace vistok {

namespace detail {

namespace {

[[noreturn]] void schema_fail(const std::string& msg) {
    throw dataset_error(dataset_error::kind::bad_schema, msg);
}

std::string require_string(const ojson& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        schema_fail(std::string("missing string field \"") + key + '"');
    return it->get<std::string>();
}

}  // namespace

arg_map args_from_json(const ojson& j) {
    if (!j.is_object()) schema_fail("\"args\" must be an object");
    arg_map args;
    for (const auto& [key, val] : j.items()) {
        if (val.is_number_integer() || val.is_number_unsigned()) {
            args.emplace_back(key, arg_value::integer(val.get<int64_t>()));
        } else if (val.is_string()) {
            args.emplace_back(key, arg_value::str(val.get<std::string>()));
        } else if (val.is_array() && val.size() == 2 && val[0].is_number_integer() &&
                   val[1].is_number_integer()) {
            args.emplace_back(key,
                              arg_value::point(val[0].get<int64_t>(), val[1].get<int64_t>()));
        } else {
            schema_fail("argument \"" + key + "\" must be an integer, string or [x, y] pair");
        }
    }
    return args;
}

ojson args_to_json(const arg_map& args) {
    ojson j = ojson::object();
    for (const auto& [key, val] : args) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::pair<int64_t, int64_t>>) {
                    j[key] = ojson::array({v.first, v.second});
                } else {
                    j[key] = v;
                }
            },
            val.value);
    }
    return j;
}

segment segment_from_json(const ojson& j) {
    if (!j.is_object()) schema_fail("content entries must be objects");
    const std::string type = require_string(j, "type");
    if (type == "text") return segment::text(require_string(j, "text"));
    if (type == "image") return segment::image(require_string(j, "image"));
    if (type == "video") return segment::video(require_string(j, "video"));
    if (type == "object_ref") {
        const auto box_it = j.find("box");
        if (box_it == j.end() || !box_it->is_array() || box_it->size() != 4)
            schema_fail("\"object_ref\" needs a 4-element \"box\" array");
        for (const auto& c : *box_it)
            if (!c.is_number_integer()) schema_fail("box corners must be integers");
        normalized_box box{(*box_it)[0].get<int>(), (*box_it)[1].get<int>(),
                           (*box_it)[2].get<int>(), (*box_it)[3].get<int>()};
        return segment::object(require_string(j, "label"), box);
    }
    if (type == "agent_step") {
        agent_step st;
        st.function = require_string(j, "function");
        if (const auto it = j.find("args"); it != j.end()) st.args = args_from_json(*it);
        if (const auto it = j.find("result"); it != j.end()) {
            if (!it->is_array()) schema_fail("\"result\" must be an array of segments");
            for (const auto& item : *it) st.result.push_back(segment_from_json(item));
        }
        if (const auto it = j.find("return"); it != j.end()) {
            if (!it->is_string()) schema_fail("\"return\" must be a string");
            st.return_text = it->get<std::string>();
        }
        return segment::step(std::move(st));
    }
    schema_fail("unknown content type \"" + type + '"');
}

ojson segment_to_json(const segment& s) {
    return std::visit(
        [](const auto& v) -> ojson {
            using T = std::decay_t<decltype(v)>;
            ojson j = ojson::object();
            if constexpr (std::is_same_v<T, text_segment>) {
                j["type"] = "text";
                j["text"] = v.text;
            } else if constexpr (std::is_same_v<T, image_ref>) {
                j["type"] = "image";
                j["image"] = v.path;
            } else if constexpr (std::is_same_v<T, video_ref>) {
                j["type"] = "video";
                j["video"] = v.path;
            } else if constexpr (std::is_same_v<T, object_ref>) {
                j["type"] = "object_ref";
                j["label"] = v.label;
                j["box"] = ojson::array({v.box.x0, v.box.y0, v.box.x1, v.box.y1});
            } else {
                j["type"] = "agent_step";
                j["function"] = v.function;
                j["args"] = args_to_json(v.args);
                ojson result = ojson::array();
                for (const auto& seg : v.result) result.push_back(segment_to_json(seg));
                j["result"] = std::move(result);
                if (!v.return_text.empty()) j["return"] = v.return_text;
            }
            return j;
        },
        s.value);
}

}  // namespace detail

std::vector<message> conversation_from_json(std::string_view json_text) {
    detail::ojson root;
    try {
        root = detail::ojson::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw dataset_error(dataset_error::kind::bad_json, e.what());
    }
    if (!root.is_object() || !root.contains("messages") || !root["messages"].is_array())
        throw dataset_error(dataset_error::kind::bad_schema,
                            "record must be an object with a \"messages\" array");
    std::vector<message> msgs;
    for (const auto& jm : root["messages"]) {
        if (!jm.is_object())
            throw dataset_error(dataset_error::kind::bad_schema, "messages must be objects");
        message m;
        const std::string r = detail::require_string(jm, "role");
        if (r == "system") m.r = role::system;
        else if (r == "user") m.r = role::user;
        else if (r == "assistant") m.r = role::assistant;
        else
            throw dataset_error(dataset_error::kind::bad_schema, "unknown role \"" + r + '"');
        const auto it = jm.find("content");
        if (it == jm.end() || !it->is_array())
            throw dataset_error(dataset_error::kind::bad_schema,
                                "\"content\" must be an array of segments");
        for (const auto& js : *it) m.segments.push_back(detail::segment_from_json(js));
        msgs.push_back(std::move(m));
    }
    return msgs;
}

std::string conversation_to_json(const std::vector<message>& msgs) {
    detail::ojson root = detail::ojson::object();
    detail::ojson arr = detail::ojson::array();
    for (const auto& m : msgs) {
        detail::ojson jm = detail::ojson::object();
        jm["role"] = std::string(role_name(m.r));
        detail::ojson content = detail::ojson::array();
        for (const auto& s : m.segments) content.push_back(detail::segment_to_json(s));
        jm["content"] = std::move(content);
        arr.push_back(std::move(jm));
    }
    root["messages"] = std::move(arr);
    return root.dump();
}

validation_report validate_conversation_json(std::string_view json_text) {
    try {
        const std::vector<message> msgs = conversation_from_json(json_text);
        const serialized_conversation ser = serialize(msgs);
        const std::vector<message> reparsed = parse(ser.text);
        if (!(reparsed == msgs))
            return {false, "round-trip mismatch: reparsed conversation differs", 0};
        return {};
    } catch (const parse_error& e) {
        return {false, e.what(), e.offset};
    } catch (const std::exception& e) {
        return {false, e.what(), 0};
    }
}

}  // namespace vistok
