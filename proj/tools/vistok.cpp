// Command-line front end for the vistok planning library.
//
// Subcommands:
//   resize     plan a target resolution and token counts for an image or video
//   positions  assign multimodal rotary position ids for a segment layout
//   pack       first-fit-decreasing packing of sequence lengths into budgets
//   validate   round-trip check a JSONL conversation dataset
//   agent-sim  replay a scripted agent episode and print the transcript
//
// Exit codes: 0 success, 1 domain/validation failure, 2 usage or IO error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vistok/agent.hpp"
#include "vistok/chatml.hpp"
#include "vistok/dataset.hpp"
#include "vistok/image_header.hpp"
#include "vistok/mrope.hpp"
#include "vistok/packing.hpp"
#include "vistok/resize.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bare file names can be resolved against the directory named by the
// VISTOK_FIXTURES environment variable.
std::string resolve_input_path(const std::string& path) {
    if (fs::exists(path)) return path;
    if (path.find('/') == std::string::npos) {
        if (const char* dir = std::getenv("VISTOK_FIXTURES")) {
            const fs::path candidate = fs::path(dir) / path;
            if (fs::exists(candidate)) return candidate.string();
        }
    }
    return path;
}

std::vector<int64_t> parse_int_list(const std::string& csv, char sep) {
    std::vector<int64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw usage_error("not an integer: \"" + item + '"');
        }
    }
    return out;
}

std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// ---- resize ----

struct resize_options {
    int64_t height = 0;
    int64_t width = 0;
    std::string image_file;
    int64_t min_pixels = -1;
    int64_t max_pixels = -1;
    int64_t fixed_tokens = 0;
    int64_t frames = 0;
    double fps = 0.0;
    bool json = false;
};

int run_resize(resize_options opt) {
    vistok::resize_spec spec;
    if (opt.min_pixels >= 0) spec.min_pixels = opt.min_pixels;
    if (opt.max_pixels >= 0) spec.max_pixels = opt.max_pixels;

    if (!opt.image_file.empty()) {
        const vistok::image_dims dims =
            vistok::read_image_header_file(resolve_input_path(opt.image_file));
        opt.height = dims.height;
        opt.width = dims.width;
    }
    if (opt.height <= 0 || opt.width <= 0)
        throw usage_error("resize needs --height and --width, or --image FILE");

    ojson j;
    j["source_height"] = opt.height;
    j["source_width"] = opt.width;

    if (opt.frames > 0) {
        if (opt.fps <= 0.0) throw usage_error("--frames requires --fps");
        const vistok::resize_plan plan =
            vistok::plan_video(opt.frames, opt.fps, opt.height, opt.width, spec);
        const vistok::token_count tokens =
            vistok::count_tokens(plan.target_h, plan.target_w, spec);
        const int64_t tubes =
            plan.padded_frame_count / static_cast<int64_t>(spec.temporal_patch);
        j["target_height"] = plan.target_h;
        j["target_width"] = plan.target_w;
        j["sampled_frames"] = plan.sampled_frame_indices.size();
        j["padded_frames"] = plan.padded_frame_count;
        j["tubes"] = tubes;
        j["merged_per_tube"] = tokens.merged;
        j["total_merged"] = tubes * tokens.merged;
        j["total_with_delimiters"] = tubes * tokens.merged + 2;
    } else {
        std::pair<int64_t, int64_t> target;
        if (opt.fixed_tokens > 0)
            target = vistok::fixed_token_resize(opt.height, opt.width, opt.fixed_tokens, spec);
        else
            target = vistok::smart_resize(opt.height, opt.width, spec);
        const vistok::token_count tokens = vistok::count_tokens(target.first, target.second, spec);
        j["target_height"] = target.first;
        j["target_width"] = target.second;
        j["patches"] = tokens.patches;
        j["merged"] = tokens.merged;
        j["with_delimiters"] = tokens.with_delimiters;
    }

    if (opt.json) {
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [key, value] : j.items())
            std::cout << key << ": " << value.dump() << "\n";
    }
    return 0;
}

// ---- positions ----

vistok::segment_descriptor parse_layout_item(const std::string& item) {
    const size_t colon = item.find(':');
    if (colon == std::string::npos)
        throw usage_error("layout items look like text:N, image:HxW or video:TxHxW; got \"" +
                          item + '"');
    const std::string kind = item.substr(0, colon);
    const std::vector<int64_t> dims = parse_int_list(item.substr(colon + 1), 'x');
    for (const int64_t d : dims)
        if (d < 1) throw usage_error("layout dimensions must be positive; got \"" + item + '"');
    if (kind == "text") {
        if (dims.size() != 1) throw usage_error("text takes one length, e.g. text:3");
        return vistok::segment_descriptor::text(dims[0]);
    }
    auto make_grid = [](int64_t t, int64_t h, int64_t w) {
        vistok::patch_grid grid;
        grid.grid_t = t;
        grid.grid_h = h;
        grid.grid_w = w;
        return grid;
    };
    if (kind == "image") {
        if (dims.size() == 2)
            return vistok::segment_descriptor::image(make_grid(1, dims[0], dims[1]));
        if (dims.size() == 3 && dims[0] == 1)
            return vistok::segment_descriptor::image(make_grid(1, dims[1], dims[2]));
        throw usage_error("image takes HxW or 1xHxW, e.g. image:1x2x2");
    }
    if (kind == "video") {
        if (dims.size() != 3) throw usage_error("video takes TxHxW, e.g. video:2x4x4");
        return vistok::segment_descriptor::video(make_grid(dims[0], dims[1], dims[2]));
    }
    throw usage_error("unknown layout kind \"" + kind + '"');
}

int run_positions(const std::string& layout, bool json) {
    std::vector<vistok::segment_descriptor> segments;
    std::stringstream ss(layout);
    std::string item;
    while (std::getline(ss, item, ',')) segments.push_back(parse_layout_item(item));
    if (segments.empty()) throw usage_error("--spec is empty");

    const vistok::position_plan plan = vistok::assign_positions(segments);
    const int64_t max_pos = vistok::max_position(plan);
    const int64_t flat_max = static_cast<int64_t>(plan.triples.size()) - 1;

    if (json) {
        ojson j;
        ojson positions = ojson::array();
        for (const auto& p : plan.triples) positions.push_back(ojson::array({p.t, p.h, p.w}));
        j["positions"] = std::move(positions);
        j["max_position"] = max_pos;
        j["equivalent_1d_max"] = flat_max;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << plan.to_text();
        std::cout << "max_position: " << max_pos << "\n";
        std::cout << "equivalent_1d_max: " << flat_max << "\n";
    }
    return 0;
}

// ---- pack ----

int run_pack(int64_t budget, bool lengths_given, const std::string& lengths_csv,
             const std::string& dataset_file, bool json) {
    std::vector<vistok::pack_item> items;
    if (lengths_given && !dataset_file.empty())
        throw usage_error("use either --lengths or --dataset, not both");
    if (lengths_given) {
        const std::vector<int64_t> lengths = parse_int_list(lengths_csv, ',');
        for (size_t i = 0; i < lengths.size(); ++i)
            items.push_back({std::to_string(i), lengths[i]});
    } else if (!dataset_file.empty()) {
        const std::vector<std::string> lines = read_lines(resolve_input_path(dataset_file));
        for (size_t i = 0; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            const std::vector<vistok::message> msgs = vistok::conversation_from_json(lines[i]);
            const int64_t length = static_cast<int64_t>(vistok::serialize(msgs).text.size());
            items.push_back({std::to_string(i), length});
        }
    } else {
        throw usage_error("pack needs --lengths or --dataset");
    }

    const vistok::packed_batch batch = vistok::pack(items, budget);
    const vistok::pack_stats stats = vistok::bin_stats(batch);

    if (json) {
        ojson j;
        j["budget"] = budget;
        j["bin_count"] = stats.bin_count;
        ojson bins = ojson::array();
        for (size_t b = 0; b < batch.bins.size(); ++b) {
            ojson bin = ojson::object();
            ojson entries = ojson::array();
            int64_t total = 0;
            for (const auto& it : batch.bins[b]) {
                entries.push_back(ojson{{"id", it.id}, {"length", it.length}});
                total += it.length;
            }
            bin["items"] = std::move(entries);
            bin["total"] = total;
            bin["fill"] = stats.fill_ratios[b];
            bins.push_back(std::move(bin));
        }
        j["bins"] = std::move(bins);
        j["waste"] = stats.waste;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "bins: " << stats.bin_count << "\n";
        for (size_t b = 0; b < batch.bins.size(); ++b) {
            int64_t total = 0;
            std::string ids, lens;
            for (const auto& it : batch.bins[b]) {
                if (!ids.empty()) {
                    ids += ',';
                    lens += ',';
                }
                ids += it.id;
                lens += std::to_string(it.length);
                total += it.length;
            }
            std::cout << "bin " << b << ": items " << ids << " lengths " << lens << " total "
                      << total << " fill " << format_ratio(stats.fill_ratios[b]) << "\n";
        }
        std::cout << "waste: " << format_ratio(stats.waste) << "\n";
    }
    return 0;
}

// ---- validate ----

int run_validate(const std::string& dataset_file, bool json) {
    const std::vector<std::string> lines = read_lines(resolve_input_path(dataset_file));
    size_t failures = 0;
    ojson report = ojson::array();
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const vistok::validation_report r = vistok::validate_conversation_json(lines[i]);
        if (json) {
            ojson entry = ojson::object();
            entry["line"] = i + 1;
            entry["ok"] = r.ok;
            if (!r.ok) {
                entry["error"] = r.error;
                entry["offset"] = r.offset;
            }
            report.push_back(std::move(entry));
        } else if (r.ok) {
            std::cout << "line " << (i + 1) << ": ok\n";
        } else {
            std::cout << "line " << (i + 1) << ": FAIL " << r.error << "\n";
        }
        if (!r.ok) ++failures;
    }
    if (json) {
        ojson j;
        j["lines"] = std::move(report);
        j["failures"] = failures;
        std::cout << j.dump(2) << "\n";
    }
    return failures == 0 ? 0 : 1;
}

// ---- agent-sim ----

int run_agent_sim(const std::string& scenario_file, bool json) {
    const std::string path = resolve_input_path(scenario_file);
    if (!fs::exists(path)) throw usage_error("cannot read scenario file: " + scenario_file);
    const vistok::scenario sc = vistok::load_scenario(path);
    const vistok::episode_result result = vistok::run_scenario(sc);
    if (json) {
        ojson j;
        j["transcript"] = result.transcript;
        ojson actions = ojson::array();
        for (const auto& st : result.steps) actions.push_back(st.function);
        j["actions"] = std::move(actions);
        j["steps"] = result.steps.size();
        j["completed"] = result.completed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << result.transcript;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic planning tools for vision-language token pipelines"};
    app.require_subcommand(1);

    resize_options ropt;
    auto* resize_cmd =
        app.add_subcommand("resize", "plan a target resolution and its token counts");
    resize_cmd->add_option("--height", ropt.height, "source height in pixels");
    resize_cmd->add_option("--width", ropt.width, "source width in pixels");
    resize_cmd->add_option("--image", ropt.image_file, "read dimensions from a PNG/JPEG header");
    resize_cmd->add_option("--min-pixels", ropt.min_pixels, "lower area bound in pixels");
    resize_cmd->add_option("--max-pixels", ropt.max_pixels, "upper area bound in pixels");
    resize_cmd->add_option("--fixed-tokens", ropt.fixed_tokens,
                           "hit an exact merged-token count instead of the area window");
    resize_cmd->add_option("--frames", ropt.frames, "video frame count (enables video planning)");
    resize_cmd->add_option("--fps", ropt.fps, "native frames per second of the video");
    resize_cmd->add_flag("--json", ropt.json, "emit JSON");

    std::string layout;
    bool positions_json = false;
    auto* positions_cmd =
        app.add_subcommand("positions", "assign multimodal rotary position ids");
    positions_cmd
        ->add_option("--spec", layout,
                     "comma-separated layout, e.g. text:3,image:1x2x2,video:2x4x4")
        ->required();
    positions_cmd->add_flag("--json", positions_json, "emit JSON");

    int64_t budget = 0;
    std::string lengths_csv, pack_dataset;
    bool pack_json = false;
    auto* pack_cmd = app.add_subcommand("pack", "pack sequence lengths into fixed budgets");
    pack_cmd->add_option("--budget", budget, "bin capacity in tokens")->required();
    pack_cmd->add_option("--lengths", lengths_csv, "comma-separated sequence lengths");
    pack_cmd->add_option("--dataset", pack_dataset,
                         "JSONL conversations; length = serialized character count");
    pack_cmd->add_flag("--json", pack_json, "emit JSON");

    std::string validate_dataset;
    bool validate_json = false;
    auto* validate_cmd = app.add_subcommand("validate", "round-trip check a JSONL dataset");
    validate_cmd->add_option("--dataset", validate_dataset, "JSONL conversation file")
        ->required();
    validate_cmd->add_flag("--json", validate_json, "emit JSON");

    std::string scenario_file;
    bool sim_json = false;
    auto* sim_cmd = app.add_subcommand("agent-sim", "replay a scripted agent episode");
    sim_cmd->add_option("--scenario", scenario_file, "scenario JSON file")->required();
    sim_cmd->add_flag("--json", sim_json, "emit JSON instead of the raw transcript");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*resize_cmd) return run_resize(ropt);
        if (*positions_cmd) return run_positions(layout, positions_json);
        if (*pack_cmd)
            return run_pack(budget, pack_cmd->count("--lengths") > 0, lengths_csv, pack_dataset,
                            pack_json);
        if (*validate_cmd) return run_validate(validate_dataset, validate_json);
        if (*sim_cmd) return run_agent_sim(scenario_file, sim_json);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vistok::header_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.which == vistok::header_error::kind::io ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
