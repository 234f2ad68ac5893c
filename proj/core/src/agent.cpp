#include "vistok/agent.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json_conv.hpp"
#include "vistok/dataset.hpp"

namespace vistok {

bool action_set::contains(std::string_view name) const {
    for (const auto& a : actions)
        if (a.name == name) return true;
    return false;
}

std::string action_set::names_joined() const {
    std::string out = "{";
    for (size_t i = 0; i < actions.size(); ++i) {
        if (i) out += ',';
        out += actions[i].name;
    }
    out += '}';
    return out;
}

scripted_environment::scripted_environment(std::vector<env_step> script, bool start_done)
    : script_(std::move(script)), done_(start_done) {}

bool scripted_environment::done() const { return done_; }

env_step scripted_environment::step(const std::string& function, const arg_map& args) {
    (void)function;
    (void)args;
    if (done_)
        throw agent_error(agent_error::kind::bad_scenario,
                          "environment stepped after it finished");
    if (next_ >= script_.size())
        throw agent_error(agent_error::kind::bad_scenario,
                          "environment script exhausted after " + std::to_string(next_) +
                              " steps");
    env_step out = script_[next_++];
    done_ = out.done;
    return out;
}

scripted_policy::scripted_policy(std::vector<scripted_policy_step> script, std::string final)
    : script_(std::move(script)), final_(std::move(final)) {}

std::optional<action_choice> scripted_policy::choose(std::size_t step_index,
                                                     const std::vector<segment>&) {
    if (step_index >= script_.size()) return std::nullopt;
    const auto& s = script_[step_index];
    return action_choice{s.thought, s.function, s.args};
}

std::string scripted_policy::reflect(std::size_t step_index, const env_step&) {
    return step_index < script_.size() ? script_[step_index].return_text : std::string();
}

std::string scripted_policy::final_text() { return final_; }

std::string build_system_message(const action_set& actions) {
    std::string out = "You are a helpful assistant.\n\n# Actions\n\n";
    out += "## You have the following actions.";
    for (const auto& a : actions.actions) {
        out += "\n\n### ";
        out += a.name;
        out += "\n\n";
        out += a.description;
    }
    out += "\n\n## Continuously take action until the task is completed.";
    out += "\n\n*FUNCTION*: The action to take, should be one of ";
    out += actions.names_joined();
    out += ".\n\n*ARGS*: The input of the action.";
    out += "\n\n*RESULT*: Action results.";
    out += "\n\n*RETURN*: Reply based on action results.";
    return out;
}

episode_result run_agent_episode(const std::string& task,
                                 const std::vector<segment>& initial_observation,
                                 const action_set& actions, environment& env, policy& pol,
                                 std::size_t step_cap) {
    episode_result out;
    message sys{role::system, {segment::text(build_system_message(actions))}};
    message user{role::user, {segment::text(task)}};
    for (const auto& s : initial_observation) user.segments.push_back(s);

    message assistant{role::assistant, {}};
    std::vector<segment> last_obs = initial_observation;
    std::size_t step_index = 0;
    while (!env.done()) {
        if (step_index >= step_cap)
            throw agent_error(agent_error::kind::step_limit_exceeded,
                              "episode exceeded the step cap of " + std::to_string(step_cap));
        std::optional<action_choice> choice = pol.choose(step_index, last_obs);
        if (!choice) break;
        if (!actions.contains(choice->function))
            throw agent_error(agent_error::kind::unknown_action,
                              "policy chose an action that is not registered: " +
                                  choice->function);
        if (step_index == 0 && !choice->thought.empty())
            assistant.segments.push_back(segment::text(choice->thought + "\n"));
        env_step outcome = env.step(choice->function, choice->args);
        agent_step st;
        st.function = std::move(choice->function);
        st.args = std::move(choice->args);
        st.result = outcome.observation;
        st.return_text = pol.reflect(step_index, outcome);
        out.steps.push_back(st);
        assistant.segments.push_back(segment::step(std::move(st)));
        last_obs = std::move(outcome.observation);
        ++step_index;
    }
    out.completed = env.done();
    if (out.steps.empty()) {
        const std::string final = pol.final_text();
        if (!final.empty()) assistant.segments.push_back(segment::text(final));
    }
    out.conversation.push_back(std::move(sys));
    out.conversation.push_back(std::move(user));
    out.conversation.push_back(std::move(assistant));
    out.transcript = serialize(out.conversation).text;
    return out;
}

namespace {

using detail::ojson;

std::string get_string(const ojson& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw agent_error(agent_error::kind::bad_scenario,
                          std::string("scenario is missing string field \"") + key + '"');
    return it->get<std::string>();
}

}  // namespace

scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw agent_error(agent_error::kind::bad_scenario, "cannot read scenario file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    ojson j;
    try {
        j = ojson::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw agent_error(agent_error::kind::bad_scenario,
                          std::string("scenario is not valid JSON: ") + e.what());
    }

    try {
        scenario sc;
        sc.task = get_string(j, "task");
        if (const auto it = j.find("initial_observation"); it != j.end())
            for (const auto& s : *it) sc.initial_observation.push_back(detail::segment_from_json(s));
        const auto acts = j.find("actions");
        if (acts == j.end() || !acts->is_array() || acts->empty())
            throw agent_error(agent_error::kind::bad_scenario,
                              "scenario needs a non-empty \"actions\" array");
        for (const auto& a : *acts)
            sc.actions.actions.push_back({get_string(a, "name"), get_string(a, "description")});
        if (const auto it = j.find("policy"); it != j.end()) {
            for (const auto& p : *it) {
                scripted_policy_step step;
                if (p.contains("thought")) step.thought = get_string(p, "thought");
                step.function = get_string(p, "function");
                if (const auto ai = p.find("args"); ai != p.end())
                    step.args = detail::args_from_json(*ai);
                if (p.contains("return")) step.return_text = get_string(p, "return");
                sc.policy_script.push_back(std::move(step));
            }
        }
        if (j.contains("final_text")) sc.final_text = get_string(j, "final_text");
        if (const auto it = j.find("env"); it != j.end()) {
            for (const auto& e : *it) {
                env_step step;
                if (const auto oi = e.find("observation"); oi != e.end())
                    for (const auto& s : *oi) step.observation.push_back(detail::segment_from_json(s));
                if (const auto di = e.find("done"); di != e.end()) step.done = di->get<bool>();
                sc.env_script.push_back(std::move(step));
            }
        }
        if (const auto it = j.find("env_start_done"); it != j.end())
            sc.env_start_done = it->get<bool>();
        if (const auto it = j.find("step_cap"); it != j.end())
            sc.step_cap = it->get<std::size_t>();
        return sc;
    } catch (const dataset_error& e) {
        throw agent_error(agent_error::kind::bad_scenario, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw agent_error(agent_error::kind::bad_scenario, e.what());
    }
}

episode_result run_scenario(const scenario& sc) {
    scripted_environment env(sc.env_script, sc.env_start_done);
    scripted_policy pol(sc.policy_script, sc.final_text);
    return run_agent_episode(sc.task, sc.initial_observation, sc.actions, env, pol, sc.step_cap);
}

}  // namespace vistok
