#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vistok/chatml.hpp"

namespace vistok {

/// One callable action exposed to the agent, as advertised in the system message.
struct action_spec {
    std::string name;
    std::string description;
};

struct action_set {
    std::vector<action_spec> actions;

    bool contains(std::string_view name) const;
    /// Renders the action names as "{Name1,Name2}" for the protocol preamble.
    std::string names_joined() const;
};

/// What the environment hands back after one action: observation segments that
/// become the *RESULT* value, and whether the episode is over.
struct env_step {
    std::vector<segment> observation;
    bool done = false;
};

class environment {
  public:
    virtual ~environment() = default;
    virtual bool done() const = 0;
    virtual env_step step(const std::string& function, const arg_map& args) = 0;
};

/// Replays a fixed script of environment responses, one per action taken.
/// Stepping past the end of the script is a scenario bug and throws.
class scripted_environment : public environment {
  public:
    explicit scripted_environment(std::vector<env_step> script, bool start_done = false);
    bool done() const override;
    env_step step(const std::string& function, const arg_map& args) override;

  private:
    std::vector<env_step> script_;
    std::size_t next_ = 0;
    bool done_ = false;
};

/// What the policy decided to do next. `thought` is only honoured on the first
/// step, where it becomes the free-text preamble of the assistant turn.
struct action_choice {
    std::string thought;
    std::string function;
    arg_map args;
};

class policy {
  public:
    virtual ~policy() = default;
    /// Returns the next action, or nullopt to stop acting.
    virtual std::optional<action_choice> choose(std::size_t step_index,
                                                const std::vector<segment>& last_observation) = 0;
    /// Produces the *RETURN* commentary for the step that just ran. Empty means
    /// the step is emitted without a *RETURN* line.
    virtual std::string reflect(std::size_t step_index, const env_step& outcome) = 0;
    /// Text emitted as the whole assistant turn when the policy never acts
    /// (e.g. the environment starts out finished).
    virtual std::string final_text() { return {}; }
};

struct scripted_policy_step {
    std::string thought;
    std::string function;
    arg_map args;
    std::string return_text;
};

class scripted_policy : public policy {
  public:
    explicit scripted_policy(std::vector<scripted_policy_step> script, std::string final = {});
    std::optional<action_choice> choose(std::size_t step_index,
                                        const std::vector<segment>& last_observation) override;
    std::string reflect(std::size_t step_index, const env_step& outcome) override;
    std::string final_text() override;

  private:
    std::vector<scripted_policy_step> script_;
    std::string final_;
};

struct agent_error : std::runtime_error {
    enum class kind {
        unknown_action,
        step_limit_exceeded,
        bad_scenario,
    };
    kind which;
    agent_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
};

struct episode_result {
    std::vector<message> conversation;  // system, user, assistant
    std::string transcript;             // serialized conversation bytes
    std::vector<agent_step> steps;      // actions in execution order
    bool completed = false;             // environment reported done
};

/// Renders the fixed system-message scaffold that teaches the step protocol
/// and lists the available actions.
std::string build_system_message(const action_set& actions);

/// Drives one episode: asks the policy for actions, executes them against the
/// environment, and assembles the three-message conversation. Throws
/// agent_error on unknown actions or when step_cap is exceeded before the
/// policy or environment stops.
episode_result run_agent_episode(const std::string& task,
                                 const std::vector<segment>& initial_observation,
                                 const action_set& actions, environment& env, policy& pol,
                                 std::size_t step_cap = 32);

/// A fully scripted episode description, loadable from JSON.
struct scenario {
    std::string task;
    std::vector<segment> initial_observation;
    action_set actions;
    std::vector<scripted_policy_step> policy_script;
    std::string final_text;
    std::vector<env_step> env_script;
    bool env_start_done = false;
    std::size_t step_cap = 32;
};

/// Reads a scenario JSON file. Throws agent_error{bad_scenario} on IO or
/// schema problems.
scenario load_scenario(const std::string& path);

/// Convenience: builds the scripted environment/policy pair and runs it.
episode_result run_scenario(const scenario& sc);

}  // namespace vistok
