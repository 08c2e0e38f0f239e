#include "blicket/trial.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "blicket/dsl.hpp"
#include "blicket/errors.hpp"
#include "blicket/rng.hpp"

namespace blicket {

using ordered_json = nlohmann::ordered_json;

std::string agent_kind_name(AgentKind kind) {
    switch (kind) {
        case AgentKind::Oracle: return "oracle";
        case AgentKind::Random: return "random";
        case AgentKind::CountBased: return "count_based";
        case AgentKind::Chat: return "chat";
        case AgentKind::Sampling: return "sampling";
    }
    return "";
}

std::optional<AgentKind> agent_kind_from_name(const std::string& name) {
    if (name == "oracle") return AgentKind::Oracle;
    if (name == "random") return AgentKind::Random;
    if (name == "count_based") return AgentKind::CountBased;
    if (name == "chat") return AgentKind::Chat;
    if (name == "sampling") return AgentKind::Sampling;
    return std::nullopt;
}

std::pair<bool, std::vector<bool>> score_qa(const std::vector<bool>& answers,
                                            const std::vector<bool>& ground_mask) {
    if (answers.size() != ground_mask.size())
        throw ConfigError("answers and ground mask must have equal length");
    std::vector<bool> per_object(answers.size());
    bool all = true;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        per_object[i] = answers[i] == ground_mask[i];
        all = all && per_object[i];
    }
    return {all, per_object};
}

namespace {

EnvConfig env_config_from(const TrialConfig& config) {
    EnvConfig envcfg;
    envcfg.num_objects = config.num_objects;
    envcfg.rule = config.rule;
    envcfg.horizon = config.horizon;
    envcfg.labels = config.labels;
    envcfg.opening = config.opening;
    envcfg.take_phrasing = config.render_style;
    envcfg.blank_before_commands = true;
    return envcfg;
}

TrialRecord run_lifecycle(const TrialConfig& config, const HypothesisSpace& space, Agent& agent,
                          EnvState state) {
    auto started = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.config = config;
    rec.ground_truth_mask = state.blicket_mask;
    rec.ground_truth_rule = config.rule;
    rec.initial_placement = state.placement;
    rec.initial_light = state.light_on;
    rec.transcript = transcript_prefix(state);

    Belief belief = full_belief(space);
    Observation initial{state.placement, state.light_on};
    belief = filter_consistent(belief, initial);
    rec.observation_pairs.push_back(initial);
    rec.per_step_support_size.push_back(belief.support_size);

    try {
        while (!state.terminated) {
            StepContext ctx{state, belief, rec.observation_pairs, rec.transcript};
            AgentDecision decision = agent.decide(ctx);
            Event event = apply_action(state, decision.action);
            rec.events.push_back(event);
            rec.transcript += render_event(event);
            if (event.observation) {
                Observation obs{event.placement_after, event.light_after};
                rec.observation_pairs.push_back(obs);
                belief = filter_consistent(belief, obs);
            }
            rec.per_step_support_size.push_back(belief.support_size);
        }
        if (config.qa_enabled) {
            bool all = true;
            for (int i = 0; i < config.num_objects; ++i) {
                StepContext ctx{state, belief, rec.observation_pairs, rec.transcript};
                std::optional<bool> answer = agent.answer(ctx, i);
                bool truth = (state.blicket_mask >> i) & 1u;
                bool correct = answer.has_value() && *answer == truth;
                rec.qa.push_back(QaResult{answer, correct});
                all = all && correct;
            }
            rec.all_correct = all;
        }
    } catch (const BackendError& e) {
        rec.complete = false;
        rec.error = e.what();
    }

    rec.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    return rec;
}

std::unique_ptr<Agent> build_agent(const TrialConfig& config, ChatBackend* backend, Rng& arng,
                                   AgentCallLog& log, SamplingAgent** sampler_out) {
    switch (config.agent_kind) {
        case AgentKind::Oracle:
            return make_oracle_agent();
        case AgentKind::Random:
            return make_random_agent(arng);
        case AgentKind::CountBased:
            return make_count_agent(arng, config.num_objects, config.count_deterministic);
        case AgentKind::Chat: {
            if (!backend) throw ConfigError("chat agent needs a backend");
            PromptTemplate system = load_system_template(config.system_message_variant);
            std::string system_msg = instantiate_prompt(
                system, {{"HORIZON", std::to_string(config.horizon)}});
            PromptTemplate style = load_style_template(config.prompting_style);
            ChatAgentConfig chat{system_msg, style.body, config.parse_retries};
            return make_chat_agent(chat, *backend, log);
        }
        case AgentKind::Sampling: {
            if (!backend) throw ConfigError("sampling agent needs a backend");
            SamplingAgentConfig sampling{config.sampling_target, config.sampling_call_budget,
                                         config.parse_retries};
            auto agent = make_sampling_agent(sampling, *backend, log);
            *sampler_out = agent.get();
            return agent;
        }
    }
    throw ConfigError("unknown agent kind");
}

std::vector<Action> actions_of(const TrialRecord& record) {
    std::vector<Action> actions;
    actions.reserve(record.events.size());
    for (const Event& e : record.events) actions.push_back(e.action);
    return actions;
}

ordered_json bits_json(std::uint32_t bits, int n) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < n; ++i) arr.push_back(static_cast<int>((bits >> i) & 1u));
    return arr;
}

std::uint32_t bits_from_json(const ordered_json& arr) {
    std::uint32_t bits = 0;
    int i = 0;
    for (const auto& v : arr) {
        if (v.get<int>()) bits |= 1u << i;
        ++i;
    }
    return bits;
}

std::string action_kind_name(ActionKind kind) {
    switch (kind) {
        case ActionKind::Put: return "put";
        case ActionKind::Take: return "take";
        case ActionKind::Look: return "look";
        case ActionKind::Exit: return "exit";
    }
    return "";
}

ordered_json config_json(const TrialConfig& config) {
    ordered_json cfg;
    cfg["num_objects"] = config.num_objects;
    cfg["num_blickets"] = config.num_blickets;
    cfg["rule"] = rule_name(config.rule);
    cfg["horizon"] = config.horizon;
    cfg["system_message_variant"] = system_variant_name(config.system_message_variant);
    cfg["prompting_style"] = prompting_style_name(config.prompting_style);
    cfg["agent_kind"] = agent_kind_name(config.agent_kind);
    cfg["seed"] = config.seed;
    cfg["render_style"] =
        config.render_style == TakePhrasing::OffOfThe ? "off_of_the" : "off_the";
    cfg["labels"] = config.labels == LabelScheme::Letters ? "letters" : "digits";
    cfg["opening"] = config.opening == OpeningVariant::Test
                         ? "test"
                         : (config.opening == OpeningVariant::Training ? "training" : "standard");
    cfg["qa_enabled"] = config.qa_enabled;
    cfg["count_deterministic"] = config.count_deterministic;
    cfg["sampling_target"] = config.sampling_target;
    cfg["sampling_call_budget"] = config.sampling_call_budget;
    cfg["parse_retries"] = config.parse_retries;
    if (config.backend_json.empty()) {
        cfg["backend"] = nullptr;
    } else {
        ordered_json parsed = ordered_json::parse(config.backend_json, nullptr, false);
        cfg["backend"] = parsed.is_discarded() ? ordered_json(config.backend_json) : parsed;
    }
    return cfg;
}

TrialConfig config_from(const ordered_json& cfg) {
    TrialConfig config;
    if (cfg.contains("num_objects")) config.num_objects = cfg.at("num_objects").get<int>();
    if (cfg.contains("num_blickets")) config.num_blickets = cfg.at("num_blickets").get<int>();
    if (cfg.contains("rule")) {
        auto rule = rule_from_name(cfg.at("rule").get<std::string>());
        if (!rule) throw ConfigError("bad rule '" + cfg.at("rule").get<std::string>() + "'");
        config.rule = *rule;
    }
    if (cfg.contains("horizon")) config.horizon = cfg.at("horizon").get<int>();
    if (cfg.contains("system_message_variant")) {
        auto variant =
            system_variant_from_name(cfg.at("system_message_variant").get<std::string>());
        if (!variant) throw ConfigError("bad system_message_variant");
        config.system_message_variant = *variant;
    }
    if (cfg.contains("prompting_style")) {
        auto style = prompting_style_from_name(cfg.at("prompting_style").get<std::string>());
        if (!style) throw ConfigError("bad prompting_style");
        config.prompting_style = *style;
    }
    if (cfg.contains("agent_kind")) {
        auto kind = agent_kind_from_name(cfg.at("agent_kind").get<std::string>());
        if (!kind) throw ConfigError("bad agent_kind");
        config.agent_kind = *kind;
    }
    if (cfg.contains("seed")) config.seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("render_style"))
        config.render_style = cfg.at("render_style").get<std::string>() == "off_of_the"
                                  ? TakePhrasing::OffOfThe
                                  : TakePhrasing::OffThe;
    if (cfg.contains("labels"))
        config.labels = cfg.at("labels").get<std::string>() == "letters" ? LabelScheme::Letters
                                                                         : LabelScheme::Digits;
    if (cfg.contains("opening")) {
        std::string opening = cfg.at("opening").get<std::string>();
        config.opening = opening == "test"
                             ? OpeningVariant::Test
                             : (opening == "training" ? OpeningVariant::Training
                                                      : OpeningVariant::Standard);
    }
    if (cfg.contains("qa_enabled")) config.qa_enabled = cfg.at("qa_enabled").get<bool>();
    if (cfg.contains("count_deterministic"))
        config.count_deterministic = cfg.at("count_deterministic").get<bool>();
    if (cfg.contains("sampling_target"))
        config.sampling_target = cfg.at("sampling_target").get<std::size_t>();
    if (cfg.contains("sampling_call_budget"))
        config.sampling_call_budget = cfg.at("sampling_call_budget").get<int>();
    if (cfg.contains("parse_retries")) config.parse_retries = cfg.at("parse_retries").get<int>();
    if (cfg.contains("backend") && !cfg.at("backend").is_null())
        config.backend_json = cfg.at("backend").dump();
    return config;
}

ActionKind action_kind_from_name(const std::string& name) {
    if (name == "put") return ActionKind::Put;
    if (name == "take") return ActionKind::Take;
    if (name == "look") return ActionKind::Look;
    if (name == "exit") return ActionKind::Exit;
    throw CorruptRecordError("unknown action kind '" + name + "'");
}

}  // namespace

TrialRecord run_trial(const TrialConfig& config, const HypothesisSpace& space,
                      ChatBackend* backend) {
    if (space.num_objects != config.num_objects)
        throw ConfigError("hypothesis space does not match num_objects");
    StreamSeeds streams = derive_streams(config.seed);
    Rng agent_rng(streams.agent);
    AgentCallLog log;
    SamplingAgent* sampler = nullptr;
    std::unique_ptr<Agent> agent = build_agent(config, backend, agent_rng, log, &sampler);
    EnvState state = init_env(env_config_from(config), config.num_blickets, streams.env);
    TrialRecord rec = run_lifecycle(config, space, *agent, state);
    rec.agent_log = log;
    if (sampler) {
        rec.sampling_active = sampler->state().active;
        rec.sampling_eliminated = sampler->state().eliminated;
    }
    return rec;
}

TrialRecord run_trial_with_agent(const TrialConfig& config, const HypothesisSpace& space,
                                 Agent& agent) {
    if (space.num_objects != config.num_objects)
        throw ConfigError("hypothesis space does not match num_objects");
    StreamSeeds streams = derive_streams(config.seed);
    EnvState state = init_env(env_config_from(config), config.num_blickets, streams.env);
    return run_lifecycle(config, space, agent, state);
}

TrialRecord replay_trial(const TrialRecord& source, const HypothesisSpace& space) {
    if (space.num_objects != source.config.num_objects)
        throw ConfigError("hypothesis space does not match num_objects");
    std::vector<std::optional<bool>> answers;
    for (const QaResult& q : source.qa) answers.push_back(q.answer);
    auto agent = make_replay_agent(actions_of(source), std::move(answers));
    EnvState state = init_env_fixed(env_config_from(source.config), source.ground_truth_mask,
                                    source.initial_placement);
    TrialRecord rec = run_lifecycle(source.config, space, *agent, state);
    rec.agent_log = source.agent_log;
    rec.sampling_active = source.sampling_active;
    rec.sampling_eliminated = source.sampling_eliminated;
    return rec;
}

std::vector<TrialRecord> run_batch(const TrialConfig& base,
                                   const std::vector<std::uint64_t>& seeds,
                                   ChatBackend* backend) {
    HypothesisSpace space = enumerate_space(base.num_objects);
    std::vector<TrialRecord> out;
    out.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        TrialConfig config = base;
        config.seed = seed;
        out.push_back(run_trial(config, space, backend));
    }
    return out;
}

std::vector<TrialRecord> generate_standardized_data(AgentKind source, TrialConfig base,
                                                    const std::vector<std::uint64_t>& seeds,
                                                    ChatBackend* backend) {
    base.agent_kind = source;
    base.qa_enabled = false;
    return run_batch(base, seeds, backend);
}

std::string record_to_json_line(const TrialRecord& record) {
    int n = record.config.num_objects;
    ordered_json j;
    j["config"] = config_json(record.config);
    j["ground_truth"] = {{"mask", bits_json(record.ground_truth_mask, n)},
                         {"rule", rule_name(record.ground_truth_rule)}};
    j["initial"] = {{"placement", bits_json(record.initial_placement, n)},
                    {"light", record.initial_light}};
    ordered_json events = ordered_json::array();
    for (const Event& e : record.events) {
        ordered_json ev;
        ev["action"] = {{"kind", action_kind_name(e.action.kind)},
                        {"object", e.action.object},
                        {"to_floor", e.action.to_floor}};
        ev["command"] = e.command_text;
        ev["response"] = e.rendered_text;
        ev["light_after"] = e.light_after;
        ev["observation"] = e.observation;
        ev["invalid_object"] = e.invalid_object;
        ev["placement_after"] = bits_json(e.placement_after, n);
        events.push_back(ev);
    }
    j["events"] = events;
    ordered_json pairs = ordered_json::array();
    for (const Observation& o : record.observation_pairs)
        pairs.push_back({{"placement", bits_json(o.placement, n)}, {"light", o.light_on}});
    j["observation_pairs"] = pairs;
    j["per_step_support_size"] = record.per_step_support_size;
    ordered_json qa = ordered_json::array();
    for (const QaResult& q : record.qa) {
        ordered_json item;
        if (q.answer)
            item["answer"] = *q.answer;
        else
            item["answer"] = nullptr;
        item["correct"] = q.correct;
        qa.push_back(item);
    }
    j["qa"] = qa;
    j["all_correct"] = record.all_correct;
    j["agent_log"] = {{"raw_outputs", record.agent_log.raw_outputs},
                      {"reply_lengths", record.agent_log.reply_lengths},
                      {"reply_length_from_usage",
                       std::vector<int>(record.agent_log.reply_length_from_usage.begin(),
                                        record.agent_log.reply_length_from_usage.end())},
                      {"parse_fallbacks", record.agent_log.parse_fallbacks}};
    j["transcript"] = record.transcript;
    if (record.config.agent_kind == AgentKind::Sampling) {
        ordered_json sampling;
        std::vector<std::string> active, eliminated;
        for (const Hypothesis& h : record.sampling_active)
            active.push_back(render_hypothesis(h, n));
        for (const Hypothesis& h : record.sampling_eliminated)
            eliminated.push_back(render_hypothesis(h, n));
        sampling["active"] = active;
        sampling["eliminated"] = eliminated;
        j["sampling"] = sampling;
    } else {
        j["sampling"] = nullptr;
    }
    j["complete"] = record.complete;
    j["error"] = record.error;
    return j.dump();
}

TrialRecord record_from_json_line(const std::string& line) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded()) throw CorruptRecordError("record line is not valid JSON");
    TrialRecord rec;
    try {
        rec.config = config_from(j.at("config"));
        int n = rec.config.num_objects;
        rec.ground_truth_mask = bits_from_json(j.at("ground_truth").at("mask"));
        auto gt_rule = rule_from_name(j.at("ground_truth").at("rule").get<std::string>());
        if (!gt_rule) throw CorruptRecordError("bad ground truth rule");
        rec.ground_truth_rule = *gt_rule;
        rec.initial_placement = bits_from_json(j.at("initial").at("placement"));
        rec.initial_light = j.at("initial").at("light").get<bool>();
        for (const auto& ev : j.at("events")) {
            Event e;
            e.action.kind = action_kind_from_name(ev.at("action").at("kind").get<std::string>());
            e.action.object = ev.at("action").at("object").get<int>();
            e.action.to_floor = ev.at("action").at("to_floor").get<bool>();
            e.command_text = ev.at("command").get<std::string>();
            e.rendered_text = ev.at("response").get<std::string>();
            e.light_after = ev.at("light_after").get<bool>();
            e.observation = ev.at("observation").get<bool>();
            e.invalid_object = ev.at("invalid_object").get<bool>();
            e.placement_after = bits_from_json(ev.at("placement_after"));
            rec.events.push_back(e);
        }
        for (const auto& p : j.at("observation_pairs"))
            rec.observation_pairs.push_back(
                Observation{bits_from_json(p.at("placement")), p.at("light").get<bool>()});
        rec.per_step_support_size =
            j.at("per_step_support_size").get<std::vector<std::size_t>>();
        for (const auto& q : j.at("qa")) {
            QaResult qa;
            if (!q.at("answer").is_null()) qa.answer = q.at("answer").get<bool>();
            qa.correct = q.at("correct").get<bool>();
            rec.qa.push_back(qa);
        }
        rec.all_correct = j.at("all_correct").get<bool>();
        const ordered_json& log = j.at("agent_log");
        rec.agent_log.raw_outputs = log.at("raw_outputs").get<std::vector<std::string>>();
        rec.agent_log.reply_lengths = log.at("reply_lengths").get<std::vector<long>>();
        for (int v : log.at("reply_length_from_usage").get<std::vector<int>>())
            rec.agent_log.reply_length_from_usage.push_back(v != 0);
        rec.agent_log.parse_fallbacks = log.at("parse_fallbacks").get<int>();
        rec.transcript = j.at("transcript").get<std::string>();
        if (!j.at("sampling").is_null()) {
            for (const auto& s : j.at("sampling").at("active").get<std::vector<std::string>>())
                rec.sampling_active.push_back(parse_hypothesis(s, n));
            for (const auto& s :
                 j.at("sampling").at("eliminated").get<std::vector<std::string>>())
                rec.sampling_eliminated.push_back(parse_hypothesis(s, n));
        }
        rec.complete = j.at("complete").get<bool>();
        rec.error = j.at("error").get<std::string>();
    } catch (const ordered_json::exception& e) {
        throw CorruptRecordError(std::string("record field error: ") + e.what());
    } catch (const ConfigError& e) {
        throw CorruptRecordError(std::string("record config error: ") + e.what());
    }
    return rec;
}

std::string trial_config_to_json_string(const TrialConfig& config) {
    return config_json(config).dump(2);
}

TrialConfig trial_config_from_json_string(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config document is not valid JSON");
    if (!j.is_object()) throw ConfigError("config document must be a JSON object");
    return config_from(j);
}

void write_records(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot open records file " + path);
    for (const TrialRecord& rec : records) out << record_to_json_line(rec) << "\n";
}

std::vector<TrialRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open records file " + path);
    std::vector<TrialRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line));
    }
    return records;
}

}
