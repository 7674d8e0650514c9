// Copyright 2026 The maevo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maevo/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace maevo {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxReportMessage = 1024;

bool trimmable(unsigned char c) { return std::isspace(c) || std::ispunct(c); }

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::string role_vocabulary() {
  std::string out;
  for (AgentRole role : kAgentRoles) {
    out += to_string(role);
    out += ", ";
  }
  return out + "Idle";
}

json gain_field(double db) {
  if (std::isfinite(db)) return db;
  return "-inf";
}

}  // namespace

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigurationError("llm.base_url must not be empty");
  if (timeout.count() <= 0) throw ConfigurationError("llm.timeout_s must be positive");
  if (max_retries < 0) throw ConfigurationError("llm.max_retries must be non-negative");
}

EndpointConfig EndpointConfig::from_settings(const LlmSettings& settings) {
  const char* key = std::getenv(settings.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigurationError("LLM routing requested but environment variable " + settings.api_key_env +
                             " is not set");
  }
  EndpointConfig cfg;
  cfg.base_url = settings.base_url;
  cfg.api_key = key;
  cfg.model_name = settings.model_name;
  cfg.timeout = std::chrono::milliseconds(static_cast<long long>(settings.timeout_s * 1000.0));
  cfg.max_retries = settings.max_retries;
  cfg.validate();
  return cfg;
}

RoutingPrompt build_routing_prompt(const Blackboard& bb, const AgentReport& report) {
  RoutingPrompt prompt;
  prompt.system =
      "You are the supervisor agent of a self-evolving movable-antenna beamforming pipeline. "
      "You coordinate six role agents: " +
      role_vocabulary().substr(0, role_vocabulary().rfind(", Idle")) +
      ". Given the structured state below, decide which agent runs next, or Idle when the cycle for this "
      "step is complete. Answer with exactly one word from: " +
      role_vocabulary() + ".";

  std::string message = report.message.substr(0, kMaxReportMessage);
  json state = {{"step", bb.step_index},
                {"stage", std::string(to_string(bb.stage))},
                {"last_report",
                 {{"role", std::string(to_string(report.role))},
                  {"status", report.ok ? "ok" : "fail"},
                  {"reason", report.reason.substr(0, kMaxReportMessage)},
                  {"message", message}}},
                {"trigger", bb.trigger.trigger ? std::string(to_string(*bb.trigger.reason)) : "none"},
                {"retries", bb.retries}};
  if (bb.monitoring) {
    state["gains_db"] = {{"deployed", gain_field(bb.monitoring->deployed_gain_db)},
                         {"fixed_baseline", gain_field(bb.monitoring->baseline_gain_db)}};
  }
  if (bb.open_event) {
    state["evolution"] = {{"reason", std::string(to_string(bb.open_event->reason))},
                          {"training_rounds", bb.open_event->training_rounds}};
  }
  if (bb.evaluation_verdict) {
    state["evaluation"] = bb.evaluation_verdict->pass ? "pass" : "fail: " + bb.evaluation_verdict->reason;
  }
  prompt.user = "State:\n" + state.dump(2) + "\nWhich agent should run next? Reply with one of: " + role_vocabulary();
  if (prompt.size() > kMaxPromptBytes) prompt.user.resize(kMaxPromptBytes - prompt.system.size());
  return prompt;
}

std::string chat_request_body(const ChatRequest& request) {
  const json body = {{"model", request.model},
                     {"temperature", request.temperature},
                     {"messages",
                      json::array({{{"role", "system"}, {"content", request.system}},
                                   {{"role", "user"}, {"content", request.user}}})}};
  return body.dump();
}

std::string parse_chat_response(std::string_view body) {
  try {
    const json doc = json::parse(body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completions response: ") + e.what(), false);
  }
}

std::pair<std::string, std::string> chat_completions_target(std::string_view base_url) {
  const auto scheme_end = base_url.find("://");
  const auto host_start = scheme_end == std::string_view::npos ? 0 : scheme_end + 3;
  const auto path_start = base_url.find('/', host_start);
  std::string origin(base_url.substr(0, path_start));
  std::string prefix = path_start == std::string_view::npos ? "" : std::string(base_url.substr(path_start));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  const bool versioned = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
  return {origin, prefix + (versioned ? "/chat/completions" : "/v1/chat/completions")};
}

std::string HttpChatTransport::complete(const ChatRequest& request, const EndpointConfig& endpoint) {
  const auto [origin, path] = chat_completions_target(endpoint.base_url);
  httplib::Client client(origin);
  if (!client.is_valid()) throw TransportError("unsupported endpoint URL scheme", false);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  const httplib::Headers headers{{"Authorization", "Bearer " + endpoint.api_key}};

  auto result = client.Post(path, headers, chat_request_body(request), "application/json");
  if (!result) throw TransportError("request failed: " + httplib::to_string(result.error()), true);
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw TransportError("endpoint returned HTTP " + std::to_string(status), true);
  }
  if (status != 200) throw TransportError("endpoint returned HTTP " + std::to_string(status), false);
  return parse_chat_response(result->body);
}

std::optional<Stage> parse_role_response(std::string_view response) {
  while (!response.empty() && trimmable(static_cast<unsigned char>(response.front()))) response.remove_prefix(1);
  while (!response.empty() && trimmable(static_cast<unsigned char>(response.back()))) response.remove_suffix(1);
  for (Stage s : {Stage::Idle, Stage::DataCollection, Stage::ModelSelection, Stage::Training, Stage::Evaluation,
                  Stage::Deployment, Stage::Monitoring}) {
    if (iequals(response, to_string(s))) return s;
  }
  return std::nullopt;
}

std::string_view to_string(DecisionSource source) {
  return source == DecisionSource::Llm ? "llm" : "fallback";
}

RoutingDecision decide_next_agent(const RoutingPrompt& prompt, const EndpointConfig& endpoint,
                                  ChatTransport& transport, Stage deterministic_next) {
  RoutingDecision decision{deterministic_next, DecisionSource::Fallback, {}, {}, 0};
  const ChatRequest request{endpoint.model_name, prompt.system, prompt.user, 0.0};

  std::optional<std::string> content;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    ++decision.attempts;
    try {
      content = transport.complete(request, endpoint);
      break;
    } catch (const TransportError& e) {
      decision.note = e.what();
      if (!e.retryable()) break;
    } catch (const std::exception& e) {
      decision.note = e.what();
      break;
    }
  }
  if (!content) {
    if (decision.note.empty()) decision.note = "no response";
    return decision;
  }

  decision.raw_response = *content;
  const auto parsed = parse_role_response(*content);
  if (!parsed) {
    decision.note = "unparseable response";
    return decision;
  }
  if (*parsed != deterministic_next) {
    decision.note = "illegal transition to " + std::string(to_string(*parsed));
    return decision;
  }
  decision.source = DecisionSource::Llm;
  decision.note.clear();
  return decision;
}

Stage LlmRouter::route(Blackboard& bb, const AgentReport& report, const SupervisorPolicy& policy) {
  const RoutePlan plan = plan_route(bb, report, policy);
  RoutingDecision decision = decide_next_agent(build_routing_prompt(bb, report), endpoint_, transport_, plan.next);
  apply_route(bb, report, plan);
  decisions_.push_back(std::move(decision));
  return plan.next;
}

std::size_t LlmRouter::llm_count() const {
  return static_cast<std::size_t>(std::count_if(decisions_.begin(), decisions_.end(),
                                                [](const auto& d) { return d.source == DecisionSource::Llm; }));
}

std::size_t LlmRouter::fallback_count() const { return decisions_.size() - llm_count(); }

}  // namespace maevo
