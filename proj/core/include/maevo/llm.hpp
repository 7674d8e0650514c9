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

#pragma once

// Optional delegation of supervisor routing to an OpenAI-compatible
// chat-completions endpoint.
//
// The model only ever chooses the next stage. Its answer is accepted when it
// names exactly one stage and that stage is the one the routing relation
// allows from the current blackboard state; anything else (timeouts, HTTP
// errors, chatter, illegal moves) falls back to supervisor_next. Episodes are
// therefore identical with or without the endpoint.

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maevo/lifecycle.hpp"
#include "maevo/scenario.hpp"

namespace maevo {

inline constexpr std::size_t kMaxPromptBytes = 8 * 1024;

struct EndpointConfig {
  std::string base_url;
  /// Bearer token. Never logged or serialized.
  std::string api_key;
  std::string model_name = "gpt-4o";
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 2;

  void validate() const;

  /// Reads the key from settings.api_key_env; throws ConfigurationError when unset or empty.
  static EndpointConfig from_settings(const LlmSettings& settings);
};

struct RoutingPrompt {
  std::string system;
  std::string user;

  std::size_t size() const noexcept { return system.size() + user.size(); }
};

/// Blackboard summary plus the role vocabulary, at most kMaxPromptBytes.
RoutingPrompt build_routing_prompt(const Blackboard& blackboard, const AgentReport& last_report);

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
};

/// Transport failure; `retryable` for connection errors, timeouts, 429 and 5xx.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, bool retryable) : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  /// Returns the assistant message content. Throws TransportError.
  virtual std::string complete(const ChatRequest& request, const EndpointConfig& endpoint) = 0;
};

/// POSTs to <base_url>/v1/chat/completions (or <base_url>/chat/completions when
/// base_url already ends in /v1).
class HttpChatTransport final : public ChatTransport {
 public:
  std::string complete(const ChatRequest& request, const EndpointConfig& endpoint) override;
};

std::string chat_request_body(const ChatRequest& request);
/// choices[0].message.content of a chat-completions response.
std::string parse_chat_response(std::string_view body);
/// Splits "https://host:port/prefix" into ("https://host:port", "/prefix/.../chat/completions").
std::pair<std::string, std::string> chat_completions_target(std::string_view base_url);

/// Trims whitespace and punctuation, then matches one stage name case-insensitively.
std::optional<Stage> parse_role_response(std::string_view response);

enum class DecisionSource { Llm, Fallback };
std::string_view to_string(DecisionSource source);

struct RoutingDecision {
  Stage stage = Stage::Idle;
  DecisionSource source = DecisionSource::Fallback;
  std::string raw_response;
  /// Why the fallback engaged; empty for accepted answers.
  std::string note;
  int attempts = 0;
};

/// Never throws for transport or parse problems; every failure yields
/// `deterministic_next` with source Fallback.
RoutingDecision decide_next_agent(const RoutingPrompt& prompt, const EndpointConfig& endpoint,
                                  ChatTransport& transport, Stage deterministic_next);

class LlmRouter final : public Router {
 public:
  LlmRouter(EndpointConfig endpoint, ChatTransport& transport)
      : endpoint_(std::move(endpoint)), transport_(transport) {}

  Stage route(Blackboard& blackboard, const AgentReport& report, const SupervisorPolicy& policy) override;

  const std::vector<RoutingDecision>& decisions() const noexcept { return decisions_; }
  std::size_t llm_count() const;
  std::size_t fallback_count() const;

 private:
  EndpointConfig endpoint_;
  ChatTransport& transport_;
  std::vector<RoutingDecision> decisions_;
};

}  // namespace maevo
