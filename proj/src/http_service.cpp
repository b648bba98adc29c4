#include "carebot/http_service.hpp"

#include <atomic>

#include <httplib.h>

#include "carebot/errors.hpp"
#include "carebot/world_sim.hpp"

namespace carebot {

using nlohmann::json;

namespace {

constexpr auto kStreamPoll = std::chrono::milliseconds(500);

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
  }
  return body;
}

std::string string_field(const json& body, const char* name, std::string fallback = {}) {
  if (!body.contains(name)) return fallback;
  if (!body.at(name).is_string()) throw Error(ErrorCode::InvalidArgument, std::string("'") + name + "' must be a string");
  return body.at(name).get<std::string>();
}

std::uint64_t parse_seq(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad sequence number '" + text + "'");
  }
}

std::string sse_frame(const ContextEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: context\ndata: " +
         to_json(e).dump(-1, ' ', false, json::error_handler_t::replace) + "\n\n";
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::ActorNotAllowed:
      return 403;
    case ErrorCode::SessionClosed:
      return 409;
    case ErrorCode::BackendFailure:
    case ErrorCode::BackendUnavailable:
    case ErrorCode::MalformedCompletion:
      return 502;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidConfig:
    case ErrorCode::IoFailure:
      return 400;
    default:
      return 500;
  }
}

struct HttpService::Impl {
  Gateway& gateway;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  explicit Impl(Gateway& g) : gateway(g) { routes(); }

  template <typename Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type, Last-Event-ID"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        SessionOptions options;
        const auto mode = string_field(body, "mode", "scripted_keeper");
        auto parsed = keeper_mode_from_string(mode);
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown mode '" + mode + "'");
        options.mode = *parsed;
        options.backend = string_field(body, "backend", "scripted");
        if (auto world = string_field(body, "world"); !world.empty()) options.world = load_world_config(world);
        const auto id = gateway.create_session(options);
        send_json(res, 201, {{"session_id", id.value}, {"mode", mode}, {"backend", options.backend}});
      });
    });

    server.Post("/sessions/:id/utterances", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto actor_name = string_field(body, "actor");
        const auto actor = actor_from_string(actor_name);
        if (!actor) throw Error(ErrorCode::InvalidArgument, "unknown actor '" + actor_name + "'");
        const auto events = gateway.post_utterance({req.path_params.at("id")}, *actor, string_field(body, "text"));
        json list = json::array();
        for (const auto& e : events) list.push_back(to_json(e));
        send_json(res, 200, {{"events", list}});
      });
    });

    server.Get("/sessions/:id/events", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SessionId id{req.path_params.at("id")};
        std::uint64_t from = 1;
        if (req.has_param("from")) from = parse_seq(req.get_param_value("from"));
        // A reconnecting EventSource resumes after the last id it saw.
        if (req.has_header("Last-Event-ID")) from = parse_seq(req.get_header_value("Last-Event-ID")) + 1;
        gateway.session_info(id);  // 404 before the stream starts

        auto next = std::make_shared<std::uint64_t>(from);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [this, id, next](std::size_t, httplib::DataSink& sink) {
          if (stopping) {
            sink.done();
            return true;
          }
          ContextStore::Batch batch;
          try {
            batch = gateway.stream_events(id, *next, kStreamPoll);
          } catch (const Error&) {
            sink.done();
            return true;
          }
          std::string chunk;
          for (const auto& e : batch.events) {
            chunk += sse_frame(e);
            *next = e.seq + 1;
          }
          if (chunk.empty() && !batch.closed) chunk = ": keep-alive\n\n";
          if (!sink.write(chunk.data(), chunk.size())) return false;
          if (batch.closed) {
            const std::string end = "event: end\ndata: {}\n\n";
            sink.write(end.data(), end.size());
            sink.done();
          }
          return true;
        });
      });
    });

    server.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, gateway.session_info({req.path_params.at("id")}).to_json()); });
    });

    server.Post("/sessions/:id/close", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SessionId id{req.path_params.at("id")};
        gateway.close_session(id);
        send_json(res, 200, {{"session_id", id.value}, {"status", "closed"}});
      });
    });

    server.Get("/catalog", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 200;
      res.set_content(gateway.catalog_document(), "application/json");
    });
  }
};

HttpService::HttpService(Gateway& gateway) : impl_(std::make_unique<Impl>(gateway)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::serve() { return impl_->server.listen_after_bind(); }

void HttpService::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

bool HttpService::running() const { return impl_->server.is_running(); }

}  // namespace carebot
