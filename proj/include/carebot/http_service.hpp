#pragma once

#include <memory>
#include <string>

#include "carebot/errors.hpp"
#include "carebot/gateway.hpp"

namespace carebot {

/// JSON-over-HTTP front end for a Gateway, with a server-sent-events stream
/// per session.
///
///   POST /sessions                     {mode?, backend?, world?} -> {session_id}
///   POST /sessions/{id}/utterances     {actor, text} -> {events}
///   GET  /sessions/{id}/events?from=N  text/event-stream
///   GET  /sessions/{id}                status, robot, task
///   POST /sessions/{id}/close
///   GET  /catalog
class HttpService {
 public:
  explicit HttpService(Gateway& gateway);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and returns the port; port 0 picks a free one. Returns -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false if the server could not run.
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

}  // namespace carebot
