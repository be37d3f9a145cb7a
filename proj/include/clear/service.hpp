// Copyright 2026 The clear Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "clear/session.hpp"

namespace httplib {
class Server;
}

namespace clear {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  smt::SolverConfig solver;
  /// When set, sessions are written here after every query.
  std::filesystem::path session_dir;
  OracleOptions oracle;
};

/// JSON-over-HTTP front end. Programs and traces are uploaded once and
/// addressed by content hash; sessions serialize their own queries, and a
/// query runs as a job the client polls.
///
///   GET  /api/health
///   POST /api/programs                      body: program text
///   GET  /api/programs, /api/programs/:id
///   POST /api/programs/:id/traces           body: newline-delimited log
///   GET  /api/traces/:id?from=&to=
///   POST /api/sessions                      {"program", "trace"}
///   GET  /api/sessions/:id                  session document
///   POST /api/sessions/:id/queries[?sync=1] query document
///   GET  /api/jobs/:id
///   GET  /api/sessions/:id/ledger
///   POST /api/sessions/:id/facts/:fact/basis
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void install(httplib::Server& server);

  /// Block until every running job has finished.
  void drain();

  [[nodiscard]] const ServiceConfig& config() const noexcept { return config_; }

  struct Impl;

 private:
  ServiceConfig config_;
  std::unique_ptr<Impl> impl_;
};

/// Bind and serve until the process is stopped. Returns false when the
/// address cannot be bound.
bool serve(const ServiceConfig& config);

}  // namespace clear
