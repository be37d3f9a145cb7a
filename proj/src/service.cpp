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

#include "clear/service.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>

#include "clear/bench.hpp"
#include "clear/error.hpp"
#include "clear/subprocess.hpp"

namespace clear {

namespace {

int http_status(Errc c) {
  switch (c) {
    case Errc::UnknownId: return 404;
    case Errc::Busy: return 409;
    case Errc::SolverUnavailable: return 503;
    case Errc::SolverCrash:
    case Errc::IoError: return 500;
    default: return 400;
  }
}

Json error_body(const Error& e) { return {{"error", errc_name(e.code())}, {"message", e.what()}}; }

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

Json catalog_json(const VarCatalog& catalog) {
  Json vars = Json::array();
  for (const auto& d : catalog.decls()) {
    vars.push_back({{"name", d.name}, {"class", var_class_name(d.var_class)}, {"type", d.domain.to_string()}});
  }
  return vars;
}

Json facts_json(const Session& s) { return save_session(s)["facts"]; }

struct StoredTrace {
  std::string program_id;
  std::string text;
  std::shared_ptr<const Trace> trace;
};

struct SessionSlot {
  std::string program_id;
  std::string trace_id;
  std::mutex mu;  // guards session
  std::atomic<bool> busy{false};
  std::unique_ptr<Session> session;
};

struct Job {
  std::string session_id;
  std::string status = "running";
  Json result;
};

}  // namespace

struct Service::Impl {
  explicit Impl(const ServiceConfig& c) : config(c), solver(c.solver) {}

  const ServiceConfig& config;
  smt::Solver solver;

  std::mutex mu;  // guards the maps and counters below
  std::map<std::string, std::shared_ptr<const declang::Program>> programs;
  std::map<std::string, StoredTrace> traces;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions;
  std::map<std::string, Job> jobs;
  std::size_t next_session = 1;
  std::size_t next_job = 1;
  std::vector<std::thread> workers;

  std::shared_ptr<const declang::Program> program(const std::string& id) {
    std::lock_guard lock(mu);
    auto it = programs.find(id);
    if (it == programs.end()) throw Error(Errc::UnknownId, "no program " + id);
    return it->second;
  }

  StoredTrace trace(const std::string& id) {
    std::lock_guard lock(mu);
    auto it = traces.find(id);
    if (it == traces.end()) throw Error(Errc::UnknownId, "no trace " + id);
    return it->second;
  }

  std::shared_ptr<SessionSlot> session(const std::string& id) {
    std::lock_guard lock(mu);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(Errc::UnknownId, "no session " + id);
    return it->second;
  }

  std::string add_trace(const std::string& program_id, std::string text, Trace t) {
    const auto id = sha256_hex(program_id + "\n" + text).substr(0, 16);
    std::lock_guard lock(mu);
    traces.try_emplace(id, StoredTrace{program_id, std::move(text), std::make_shared<const Trace>(std::move(t))});
    return id;
  }

  // Session refs are the file names written next to the session document.
  void persist(const std::string& id, const SessionSlot& slot) {
    if (config.session_dir.empty()) return;
    const auto& dir = config.session_dir;
    const auto& s = *slot.session;
    std::filesystem::create_directories(dir);
    const auto prog = dir / s.program_ref();
    if (!std::filesystem::exists(prog)) write_text_file(prog, s.program().source);
    const auto tr = dir / s.trace_ref();
    if (!std::filesystem::exists(tr)) write_text_file(tr, trace(slot.trace_id).text);
    save_session_file(s, dir / (id + ".json"));
  }

  Json run_query(const std::string& sid, SessionSlot& slot, const Query& q) {
    PoseResult r;
    Json body;
    {
      std::lock_guard lock(slot.mu);
      r = slot.session->pose(q, solver, config.oracle);
      body = {{"query_id", slot.session->history().size() - 1},
              {"response", response_to_json(slot.session->program().catalog, r.response)}};
      Json added = Json::array();
      const auto all = facts_json(*slot.session);
      for (const auto& f : r.added) added.push_back(all[f.id]);
      body["facts_added"] = added;
      persist(sid, slot);
    }
    return body;
  }
};

Service::Service(ServiceConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {}

Service::~Service() { drain(); }

void Service::drain() {
  std::vector<std::thread> ws;
  {
    std::lock_guard lock(impl_->mu);
    ws.swap(impl_->workers);
  }
  for (auto& w : ws) w.join();
}

void Service::install(httplib::Server& server) {
  Impl& im = *impl_;

  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        reply(res, http_status(e.code()), error_body(e));
      } catch (const Json::exception& e) {
        reply(res, 400, {{"error", "InvalidQuery"}, {"message", e.what()}});
      }
    };
  };

  server.Get("/api/health", guarded([&im](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"solver", im.solver.available() ? im.solver.executable() : ""},
                     {"solver_available", im.solver.available()}});
  }));

  server.Post("/api/programs", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    auto program = std::make_shared<const declang::Program>(declang::parse_program(req.body));
    const auto id = sha256_hex(req.body).substr(0, 16);
    {
      std::lock_guard lock(im.mu);
      im.programs.try_emplace(id, program);
    }
    reply(res, 201, {{"id", id}, {"catalog", catalog_json(program->catalog)}});
  }));

  server.Get("/api/programs", guarded([&im](const httplib::Request&, httplib::Response& res) {
    Json ids = Json::array();
    std::lock_guard lock(im.mu);
    for (const auto& [id, _] : im.programs) ids.push_back(id);
    reply(res, 200, {{"programs", ids}});
  }));

  server.Get("/api/programs/:id", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto p = im.program(req.path_params.at("id"));
    reply(res, 200, {{"id", req.path_params.at("id")}, {"text", p->source}, {"catalog", catalog_json(p->catalog)}});
  }));

  server.Post("/api/programs/:id/traces", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto pid = req.path_params.at("id");
    const auto p = im.program(pid);
    auto t = parse_trace_log(req.body, p->catalog);
    const auto length = t.length();
    const auto id = im.add_trace(pid, req.body, std::move(t));
    reply(res, 201, {{"id", id}, {"program", pid}, {"length", length}});
  }));

  server.Get("/api/traces/:id", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto st = im.trace(req.path_params.at("id"));
    const auto p = im.program(st.program_id);
    const auto n = st.trace->length();
    auto param = [&](const char* key, std::size_t dflt) -> std::size_t {
      if (!req.has_param(key)) return dflt;
      try {
        return static_cast<std::size_t>(std::stoull(req.get_param_value(key)));
      } catch (const std::exception&) {
        throw Error(Errc::InvalidQuery, std::string("bad '") + key + "' parameter");
      }
    };
    const auto from = std::min(param("from", 0), n);
    const auto to = std::min(param("to", n), n);
    Json steps = Json::array();
    for (std::size_t t = from; t < to; ++t) steps.push_back({{"t", t}, {"vars", state_to_json(p->catalog, st.trace->steps()[t])}});
    reply(res, 200, {{"id", req.path_params.at("id")}, {"length", n}, {"steps", steps}});
  }));

  server.Post("/api/sessions", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto body = Json::parse(req.body);
    const auto pid = body.at("program").get<std::string>();
    const auto tid = body.at("trace").get<std::string>();
    const auto p = im.program(pid);
    const auto st = im.trace(tid);
    if (st.program_id != pid) throw Error(Errc::InvalidQuery, "trace " + tid + " belongs to another program");
    auto slot = std::make_shared<SessionSlot>();
    slot->program_id = pid;
    slot->trace_id = tid;
    slot->session = std::make_unique<Session>(pid + ".decl", *p, tid + ".jsonl", *st.trace);
    std::string id;
    {
      std::lock_guard lock(im.mu);
      id = "s" + std::to_string(im.next_session++);
      im.sessions.emplace(id, slot);
    }
    {
      std::lock_guard lock(slot->mu);
      im.persist(id, *slot);
    }
    reply(res, 201, {{"id", id}});
  }));

  server.Get("/api/sessions/:id", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    auto slot = im.session(req.path_params.at("id"));
    std::lock_guard lock(slot->mu);
    reply(res, 200, save_session(*slot->session));
  }));

  server.Get("/api/sessions/:id/ledger", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    auto slot = im.session(req.path_params.at("id"));
    std::lock_guard lock(slot->mu);
    reply(res, 200, {{"facts", facts_json(*slot->session)}});
  }));

  server.Post("/api/sessions/:id/queries", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto sid = req.path_params.at("id");
    auto slot = im.session(sid);
    Json doc;
    try {
      doc = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      throw Error(Errc::InvalidQuery, e.what());
    }
    if (!im.solver.available()) throw Error(Errc::SolverUnavailable, "no solver at '" + im.config.solver.path + "'");
    bool expected = false;
    if (!slot->busy.compare_exchange_strong(expected, true)) throw Error(Errc::Busy, "session " + sid + " has a query in flight");
    Query q;
    try {
      std::lock_guard lock(slot->mu);
      q = slot->session->parse_query(doc);
    } catch (...) {
      slot->busy = false;
      throw;
    }

    if (req.has_param("sync") && req.get_param_value("sync") != "0") {
      try {
        auto body = im.run_query(sid, *slot, q);
        slot->busy = false;
        reply(res, 200, body);
      } catch (...) {
        slot->busy = false;
        throw;
      }
      return;
    }

    std::lock_guard lock(im.mu);
    const auto jid = "j" + std::to_string(im.next_job++);
    im.jobs[jid] = Job{sid, "running", nullptr};
    im.workers.emplace_back([&im, sid, jid, slot, q] {
      Job done{sid, "done", nullptr};
      try {
        done.result = im.run_query(sid, *slot, q);
      } catch (const Error& e) {
        done.status = "failed";
        done.result = error_body(e);
      } catch (const std::exception& e) {
        done.status = "failed";
        done.result = {{"error", "Internal"}, {"message", e.what()}};
      }
      {
        std::lock_guard lk(im.mu);
        im.jobs[jid] = std::move(done);
      }
      slot->busy = false;
    });
    reply(res, 202, {{"job", jid}, {"status", "running"}});
  }));

  server.Get("/api/jobs/:id", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    const auto jid = req.path_params.at("id");
    std::lock_guard lock(im.mu);
    auto it = im.jobs.find(jid);
    if (it == im.jobs.end()) throw Error(Errc::UnknownId, "no job " + jid);
    Json body{{"job", jid}, {"session", it->second.session_id}, {"status", it->second.status}};
    if (it->second.status == "done") body["result"] = it->second.result;
    if (it->second.status == "failed") body["error"] = it->second.result;
    reply(res, 200, body);
  }));

  server.Post("/api/sessions/:id/facts/:fact/basis", guarded([&im](const httplib::Request& req, httplib::Response& res) {
    auto slot = im.session(req.path_params.at("id"));
    std::size_t fid = 0;
    try {
      fid = static_cast<std::size_t>(std::stoull(req.path_params.at("fact")));
    } catch (const std::exception&) {
      throw Error(Errc::UnknownId, "no fact " + req.path_params.at("fact"));
    }
    DerivedBasis basis;
    {
      std::lock_guard lock(slot->mu);
      basis = slot->session->derive_basis(fid, declang::StepBudget(declang::kDefaultMaxSteps));
    }
    const auto& pid = slot->program_id;
    const auto p = im.program(pid);
    auto text = serialize_trace_log(basis.trace, p->catalog);
    const auto tid = im.add_trace(pid, text, basis.trace);
    reply(res, 200, {{"program", pid},
                     {"trace", tid},
                     {"keyframe", 0},
                     {"constraints", relaxation_to_json(p->catalog, basis.scenario)}});
  }));
}

bool serve(const ServiceConfig& config) {
  httplib::Server server;
  Service service(config);
  service.install(server);
  if (!server.bind_to_port(config.host, config.port)) return false;
  return server.listen_after_bind();
}

}  // namespace clear
