#pragma once

// HTTP front end. REST for synchronous reads; projection jobs run on a bounded
// worker pool and report through a per-session push stream at /ws, delivered
// as server-sent events (one JSON message per "data:" frame).
//
// Push message kinds:
//   {"kind":"progress","job_id":J,"iteration":I,"kl":K}
//   {"kind":"result","job_id":J,"result":{...projection...}}
//   {"kind":"superseded","job_id":J}
//   {"kind":"failure","job_id":J,"message":M}

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "caltrend/api.hpp"
#include "caltrend/dataset.hpp"
#include "caltrend/error.hpp"
#include "caltrend/projection.hpp"

namespace caltrend {

struct SessionState {
  std::string session_id;
  WeightVector weights = WeightVector::ones();
  std::set<UserId> selection;
  std::string dataset_id;
};

struct ServerOptions {
  int workers = 2;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidParams:
    case ErrorCode::kDegenerateWeights:
    case ErrorCode::kValidation:
    case ErrorCode::kPopulationTooSmall: return 422;
    default: return 500;
  }
}

class Server {
 public:
  enum class JobState { kQueued, kRunning, kDone, kSuperseded, kFailed };

  explicit Server(std::shared_ptr<const Dataset> data, ServerOptions opts = {})
      : data_(std::move(data)), opts_(opts) {
    // httplib's default also sets SO_REUSEPORT, which lets a second server
    // share a busy port silently.
    http_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    install_routes();
    for (int i = 0; i < std::max(1, opts_.workers); ++i) workers_.emplace_back([this] { worker_loop(); });
  }

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Throws kIo when the port cannot be bound.
  void bind(const std::string& host, int port) {
    if (!http_.bind_to_port(host, port)) throw Error(ErrorCode::kIo, "port " + std::to_string(port) + " busy");
  }
  int bind_any_port(const std::string& host = "127.0.0.1") {
    const int port = http_.bind_to_any_port(host);
    if (port < 0) throw Error(ErrorCode::kIo, "no free port");
    return port;
  }
  // Blocks until stop().
  void listen() { http_.listen_after_bind(); }

  void stop() {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
      stopping_ = true;
      for (auto& [id, job] : jobs_) job->cancel = true;
    }
    queue_cv_.notify_all();
    messages_cv_.notify_all();
    http_.stop();
    for (auto& t : workers_) {
      if (t.joinable()) t.join();
    }
  }

  bool is_running() const { return http_.is_running(); }
  void wait_until_ready() const { http_.wait_until_ready(); }

  std::optional<SessionState> session(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second.state;
  }

 private:
  struct Job {
    std::string id;
    std::string session_id;
    WeightVector weights;
    TsneParams params;
    std::atomic<bool> cancel{false};
    JobState state = JobState::kQueued;
    nlohmann::json result;
    std::string message;
  };

  struct Session {
    SessionState state;
    std::shared_ptr<Job> active;
    std::vector<std::string> messages;
  };

  static void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, const Error& e) {
    send_json(res, {{"error", e.what()}}, http_status(e.code()));
  }

  template <typename Fn>
  static httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_json(res, {{"error", e.what()}}, 500);
      }
    };
  }

  static std::string param(const httplib::Request& req, const char* key) {
    return req.has_param(key) ? req.get_param_value(key) : std::string();
  }

  static std::string session_of(const httplib::Request& req) {
    if (req.has_header("X-Session-Id")) return req.get_header_value("X-Session-Id");
    return param(req, "session");
  }

  std::set<UserId> selection_of(const httplib::Request& req) {
    auto ids = api::parse_user_set(param(req, "users"));
    (void)data_->select(ids);  // rejects unknown users
    const std::string sid = session_of(req);
    if (!sid.empty() && req.has_param("users")) {
      std::lock_guard lock(mu_);
      if (auto it = sessions_.find(sid); it != sessions_.end()) it->second.state.selection = ids;
    }
    return ids;
  }

  static std::optional<HeatmapMode> mode_param(const httplib::Request& req, const char* key, bool required) {
    const std::string v = param(req, key);
    if (v.empty()) {
      if (required) return HeatmapMode::kAll;
      return std::nullopt;
    }
    auto m = parse_heatmap_mode(v);
    if (!m) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be all|work|home");
    return m;
  }

  static std::optional<CivilDate> date_param(const httplib::Request& req, const char* key) {
    const std::string v = param(req, key);
    if (v.empty()) return std::nullopt;
    auto d = parse_date(v);
    if (!d) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " must be YYYY-MM-DD");
    return d;
  }

  void install_routes() {
    const Dataset& d = *data_;
    http_.Get("/api/users", guarded([&d](const httplib::Request&, httplib::Response& res) {
                send_json(res, api::users(d));
              }));
    http_.Get(R"(/api/users/(\d+))", guarded([&d](const httplib::Request& req, httplib::Response& res) {
                send_json(res, api::user(d, api::parse_user_id(req.matches[1].str())));
              }));
    http_.Get(R"(/api/users/(\d+)/features)", guarded([&d](const httplib::Request& req, httplib::Response& res) {
                send_json(res, api::user_features(d, api::parse_user_id(req.matches[1].str())));
              }));
    http_.Get(R"(/api/users/(\d+)/glyph)", guarded([&d](const httplib::Request& req, httplib::Response& res) {
                send_json(res, api::user_glyph(d, api::parse_user_id(req.matches[1].str())));
              }));
    http_.Get(R"(/api/users/(\d+)/daygrid)", guarded([&d](const httplib::Request& req, httplib::Response& res) {
                std::optional<LifeMode> highlight;
                const std::string h = param(req, "highlight");
                if (h == "work") {
                  highlight = LifeMode::kWork;
                } else if (h == "home") {
                  highlight = LifeMode::kHome;
                } else if (!h.empty()) {
                  throw Error(ErrorCode::kInvalidArgument, "highlight must be work|home");
                }
                send_json(res, api::user_daygrid(d, api::parse_user_id(req.matches[1].str()), date_param(req, "from"),
                                                 date_param(req, "to"), highlight));
              }));
    http_.Get("/api/heatmap/weekly", guarded([this, &d](const httplib::Request& req, httplib::Response& res) {
                const auto ids = selection_of(req);
                send_json(res, api::weekly_heatmap(d, ids, *mode_param(req, "mode", true), mode_param(req, "diff", false)));
              }));
    http_.Get("/api/topics", guarded([this, &d](const httplib::Request& req, httplib::Response& res) {
                const auto ids = selection_of(req);
                const std::string diff = param(req, "diff");
                if (!diff.empty() && diff != "true" && diff != "false" && diff != "1" && diff != "0") {
                  throw Error(ErrorCode::kInvalidArgument, "diff must be true|false");
                }
                send_json(res, api::topics(d, ids, diff == "true" || diff == "1"));
              }));
    http_.Get("/api/keyword-distribution", guarded([this, &d](const httplib::Request& req, httplib::Response& res) {
                const auto ids = selection_of(req);
                const std::string kw = param(req, "keyword");
                if (kw.empty()) throw Error(ErrorCode::kInvalidArgument, "keyword required");
                send_json(res, api::keyword_distribution(d, ids, kw));
              }));
    http_.Get("/api/scatter", guarded([&d](const httplib::Request& req, httplib::Response& res) {
                send_json(res, api::scatter(d, api::parse_feature_axis(param(req, "x")),
                                            api::parse_feature_axis(param(req, "y"))));
              }));
    http_.Post("/api/projection", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 submit_projection(req, res);
               }));
    http_.Get(R"(/api/projection/([A-Za-z0-9\-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, job_status(req.matches[1].str()));
              }));
    http_.Get("/ws", [this](const httplib::Request& req, httplib::Response& res) { push_stream(req, res); });
  }

  // ------------------------------------------------------------- jobs --

  std::string ensure_session(const std::string& requested) {
    std::lock_guard lock(mu_);
    std::string id = requested.empty() ? "s" + std::to_string(++session_counter_) : requested;
    auto& s = sessions_[id];
    if (s.state.session_id.empty()) {
      s.state.session_id = id;
      s.state.dataset_id = data_->id();
    }
    return id;
  }

  void push(const std::string& session_id, const nlohmann::json& msg) {
    {
      std::lock_guard lock(mu_);
      sessions_[session_id].messages.push_back(msg.dump());
    }
    messages_cv_.notify_all();
  }

  void submit_projection(const httplib::Request& req, httplib::Response& res) {
    const std::string sid = ensure_session(session_of(req));
    WeightVector weights{};
    TsneParams params;
    try {
      auto body = nlohmann::json::parse(req.body);
      if (!body.is_object() || !body.contains("weights") || !body["weights"].is_array() ||
          body["weights"].size() != kFeatureCount) {
        throw Error(ErrorCode::kInvalidArgument, "weights must be an array of 11 numbers");
      }
      for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (!body["weights"][i].is_number()) throw Error(ErrorCode::kInvalidArgument, "weights must be numbers");
        weights.values[i] = body["weights"][i].get<double>();
      }
      weights.validate();
      if (body.contains("params")) params = tsne_params_from_json(body["params"]);
      (void)params.validate(data_->user_ids().size());
    } catch (const nlohmann::json::exception& e) {
      fail_immediately(sid, res, Error(ErrorCode::kInvalidArgument, std::string("malformed body: ") + e.what()));
      return;
    } catch (const Error& e) {
      fail_immediately(sid, res, e);
      return;
    }

    auto job = std::make_shared<Job>();
    job->session_id = sid;
    job->weights = weights;
    job->params = params;
    {
      std::lock_guard lock(mu_);
      job->id = "j" + std::to_string(++job_counter_);
      auto& s = sessions_[sid];
      if (s.active) s.active->cancel = true;  // superseded by this job
      s.active = job;
      s.state.weights = weights;
      jobs_[job->id] = job;
      queue_.push_back(job);
    }
    queue_cv_.notify_one();
    send_json(res, {{"job_id", job->id}, {"session_id", sid}}, 202);
  }

  void fail_immediately(const std::string& sid, httplib::Response& res, const Error& e) {
    nlohmann::json msg = {{"kind", "failure"}, {"job_id", nullptr}, {"message", e.what()}};
    push(sid, msg);
    msg["session_id"] = sid;
    send_json(res, msg, http_status(e.code()));
  }

  static std::string_view state_name(JobState s) {
    switch (s) {
      case JobState::kQueued: return "queued";
      case JobState::kRunning: return "running";
      case JobState::kDone: return "done";
      case JobState::kSuperseded: return "superseded";
      case JobState::kFailed: return "failed";
    }
    return "unknown";
  }

  nlohmann::json job_status(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "job " + id);
    const Job& j = *it->second;
    nlohmann::json out = {{"job_id", j.id}, {"session_id", j.session_id}, {"state", std::string(state_name(j.state))}};
    if (j.state == JobState::kDone) out["result"] = j.result;
    if (j.state == JobState::kFailed) out["message"] = j.message;
    return out;
  }

  void finish(const std::shared_ptr<Job>& job, JobState state, nlohmann::json msg) {
    {
      std::lock_guard lock(mu_);
      job->state = state;
      if (state == JobState::kDone) job->result = msg["result"];
      if (state == JobState::kFailed) job->message = msg["message"].get<std::string>();
      auto& s = sessions_[job->session_id];
      if (s.active == job) s.active.reset();
    }
    push(job->session_id, msg);
  }

  void worker_loop() {
    for (;;) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(mu_);
        queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
        job = queue_.front();
        queue_.pop_front();
        if (!job->cancel) job->state = JobState::kRunning;
      }
      if (job->cancel) {
        finish(job, JobState::kSuperseded, {{"kind", "superseded"}, {"job_id", job->id}});
        continue;
      }
      TsneObserver observer;
      observer.cancelled = [&job] { return job->cancel.load(); };
      observer.on_checkpoint = [this, &job](const KlCheckpoint& cp) {
        push(job->session_id, {{"kind", "progress"}, {"job_id", job->id}, {"iteration", cp.iteration}, {"kl", cp.kl}});
      };
      try {
        auto result = api::run_projection(*data_, job->weights, job->params, observer);
        finish(job, JobState::kDone,
               {{"kind", "result"}, {"job_id", job->id}, {"result", api::projection(*data_, result)}});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kCancelled) {
          finish(job, JobState::kSuperseded, {{"kind", "superseded"}, {"job_id", job->id}});
        } else {
          finish(job, JobState::kFailed, {{"kind", "failure"}, {"job_id", job->id}, {"message", e.what()}});
        }
      } catch (const std::exception& e) {
        finish(job, JobState::kFailed, {{"kind", "failure"}, {"job_id", job->id}, {"message", e.what()}});
      }
    }
  }

  // Streams the session's messages from index `since` (default 0). With
  // once=1 the stream closes after the first result or failure message.
  void push_stream(const httplib::Request& req, httplib::Response& res) {
    const std::string sid = session_of(req);
    if (sid.empty()) {
      send_json(res, {{"error", "session required"}}, 422);
      return;
    }
    ensure_session(sid);
    std::size_t since = 0;
    if (req.has_param("since")) {
      const std::string v = req.get_param_value("since");
      if (v.empty() || v.size() > 9 || v.find_first_not_of("0123456789") != std::string::npos) {
        send_json(res, {{"error", "since must be a message index"}}, 422);
        return;
      }
      since = std::stoul(v);
    }
    const bool once = param(req, "once") == "1";
    auto cursor = std::make_shared<std::size_t>(since);
    auto closed = std::make_shared<bool>(false);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, sid, cursor, closed, once](std::size_t, httplib::DataSink& sink) {
          std::vector<std::string> batch;
          {
            std::unique_lock lock(mu_);
            messages_cv_.wait_for(lock, std::chrono::milliseconds(200), [&] {
              return stopping_ || sessions_[sid].messages.size() > *cursor;
            });
            if (stopping_) {
              sink.done();
              return true;
            }
            const auto& log = sessions_[sid].messages;
            for (; *cursor < log.size(); ++*cursor) batch.push_back(log[*cursor]);
          }
          for (const auto& m : batch) {
            const std::string frame = "data: " + m + "\n\n";
            if (!sink.write(frame.data(), frame.size())) return false;
            if (once) {
              auto j = nlohmann::json::parse(m);
              const auto kind = j["kind"].get<std::string>();
              if (kind == "result" || kind == "failure") {
                *closed = true;
                break;
              }
            }
          }
          if (*closed) sink.done();
          return true;
        });
  }

  std::shared_ptr<const Dataset> data_;
  ServerOptions opts_;
  httplib::Server http_;

  mutable std::mutex mu_;
  std::condition_variable queue_cv_;
  std::condition_variable messages_cv_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::map<std::string, Session> sessions_;
  std::uint64_t job_counter_ = 0;
  std::uint64_t session_counter_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

// Binds and serves until the process is stopped. Throws kIo if the port is busy.
inline void serve(std::shared_ptr<const Dataset> data, int port, const std::string& host = "0.0.0.0") {
  Server server(std::move(data));
  server.bind(host, port);
  server.listen();
}

}  // namespace caltrend
