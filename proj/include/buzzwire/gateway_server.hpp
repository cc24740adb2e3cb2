// Copyright 2026 The Buzzwire Authors
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

// WebSocket transport for LiveSession. One port serves /ws (WebSocket) and
// /healthz (HTTP). Threads: one runs the io_context (all sockets), one runs
// the 100 Hz simulation. They meet only at two mutex-guarded mailboxes:
// inbound messages (poses collapse to the latest) and per-client outbound
// queues where state frames overwrite each other instead of piling up.

#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>

#include "buzzwire/gateway.hpp"

namespace buzzwire {

struct ServerOptions {
  std::string host = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  std::size_t max_queued_replies = 256;
};

namespace detail {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class GatewayCore;

/// Outbound mailbox of one client. Written by the sim thread, drained on
/// the io thread.
struct Outbox {
  std::mutex mu;
  std::deque<std::string> replies;
  std::optional<std::string> frame;  // latest state frame only
  std::size_t dropped_frames = 0;
  std::size_t dropped_replies = 0;
};

class WsClient : public std::enable_shared_from_this<WsClient> {
 public:
  WsClient(tcp::socket&& socket, GatewayCore& core, ClientId id)
      : ws_(std::move(socket)), core_(core), id_(id) {}

  void start(http::request<http::string_body> req);
  void notify();  // called from any thread when the outbox has data
  ClientId id() const { return id_; }
  Outbox& outbox() { return outbox_; }

 private:
  void do_read();
  void pump();

  websocket::stream<beast::tcp_stream> ws_;
  GatewayCore& core_;
  ClientId id_;
  beast::flat_buffer buffer_;
  Outbox outbox_;
  std::string writing_;
  bool write_in_flight_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, GatewayCore& core) : stream_(std::move(socket)), core_(core) {}
  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }
  void on_read(beast::error_code ec);

  beast::tcp_stream stream_;
  GatewayCore& core_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<http::response<http::string_body>> res_;
};

/// Shared state between the io thread and the sim thread.
class GatewayCore {
 public:
  explicit GatewayCore(std::size_t max_replies) : max_replies_(max_replies) {}

  net::io_context ioc{1};

  ClientId add_client(const std::shared_ptr<WsClient>& c) {
    std::lock_guard lock(mu_);
    clients_[c->id()] = c;
    return c->id();
  }
  ClientId next_id() { return ++next_id_; }

  // io thread -> sim thread
  void inbound(ClientId from, std::string text) {
    // Pose input is latest-wins: a newer pose replaces an unprocessed one.
    const auto j = nlohmann::json::parse(text, nullptr, false);
    const bool is_input = j.is_object() && j.contains("type") && j["type"] == "input";
    std::lock_guard lock(mu_);
    if (is_input) {
      for (auto& m : inbox_) {
        if (m.is_input && m.from == from) {
          m.text = std::move(text);
          return;
        }
      }
    }
    inbox_.push_back({from, std::move(text), is_input, false});
  }
  void disconnected(ClientId who) {
    std::lock_guard lock(mu_);
    clients_.erase(who);
    inbox_.push_back({who, {}, false, true});
  }

  struct Inbound {
    ClientId from;
    std::string text;
    bool is_input;
    bool disconnect;
  };
  std::deque<Inbound> take_inbox() {
    std::lock_guard lock(mu_);
    std::deque<Inbound> out;
    out.swap(inbox_);
    return out;
  }

  // sim thread -> io thread
  void send(ClientId to, const std::string& text, bool droppable) {
    std::shared_ptr<WsClient> c;
    {
      std::lock_guard lock(mu_);
      auto it = clients_.find(to);
      if (it == clients_.end()) return;
      c = it->second.lock();
    }
    if (!c) return;
    {
      auto& box = c->outbox();
      std::lock_guard lock(box.mu);
      if (droppable) {
        if (box.frame) ++box.dropped_frames;
        box.frame = text;
      } else {
        if (box.replies.size() >= max_replies_) {
          box.replies.pop_front();
          ++box.dropped_replies;
        }
        box.replies.push_back(text);
      }
    }
    c->notify();
  }
  void broadcast(const std::string& text, bool droppable) {
    std::vector<ClientId> ids;
    {
      std::lock_guard lock(mu_);
      for (const auto& [id, w] : clients_) ids.push_back(id);
    }
    for (auto id : ids) send(id, text, droppable);
  }
  std::size_t client_count() {
    std::lock_guard lock(mu_);
    return clients_.size();
  }

  std::atomic<long> ticks{0};
  std::atomic<double> max_tick_lateness_ms{0.0};

 private:
  std::mutex mu_;
  std::map<ClientId, std::weak_ptr<WsClient>> clients_;
  std::deque<Inbound> inbox_;
  std::atomic<ClientId> next_id_{0};
  std::size_t max_replies_;
};

inline void WsClient::start(http::request<http::string_body> req) {
  beast::get_lowest_layer(ws_).expires_never();
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.text(true);
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->core_.add_client(self);
    self->do_read();
    self->pump();
  });
}

inline void WsClient::do_read() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->closed_ = true;
      self->core_.disconnected(self->id_);
      return;
    }
    self->core_.inbound(self->id_, beast::buffers_to_string(self->buffer_.data()));
    self->buffer_.consume(self->buffer_.size());
    self->do_read();
  });
}

inline void WsClient::notify() {
  net::post(ws_.get_executor(), [self = shared_from_this()] { self->pump(); });
}

// Replies go out in order; the state frame, if any, after them.
inline void WsClient::pump() {
  if (write_in_flight_ || closed_) return;
  {
    std::lock_guard lock(outbox_.mu);
    if (!outbox_.replies.empty()) {
      writing_ = std::move(outbox_.replies.front());
      outbox_.replies.pop_front();
    } else if (outbox_.frame) {
      writing_ = std::move(*outbox_.frame);
      outbox_.frame.reset();
    } else {
      return;
    }
  }
  write_in_flight_ = true;
  ws_.async_write(net::buffer(writing_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    self->write_in_flight_ = false;
    if (ec) {
      self->closed_ = true;
      return;
    }
    self->pump();
  });
}

inline void HttpSession::on_read(beast::error_code ec) {
  if (ec) return;
  if (websocket::is_upgrade(req_)) {
    if (req_.target() != "/ws") {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
      return;
    }
    auto client = std::make_shared<WsClient>(stream_.release_socket(), core_, core_.next_id());
    client->start(std::move(req_));
    return;
  }
  res_ = std::make_shared<http::response<http::string_body>>();
  res_->version(req_.version());
  res_->keep_alive(false);
  res_->set(http::field::server, "buzzwire-gateway");
  if (req_.method() == http::verb::get && req_.target() == "/healthz") {
    res_->result(http::status::ok);
    res_->set(http::field::content_type, "application/json");
    res_->body() = nlohmann::json{{"status", "ok"},
                                  {"protocol_version", kProtocolVersion},
                                  {"clients", core_.client_count()},
                                  {"ticks", core_.ticks.load()}}
                       .dump();
  } else {
    res_->result(http::status::not_found);
    res_->set(http::field::content_type, "text/plain");
    res_->body() = "not found\n";
  }
  res_->prepare_payload();
  http::async_write(stream_, *res_, [self = shared_from_this()](beast::error_code, std::size_t) {
    beast::error_code ignored;
    self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
  });
}

}  // namespace detail

/// Owns the listener, the io thread and the sim thread.
class GatewayServer {
 public:
  GatewayServer(LiveSession& session, ServerOptions opts)
      : session_(session), opts_(std::move(opts)), core_(opts_.max_queued_replies), acceptor_(core_.ioc) {
    using detail::tcp;
    const auto addr = detail::net::ip::make_address(opts_.host);
    tcp::endpoint ep(addr, opts_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(detail::net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
  }

  ~GatewayServer() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() {
    running_ = true;
    accept();
    io_thread_ = std::thread([this] { core_.ioc.run(); });
    sim_thread_ = std::thread([this] { sim_loop(); });
  }

  void stop() {
    if (!running_.exchange(false)) return;
    detail::net::post(core_.ioc, [this] {
      boost::system::error_code ignored;
      acceptor_.close(ignored);
      core_.ioc.stop();
    });
    if (sim_thread_.joinable()) sim_thread_.join();
    if (io_thread_.joinable()) io_thread_.join();
  }

  long ticks() const { return core_.ticks.load(); }
  double max_tick_lateness_ms() const { return core_.max_tick_lateness_ms.load(); }

 private:
  void accept() {
    acceptor_.async_accept(detail::net::make_strand(core_.ioc),
                           [this](boost::system::error_code ec, detail::tcp::socket socket) {
                             if (!ec) std::make_shared<detail::HttpSession>(std::move(socket), core_)->start();
                             if (acceptor_.is_open()) accept();
                           });
  }

  void ship(const Effects& e, std::optional<ClientId> to) {
    if (to)
      for (const auto& r : e.replies) core_.send(*to, r.dump(), false);
    for (const auto& b : e.broadcasts) core_.broadcast(b.dump(), false);
  }

  // Fixed-rate loop: drain inbox, tick, and every 100/60 ticks a frame.
  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(session_.dt()));
    auto next = clock::now();
    long n = 0;
    long frames = 0;
    const double ticks_per_second = 1.0 / session_.dt();
    while (running_) {
      for (auto& m : core_.take_inbox()) {
        if (m.disconnect) {
          ship(session_.disconnect(m.from), std::nullopt);
        } else {
          ship(session_.handle_text(m.text, m.from), m.from);
        }
      }
      ship(session_.tick(), std::nullopt);
      ++n;
      core_.ticks = n;
      const long due = static_cast<long>(static_cast<double>(n) * kStateRateHz / ticks_per_second);
      if (due > frames) {
        frames = due;
        core_.broadcast(session_.state_frame().dump(), true);
      }
      next += period;
      const auto now = clock::now();
      const double late = std::chrono::duration<double, std::milli>(now - next).count();
      if (late > core_.max_tick_lateness_ms.load()) core_.max_tick_lateness_ms = late;
      if (late > 100.0) next = now;  // fell far behind (debugger, suspend): resync
      std::this_thread::sleep_until(next);
    }
  }

  LiveSession& session_;
  ServerOptions opts_;
  detail::GatewayCore core_;
  detail::tcp::acceptor acceptor_;
  std::atomic<bool> running_{false};
  std::thread io_thread_;
  std::thread sim_thread_;
};

}  // namespace buzzwire
