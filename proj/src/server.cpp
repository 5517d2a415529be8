#include "vosa/server.hpp"

#include "vosa/error.hpp"
#include "vosa/session.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <deque>
#include <filesystem>
#include <iostream>

namespace vosa {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

struct Shared {
  std::shared_ptr<const ScenarioCatalog> catalog;
  ServerOptions opt;
};

const char* mime_type(const std::filesystem::path& p)
{
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

/// Maps a request target under `root`; nullopt for anything that could escape it.
std::optional<std::filesystem::path> resolve_static(const std::string& root, beast::string_view target)
{
  std::string path(target.substr(0, target.find('?')));
  if (path.empty() || path[0] != '/') return std::nullopt;
  if (path.back() == '/') path += "index.html";
  const std::filesystem::path rel = std::filesystem::path(path).relative_path();
  for (const auto& part : rel)
    if (part == "..") return std::nullopt;
  return std::filesystem::path(root) / rel;
}

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
  WsSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        shared_(std::move(shared)),
        endpoint_(shared_->catalog,
                  shared_->opt.log_dir.empty() ? std::nullopt : std::optional<std::string>(shared_->opt.log_dir),
                  shared_->opt.hold_ticks)
  {
  }

  void run(http::request<http::string_body> req)
  {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

private:
  void on_accept(beast::error_code ec)
  {
    if (ec) return;
    for (auto& f : endpoint_.on_open()) enqueue(std::move(f));
    next_tick_ = std::chrono::steady_clock::now() + tick_period();
    schedule_tick();
    do_read();
  }

  std::chrono::steady_clock::duration tick_period() const
  {
    double dt = 0.05;
    if (const Session* s = endpoint_.session()) dt = s->runner().spec().scene.params.dt;
    return std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(dt));
  }

  void schedule_tick()
  {
    timer_.expires_at(next_tick_);
    timer_.async_wait(beast::bind_front_handler(&WsSession::on_tick, shared_from_this()));
  }

  void on_tick(beast::error_code ec)
  {
    if (ec || closed_) return;
    if (auto frame = endpoint_.on_tick()) enqueue(std::move(*frame));
    // Fixed-rate schedule; after a stall, resynchronize instead of bursting.
    const auto period = tick_period();
    next_tick_ += period;
    const auto now = std::chrono::steady_clock::now();
    if (next_tick_ + period < now) next_tick_ = now + period;
    schedule_tick();
  }

  void do_read()
  {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t)
  {
    if (ec) {
      close();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (auto& f : endpoint_.on_message(text)) enqueue(std::move(f));
    do_read();
  }

  void enqueue(std::string frame)
  {
    if (closed_) return;
    if (queue_.size() >= shared_->opt.max_queued_frames) {
      // Never drop the frame being written.
      if (writing_ && queue_.size() > 1)
        queue_.erase(queue_.begin() + 1);
      else if (!writing_)
        queue_.pop_front();
    }
    queue_.push_back(std::move(frame));
    if (!writing_) do_write();
  }

  void do_write()
  {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t)
  {
    writing_ = false;
    if (ec) {
      close();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty() && !closed_) do_write();
  }

  void close()
  {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    try {
      endpoint_.on_close();
    } catch (const std::exception& e) {
      std::cerr << "session log: " << e.what() << '\n';
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  std::shared_ptr<const Shared> shared_;
  SessionEndpoint endpoint_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closed_ = false;
  std::chrono::steady_clock::time_point next_tick_;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<const Shared> shared)
      : stream_(std::move(socket)), shared_(std::move(shared))
  {
  }

  void run() { do_read(); }

private:
  void do_read()
  {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t)
  {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), shared_)->run(std::move(req_));
      return;
    }
    respond();
  }

  template <class Body>
  void send(http::response<Body>&& res)
  {
    auto sp = std::make_shared<http::response<Body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec || !sp->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->do_read();
    });
  }

  void text_response(http::status status, const std::string& body)
  {
    http::response<http::string_body> res{status, req_.version()};
    res.set(http::field::content_type, "text/plain");
    res.keep_alive(req_.keep_alive());
    res.body() = body;
    res.prepare_payload();
    send(std::move(res));
  }

  void respond()
  {
    if (req_.method() != http::verb::get && req_.method() != http::verb::head)
      return text_response(http::status::method_not_allowed, "method not allowed\n");
    if (shared_->opt.static_dir.empty()) return text_response(http::status::not_found, "no static directory\n");
    const auto path = resolve_static(shared_->opt.static_dir, req_.target());
    if (!path) return text_response(http::status::bad_request, "bad path\n");

    beast::error_code ec;
    http::file_body::value_type body;
    body.open(path->string().c_str(), beast::file_mode::scan, ec);
    if (ec) return text_response(http::status::not_found, "not found\n");
    const auto size = body.size();

    if (req_.method() == http::verb::head) {
      http::response<http::empty_body> res{http::status::ok, req_.version()};
      res.set(http::field::content_type, mime_type(*path));
      res.content_length(size);
      res.keep_alive(req_.keep_alive());
      return send(std::move(res));
    }
    http::response<http::file_body> res{std::piecewise_construct, std::make_tuple(std::move(body)),
                                        std::make_tuple(http::status::ok, req_.version())};
    res.set(http::field::content_type, mime_type(*path));
    res.content_length(size);
    res.keep_alive(req_.keep_alive());
    send(std::move(res));
  }

  beast::tcp_stream stream_;
  std::shared_ptr<const Shared> shared_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct Server::Impl {
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::shared_ptr<const Shared> shared;

  void accept()
  {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == net::error::operation_aborted) return;
      } else {
        std::make_shared<HttpSession>(std::move(socket), shared)->run();
      }
      accept();
    });
  }
};

Server::Server(ServerOptions opt) : impl_(std::make_unique<Impl>())
{
  auto shared = std::make_shared<Shared>();
  shared->catalog = std::make_shared<ScenarioCatalog>(opt.scenario_dir);
  if (!opt.static_dir.empty() && !std::filesystem::is_directory(opt.static_dir))
    throw ConfigError("static directory '" + opt.static_dir + "' does not exist");
  shared->opt = std::move(opt);
  impl_->shared = shared;

  beast::error_code ec;
  const auto addr = net::ip::make_address(shared->opt.address, ec);
  if (ec) throw ConfigError("bad bind address '" + shared->opt.address + "'");
  const tcp::endpoint ep{addr, shared->opt.port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep, ec);
  if (ec) throw Error(ErrorCategory::io, "cannot bind " + shared->opt.address + ":" + std::to_string(shared->opt.port) +
                                             ": " + ec.message());
  impl_->acceptor.listen(net::socket_base::max_listen_connections);
  impl_->accept();
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->ioc.run(); }

void Server::stop() { impl_->ioc.stop(); }

}  // namespace vosa
