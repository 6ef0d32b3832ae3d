#include "dnet/serve.h"

#include <fstream>
#include <sstream>

#include "httplib.h"

namespace dnet {
namespace {

// Fallback page when no viewer assets are installed: arc list with an
// order slider, fed from /model.json.
constexpr const char* kFallbackPage = R"html(<!doctype html>
<html><head><meta charset="utf-8"><title>Dependency network</title></head>
<body>
<h1>Dependency network</h1>
<p><input id="slider" type="range" min="0" value="0"> <span id="count"></span></p>
<ol id="arcs"></ol>
<script>
fetch('/model.json').then(r => r.json()).then(model => {
  const slider = document.getElementById('slider');
  const title = id => model.nodes[id].title;
  slider.max = model.slider_max;
  slider.value = model.slider_max;
  const render = () => {
    const s = Number(slider.value);
    document.getElementById('count').textContent = s + ' / ' + model.slider_max + ' arcs';
    document.getElementById('arcs').innerHTML = model.arcs
      .filter(a => a.order_index < s)
      .map(a => '<li>' + title(a.from) + ' &rarr; ' + title(a.to) + '</li>')
      .join('');
  };
  slider.oninput = render;
  render();
});
</script>
</body></html>
)html";

std::string content_type_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

struct ViewerServer::Impl {
  httplib::Server server;
  std::string bundle;
  std::optional<std::filesystem::path> assets;
};

ViewerServer::ViewerServer(std::string bundle,
                           std::optional<std::filesystem::path> assets)
    : impl_(std::make_unique<Impl>()) {
  impl_->bundle = std::move(bundle);
  impl_->assets = std::move(assets);
  Impl* impl = impl_.get();

  // Plain SO_REUSEADDR, no port sharing.
  impl->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  impl->server.Get("/", [impl](const httplib::Request&, httplib::Response& res) {
    if (impl->assets) {
      if (auto page = read_file(*impl->assets / "index.html")) {
        res.set_content(*page, "text/html; charset=utf-8");
        return;
      }
    }
    res.set_content(kFallbackPage, "text/html; charset=utf-8");
  });
  impl->server.Get("/model.json",
                   [impl](const httplib::Request&, httplib::Response& res) {
                     res.set_content(impl->bundle, "application/json");
                   });
  impl->server.Get(R"(/assets/(.+))", [impl](const httplib::Request& req,
                                             httplib::Response& res) {
    const std::filesystem::path rel(req.matches[1].str());
    bool escapes = rel.is_absolute();
    for (const auto& part : rel) escapes = escapes || part == "..";
    if (!impl->assets || escapes) {
      res.status = 404;
      return;
    }
    const auto file = *impl->assets / rel;
    if (auto body = read_file(file);
        body && std::filesystem::is_regular_file(file)) {
      res.set_content(*body, content_type_for(file));
    } else {
      res.status = 404;
    }
  });
}

ViewerServer::~ViewerServer() { stop(); }

int ViewerServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw ServeError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw ServeError("cannot bind " + host + ":" + std::to_string(port) +
                     " (port busy?)");
  }
  return port;
}

void ViewerServer::run() { impl_->server.listen_after_bind(); }

void ViewerServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace dnet
