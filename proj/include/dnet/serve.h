#ifndef DNET_SERVE_H_
#define DNET_SERVE_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace dnet {

class ServeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Static HTTP surface for the viewer:
//   GET /            index.html from the assets directory, else a built-in page
//   GET /assets/*    files under the assets directory
//   GET /model.json  the bundle bytes, verbatim
// Anything else is 404.
class ViewerServer {
 public:
  explicit ViewerServer(std::string bundle,
                        std::optional<std::filesystem::path> assets = {});
  ~ViewerServer();
  ViewerServer(const ViewerServer&) = delete;
  ViewerServer& operator=(const ViewerServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws ServeError
  // when the port is unavailable.
  int bind(const std::string& host, int port);
  // Serves until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dnet

#endif  // DNET_SERVE_H_
