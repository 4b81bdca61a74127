#include "stacc/server.hpp"

#include <stdexcept>

#include <httplib.h>

namespace stacc {

struct ArtifactServer::Impl {
  httplib::Server http;
};

ArtifactServer::ArtifactServer(const std::filesystem::path& root) : impl_(std::make_unique<Impl>())
{
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  if (!impl_->http.set_mount_point("/", root.string())) {
    throw std::runtime_error("cannot serve " + root.string());
  }
  impl_->http.set_file_extension_and_mimetype_mapping("stc", "application/octet-stream");
  impl_->http.set_file_extension_and_mimetype_mapping("stm", "application/octet-stream");
  impl_->http.set_file_extension_and_mimetype_mapping("obj", "text/plain");
  impl_->http.set_file_extension_and_mimetype_mapping("csv", "text/csv");
  // The viewer may be served from another origin.
  impl_->http.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Expose-Headers", "Content-Length, Content-Range, Accept-Ranges");
    res.set_header("Accept-Ranges", "bytes");
  });
  impl_->http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404) res.set_content("not found: " + req.path + "\n", "text/plain");
  });
}

ArtifactServer::~ArtifactServer() { stop(); }

int ArtifactServer::bind(const std::string& host, int port)
{
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  return port;
}

void ArtifactServer::listen()
{
  if (!impl_->http.listen_after_bind()) throw std::runtime_error("server stopped with an error");
}

void ArtifactServer::stop()
{
  if (impl_->http.is_running()) impl_->http.stop();
}

void serve(const std::filesystem::path& root, const std::string& host, int port)
{
  ArtifactServer server(root);
  server.bind(host, port);
  server.listen();
}

}  // namespace stacc
