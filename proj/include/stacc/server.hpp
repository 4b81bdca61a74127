// Read-only HTTP file server for run artifacts (cube, report, slices).
#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace stacc {

/// Serves one directory. Byte-range requests are honoured so viewers can
/// stream the cube payload; .stc files go out as application/octet-stream.
class ArtifactServer {
 public:
  explicit ArtifactServer(const std::filesystem::path& root);
  ~ArtifactServer();
  ArtifactServer(const ArtifactServer&) = delete;
  ArtifactServer& operator=(const ArtifactServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws when the
  /// port is taken.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// bind + listen.
void serve(const std::filesystem::path& root, const std::string& host, int port);

}  // namespace stacc
