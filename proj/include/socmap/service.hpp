#ifndef SOCMAP_SERVICE_HPP
#define SOCMAP_SERVICE_HPP

#include <memory>
#include <mutex>
#include <string>

#include "socmap/pipeline.hpp"

namespace httplib {
class Server;
}

namespace socmap {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;              // 0 picks an ephemeral port at bind time
    size_t max_body_bytes = 1 << 20; // larger request bodies get 413
};

// HTTP prediction endpoint over a loaded pipeline.
//   POST /predict       {"description": "..."} -> {"soc_code", "model_version"}
//   GET  /healthz       model metadata
//   POST /admin/reload  {"path": "..."} swaps in a new pipeline atomically
class ModelService {
public:
    ModelService(std::shared_ptr<const Pipeline> pipeline, ServiceConfig cfg);
    ~ModelService();
    ModelService(const ModelService&) = delete;
    ModelService& operator=(const ModelService&) = delete;

    // Claims the socket; resolves port 0 to the actual port. Returns false
    // when the address cannot be bound.
    bool bind();
    int port() const { return port_; }

    void serve(); // blocking accept loop; returns after stop()
    void stop();
    bool running() const;

    std::shared_ptr<const Pipeline> current() const;
    void swap_pipeline(std::shared_ptr<const Pipeline> next);

private:
    std::unique_ptr<httplib::Server> server_;
    ServiceConfig cfg_;
    int port_ = -1;
    mutable std::mutex mu_;
    std::shared_ptr<const Pipeline> pipeline_;
};

} // namespace socmap

#endif
