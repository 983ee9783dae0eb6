#include "socmap/service.hpp"

#include "httplib.h"
#include "json.hpp"
#include "socmap/error.hpp"

namespace socmap {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

} // namespace

ModelService::ModelService(std::shared_ptr<const Pipeline> pipeline, ServiceConfig cfg)
    : server_(std::make_unique<httplib::Server>()), cfg_(std::move(cfg)),
      pipeline_(std::move(pipeline)) {
    server_->set_payload_max_length(cfg_.max_body_bytes);

    server_->Post("/predict", [this](const httplib::Request& req,
                                     httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() ||
            !body.contains("description") || !body["description"].is_string()) {
            reply(res, 400,
                  {{"error", "request body must be a JSON object with a string "
                             "\"description\" field"}});
            return;
        }
        try {
            std::shared_ptr<const Pipeline> p = current();
            json out = {{"soc_code", p->predict_one(body["description"])},
                        {"model_version", p->meta().model_version}};
            reply(res, 200, out);
        } catch (const std::exception& ex) {
            reply(res, 500, {{"error", ex.what()}});
        }
    });

    server_->Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        std::shared_ptr<const Pipeline> p = current();
        const PipelineMeta& m = p->meta();
        reply(res, 200,
              {{"status", "ok"},
               {"model_version", m.model_version},
               {"representation", representation_name(p->representation())},
               {"algorithm", algorithm_name(p->algorithm())},
               {"class_count", m.class_count},
               {"feature_dim", m.feature_dim},
               {"training_rows", m.training_rows},
               {"dataset_fingerprint", m.dataset_fingerprint},
               {"created_unix", m.created_unix}});
    });

    server_->Post("/admin/reload", [this](const httplib::Request& req,
                                          httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("path") ||
            !body["path"].is_string()) {
            reply(res, 400,
                  {{"error",
                    "request body must be a JSON object with a string \"path\" "
                    "field"}});
            return;
        }
        try {
            auto next = std::make_shared<const Pipeline>(
                Pipeline::load(body["path"].get<std::string>()));
            swap_pipeline(next);
            reply(res, 200,
                  {{"status", "reloaded"},
                   {"model_version", next->meta().model_version}});
        } catch (const std::exception& ex) {
            reply(res, 400, {{"error", ex.what()}});
        }
    });
}

ModelService::~ModelService() {
    if (server_->is_running()) server_->stop();
}

bool ModelService::bind() {
    if (cfg_.port == 0) {
        int p = server_->bind_to_any_port(cfg_.host);
        if (p < 0) return false;
        port_ = p;
        return true;
    }
    if (!server_->bind_to_port(cfg_.host, cfg_.port)) return false;
    port_ = cfg_.port;
    return true;
}

void ModelService::serve() { server_->listen_after_bind(); }

void ModelService::stop() { server_->stop(); }

bool ModelService::running() const { return server_->is_running(); }

std::shared_ptr<const Pipeline> ModelService::current() const {
    std::lock_guard<std::mutex> lock(mu_);
    return pipeline_;
}

void ModelService::swap_pipeline(std::shared_ptr<const Pipeline> next) {
    std::lock_guard<std::mutex> lock(mu_);
    pipeline_ = std::move(next);
}

} // namespace socmap
