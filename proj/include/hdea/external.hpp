#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hdea/error.hpp"
#include "hdea/objective.hpp"
#include "hdea/protocol.hpp"
#include "hdea/subprocess.hpp"

namespace hdea {

struct ExternalConfig {
    std::vector<std::string> command;
    std::size_t dimension = 0;
    std::chrono::milliseconds timeout = std::chrono::minutes(10);
};

// One evaluator session: spawn, handshake, then strictly ordered
// request/response pairs until shutdown. Never shared across runs.
class ExternalSession {
public:
    explicit ExternalSession(ExternalConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.command.empty()) throw ParameterError("external: empty evaluator command");
        if (cfg_.dimension == 0) throw ParameterError("external: dimension must be positive");
        child_ = std::make_unique<Subprocess>(cfg_.command);
        child_->write_line(proto::encode_hello({proto::kProtocolVersion, cfg_.dimension}));
        const auto line = child_->read_line(cfg_.timeout);
        if (!line)
            throw EvaluationError("external: evaluator exited before handshake" +
                                  stderr_suffix());
        const auto hello = proto::parse_hello(*line);
        if (hello.protocol != proto::kProtocolVersion)
            throw ProtocolError("external: evaluator speaks protocol version " +
                                std::to_string(hello.protocol) + ", expected " +
                                std::to_string(proto::kProtocolVersion));
        if (hello.dimension != cfg_.dimension)
            throw ProtocolError("external: evaluator dimension " +
                                std::to_string(hello.dimension) + ", expected " +
                                std::to_string(cfg_.dimension));
    }

    ~ExternalSession() { shutdown(); }

    double evaluate_sample(const std::vector<double>& genome, const SampleContext& ctx) {
        if (genome.size() != cfg_.dimension)
            throw RepresentationError("external: genome dimension mismatch");
        proto::EvalRequest req{next_id_++, genome, ctx.sample_index, ctx.seed};
        child_->write_line(proto::encode_request(req));
        ++requests_sent_;
        const auto line = child_->read_line(cfg_.timeout);
        if (!line)
            throw EvaluationError("external: evaluator exited mid-evaluation (request id " +
                                  std::to_string(req.id) + ")" + stderr_suffix());
        const auto resp = proto::parse_response(*line);
        if (resp.id != req.id)
            throw ProtocolError("external: response id " + std::to_string(resp.id) +
                                " does not match request id " + std::to_string(req.id));
        if (!resp.ok)
            throw EvaluationError("external: evaluator error for request " +
                                  std::to_string(req.id) + ": " + resp.message);
        if (std::isnan(resp.value))
            throw ProtocolError("external: evaluator returned NaN for request " +
                                std::to_string(req.id));
        return resp.value;
    }

    void shutdown() noexcept {
        if (!child_) return;
        try {
            child_->write_line(proto::encode_shutdown());
        } catch (...) {
            // child already gone; destructor reaps it
        }
        child_->close_stdin();
        child_.reset();
    }

    std::uint64_t requests_sent() const noexcept { return requests_sent_; }

private:
    std::string stderr_suffix() {
        const auto err = child_ ? child_->drain_stderr() : std::string{};
        return err.empty() ? std::string{} : "; evaluator stderr: " + err;
    }

    ExternalConfig cfg_;
    std::unique_ptr<Subprocess> child_;
    std::uint64_t next_id_ = 0;
    std::uint64_t requests_sent_ = 0;
};

class ExternalSampler final : public Sampler<RealGenome> {
public:
    explicit ExternalSampler(ExternalConfig cfg) : session_(std::move(cfg)) {}

    double raw_sample(const RealGenome& g, const SampleContext& ctx) override {
        return session_.evaluate_sample(g.values, ctx);
    }

    ExternalSession& session() noexcept { return session_; }

private:
    ExternalSession session_;
};

} // namespace hdea
