#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdea/error.hpp"
#include "hdea/objective.hpp"

// Wire protocol between the optimizer and an external evaluator process.
//
// Transport: newline-delimited JSON over the child's stdin/stdout, one object
// per line. Numbers round-trip at full double precision (shortest-exact
// encoding, >= 15 significant digits guaranteed).
//
// Session:
//   client -> {"type":"hello","protocol":1,"dimension":6}
//   child  -> {"type":"hello","protocol":1,"dimension":6}    (must echo both)
//   client -> {"type":"eval","id":0,"genome":[...],"sample_index":0,"seed":...}
//   child  -> {"type":"result","id":0,"value":480.0}
//          |  {"type":"error","id":0,"message":"..."}
//   ... one response per request, in order; ids strictly increase ...
//   client -> {"type":"shutdown"}                            (then closes stdin)
//
// The seed field lets a stochastic evaluator reproduce each sample; it is
// derived from (objective seed, evaluation index, sample index).

namespace hdea::proto {

inline constexpr int kProtocolVersion = 1;

struct Hello {
    int protocol = kProtocolVersion;
    std::size_t dimension = 0;
};

struct EvalRequest {
    std::uint64_t id = 0;
    std::vector<double> genome;
    std::uint32_t sample_index = 0;
    std::uint64_t seed = 0;
};

struct EvalResponse {
    std::uint64_t id = 0;
    bool ok = true;
    double value = 0.0;
    std::string message; // set when !ok
};

inline std::string encode_hello(const Hello& h) {
    nlohmann::json j{{"type", "hello"}, {"protocol", h.protocol}, {"dimension", h.dimension}};
    return j.dump();
}

inline std::string encode_request(const EvalRequest& r) {
    nlohmann::json j{{"type", "eval"},
                     {"id", r.id},
                     {"genome", r.genome},
                     {"sample_index", r.sample_index},
                     {"seed", r.seed}};
    return j.dump();
}

inline std::string encode_response(const EvalResponse& r) {
    if (r.ok) {
        nlohmann::json j{{"type", "result"}, {"id", r.id}, {"value", r.value}};
        return j.dump();
    }
    nlohmann::json j{{"type", "error"}, {"id", r.id}, {"message", r.message}};
    return j.dump();
}

inline std::string encode_shutdown() { return nlohmann::json{{"type", "shutdown"}}.dump(); }

namespace detail {

inline nlohmann::json parse_line(const std::string& line) {
    try {
        return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("malformed protocol line: '" + line + "'");
    }
}

inline std::string type_of(const nlohmann::json& j, const std::string& line) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ProtocolError("protocol message lacks a type: '" + line + "'");
    return j["type"].get<std::string>();
}

} // namespace detail

inline Hello parse_hello(const std::string& line) {
    const auto j = detail::parse_line(line);
    if (detail::type_of(j, line) != "hello")
        throw ProtocolError("expected hello, got: '" + line + "'");
    try {
        return Hello{j.at("protocol").get<int>(), j.at("dimension").get<std::size_t>()};
    } catch (const nlohmann::json::exception&) {
        throw ProtocolError("bad hello fields: '" + line + "'");
    }
}

inline EvalResponse parse_response(const std::string& line) {
    const auto j = detail::parse_line(line);
    const auto type = detail::type_of(j, line);
    try {
        if (type == "result") {
            EvalResponse r;
            r.id = j.at("id").get<std::uint64_t>();
            r.value = j.at("value").get<double>();
            return r;
        }
        if (type == "error") {
            EvalResponse r;
            r.ok = false;
            r.id = j.at("id").get<std::uint64_t>();
            r.message = j.at("message").get<std::string>();
            return r;
        }
    } catch (const nlohmann::json::exception&) {
        throw ProtocolError("bad response fields: '" + line + "'");
    }
    throw ProtocolError("unexpected message type '" + type + "': '" + line + "'");
}

// Client side never parses requests, but the bundled evaluator does.
inline EvalRequest parse_request(const std::string& line) {
    const auto j = detail::parse_line(line);
    if (detail::type_of(j, line) != "eval")
        throw ProtocolError("expected eval, got: '" + line + "'");
    try {
        EvalRequest r;
        r.id = j.at("id").get<std::uint64_t>();
        r.genome = j.at("genome").get<std::vector<double>>();
        r.sample_index = j.at("sample_index").get<std::uint32_t>();
        r.seed = j.at("seed").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception&) {
        throw ProtocolError("bad eval fields: '" + line + "'");
    }
}

// ---------------------------------------------------------------------------
// Reference mock evaluator
// ---------------------------------------------------------------------------

struct MockBehavior {
    enum class Mode { constant, echo_first, surrogate };
    Mode mode = Mode::constant;
    double constant_value = 480.0;
    SurrogateParams surrogate; // used in surrogate mode; noise keyed on request seed
    long fail_after = -1;      // >=0: exit abruptly after that many results
    bool garbage = false;      // emit one non-JSON line instead of the hello
};

// Serves the protocol over (in, out) until shutdown or EOF. Returns a process
// exit code. Factored over streams so tests can run it in-process while the
// CLI wires it to stdin/stdout.
inline int run_mock_eval_server(std::istream& in, std::ostream& out, const MockBehavior& mock) {
    std::string line;
    if (!std::getline(in, line)) return 1;
    if (mock.garbage) {
        out << "this is not a protocol message\n" << std::flush;
        return 1;
    }
    const Hello hello = parse_hello(line);
    if (hello.protocol != kProtocolVersion) {
        out << encode_response({0, false, 0.0, "unsupported protocol version"}) << "\n"
            << std::flush;
        return 1;
    }
    out << encode_hello(hello) << "\n" << std::flush;

    long served = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = detail::parse_line(line);
        const auto type = detail::type_of(j, line);
        if (type == "shutdown") return 0;
        const EvalRequest req = parse_request(line);
        if (req.genome.size() != hello.dimension) {
            out << encode_response({req.id, false, 0.0, "genome dimension mismatch"}) << "\n"
                << std::flush;
            continue;
        }
        if (mock.fail_after >= 0 && served >= mock.fail_after) return 3; // simulated crash
        EvalResponse resp;
        resp.id = req.id;
        switch (mock.mode) {
        case MockBehavior::Mode::constant: resp.value = mock.constant_value; break;
        case MockBehavior::Mode::echo_first: resp.value = req.genome.at(0); break;
        case MockBehavior::Mode::surrogate:
            resp.value = surrogate_evaluate(mock.surrogate, req.genome, req.seed);
            break;
        }
        out << encode_response(resp) << "\n" << std::flush;
        ++served;
    }
    return 0;
}

} // namespace hdea::proto
