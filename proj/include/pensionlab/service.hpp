#pragma once

#include <map>
#include <memory>
#include <string>

#include "json.hpp"

namespace pensionlab::service {

struct Reply {
    int status = 200;
    nlohmann::json body;
};

// Handlers are pure functions of their input; the HTTP layer only routes.
Reply project(const std::string& request_body);
Reply presets();
Reply erosion(const std::map<std::string, std::string>& query);
Reply schema();

inline constexpr int kDefaultPort = 8080;

// PENSIONLAB_PORT, else 8080.
int port_from_env();

class Server {
public:
    Server();
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Blocks until the server stops. Returns false if the port could not be bound.
bool serve(const std::string& host, int port);

}  // namespace pensionlab::service
