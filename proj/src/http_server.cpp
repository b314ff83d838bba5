#include <httplib.h>

#include <iostream>
#include <thread>

#include "stagecraft/error.hpp"
#include "stagecraft/service.hpp"

namespace stagecraft
{

namespace
{

void route(httplib::Server& server, const ServiceConfig& config)
{
    auto forward = [&config](const httplib::Request& req, httplib::Response& res) {
        const Response r = handle(config, req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
}

}  // namespace

bool serve(const ServiceConfig& config, const std::string& host, int port)
{
    httplib::Server server;
    route(server, config);
    if (!server.bind_to_port(host, port))
    {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return false;
    }
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    return server.listen_after_bind();
}

struct BackgroundServer::Impl
{
    ServiceConfig config;
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

BackgroundServer::BackgroundServer(const ServiceConfig& config, const std::string& host, int port)
    : impl_(std::make_unique<Impl>())
{
    impl_->config = config;
    route(impl_->server, impl_->config);
    if (port == 0)
    {
        impl_->port = impl_->server.bind_to_any_port(host);
    }
    else if (impl_->server.bind_to_port(host, port))
    {
        impl_->port = port;
    }
    if (impl_->port <= 0)
    {
        throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

BackgroundServer::~BackgroundServer() { stop(); }

int BackgroundServer::port() const { return impl_->port; }

void BackgroundServer::stop()
{
    if (impl_ && impl_->thread.joinable())
    {
        impl_->server.stop();
        impl_->thread.join();
    }
}

}  // namespace stagecraft
