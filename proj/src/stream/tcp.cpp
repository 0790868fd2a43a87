#include "skelact/stream/tcp.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <json.hpp>
#include <mutex>
#include <thread>
#include <vector>

#include "skelact/common/error.hpp"

namespace skelact {

namespace {

// Blocking line reader over a socket fd.
class LineSocket {
public:
    explicit LineSocket(int fd) : fd_(fd) {}
    ~LineSocket() {
        if (fd_ >= 0) ::close(fd_);
    }

    bool next_line(std::string& line) {
        line.clear();
        for (;;) {
            if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
                line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                return true;
            }
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (n <= 0) {
                if (buffer_.empty()) return false;
                line.swap(buffer_);
                return true;
            }
            buffer_.append(chunk, static_cast<size_t>(n));
        }
    }

private:
    int fd_;
    std::string buffer_;
};

int connect_to(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos)
        throw ConfigError("TCP endpoint must look like HOST:PORT, got '" +
                          endpoint + "'");
    const std::string host = endpoint.substr(0, colon);
    const std::string port = endpoint.substr(colon + 1);

    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || !res)
        throw RuntimeError("cannot resolve " + endpoint);
    int fd = -1;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw RuntimeError("cannot connect to " + endpoint);
    return fd;
}

}  // namespace

struct TcpFrameSource::Impl {
    LineSocket socket;
    const JointSet* set = nullptr;
    double fps = 30.0;
    size_t frame_index = 0;

    explicit Impl(int fd) : socket(fd) {}
};

TcpFrameSource::TcpFrameSource(const std::string& endpoint)
    : impl_(std::make_unique<Impl>(connect_to(endpoint))) {
    std::string line;
    if (!impl_->socket.next_line(line))
        throw DataError("TCP stream closed before the header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("TCP stream header is not valid JSON: ") +
                        e.what());
    }
    impl_->set = &joint_set_by_name(header.at("joint_set").get<std::string>());
    impl_->fps = header.at("fps").get<double>();
    if (!(impl_->fps > 0.0)) throw DataError("TCP stream fps must be positive");
}

TcpFrameSource::~TcpFrameSource() = default;

std::optional<SkeletonFrame> TcpFrameSource::next() {
    std::string line;
    while (impl_->socket.next_line(line)) {
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            continue;  // malformed line: skip, the stream must not die
        }
        if (!doc.is_array() ||
            static_cast<int>(doc.size()) != impl_->set->joint_count())
            continue;
        SkeletonFrame frame;
        frame.t = static_cast<double>(impl_->frame_index++) / impl_->fps;
        bool ok = true;
        for (const auto& joint : doc) {
            if (!joint.is_array() || joint.size() != 4) {
                ok = false;
                break;
            }
            const double c = joint.at(3).get<double>();
            Vec3 p{joint.at(0).get<double>(), joint.at(1).get<double>(),
                   joint.at(2).get<double>()};
            if (!p.finite()) {
                ok = false;
                break;
            }
            if (c == 0.0) p = Vec3{};
            frame.joints.push_back(p);
            frame.valid.push_back(c == 0.0 ? 0 : 1);
        }
        if (ok) return frame;
    }
    return std::nullopt;
}

const JointSet& TcpFrameSource::joint_set() const { return *impl_->set; }

double TcpFrameSource::fps() const { return impl_->fps; }

struct TcpLabelServer::Impl {
    int listen_fd = -1;
    int port = 0;
    std::thread acceptor;
    std::mutex mu;
    std::vector<int> clients;
    bool shutdown = false;

    ~Impl() {
        {
            std::lock_guard<std::mutex> lock(mu);
            shutdown = true;
        }
        if (listen_fd >= 0) {
            ::shutdown(listen_fd, SHUT_RDWR);
            ::close(listen_fd);
        }
        if (acceptor.joinable()) acceptor.join();
        std::lock_guard<std::mutex> lock(mu);
        for (const int fd : clients) ::close(fd);
    }
};

TcpLabelServer::TcpLabelServer(int port) : impl_(std::make_unique<Impl>()) {
    impl_->listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (impl_->listen_fd < 0) throw RuntimeError("cannot create listen socket");
    const int one = 1;
    ::setsockopt(impl_->listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(impl_->listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw RuntimeError("cannot bind port " + std::to_string(port));
    if (::listen(impl_->listen_fd, 8) != 0)
        throw RuntimeError("cannot listen on port " + std::to_string(port));
    socklen_t len = sizeof(addr);
    ::getsockname(impl_->listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    impl_->port = ntohs(addr.sin_port);

    impl_->acceptor = std::thread([impl = impl_.get()] {
        for (;;) {
            const int fd = ::accept(impl->listen_fd, nullptr, nullptr);
            if (fd < 0) return;
            std::lock_guard<std::mutex> lock(impl->mu);
            if (impl->shutdown) {
                ::close(fd);
                return;
            }
            // non-blocking so a stalled client cannot stall the pipeline
            ::fcntl(fd, F_SETFL, O_NONBLOCK);
            impl->clients.push_back(fd);
        }
    });
}

TcpLabelServer::~TcpLabelServer() = default;

int TcpLabelServer::port() const { return impl_->port; }

void TcpLabelServer::publish(const LabelMessage& message) {
    const std::string line = message.to_json_line() + "\n";
    std::lock_guard<std::mutex> lock(impl_->mu);
    for (auto it = impl_->clients.begin(); it != impl_->clients.end();) {
        const ssize_t n = ::send(*it, line.data(), line.size(), MSG_NOSIGNAL);
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) {
            ::close(*it);
            it = impl_->clients.erase(it);
        } else {
            ++it;
        }
    }
}

}  // namespace skelact
