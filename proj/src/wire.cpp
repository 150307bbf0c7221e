#include "sdsa/protocol/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <openssl/hmac.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace sdsa::proto {

const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::SubmitSeller: return "SUBMIT_SELLER";
        case MsgType::SubmitBuyer: return "SUBMIT_BUYER";
        case MsgType::GraphAndTuples: return "GRAPH_AND_TUPLES";
        case MsgType::GroupsReturn: return "GROUPS_RETURN";
        case MsgType::GcBlob: return "GC_BLOB";
        case MsgType::OtMsg: return "OT_MSG";
        case MsgType::Outcome: return "OUTCOME";
        case MsgType::Abort: return "ABORT";
    }
    return "?";
}

std::array<uint8_t, kFrameTagBytes> frame_tag(const SessionKey& key, uint64_t seq, MsgType t,
                                              std::span<const uint8_t> payload) {
    Bytes buf;
    put_u64(buf, seq);
    put_u8(buf, uint8_t(t));
    buf.insert(buf.end(), payload.begin(), payload.end());
    uint8_t mac[32];
    unsigned mac_len = 0;
    HMAC(EVP_sha256(), key.data(), int(key.size()), buf.data(), buf.size(), mac, &mac_len);
    std::array<uint8_t, kFrameTagBytes> tag;
    std::memcpy(tag.data(), mac, kFrameTagBytes);
    return tag;
}

namespace {

struct InprocQueue {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Message> q;
    bool closed = false;
};

class InprocChannel final : public Channel {
public:
    InprocChannel(std::shared_ptr<InprocQueue> in, std::shared_ptr<InprocQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}
    ~InprocChannel() override {
        std::lock_guard lk(out_->mu);
        out_->closed = true;
        out_->cv.notify_all();
    }
    void send(MsgType t, Bytes payload) override {
        std::lock_guard lk(out_->mu);
        if (out_->closed) throw transport_error("peer closed");
        out_->q.push_back({t, std::move(payload)});
        out_->cv.notify_one();
    }
    Message recv() override {
        std::unique_lock lk(in_->mu);
        in_->cv.wait(lk, [&] { return !in_->q.empty() || in_->closed; });
        if (in_->q.empty()) throw transport_error("channel closed");
        Message m = std::move(in_->q.front());
        in_->q.pop_front();
        return m;
    }

private:
    std::shared_ptr<InprocQueue> in_, out_;
};

void write_all(int fd, const uint8_t* p, size_t n) {
    while (n > 0) {
        // MSG_NOSIGNAL: a closed peer surfaces as an error, not SIGPIPE
        ssize_t k = ::send(fd, p, n, MSG_NOSIGNAL);
        if (k <= 0) throw transport_error("socket write failed");
        p += k;
        n -= size_t(k);
    }
}

void read_all(int fd, uint8_t* p, size_t n) {
    while (n > 0) {
        ssize_t k = ::read(fd, p, n);
        if (k <= 0) throw transport_error("socket closed mid-frame");
        p += k;
        n -= size_t(k);
    }
}

class TcpChannel final : public Channel {
public:
    TcpChannel(int fd, SessionKey key) : fd_(fd), key_(key) {}
    ~TcpChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }
    void send(MsgType t, Bytes payload) override {
        Bytes frame;
        frame.reserve(kFrameOverhead + payload.size());
        put_u8(frame, uint8_t(t));
        put_u32(frame, uint32_t(payload.size()));
        frame.insert(frame.end(), payload.begin(), payload.end());
        auto tag = frame_tag(key_, send_seq_++, t, payload);
        frame.insert(frame.end(), tag.begin(), tag.end());
        write_all(fd_, frame.data(), frame.size());
    }
    Message recv() override {
        uint8_t head[5];
        read_all(fd_, head, sizeof head);
        MsgType t = MsgType(head[0]);
        uint32_t len = (uint32_t(head[1]) << 24) | (uint32_t(head[2]) << 16) |
                       (uint32_t(head[3]) << 8) | uint32_t(head[4]);
        Bytes payload(len);
        if (len > 0) read_all(fd_, payload.data(), len);
        uint8_t tag[kFrameTagBytes];
        read_all(fd_, tag, sizeof tag);
        auto expect = frame_tag(key_, recv_seq_++, t, payload);
        if (std::memcmp(tag, expect.data(), kFrameTagBytes) != 0)
            throw transport_error("frame tag verification failed");
        return {t, std::move(payload)};
    }

private:
    int fd_;
    SessionKey key_;
    uint64_t send_seq_ = 0, recv_seq_ = 0;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair() {
    auto a = std::make_shared<InprocQueue>();
    auto b = std::make_shared<InprocQueue>();
    return {std::make_unique<InprocChannel>(a, b), std::make_unique<InprocChannel>(b, a)};
}

TcpListener::TcpListener(uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw transport_error("socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw transport_error("bind() failed");
    if (::listen(fd_, 4) != 0) throw transport_error("listen() failed");
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept(const SessionKey& key) {
    int cfd = ::accept(fd_, nullptr, nullptr);
    if (cfd < 0) throw transport_error("accept() failed");
    return std::make_unique<TcpChannel>(cfd, key);
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     const SessionKey& key) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0)
        throw transport_error("getaddrinfo() failed");
    int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd < 0) {
        ::freeaddrinfo(res);
        throw transport_error("socket() failed");
    }
    int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0) {
        ::close(fd);
        throw transport_error("connect() failed");
    }
    return std::make_unique<TcpChannel>(fd, key);
}

void MeteredChannel::send(MsgType t, Bytes payload) {
    entries_.push_back({true, t, kFrameOverhead + payload.size(), phase_});
    inner_->send(t, std::move(payload));
}

Message MeteredChannel::recv() {
    Message m = inner_->recv();
    entries_.push_back({false, m.type, kFrameOverhead + m.payload.size(), phase_});
    return m;
}

uint64_t MeteredChannel::phase_bytes(int phase) const {
    uint64_t n = 0;
    for (const auto& e : entries_)
        if (e.phase == phase) n += e.frame_bytes;
    return n;
}

uint64_t MeteredChannel::total_bytes() const {
    uint64_t n = 0;
    for (const auto& e : entries_) n += e.frame_bytes;
    return n;
}

}  // namespace sdsa::proto
