#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "sdsa/bytes.hpp"

namespace sdsa::proto {

struct transport_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct protocol_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MsgType : uint8_t {
    SubmitSeller = 1,
    SubmitBuyer = 2,
    GraphAndTuples = 3,
    GroupsReturn = 4,
    GcBlob = 5,
    OtMsg = 6,
    Outcome = 7,
    Abort = 8,
};

const char* msg_type_name(MsgType t);

struct Message {
    MsgType type;
    Bytes payload;
};

// Frame layout on every transport: type (1) | length (4, big-endian) |
// payload | tag (16). The tag is truncated HMAC-SHA256 over
// (sequence number | type | payload) under the session key.
inline constexpr size_t kFrameTagBytes = 16;
inline constexpr size_t kFrameOverhead = 1 + 4 + kFrameTagBytes;

using SessionKey = std::array<uint8_t, 16>;

std::array<uint8_t, kFrameTagBytes> frame_tag(const SessionKey& key, uint64_t seq, MsgType t,
                                              std::span<const uint8_t> payload);

// Blocking bidirectional message channel between two endpoints.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(MsgType t, Bytes payload) = 0;
    virtual Message recv() = 0;
};

// Same-process pair backed by two queues; frames are trusted, tags skipped.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_inproc_pair();

// Framed TCP with tag verification on receive.
class TcpListener {
public:
    explicit TcpListener(uint16_t port);  // 0 picks an ephemeral port
    ~TcpListener();
    uint16_t port() const { return port_; }
    std::unique_ptr<Channel> accept(const SessionKey& key);

private:
    int fd_ = -1;
    uint16_t port_ = 0;
};

std::unique_ptr<Channel> tcp_connect(const std::string& host, uint16_t port,
                                     const SessionKey& key);

// Counts every message against the active phase; sizes reflect the on-wire
// frame encoding regardless of transport.
struct TranscriptEntry {
    bool outgoing;
    MsgType type;
    size_t frame_bytes;
    int phase;
};

class MeteredChannel {
public:
    explicit MeteredChannel(std::unique_ptr<Channel> inner) : inner_(std::move(inner)) {}

    void set_phase(int p) { phase_ = p; }
    void send(MsgType t, Bytes payload);
    Message recv();

    const std::vector<TranscriptEntry>& transcript() const { return entries_; }
    uint64_t phase_bytes(int phase) const;
    uint64_t total_bytes() const;

private:
    std::unique_ptr<Channel> inner_;
    std::vector<TranscriptEntry> entries_;
    int phase_ = 0;
};

}  // namespace sdsa::proto
