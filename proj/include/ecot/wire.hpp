#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ecot/ot12.hpp"
#include "ecot/ot_rabin.hpp"
#include "ecot/session.hpp"

// Byte-exact wire format. Points: identity is the single byte 0x00; a finite
// point is 0x04 followed by x and y as 4-byte big-endian words. Frames:
// 4-byte big-endian length covering tag + payload, one tag byte, payload.

namespace ecot::wire {

enum class Tag : std::uint8_t {
    Handshake = 0x00,
    RabinStep1 = 0x01,
    RabinStep2 = 0x02,
    RabinStep4 = 0x04,
    MaskedSecret = 0x10,
    FinalTransfer = 0x11,
    Abort = 0x12,
    Ot12Step1 = 0x21,
    Ot12Step2 = 0x22,
    Ot12Step4 = 0x23,
    Ot12Ack = 0x24,
    Ot12Secrets = 0x25,
};

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Handshake: return "handshake";
        case Tag::RabinStep1: return "rabin_step1";
        case Tag::RabinStep2: return "rabin_step2";
        case Tag::RabinStep4: return "rabin_step4";
        case Tag::MaskedSecret: return "masked_secret";
        case Tag::FinalTransfer: return "final_transfer";
        case Tag::Abort: return "abort";
        case Tag::Ot12Step1: return "ot12_step1";
        case Tag::Ot12Step2: return "ot12_step2";
        case Tag::Ot12Step4: return "ot12_step4";
        case Tag::Ot12Ack: return "ot12_ack";
        case Tag::Ot12Secrets: return "ot12_secrets";
    }
    return "unknown";
}

enum class AbortReason : std::uint8_t {
    Withheld = 0x01,         // peer refused its final transfer
    DegenerateRetry = 0x02,  // an identity landed in a slot; restart with fresh randomness
    ProtocolError = 0x03,
};

struct HandshakeMsg {
    std::uint8_t version = 1;
    Int p = 0, a = 0, b = 0;
    AffinePoint base;  // identity when no base point is configured
    Int base_order = 0;
    Int x_coord = 0;
    Int kappa = 0;
    std::uint8_t secret_len = 0;
    std::vector<std::uint8_t> mask_const;

    friend bool operator==(const HandshakeMsg&, const HandshakeMsg&) = default;

    static HandshakeMsg of(const SessionConfig& cfg) {
        HandshakeMsg h;
        h.p = cfg.curve.p();
        h.a = cfg.curve.a();
        h.b = cfg.curve.b();
        h.base = cfg.curve.base().value_or(AffinePoint::identity());
        h.base_order = cfg.curve.base_order().value_or(0);
        h.x_coord = cfg.x_coord;
        h.kappa = cfg.kappa;
        h.secret_len = static_cast<std::uint8_t>(cfg.secret_len);
        h.mask_const = cfg.mask_const;
        return h;
    }
};

struct MaskedSecretMsg {
    std::vector<std::uint8_t> body;
    friend bool operator==(const MaskedSecretMsg&, const MaskedSecretMsg&) = default;
};

struct FinalTransferMsg {
    AffinePoint sealed;
    friend bool operator==(const FinalTransferMsg&, const FinalTransferMsg&) = default;
};

struct AbortMsg {
    AbortReason reason = AbortReason::ProtocolError;
    friend bool operator==(const AbortMsg&, const AbortMsg&) = default;
};

using Message = std::variant<HandshakeMsg, rabin::Step1Msg, rabin::Step2Msg, rabin::Step4Msg,
                             MaskedSecretMsg, FinalTransferMsg, AbortMsg, ot12::Step1Msg,
                             ot12::Step2Msg, ot12::Step4Msg, ot12::AckMsg, ot12::SecretsMsg>;

namespace detail {

inline constexpr std::size_t kMaxFrame = 4096;

inline void put_u32(std::vector<std::uint8_t>& out, Int v) {
    auto u = static_cast<std::uint32_t>(v);
    out.push_back(static_cast<std::uint8_t>(u >> 24));
    out.push_back(static_cast<std::uint8_t>(u >> 16));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
    out.push_back(static_cast<std::uint8_t>(u));
}

struct Cursor {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos + 1 > data.size()) throw TruncatedFrame("frame ran out of bytes");
        return data[pos++];
    }
    Int u32() {
        if (pos + 4 > data.size()) throw TruncatedFrame("frame ran out of bytes");
        Int v = (Int{data[pos]} << 24) | (Int{data[pos + 1]} << 16) | (Int{data[pos + 2]} << 8) |
                Int{data[pos + 3]};
        pos += 4;
        return v;
    }
    std::vector<std::uint8_t> bytes(std::size_t n) {
        if (pos + n > data.size()) throw TruncatedFrame("frame ran out of bytes");
        std::vector<std::uint8_t> out(data.begin() + pos, data.begin() + pos + n);
        pos += n;
        return out;
    }
    void expect_end() {
        if (pos != data.size()) throw TruncatedFrame("trailing bytes inside frame");
    }
};

inline void put_point(std::vector<std::uint8_t>& out, const AffinePoint& pt) {
    if (pt.is_identity()) {
        out.push_back(0x00);
        return;
    }
    out.push_back(0x04);
    put_u32(out, pt.x());
    put_u32(out, pt.y());
}

// wire points must be reduced members of the session curve
inline AffinePoint get_point(Cursor& cur, const CurveParams& curve) {
    std::uint8_t marker = cur.u8();
    if (marker == 0x00) return AffinePoint::identity();
    if (marker != 0x04) throw TruncatedFrame("bad point marker");
    Int x = cur.u32();
    Int y = cur.u32();
    AffinePoint pt = AffinePoint::at(x, y);
    if (!is_on_curve(curve, pt))
        throw InvalidPoint("wire point " + to_string(pt) + " is not on the session curve");
    return pt;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_frame(const Message& msg) {
    std::vector<std::uint8_t> payload;
    Tag tag{};
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            using detail::put_point;
            using detail::put_u32;
            if constexpr (std::is_same_v<T, HandshakeMsg>) {
                tag = Tag::Handshake;
                payload.push_back(m.version);
                put_u32(payload, m.p);
                put_u32(payload, m.a);
                put_u32(payload, m.b);
                put_point(payload, m.base);
                put_u32(payload, m.base_order);
                put_u32(payload, m.x_coord);
                put_u32(payload, m.kappa);
                payload.push_back(m.secret_len);
                payload.insert(payload.end(), m.mask_const.begin(), m.mask_const.end());
            } else if constexpr (std::is_same_v<T, rabin::Step1Msg>) {
                tag = Tag::RabinStep1;
                put_point(payload, m.sender_blind);
            } else if constexpr (std::is_same_v<T, rabin::Step2Msg>) {
                tag = Tag::RabinStep2;
                put_point(payload, m.receiver_blind);
                put_point(payload, m.masked_echo);
                put_point(payload, m.blinded_nonce);
            } else if constexpr (std::is_same_v<T, rabin::Step4Msg>) {
                tag = Tag::RabinStep4;
                put_point(payload, m.recombined);
                put_point(payload, m.key_envelope);
            } else if constexpr (std::is_same_v<T, MaskedSecretMsg>) {
                tag = Tag::MaskedSecret;
                payload.push_back(static_cast<std::uint8_t>(m.body.size()));
                payload.insert(payload.end(), m.body.begin(), m.body.end());
            } else if constexpr (std::is_same_v<T, FinalTransferMsg>) {
                tag = Tag::FinalTransfer;
                put_point(payload, m.sealed);
            } else if constexpr (std::is_same_v<T, AbortMsg>) {
                tag = Tag::Abort;
                payload.push_back(static_cast<std::uint8_t>(m.reason));
            } else if constexpr (std::is_same_v<T, ot12::Step1Msg>) {
                tag = Tag::Ot12Step1;
                put_point(payload, m.blind0);
                put_point(payload, m.blind1);
            } else if constexpr (std::is_same_v<T, ot12::Step2Msg>) {
                tag = Tag::Ot12Step2;
                put_point(payload, m.receiver_blind);
                put_point(payload, m.masked_echo0);
                put_point(payload, m.masked_echo1);
                put_point(payload, m.blinded_nonce);
            } else if constexpr (std::is_same_v<T, ot12::Step4Msg>) {
                tag = Tag::Ot12Step4;
                put_point(payload, m.recombined0);
                put_point(payload, m.key_envelope0);
                put_point(payload, m.recombined1);
                put_point(payload, m.key_envelope1);
            } else if constexpr (std::is_same_v<T, ot12::AckMsg>) {
                tag = Tag::Ot12Ack;
            } else if constexpr (std::is_same_v<T, ot12::SecretsMsg>) {
                tag = Tag::Ot12Secrets;
                put_point(payload, m.sealed0);
                put_point(payload, m.sealed1);
            }
        },
        msg);

    std::vector<std::uint8_t> frame;
    detail::put_u32(frame, static_cast<Int>(payload.size() + 1));
    frame.push_back(static_cast<std::uint8_t>(tag));
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

// Decodes exactly one frame; the span must hold the complete frame and
// nothing less. Garbage between the end of the message and the end of the
// declared length is rejected.
inline Message decode_frame(std::span<const std::uint8_t> bytes, const CurveParams& curve) {
    detail::Cursor head{bytes};
    Int length = head.u32();
    if (length < 1 || static_cast<std::size_t>(length) > detail::kMaxFrame)
        throw TruncatedFrame("frame length out of range");
    if (bytes.size() < 4 + static_cast<std::size_t>(length))
        throw TruncatedFrame("frame shorter than declared length");
    auto tag_byte = head.u8();
    detail::Cursor cur{bytes.subspan(5, static_cast<std::size_t>(length) - 1)};

    auto finish = [&cur](Message m) {
        cur.expect_end();
        return m;
    };

    switch (static_cast<Tag>(tag_byte)) {
        case Tag::Handshake: {
            HandshakeMsg h;
            h.version = cur.u8();
            h.p = cur.u32();
            h.a = cur.u32();
            h.b = cur.u32();
            CurveParams hs_curve(h.p, h.a, h.b);
            h.base = detail::get_point(cur, hs_curve);
            h.base_order = cur.u32();
            h.x_coord = cur.u32();
            h.kappa = cur.u32();
            h.secret_len = cur.u8();
            h.mask_const = cur.bytes(h.secret_len);
            return finish(h);
        }
        case Tag::RabinStep1:
            return finish(rabin::Step1Msg{detail::get_point(cur, curve)});
        case Tag::RabinStep2: {
            rabin::Step2Msg m;
            m.receiver_blind = detail::get_point(cur, curve);
            m.masked_echo = detail::get_point(cur, curve);
            m.blinded_nonce = detail::get_point(cur, curve);
            return finish(m);
        }
        case Tag::RabinStep4: {
            rabin::Step4Msg m;
            m.recombined = detail::get_point(cur, curve);
            m.key_envelope = detail::get_point(cur, curve);
            return finish(m);
        }
        case Tag::MaskedSecret: {
            auto n = cur.u8();
            return finish(MaskedSecretMsg{cur.bytes(n)});
        }
        case Tag::FinalTransfer:
            return finish(FinalTransferMsg{detail::get_point(cur, curve)});
        case Tag::Abort:
            return finish(AbortMsg{static_cast<AbortReason>(cur.u8())});
        case Tag::Ot12Step1: {
            ot12::Step1Msg m;
            m.blind0 = detail::get_point(cur, curve);
            m.blind1 = detail::get_point(cur, curve);
            return finish(m);
        }
        case Tag::Ot12Step2: {
            ot12::Step2Msg m;
            m.receiver_blind = detail::get_point(cur, curve);
            m.masked_echo0 = detail::get_point(cur, curve);
            m.masked_echo1 = detail::get_point(cur, curve);
            m.blinded_nonce = detail::get_point(cur, curve);
            return finish(m);
        }
        case Tag::Ot12Step4: {
            ot12::Step4Msg m;
            m.recombined0 = detail::get_point(cur, curve);
            m.key_envelope0 = detail::get_point(cur, curve);
            m.recombined1 = detail::get_point(cur, curve);
            m.key_envelope1 = detail::get_point(cur, curve);
            return finish(m);
        }
        case Tag::Ot12Ack:
            return finish(ot12::AckMsg{});
        case Tag::Ot12Secrets: {
            ot12::SecretsMsg m;
            m.sealed0 = detail::get_point(cur, curve);
            m.sealed1 = detail::get_point(cur, curve);
            return finish(m);
        }
    }
    throw UnknownTag("unknown frame tag " + std::to_string(tag_byte));
}

inline Tag tag_of(const Message& msg) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HandshakeMsg>) return Tag::Handshake;
            else if constexpr (std::is_same_v<T, rabin::Step1Msg>) return Tag::RabinStep1;
            else if constexpr (std::is_same_v<T, rabin::Step2Msg>) return Tag::RabinStep2;
            else if constexpr (std::is_same_v<T, rabin::Step4Msg>) return Tag::RabinStep4;
            else if constexpr (std::is_same_v<T, MaskedSecretMsg>) return Tag::MaskedSecret;
            else if constexpr (std::is_same_v<T, FinalTransferMsg>) return Tag::FinalTransfer;
            else if constexpr (std::is_same_v<T, AbortMsg>) return Tag::Abort;
            else if constexpr (std::is_same_v<T, ot12::Step1Msg>) return Tag::Ot12Step1;
            else if constexpr (std::is_same_v<T, ot12::Step2Msg>) return Tag::Ot12Step2;
            else if constexpr (std::is_same_v<T, ot12::Step4Msg>) return Tag::Ot12Step4;
            else if constexpr (std::is_same_v<T, ot12::AckMsg>) return Tag::Ot12Ack;
            else return Tag::Ot12Secrets;
        },
        msg);
}

inline std::string hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

inline std::string render(const Message& msg) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HandshakeMsg>) {
                return "E_" + std::to_string(m.p) + "(" + std::to_string(m.a) + "," +
                       std::to_string(m.b) + ") G=" + to_string(m.base) + " n=" +
                       std::to_string(m.base_order) + " x=" + std::to_string(m.x_coord) +
                       " kappa=" + std::to_string(m.kappa) + " len=" + std::to_string(m.secret_len) +
                       " M=" + hex(m.mask_const);
            } else if constexpr (std::is_same_v<T, rabin::Step1Msg>) {
                return to_string(m.sender_blind);
            } else if constexpr (std::is_same_v<T, rabin::Step2Msg>) {
                return to_string(m.receiver_blind) + " " + to_string(m.masked_echo) + " " +
                       to_string(m.blinded_nonce);
            } else if constexpr (std::is_same_v<T, rabin::Step4Msg>) {
                return to_string(m.recombined) + " " + to_string(m.key_envelope);
            } else if constexpr (std::is_same_v<T, MaskedSecretMsg>) {
                return hex(m.body);
            } else if constexpr (std::is_same_v<T, FinalTransferMsg>) {
                return to_string(m.sealed);
            } else if constexpr (std::is_same_v<T, AbortMsg>) {
                switch (m.reason) {
                    case AbortReason::Withheld: return "withheld";
                    case AbortReason::DegenerateRetry: return "degenerate-retry";
                    default: return "protocol-error";
                }
            } else if constexpr (std::is_same_v<T, ot12::Step1Msg>) {
                return to_string(m.blind0) + " " + to_string(m.blind1);
            } else if constexpr (std::is_same_v<T, ot12::Step2Msg>) {
                return to_string(m.receiver_blind) + " " + to_string(m.masked_echo0) + " " +
                       to_string(m.masked_echo1) + " " + to_string(m.blinded_nonce);
            } else if constexpr (std::is_same_v<T, ot12::Step4Msg>) {
                return to_string(m.recombined0) + " " + to_string(m.key_envelope0) + " " +
                       to_string(m.recombined1) + " " + to_string(m.key_envelope1);
            } else if constexpr (std::is_same_v<T, ot12::AckMsg>) {
                return "ack";
            } else {
                return to_string(m.sealed0) + " " + to_string(m.sealed1);
            }
        },
        msg);
}

struct TranscriptEntry {
    std::string direction;  // "A->B" or "B->A"
    Tag tag;
    std::vector<std::uint8_t> frame;
    std::string decoded;
};

// Append-only protocol log in the owning role's script order.
struct Transcript {
    std::vector<TranscriptEntry> entries;

    void append(std::string direction, const Message& msg, std::vector<std::uint8_t> frame) {
        entries.push_back(TranscriptEntry{std::move(direction), tag_of(msg), std::move(frame), render(msg)});
    }

    // one record per line, stable field order, diff-friendly
    std::string to_jsonl() const {
        std::string out;
        for (const auto& e : entries) {
            nlohmann::ordered_json rec;
            rec["dir"] = e.direction;
            rec["tag"] = tag_name(e.tag);
            rec["frame"] = hex(e.frame);
            rec["decoded"] = e.decoded;
            out += rec.dump();
            out += '\n';
        }
        return out;
    }

    friend bool operator==(const Transcript& lhs, const Transcript& rhs) {
        if (lhs.entries.size() != rhs.entries.size()) return false;
        for (std::size_t i = 0; i < lhs.entries.size(); ++i) {
            if (lhs.entries[i].direction != rhs.entries[i].direction ||
                lhs.entries[i].frame != rhs.entries[i].frame)
                return false;
        }
        return true;
    }
};

}  // namespace ecot::wire
