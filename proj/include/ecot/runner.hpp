#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "ecot/wire.hpp"

// Both transports run the same per-role scripts over a MessagePort; the only
// difference is the byte channel underneath (in-memory queues here, TCP in
// socket.hpp). Each role logs its own transcript in script order, so a local
// run and a socket run with the same seed produce identical transcripts.

namespace ecot::run {

enum class Role { A, B };
enum class Scenario { Rabin, Exchange, ExchangeWithCheat, Ot12 };

inline const char* role_name(Role r) { return r == Role::A ? "A" : "B"; }

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::Rabin: return "rabin";
        case Scenario::Exchange: return "exchange";
        case Scenario::ExchangeWithCheat: return "exchange-with-cheat";
        case Scenario::Ot12: return "ot12";
    }
    return "?";
}

struct ByteChannel {
    virtual void send_frame(const std::vector<std::uint8_t>& frame) = 0;
    virtual std::vector<std::uint8_t> recv_frame() = 0;
    virtual ~ByteChannel() = default;
};

namespace detail {

// signals "peer asked for a fresh round after a degenerate value"
struct RetryRound {};

class FrameQueue {
public:
    void push(std::vector<std::uint8_t> frame) {
        {
            std::lock_guard lock(mu_);
            if (closed_) throw ConnectionLost("peer endpoint closed");
            frames_.push_back(std::move(frame));
        }
        cv_.notify_one();
    }

    std::vector<std::uint8_t> pop() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return closed_ || !frames_.empty(); });
        if (frames_.empty()) throw ConnectionLost("peer endpoint closed");
        auto out = std::move(frames_.front());
        frames_.pop_front();
        return out;
    }

    void close() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<std::vector<std::uint8_t>> frames_;
    bool closed_ = false;
};

}  // namespace detail

class LocalByteChannel : public ByteChannel {
public:
    static std::pair<std::unique_ptr<LocalByteChannel>, std::unique_ptr<LocalByteChannel>> make_pair() {
        auto ab = std::make_shared<detail::FrameQueue>();
        auto ba = std::make_shared<detail::FrameQueue>();
        auto a = std::unique_ptr<LocalByteChannel>(new LocalByteChannel(ba, ab));
        auto b = std::unique_ptr<LocalByteChannel>(new LocalByteChannel(ab, ba));
        return {std::move(a), std::move(b)};
    }

    void send_frame(const std::vector<std::uint8_t>& frame) override { out_->push(frame); }
    std::vector<std::uint8_t> recv_frame() override { return in_->pop(); }
    ~LocalByteChannel() override {
        in_->close();
        out_->close();
    }

private:
    LocalByteChannel(std::shared_ptr<detail::FrameQueue> in, std::shared_ptr<detail::FrameQueue> out)
        : in_(std::move(in)), out_(std::move(out)) {}
    std::shared_ptr<detail::FrameQueue> in_;
    std::shared_ptr<detail::FrameQueue> out_;
};

// Frames every message, validates inbound points against the session curve,
// and logs both directions in this role's script order.
class MessagePort {
public:
    MessagePort(ByteChannel& channel, CurveParams curve, Role own)
        : channel_(channel), curve_(std::move(curve)), own_(own) {}

    void send(const wire::Message& msg) {
        auto frame = wire::encode_frame(msg);
        channel_.send_frame(frame);
        transcript_.append(own_ == Role::A ? "A->B" : "B->A", msg, std::move(frame));
    }

    wire::Message recv() {
        auto frame = channel_.recv_frame();
        wire::Message msg = wire::decode_frame(frame, curve_);
        transcript_.append(own_ == Role::A ? "B->A" : "A->B", msg, std::move(frame));
        return msg;
    }

    const wire::Transcript& transcript() const { return transcript_; }
    Role role() const { return own_; }

private:
    ByteChannel& channel_;
    CurveParams curve_;
    Role own_;
    wire::Transcript transcript_;
};

namespace detail {

template <typename T>
T expect(MessagePort& port) {
    wire::Message msg = port.recv();
    if (auto* abort = std::get_if<wire::AbortMsg>(&msg)) {
        if (abort->reason == wire::AbortReason::DegenerateRetry) throw RetryRound{};
        throw AbortedByPeer(std::string("peer aborted: ") + wire::render(msg));
    }
    if (auto* typed = std::get_if<T>(&msg)) return *typed;
    throw PhaseError(std::string("unexpected message ") + wire::tag_name(wire::tag_of(msg)));
}

}  // namespace detail

// Deterministic-test injection points. Anything unset is sampled.
struct ScenarioOptions {
    std::optional<rabin::Choice> a_choice;
    std::optional<rabin::Choice> b_choice;
    std::optional<Int> sender_key;
    std::optional<Int> receiver_key;
    std::optional<AffinePoint> nonce_point;

    std::optional<std::vector<std::uint8_t>> secret;  // this role's exchange secret

    int ot12_choice = -1;  // -1: sample
    std::optional<std::array<Int, 2>> ot12_keys;
    std::optional<std::array<std::vector<std::uint8_t>, 2>> ot12_secrets;
};

struct RoleResult {
    Role role = Role::A;
    Scenario scenario = Scenario::Rabin;
    wire::Transcript transcript;

    // rabin
    std::optional<Int> sent_key;                 // role A
    std::optional<rabin::Outcome> rabin_outcome;  // role B

    // exchange
    std::optional<exch::PartyOutcome> exchange_outcome;
    std::vector<std::uint8_t> own_secret;
    bool recovered_peer_key = false;

    // ot12
    int ot12_choice = -1;
    std::optional<Int> ot12_key;
    std::optional<std::vector<std::uint8_t>> ot12_secret;          // role B
    std::array<std::vector<std::uint8_t>, 2> ot12_offered_secrets;  // role A
};

namespace detail {

struct RabinSendEnd {
    Int key;
    rabin::Choice choice;
};

// One direction of the key transfer, sending side.
inline RabinSendEnd rabin_send(const SessionConfig& cfg, MessagePort& port, Rng& rng,
                               std::optional<rabin::Choice> choice_ov, std::optional<Int> key_ov) {
    Encoding enc = cfg.encoding();
    rabin::Choice choice = choice_ov ? *choice_ov : rabin::sample_choice(rng);
    Int key = key_ov ? *key_ov : rabin::sample_encodable_key(cfg.curve, enc, rng);
    rabin::Sender sender(cfg, choice, key);
    port.send(sender.step1());
    auto step2 = expect<rabin::Step2Msg>(port);
    port.send(sender.step3_step4(step2));
    return {key, choice};
}

// One direction of the key transfer, receiving side.
inline rabin::Outcome rabin_recv(const SessionConfig& cfg, MessagePort& port, Rng& rng,
                                 std::optional<rabin::Choice> choice_ov, std::optional<Int> key_ov,
                                 std::optional<AffinePoint> nonce_ov) {
    rabin::Choice choice = choice_ov ? *choice_ov : rabin::sample_choice(rng);
    Int key = key_ov ? *key_ov : rabin::sample_scalar(cfg.curve, rng);
    rabin::Receiver receiver(cfg, choice, key);
    auto step1 = expect<rabin::Step1Msg>(port);
    auto step2 = nonce_ov ? receiver.step2(step1, *nonce_ov) : receiver.step2(step1, rng);
    port.send(step2);
    auto step4 = expect<rabin::Step4Msg>(port);
    return receiver.step5(step4);
}

inline std::vector<std::uint8_t> sample_secret(const SessionConfig& cfg, Rng& rng) {
    Encoding enc = cfg.encoding();
    Int cap = enc.max_value();
    if (cfg.secret_len < 8) cap = std::min(cap, (Int{1} << (8 * cfg.secret_len)) - 1);
    for (int i = 0; i < 1000; ++i) {
        Int v = uniform_int(rng, 0, cap);
        try {
            (void)enc.encode(v);
            return bytes_of_value(v, cfg.secret_len);
        } catch (const Unencodable&) {
        }
    }
    throw Exhausted("sample_secret: retry bound hit");
}

inline exch::PartyOutcome exchange_role(const SessionConfig& cfg, Role role, MessagePort& port,
                                        Rng& rng, const SecretBundle& own, bool withhold_final,
                                        bool* recovered_flag) {
    // Two independent key transfers: A's key to B, then B's key to A. Fresh
    // choices each direction keep the two outcomes independent.
    RabinSendEnd own_key{};
    rabin::Outcome peer_key;
    if (role == Role::A) {
        own_key = rabin_send(cfg, port, rng, std::nullopt, std::nullopt);
        peer_key = rabin_recv(cfg, port, rng, std::nullopt, std::nullopt, std::nullopt);
    } else {
        peer_key = rabin_recv(cfg, port, rng, std::nullopt, std::nullopt, std::nullopt);
        own_key = rabin_send(cfg, port, rng, std::nullopt, std::nullopt);
    }
    bool knows = peer_key.recovered();
    if (recovered_flag) *recovered_flag = knows;

    // Masked secrets cross before either is consumed.
    exch::KnowledgeMask mask{cfg.mask_const, knows};
    port.send(wire::MaskedSecretMsg{exch::mask_secret(mask, own.secret)});
    auto masked_peer = expect<wire::MaskedSecretMsg>(port);
    if (masked_peer.body.size() != cfg.secret_len) throw LengthMismatch("masked secret length");

    // Final transfers, A first; a withholding party sends an abort instead.
    auto send_final = [&] {
        if (withhold_final) {
            port.send(wire::AbortMsg{wire::AbortReason::Withheld});
            return;
        }
        AffinePoint sealed = exch::final_transfer(cfg.curve, own.secret_point, own_key.key);
        if (sealed.is_identity()) throw DegenerateValue("final transfer sealed to identity");
        port.send(wire::FinalTransferMsg{sealed});
    };
    auto read_final = [&]() -> exch::PartyOutcome {
        wire::Message msg = port.recv();
        if (auto* abort = std::get_if<wire::AbortMsg>(&msg)) {
            if (abort->reason == wire::AbortReason::DegenerateRetry) throw RetryRound{};
            if (abort->reason == wire::AbortReason::Withheld) {
                // Withholding implies the peer could read our final transfer,
                // i.e. its mask was M; unmask its queued secret.
                exch::PartyOutcome out;
                out.got_other = true;
                out.via_mask = true;
                out.other_secret = exch::cheat_recover(masked_peer.body, cfg.mask_const);
                return out;
            }
            throw AbortedByPeer("peer aborted the final transfer");
        }
        auto* ft = std::get_if<wire::FinalTransferMsg>(&msg);
        if (!ft) throw PhaseError("expected a final transfer");
        exch::PartyOutcome out;
        if (knows) {
            Encoding enc = cfg.encoding();
            AffinePoint pt = exch::recover_secret(cfg.curve, ft->sealed, *peer_key.key);
            out.got_other = true;
            out.other_secret = bytes_of_value(enc.decode(pt), cfg.secret_len);
        }
        return out;
    };

    if (role == Role::A) {
        send_final();
        return read_final();
    }
    auto out = read_final();
    send_final();
    return out;
}

inline void ot12_role_a(const SessionConfig& cfg, MessagePort& port, Rng& rng,
                        const ScenarioOptions& opts, RoleResult& result) {
    Encoding enc = cfg.encoding();
    std::array<Int, 2> keys{};
    if (opts.ot12_keys) {
        keys = *opts.ot12_keys;
    } else {
        keys[0] = rabin::sample_encodable_key(cfg.curve, enc, rng);
        do {
            keys[1] = rabin::sample_encodable_key(cfg.curve, enc, rng);
        } while (keys[1] == keys[0]);
    }
    std::array<std::vector<std::uint8_t>, 2> secrets;
    if (opts.ot12_secrets) {
        secrets = *opts.ot12_secrets;
    } else {
        secrets = {sample_secret(cfg, rng), sample_secret(cfg, rng)};
    }
    ot12::Sender sender(cfg, keys[0], keys[1],
                        SecretBundle::from_bytes(enc, secrets[0]),
                        SecretBundle::from_bytes(enc, secrets[1]));
    port.send(sender.step1());
    auto step2 = expect<ot12::Step2Msg>(port);
    port.send(sender.step3_step4(step2));
    (void)expect<ot12::AckMsg>(port);
    port.send(sender.deliver_secrets());
    result.ot12_offered_secrets = secrets;
}

inline void ot12_role_b(const SessionConfig& cfg, MessagePort& port, Rng& rng,
                        const ScenarioOptions& opts, RoleResult& result) {
    int choice = opts.ot12_choice >= 0 ? opts.ot12_choice : (coin(rng) ? 1 : 0);
    Int key = opts.receiver_key ? *opts.receiver_key : rabin::sample_scalar(cfg.curve, rng);
    ot12::Receiver receiver(cfg, choice, key);
    auto step1 = expect<ot12::Step1Msg>(port);
    auto step2 = opts.nonce_point ? receiver.step2(step1, *opts.nonce_point) : receiver.step2(step1, rng);
    port.send(step2);
    auto step4 = expect<ot12::Step4Msg>(port);
    Int recovered = receiver.step5(step4);
    port.send(ot12::AckMsg{});
    auto secrets = expect<ot12::SecretsMsg>(port);
    result.ot12_choice = choice;
    result.ot12_key = recovered;
    result.ot12_secret = receiver.unseal(secrets, cfg.secret_len);
}

}  // namespace detail

// Runs one role of a scenario over an established channel: handshake, then
// the protocol, restarting the round with fresh randomness whenever either
// side hits a degenerate (identity) value. On error the partial transcript
// is flushed into *partial_out when given.
inline RoleResult run_scenario_role(const SessionConfig& cfg, Role role, Scenario scenario,
                                    ByteChannel& channel, Rng& rng, ScenarioOptions opts = {},
                                    wire::Transcript* partial_out = nullptr) {
    cfg.validate();
    MessagePort port(channel, cfg.curve, role);
    RoleResult result;
    result.role = role;
    result.scenario = scenario;

    try {
        wire::HandshakeMsg own_hs = wire::HandshakeMsg::of(cfg);
        port.send(own_hs);
        wire::Message peer_msg = port.recv();
        auto* peer_hs = std::get_if<wire::HandshakeMsg>(&peer_msg);
        if (!peer_hs) throw HandshakeMismatch("peer did not open with a handshake");
        if (!(*peer_hs == own_hs))
            throw HandshakeMismatch("session parameters disagree: " + wire::render(peer_msg));

        bool cheat = scenario == Scenario::ExchangeWithCheat && role == Role::B;
        if (scenario == Scenario::Exchange || scenario == Scenario::ExchangeWithCheat) {
            result.own_secret = opts.secret ? *opts.secret : detail::sample_secret(cfg, rng);
        }

        constexpr int kMaxRounds = 64;
        for (int round = 0; round < kMaxRounds; ++round) {
            try {
                switch (scenario) {
                    case Scenario::Rabin:
                        if (role == Role::A) {
                            auto end =
                                detail::rabin_send(cfg, port, rng, opts.a_choice, opts.sender_key);
                            result.sent_key = end.key;
                        } else {
                            result.rabin_outcome = detail::rabin_recv(
                                cfg, port, rng, opts.b_choice, opts.receiver_key, opts.nonce_point);
                        }
                        break;
                    case Scenario::Exchange:
                    case Scenario::ExchangeWithCheat: {
                        Encoding enc = cfg.encoding();
                        auto bundle = SecretBundle::from_bytes(enc, result.own_secret);
                        result.exchange_outcome = detail::exchange_role(
                            cfg, role, port, rng, bundle, cheat, &result.recovered_peer_key);
                        break;
                    }
                    case Scenario::Ot12:
                        if (role == Role::A)
                            detail::ot12_role_a(cfg, port, rng, opts, result);
                        else
                            detail::ot12_role_b(cfg, port, rng, opts, result);
                        break;
                }
                result.transcript = port.transcript();
                if (partial_out) *partial_out = result.transcript;
                return result;
            } catch (const DegenerateValue&) {
                port.send(wire::AbortMsg{wire::AbortReason::DegenerateRetry});
            } catch (const detail::RetryRound&) {
            }
        }
        throw Exhausted("scenario kept hitting degenerate values");
    } catch (...) {
        if (partial_out) *partial_out = port.transcript();
        throw;
    }
}

struct LocalRunResult {
    RoleResult a;
    RoleResult b;
};

inline Rng role_rng(std::uint64_t seed, Role role) {
    // distinct deterministic streams per role; the socket runner derives the
    // same ones so transcripts line up across transports
    return Rng(seed * 0x9e3779b97f4a7c15ULL + (role == Role::A ? 1 : 2));
}

// Both roles in one process over an in-memory channel, all randomness
// derived from the seed.
inline LocalRunResult run_local_pair(const SessionConfig& cfg_a, const SessionConfig& cfg_b,
                                     Scenario scenario, std::uint64_t seed,
                                     const ScenarioOptions& opts_a = {},
                                     const ScenarioOptions& opts_b = {}) {
    auto [chan_a, chan_b] = LocalByteChannel::make_pair();
    LocalRunResult result;
    std::exception_ptr b_error;

    std::thread b_thread([&] {
        try {
            Rng rng = role_rng(seed, Role::B);
            result.b = run_scenario_role(cfg_b, Role::B, scenario, *chan_b, rng, opts_b);
        } catch (...) {
            b_error = std::current_exception();
        }
        chan_b.reset();  // unblock A if B bailed early
    });

    std::exception_ptr a_error;
    try {
        Rng rng = role_rng(seed, Role::A);
        result.a = run_scenario_role(cfg_a, Role::A, scenario, *chan_a, rng, opts_a);
    } catch (...) {
        a_error = std::current_exception();
    }
    chan_a.reset();
    b_thread.join();

    if (a_error) std::rethrow_exception(a_error);
    if (b_error) std::rethrow_exception(b_error);
    return result;
}

inline LocalRunResult run_local(const SessionConfig& cfg, Scenario scenario, std::uint64_t seed,
                                const ScenarioOptions& opts_a = {}, const ScenarioOptions& opts_b = {}) {
    return run_local_pair(cfg, cfg, scenario, seed, opts_a, opts_b);
}

// The paper's two worked runs: n_A = 5, n_B = 3, R = (2,1), A on (7,6);
// case 1 has B on (7,6), case 2 on (7,17). Valid on the E_23(9,21) session.
inline ScenarioOptions paper_case_b_options(int which) {
    if (which != 1 && which != 2) throw InvalidConfig("case must be 1 or 2");
    ScenarioOptions opts;
    opts.b_choice = which == 1 ? rabin::Choice::P1 : rabin::Choice::P2;
    opts.receiver_key = 3;
    opts.nonce_point = AffinePoint::at(2, 1);
    return opts;
}

inline ScenarioOptions paper_case_a_options() {
    ScenarioOptions opts;
    opts.a_choice = rabin::Choice::P1;
    opts.sender_key = 5;
    return opts;
}

}  // namespace ecot::run

namespace ecot::exch {

// Full mutual exchange with both parties in-process; per-party inputs are
// optional (sampled when absent). The cheat flag makes B withhold its final
// transfer.
inline ExchangeResult run_exchange(const SessionConfig& cfg, std::uint64_t seed,
                                   std::optional<std::vector<std::uint8_t>> secret_a = std::nullopt,
                                   std::optional<std::vector<std::uint8_t>> secret_b = std::nullopt,
                                   bool b_withholds = false) {
    run::ScenarioOptions opts_a, opts_b;
    opts_a.secret = std::move(secret_a);
    opts_b.secret = std::move(secret_b);
    auto scenario = b_withholds ? run::Scenario::ExchangeWithCheat : run::Scenario::Exchange;
    auto local = run::run_local(cfg, scenario, seed, opts_a, opts_b);
    ExchangeResult out;
    out.a = *local.a.exchange_outcome;
    out.b = *local.b.exchange_outcome;
    out.secret_a = local.a.own_secret;
    out.secret_b = local.b.own_secret;
    out.a_recovered_peer_key = local.a.recovered_peer_key;
    out.b_recovered_peer_key = local.b.recovered_peer_key;
    return out;
}

}  // namespace ecot::exch
