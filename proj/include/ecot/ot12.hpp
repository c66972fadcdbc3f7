#pragma once

#include <array>
#include <optional>

#include "ecot/exchange.hpp"
#include "ecot/ot_rabin.hpp"

// Chosen 1-out-of-2 transfer: A binds secret 0 to P_1 and secret 1 to P_2;
// B commits to a branch by lifting x the corresponding way. Both branches
// run the key-transfer algebra in one message flight each direction; only
// the branch matching B's lift survives verification.

namespace ecot::ot12 {

struct Step1Msg {
    AffinePoint blind0;  // key_0 * P_1
    AffinePoint blind1;  // key_1 * P_2
    friend bool operator==(const Step1Msg&, const Step1Msg&) = default;
};

struct Step2Msg {
    AffinePoint receiver_blind;  // key_B * P_B
    AffinePoint masked_echo0;    // key_B * blind0 + R
    AffinePoint masked_echo1;    // key_B * blind1 + R   (same R, as specified)
    AffinePoint blinded_nonce;   // key_B * R
    friend bool operator==(const Step2Msg&, const Step2Msg&) = default;
};

struct Step4Msg {
    AffinePoint recombined0;
    AffinePoint key_envelope0;
    AffinePoint recombined1;
    AffinePoint key_envelope1;
    friend bool operator==(const Step4Msg&, const Step4Msg&) = default;
};

// Content-free: B signals its step-5 verification finished so A may deliver.
struct AckMsg {
    friend bool operator==(const AckMsg&, const AckMsg&) = default;
};

struct SecretsMsg {
    AffinePoint sealed0;  // encode(s_0) + key_0 * G
    AffinePoint sealed1;  // encode(s_1) + key_1 * G
    friend bool operator==(const SecretsMsg&, const SecretsMsg&) = default;
};

struct BranchResult {
    std::optional<Int> key;
    AffinePoint k;
    AffinePoint z;
    bool recovered() const { return key.has_value(); }
};

class Sender {
public:
    Sender(const SessionConfig& cfg, Int key0, Int key1, SecretBundle secret0, SecretBundle secret1)
        : curve_(cfg.curve),
          enc_(cfg.encoding()),
          pair_(cfg.xpair()),
          keys_{key0, key1},
          secrets_{std::move(secret0), std::move(secret1)} {
        if (key0 == key1)
            throw InvalidConfig("branch keys must differ (equal keys collapse to negated blinds)");
        if (key0 < 2 || key1 < 2) throw InvalidConfig("branch keys must be >= 2");
        key_points_ = {enc_.encode(key0), enc_.encode(key1)};
    }

    const AffinePoint& h1() const { return h_[0]; }
    const AffinePoint& h2() const { return h_[1]; }

    Step1Msg step1() {
        require_phase(Phase::Init, "step1");
        Step1Msg out{scalar_mul(curve_, keys_[0], pair_.p1), scalar_mul(curve_, keys_[1], pair_.p2)};
        rabin::detail::require_slot(curve_, out.blind0, "step-1 branch-0 blind");
        rabin::detail::require_slot(curve_, out.blind1, "step-1 branch-1 blind");
        phase_ = Phase::SentStep1;
        return out;
    }

    // Both branches, one code path; B's lift is invisible from here.
    Step4Msg step3_step4(const Step2Msg& msg) {
        require_phase(Phase::SentStep1, "step3_step4");
        rabin::detail::require_slot(curve_, msg.receiver_blind, "step-2 receiver blind");
        rabin::detail::require_slot(curve_, msg.masked_echo0, "step-2 masked echo 0");
        rabin::detail::require_slot(curve_, msg.masked_echo1, "step-2 masked echo 1");
        rabin::detail::require_slot(curve_, msg.blinded_nonce, "step-2 blinded nonce");

        Step4Msg out;
        const std::array<const AffinePoint*, 2> echoes{&msg.masked_echo0, &msg.masked_echo1};
        std::array<AffinePoint, 2> recombined, envelopes;
        for (int j = 0; j < 2; ++j) {
            AffinePoint echoed = scalar_mul(curve_, keys_[j], msg.receiver_blind);
            h_[j] = scalar_mul(curve_, keys_[j], sub(curve_, *echoes[j], echoed));
            recombined[j] = add(curve_, echoed, h_[j]);
            envelopes[j] = add(curve_, scalar_mul(curve_, keys_[j], msg.blinded_nonce), key_points_[j]);
            rabin::detail::require_slot(curve_, recombined[j], "step-4 recombined slot");
            rabin::detail::require_slot(curve_, envelopes[j], "step-4 key envelope");
        }
        out = Step4Msg{recombined[0], envelopes[0], recombined[1], envelopes[1]};
        phase_ = Phase::SentStep4;
        return out;
    }

    SecretsMsg deliver_secrets() {
        require_phase(Phase::SentStep4, "deliver_secrets");
        SecretsMsg out{exch::final_transfer(curve_, secrets_[0].secret_point, keys_[0]),
                       exch::final_transfer(curve_, secrets_[1].secret_point, keys_[1])};
        phase_ = Phase::Done;
        return out;
    }

private:
    enum class Phase { Init, SentStep1, SentStep4, Done };

    void require_phase(Phase want, const char* op) const {
        if (phase_ != want) throw PhaseError(std::string("ot12 sender: ") + op + " out of order");
    }

    CurveParams curve_;
    Encoding enc_;
    XPair pair_;
    std::array<Int, 2> keys_;
    std::array<SecretBundle, 2> secrets_;
    std::array<AffinePoint, 2> key_points_;
    std::array<AffinePoint, 2> h_;
    Phase phase_ = Phase::Init;
};

class Receiver {
public:
    Receiver(const SessionConfig& cfg, int choice, Int key)
        : curve_(cfg.curve), enc_(cfg.encoding()), pair_(cfg.xpair()), choice_(choice), key_(key) {
        if (choice != 0 && choice != 1) throw InvalidConfig("choice bit must be 0 or 1");
        if (key < 2) throw InvalidConfig("receiver key must be >= 2");
    }

    int choice() const { return choice_; }

    Step2Msg step2(const Step1Msg& msg, const AffinePoint& nonce_point) {
        require_phase(Phase::Init, "step2");
        rabin::detail::require_slot(curve_, msg.blind0, "step-1 branch-0 blind");
        rabin::detail::require_slot(curve_, msg.blind1, "step-1 branch-1 blind");
        rabin::detail::require_slot(curve_, nonce_point, "nonce point R");
        blinds_ = {msg.blind0, msg.blind1};

        AffinePoint own = choice_ == 0 ? pair_.p1 : pair_.p2;
        Step2Msg out{scalar_mul(curve_, key_, own),
                     add(curve_, scalar_mul(curve_, key_, msg.blind0), nonce_point),
                     add(curve_, scalar_mul(curve_, key_, msg.blind1), nonce_point),
                     scalar_mul(curve_, key_, nonce_point)};
        rabin::detail::require_slot(curve_, out.receiver_blind, "step-2 receiver blind");
        rabin::detail::require_slot(curve_, out.masked_echo0, "step-2 masked echo 0");
        rabin::detail::require_slot(curve_, out.masked_echo1, "step-2 masked echo 1");
        rabin::detail::require_slot(curve_, out.blinded_nonce, "step-2 blinded nonce");
        phase_ = Phase::SentStep2;
        return out;
    }

    Step2Msg step2(const Step1Msg& msg, Rng& rng) { return step2(msg, random_point(curve_, rng)); }

    // B consumes only its own branch's pair. A malformed chosen branch is a
    // protocol violation by A and throws.
    Int step5(const Step4Msg& msg) {
        require_phase(Phase::SentStep2, "step5");
        for (const auto* pt : {&msg.recombined0, &msg.key_envelope0, &msg.recombined1, &msg.key_envelope1})
            rabin::detail::require_slot(curve_, *pt, "step-4 slot");
        step4_ = msg;
        phase_ = Phase::Verified;
        BranchResult own = evaluate_branch(choice_);
        if (!own.recovered()) {
            phase_ = Phase::Failed;
            throw VerificationFailed("chosen branch did not verify");
        }
        recovered_key_ = *own.key;
        return recovered_key_;
    }

    // Diagnostics (test-only mode): evaluate either branch's pair.
    BranchResult probe_branch(int branch) const {
        if (phase_ != Phase::Verified && phase_ != Phase::Failed)
            throw PhaseError("ot12 receiver: probe before step5");
        return evaluate_branch(branch);
    }

    std::vector<std::uint8_t> unseal(const SecretsMsg& msg, std::size_t secret_len) {
        require_phase(Phase::Verified, "unseal");
        const AffinePoint& sealed = choice_ == 0 ? msg.sealed0 : msg.sealed1;
        rabin::detail::require_slot(curve_, sealed, "sealed secret");
        AffinePoint pt = exch::recover_secret(curve_, sealed, recovered_key_);
        phase_ = Phase::Done;
        return bytes_of_value(enc_.decode(pt), secret_len);
    }

private:
    enum class Phase { Init, SentStep2, Verified, Failed, Done };

    void require_phase(Phase want, const char* op) const {
        if (phase_ != want) throw PhaseError(std::string("ot12 receiver: ") + op + " out of order");
    }

    BranchResult evaluate_branch(int j) const {
        const AffinePoint& recombined = j == 0 ? step4_.recombined0 : step4_.recombined1;
        const AffinePoint& envelope = j == 0 ? step4_.key_envelope0 : step4_.key_envelope1;
        BranchResult out;
        out.k = sub(curve_, recombined, scalar_mul(curve_, key_, blinds_[j]));
        out.z = sub(curve_, envelope, scalar_mul(curve_, key_, out.k));
        if (out.z.is_identity()) return out;
        Int candidate = out.z.x() / enc_.kappa();
        if (candidate > enc_.max_value()) return out;
        if (scalar_mul(curve_, candidate, pair_.p1) == blinds_[j] ||
            scalar_mul(curve_, candidate, pair_.p2) == blinds_[j]) {
            out.key = candidate;
        }
        return out;
    }

    CurveParams curve_;
    Encoding enc_;
    XPair pair_;
    int choice_;
    Int key_;
    std::array<AffinePoint, 2> blinds_;
    Step4Msg step4_;
    Int recovered_key_ = 0;
    Phase phase_ = Phase::Init;
};

}  // namespace ecot::ot12
