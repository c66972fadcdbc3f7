#pragma once

#include <optional>

#include "ecot/session.hpp"

// Oblivious key transfer over one shared x-coordinate. Sender A holds a
// secret scalar key; receiver B ends up with it exactly when both parties
// happened to pick the same lift of x, which neither can influence or
// observe. Both roles are strict forward-only state machines.

namespace ecot::rabin {

enum class Choice : std::uint8_t { P1 = 0, P2 = 1 };

inline AffinePoint chosen_point(const XPair& pair, Choice c) {
    return c == Choice::P1 ? pair.p1 : pair.p2;
}

struct Step1Msg {
    AffinePoint sender_blind;  // key * P_A
    friend bool operator==(const Step1Msg&, const Step1Msg&) = default;
};

struct Step2Msg {
    AffinePoint receiver_blind;  // key_B * P_B
    AffinePoint masked_echo;     // key_B * sender_blind + R
    AffinePoint blinded_nonce;   // key_B * R
    friend bool operator==(const Step2Msg&, const Step2Msg&) = default;
};

struct Step4Msg {
    AffinePoint recombined;    // key_A * receiver_blind + Q
    AffinePoint key_envelope;  // key_A * blinded_nonce + encode(key_A)
    friend bool operator==(const Step4Msg&, const Step4Msg&) = default;
};

struct Outcome {
    std::optional<Int> key;  // sender key, when verification passed
    AffinePoint k;           // step-5a intermediate
    AffinePoint z;           // step-5b intermediate
    bool recovered() const { return key.has_value(); }
};

namespace detail {

inline void require_slot(const CurveParams& curve, const AffinePoint& pt, const char* what) {
    if (!is_on_curve(curve, pt)) throw InvalidPoint(std::string(what) + " is not on the curve");
    if (pt.is_identity()) throw DegenerateValue(std::string(what) + " is the identity");
}

}  // namespace detail

class Sender {
public:
    Sender(const SessionConfig& cfg, Choice choice, Int key)
        : curve_(cfg.curve), enc_(cfg.encoding()), pair_(cfg.xpair()), choice_(choice), key_(key) {
        if (key < 2) throw InvalidConfig("sender key must be >= 2");
        key_point_ = enc_.encode(key);  // OutOfRange / Unencodable propagate
    }

    Choice choice() const { return choice_; }
    Int key() const { return key_; }
    const AffinePoint& key_point() const { return key_point_; }

    // after step 3; exposed for transcript vectors
    const AffinePoint& q() const { return q_; }

    Step1Msg step1() {
        require_phase(Phase::Init, "step1");
        AffinePoint blind = scalar_mul(curve_, key_, chosen_point(pair_, choice_));
        detail::require_slot(curve_, blind, "step-1 point");
        phase_ = Phase::SentStep1;
        return Step1Msg{blind};
    }

    // One code path for both cases: A cannot tell which lift B used, and a
    // branch here would be a protocol violation.
    Step4Msg step3_step4(const Step2Msg& msg) {
        require_phase(Phase::SentStep1, "step3_step4");
        detail::require_slot(curve_, msg.receiver_blind, "step-2 receiver blind");
        detail::require_slot(curve_, msg.masked_echo, "step-2 masked echo");
        detail::require_slot(curve_, msg.blinded_nonce, "step-2 blinded nonce");

        AffinePoint echoed = scalar_mul(curve_, key_, msg.receiver_blind);
        q_ = scalar_mul(curve_, key_, sub(curve_, msg.masked_echo, echoed));
        Step4Msg out{add(curve_, echoed, q_),
                     add(curve_, scalar_mul(curve_, key_, msg.blinded_nonce), key_point_)};
        detail::require_slot(curve_, out.recombined, "step-4 recombined slot");
        detail::require_slot(curve_, out.key_envelope, "step-4 key envelope");
        phase_ = Phase::SentStep4;
        return out;
    }

private:
    enum class Phase { Init, SentStep1, SentStep4 };

    void require_phase(Phase want, const char* op) const {
        if (phase_ != want) throw PhaseError(std::string("sender: ") + op + " out of order");
    }

    CurveParams curve_;
    Encoding enc_;
    XPair pair_;
    Choice choice_;
    Int key_;
    AffinePoint key_point_;
    AffinePoint q_;
    Phase phase_ = Phase::Init;
};

class Receiver {
public:
    Receiver(const SessionConfig& cfg, Choice choice, Int key)
        : curve_(cfg.curve), enc_(cfg.encoding()), pair_(cfg.xpair()), choice_(choice), key_(key) {
        if (key < 2) throw InvalidConfig("receiver key must be >= 2");
    }

    Choice choice() const { return choice_; }
    const AffinePoint& nonce_point() const { return nonce_point_; }

    Step2Msg step2(const Step1Msg& msg, const AffinePoint& nonce_point) {
        require_phase(Phase::Init, "step2");
        detail::require_slot(curve_, msg.sender_blind, "step-1 point");
        detail::require_slot(curve_, nonce_point, "nonce point R");
        sender_blind_ = msg.sender_blind;
        nonce_point_ = nonce_point;

        Step2Msg out{scalar_mul(curve_, key_, chosen_point(pair_, choice_)),
                     add(curve_, scalar_mul(curve_, key_, msg.sender_blind), nonce_point),
                     scalar_mul(curve_, key_, nonce_point)};
        detail::require_slot(curve_, out.receiver_blind, "step-2 receiver blind");
        detail::require_slot(curve_, out.masked_echo, "step-2 masked echo");
        detail::require_slot(curve_, out.blinded_nonce, "step-2 blinded nonce");
        phase_ = Phase::SentStep2;
        return out;
    }

    Step2Msg step2(const Step1Msg& msg, Rng& rng) { return step2(msg, random_point(curve_, rng)); }

    // Recover K and Z, then decide by the point check: decode Z and accept
    // only if the candidate scalar reproduces the step-1 point from P_1 or
    // P_2. Decode failures mean NotRecovered, never a crash.
    Outcome step5(const Step4Msg& msg) {
        require_phase(Phase::SentStep2, "step5");
        detail::require_slot(curve_, msg.recombined, "step-4 recombined slot");
        detail::require_slot(curve_, msg.key_envelope, "step-4 key envelope");
        phase_ = Phase::Done;

        Outcome out;
        out.k = sub(curve_, msg.recombined, scalar_mul(curve_, key_, sender_blind_));
        out.z = sub(curve_, msg.key_envelope, scalar_mul(curve_, key_, out.k));
        if (out.z.is_identity()) return out;
        Int candidate = out.z.x() / enc_.kappa();
        if (candidate > enc_.max_value()) return out;
        if (scalar_mul(curve_, candidate, pair_.p1) == sender_blind_ ||
            scalar_mul(curve_, candidate, pair_.p2) == sender_blind_) {
            out.key = candidate;
        }
        return out;
    }

private:
    enum class Phase { Init, SentStep2, Done };

    void require_phase(Phase want, const char* op) const {
        if (phase_ != want) throw PhaseError(std::string("receiver: ") + op + " out of order");
    }

    CurveParams curve_;
    Encoding enc_;
    XPair pair_;
    Choice choice_;
    Int key_;
    AffinePoint sender_blind_;
    AffinePoint nonce_point_;
    Phase phase_ = Phase::Init;
};

// Scalars live in [2, n-1] against the base order when one is configured,
// else [2, p-1].
inline Int sample_scalar(const CurveParams& curve, Rng& rng) {
    Int upper = curve.base_order() ? *curve.base_order() - 1 : curve.p() - 1;
    if (upper < 2) throw InvalidConfig("scalar range is empty");
    return uniform_int(rng, 2, upper);
}

// Sender keys must additionally be encodable.
inline Int sample_encodable_key(const CurveParams& curve, const Encoding& enc, Rng& rng) {
    Int upper = curve.base_order() ? *curve.base_order() - 1 : curve.p() - 1;
    upper = std::min(upper, enc.max_value());
    if (upper < 2) throw InvalidConfig("no encodable scalar >= 2 exists");
    for (int i = 0; i < 1000; ++i) {
        Int k = uniform_int(rng, 2, upper);
        try {
            (void)enc.encode(k);
            return k;
        } catch (const Unencodable&) {
        }
    }
    throw Exhausted("sample_encodable_key: retry bound hit");
}

inline Choice sample_choice(Rng& rng) { return coin(rng) ? Choice::P2 : Choice::P1; }

}  // namespace ecot::rabin
