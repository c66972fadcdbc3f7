#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "ecot/runner.hpp"
#include "ecot/socket.hpp"

using namespace ecot;

namespace {

AffinePoint pt(Int x, Int y) { return AffinePoint::at(x, y); }

std::vector<std::string> decoded_lines(const wire::Transcript& transcript) {
    std::vector<std::string> out;
    for (const auto& e : transcript.entries)
        out.push_back(std::string(wire::tag_name(e.tag)) + " " + e.direction + " " + e.decoded);
    return out;
}

}  // namespace

TEST(LocalRunner, PaperCaseOneTranscript) {
    auto cfg = presets::session_e23();
    auto res = run::run_local(cfg, run::Scenario::Rabin, 1, run::paper_case_a_options(),
                              run::paper_case_b_options(1));
    EXPECT_EQ(decoded_lines(res.a.transcript),
              (std::vector<std::string>{
                  "handshake A->B E_23(9,21) G=(2,1) n=33 x=7 kappa=2 len=1 M=a5",
                  "handshake B->A E_23(9,21) G=(2,1) n=33 x=7 kappa=2 len=1 M=a5",
                  "rabin_step1 A->B (11,18)",
                  "rabin_step2 B->A (1,10) (11,5) (14,19)",
                  "rabin_step4 A->B (15,9) (19,6)",
              }));
    ASSERT_TRUE(res.b.rabin_outcome.has_value());
    EXPECT_EQ(res.b.rabin_outcome->k, pt(7, 17));
    EXPECT_EQ(res.b.rabin_outcome->z, pt(11, 5));
    ASSERT_TRUE(res.b.rabin_outcome->recovered());
    EXPECT_EQ(*res.b.rabin_outcome->key, 5);
}

TEST(LocalRunner, PaperCaseTwoTranscript) {
    auto cfg = presets::session_e23();
    auto res = run::run_local(cfg, run::Scenario::Rabin, 1, run::paper_case_a_options(),
                              run::paper_case_b_options(2));
    auto lines = decoded_lines(res.a.transcript);
    EXPECT_EQ(lines[3], "rabin_step2 B->A (1,13) (11,5) (14,19)");
    EXPECT_EQ(lines[4], "rabin_step4 A->B (17,2) (19,6)");
    ASSERT_TRUE(res.b.rabin_outcome.has_value());
    EXPECT_EQ(res.b.rabin_outcome->k, pt(2, 22));
    EXPECT_EQ(res.b.rabin_outcome->z, pt(17, 21));
    EXPECT_FALSE(res.b.rabin_outcome->recovered());
}

TEST(LocalRunner, SameSeedSameBytes) {
    auto cfg = presets::session_e23();
    for (auto scenario : {run::Scenario::Rabin, run::Scenario::Exchange, run::Scenario::Ot12}) {
        auto lhs = run::run_local(cfg, scenario, 77);
        auto rhs = run::run_local(cfg, scenario, 77);
        EXPECT_TRUE(lhs.a.transcript == rhs.a.transcript) << scenario_name(scenario);
        EXPECT_TRUE(lhs.b.transcript == rhs.b.transcript) << scenario_name(scenario);
        auto other = run::run_local(cfg, scenario, 78);
        EXPECT_FALSE(lhs.a.transcript == other.a.transcript) << scenario_name(scenario);
    }
}

TEST(LocalRunner, CheatScenarioLeaksToA) {
    auto cfg = presets::session_e1048583();
    bool observed = false;
    for (std::uint64_t seed = 1; seed < 64 && !observed; ++seed) {
        auto res = run::run_local(cfg, run::Scenario::ExchangeWithCheat, seed);
        if (!res.b.recovered_peer_key) continue;
        observed = true;
        ASSERT_TRUE(res.a.exchange_outcome->via_mask);
        EXPECT_EQ(res.a.exchange_outcome->other_secret, res.b.own_secret);
        bool saw_abort = false;
        for (const auto& e : res.a.transcript.entries)
            if (e.tag == wire::Tag::Abort) saw_abort = true;
        EXPECT_TRUE(saw_abort);
    }
    EXPECT_TRUE(observed);
}

TEST(LocalRunner, Ot12DeliversTheChosenSecret) {
    auto cfg = presets::session_e23();
    for (int choice : {0, 1}) {
        run::ScenarioOptions opts_b;
        opts_b.ot12_choice = choice;
        auto res = run::run_local(cfg, run::Scenario::Ot12, 5 + choice, {}, opts_b);
        ASSERT_TRUE(res.b.ot12_secret.has_value());
        EXPECT_EQ(*res.b.ot12_secret, res.a.ot12_offered_secrets[static_cast<std::size_t>(choice)]);
    }
}

TEST(LocalRunner, MismatchedHandshakeAborts) {
    auto cfg_a = presets::session_e23();
    auto cfg_b = cfg_a;
    cfg_b.kappa = 4;  // would silently change every encoding
    EXPECT_THROW(run::run_local_pair(cfg_a, cfg_b, run::Scenario::Rabin, 3), HandshakeMismatch);
}

namespace {

struct SocketPairResult {
    run::RoleResult a;
    run::RoleResult b;
};

SocketPairResult run_socket_pair(const SessionConfig& cfg_a, const SessionConfig& cfg_b,
                                 run::Scenario scenario, std::uint64_t seed,
                                 run::ScenarioOptions opts_a = {}, run::ScenarioOptions opts_b = {}) {
    run::Listener listener("127.0.0.1", 0);
    auto serve = std::async(std::launch::async, [&]() -> run::RoleResult {
        auto channel = listener.accept_one(10000);
        Rng rng = run::role_rng(seed, run::Role::A);
        return run::run_scenario_role(cfg_a, run::Role::A, scenario, *channel, rng, opts_a);
    });

    Rng rng = run::role_rng(seed, run::Role::B);
    auto channel = run::connect_to("127.0.0.1", listener.port(), 10000);
    SocketPairResult out;
    out.b = run::run_scenario_role(cfg_b, run::Role::B, scenario, *channel, rng, opts_b);
    out.a = serve.get();
    return out;
}

}  // namespace

TEST(SocketRunner, Ot12OverLoopback) {
    auto cfg = presets::session_e23();
    run::ScenarioOptions opts_b;
    opts_b.ot12_choice = 1;
    auto res = run_socket_pair(cfg, cfg, run::Scenario::Ot12, 99, {}, opts_b);
    ASSERT_TRUE(res.b.ot12_secret.has_value());
    EXPECT_EQ(*res.b.ot12_secret, res.a.ot12_offered_secrets[1]);
    EXPECT_NE(*res.b.ot12_secret, res.a.ot12_offered_secrets[0]);
}

TEST(SocketRunner, TranscriptsMatchTheLocalRunner) {
    auto cfg = presets::session_e23();
    for (auto scenario : {run::Scenario::Rabin, run::Scenario::Exchange, run::Scenario::Ot12}) {
        auto local = run::run_local(cfg, scenario, 4242);
        auto socket = run_socket_pair(cfg, cfg, scenario, 4242);
        EXPECT_TRUE(local.a.transcript == socket.a.transcript) << scenario_name(scenario);
        EXPECT_TRUE(local.b.transcript == socket.b.transcript) << scenario_name(scenario);
    }
}

TEST(SocketRunner, HandshakeMismatchOnBothSides) {
    auto cfg_a = presets::session_e23();
    auto cfg_b = cfg_a;
    cfg_b.kappa = 4;

    run::Listener listener("127.0.0.1", 0);
    auto serve = std::async(std::launch::async, [&] {
        auto channel = listener.accept_one(10000);
        Rng rng = run::role_rng(17, run::Role::A);
        EXPECT_THROW(
            run::run_scenario_role(cfg_a, run::Role::A, run::Scenario::Rabin, *channel, rng),
            HandshakeMismatch);
    });
    auto channel = run::connect_to("127.0.0.1", listener.port(), 10000);
    Rng rng = run::role_rng(17, run::Role::B);
    EXPECT_THROW(run::run_scenario_role(cfg_b, run::Role::B, run::Scenario::Rabin, *channel, rng),
                 HandshakeMismatch);
    serve.get();
}

TEST(SocketRunner, DisconnectMidSessionFlushesPartialTranscript) {
    auto cfg = presets::session_e23();
    wire::Transcript partial;

    run::Listener listener("127.0.0.1", 0);
    auto serve = std::async(std::launch::async, [&] {
        auto channel = listener.accept_one(10000);
        Rng rng = run::role_rng(3, run::Role::A);
        EXPECT_THROW(run::run_scenario_role(cfg, run::Role::A, run::Scenario::Rabin, *channel, rng,
                                            {}, &partial),
                     ConnectionLost);
    });

    {
        // a peer that handshakes correctly, then vanishes
        auto channel = run::connect_to("127.0.0.1", listener.port(), 10000);
        channel->send_frame(wire::encode_frame(wire::HandshakeMsg::of(cfg)));
        (void)channel->recv_frame();
    }
    serve.get();
    ASSERT_GE(partial.entries.size(), 2u);  // its own handshake + the peer's
    EXPECT_EQ(partial.entries[0].tag, wire::Tag::Handshake);
}

TEST(SocketRunner, TimesOutOnASilentPeer) {
    auto cfg = presets::session_e23();
    run::Listener listener("127.0.0.1", 0);
    auto serve = std::async(std::launch::async, [&] {
        auto channel = listener.accept_one(10000);
        channel->set_timeout(300);
        Rng rng = run::role_rng(3, run::Role::A);
        EXPECT_THROW(run::run_scenario_role(cfg, run::Role::A, run::Scenario::Rabin, *channel, rng),
                     Timeout);
    });
    auto channel = run::connect_to("127.0.0.1", listener.port(), 10000);
    serve.get();  // peer connects but never sends a handshake
}
