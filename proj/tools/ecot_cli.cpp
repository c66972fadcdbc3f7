// Command-line front end: local demos, the two-process socket runner, the
// brute-force verification suite, and the pinned protocol vectors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "ecot/oracle.hpp"
#include "ecot/runner.hpp"
#include "ecot/socket.hpp"

namespace {

using namespace ecot;

struct CommonFlags {
    std::vector<Int> curve;  // p,a,b
    std::vector<Int> base;   // x,y
    Int base_order = 0;
    Int x_coord = -1;
    Int kappa = 0;
    std::size_t secret_len = 0;
    std::uint64_t seed = 0;
    bool seeded = false;
    std::string transcript_path;
};

void add_config_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--curve", f.curve, "curve as p,a,b")->delimiter(',')->expected(3);
    cmd->add_option("--base", f.base, "base point as x,y")->delimiter(',')->expected(2);
    cmd->add_option("--base-order", f.base_order, "order of the base point");
    cmd->add_option("--x-coord", f.x_coord, "shared session x-coordinate");
    cmd->add_option("--kappa", f.kappa, "point-encoding window width");
    cmd->add_option("--secret-len", f.secret_len, "secret length in bytes");
    auto* seed_opt = cmd->add_option("--seed", f.seed, "deterministic run seed");
    seed_opt->each([&f](const std::string&) { f.seeded = true; });
    cmd->add_option("--transcript", f.transcript_path, "write the session transcript (JSON lines)");
}

std::uint64_t effective_seed(const CommonFlags& f) {
    if (f.seeded) return f.seed;
    return std::random_device{}();
}

// Fill in anything the flags left open: preset parameters when the curve is
// one of the built-ins, otherwise brute-force derivation at desk scale.
SessionConfig build_config(const CommonFlags& f) {
    Int p = 23, a = 9, b = 21;
    if (!f.curve.empty()) {
        p = f.curve[0];
        a = f.curve[1];
        b = f.curve[2];
    }

    std::optional<CurveParams> curve;
    std::optional<SessionConfig> preset;
    for (const auto& candidate : {presets::session_e23(), presets::session_e1009(),
                                  presets::session_e10007(), presets::session_e1048583()}) {
        if (candidate.curve.p() == p && candidate.curve.a() == modmath::mod(a, p) &&
            candidate.curve.b() == modmath::mod(b, p)) {
            preset = candidate;
            curve = candidate.curve;
            break;
        }
    }

    if (!f.base.empty()) {
        AffinePoint g = AffinePoint::at(f.base[0], f.base[1]);
        Int order = f.base_order > 0 ? f.base_order : point_order(CurveParams(p, a, b), g);
        curve = CurveParams(p, a, b, g, order);
    } else if (!curve) {
        // no preset: enumerate and pick the first maximal-order point
        CurveParams bare(p, a, b);
        auto table = oracle::enumerate(bare);
        AffinePoint best;
        Int best_order = 0;
        for (const auto& pt : table.points) {
            if (pt.is_identity()) continue;
            Int ord = oracle::naive_order(table, pt);
            if (ord > best_order) {
                best_order = ord;
                best = pt;
            }
            if (best_order == table.order) break;
        }
        curve = CurveParams(p, a, b, best, best_order);
    }

    SessionConfig cfg{*curve, 0, 16, 1, {}};
    if (preset) cfg = *preset;
    if (!f.base.empty()) cfg.curve = *curve;

    if (f.x_coord >= 0) {
        cfg.x_coord = f.x_coord;
    } else if (!preset) {
        for (Int x = 0; x < cfg.curve.p(); ++x) {
            try {
                if (lift_x(cfg.curve, x)) {
                    cfg.x_coord = x;
                    break;
                }
            } catch (const DegenerateX&) {
            }
        }
    }

    if (f.kappa > 0) {
        cfg.kappa = f.kappa;
    } else if (!preset) {
        for (Int k : {16, 8, 4, 2}) {
            cfg.kappa = k;
            if (Encoding(cfg.curve, k).max_value() >= 3) break;
        }
    }
    if (f.secret_len > 0) cfg.secret_len = f.secret_len;

    Int byte_cap = cfg.secret_len < 8 ? (Int{1} << (8 * cfg.secret_len)) - 1 : 0;
    Encoding enc(cfg.curve, cfg.kappa);
    if (byte_cap > 0 && enc.max_value() < byte_cap && cfg.secret_len > 1)
        std::cerr << "note: only secrets up to " << enc.max_value() << " are encodable on this curve\n";

    cfg.mask_const = default_mask(cfg.secret_len);
    cfg.validate();
    return cfg;
}

void print_config(const SessionConfig& cfg) {
    std::cout << "curve E_" << cfg.curve.p() << "(" << cfg.curve.a() << "," << cfg.curve.b() << ")"
              << "  G=" << to_string(cfg.curve.base().value_or(AffinePoint::identity()))
              << " order=" << cfg.curve.base_order().value_or(0) << "  x=" << cfg.x_coord
              << "  kappa=" << cfg.kappa << "  secret-len=" << cfg.secret_len << "\n";
}

void print_transcript(const wire::Transcript& transcript) {
    for (const auto& e : transcript.entries)
        std::cout << "  " << e.direction << "  " << wire::tag_name(e.tag) << "  " << e.decoded << "\n";
}

void maybe_write_transcript(const CommonFlags& f, const wire::Transcript& transcript) {
    if (f.transcript_path.empty()) return;
    std::ofstream out(f.transcript_path);
    if (!out) throw Error("cannot open " + f.transcript_path);
    out << transcript.to_jsonl();
    std::cout << "transcript written to " << f.transcript_path << "\n";
}

std::string bytes_hex(const std::vector<std::uint8_t>& v) { return wire::hex(v); }

void print_exchange_outcome(const char* who, const exch::PartyOutcome& out) {
    std::cout << who << ": ";
    if (out.got_other)
        std::cout << "got peer secret " << bytes_hex(out.other_secret)
                  << (out.via_mask ? " (via mask recovery)" : "") << "\n";
    else
        std::cout << "did not learn the peer secret\n";
}

int cmd_demo_rabin(const CommonFlags& f, int paper_case) {
    SessionConfig cfg = build_config(f);
    print_config(cfg);
    std::uint64_t seed = effective_seed(f);
    std::cout << "seed " << seed << "\n";

    run::ScenarioOptions opts_a, opts_b;
    if (paper_case != 0) {
        if (cfg.curve.p() != 23 || cfg.x_coord != 7)
            throw InvalidConfig("--case expects the E_23(9,21) session with x = 7");
        opts_a = run::paper_case_a_options();
        opts_b = run::paper_case_b_options(paper_case);
    }
    auto res = run::run_local(cfg, run::Scenario::Rabin, seed, opts_a, opts_b);
    print_transcript(res.a.transcript);
    std::cout << "A sent key " << *res.a.sent_key << "\n";
    const auto& outcome = *res.b.rabin_outcome;
    std::cout << "B intermediates: K=" << to_string(outcome.k) << " Z=" << to_string(outcome.z) << "\n";
    if (outcome.recovered())
        std::cout << "B recovered the key: " << *outcome.key << "\n";
    else
        std::cout << "B did not recover the key\n";
    maybe_write_transcript(f, res.a.transcript);
    return 0;
}

int cmd_demo_exchange(const CommonFlags& f, bool cheat) {
    SessionConfig cfg = build_config(f);
    print_config(cfg);
    std::uint64_t seed = effective_seed(f);
    std::cout << "seed " << seed << (cheat ? "  (B withholds its final transfer)" : "") << "\n";

    auto scenario = cheat ? run::Scenario::ExchangeWithCheat : run::Scenario::Exchange;
    auto res = run::run_local(cfg, scenario, seed);
    print_transcript(res.a.transcript);
    std::cout << "secret A " << bytes_hex(res.a.own_secret) << ", secret B "
              << bytes_hex(res.b.own_secret) << "\n";
    print_exchange_outcome("A", *res.a.exchange_outcome);
    print_exchange_outcome("B", *res.b.exchange_outcome);
    maybe_write_transcript(f, res.a.transcript);
    return 0;
}

int cmd_demo_ot12(const CommonFlags& f, int choice) {
    SessionConfig cfg = build_config(f);
    print_config(cfg);
    std::uint64_t seed = effective_seed(f);
    std::cout << "seed " << seed << "\n";

    run::ScenarioOptions opts_b;
    opts_b.ot12_choice = choice;
    auto res = run::run_local(cfg, run::Scenario::Ot12, seed, {}, opts_b);
    print_transcript(res.a.transcript);
    std::cout << "A offered s0=" << bytes_hex(res.a.ot12_offered_secrets[0])
              << " s1=" << bytes_hex(res.a.ot12_offered_secrets[1]) << "\n";
    std::cout << "B chose c=" << res.b.ot12_choice << ", recovered key " << *res.b.ot12_key
              << ", secret " << bytes_hex(*res.b.ot12_secret) << "\n";
    maybe_write_transcript(f, res.a.transcript);
    return 0;
}

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

Endpoint parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) throw InvalidConfig("endpoint must be host:port");
    Endpoint ep;
    ep.host = text.substr(0, colon);
    ep.port = static_cast<std::uint16_t>(std::stoi(text.substr(colon + 1)));
    return ep;
}

run::Scenario parse_scenario(const std::string& name, bool cheat) {
    if (name == "rabin") return run::Scenario::Rabin;
    if (name == "exchange") return cheat ? run::Scenario::ExchangeWithCheat : run::Scenario::Exchange;
    if (name == "ot12") return run::Scenario::Ot12;
    throw InvalidConfig("scenario must be rabin, exchange, or ot12");
}

int cmd_socket(const CommonFlags& f, bool listen, const std::string& endpoint_text,
               const std::string& role_text, const std::string& scenario_text, bool cheat,
               int choice, int timeout_ms) {
    SessionConfig cfg = build_config(f);
    print_config(cfg);
    run::Role role = role_text == "B" ? run::Role::B : run::Role::A;
    run::Scenario scenario = parse_scenario(scenario_text, cheat);
    Endpoint ep = parse_endpoint(endpoint_text);

    std::unique_ptr<run::SocketChannel> channel;
    if (listen) {
        std::cout << "listening on " << ep.host << ":" << ep.port << "\n";
        channel = run::listen_once(ep.host, ep.port, timeout_ms);
    } else {
        std::cout << "connecting to " << ep.host << ":" << ep.port << "\n";
        channel = run::connect_to(ep.host, ep.port, timeout_ms);
    }

    std::uint64_t seed = effective_seed(f);
    Rng rng = run::role_rng(seed, role);
    run::ScenarioOptions opts;
    opts.ot12_choice = choice;
    auto res = run::run_scenario_role(cfg, role, scenario, *channel, rng, opts);
    print_transcript(res.transcript);

    switch (scenario) {
        case run::Scenario::Rabin:
            if (role == run::Role::A) {
                std::cout << "sent key " << *res.sent_key << " (delivery is oblivious to us)\n";
            } else if (res.rabin_outcome->recovered()) {
                std::cout << "recovered the key: " << *res.rabin_outcome->key << "\n";
            } else {
                std::cout << "did not recover the key\n";
            }
            break;
        case run::Scenario::Exchange:
        case run::Scenario::ExchangeWithCheat:
            std::cout << "own secret " << bytes_hex(res.own_secret) << "\n";
            print_exchange_outcome(role == run::Role::A ? "A" : "B", *res.exchange_outcome);
            break;
        case run::Scenario::Ot12:
            if (role == run::Role::A) {
                std::cout << "offered s0=" << bytes_hex(res.ot12_offered_secrets[0])
                          << " s1=" << bytes_hex(res.ot12_offered_secrets[1])
                          << " (B's choice is oblivious to us)\n";
            } else {
                std::cout << "chose c=" << res.ot12_choice << ", secret "
                          << bytes_hex(*res.ot12_secret) << "\n";
            }
            break;
    }
    maybe_write_transcript(f, res.transcript);
    return 0;
}

int cmd_oracle_verify(const CommonFlags& f) {
    SessionConfig cfg = build_config(f);
    print_config(cfg);
    Rng rng(effective_seed(f));
    auto report = oracle::verify_curve(cfg.curve, rng);
    bool all = true;
    for (const auto& check : report) {
        std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name;
        if (!check.detail.empty()) std::cout << "  [" << check.detail << "]";
        std::cout << "\n";
        all = all && check.pass;
    }
    std::cout << (all ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
    return all ? 0 : 1;
}

// The worked example on E_23(9,21), recomputed live through the oracle's
// independent arithmetic, plus the canonical frame bytes.
int cmd_vectors_emit() {
    CurveParams curve = presets::e23();
    auto table = oracle::enumerate(curve);
    auto mul = [&](Int k, AffinePoint pt) { return oracle::naive_mul(table, k, pt); };
    auto addp = [&](AffinePoint lhs, AffinePoint rhs) { return oracle::naive_add(curve, lhs, rhs); };
    auto subp = [&](AffinePoint lhs, AffinePoint rhs) { return oracle::naive_sub(curve, lhs, rhs); };

    const AffinePoint p1 = AffinePoint::at(7, 6), p2 = AffinePoint::at(7, 17);
    const AffinePoint r = AffinePoint::at(2, 1);
    const Int na = 5, nb = 3;
    Encoding enc(curve, 2);
    AffinePoint key_point = enc.encode(na);

    std::cout << "session: E_23(9,21), x = 7, P1 = (7,6), P2 = (7,17), kappa = 2\n";
    std::cout << "inputs: sender key 5 on P1, receiver key 3, nonce point R = (2,1)\n\n";

    for (int which : {1, 2}) {
        AffinePoint pa = p1;
        AffinePoint pb = which == 1 ? p1 : p2;
        AffinePoint s1 = mul(na, pa);
        AffinePoint m1 = mul(nb, pb);
        AffinePoint m2 = addp(mul(nb, s1), r);
        AffinePoint m3 = mul(nb, r);
        AffinePoint q = mul(na, subp(m2, mul(na, m1)));
        AffinePoint s4a = addp(mul(na, m1), q);
        AffinePoint s4b = addp(mul(na, m3), key_point);
        AffinePoint k = subp(s4a, mul(nb, s1));
        AffinePoint z = subp(s4b, mul(nb, k));
        std::cout << "case " << which << " (receiver on " << to_string(pb) << "):\n";
        std::cout << "  step 1: " << to_string(s1) << "\n";
        std::cout << "  step 2: " << to_string(m1) << " " << to_string(m2) << " " << to_string(m3) << "\n";
        std::cout << "  Q:      " << to_string(q) << "\n";
        std::cout << "  step 4: " << to_string(s4a) << " " << to_string(s4b) << "\n";
        std::cout << "  K:      " << to_string(k) << (which == 2 ? "   (recomputed, reduced)" : "") << "\n";
        std::cout << "  Z:      " << to_string(z) << (which == 2 ? "   (recomputed, reduced)" : "")
                  << (which == 1 ? "   = key point" : "   != key point") << "\n";
        std::cout << "  outcome: " << (z == key_point ? "recovered 5" : "not recovered") << "\n\n";
    }

    std::cout << "encoding table (kappa = 2): value -> point\n ";
    for (Int v = 0; v <= enc.max_value(); ++v)
        std::cout << " " << v << "->" << to_string(enc.encode(v));
    std::cout << "\n\n";

    auto frame = wire::encode_frame(rabin::Step1Msg{AffinePoint::at(11, 18)});
    std::cout << "step-1 frame for (11,18): " << wire::hex(frame) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oblivious transfer on desk-scale elliptic curves"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* demo = app.add_subcommand("demo", "run a scenario locally with both roles in-process");
    demo->require_subcommand(1);

    int paper_case = 0;
    auto* demo_rabin = demo->add_subcommand("rabin", "oblivious key transfer");
    add_config_flags(demo_rabin, flags);
    demo_rabin->add_option("--case", paper_case, "replay a worked case (1 or 2)")
        ->check(CLI::Range(1, 2));

    bool cheat = false;
    auto* demo_exchange = demo->add_subcommand("exchange", "mutual secret exchange");
    add_config_flags(demo_exchange, flags);
    demo_exchange->add_flag("--cheat", cheat, "B withholds its final transfer");

    int choice = -1;
    auto* demo_ot12 = demo->add_subcommand("ot12", "chosen 1-out-of-2 transfer");
    add_config_flags(demo_ot12, flags);
    demo_ot12->add_option("--choice", choice, "receiver choice bit")->check(CLI::Range(0, 1));

    std::string listen_ep, peer_ep, role_text = "A", scenario_text = "rabin";
    int timeout_ms = 30000;
    auto* serve = app.add_subcommand("serve", "listen for a peer and run one session");
    add_config_flags(serve, flags);
    serve->add_option("--listen", listen_ep, "host:port to bind")->required();
    serve->add_option("--role", role_text, "protocol role (A or B)")->check(CLI::IsMember({"A", "B"}));
    serve->add_option("--scenario", scenario_text, "rabin, exchange, or ot12");
    serve->add_flag("--cheat", cheat, "withhold the final transfer (exchange, role B)");
    serve->add_option("--choice", choice, "choice bit (ot12, role B)")->check(CLI::Range(0, 1));
    serve->add_option("--timeout", timeout_ms, "socket timeout in milliseconds");

    std::string connect_role = "B";
    auto* connect = app.add_subcommand("connect", "connect to a waiting peer and run one session");
    add_config_flags(connect, flags);
    connect->add_option("--peer", peer_ep, "host:port to reach")->required();
    connect->add_option("--role", connect_role, "protocol role (A or B)")->check(CLI::IsMember({"A", "B"}));
    connect->add_option("--scenario", scenario_text, "rabin, exchange, or ot12");
    connect->add_flag("--cheat", cheat, "withhold the final transfer (exchange, role B)");
    connect->add_option("--choice", choice, "choice bit (ot12, role B)")->check(CLI::Range(0, 1));
    connect->add_option("--timeout", timeout_ms, "socket timeout in milliseconds");

    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth");
    auto* verify = oracle_cmd->add_subcommand("verify", "check core arithmetic against the oracle");
    add_config_flags(verify, flags);

    auto* vectors = app.add_subcommand("vectors", "pinned protocol vectors");
    auto* emit = vectors->add_subcommand("emit", "print the worked-example vectors");

    CLI11_PARSE(app, argc, argv);

    try {
        if (demo_rabin->parsed()) return cmd_demo_rabin(flags, paper_case);
        if (demo_exchange->parsed()) return cmd_demo_exchange(flags, cheat);
        if (demo_ot12->parsed()) return cmd_demo_ot12(flags, choice);
        if (serve->parsed())
            return cmd_socket(flags, true, listen_ep, role_text, scenario_text, cheat, choice, timeout_ms);
        if (connect->parsed())
            return cmd_socket(flags, false, peer_ep, connect_role, scenario_text, cheat, choice,
                              timeout_ms);
        if (verify->parsed()) return cmd_oracle_verify(flags);
        if (emit->parsed()) return cmd_vectors_emit();
    } catch (const ecot::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
