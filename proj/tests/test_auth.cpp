// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "rffi/auth.hpp"
#include "rffi/errors.hpp"

using namespace rffi;
using namespace rffi::auth;

namespace {

phy::LinkSession make_session(int wifi_channel, std::uint64_t budget_seed) {
    phy::LinkSession s;
    s.surface = surface::default_surface();
    s.wifi_channel = wifi_channel;
    const double center = wifi_channel_center_hz(wifi_channel);
    s.cv = surface::channel_select_cv(s.surface, center, surface::kSvRange / 2);
    s.grid = csi_grid(center);
    s.pilot = phy::PilotSymbol::constant(s.grid.size());
    phy::apply_link_budget(s, phy::LinkBudget{}, RngStream(budget_seed));
    return s;
}

std::vector<surface::ControlCode> spread_codes(const surface::Surface& s, int n) {
    std::vector<surface::ControlCode> codes;
    const int cells = s.cell_count();
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd sv = Eigen::VectorXd::Zero(cells);
        const int cell = k % cells;
        const int tier = k / cells;
        sv[cell] = surface::kSvStep * static_cast<double>(surface::kSvLevels - 1 - 8 * tier);
        codes.push_back(surface::ControlCode{0.0, sv});
    }
    return codes;
}

struct SimSetup {
    phy::LinkSession session;
    std::vector<surface::ControlCode> codes;
    std::uint64_t session_seed;

    phy::Dataset enroll_data(int packets = 30) const {
        return phy::generate_dataset(session, codes, packets, RngStream(session_seed));
    }
    Eigen::VectorXcd packet(int code_idx, std::uint64_t packet_id) const {
        return phy::simulate_packet(session, codes[static_cast<std::size_t>(code_idx)],
                                    RngStream(session_seed), packet_id);
    }
};

SimSetup make_setup(std::uint64_t seed, int n_codes = 6, int wifi_channel = 5) {
    SimSetup setup{make_session(wifi_channel, seed), {}, seed};
    setup.codes = spread_codes(setup.session.surface, n_codes);
    return setup;
}

void check_transcript(const ProtocolOutcome& out) {
    REQUIRE(!out.transcript.empty());
    if (out.accepted)
        CHECK(out.transcript.back().kind == AuthMessage::Kind::ack);
    else
        CHECK(out.transcript.back().kind == AuthMessage::Kind::reject);
}

} // namespace

TEST_CASE("enroll and authenticate a fresh packet of an enrolled code") {
    const auto setup = make_setup(1001);
    Server server;
    const auto creds = server.enroll("node-a", setup.enroll_data());

    const auto outcome = server.authenticate_p1(setup.packet(2, 7), "node-a");
    CHECK(outcome.accepted);
    CHECK(outcome.score >= server.config().probability_threshold);
    REQUIRE(outcome.matched_labels.size() == 1);
    CHECK(outcome.matched_labels[0] == 2);
    check_transcript(outcome);

    // the node can verify the final ack against its provisioned digest
    CHECK(verify_server_hash(creds.server_digest, outcome.transcript.back()));
}

TEST_CASE("enrollment rejects empty datasets and duplicate device ids") {
    const auto setup = make_setup(1002);
    Server server;
    phy::Dataset empty;
    empty.subcarriers = 30;
    CHECK_THROWS_AS(server.enroll("node-a", empty), DataError);

    server.enroll("node-a", setup.enroll_data());
    CHECK_THROWS_AS(server.enroll("node-a", setup.enroll_data()), ConfigError);
}

TEST_CASE("two devices with disjoint codes are both retrievable") {
    const auto setup_a = make_setup(1003, 4);
    auto setup_b = make_setup(1004, 4);
    setup_b.codes = spread_codes(setup_b.session.surface, 8);
    setup_b.codes.erase(setup_b.codes.begin(), setup_b.codes.begin() + 4); // different cells

    Server server;
    server.enroll("node-a", setup_a.enroll_data());
    server.enroll("node-b", setup_b.enroll_data());

    const auto* a = server.find_device("node-a");
    const auto* b = server.find_device("node-b");
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    CHECK(a->enrolled_labels == std::vector<std::uint32_t>{0, 1, 2, 3});
    CHECK(b->enrolled_labels == std::vector<std::uint32_t>{4, 5, 6, 7});
    CHECK(server.find_device("node-c") == nullptr);
}

TEST_CASE("protocol 1 rejects unknown devices regardless of signature") {
    const auto setup = make_setup(1005);
    Server server;
    const auto before = server.authenticate_p1(setup.packet(0, 1), "ghost");
    CHECK_FALSE(before.accepted);
    check_transcript(before);

    server.enroll("node-a", setup.enroll_data());
    const auto outcome = server.authenticate_p1(setup.packet(0, 2), "ghost");
    CHECK_FALSE(outcome.accepted);
    CHECK(outcome.transcript.back().reason == "unknown device");
    check_transcript(outcome);

    // no protocol path accepts an unregistered device id
    std::vector<Eigen::VectorXcd> seq = {setup.packet(0, 3), setup.packet(1, 4), setup.packet(2, 5)};
    const auto p2 = server.authenticate_p2(seq, "ghost", Digest256{});
    CHECK_FALSE(p2.accepted);
    check_transcript(p2);
    const auto p3 = server.authenticate_p3({{5, setup.packet(0, 6)}}, "ghost");
    CHECK_FALSE(p3.accepted);
    check_transcript(p3);
}

TEST_CASE("protocol 1 accepts enrolled signatures with high probability") {
    const auto setup = make_setup(1006);
    Server server;
    server.enroll("node-a", setup.enroll_data());
    int accepted = 0;
    for (int t = 0; t < 100; ++t) {
        const auto out = server.authenticate_p1(setup.packet(t % 6, 100 + static_cast<std::uint64_t>(t)),
                                                "node-a");
        accepted += out.accepted ? 1 : 0;
        check_transcript(out);
    }
    CHECK(accepted >= 95);
}

TEST_CASE("protocol 1 rejects another device's signature by label mismatch") {
    const auto setup_a = make_setup(1007, 4);
    auto setup_b = make_setup(1007, 4); // same channel, different codes
    setup_b.codes = spread_codes(setup_b.session.surface, 8);
    setup_b.codes.erase(setup_b.codes.begin(), setup_b.codes.begin() + 4);

    Server server;
    server.enroll("node-a", setup_a.enroll_data());
    server.enroll("node-b", setup_b.enroll_data());

    // node-b's physical signature presented under node-a's identity
    const auto outcome = server.authenticate_p1(setup_b.packet(1, 9), "node-a");
    CHECK_FALSE(outcome.accepted);
    check_transcript(outcome);
}

TEST_CASE("protocol 2 accepts all-correct sequences and rejects any mismatch") {
    const auto setup = make_setup(1008);
    Server server;
    const auto creds = server.enroll("node-a", setup.enroll_data());
    const int n = server.config().protocol2_n;

    std::vector<Eigen::VectorXcd> seq;
    for (int i = 0; i < n; ++i)
        seq.push_back(setup.packet(i, 200 + static_cast<std::uint64_t>(i)));
    const auto ok = server.authenticate_p2(seq, "node-a", creds.server_digest);
    CHECK(ok.accepted);
    CHECK(ok.matched_labels == std::vector<std::uint32_t>{0, 1, 2});
    check_transcript(ok);

    // one wrong signature in the sequence: all-match rule rejects
    auto bad = seq;
    bad[1] = setup.packet(5, 300);
    const auto rejected = server.authenticate_p2(bad, "node-a", creds.server_digest);
    CHECK_FALSE(rejected.accepted);
    check_transcript(rejected);

    // replaying one packet for distinct designated labels cannot pass
    std::vector<Eigen::VectorXcd> replay(static_cast<std::size_t>(n), seq[0]);
    const auto replayed = server.authenticate_p2(replay, "node-a", creds.server_digest);
    CHECK_FALSE(replayed.accepted);
    check_transcript(replayed);
}

TEST_CASE("protocol 2 aborts on a wrong server digest") {
    const auto setup = make_setup(1009);
    Server server;
    server.enroll("node-a", setup.enroll_data());
    Digest256 wrong{};
    wrong[0] = 0xff;
    std::vector<Eigen::VectorXcd> seq;
    for (int i = 0; i < server.config().protocol2_n; ++i)
        seq.push_back(setup.packet(i, 400 + static_cast<std::uint64_t>(i)));
    const auto out = server.authenticate_p2(seq, "node-a", wrong);
    CHECK_FALSE(out.accepted);
    CHECK(out.transcript.back().reason == "protocol violation");
    check_transcript(out);
}

TEST_CASE("protocol 2 acceptance implies protocol 1 acceptance on the first packet") {
    const auto setup = make_setup(1010);
    Server server;
    const auto creds = server.enroll("node-a", setup.enroll_data());
    const int n = server.config().protocol2_n;

    int p2_accepts = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Eigen::VectorXcd> seq;
        for (int i = 0; i < n; ++i)
            seq.push_back(setup.packet(i, 1000 + static_cast<std::uint64_t>(trial) * 10 +
                                              static_cast<std::uint64_t>(i)));
        const auto p2 = server.authenticate_p2(seq, "node-a", creds.server_digest);
        if (p2.accepted) {
            ++p2_accepts;
            const auto p1 = server.authenticate_p1(seq[0], "node-a");
            CHECK(p1.accepted);
        }
    }
    CHECK(p2_accepts > 150); // the rule is stricter but not vacuous
}

TEST_CASE("protocol 3 distinguishes the same code across channels") {
    // one fixed code seen on two channels; enrollment covers both
    const int channels[2] = {1, 5};
    SimSetup per_channel[2] = {make_setup(1011, 4, channels[0]), make_setup(1012, 4, channels[1])};

    phy::Dataset merged;
    merged.subcarriers = 30;
    merged.seed = 1011;
    const int n_codes = 4;
    for (int c = 0; c < 2; ++c) {
        auto ds = per_channel[c].enroll_data();
        for (auto& r : ds.records) {
            r.code_label += static_cast<std::uint32_t>(c * n_codes);
            merged.records.push_back(r);
        }
    }
    merged.validate();

    Server server;
    server.enroll("node-a", merged);
    const auto* record = server.find_device("node-a");
    REQUIRE(record != nullptr);
    CHECK(record->allowed_channels == std::vector<std::uint32_t>{1, 5});

    // the same code index classifies to a different class per channel
    const int code_idx = 2;
    const auto d1 = server.model().classify_csi(
        phy::estimate_csi(per_channel[0].packet(code_idx, 11), server.pilot()));
    const auto d5 = server.model().classify_csi(
        phy::estimate_csi(per_channel[1].packet(code_idx, 12), server.pilot()));
    CHECK(d1.label == code_idx);
    CHECK(d5.label == code_idx + n_codes);
    CHECK(d1.label != d5.label);

    std::map<std::uint32_t, Eigen::VectorXcd> rx;
    rx[1] = per_channel[0].packet(0, 21);
    rx[5] = per_channel[1].packet(0, 22);
    const auto ok = server.authenticate_p3(rx, "node-a");
    CHECK(ok.accepted);
    CHECK(ok.matched_labels == std::vector<std::uint32_t>{0, 4});
    check_transcript(ok);

    // wrong code on one channel
    rx[5] = per_channel[1].packet(3, 23);
    const auto bad = server.authenticate_p3(rx, "node-a");
    CHECK_FALSE(bad.accepted);
    check_transcript(bad);

    // missing channel
    rx.erase(5);
    const auto incomplete = server.authenticate_p3(rx, "node-a");
    CHECK_FALSE(incomplete.accepted);
    CHECK(incomplete.transcript.back().reason.find("incomplete") != std::string::npos);
    check_transcript(incomplete);
}

TEST_CASE("fingerprint hash is deterministic and binds the label set") {
    DeviceRecord r;
    r.dev_id = "node-a";
    r.enrolled_labels = {0, 1, 2};
    r.nonce = 42;
    const auto d1 = fingerprint_hash(r);
    const auto d2 = fingerprint_hash(r);
    CHECK(d1 == d2);

    DeviceRecord changed = r;
    changed.enrolled_labels = {0, 1, 3};
    CHECK(fingerprint_hash(changed) != d1);

    DeviceRecord renonced = r;
    renonced.nonce = 43;
    CHECK(fingerprint_hash(renonced) != d1);

    // label order does not matter (canonical encoding sorts)
    DeviceRecord shuffled = r;
    shuffled.enrolled_labels = {2, 0, 1};
    CHECK(fingerprint_hash(shuffled) == d1);

    const auto ack = AuthMessage::ack_msg("node-a", d1);
    CHECK(verify_server_hash(d1, ack));
    CHECK_FALSE(verify_server_hash(fingerprint_hash(renonced), ack));
}

TEST_CASE("auth messages survive the wire round trip") {
    RngStream rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        AuthMessage m;
        switch (rng.uniform_index(4)) {
        case 0:
            m = AuthMessage::pilot_req("dev-" + std::to_string(trial));
            break;
        case 1: {
            Eigen::VectorXcf csi(5 + static_cast<Eigen::Index>(rng.uniform_index(8)));
            for (Eigen::Index j = 0; j < csi.size(); ++j)
                m.inj_c_est = csi;
            for (Eigen::Index j = 0; j < csi.size(); ++j)
                csi[j] = std::complex<float>(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()));
            m = AuthMessage::a_req("dev", csi);
            break;
        }
        case 2: {
            Digest256 d{};
            for (auto& b : d)
                b = static_cast<std::uint8_t>(rng.uniform_index(256));
            m = AuthMessage::ack_msg("dev", d);
            break;
        }
        default:
            m = AuthMessage::reject("reason " + std::to_string(trial));
            break;
        }
        const auto bytes = m.encode();
        const auto back = AuthMessage::decode(std::span<const std::uint8_t>(bytes.data(), bytes.size()));
        CHECK(back.kind == m.kind);
        CHECK(back.dev_id == m.dev_id);
        CHECK(back.reason == m.reason);
        CHECK(back.fp_hash == m.fp_hash);
        CHECK(back.inj_c_est == m.inj_c_est);

        // truncation names the offset
        if (bytes.size() > 2) {
            auto cut = bytes;
            cut.resize(cut.size() / 2);
            CHECK_THROWS_AS(AuthMessage::decode(std::span<const std::uint8_t>(cut.data(), cut.size())),
                            DataError);
        }
    }
}

TEST_CASE("enrollment database serializes the records") {
    const auto setup = make_setup(1013, 4);
    Server server;
    server.enroll("node-a", setup.enroll_data());
    const auto j = server.database_json();
    REQUIRE(j.at("devices").size() == 1);
    CHECK(j.at("devices")[0].at("dev_id") == "node-a");
    CHECK(j.at("devices")[0].at("enrolled_labels").size() == 4);
    CHECK(j.at("devices")[0].at("fp_digest").get<std::string>().size() == 64);
}
