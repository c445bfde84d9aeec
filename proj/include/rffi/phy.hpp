// SPDX-License-Identifier: Apache-2.0
//
// rffi: metasurface fingerprint injection and authentication simulator
// Copyright (C) 2026 the rffi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef RFFI_PHY_HPP
#define RFFI_PHY_HPP

#include "rffi/channel.hpp"
#include "rffi/dataset.hpp"
#include "rffi/rng.hpp"
#include "rffi/surface.hpp"
#include "rffi/types.hpp"

namespace rffi::phy {

/// Known pilot with unit average power and no zero entries.
struct PilotSymbol {
    Eigen::VectorXcd values;

    static PilotSymbol constant(Eigen::Index n);
    static PilotSymbol qpsk(Eigen::Index n, RngStream rng);
    void validate() const;
};

/// Y_j = SH_j X_j + eta_j with circularly-symmetric complex Gaussian noise
/// of per-subcarrier power noise_power.
Eigen::VectorXcd transmit(const PilotSymbol& pilot, const FrequencyResponse& injected, double noise_power,
                          RngStream& rng);

/// Single-snapshot least-squares estimate Y_j / X_j. The per-packet noise is
/// unknown at the receiver, so it stays in the estimate as estimation error.
Eigen::VectorXcd estimate_csi(const Eigen::VectorXcd& received, const PilotSymbol& pilot);

/// Everything a transmission session needs: the device, the propagation
/// scenario, the operating channel and the pilot.
struct LinkSession {
    surface::Surface surface;
    channel::ScenarioGeometry geometry;
    channel::ChannelParams params;
    double cv = 0.0;          // channel-select voltage for the session
    int wifi_channel = 5;     // reported channel index
    Eigen::VectorXd grid;     // CSI subcarrier grid, Hz
    PilotSymbol pilot;
    bool dynamic = false;     // redraw diffuse taps per packet
    std::uint32_t scenario_id = 0;

    void validate() const;
};

/// Orientation gain lookup (antenna-pattern table, interpolated).
double orientation_gain_db(double orientation_deg);

/// Amplitude scale applied to SH: path loss x shadowing x orientation gain.
/// Shadowing is frozen per session and drawn from rng.child("shadow").
double link_amplitude(const LinkSession& session, RngStream& rng_session);

/// Receiver-side SNR model: the thermal SNR follows the distance law but the
/// effective CSI fidelity of a COTS receiver saturates (AGC and quantization),
/// so the post-estimation SNR is ceilinged at rx_snr_cap_db.
struct LinkBudget {
    double tx_power_over_noise_db = 105.0; // before path loss (15 dBm over a -90 dBm floor)
    double rx_snr_cap_db = 25.0;           // effective CSI SNR ceiling
};

/// Effective per-subcarrier CSI SNR for the session under the budget.
double effective_snr_db(const LinkSession& session, const LinkBudget& budget, RngStream rng_session);

/// Set session.params.noise_power so the received CSI sits at snr_db relative
/// to the mean received baseline power. Uses the same session stream that
/// generate_dataset will use, so the frozen shadowing draw matches.
void set_noise_for_snr(LinkSession& session, double snr_db, RngStream rng_session);

/// Convenience: set_noise_for_snr at the budget's effective SNR.
void apply_link_budget(LinkSession& session, const LinkBudget& budget, RngStream rng_session);

/// One CSI record per (code, packet). The channel realization and shadowing
/// are frozen per session; each packet redraws noise (plus the diffuse taps
/// when session.dynamic is set). Records are emitted in canonical order
/// (code-major, packet-minor) and the result is bit-reproducible per seed.
Dataset generate_dataset(const LinkSession& session, const std::vector<surface::ControlCode>& codes,
                         int packets_per_code, RngStream rng);

/// One fresh received packet through the session's frozen channel: the same
/// channel and shadowing draws generate_dataset makes for the same stream,
/// with noise from the separate "auth-noise" stream. code.cv is overridden
/// by the session's channel-select voltage.
Eigen::VectorXcd simulate_packet(const LinkSession& session, const surface::ControlCode& code,
                                 RngStream rng_session, std::uint64_t packet_id);

} // namespace rffi::phy

#endif
