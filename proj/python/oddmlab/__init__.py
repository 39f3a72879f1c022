"""Delay-Doppler multicarrier simulation laboratory."""

from ._core import (
    DdChannelMatrix,
    Ddop,
    EsddChannel,
    GridParams,
    RrcParams,
    SampledSignal,
    add_awgn,
    apply_esdd,
    apply_ltv,
    build_H,
    cross_ambiguity,
    ddop_spectrum,
    demodulate,
    detect,
    efficiency,
    make_ddop,
    make_esdd,
    modulate_oddm_approx,
    modulate_oddm_exact,
    modulate_otfs,
    nmse_db,
    orthogonality_grid,
    per_symbol_channel,
    periodic_prototype,
    qam4_awgn_ber,
    qam4_points,
    rrc_subpulse,
    sidelobe_metrics,
    welch_psd,
)

__all__ = [
    "DdChannelMatrix",
    "Ddop",
    "EsddChannel",
    "GridParams",
    "RrcParams",
    "SampledSignal",
    "add_awgn",
    "apply_esdd",
    "apply_ltv",
    "build_H",
    "cross_ambiguity",
    "ddop_spectrum",
    "demodulate",
    "detect",
    "efficiency",
    "make_ddop",
    "make_esdd",
    "modulate_oddm_approx",
    "modulate_oddm_exact",
    "modulate_otfs",
    "nmse_db",
    "orthogonality_grid",
    "per_symbol_channel",
    "periodic_prototype",
    "qam4_awgn_ber",
    "qam4_points",
    "rrc_subpulse",
    "sidelobe_metrics",
    "welch_psd",
]
