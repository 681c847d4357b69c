"""Antenna-array channel model and per-link gain snapshots.

Service-point downlink channels follow a Rician-style decomposition: one LOS
path plus Q equal-weight NLOS paths, each path a complex-Gaussian gain on a
uniform-linear-array steering vector.  Jammer-to-UE channels use the same
construction with Z paths and an air-to-ground path-loss law that adds a
height-ratio correction, a constant equipment loss, and an optional Doppler
frequency shift on top of the terrestrial log-distance law.

All path losses are in dB; linear channel gains are derived as 10^(-PL/10).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scenario import Jammer, Scenario, ServicePoint, UserEquipment

SPEED_OF_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class ChannelParams:
    """Propagation constants shared by every link of a snapshot.

    antenna_spacing_m=None selects half the per-link carrier wavelength.
    freq_exp=None reuses pathloss_exp for the jammer frequency term.
    """

    nlos_paths_sp: int = 3        # Q, service-point links
    nlos_paths_jam: int = 3       # Z, jammer links
    antenna_spacing_m: float | None = None
    shadowing_sigma_db: float = 4.0
    pathloss_exp: float = 2.0     # n > 0
    ref_distance_m: float = 1.0   # d0
    jammer_const_loss_db: float = 0.0   # C_p >= 0
    h_opt_m: float = 1.5          # receiver height minimizing air-to-ground loss
    doppler_enabled: bool = False
    freq_exp: float | None = None


@dataclass
class CsiSnapshot:
    """Effective per-link gains for one fading realization.

    sp_gain[i, j] = squared channel norm UE i <- service point j.
    jam_gain[i, l] = squared channel norm UE i <- jammer l.
    """

    sp_gain: np.ndarray   # (U, J) float64, > 0
    jam_gain: np.ndarray  # (U, L) float64, > 0
    seed: int


def steering_vector(alpha: float, beta: float, m: int,
                    spacing_m: float, wavelength_m: float) -> np.ndarray:
    """Uniform-linear-array response for elevation alpha and azimuth beta.

    Entry k is exp(j*2*pi*spacing*k/wavelength * sin(alpha)*cos(beta)); every
    entry has unit modulus and entry 0 is exactly 1.
    """
    if m < 1:
        raise DomainError(f"array size must be >= 1, got {m}")
    if wavelength_m <= 0 or spacing_m < 0:
        raise DomainError("wavelength must be positive and spacing nonnegative")
    step = 2.0 * math.pi * spacing_m / wavelength_m * math.sin(alpha) * math.cos(beta)
    return np.exp(1j * step * np.arange(m))


def free_space_pathloss_db(d_m: float, freq_hz: float) -> float:
    """Free-space loss 20*log10(4*pi*d*f/c) in dB."""
    if d_m <= 0 or freq_hz <= 0:
        raise DomainError("distance and frequency must be positive")
    return 20.0 * math.log10(4.0 * math.pi * d_m * freq_hz / SPEED_OF_LIGHT)


def pathloss_sp_ue(d_m: float, p: ChannelParams, freq_hz: float,
                   shadow_db: float) -> float:
    """Log-distance path loss: free-space at d0 plus 10*n*log10(d/d0) plus shadowing."""
    if d_m < p.ref_distance_m:
        raise DomainError(
            f"link distance {d_m} m below reference distance {p.ref_distance_m} m")
    if p.pathloss_exp <= 0:
        raise DomainError("pathloss_exp must be positive")
    fs = free_space_pathloss_db(p.ref_distance_m, freq_hz)
    return fs + 10.0 * p.pathloss_exp * math.log10(d_m / p.ref_distance_m) + shadow_db


def doppler_shift_hz(speed_mps: float, freq_hz: float) -> float:
    return speed_mps / SPEED_OF_LIGHT * freq_hz


def pathloss_jammer_ue(d_m: float, delta_h_m: float, p: ChannelParams,
                       freq_hz: float, speed_mps: float, shadow_db: float) -> float:
    """Air-to-ground path loss for a jammer link.

    Extends the terrestrial law with -10*log10(delta_h/h_opt), a constant
    equipment loss, and (when enabled) a Doppler term 10*e*log10((f+df)/f).
    With delta_h == h_opt, zero constant loss and Doppler off it reduces
    exactly to pathloss_sp_ue.
    """
    if delta_h_m <= 0:
        raise DomainError("delta_h must be positive (log singularity at 0)")
    if p.h_opt_m <= 0:
        raise DomainError("h_opt must be positive")
    if p.jammer_const_loss_db < 0:
        raise DomainError("constant loss must be nonnegative")
    base = pathloss_sp_ue(d_m, p, freq_hz, shadow_db)
    height = -10.0 * math.log10(delta_h_m / p.h_opt_m)
    dop = 0.0
    if p.doppler_enabled:
        e = p.freq_exp if p.freq_exp is not None else p.pathloss_exp
        df = doppler_shift_hz(speed_mps, freq_hz)
        dop = 10.0 * e * math.log10((freq_hz + df) / freq_hz)
    return base + height + p.jammer_const_loss_db + dop


def _multipath_vector(rng: np.random.Generator, n_paths: int, m: int,
                      var_lin: float, spacing_m: float,
                      wavelength_m: float) -> np.ndarray:
    """LOS + n_paths NLOS rays, each CN(0, var_lin) on a random steering vector.

    Draw order per ray: elevation, azimuth, then the real/imag gain parts, LOS
    first.  Second moment: E||h||^2 = (1 + [n_paths > 0]) * m * var_lin.
    """
    scale = math.sqrt(var_lin / 2.0)
    h = np.zeros(m, dtype=np.complex128)
    for q in range(n_paths + 1):
        alpha = rng.uniform(-math.pi / 2.0, math.pi / 2.0)
        beta = rng.uniform(0.0, 2.0 * math.pi)
        g = scale * complex(rng.standard_normal(), rng.standard_normal())
        ray = g * steering_vector(alpha, beta, m, spacing_m, wavelength_m)
        if q == 0:
            h = h + ray
        else:
            h = h + math.sqrt(1.0 / n_paths) * ray
    return h


def _link_spacing(p: ChannelParams, wavelength_m: float) -> float:
    return wavelength_m / 2.0 if p.antenna_spacing_m is None else p.antenna_spacing_m


def sp_ue_channel(ue: UserEquipment, sp: ServicePoint, p: ChannelParams,
                  rng: np.random.Generator) -> np.ndarray:
    """Draw one channel vector (length = sp.antennas) for a service-point link.

    The shadowing draw comes first, then the per-ray draws; a given rng state
    therefore maps to exactly one vector.
    """
    d = math.dist(ue.position_m, sp.position_m)
    shadow = rng.normal(0.0, p.shadowing_sigma_db)
    pl = pathloss_sp_ue(d, p, sp.carrier_hz, shadow)
    lam = SPEED_OF_LIGHT / sp.carrier_hz
    return _multipath_vector(rng, p.nlos_paths_sp, sp.antennas, 10.0 ** (-pl / 10.0),
                             _link_spacing(p, lam), lam)


def effective_height_delta(ue_height_m: float, h_opt_m: float) -> float:
    """Height offset fed to the air-to-ground law.

    |h_gnd - h_opt| when the receiver sits off the optimum; at the optimum the
    offset equals h_opt itself so the height correction vanishes instead of
    blowing up.
    """
    if ue_height_m == h_opt_m:
        return h_opt_m
    return abs(ue_height_m - h_opt_m)


def jammer_ue_channel(ue: UserEquipment, jam: Jammer, p: ChannelParams,
                      rng: np.random.Generator, ue_height_m: float = 1.5) -> np.ndarray:
    """Draw one channel vector (length = jam.antennas) for a jammer link."""
    ground = math.dist(ue.position_m, jam.position_m)
    d = math.hypot(ground, jam.altitude_m - ue_height_m)
    shadow = rng.normal(0.0, p.shadowing_sigma_db)
    pl = pathloss_jammer_ue(d, effective_height_delta(ue_height_m, p.h_opt_m), p,
                            jam.emit_freq_hz, jam.speed_mps, shadow)
    lam = SPEED_OF_LIGHT / jam.emit_freq_hz
    return _multipath_vector(rng, p.nlos_paths_jam, jam.antennas, 10.0 ** (-pl / 10.0),
                             _link_spacing(p, lam), lam)


def _pair_rng(seed: int, tag: int, a: int, b: int) -> np.random.Generator:
    # Independent stream per link, keyed by (seed, matrix tag, row, col), so
    # snapshot assembly is schedule-independent.
    return np.random.default_rng(np.random.SeedSequence((seed, tag, a, b)))


def build_csi_snapshot(s: Scenario, p: ChannelParams, seed: int) -> CsiSnapshot:
    """Draw every link gain for one fading realization.

    Entry (i, j) depends only on (seed, i, j), never on evaluation order.
    """
    n_ue, n_sp, n_jam = len(s.ues), len(s.sps), len(s.jammers)
    sp_gain = np.zeros((n_ue, n_sp))
    jam_gain = np.zeros((n_ue, n_jam))
    for i, ue in enumerate(s.ues):
        for j, sp in enumerate(s.sps):
            h = sp_ue_channel(ue, sp, p, _pair_rng(seed, 0, i, j))
            sp_gain[i, j] = np.vdot(h, h).real
        for l, jam in enumerate(s.jammers):
            h = jammer_ue_channel(ue, jam, p, _pair_rng(seed, 1, i, l),
                                  ue_height_m=s.config.ue_height_m)
            jam_gain[i, l] = np.vdot(h, h).real
    return CsiSnapshot(sp_gain=sp_gain, jam_gain=jam_gain, seed=seed)


# -- snapshot persistence -----------------------------------------------------


def save_snapshot(snap: CsiSnapshot, sink) -> None:
    """Write a snapshot to a path or text file object (JSON, linear gains)."""
    import json

    doc = {
        "seed": snap.seed,
        "sp_gain_lin": [[float(v) for v in row] for row in snap.sp_gain],
        "jam_gain_lin": [[float(v) for v in row] for row in snap.jam_gain],
    }
    if hasattr(sink, "write"):
        json.dump(doc, sink, indent=2)
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)


def load_snapshot(source) -> CsiSnapshot:
    import json

    from .errors import ParseError, ValidationError

    if hasattr(source, "read"):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        import os

        name = os.fspath(source)
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})",
                         f"{name}:{exc.lineno}:{exc.colno}") from exc
    for key in ("seed", "sp_gain_lin", "jam_gain_lin"):
        if key not in doc:
            raise ParseError("missing field", key)
    sp_gain = np.array(doc["sp_gain_lin"], dtype=np.float64)
    jam_gain = np.array(doc["jam_gain_lin"], dtype=np.float64)
    if sp_gain.ndim != 2 or jam_gain.ndim != 2:
        # Zero-row matrices load as 1-D; normalize only that case.
        if sp_gain.size == 0:
            sp_gain = sp_gain.reshape(0, 0)
        if jam_gain.size == 0:
            jam_gain = jam_gain.reshape(sp_gain.shape[0], 0)
    if sp_gain.size and sp_gain.min() <= 0:
        raise ValidationError("sp_gain_lin entries must be positive")
    if jam_gain.size and jam_gain.min() <= 0:
        raise ValidationError("jam_gain_lin entries must be positive")
    if jam_gain.shape[0] not in (0, sp_gain.shape[0]):
        raise ValidationError("gain matrices disagree on the number of UEs")
    return CsiSnapshot(sp_gain=sp_gain, jam_gain=jam_gain, seed=int(doc["seed"]))
