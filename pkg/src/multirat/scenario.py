"""Network scenario model: node records, random generation, persistence.

A scenario is a square deployment area holding two kinds of service points
(5G-NR base stations and WiFi-6 access points, disjoint bands), single-antenna
user equipments, and airborne jammers.  Same-kind service points keep a
minimum mutual spacing; all ground positions are planar, jammers additionally
carry an altitude.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ParseError, PlacementInfeasible, ValidationError

NR5G = "nr5g"
WIFI6 = "wifi6"

PLACEMENT_ATTEMPTS = 10_000  # rejection-sampling budget per service point


@dataclass(frozen=True)
class RadioProfile:
    """Per-technology service-point parameters."""

    antennas: int
    max_power_w: float
    bandwidth_hz: float
    carrier_hz: float
    ue_cap: int  # max simultaneously served UEs


@dataclass(frozen=True)
class JammerProfile:
    antennas: int
    max_power_w: float
    altitude_m: float
    speed_mps: float
    emit_freq_hz: float


# Defaults mirror a dense urban deployment: mmWave NR cells next to
# mid-band WiFi, hostile quadrotors overhead.
NR_DEFAULT = RadioProfile(antennas=32, max_power_w=100.0, bandwidth_hz=100e6,
                          carrier_hz=25e9, ue_cap=20)
WIFI_DEFAULT = RadioProfile(antennas=8, max_power_w=40.0, bandwidth_hz=80e6,
                            carrier_hz=6e9, ue_cap=8)
JAMMER_DEFAULT = JammerProfile(antennas=4, max_power_w=20.0, altitude_m=100.0,
                               speed_mps=30.0, emit_freq_hz=6e9)


@dataclass(frozen=True)
class ScenarioConfig:
    area_side_m: float = 1000.0
    num_bs: int = 20
    num_ap: int = 20
    num_ue: int = 40
    num_jammers: int = 10
    min_sp_spacing_m: float = 100.0  # same-kind service points only
    nr_profile: RadioProfile = NR_DEFAULT
    wifi_profile: RadioProfile = WIFI_DEFAULT
    jammer_profile: JammerProfile = JAMMER_DEFAULT
    multi_conn: int = 1            # max service points per UE
    min_rate_bps: float = 0.5e6    # per-UE rate floor
    noise_power_w: float = 1e-9
    ue_height_m: float = 1.5
    rng_seed: int = 0


@dataclass(frozen=True)
class ServicePoint:
    id: int
    rat: str  # NR5G or WIFI6
    position_m: tuple[float, float]
    antennas: int
    max_power_w: float
    bandwidth_hz: float
    carrier_hz: float
    ue_cap: int


@dataclass(frozen=True)
class UserEquipment:
    id: int
    position_m: tuple[float, float]
    min_rate_bps: float


@dataclass(frozen=True)
class Jammer:
    id: int
    position_m: tuple[float, float]
    altitude_m: float
    antennas: int
    max_power_w: float
    speed_mps: float
    emit_freq_hz: float


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    sps: tuple[ServicePoint, ...]
    ues: tuple[UserEquipment, ...]
    jammers: tuple[Jammer, ...]

    @property
    def num_sp(self) -> int:
        return len(self.sps)

    def sps_of_rat(self, rat: str) -> tuple[ServicePoint, ...]:
        return tuple(sp for sp in self.sps if sp.rat == rat)


def _check_positive(cfg: ScenarioConfig) -> None:
    if cfg.area_side_m <= 0:
        raise ValidationError("area_side_m must be positive")
    if min(cfg.num_bs, cfg.num_ap, cfg.num_jammers) < 0 or cfg.num_ue < 0:
        raise ValidationError("node counts must be nonnegative")
    if cfg.multi_conn < 1:
        raise ValidationError("multi_conn must be at least 1")
    if cfg.min_sp_spacing_m < 0:
        raise ValidationError("min_sp_spacing_m must be nonnegative")
    if cfg.noise_power_w <= 0:
        raise ValidationError("noise_power_w must be positive")
    for name, prof in (("nr_profile", cfg.nr_profile), ("wifi_profile", cfg.wifi_profile)):
        if prof.antennas < 1 or prof.ue_cap < 1:
            raise ValidationError(f"{name}: antennas and ue_cap must be at least 1")
        if prof.max_power_w <= 0 or prof.bandwidth_hz <= 0 or prof.carrier_hz <= 0:
            raise ValidationError(f"{name}: power, bandwidth and carrier must be positive")
    jp = cfg.jammer_profile
    if cfg.num_jammers > 0:
        if jp.antennas < 1 or jp.max_power_w <= 0 or jp.emit_freq_hz <= 0:
            raise ValidationError("jammer_profile: antennas, power and frequency must be positive")


def _draw_spaced_points(rng: np.random.Generator, count: int, side: float,
                        spacing: float, kind: str) -> list[tuple[float, float]]:
    # Rejection sampling against already placed same-kind points.
    placed: list[tuple[float, float]] = []
    for _ in range(count):
        for _attempt in range(PLACEMENT_ATTEMPTS):
            x = rng.uniform(0.0, side)
            y = rng.uniform(0.0, side)
            if all(math.hypot(x - px, y - py) >= spacing for px, py in placed):
                placed.append((x, y))
                break
        else:
            raise PlacementInfeasible(
                f"could not place {kind} point {len(placed)} of {count} with "
                f"{spacing} m spacing in a {side} m square after "
                f"{PLACEMENT_ATTEMPTS} attempts")
    return placed


def generate(cfg: ScenarioConfig) -> Scenario:
    """Draw a random scenario; identical cfg (incl. rng_seed) gives an identical scenario."""
    _check_positive(cfg)
    rng = np.random.default_rng(cfg.rng_seed)
    side = cfg.area_side_m

    bs_pos = _draw_spaced_points(rng, cfg.num_bs, side, cfg.min_sp_spacing_m, NR5G)
    ap_pos = _draw_spaced_points(rng, cfg.num_ap, side, cfg.min_sp_spacing_m, WIFI6)

    sps = []
    for pos in bs_pos:
        p = cfg.nr_profile
        sps.append(ServicePoint(id=len(sps), rat=NR5G, position_m=pos,
                                antennas=p.antennas, max_power_w=p.max_power_w,
                                bandwidth_hz=p.bandwidth_hz, carrier_hz=p.carrier_hz,
                                ue_cap=p.ue_cap))
    for pos in ap_pos:
        p = cfg.wifi_profile
        sps.append(ServicePoint(id=len(sps), rat=WIFI6, position_m=pos,
                                antennas=p.antennas, max_power_w=p.max_power_w,
                                bandwidth_hz=p.bandwidth_hz, carrier_hz=p.carrier_hz,
                                ue_cap=p.ue_cap))

    ues = tuple(
        UserEquipment(id=i, position_m=(rng.uniform(0.0, side), rng.uniform(0.0, side)),
                      min_rate_bps=cfg.min_rate_bps)
        for i in range(cfg.num_ue))

    jp = cfg.jammer_profile
    jammers = tuple(
        Jammer(id=l, position_m=(rng.uniform(0.0, side), rng.uniform(0.0, side)),
               altitude_m=jp.altitude_m, antennas=jp.antennas,
               max_power_w=jp.max_power_w, speed_mps=jp.speed_mps,
               emit_freq_hz=jp.emit_freq_hz)
        for l in range(cfg.num_jammers))

    return Scenario(config=cfg, sps=tuple(sps), ues=ues, jammers=jammers)


def validate(s: Scenario) -> None:
    """Raise ValidationError if the scenario breaks a model invariant."""
    cfg = s.config
    _check_positive(cfg)
    n_bs = sum(1 for sp in s.sps if sp.rat == NR5G)
    n_ap = sum(1 for sp in s.sps if sp.rat == WIFI6)
    if n_bs != cfg.num_bs or n_ap != cfg.num_ap:
        raise ValidationError(
            f"service point counts ({n_bs} nr5g, {n_ap} wifi6) disagree with "
            f"config ({cfg.num_bs}, {cfg.num_ap})")
    if len(s.ues) != cfg.num_ue:
        raise ValidationError(f"expected {cfg.num_ue} UEs, found {len(s.ues)}")
    if len(s.jammers) != cfg.num_jammers:
        raise ValidationError(f"expected {cfg.num_jammers} jammers, found {len(s.jammers)}")
    for seq in (s.sps, s.ues, s.jammers):
        for k, node in enumerate(seq):
            if node.id != k:
                raise ValidationError(f"{type(node).__name__} ids must be 0..n-1 in order")
            x, y = node.position_m
            if not (0.0 <= x <= cfg.area_side_m and 0.0 <= y <= cfg.area_side_m):
                raise ValidationError(
                    f"{type(node).__name__} {k} position {node.position_m} outside area")
    for rat in (NR5G, WIFI6):
        pts = [sp.position_m for sp in s.sps if sp.rat == rat]
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                d = math.hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1])
                if d < cfg.min_sp_spacing_m:
                    raise ValidationError(
                        f"{rat} points {a} and {b} are {d:.3f} m apart, below the "
                        f"{cfg.min_sp_spacing_m} m minimum")
    for sp in s.sps:
        prof = cfg.nr_profile if sp.rat == NR5G else cfg.wifi_profile
        fields = (sp.antennas, sp.max_power_w, sp.bandwidth_hz, sp.carrier_hz, sp.ue_cap)
        expect = (prof.antennas, prof.max_power_w, prof.bandwidth_hz, prof.carrier_hz, prof.ue_cap)
        if fields != expect:
            raise ValidationError(f"service point {sp.id} deviates from its {sp.rat} profile")


# -- persistence --------------------------------------------------------------
#
# Scenarios are stored as JSON with SI units spelled out in the field names.
# Floats survive a save/load round trip bit-for-bit (repr round-trips).


def _scenario_doc(s: Scenario) -> dict:
    return {
        "config": asdict(s.config),
        "sps": [asdict(sp) for sp in s.sps],
        "ues": [asdict(ue) for ue in s.ues],
        "jammers": [asdict(j) for j in s.jammers],
    }


def save_scenario(s: Scenario, sink) -> None:
    """Write a scenario to a path or text file object."""
    doc = _scenario_doc(s)
    if hasattr(sink, "write"):
        json.dump(doc, sink, indent=2)
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)


def _require(mapping: dict, key: str, location: str):
    if not isinstance(mapping, dict):
        raise ParseError("expected an object", location.rsplit(".", 1)[0] or location)
    if key not in mapping:
        raise ParseError("missing field", location)
    return mapping[key]


def _number(mapping: dict, key: str, location: str) -> float:
    v = _require(mapping, key, location)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError("expected a number", location)
    return v


def _integer(mapping: dict, key: str, location: str) -> int:
    v = _require(mapping, key, location)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError("expected an integer", location)
    return v


def _position(mapping: dict, key: str, location: str) -> tuple[float, float]:
    v = _require(mapping, key, location)
    if not isinstance(v, list) or len(v) != 2 or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        raise ParseError("expected [x, y]", location)
    return (float(v[0]), float(v[1]))


def _radio_profile(doc: dict, loc: str) -> RadioProfile:
    return RadioProfile(
        antennas=_integer(doc, "antennas", f"{loc}.antennas"),
        max_power_w=_number(doc, "max_power_w", f"{loc}.max_power_w"),
        bandwidth_hz=_number(doc, "bandwidth_hz", f"{loc}.bandwidth_hz"),
        carrier_hz=_number(doc, "carrier_hz", f"{loc}.carrier_hz"),
        ue_cap=_integer(doc, "ue_cap", f"{loc}.ue_cap"),
    )


def _config_from_doc(doc: dict) -> ScenarioConfig:
    jp = _require(doc, "jammer_profile", "config.jammer_profile")
    loc = "config.jammer_profile"
    jammer = JammerProfile(
        antennas=_integer(jp, "antennas", f"{loc}.antennas"),
        max_power_w=_number(jp, "max_power_w", f"{loc}.max_power_w"),
        altitude_m=_number(jp, "altitude_m", f"{loc}.altitude_m"),
        speed_mps=_number(jp, "speed_mps", f"{loc}.speed_mps"),
        emit_freq_hz=_number(jp, "emit_freq_hz", f"{loc}.emit_freq_hz"),
    )
    return ScenarioConfig(
        area_side_m=_number(doc, "area_side_m", "config.area_side_m"),
        num_bs=_integer(doc, "num_bs", "config.num_bs"),
        num_ap=_integer(doc, "num_ap", "config.num_ap"),
        num_ue=_integer(doc, "num_ue", "config.num_ue"),
        num_jammers=_integer(doc, "num_jammers", "config.num_jammers"),
        min_sp_spacing_m=_number(doc, "min_sp_spacing_m", "config.min_sp_spacing_m"),
        nr_profile=_radio_profile(_require(doc, "nr_profile", "config.nr_profile"),
                                  "config.nr_profile"),
        wifi_profile=_radio_profile(_require(doc, "wifi_profile", "config.wifi_profile"),
                                    "config.wifi_profile"),
        jammer_profile=jammer,
        multi_conn=_integer(doc, "multi_conn", "config.multi_conn"),
        min_rate_bps=_number(doc, "min_rate_bps", "config.min_rate_bps"),
        noise_power_w=_number(doc, "noise_power_w", "config.noise_power_w"),
        ue_height_m=_number(doc, "ue_height_m", "config.ue_height_m"),
        rng_seed=_integer(doc, "rng_seed", "config.rng_seed"),
    )


def load_scenario(source) -> Scenario:
    """Read a scenario from a path or text file object; validates invariants."""
    if hasattr(source, "read"):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        name = os.fspath(source)
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})",
                         f"{name}:{exc.lineno}:{exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", name)

    cfg = _config_from_doc(_require(doc, "config", "config"))

    sps = []
    for k, sp in enumerate(_require(doc, "sps", "sps")):
        loc = f"sps[{k}]"
        rat = _require(sp, "rat", f"{loc}.rat")
        if rat not in (NR5G, WIFI6):
            raise ParseError(f"unknown rat {rat!r}", f"{loc}.rat")
        sps.append(ServicePoint(
            id=_integer(sp, "id", f"{loc}.id"),
            rat=rat,
            position_m=_position(sp, "position_m", f"{loc}.position_m"),
            antennas=_integer(sp, "antennas", f"{loc}.antennas"),
            max_power_w=_number(sp, "max_power_w", f"{loc}.max_power_w"),
            bandwidth_hz=_number(sp, "bandwidth_hz", f"{loc}.bandwidth_hz"),
            carrier_hz=_number(sp, "carrier_hz", f"{loc}.carrier_hz"),
            ue_cap=_integer(sp, "ue_cap", f"{loc}.ue_cap"),
        ))
    ues = []
    for k, ue in enumerate(_require(doc, "ues", "ues")):
        loc = f"ues[{k}]"
        ues.append(UserEquipment(
            id=_integer(ue, "id", f"{loc}.id"),
            position_m=_position(ue, "position_m", f"{loc}.position_m"),
            min_rate_bps=_number(ue, "min_rate_bps", f"{loc}.min_rate_bps"),
        ))
    jammers = []
    for k, j in enumerate(_require(doc, "jammers", "jammers")):
        loc = f"jammers[{k}]"
        jammers.append(Jammer(
            id=_integer(j, "id", f"{loc}.id"),
            position_m=_position(j, "position_m", f"{loc}.position_m"),
            altitude_m=_number(j, "altitude_m", f"{loc}.altitude_m"),
            antennas=_integer(j, "antennas", f"{loc}.antennas"),
            max_power_w=_number(j, "max_power_w", f"{loc}.max_power_w"),
            speed_mps=_number(j, "speed_mps", f"{loc}.speed_mps"),
            emit_freq_hz=_number(j, "emit_freq_hz", f"{loc}.emit_freq_hz"),
        ))

    s = Scenario(config=cfg, sps=tuple(sps), ues=tuple(ues), jammers=tuple(jammers))
    validate(s)
    return s
