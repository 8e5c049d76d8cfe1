"""Synthetic behavior logs for human and bot players of each play style.

Count fields are negative-binomial draws around per-player means; ``hit``
and ``avoidance`` are binomial thinnings of ``attack`` and ``defense`` so the
log invariants hold by construction. Humans wander with a persistent random
walk and take idle breaks; bots cycle through a fixed loop of waypoints and
rarely idle. Default parameters live in ``data/profiles.json``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

import numpy as np

from ._rng import derive_seed
from .logmodel import STYLES, BehaviorSample, LabeledSample

INTERVAL_SECONDS = 300
EPOCH = 1_370_000_000
COUNT_KEYS = ("hunting", "attack", "defense", "recovery", "item", "collection", "drop", "portal")

# reference population: players per (style, is_bot) cell
PLAYER_MIX = {
    ("Killer", False): 777,
    ("Achiever", False): 1266,
    ("Explorer", False): 224,
    ("Remainder", False): 6186,
    ("Killer", True): 2296,
    ("Achiever", True): 1895,
    ("Explorer", True): 11,
    ("Remainder", True): 4251,
}
CELLS = tuple(PLAYER_MIX)


def cell_name(style: str, is_bot: bool) -> str:
    return f"{style}/{'bot' if is_bot else 'human'}"


def parse_cell(name: str) -> tuple[str, bool]:
    style, _, kind = name.partition("/")
    if style not in STYLES or kind not in ("bot", "human"):
        raise ValueError(f"bad cell name {name!r}, expected e.g. 'Killer/bot'")
    return style, kind == "bot"


@dataclass(frozen=True)
class ArchetypeProfile:
    style: str
    is_bot: bool
    counts: Mapping[str, tuple[float, float]]  # feature -> (mean, excess dispersion)
    hit_rate: float
    avoid_rate: float
    rate_spread: float
    player_spread: float
    idle_prob: float
    idle_spread: float
    step_mean: float
    step_spread: float
    turn_sd: float
    loop: bool
    waypoints: int
    jitter: float
    session: tuple[int, int]
    map_size: float = 1000.0

    def validate(self) -> None:
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")
        missing = set(COUNT_KEYS) - set(self.counts)
        if missing:
            raise ValueError(f"{cell_name(self.style, self.is_bot)}: missing counts {sorted(missing)}")
        for name, (mean, disp) in self.counts.items():
            if mean < 0 or disp < 0:
                raise ValueError(f"{cell_name(self.style, self.is_bot)}: negative parameter for {name}")
        for rate in (self.hit_rate, self.avoid_rate):
            if not 0 <= rate <= 1:
                raise ValueError("success rates must lie in [0, 1]")
        lo, hi = self.session
        if not 1 <= lo <= hi:
            raise ValueError("session length range must satisfy 1 <= min <= max")
        if self.loop and self.waypoints < 2:
            raise ValueError("a waypoint loop needs at least two waypoints")

    @classmethod
    def from_dict(cls, d: Mapping) -> "ArchetypeProfile":
        d = dict(d)
        d["counts"] = {k: (float(v[0]), float(v[1])) for k, v in d["counts"].items()}
        d["session"] = (int(d["session"][0]), int(d["session"][1]))
        prof = cls(**d)
        prof.validate()
        return prof


def load_profiles(path=None) -> dict[tuple[str, bool], ArchetypeProfile]:
    """Read a profile file (the packaged defaults when ``path`` is None)."""
    if path is None:
        text = resources.files("botsense").joinpath("data/profiles.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    doc = json.loads(text)
    profiles = {}
    for name, body in doc["profiles"].items():
        style, is_bot = parse_cell(name)
        profiles[style, is_bot] = ArchetypeProfile.from_dict({"style": style, "is_bot": is_bot, **body})
    check_dispersion_order(profiles)
    return profiles


def check_dispersion_order(profiles: Mapping[tuple[str, bool], ArchetypeProfile]) -> None:
    for style in STYLES:
        bot, human = profiles.get((style, True)), profiles.get((style, False))
        if bot is None or human is None:
            continue
        for name in COUNT_KEYS:
            if bot.counts[name][1] > human.counts[name][1]:
                raise ValueError(f"{style}: bot dispersion of {name} exceeds the human one")


@dataclass
class GeneratorConfig:
    seed: int
    players_per_cell: dict[tuple[str, bool], int]
    interval_seconds: int = INTERVAL_SECONDS
    profiles: dict[tuple[str, bool], ArchetypeProfile] = field(default_factory=load_profiles)
    session: tuple[int, int] | None = None  # overrides every profile's range

    def validate(self) -> None:
        for cell, n in self.players_per_cell.items():
            if cell not in PLAYER_MIX:
                raise ValueError(f"unknown cell {cell!r}")
            if n < 0:
                raise ValueError("player counts must be non-negative")
            if n and cell not in self.profiles:
                raise ValueError(f"no profile for {cell_name(*cell)}")
        humans = sum(n for (_, b), n in self.players_per_cell.items() if not b)
        bots = sum(n for (_, b), n in self.players_per_cell.items() if b)
        if humans == 0 or bots == 0:
            raise ValueError("configuration needs at least one human and one bot player")
        if self.interval_seconds <= 0:
            raise ValueError("interval must be positive")
        if self.session is not None and not 1 <= self.session[0] <= self.session[1]:
            raise ValueError("session length range must satisfy 1 <= min <= max")


def default_mix(total_players: int, seed: int = 0, **kwargs) -> GeneratorConfig:
    """Split ``total_players`` over the eight cells in PLAYER_MIX proportions.

    Uses largest-remainder rounding; ties in the remainder go to the larger
    cell, then to the earlier cell.
    """
    if total_players < 8:
        raise ValueError("total_players must be at least 8")
    grand = sum(PLAYER_MIX.values())
    quotas = {cell: total_players * n / grand for cell, n in PLAYER_MIX.items()}
    alloc = {cell: math.floor(q) for cell, q in quotas.items()}
    left = total_players - sum(alloc.values())
    order = sorted(CELLS, key=lambda c: (-(quotas[c] - alloc[c]), -PLAYER_MIX[c], CELLS.index(c)))
    for cell in order[:left]:
        alloc[cell] += 1
    return GeneratorConfig(seed=seed, players_per_cell=alloc, **kwargs)


def _nb(rng, mean, disp):
    """Negative-binomial draws with the given means and var = mean * (1 + disp)."""
    mean = np.maximum(np.asarray(mean, dtype=float), 0.0)
    if disp <= 0:
        return rng.poisson(mean)
    out = np.zeros(mean.shape, dtype=np.int64)
    ok = mean > 0
    out[ok] = rng.negative_binomial(mean[ok] / disp, 1.0 / (1.0 + disp))
    return out


def _movement(rng, prof: ArchetypeProfile, steps: int, active: np.ndarray):
    """Positions at each sample time; ``active`` marks non-idle intervals."""
    home = rng.uniform(0.15, 0.85, size=2) * prof.map_size
    scale = prof.step_mean * math.exp(rng.normal(0, prof.step_spread))
    if prof.loop:
        radius = scale * prof.waypoints / (2 * math.pi)
        phase = rng.uniform(0, 2 * math.pi)
        angles = phase + 2 * math.pi * np.arange(prof.waypoints) / prof.waypoints
        loop = home + radius * np.column_stack([np.cos(angles), np.sin(angles)])
        pos = np.empty((steps, 2))
        idx = int(rng.integers(prof.waypoints))
        for t in range(steps):
            if active[t]:
                idx = (idx + 1) % prof.waypoints
            pos[t] = loop[idx]
        return pos + rng.normal(0, prof.jitter, size=pos.shape)
    heading = rng.uniform(0, 2 * math.pi)
    pos = np.empty((steps, 2))
    cur = home.copy()
    for t in range(steps):
        if active[t]:
            heading += rng.normal(0, prof.turn_sd)
            step = rng.gamma(2.0, scale / 2.0)
            cur = cur + step * np.array([math.cos(heading), math.sin(heading)])
        pos[t] = cur
    return pos


def generate_player(prof: ArchetypeProfile, player_id: str, label: str, seed: int,
                    interval: int = INTERVAL_SECONDS, session: tuple[int, int] | None = None):
    rng = np.random.default_rng(seed)
    lo, hi = session or prof.session
    steps = int(rng.integers(lo, hi + 1))
    start = EPOCH + int(rng.integers(0, 30 * 24 * 12)) * interval

    idle = float(np.clip(prof.idle_prob + rng.normal(0, prof.idle_spread), 0, 0.9))
    active = rng.random(steps) >= idle
    activity = np.where(active, 1.0, 0.0)
    # per-player taste: one multiplier per count feature
    taste = {k: math.exp(rng.normal(0, prof.player_spread)) for k in COUNT_KEYS}
    draws = {}
    for name in COUNT_KEYS:
        mean, disp = prof.counts[name]
        mu = mean * taste[name] * (activity if name != "item" else np.ones(steps))
        draws[name] = _nb(rng, mu, disp)
    hit_p = float(np.clip(prof.hit_rate + rng.normal(0, prof.rate_spread), 0, 1))
    avoid_p = float(np.clip(prof.avoid_rate + rng.normal(0, prof.rate_spread), 0, 1))
    hit = rng.binomial(draws["attack"], hit_p)
    avoid = rng.binomial(draws["defense"], avoid_p)
    pos = _movement(rng, prof, steps, active)

    out = []
    for t in range(steps):
        sample = BehaviorSample(
            player_id=player_id,
            timestamp=start + t * interval,
            hunting=int(draws["hunting"][t]),
            attack=int(draws["attack"][t]),
            hit=int(hit[t]),
            defense=int(draws["defense"][t]),
            avoidance=int(avoid[t]),
            recovery=int(draws["recovery"][t]),
            item=int(draws["item"][t]),
            collection=int(draws["collection"][t]),
            drop=int(draws["drop"][t]),
            x=round(float(pos[t, 0]), 3),
            y=round(float(pos[t, 1]), 3),
            portal=int(draws["portal"][t]),
        )
        out.append(LabeledSample(sample, label, prof.style))
    return out


def generate(cfg: GeneratorConfig) -> list[LabeledSample]:
    """Emit every requested player's samples, player by player.

    Player ``i`` is generated from a seed derived from (cfg.seed, i) alone, so
    the output does not depend on generation order.
    """
    cfg.validate()
    samples: list[LabeledSample] = []
    index = 0
    for cell in CELLS:
        n = cfg.players_per_cell.get(cell, 0)
        prof = cfg.profiles.get(cell)
        for _ in range(n):
            pid = f"p{index:06d}"
            label = "bot" if cell[1] else "human"
            samples.extend(
                generate_player(prof, pid, label, derive_seed(cfg.seed, index),
                                cfg.interval_seconds, cfg.session)
            )
            index += 1
    return samples
