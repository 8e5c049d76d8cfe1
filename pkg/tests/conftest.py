import numpy as np
import pytest

from botsense.datagen import GeneratorConfig, default_mix, generate
from botsense.features import PlayerVector, extract_player_vectors
from botsense.logmodel import BehaviorSample, LabeledSample

COUNTS = dict(hunting=0, attack=0, hit=0, defense=0, avoidance=0, recovery=0,
              item=0, collection=0, drop=0, portal=0)


def sample(pid="p1", t=0, x=0.0, y=0.0, **counts) -> BehaviorSample:
    return BehaviorSample(player_id=pid, timestamp=t, x=x, y=y, **{**COUNTS, **counts})


def labeled(pid="p1", t=0, label=None, style=None, **kw) -> LabeledSample:
    return LabeledSample(sample(pid, t, **kw), label, style)


def random_vectors(rng, n_bot, n_human, shift=1.5, pid="r"):
    """Synthetic 17-d player vectors; bots are shifted along every axis."""
    out = []
    for i in range(n_bot + n_human):
        is_bot = i < n_bot
        values = rng.normal(shift if is_bot else 0.0, 1.0, size=17)
        out.append(PlayerVector(f"{pid}{i:04d}", values, 10, "bot" if is_bot else "human"))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_log():
    """About 200 generated players with short sessions."""
    cfg = default_mix(200, seed=3, session=(6, 10))
    return generate(cfg)


@pytest.fixture(scope="session")
def small_vectors(small_log):
    return extract_player_vectors(small_log)


@pytest.fixture(scope="session")
def cell_config():
    def make(cells, seed=0, session=(8, 12)):
        return GeneratorConfig(seed=seed, players_per_cell=cells, session=session)
    return make


ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
