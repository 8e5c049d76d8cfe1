import numpy as np
import pytest

from botsense.datagen import (
    CELLS,
    PLAYER_MIX,
    GeneratorConfig,
    check_dispersion_order,
    default_mix,
    generate,
    load_profiles,
    parse_cell,
)
from botsense.features import FEATURE_NAMES, extract_player_vectors
from botsense.logmodel import parse_log, serialize_log


def test_player_mix_cells():
    assert PLAYER_MIX[("Killer", False)] == 777 and PLAYER_MIX[("Remainder", True)] == 4251
    assert sum(n for (_, b), n in PLAYER_MIX.items() if b) == 8453


def test_default_mix_100_by_hand():
    alloc = default_mix(100).players_per_cell
    assert alloc == {
        ("Killer", False): 5, ("Achiever", False): 7, ("Explorer", False): 1, ("Remainder", False): 37,
        ("Killer", True): 14, ("Achiever", True): 11, ("Explorer", True): 0, ("Remainder", True): 25,
    }


def test_default_mix_small_and_grand_total():
    alloc = default_mix(8).players_per_cell
    assert sum(alloc.values()) == 8 and min(alloc.values()) >= 0
    assert default_mix(sum(PLAYER_MIX.values())).players_per_cell == PLAYER_MIX
    with pytest.raises(ValueError):
        default_mix(7)


def test_parse_cell():
    assert parse_cell("Killer/bot") == ("Killer", True)
    with pytest.raises(ValueError):
        parse_cell("Killer/robot")


def test_profiles_valid():
    profiles = load_profiles()
    assert set(profiles) == set(CELLS)
    check_dispersion_order(profiles)


def test_deterministic(cell_config):
    cfg = cell_config({("Killer", True): 3, ("Achiever", False): 3}, seed=11)
    assert serialize_log(generate(cfg)) == serialize_log(generate(cfg))


def test_counts_and_labels(cell_config):
    cfg = cell_config({("Killer", True): 10, ("Killer", False): 10})
    vs = extract_player_vectors(generate(cfg))
    assert len({v.player_id for v in vs}) == 20
    assert sum(v.label == "bot" for v in vs) == 10
    assert all(v.style == "Killer" for v in vs)


def test_bot_attack_variance_lower(cell_config):
    cfg = cell_config({("Killer", True): 50, ("Killer", False): 50}, seed=2)
    rows = generate(cfg)
    bot = np.var([r.sample.attack for r in rows if r.label == "bot"])
    human = np.var([r.sample.attack for r in rows if r.label == "human"])
    assert bot < human


def test_style_orderings(cell_config):
    cells = {(s, b): 30 for s in ("Killer", "Achiever", "Explorer", "Remainder") for b in (False, True)}
    vs = extract_player_vectors(generate(cell_config(cells, seed=5)))
    means = {}
    for s in ("Killer", "Achiever", "Explorer", "Remainder"):
        m = np.mean([v.values for v in vs if v.style == s], axis=0)
        means[s] = dict(zip(FEATURE_NAMES, m))
    for feat in ("hunting", "attack", "defense"):
        assert max(means, key=lambda s: means[s][feat]) == "Killer"
    assert max(means, key=lambda s: means[s]["move"]) == "Explorer"


def test_invariants_and_round_trip(small_log):
    for r in small_log:
        assert r.sample.hit <= r.sample.attack and r.sample.avoidance <= r.sample.defense
    assert parse_log(serialize_log(small_log)) == small_log
    assert parse_log(serialize_log(small_log, "jsonl"), "jsonl") == small_log


def test_player_independent_of_mix(cell_config):
    a = generate(cell_config({("Killer", False): 2, ("Killer", True): 1}))
    b = generate(cell_config({("Killer", False): 2, ("Killer", True): 4}))
    assert [r for r in a if r.player_id in ("p000000", "p000001")] == \
        [r for r in b if r.player_id in ("p000000", "p000001")]


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(0, {("Killer", True): 3}).validate()
    with pytest.raises(ValueError):
        GeneratorConfig(0, {("Killer", True): 3, ("Killer", False): -1}).validate()
