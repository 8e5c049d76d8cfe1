import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from botsense.features import (
    FEATURE_NAMES,
    FeatureSet,
    PlayerVector,
    ZScoreScaler,
    aggregate_player,
    derive_interval_features,
    extract_player_vectors,
    fit_scaler,
    project,
    stack,
    standardize,
    vectors_from_csv,
    vectors_to_csv,
)


from conftest import labeled, sample


def test_feature_names():
    assert len(FEATURE_NAMES) == 17
    assert FEATURE_NAMES[:12] == (
        "hunting", "attack", "hit", "defense", "avoidance", "recovery",
        "item", "collection", "drop", "x", "y", "portal",
    )
    assert FEATURE_NAMES[12:] == ("combat1", "combat2", "combat3", "collect", "move")


def test_feature_set_sizes():
    dims = {fs.value: fs.dim for fs in FeatureSet}
    assert dims == {"F17": 17, "F12": 12, "F5": 5, "FB": 6, "FM": 3, "FC": 3}
    assert FeatureSet.parse("fm") is FeatureSet.FM
    with pytest.raises(ValueError):
        FeatureSet.parse("F99")


def test_interval_hand_example():
    cur = sample(t=300, hunting=5, attack=10, avoidance=2, defense=4, recovery=0,
                 collection=4, drop=2, item=3, x=3.0, y=4.0)
    f = derive_interval_features(cur, sample(t=0))
    assert (f.combat1, f.combat2, f.combat3, f.collect, f.move) == (1.0, 0.0, 1.0, 1.0, 5.0)


def test_interval_all_zero():
    f = derive_interval_features(sample(t=300), sample(t=0))
    assert (f.combat1, f.combat2, f.combat3, f.collect, f.move) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_interval_first_sample():
    f = derive_interval_features(sample(hunting=7, attack=7))
    assert f.combat1 == 1.0
    assert f.combat3 is None and f.move is None


def test_interval_rejects_reversed_order():
    with pytest.raises(ValueError):
        derive_interval_features(sample(t=0), sample(t=300))


def test_aggregate_single_sample():
    v = aggregate_player([labeled(attack=6)])
    assert v["attack"] == 6.0 and v["move"] == 0.0 and v.sample_count == 1


def test_aggregate_mean():
    v = aggregate_player([labeled(t=0, attack=4), labeled(t=300, attack=8)])
    assert v["attack"] == 6.0


def test_aggregate_move_average():
    rows = [labeled(t=0), labeled(t=300, x=3.0, y=4.0), labeled(t=600, x=3.0, y=4.0)]
    assert aggregate_player(rows)["move"] == 2.5


def test_aggregate_carries_labels():
    v = aggregate_player([labeled(t=0), labeled(t=300, label="bot", style="Killer")])
    assert (v.label, v.style) == ("bot", "Killer")


def test_extract_orders_and_sorts():
    rows = [labeled("b", 300, x=3.0, y=4.0), labeled("a", 0), labeled("b", 0)]
    vs = extract_player_vectors(rows)
    assert [v.player_id for v in vs] == ["b", "a"]
    assert vs[0]["move"] == 5.0


def test_scaler_hand_example():
    vs = [PlayerVector(str(i), np.full(17, float(i))) for i in (1, 2, 3)]
    sc = fit_scaler(vs)
    assert np.allclose(sc.means, 2.0)
    assert np.allclose(sc.stds, math.sqrt(2 / 3))
    z = standardize(sc, vs[2])
    assert z.values[0] == pytest.approx(1.22474, abs=1e-5)


def test_scaler_constant_and_single():
    vs = [PlayerVector("a", np.arange(17.0))] * 3
    sc = fit_scaler(vs)
    assert np.all(sc.stds == 0)
    assert np.all(sc.transform(stack(vs)) == 0)
    one = fit_scaler(vs[:1])
    assert np.array_equal(one.means, vs[0].values) and np.all(one.stds == 0)


def test_standardize_centre_and_sigma():
    sc = ZScoreScaler(np.full(17, 2.0), np.full(17, 0.5))
    assert np.all(standardize(sc, PlayerVector("a", np.full(17, 2.0))).values == 0)
    assert np.all(standardize(sc, PlayerVector("a", np.full(17, 2.5))).values == 1.0)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.just(17)), elements=st.floats(-1e3, 1e3)))
def test_standardized_moments(matrix):
    sc = fit_scaler(matrix)
    z = sc.transform(matrix)
    live = sc.stds > 1e-6 * (1 + np.abs(sc.means))
    assert np.all(z[:, sc.stds == 0] == 0)
    assert np.all(np.abs(z.mean(axis=0)[live]) < 1e-9)
    assert np.all(np.abs(z.std(axis=0)[live] - 1) < 1e-9)


def test_project():
    v = PlayerVector("a", np.arange(17.0))
    assert np.array_equal(project(v, FeatureSet.F17), v.values)
    assert list(project(v, FeatureSet.FM)) == [v["x"], v["y"], v["portal"]]
    assert len(project(v, "FB")) == 6
    assert list(project(v, FeatureSet.F5)) == [12.0, 13.0, 14.0, 15.0, 16.0]


def test_vector_csv_round_trip(small_vectors):
    assert vectors_from_csv(vectors_to_csv(small_vectors)) == small_vectors


def test_vector_validation():
    with pytest.raises(ValueError):
        PlayerVector("a", np.zeros(16))
    with pytest.raises(ValueError):
        PlayerVector("a", np.full(17, np.nan))
    v = PlayerVector("a", np.zeros(17))
    with pytest.raises(ValueError):
        v.values[0] = 1.0
