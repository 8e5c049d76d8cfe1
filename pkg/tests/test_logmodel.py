import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from botsense.logmodel import (
    COLUMNS,
    LabeledSample,
    LogFormatError,
    group_by_player,
    parse_log,
    read_log,
    serialize_log,
    write_log,
)

from conftest import labeled, sample

HEADER = ",".join(COLUMNS)


def test_columns_order():
    assert COLUMNS == (
        "player_id", "timestamp", "hunting", "attack", "hit", "defense", "avoidance", "recovery",
        "item", "collection", "drop", "x", "y", "portal", "label", "style",
    )


def test_empty_input():
    assert parse_log(HEADER + "\n") == []
    assert parse_log("", format="jsonl") == []


def test_single_row_hand_parsed():
    rows = parse_log(f"{HEADER}\np1,0,2,5,3,4,2,1,10,3,1,0.0,0.0,0,bot,Killer\n")
    assert len(rows) == 1
    s = rows[0]
    assert (s.sample.hunting, s.sample.attack, s.sample.hit) == (2, 5, 3)
    assert (s.sample.defense, s.sample.avoidance, s.sample.recovery) == (4, 2, 1)
    assert (s.sample.item, s.sample.collection, s.sample.drop, s.sample.portal) == (10, 3, 1, 0)
    assert (s.label, s.style) == ("bot", "Killer")


def test_accepts_bytes_and_streams():
    text = f"{HEADER}\np1,0,2,5,3,4,2,1,10,3,1,0.0,0.0,0,,\n"
    a = parse_log(text)
    assert parse_log(text.encode()) == a
    assert parse_log(io.BytesIO(text.encode())) == a
    assert parse_log(io.StringIO(text)) == a
    assert a[0].label is None and a[0].style is None


@pytest.mark.parametrize(
    "row, reason",
    [
        ("p1,0,2,5,6,4,2,1,10,3,1,0.0,0.0,0,bot,Killer", "hit exceeds attack"),
        ("p1,0,2,5,3,4,5,1,10,3,1,0.0,0.0,0,bot,Killer", "avoidance exceeds defense"),
        ("p1,0,-2,5,3,4,2,1,10,3,1,0.0,0.0,0,bot,Killer", "hunting"),
        ("p1,0,x,5,3,4,2,1,10,3,1,0.0,0.0,0,bot,Killer", "non-numeric hunting"),
        ("p1,0,2,5,3,4,2,1,10,3,1,0.0,0.0,0,robot,Killer", "'robot'"),
        ("p1,0,2,5,3,4,2,1,10,3,1,0.0,0.0,0,bot,Bard", "'Bard'"),
        ("p1,0,2,5,3,4,2,1,10,3,1,0.0,0.0,0,,Killer", "style given without label"),
        ("p1,0,2,5,3,4,2,1,10,3,1,0.0,0.0", "column"),
    ],
)
def test_csv_errors_carry_line(row, reason):
    good = "p0,0,0,0,0,0,0,0,0,0,0,0.0,0.0,0,human,Remainder"
    with pytest.raises(LogFormatError) as err:
        parse_log(f"{HEADER}\n{good}\n{good}\n{row}\n")
    assert err.value.line == 4
    assert reason in str(err.value)
    assert "line 4" in str(err.value)


def test_bad_header():
    with pytest.raises(LogFormatError) as err:
        parse_log("player,timestamp\n")
    assert err.value.line == 1


def test_jsonl_errors():
    rec = {c: 0 for c in COLUMNS}
    rec.update(player_id="p1", x=0.0, y=0.0, label="bot", style=None)
    ok = json.dumps(rec)
    with pytest.raises(LogFormatError) as err:
        parse_log(ok + "\n" + json.dumps({**rec, "hit": 1}) + "\n", format="jsonl")
    assert err.value.line == 2 and "hit exceeds attack" in str(err.value)
    with pytest.raises(LogFormatError, match="unknown field"):
        parse_log(json.dumps({**rec, "extra": 1}), format="jsonl")
    with pytest.raises(LogFormatError, match="invalid JSON"):
        parse_log("{nope", format="jsonl")


def test_unknown_format():
    with pytest.raises(ValueError):
        parse_log("", format="xml")


def test_group_sorts_by_timestamp():
    rows = [labeled(t=600), labeled(t=0), labeled(t=300)]
    groups = group_by_player(rows)
    assert [r.timestamp for r in groups["p1"]] == [0, 300, 600]


def test_group_sizes():
    rows = [labeled("a", 0), labeled("b", 0), labeled("a", 300), labeled("b", 300)]
    groups = group_by_player(rows)
    assert len(groups) == 2 and all(len(v) == 2 for v in groups.values())


def test_conflicting_labels_line():
    text = (
        f"{HEADER}\n"
        "p1,0,0,0,0,0,0,0,0,0,0,0.0,0.0,0,bot,\n"
        "p2,0,0,0,0,0,0,0,0,0,0,0.0,0.0,0,human,\n"
        "p1,300,0,0,0,0,0,0,0,0,0,0.0,0.0,0,human,\n"
    )
    with pytest.raises(LogFormatError, match="conflicting labels") as err:
        group_by_player(parse_log(text))
    assert err.value.line == 4


def test_unlabeled_rows_join_labeled_player():
    groups = group_by_player([labeled(t=0, label="bot"), labeled(t=300)])
    assert len(groups["p1"]) == 2


def test_file_round_trip(tmp_path, small_log):
    for ext in ("csv", "jsonl"):
        path = tmp_path / f"log.{ext}"
        write_log(small_log, path)
        assert read_log(path) == small_log


counts = st.integers(0, 50)


@st.composite
def samples(draw):
    attack, defense = draw(counts), draw(counts)
    label = draw(st.sampled_from([None, "human", "bot"]))
    style = draw(st.sampled_from([None, "Killer", "Achiever", "Explorer", "Remainder"])) if label else None
    s = sample(
        pid=draw(st.text("abcxyz019_-", min_size=1, max_size=6)),
        t=draw(st.integers(0, 2**40)),
        x=draw(st.floats(-1e6, 1e6, allow_nan=False)),
        y=draw(st.floats(-1e6, 1e6, allow_nan=False)),
        hunting=draw(counts), attack=attack, hit=draw(st.integers(0, attack)),
        defense=defense, avoidance=draw(st.integers(0, defense)), recovery=draw(counts),
        item=draw(counts), collection=draw(counts), drop=draw(counts), portal=draw(counts),
    )
    return LabeledSample(s, label, style)


@settings(max_examples=60, deadline=None)
@given(st.lists(samples(), max_size=8), st.sampled_from(["csv", "jsonl"]))
def test_round_trip_property(rows, fmt):
    assert parse_log(serialize_log(rows, fmt), fmt) == rows
