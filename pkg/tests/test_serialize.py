import json
from fractions import Fraction as F

from apmeasure import Interval, PiecewiseLinearFn, build_stage, make_measure, triangle_test_function
from apmeasure.serialize import (
    load_measure,
    load_plf,
    measure_from_dict,
    measure_to_dict,
    provenance_sidecar_path,
    save_measure,
    save_plf,
    save_stage,
    stage_to_dicts,
)


def test_measure_round_trip(tmp_path):
    mu = make_measure(
        [(F(-17, 16), F(1, 2)), (0, 1), (F(15, 16), F(1, 2))],
        Interval(F(-4, 3), F(4, 3), True, True))
    path = tmp_path / "m.json"
    save_measure(mu, path)
    assert load_measure(path) == mu


def test_measure_file_is_decimal_free(tmp_path):
    mu = build_stage(2).measure
    path = tmp_path / "m.json"
    save_measure(mu, path)
    payload = json.loads(path.read_text())
    for atom in payload["atoms"]:
        assert "." not in atom["pos"] and "." not in atom["mass"]
    assert load_measure(path) == mu


def test_window_openness_round_trip():
    for flags in [(False, False), (True, False), (False, True), (True, True)]:
        mu = make_measure([(0, 1)], Interval(F(-1), F(1), *flags))
        assert measure_from_dict(measure_to_dict(mu)) == mu


def test_loading_canonicalizes():
    raw = {
        "window": {"lo": "-1", "hi": "1", "lo_open": False, "hi_open": False},
        "atoms": [{"pos": "1/2", "mass": "1/3"}, {"pos": "1/2", "mass": "1/3"},
                  {"pos": "0", "mass": "0"}],
    }
    mu = measure_from_dict(raw)
    assert [(a.position, a.mass) for a in mu.atoms] == [(F(1, 2), F(2, 3))]


def test_stage_sidecar(tmp_path):
    stage = build_stage(2)
    path = tmp_path / "stage2.json"
    side = save_stage(stage, path)
    assert side == provenance_sidecar_path(path)
    assert load_measure(path) == stage.measure
    payload = json.loads(side.read_text())
    assert payload["stage"] == 2
    assert len(payload["atoms"]) == 45
    by_pos = {entry["pos"]: entry for entry in payload["atoms"]}
    cluster_atom = by_pos[str(3 - F(1, 512))]
    assert cluster_atom["stages"] == [2]
    assert cluster_atom["shifts"] == ["3"]
    assert cluster_atom["offsets"] == ["-1/512"]


def test_sidecar_reconstructs_positions():
    _, sidecar = stage_to_dicts(build_stage(2))
    for entry in sidecar["atoms"]:
        total = sum((F(s) for s in entry["shifts"]), F(0))
        total += sum((F(o) for o in entry["offsets"]), F(0))
        assert total == F(entry["pos"])


def test_plf_round_trip(tmp_path):
    for fn in (triangle_test_function(),
               PiecewiseLinearFn((0, 1), (2, 4), zero_outside=False)):
        path = tmp_path / "f.json"
        save_plf(fn, path)
        assert load_plf(path) == fn
