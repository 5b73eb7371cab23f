import json

import pytest

from rfuwoc.presets import (
    PRESET_PATH_ENV,
    PresetError,
    builtin_presets,
    db_to_linear,
    linear_to_db,
    load_preset,
    load_water,
    parse_preset,
)


def test_builtin_presets_listed():
    assert builtin_presets() == ["fig1", "fig2", "fig3", "fig4"]


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3", "fig4"])
def test_builtin_presets_load(name):
    p = load_preset(name)
    assert p.name == name
    assert p.series()


def test_fig1_has_five_water_series():
    labels = [label for label, _ in load_preset("fig1").series()]
    assert labels == ["[2.4, 0.05]", "[2.4, 0.10]", "[2.4, 0.15]", "[2.4, 0.20]", "[4.7, 0.05]"]


def test_water_table_labels():
    water = load_water()
    assert set(water) == {"[2.4, 0.05]", "[2.4, 0.10]", "[2.4, 0.15]", "[2.4, 0.20]", "[4.7, 0.05]"}


def test_db_roundtrip():
    for x in (-20.0, 0.0, 13.5):
        assert linear_to_db(db_to_linear(x)) == pytest.approx(x)
    assert db_to_linear(10.0) == pytest.approx(10.0)


def test_scenario_applies_db_conversion():
    p = load_preset("fig3")
    _, doc = p.series()[0]
    s = p.scenario(doc)
    assert s.main_rf.mean_snr == pytest.approx(1000.0)
    assert s.uwoc.mu_r == pytest.approx(1.0)
    assert s.uwoc.r == 2


def test_series_override_merges_not_replaces():
    p = load_preset("fig2")
    docs = dict(p.series())
    assert docs["eve 0 dB"]["eavesdropper"]["alpha"] == p.doc["eavesdropper"]["alpha"]
    assert docs["eve 0 dB"]["eavesdropper"]["mean_snr_db"] == 0


def _doc(**changes):
    doc = json.loads(json.dumps(load_preset("fig1").doc))
    for path, value in changes.items():
        node = doc
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[k]
        node[keys[-1]] = value
    return doc


@pytest.mark.parametrize("changes,key", [
    ({"main__alpha": -1.0}, "main.alpha"),
    ({"sweep__step": 0}, "sweep.step"),
    ({"methods": []}, "methods"),
    ({"methods": ["exact", "plot"]}, "methods[1]"),
    ({"rate_s": "high"}, "rate_s"),
    ({"uwoc__mean_snr_db": None}, "uwoc.mean_snr_db"),
])
def test_schema_errors_name_the_offending_key(changes, key):
    with pytest.raises(PresetError, match=key.replace("[", r"\[").replace("]", r"\]")):
        parse_preset(json.dumps(_doc(**changes)))


def test_unknown_top_level_key_rejected():
    doc = _doc()
    doc["colour"] = "red"
    with pytest.raises(PresetError, match="colour"):
        parse_preset(json.dumps(doc))


def test_start_must_be_below_stop():
    with pytest.raises(PresetError, match="sweep.start"):
        parse_preset(json.dumps(_doc(sweep__start=50)))


def test_unknown_water_label():
    doc = _doc()
    doc["series"][2]["uwoc"]["water"] = "[9.9, 9.9]"
    with pytest.raises(PresetError, match=r"series\[2\].uwoc.water"):
        parse_preset(json.dumps(doc))


def test_duplicate_series_labels():
    doc = _doc()
    doc["series"][1]["label"] = doc["series"][0]["label"]
    with pytest.raises(PresetError, match="unique"):
        parse_preset(json.dumps(doc))


def test_invalid_json():
    with pytest.raises(PresetError, match="not valid JSON"):
        parse_preset("{", "broken.json")


def test_missing_preset():
    with pytest.raises(PresetError, match="not found"):
        load_preset("no-such-preset")


def test_search_path_env(tmp_path, monkeypatch):
    doc = _doc(name="custom")
    (tmp_path / "custom.json").write_text(json.dumps(doc))
    monkeypatch.setenv(PRESET_PATH_ENV, str(tmp_path))
    p = load_preset("custom")
    assert p.name == "custom"
    assert p.origin == str(tmp_path / "custom.json")


def test_search_path_shadows_builtin(tmp_path, monkeypatch):
    doc = _doc(name="shadow", rate_s=1.0)
    (tmp_path / "fig1.json").write_text(json.dumps(doc))
    monkeypatch.setenv(PRESET_PATH_ENV, str(tmp_path))
    assert load_preset("fig1").doc["rate_s"] == 1.0


def test_explicit_path(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text(json.dumps(_doc(name="mine")))
    assert load_preset(str(path)).name == "mine"
