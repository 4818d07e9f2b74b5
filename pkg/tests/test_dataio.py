import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexiclock import dataio
from lexiclock.analytics import CurveRow, EvolutionParams
from lexiclock.errors import DatasetError, LexiclockError
from lexiclock.estimation import SweepRow
from lexiclock.simulator import simulate_dataset

META = "variety,name,latitude,longitude,clade\nv1,Alpha,-18.9,47.5,A\nv2,Beta,-23.3,43.7,B\n"
LISTS = "variety\tconcept\tword\nv1\thand\ttanana\nv2\thand\ttanana\nv1\teye\tmaso\nv2\teye\tmaso\nv1\tsun\tmasoandro\n"


def write(tmp_path, lists=LISTS, meta=META):
    lp, mp = tmp_path / "lists.tsv", tmp_path / "meta.csv"
    lp.write_text(lists, encoding="utf-8")
    mp.write_text(meta, encoding="utf-8")
    return dataio.DatasetFiles(lp, mp)


def test_load_well_formed(tmp_path):
    ds = dataio.load_dataset(write(tmp_path))
    assert ds.shape == (2, 3)
    assert ds.concepts == ("hand", "eye", "sun")
    assert ds.words_of("v2") == ("tanana", "maso", "")
    assert ds.varieties[0].latitude == -18.9 and ds.varieties[1].clade == "B"


def test_unknown_variety_is_named(tmp_path):
    files = write(tmp_path, lists=LISTS + "v9\thand\tx\n")
    with pytest.raises(DatasetError, match=r"lists.tsv:7: unknown variety 'v9'"):
        dataio.load_dataset(files)


def test_duplicate_entry_cites_both_lines(tmp_path):
    files = write(tmp_path, lists=LISTS + "v1\thand\tfelatana\n")
    with pytest.raises(DatasetError, match=r"lists.tsv:7: .*first on line 2"):
        dataio.load_dataset(files)


@pytest.mark.parametrize(
    "meta,pattern",
    [
        (META.replace("-18.9", "95"), r"meta.csv:2: latitude"),
        (META.replace("43.7", "east"), r"meta.csv:3: longitude"),
        (META.replace(",A\n", ",\n"), r"meta.csv:2: .*empty clade"),
        (META + "v1,Again,0,0,C\n", r"meta.csv:4: .*already defined on line 2"),
        ("id,name\n", r"meta.csv:1: expected header"),
    ],
)
def test_bad_metadata(tmp_path, meta, pattern):
    with pytest.raises(DatasetError, match=pattern):
        dataio.load_dataset(write(tmp_path, meta=meta))


def test_bad_word_rows(tmp_path):
    with pytest.raises(DatasetError, match=r"lists.tsv:2: expected 3"):
        dataio.load_dataset(write(tmp_path, lists="variety\tconcept\tword\na\tb\tc\td\n"))
    with pytest.raises(DatasetError, match="expected header"):
        dataio.load_dataset(write(tmp_path, lists="lang\tconcept\tword\n"))
    with pytest.raises(DatasetError):
        dataio.load_dataset(dataio.DatasetFiles(tmp_path / "missing.tsv", tmp_path / "meta.csv"))


def test_dataset_round_trip(tmp_path):
    ds = simulate_dataset(1.4e-4, 1.6e-4, 5, 8, 12, 900.0, clade_sizes=(2, 3), seed=3)
    ds = type(ds)(ds.varieties, ds.concepts, [list(r[:-1]) + [""] for r in ds.words])
    lp, mp = tmp_path / "l.tsv", tmp_path / "m.csv"
    dataio.write_dataset(ds, lp, mp)
    assert dataio.load_dataset(dataio.DatasetFiles(lp, mp)) == ds


def test_word_list(tmp_path):
    p = tmp_path / "one.tsv"
    p.write_text("concept\tword\nhand\ttanana\neye\t\n", encoding="utf-8")
    assert dataio.load_word_list(p) == (["hand", "eye"], ["tanana", ""])
    p.write_text("concept\tword\nhand\ta\nhand\tb\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="first on line 2"):
        dataio.load_word_list(p)


def test_format_number():
    assert dataio.format_number(None) == "NA"
    assert dataio.format_number(math.inf) == "inf"
    assert dataio.format_number(7) == "7"
    assert dataio.format_number(0.1) == "0.10000000000000001"
    with pytest.raises(LexiclockError):
        dataio.format_number(math.nan)


def test_curves_csv_header(tmp_path):
    path = tmp_path / "c.csv"
    dataio.write_results([CurveRow(300.0, 0.49, 0.2, 0.19)], path)
    assert path.read_text().splitlines()[0] == "t,r_omega,r_phi,r_varphi"


@given(st.lists(st.tuples(st.floats(allow_nan=False), st.floats(allow_nan=False)), min_size=1, max_size=8))
def test_csv_round_trip_is_bit_exact(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("rt") / "t.csv"
    dataio.write_results(rows, path, columns=["x", "y"])
    back = dataio.read_results(path)
    got = [(float(r["x"]).hex(), float(r["y"]).hex()) for r in back]
    assert got == [(x.hex(), y.hex()) for x, y in rows]


def test_json_output_and_sentinels(tmp_path):
    path = tmp_path / "s.json"
    rows = [SweepRow(0.0, 12, 1.4e-4, 1.3e-4), SweepRow(500.0, 3, None, None)]
    dataio.write_results(rows, path, fmt="json")
    data = json.loads(path.read_text())
    assert data[1] == {"g": 500.0, "pair_count": 3, "lambda_g": None, "mu_hat_g": None}
    assert dataio.read_results(path, "json")[0]["lambda_g"] == 1.4e-4
    csv_path = tmp_path / "s.csv"
    dataio.write_results(rows, csv_path)
    assert csv_path.read_text().splitlines()[2] == "500,3,NA,NA"


def test_write_results_rejects():
    with pytest.raises(LexiclockError):
        dataio.write_results([(1, 2)], None)
    with pytest.raises(LexiclockError):
        dataio.write_results([(1, 2)], None, columns=["a"])
    with pytest.raises(LexiclockError):
        dataio.write_results([(1,)], None, fmt="xml", columns=["a"])


def test_config_overlay_and_env(tmp_path, monkeypatch):
    monkeypatch.delenv(dataio.CONFIG_ENV, raising=False)
    assert dataio.params_from_config(dataio.load_config()) == EvolutionParams.default()
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"lambda": 2e-4, "theta": 0.4}')
    loaded = dataio.load_config(cfg)
    assert loaded["lambda"] == 2e-4 and loaded["theta"] == 0.4 and loaded["m"] == 207
    monkeypatch.setenv(dataio.CONFIG_ENV, str(cfg))
    assert dataio.load_config()["lambda"] == 2e-4


def test_config_errors(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"lambda": 2e-4, "speed": 1}')
    with pytest.raises(LexiclockError, match="unknown config keys"):
        dataio.load_config(cfg)
    cfg.write_text("{oops")
    with pytest.raises(LexiclockError, match="invalid JSON"):
        dataio.load_config(cfg)
    cfg.write_text("[1, 2]")
    with pytest.raises(LexiclockError):
        dataio.load_config(cfg)
