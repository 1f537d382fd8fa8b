import os
import sys
import tempfile
from pathlib import Path

sys.path.append(os.getcwd())

import pandas as pd
import pytest

from app.cli import main
from app.crud.report_crud import read_json_report, read_table_csv
from app.errors import ParameterError
from app.routes import bar as bar_routes
from app.routes import groups as group_routes
from app.schemas.ball_schema import BallReport
from app.schemas.filling_schema import CompareReport, DehnTableReport, FillingReport
from app.schemas.run_config_schema import CommandRequest
from app.services.command_service import run_request

Z2_TEXT = "generators: a b\nrelators: abAB\nsubgroup H: a\nsubgroup K: b\n"


def _write_presentation(root: str) -> str:
    path = Path(root) / "z2.pres"
    path.write_text(Z2_TEXT, encoding="utf-8")
    return str(path)


def test_ball_command_writes_json_and_csv():
    with tempfile.TemporaryDirectory() as tmp:
        pres = _write_presentation(tmp)
        assert main(["ball", "--pres", pres, "--radius", "2", "--loop", "ab", "--out", tmp]) == 0
        report = read_json_report(os.path.join(tmp, "ball.json"), BallReport)
        assert report.vertices == 13
        assert report.volumes == [1, 5, 13]
        assert report.geodesic == ["e", "a", "ab"]
        assert report.presentation_sha256 is not None
        assert report.config.radius == 2
        volumes = pd.read_csv(os.path.join(tmp, "ball_volumes.csv"))
        assert list(volumes["volume"]) == [1, 5, 13]


def test_dehn_then_compare_from_tables():
    with tempfile.TemporaryDirectory() as tmp:
        pres = _write_presentation(tmp)
        assert main(["dehn", "--pres", pres, "--radius", "2", "--kmax", "8", "--out", tmp]) == 0
        table_path = os.path.join(tmp, "dehn_d1.csv")
        assert read_table_csv(table_path)[8] == 4
        report = read_json_report(os.path.join(tmp, "dehn_d1.json"), DehnTableReport)
        assert report.generating_set == ["a", "b"]
        assert main(["compare", "--table-f", table_path, "--table-g", table_path, "--out", tmp]) == 0
        compare = read_json_report(os.path.join(tmp, "compare.json"), CompareReport)
        assert compare.domination.equivalent


def test_cubical_box_filling():
    with tempfile.TemporaryDirectory() as tmp:
        args = ["filling", "--cubical", "3", "--radius", "1", "--box-size", "2", "--out", tmp]
        assert main(args) == 0
        report = read_json_report(os.path.join(tmp, "filling.json"), FillingReport)
        assert report.count == 8
        assert report.status == "exact"


def test_weighted_tables_cannot_prune_translates():
    with tempfile.TemporaryDirectory() as tmp:
        pres = _write_presentation(tmp)
        base = ["dehn", "--pres", pres, "--radius", "2", "--kmax", "8", "--weighted", "--out", tmp]
        assert main(base + ["--prune-translates"]) == 2
        assert main(base) == 0
        compare = ["compare", "--pres", pres, "--radius", "2", "--kmax", "8", "--prune-translates", "--out", tmp]
        assert main(compare) == 0


def test_repeated_runs_write_identical_reports():
    runs = [
        ["ball", "--radius", "2", "--loop", "ab"],
        ["coned", "--radius", "2"],
        ["dehn", "--radius", "2", "--kmax", "6"],
        ["comb", "--radius", "2", "--c1", "1"],
        ["bar", "--selftest", "--samples", "10", "--seed", "5"],
    ]
    with tempfile.TemporaryDirectory() as tmp:
        pres = _write_presentation(tmp)
        for args in runs:
            argv = args + ["--pres", pres, "--out", tmp]
            outputs = []
            for _ in range(2):
                assert main(argv) == 0
                names = sorted(n for n in os.listdir(tmp) if n.endswith((".json", ".csv")))
                outputs.append({n: Path(tmp, n).read_bytes() for n in names})
            assert outputs[0] == outputs[1], args[0]


def test_bar_selftest_exit_code():
    with tempfile.TemporaryDirectory() as tmp:
        assert main(["bar", "--selftest", "--samples", "20", "--out", tmp]) == 0
        assert os.path.exists(os.path.join(tmp, "bar.json"))


def test_error_exit_codes():
    with tempfile.TemporaryDirectory() as tmp:
        assert main(["ball", "--out", tmp]) == 2
        assert main(["ball", "--pres", os.path.join(tmp, "missing.pres"), "--out", tmp]) == 2
        pres = _write_presentation(tmp)
        assert main(["ball", "--pres", pres, "--radius", "-1", "--out", tmp]) == 2
        assert main(["comb", "--pres", pres, "--radius", "1", "--poly", "x - 1", "--out", tmp]) == 2


def test_http_requests_ignore_server_paths():
    request = CommandRequest(presentation_text=Z2_TEXT, options={"radius": 1, "presentation": "/etc/hosts"})
    result = run_request("ball", request)
    assert result.report.vertices == 5
    assert result.report.config.presentation is None


def test_http_request_validation():
    with pytest.raises(ParameterError):
        run_request("ball", CommandRequest(presentation_text=Z2_TEXT, options={"radius": -1}))
    with pytest.raises(ParameterError):
        run_request("nonsense", CommandRequest())


def test_route_functions():
    report = group_routes.ball_endpoint(CommandRequest(presentation_text=Z2_TEXT, options={"radius": 2}))
    assert report.layer_sizes == [1, 4, 8]
    catalog = group_routes.schemas_endpoint()
    assert {"ball", "comb", "bar"} <= set(catalog.schemas)
    bar = bar_routes.bar_endpoint(CommandRequest(options={"chain": "[a,ab]"}))
    assert bar.chain.norms[1] == 4


def test_comb_request():
    request = CommandRequest(presentation_text=Z2_TEXT, options={"radius": 2, "c1": 1})
    report = run_request("comb", request).report
    assert report.alpha.coherent
    assert report.c1_source == "user"
    assert report.subgroups == ["H", "K"]


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"✅ {name}")
            except AssertionError as e:
                print(f"❌ {name}: {e}")
