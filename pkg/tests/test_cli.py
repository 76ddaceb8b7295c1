import csv
import io
import shutil
from pathlib import Path

import pytest

from lsapprox.cli import HEADERS, main, run
from lsapprox.config import load_config, parse_config, validate
from lsapprox.functions import FUNCTION_NAMES
from lsapprox.operators import FAMILY_NAMES

ROOT = Path(__file__).resolve().parents[1] / "configs"
REFERENCE = sorted((ROOT / "reference").glob("*.cfg"))
INVALID = {
    "lambda_range": "range",
    "domain_mismatch": "domain",
    "unknown_family": "unknown-family",
    "unknown_function": "unknown-function",
    "missing_derivative": "missing-derivative",
    "unknown_experiment": "unknown-experiment",
}


def run_copy(cfg: Path, where: Path) -> tuple[int, Path]:
    where.mkdir(parents=True, exist_ok=True)
    dst = where / cfg.name
    shutil.copy(cfg, dst)
    out = io.StringIO()
    code = run(dst, out=out, err=out)
    return code, load_config(dst).output_path


def test_reference_set_is_complete():
    assert len(REFERENCE) == 5
    assert {load_config(p).experiment for p in REFERENCE} == set(HEADERS)


@pytest.mark.parametrize("cfg", REFERENCE, ids=lambda p: p.stem)
def test_reference_runs_are_byte_identical(cfg, tmp_path):
    code_a, a = run_copy(cfg, tmp_path / "a")
    code_b, b = run_copy(cfg, tmp_path / "b")
    assert code_a == code_b == 0
    assert a.read_bytes() == b.read_bytes()
    svg_a, svg_b = a.with_suffix(".svg"), b.with_suffix(".svg")
    assert svg_a.exists() == load_config(cfg).svg
    if svg_a.exists():
        assert svg_a.read_bytes() == svg_b.read_bytes()


@pytest.mark.parametrize("cfg", REFERENCE, ids=lambda p: p.stem)
def test_reference_headers(cfg, tmp_path):
    _, path = run_copy(cfg, tmp_path)
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == HEADERS[load_config(cfg).experiment]
    assert len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)


@pytest.mark.parametrize("stem,code", INVALID.items())
def test_invalid_configs_are_rejected(stem, code, capsys):
    path = ROOT / "invalid" / f"{stem}.cfg"
    diags = validate(load_config(path))
    assert [d.code for d in diags] == [code]
    assert main(["validate", str(path)]) == 1
    assert capsys.readouterr().out.startswith(f"{code}: ")


def test_invalid_run_exits_one(tmp_path):
    code, path = run_copy(ROOT / "invalid" / "lambda_range.cfg", tmp_path)
    assert code == 1 and not path.exists()


def test_validate_ok(capsys):
    assert main(["validate", str(REFERENCE[0])]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_failed_check_exits_two(tmp_path):
    cfg = tmp_path / "fail.cfg"
    cfg.write_text(
        "experiment = voronovskaja\nfamily = bernstein\nlambda = 0.5\nfunction = sin\n"
        "n_list = 10, 20, 40\nx_grid = 0.3\ntol = 1e-12\noutput = out/fail.csv\n"
    )
    err = io.StringIO()
    assert run(cfg, out=io.StringIO(), err=err) == 2
    assert "check failed" in err.getvalue()
    assert (tmp_path / "out" / "fail.csv").exists()


def test_unguaranteed_shape_is_reported_not_failed(tmp_path):
    # cos is not increasing, so a false verdict is data rather than a failed check
    cfg = tmp_path / "cos.cfg"
    cfg.write_text(
        "experiment = shape\nfamily = bernstein\nlambda = 0.5\nfunction = cos\n"
        "properties = increasing\nn_list = 4\nx_grid = 0:1:11\noutput = out/cos.csv\n"
    )
    assert run(cfg, out=io.StringIO(), err=io.StringIO()) == 0
    rows = list(csv.DictReader((tmp_path / "out" / "cos.csv").open()))
    assert rows[0]["holds"] == "false"


def test_parse_collects_errors():
    cfg = parse_config("experiment = moments\ncolour = blue\nnot a pair\n")
    codes = {d.code for d in validate(cfg)}
    assert {"parse", "unknown-key"} <= codes


def test_list_commands(capsys):
    assert main(["list-families"]) == 0
    assert capsys.readouterr().out.split() == list(FAMILY_NAMES)
    assert main(["list-functions"]) == 0
    assert capsys.readouterr().out.split() == list(FUNCTION_NAMES)
