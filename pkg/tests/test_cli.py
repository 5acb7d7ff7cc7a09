import csv
import io
import json
import os
from pathlib import Path

import pytest

from amkt import ParseError, SchemaError, ValidationError
from amkt.cli import main
from amkt.errors import IoError, NonFiniteOutput
from amkt.report import emit, normalise, to_csv, to_json
from amkt.runner import run, run_sweep
from amkt.scenario import SweepSpec, load_scenario, parse_scenario

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("AMKT_REGEN_GOLDEN") == "1"

MINIMAL = {
    "market": {"v": 1, "delta_u": 0.4, "m": 0.1, "cost": {"family": "uniform", "lo": 0, "hi": 1}},
    "publishers": [{"id": "p1", "s": 1, "theta": 0.5, "k": 0.01, "lambda": 0.6, "phi": 0.6}],
}

GOLDEN_RUNS = {
    "canonical_eval.json": ["eval", "canonical.json"],
    "canonical_eval.csv": ["eval", "canonical.json", "--format", "csv"],
    "canonical_sweep.csv": [
        "sweep", "canonical.json", "--param", "a", "--lo", "0", "--hi", "1", "--steps", "11",
        "--analyses", "equilibrium,strategy", "--format", "csv",
    ],
    "welfare_eval.json": ["eval", "welfare.json", "--analyses", "equilibrium,welfare"],
}


def write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def scenario(**changes):
    data = json.loads(json.dumps(MINIMAL))
    data.update(changes)
    return parse_scenario(data)


def run_cli(args, out):
    code = main([*args, "--out", str(out)])
    return code, out.read_bytes() if out.exists() else b""


# -- loading -----------------------------------------------------------------


def test_minimal_scenario(tmp_path):
    sc = load_scenario(write(tmp_path, MINIMAL))
    assert sc.market.v == 1.0 and sc.market.cost_dist.support_hi == 1.0
    assert sc.publishers[0].lam == 0.6
    assert sc.tax is None and sc.sim is None and sc.sweep is None


def test_share_sum_names_field(tmp_path):
    data = dict(MINIMAL, publishers=[
        {"id": "a", "s": 0.5, "theta": 1, "k": 0.01, "lambda": 0.5, "phi": 0.1},
        {"id": "b", "s": 0.6, "theta": 1, "k": 0.01, "lambda": 0.5, "phi": 0.1},
    ])
    with pytest.raises(ValidationError) as exc:
        load_scenario(write(tmp_path, data))
    assert exc.value.field == "publishers.s"


def test_pigouvian_tax_resolves_at_run_time():
    sc = scenario(tax="pigouvian")
    assert sc.tax == "pigouvian"
    block = run(sc, ["tax"]).results["tax"]
    assert block["tau"] == pytest.approx(0.9)
    assert block["a_of_tau"] == block["a_star"] == 0.0


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    with pytest.raises(ParseError):
        load_scenario(path)


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_scenario(tmp_path / "nope.json")


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d["market"].pop("v"), "market.v"),
        (lambda d: d["market"].update(v="high"), "market.v"),
        (lambda d: d["publishers"][0].pop("theta"), "publishers[0].theta"),
        (lambda d: d.pop("publishers"), "publishers"),
        (lambda d: d.update(tax="lots"), "tax"),
    ],
)
def test_schema_errors_name_field(mutate, field):
    data = json.loads(json.dumps(MINIMAL))
    mutate(data)
    with pytest.raises(SchemaError) as exc:
        parse_scenario(data)
    assert exc.value.field == field


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d["market"].update(v=-1), "market.v"),
        (lambda d: d.update(a=1.5), "a"),
        (lambda d: d["market"]["cost"].update(family="cauchy"), "market.cost.family"),
        (lambda d: d.update(sweep={"param": "market.v", "lo": 1, "hi": 0, "steps": 5}), "sweep.lo"),
        (lambda d: d.update(sweep={"param": "market.v", "lo": 0, "hi": 1, "steps": 1}), "sweep.steps"),
        (lambda d: d.update(sweep={"param": "market.cost", "lo": 0, "hi": 1, "steps": 3}), "sweep.param"),
        (lambda d: d.update(sweep={"param": "market.zzz", "lo": 0, "hi": 1, "steps": 3}), "sweep.param"),
        (lambda d: d.update(agent_valuation={"B": 1, "B_alt": 2, "C_F": 1}), "agent_valuation.B_alt"),
    ],
)
def test_validation_errors_name_field(mutate, field):
    data = json.loads(json.dumps(MINIMAL))
    mutate(data)
    with pytest.raises(ValidationError) as exc:
        parse_scenario(data)
    assert exc.value.field == field


# -- analyses ------------------------------------------------------------------


def test_equilibrium_and_welfare_block():
    sc = load_scenario(GOLDEN / "welfare.json")
    res = run(sc, ["equilibrium", "welfare"]).results
    assert res["equilibrium"]["a_priv"] == pytest.approx(0.4)
    assert res["equilibrium"]["a_star"] == pytest.approx(0.0)
    assert res["welfare"]["dwl"] == pytest.approx(0.08, abs=1e-12)
    assert set(res) == {"equilibrium", "welfare"}


def test_collapse_block():
    res = run(load_scenario(GOLDEN / "canonical.json"), ["collapse"]).results["collapse"]
    assert res["status"] == "ok"
    assert res["a_c"] == pytest.approx(0.450806661517, abs=1e-9)


def test_collapse_failure_is_in_band():
    res = run(load_scenario(GOLDEN / "welfare.json"), ["equilibrium", "collapse"]).results
    assert res["collapse"]["status"] == "NotViableAtZero"
    assert res["collapse"]["a_c"] is None
    assert res["equilibrium"]["a_priv"] == pytest.approx(0.4)


def test_unknown_analysis():
    with pytest.raises(ValidationError, match="analyses"):
        run(scenario(), ["equilibrium", "astrology"])


def test_sweep_over_share_prices():
    sc = scenario()
    rep = run_sweep(sc, ["equilibrium", "strategy"], SweepSpec("a", 0.0, 1.0, 11))
    prices = [pt["results"]["equilibrium"]["price"] for pt in rep.points]
    assert prices == pytest.approx([1.0 - 0.1 * i for i in range(11)], abs=1e-12)
    assert all(x > y for x, y in zip(prices, prices[1:]))
    null = [pt["results"]["strategy"]["publishers"]["p1"]["revenue_null"] for pt in rep.points]
    assert all(x > y for x, y in zip(null, null[1:]))


def test_sweep_csv_shape():
    rep = run_sweep(scenario(), ["equilibrium", "collapse"], SweepSpec("market.v", 0.3, 2.0, 7))
    rows = list(csv.reader(io.StringIO(to_csv(rep))))
    metrics = {r[3] for r in rows[1:]}
    assert len(rows) - 1 == 7 * len(metrics)


def test_sweep_by_publisher_id():
    rep = run_sweep(scenario(), ["collapse"], SweepSpec("publishers.p1.phi", 0.2, 1.2, 11))
    a_c = [pt["results"]["collapse"]["a_c"] for pt in rep.points]
    ok = [x for x in a_c if x is not None]
    assert all(x > y for x, y in zip(ok, ok[1:]))
    assert rep.points[-1]["results"]["collapse"]["status"] == "NotViableAtZero"


def test_sweep_parallel_matches_serial(monkeypatch):
    sc = load_scenario(GOLDEN / "canonical.json")
    spec = SweepSpec("market.delta_u", 0.1, 0.9, 9)
    serial = to_json(run_sweep(sc, None, spec))
    monkeypatch.setenv("AMKT_THREADS", "4")
    assert to_json(run_sweep(sc, None, spec)) == serial


def test_boundary_fuzz_is_finite_or_fails_loudly(rng):
    for _ in range(60):
        data = json.loads(json.dumps(MINIMAL))
        data["a"] = float(rng.choice([0.0, 1.0, 1e-12, 1 - 1e-12]))
        data["market"]["delta_u"] = float(rng.choice([1e-9, 0.999999, 1.0, 5.0]))
        data["market"]["cost"] = [
            {"family": "uniform", "lo": 0, "hi": 1},
            {"family": "exponential", "rate": 3.0},
            {"family": "logistic", "location": 0.2, "scale": 0.05},
        ][int(rng.integers(3))]
        try:
            text = to_json(run(parse_scenario(data)))
        except NonFiniteOutput:
            continue
        except Exception as exc:  # explicit library error is acceptable
            assert exc.__class__.__module__.startswith("amkt")
            continue
        assert "NaN" not in text and "Infinity" not in text


def test_non_finite_values_refused():
    with pytest.raises(NonFiniteOutput, match="x.y"):
        normalise({"x": {"y": float("nan")}})


# -- CLI -----------------------------------------------------------------------


def test_cli_exit_codes(tmp_path, capsys):
    good = write(tmp_path, MINIMAL)
    assert main(["eval", str(good), "--out", str(tmp_path / "o.json")]) == 0
    bad = write(tmp_path, dict(MINIMAL, a=7), "bad.json")
    assert main(["eval", str(bad)]) == 2
    assert '"field": "a"' in capsys.readouterr().err
    assert main(["eval", str(tmp_path / "missing.json")]) == 4
    assert main(["eval", str(good), "--out", str(tmp_path / "no" / "dir.json")]) == 4
    exp = json.loads(json.dumps(MINIMAL))
    exp["market"]["cost"] = {"family": "exponential", "rate": 1.0}
    assert main(["eval", str(write(tmp_path, exp, "exp.json")), "--analyses", "welfare"]) == 0
    # private share rounds to 1 under an unbounded cost law: surplus is undefined
    exp["market"]["delta_u"] = 1e6
    assert main(["eval", str(write(tmp_path, exp, "exp2.json")), "--analyses", "welfare"]) == 3


def test_cli_seed_override(tmp_path):
    path = GOLDEN / "canonical.json"
    _, a = run_cli(["eval", str(path), "--analyses", "montecarlo", "--seed", "11"], tmp_path / "a.json")
    _, b = run_cli(["eval", str(path), "--analyses", "montecarlo"], tmp_path / "b.json")
    ja, jb = json.loads(a), json.loads(b)
    assert ja["seed"] == {"value": 11, "source": "cli", "rng": "numpy.PCG64"}
    assert jb["seed"]["source"] == "scenario"
    assert ja["results"]["montecarlo"]["a_hat"] != jb["results"]["montecarlo"]["a_hat"]


def test_cli_sweep_requires_grid(tmp_path):
    assert main(["sweep", str(write(tmp_path, MINIMAL)), "--param", "market.v"]) == 2


def test_cli_converge_csv(tmp_path):
    out = tmp_path / "conv.csv"
    code = main(["converge", str(GOLDEN / "canonical.json"), "--seeds", "5", "--m", "10,100", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["seed", "m_users", "tau", "a_hat", "a_true", "abs_error", "ci_halfwidth"]
    assert len(rows) == 1 + 10
    assert out.read_bytes().count(b"\r") == 0


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden(name, tmp_path):
    args = list(GOLDEN_RUNS[name])
    args[1] = str(GOLDEN / args[1])
    code, first = run_cli(args, tmp_path / "first")
    assert code == 0
    _, second = run_cli(args, tmp_path / "second")
    assert first == second
    if REGEN:
        (GOLDEN / name).write_bytes(first)
    assert first == (GOLDEN / name).read_bytes()


def test_emit_to_stdout(capsys):
    emit(run(scenario(), ["equilibrium"]), "json", None)
    assert json.loads(capsys.readouterr().out)["results"]["equilibrium"]["a_priv"] == 0.4
