"""Scenario files: JSON parsing, schema checks and invariant validation.

A scenario looks like::

    {
      "market": {"v": 1, "delta_u": 0.4, "m": 0.1,
                 "cost": {"family": "uniform", "lo": 0, "hi": 1}},
      "publishers": [{"id": "p1", "s": 1, "theta": 0.5, "k": 0.01,
                      "lambda": 0.6, "phi": 0.6}],
      "agent_valuation": {"B": 1.0, "B_alt": 0.7, "C_F": 0.2},
      "tax": "pigouvian",
      "a": 0.3,
      "sim": {"m_users": 10000, "seed": 7, "tau": 0},
      "sweep": {"param": "market.v", "lo": 0.1, "hi": 2.0, "steps": 20}
    }

Only ``market`` and ``publishers`` are required. ``a`` pins the delegation
share used for prices and publisher strategies; without it the share is
the (taxed) private equilibrium.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

from .cost_model import CostDistribution
from .errors import AmktError, IoError, ParseError, SchemaError, ValidationError
from .market import MarketParams
from .publisher import AgentValuation, PublisherProfile, validate_roster

PIGOUVIAN = "pigouvian"
DEFAULT_M_USERS = 10_000
DEFAULT_SEED = 0

# sweepable paths that may be absent from the file
_OPTIONAL_SCALARS = {"a", "tax"}


@dataclass(frozen=True)
class SimSpec:
    m_users: int = DEFAULT_M_USERS
    seed: Optional[int] = None
    tau: Union[float, str] = 0.0


@dataclass(frozen=True)
class SweepSpec:
    param: str
    lo: float
    hi: float
    steps: int

    def values(self) -> list[float]:
        n = self.steps - 1
        return [self.lo + (self.hi - self.lo) * i / n for i in range(self.steps)]


@dataclass(frozen=True)
class Scenario:
    market: MarketParams
    publishers: tuple[PublisherProfile, ...]
    agent_valuation: Optional[AgentValuation] = None
    tax: Union[None, float, str] = None
    a: Optional[float] = None
    sim: Optional[SimSpec] = None
    sweep: Optional[SweepSpec] = None
    raw: Optional[dict] = None

    def digest(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _number(obj: dict, key: str, where: str, required: bool = True, default=None) -> Optional[float]:
    if key not in obj:
        if required:
            raise SchemaError(f"{where}.{key}", "missing required field")
        return default
    value = obj[key]
    if not _is_number(value):
        raise SchemaError(f"{where}.{key}", f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(f"{where}.{key}", "must be finite")
    return float(value)


def _integer(obj: dict, key: str, where: str, default: Optional[int] = None) -> Optional[int]:
    if key not in obj:
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise SchemaError(f"{where}.{key}", f"expected an integer, got {value!r}")
    return value


def _object(obj: dict, key: str, where: str, required: bool = True) -> Optional[dict]:
    if key not in obj:
        if required:
            raise SchemaError(f"{where}{key}", "missing required field")
        return None
    value = obj[key]
    if not isinstance(value, dict):
        raise SchemaError(f"{where}{key}", f"expected an object, got {type(value).__name__}")
    return value


def _fee(value: Any, field: str) -> Union[float, str]:
    if value == PIGOUVIAN:
        return PIGOUVIAN
    if not _is_number(value) or not math.isfinite(value):
        raise SchemaError(field, f'expected a number or "{PIGOUVIAN}", got {value!r}')
    return float(value)


def _wrap(field: str, exc: AmktError) -> ValidationError:
    if isinstance(exc, ValidationError):
        return exc
    return ValidationError(field, str(exc))


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario document.

    Raises:
        SchemaError: a field is missing or has the wrong type.
        ValidationError: a value breaks an invariant (e.g. shares not summing to one).
    """
    if not isinstance(data, dict):
        raise SchemaError("<root>", "scenario must be a JSON object")

    market = _object(data, "market", "")
    cost_spec = _object(market, "cost", "market.")
    try:
        cost = CostDistribution.from_dict(cost_spec)
    except ValidationError as exc:
        raise ValidationError("market." + exc.field, str(exc).split(": ", 1)[-1]) from None
    params = MarketParams(
        v=_number(market, "v", "market"),
        delta_u=_number(market, "delta_u", "market"),
        m=_number(market, "m", "market"),
        cost_dist=cost,
    )

    if "publishers" not in data:
        raise SchemaError("publishers", "missing required field")
    entries = data["publishers"]
    if not isinstance(entries, list) or not entries:
        raise SchemaError("publishers", "expected a nonempty list")
    roster = []
    for i, entry in enumerate(entries):
        where = f"publishers[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(where, "expected an object")
        pub_id = entry.get("id")
        if not isinstance(pub_id, str) or not pub_id:
            raise SchemaError(f"{where}.id", f"expected a nonempty string, got {pub_id!r}")
        roster.append(
            PublisherProfile(
                id=pub_id,
                s=_number(entry, "s", where),
                theta=_number(entry, "theta", where),
                k=_number(entry, "k", where),
                lam=_number(entry, "lambda", where),
                phi=_number(entry, "phi", where),
            )
        )
    try:
        validate_roster(roster)
    except AmktError as exc:
        raise _wrap("publishers", exc) from None

    av = None
    av_spec = _object(data, "agent_valuation", "", required=False)
    if av_spec is not None:
        av = AgentValuation(
            b=_number(av_spec, "B", "agent_valuation"),
            b_alt=_number(av_spec, "B_alt", "agent_valuation"),
            c_f=_number(av_spec, "C_F", "agent_valuation"),
        )

    tax = _fee(data["tax"], "tax") if "tax" in data and data["tax"] is not None else None

    a = _number(data, "a", "", required=False)
    if a is not None and not 0.0 <= a <= 1.0:
        raise ValidationError("a", f"must lie in [0, 1], got {a}")

    sim = None
    sim_spec = _object(data, "sim", "", required=False)
    if sim_spec is not None:
        m_users = _integer(sim_spec, "m_users", "sim", DEFAULT_M_USERS)
        if m_users < 1:
            raise ValidationError("sim.m_users", f"must be >= 1, got {m_users}")
        seed = _integer(sim_spec, "seed", "sim")
        if seed is not None and not 0 <= seed < 2**64:
            raise ValidationError("sim.seed", "must be a 64-bit unsigned integer")
        sim = SimSpec(m_users=m_users, seed=seed, tau=_fee(sim_spec.get("tau", 0.0), "sim.tau"))

    sweep = None
    sweep_spec = _object(data, "sweep", "", required=False)
    if sweep_spec is not None:
        param = sweep_spec.get("param")
        if not isinstance(param, str):
            raise SchemaError("sweep.param", "expected a dotted parameter path")
        sweep = SweepSpec(
            param=param,
            lo=_number(sweep_spec, "lo", "sweep"),
            hi=_number(sweep_spec, "hi", "sweep"),
            steps=_integer(sweep_spec, "steps", "sweep", 0),
        )
        check_sweep(data, sweep)

    return Scenario(
        market=params,
        publishers=tuple(roster),
        agent_valuation=av,
        tax=tax,
        a=a,
        sim=sim,
        sweep=sweep,
        raw=copy.deepcopy(data),
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read, decode and validate a scenario file.

    Raises:
        IoError: the file cannot be read.
        ParseError: the file is not valid JSON.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("<file>", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_scenario(data)


def _resolve(data: dict, path: str):
    """Container and key addressed by a dotted path; list items match by index or id."""
    parts = path.split(".")
    node: Any = data
    for part in parts[:-1]:
        if isinstance(node, dict) and part in node:
            node = node[part]
        elif isinstance(node, list):
            if part.isdigit() and int(part) < len(node):
                node = node[int(part)]
            else:
                match = [x for x in node if isinstance(x, dict) and x.get("id") == part]
                if not match:
                    raise ValidationError("sweep.param", f"{path!r} does not name a field")
                node = match[0]
        else:
            raise ValidationError("sweep.param", f"{path!r} does not name a field")
    if not isinstance(node, dict):
        raise ValidationError("sweep.param", f"{path!r} does not name a field")
    return node, parts[-1]


def check_sweep(data: dict, sweep: SweepSpec) -> None:
    if sweep.steps < 2:
        raise ValidationError("sweep.steps", f"must be >= 2, got {sweep.steps}")
    if not sweep.lo < sweep.hi:
        raise ValidationError("sweep.lo", f"must be < sweep.hi, got {sweep.lo} >= {sweep.hi}")
    node, key = _resolve(data, sweep.param)
    if key not in node:
        if sweep.param in _OPTIONAL_SCALARS:
            return
        raise ValidationError("sweep.param", f"{sweep.param!r} does not name a field")
    if not _is_number(node[key]):
        raise ValidationError("sweep.param", f"{sweep.param!r} is not a numeric scalar")


def with_param(scenario: Scenario, path: str, value: float) -> Scenario:
    """Copy of the scenario with one scalar replaced, re-validated."""
    data = copy.deepcopy(scenario.raw)
    node, key = _resolve(data, path)
    node[key] = value
    data.pop("sweep", None)
    return parse_scenario(data)
