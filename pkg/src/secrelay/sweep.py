"""Parameter sweeps over the relay mean SNR, written as CSV.

A sweep fixes the topology, the eavesdropper mean SNR (directly or through
``kappa = l_m / l_e``), the direct-link SNRs and the target rate, and steps
``l_m`` over a dB grid for every requested relay count. Figure recipes may
list several ``curves``, each a partial override of the base settings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Union

from . import analytic, asymptotic, oracle
from .errors import DomainError, UsageError
from .model import MAX_RELAYS, ChannelParams, Topology, db_to_linear
from .montecarlo import McConfig, estimate_outage

ESTIMATORS = ("analytic", "asymptotic", "mc", "oracle")
TRACK = "track"

# curves reach outage probabilities near 1e-6, where the library's default
# absolute tolerance would cost relative accuracy in the CSV column
ORACLE_SETTINGS = oracle.QuadratureSettings(abs_tol=1e-18, rel_tol=1e-10)
HEADER = (
    "lambda_m_db", "n", "topology", "rate_nats",
    "p_analytic", "p_asymptotic", "p_mc", "mc_ci_low", "mc_ci_high", "p_oracle",
)

DbOrTrack = Union[float, str, None]


@dataclass(frozen=True)
class SweepSpec:
    lambda_m_db: tuple[float, float, float]
    n_list: tuple[int, ...]
    topology: Topology = Topology.NO_DIRECT
    rate_nats: float = 0.3
    lambda_e_db: Optional[float] = None
    kappa_db: Optional[float] = None
    lambda_sd_db: DbOrTrack = None
    lambda_se_db: DbOrTrack = None
    estimators: tuple[str, ...] = ("analytic",)
    trials: int = 100_000
    seed: int = 0
    shards: Optional[int] = None
    confidence: float = 0.95
    jobs: int = 1
    label: Optional[str] = None

    def __post_init__(self):
        start, stop, step = self.lambda_m_db
        if not all(math.isfinite(x) for x in (start, stop, step)):
            raise UsageError("lambda_m_db", "start, stop and step must be finite")
        if step <= 0:
            raise UsageError("lambda_m_db", f"step must be > 0 (got {step:g})")
        if start > stop:
            raise UsageError("lambda_m_db", f"start {start:g} exceeds stop {stop:g}")
        if not self.n_list:
            raise UsageError("n_relays", "need at least one relay count")
        for n in self.n_list:
            if not 1 <= n <= MAX_RELAYS:
                raise UsageError("n_relays", f"must be in [1, {MAX_RELAYS}] (got {n})")
        if not (math.isfinite(self.rate_nats) and self.rate_nats >= 0):
            raise UsageError("rate_nats", f"must be finite and >= 0 (got {self.rate_nats!r})")
        if (self.lambda_e_db is None) == (self.kappa_db is None):
            raise UsageError("lambda_e_db", "set exactly one of lambda_e_db and kappa_db")
        if not self.estimators:
            raise UsageError("estimators", f"choose at least one of {', '.join(ESTIMATORS)}")
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise UsageError("estimators", f"unknown estimator(s) {', '.join(unknown)}")
        direct = (self.lambda_sd_db, self.lambda_se_db)
        if self.topology is Topology.NO_DIRECT:
            if any(d is not None for d in direct):
                raise UsageError("lambda_sd_db", "direct-link SNRs given for no-direct topology")
            if "oracle" in self.estimators:
                raise UsageError("estimators", "the oracle estimator needs with-direct topology")
        else:
            for name, d in zip(("lambda_sd_db", "lambda_se_db"), direct):
                if d is None:
                    raise UsageError(name, "required for with-direct topology")
            if "asymptotic" in self.estimators and (direct[0] == TRACK) != (direct[1] == TRACK):
                raise UsageError(
                    "lambda_sd_db", "asymptotic estimator needs both direct links fixed or both 'track'"
                )
        if self.trials < 1:
            raise UsageError("trials", f"must be >= 1 (got {self.trials})")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed", f"must be an unsigned 64-bit integer (got {self.seed})")
        if self.shards is not None and self.shards < 1:
            raise UsageError("shards", f"must be >= 1 (got {self.shards})")
        if not 0.0 < self.confidence < 1.0:
            raise UsageError("confidence", f"must lie in (0, 1) (got {self.confidence})")
        if self.jobs < 1:
            raise UsageError("jobs", f"must be >= 1 (got {self.jobs})")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SweepSpec":
        data = dict(data)
        names = {f.name for f in fields(cls)}
        if "rate_bits" in data:
            data["rate_nats"] = _number("rate_bits", data.pop("rate_bits")) * math.log(2.0)
        if "n" in data:
            data["n_list"] = data.pop("n")
        unknown = sorted(set(data) - names)
        if unknown:
            raise UsageError(unknown[0], "unknown setting")
        if "lambda_m_db" not in data:
            raise UsageError("lambda_m_db", "required")
        if "n_list" not in data:
            raise UsageError("n_relays", "required")
        kwargs: dict[str, Any] = {
            "lambda_m_db": parse_range(data.pop("lambda_m_db")),
            "n_list": parse_int_list("n_relays", data.pop("n_list")),
        }
        if "topology" in data:
            try:
                kwargs["topology"] = Topology(data.pop("topology"))
            except ValueError:
                raise UsageError("topology", "must be 'no-direct' or 'with-direct'") from None
        if "estimators" in data:
            kwargs["estimators"] = parse_str_list(data.pop("estimators"))
        for key in ("lambda_sd_db", "lambda_se_db"):
            if key in data:
                kwargs[key] = _db_or_track(key, data.pop(key))
        for key in ("rate_nats", "lambda_e_db", "kappa_db", "confidence"):
            if key in data and data[key] is not None:
                kwargs[key] = _number(key, data.pop(key))
        for key in ("trials", "seed", "shards", "jobs"):
            if key in data and data[key] is not None:
                kwargs[key] = _integer(key, data.pop(key))
        if "label" in data:
            kwargs["label"] = str(data.pop("label"))
        return cls(**kwargs)

    def grid(self) -> list[float]:
        start, stop, step = self.lambda_m_db
        count = math.floor((stop - start) / step + 1e-9) + 1
        return [round(start + i * step, 12) for i in range(count)]

    def mc_config(self) -> McConfig:
        shards = self.shards if self.shards is not None else self.jobs
        return McConfig(self.trials, self.seed, min(shards, self.trials), self.confidence)

    def params_at(self, lambda_m_db: float, n: int) -> ChannelParams:
        try:
            lm = db_to_linear(lambda_m_db)
            if self.lambda_e_db is not None:
                le = db_to_linear(self.lambda_e_db)
            else:
                le = lm / db_to_linear(self.kappa_db)
            if self.topology is Topology.NO_DIRECT:
                return ChannelParams.no_direct(lm, le, n)
            lsd = lm if self.lambda_sd_db == TRACK else db_to_linear(self.lambda_sd_db)
            lse = lm if self.lambda_se_db == TRACK else db_to_linear(self.lambda_se_db)
            return ChannelParams.with_direct(lsd, lse, lm, le, n)
        except (DomainError, OverflowError) as exc:
            raise UsageError("lambda_m_db", f"at {lambda_m_db:g} dB: {exc}") from None

    def points(self) -> list[tuple[float, int, ChannelParams]]:
        """Grid points ordered by relay count, then ``lambda_m_db``; all validated up front."""
        return [(db, n, self.params_at(db, n)) for n in sorted(self.n_list) for db in self.grid()]


@dataclass(frozen=True)
class CurvePoint:
    lambda_m_db: float
    n: int
    topology: Topology
    rate_nats: float
    p_analytic: Optional[float] = None
    p_asymptotic: Optional[float] = None
    p_mc: Optional[float] = None
    mc_ci_low: Optional[float] = None
    mc_ci_high: Optional[float] = None
    p_oracle: Optional[float] = None

    def row(self) -> list[str]:
        return [_fmt(getattr(self, name)) for name in HEADER]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Topology):
        return value.value
    if isinstance(value, int):
        return str(value)
    return format(value, ".10g")


def asymptotic_outage(spec: SweepSpec, params: ChannelParams) -> float:
    """High-SNR counterpart of the exact value for the sweep's curve family."""
    n = params.n_relays
    if not params.has_direct:
        return asymptotic.asym_no_direct(spec.rate_nats, params.lambda_m / params.lambda_e, n)
    ratios = asymptotic.SnrRatios.from_params(params)
    if spec.lambda_sd_db == TRACK:
        return asymptotic.asym_with_direct_scaling(
            spec.rate_nats, ratios.kappa, ratios.kappa_s, ratios.kappa_d, ratios.kappa_e, n
        )
    return asymptotic.asym_with_direct_fixed(
        spec.rate_nats, params.lambda_sd, params.lambda_se, ratios, n
    )


def evaluate_point(spec: SweepSpec, lambda_m_db: float, n: int, params: ChannelParams) -> CurvePoint:
    values: dict[str, float] = {}
    rate = spec.rate_nats
    if "analytic" in spec.estimators:
        values["p_analytic"] = analytic.outage_probability(rate, params)
    if "asymptotic" in spec.estimators:
        values["p_asymptotic"] = asymptotic_outage(spec, params)
    if "mc" in spec.estimators:
        est = estimate_outage(params, rate, spec.mc_config())
        values.update(p_mc=est.p_hat, mc_ci_low=est.ci_low, mc_ci_high=est.ci_high)
    if "oracle" in spec.estimators:
        values["p_oracle"] = oracle.quadrature_outage_with_direct(rate, params, ORACLE_SETTINGS)
    return CurvePoint(lambda_m_db, n, spec.topology, rate, **values)


def run_sweep(spec: SweepSpec) -> list[CurvePoint]:
    points = spec.points()
    if spec.jobs == 1:
        return [evaluate_point(spec, *p) for p in points]
    with ThreadPoolExecutor(max_workers=spec.jobs) as pool:
        return list(pool.map(lambda p: evaluate_point(spec, *p), points))


def to_csv(points: Iterable[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for p in points:
        writer.writerow(p.row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, Optional[float]]]:
    """Parse sweep CSV text back into rows of floats (``None`` for empty cells)."""
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        row: dict[str, Any] = {}
        for key, value in raw.items():
            if key == "topology":
                row[key] = value
            elif key == "n":
                row[key] = int(value)
            else:
                row[key] = float(value) if value != "" else None
        rows.append(row)
    return rows


# ---------------------------------------------------------------- config files


def load_config(path_or_name: str) -> dict[str, Any]:
    """Read a JSON sweep recipe from a path, or by name from the bundled recipes."""
    path = Path(path_or_name)
    try:
        if path.is_file():
            text = path.read_text()
        else:
            name = path.name if path.suffix else path.name + ".json"
            bundled = resources.files("secrelay") / "configs" / name
            if not bundled.is_file():
                raise UsageError("config", f"no such file or bundled recipe: {path_or_name}")
            text = bundled.read_text()
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError("config", f"invalid JSON in {path_or_name}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config", "top level must be a JSON object")
    return data


# mutually exclusive settings: a later layer setting one clears the other
_EXCLUSIVE = (("rate_nats", "rate_bits"), ("lambda_e_db", "kappa_db"))


def merge_layers(*layers: Mapping[str, Any]) -> dict[str, Any]:
    merged: dict[str, Any] = {}
    for layer in layers:
        for a, b in _EXCLUSIVE:
            if a in layer and b in layer:
                raise UsageError(a, f"set only one of {a} and {b}")
            if a in layer:
                merged.pop(b, None)
            if b in layer:
                merged.pop(a, None)
        merged.update(layer)
    return merged


def specs_from_config(config: Mapping[str, Any], overrides: Mapping[str, Any]) -> list[SweepSpec]:
    """Expand a recipe into one spec per curve; command-line overrides win over every layer."""
    base = {k: v for k, v in config.items() if k != "curves"}
    curves = config.get("curves") or [{}]
    if not isinstance(curves, list) or not all(isinstance(c, dict) for c in curves):
        raise UsageError("curves", "must be a list of objects")
    specs = [SweepSpec.from_mapping(merge_layers(base, curve, overrides)) for curve in curves]
    if len(specs) > 1:
        labels = [s.label for s in specs]
        if None in labels or len(set(labels)) != len(labels):
            raise UsageError("curves", "every curve needs a distinct label")
        bad = [lb for lb in labels if not lb.replace("_", "").replace("-", "").isalnum()]
        if bad:
            raise UsageError("curves", f"labels may only use letters, digits, '-' and '_' ({bad[0]!r})")
    return specs


def parse_range(value) -> tuple[float, float, float]:
    if isinstance(value, str):
        parts = value.split(":")
    elif isinstance(value, Mapping):
        parts = [value.get(k) for k in ("start", "stop", "step")]
    else:
        parts = list(value) if isinstance(value, (list, tuple)) else [value]
    if len(parts) == 1:
        v = _number("lambda_m_db", parts[0])
        return (v, v, 1.0)
    if len(parts) != 3:
        raise UsageError("lambda_m_db", "expected start:stop:step")
    start, stop, step = (_number("lambda_m_db", p) for p in parts)
    return (start, stop, step)


def parse_int_list(name: str, value) -> tuple[int, ...]:
    items = value.split(",") if isinstance(value, str) else value
    if isinstance(items, (int, float)):
        items = [items]
    return tuple(_integer(name, v) for v in items)


def parse_str_list(value) -> tuple[str, ...]:
    items = value.split(",") if isinstance(value, str) else value
    return tuple(s.strip() for s in items if str(s).strip())


def _number(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise UsageError(name, f"not a number: {value!r}") from None
    if not math.isfinite(v):
        raise UsageError(name, f"must be finite (got {value!r})")
    return v


def _integer(name: str, value) -> int:
    try:
        v = int(str(value).strip()) if not isinstance(value, int) else value
    except ValueError:
        raise UsageError(name, f"not an integer: {value!r}") from None
    return v


def _db_or_track(name: str, value) -> DbOrTrack:
    if value is None or value == TRACK:
        return value
    return _number(name, value)
