"""Scenario parameters, success rates and the payoff bimatrix.

Alice (the defender) picks the fraction ``alpha`` of trigger samples used
to mark the model; Bob (the attacker) picks an attack intensity ``beta``.
Row ``i`` of every grid is Alice's ``alphas[i]``, column ``j`` is Bob's
``betas[j]``. Indices are zero-based throughout the library.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .profiles import ModelProfile

SIMPLIFIED = "simplified-lambda"
GENERAL = "general-profile"
CSR_MODES = (SIMPLIFIED, GENERAL)

COST_KEYS = (
    "i_def", "i_att", "o_def", "o_att",
    "r_def_minus", "r_def_plus", "r_att_minus", "r_att_plus",
    "k", "lambda",
)


class DomainError(ValueError):
    name = "domain-error"


class InvalidScenario(ValueError):
    name = "invalid-scenario"

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


def _check_fraction(**kw):
    for name, v in kw.items():
        if not 0 <= v <= 1:
            raise DomainError(f"{name}={v!r} outside [0, 1]")


def csr_general(alpha, p, q, beta, r):
    """Computing success rate of a marked model after an attack."""
    _check_fraction(alpha=alpha, p=p, q=q, beta=beta, r=r)
    return (1 - beta) * ((1 - alpha) * p + alpha * q) + beta * r


def csr_simplified(alpha, lam, beta, r):
    """Success rate with the accuracy mix linearized as ``1 - lam * alpha``."""
    _check_fraction(alpha=alpha, beta=beta, r=r)
    if lam < 0:
        raise DomainError(f"lambda={lam!r} is negative")
    base = 1 - lam * alpha
    if not 0 <= base <= 1:
        raise DomainError(f"1 - lambda*alpha = {base!r} outside [0, 1]")
    return (1 - beta) * base + beta * r


def asr(r):
    _check_fraction(r=r)
    return 1 - r


def coo(k, alpha, beta):
    """Shared degradation cost, equal weight on both players' intensities."""
    if k < 0:
        raise DomainError(f"k={k!r} is negative")
    _check_fraction(alpha=alpha, beta=beta)
    return k * (alpha + beta)


@dataclass(frozen=True)
class CostParameters:
    i_def: float = 0.0
    i_att: float = 0.0
    o_def: float = 0.0
    o_att: float = 0.0
    r_def_minus: float = 0.0
    r_def_plus: float = 0.0
    r_att_minus: float = 0.0
    r_att_plus: float = 0.0
    k: float = 0.0
    lam: float = 0.0

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CostParameters":
        unknown = set(d) - set(COST_KEYS)
        if unknown:
            raise ValueError(f"unknown cost keys: {sorted(unknown)}")
        kw = dict(d)
        if "lambda" in kw:
            kw["lam"] = kw.pop("lambda")
        return cls(**kw)


@dataclass(frozen=True)
class Scenario:
    """One fully parameterized game instance.

    Construction never validates; use :func:`validate_scenario`. This lets
    parameter sweeps carry out-of-domain points without raising.
    """

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    robustness: tuple[tuple[float, ...], ...]
    costs: CostParameters = field(default_factory=CostParameters)
    csr_mode: str = SIMPLIFIED
    profiles: tuple[ModelProfile, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        object.__setattr__(self, "betas", tuple(self.betas))
        object.__setattr__(self, "robustness", tuple(tuple(row) for row in self.robustness))
        if self.profiles is not None:
            object.__setattr__(self, "profiles", tuple(self.profiles))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.alphas), len(self.betas)

    def to_dict(self) -> dict:
        d = {
            "alphas": list(self.alphas),
            "betas": list(self.betas),
            "robustness": [list(row) for row in self.robustness],
            "costs": self.costs.to_dict(),
            "csr_mode": self.csr_mode,
        }
        if self.profiles is not None:
            d["profiles"] = [{"alpha": m.alpha, "p": m.p, "q": m.q} for m in self.profiles]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        allowed = {"alphas", "betas", "robustness", "costs", "csr_mode", "profiles"}
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        for key in ("alphas", "betas", "robustness", "costs"):
            if key not in d:
                raise ValueError(f"missing scenario key {key!r}")
        profiles = d.get("profiles")
        if profiles is not None:
            profiles = tuple(ModelProfile(m["alpha"], m["p"], m["q"]) for m in profiles)
        return cls(
            alphas=d["alphas"],
            betas=d["betas"],
            robustness=d["robustness"],
            costs=CostParameters.from_dict(d["costs"]),
            csr_mode=d.get("csr_mode", SIMPLIFIED),
            profiles=profiles,
        )

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def get_param(self, path: str) -> float:
        head, *idx = path.split(".")
        if head == "costs" and len(idx) == 1:
            return self.costs.to_dict()[idx[0]]
        if head in ("alphas", "betas") and len(idx) == 1:
            return getattr(self, head)[int(idx[0])]
        if head == "robustness" and len(idx) == 2:
            return self.robustness[int(idx[0])][int(idx[1])]
        raise KeyError(path)

    def with_param(self, path: str, value: float) -> "Scenario":
        """Copy with one scalar replaced, addressed as ``betas.1``,
        ``robustness.1.1``, ``costs.k`` (zero-based indices)."""
        self.get_param(path)  # raises KeyError for bad paths
        head, *idx = path.split(".")
        if head == "costs":
            key = "lam" if idx[0] == "lambda" else idx[0]
            return replace(self, costs=replace(self.costs, **{key: value}))
        if head in ("alphas", "betas"):
            seq = list(getattr(self, head))
            seq[int(idx[0])] = value
            return replace(self, **{head: tuple(seq)})
        rows = [list(row) for row in self.robustness]
        rows[int(idx[0])][int(idx[1])] = value
        return replace(self, robustness=rows)

    def with_costs(self, **kw) -> "Scenario":
        return replace(self, costs=replace(self.costs, **kw))


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


def _strictly_increasing(xs: Sequence[float]) -> bool:
    return all(a < b for a, b in zip(xs, xs[1:]))


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """Check hard domain constraints and report soft sign conventions.

    Failures make the scenario unusable. Warnings flag departures from the
    usual orientation of the first two strategies (stronger attacks hurt
    robustness, heavier marking helps it); they never block payoffs.
    """
    fail, warn, notes = [], [], []
    s = scenario
    n, m = s.shape

    for name, xs in (("alphas", s.alphas), ("betas", s.betas)):
        if not xs:
            fail.append(f"{name}: empty strategy list")
        if any(not (math.isfinite(x) and 0 <= x <= 1) for x in xs):
            fail.append(f"{name}: entries must lie in [0, 1]")
        if not _strictly_increasing(xs):
            fail.append(f"{name}: must be strictly increasing")

    r = s.robustness
    shape_ok = len(r) == n and all(len(row) == m for row in r)
    if not shape_ok:
        fail.append(f"robustness: expected {n}x{m} grid")
    elif any(not (math.isfinite(v) and 0 <= v <= 1) for row in r for v in row):
        fail.append("robustness: entries must lie in [0, 1]")

    for key, v in s.costs.to_dict().items():
        if not (math.isfinite(v) and v >= 0):
            fail.append(f"costs.{key}: must be a finite nonnegative number")
    lam = s.costs.lam
    if math.isfinite(lam) and lam >= 0:
        for a in s.alphas:
            if math.isfinite(a) and not 0 <= 1 - lam * a <= 1:
                fail.append(f"costs.lambda: 1 - lambda*alpha < 0 at alpha={a!r}")
                break

    if s.csr_mode not in CSR_MODES:
        fail.append(f"csr_mode: must be one of {CSR_MODES}")
    elif s.csr_mode == GENERAL:
        if s.profiles is None:
            fail.append("profiles: required in general-profile mode")
        elif len(s.profiles) != n:
            fail.append(f"profiles: expected {n} entries, got {len(s.profiles)}")
        else:
            for i, (prof, a) in enumerate(zip(s.profiles, s.alphas)):
                if abs(prof.alpha - a) > 1e-12:
                    fail.append(f"profiles.{i}: alpha {prof.alpha!r} does not match alphas.{i}")

    if not fail and n >= 2 and m >= 2:
        if s.betas[0] - s.betas[1] >= 0:
            warn.append("betas: expected beta_1 < beta_2")
        if r[1][0] - r[1][1] <= 0:
            warn.append("robustness: expected r[1][0] > r[1][1] (stronger attack lowers robustness)")
        if r[0][0] - r[1][0] >= 0:
            warn.append("robustness: expected r[0][0] < r[1][0] (heavier marking is more robust)")
        if r[0][1] - r[1][1] >= 0:
            warn.append("robustness: expected r[0][1] < r[1][1] (heavier marking is more robust)")
    if not fail:
        for i, row in enumerate(r):
            if any(a < b for a, b in zip(row, row[1:])):
                notes.append(f"robustness.{i}: not non-increasing in attack intensity")

    return ValidationReport(tuple(fail), tuple(warn), tuple(notes))


def ensure_valid(scenario: Scenario) -> None:
    report = validate_scenario(scenario)
    if not report.ok:
        raise InvalidScenario(report.failures)


def _check_index(scenario: Scenario, i: int, j: int):
    n, m = scenario.shape
    if not (0 <= i < n and 0 <= j < m):
        raise IndexError(f"cell ({i}, {j}) outside {n}x{m} game")


def csr_at(scenario: Scenario, i: int, j: int):
    a, b, r = scenario.alphas[i], scenario.betas[j], scenario.robustness[i][j]
    if scenario.csr_mode == GENERAL:
        prof = scenario.profiles[i]
        return csr_general(a, prof.p, prof.q, b, r)
    return csr_simplified(a, scenario.costs.lam, b, r)


def alice_payoff(scenario: Scenario, i: int, j: int, *, checked: bool = True):
    if checked:
        ensure_valid(scenario)
    _check_index(scenario, i, j)
    c = scenario.costs
    a = scenario.alphas[i]
    rate = csr_at(scenario, i, j)
    shared = coo(c.k, a, scenario.betas[j])
    return -c.i_def - a * c.o_def - (shared + 1 - rate) * c.r_def_minus + rate * c.r_def_plus


def bob_payoff(scenario: Scenario, i: int, j: int, *, checked: bool = True):
    if checked:
        ensure_valid(scenario)
    _check_index(scenario, i, j)
    c = scenario.costs
    b = scenario.betas[j]
    success = asr(scenario.robustness[i][j])
    shared = coo(c.k, scenario.alphas[i], b)
    return -c.i_att - b * c.o_att - (shared + 1 - success) * c.r_att_minus + success * c.r_att_plus


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    u_alice: np.ndarray
    u_bob: np.ndarray
    scenario_digest: str = ""

    def __post_init__(self):
        ua = np.array(self.u_alice, dtype=float)
        ub = np.array(self.u_bob, dtype=float)
        if ua.ndim != 2 or ua.shape != ub.shape:
            raise ValueError(f"payoff grids must be 2-D with equal shapes, got {ua.shape} and {ub.shape}")
        if not (np.isfinite(ua).all() and np.isfinite(ub).all()):
            raise ValueError("payoff entries must be finite")
        ua.flags.writeable = False
        ub.flags.writeable = False
        object.__setattr__(self, "u_alice", ua)
        object.__setattr__(self, "u_bob", ub)

    @property
    def shape(self) -> tuple[int, int]:
        return self.u_alice.shape

    def __eq__(self, other):
        if not isinstance(other, PayoffMatrix):
            return NotImplemented
        return (np.array_equal(self.u_alice, other.u_alice)
                and np.array_equal(self.u_bob, other.u_bob))

    __hash__ = None


def build_payoff_matrix(scenario: Scenario) -> PayoffMatrix:
    ensure_valid(scenario)
    n, m = scenario.shape
    ua = [[alice_payoff(scenario, i, j, checked=False) for j in range(m)] for i in range(n)]
    ub = [[bob_payoff(scenario, i, j, checked=False) for j in range(m)] for i in range(n)]
    return PayoffMatrix(np.array(ua), np.array(ub), scenario.digest())
