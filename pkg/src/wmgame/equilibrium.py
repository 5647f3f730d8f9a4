"""Pure and mixed equilibria of the watermarking game.

Three independent routes give the 2x2 mixed equilibrium:

* ``mixed_2x2_simplified`` / ``mixed_2x2_closed_form``: closed forms in the
  scenario's structural differences (robustness, intensity and marking
  gaps), never touching the payoff matrix;
* ``mixed_2x2_from_matrix``: the indifference conditions solved directly on
  the built bimatrix;
* ``support_enumeration``: a brute-force oracle for any small bimatrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .game_core import (
    SIMPLIFIED,
    PayoffMatrix,
    Scenario,
    build_payoff_matrix,
    ensure_valid,
    validate_scenario,
)

PROB_SUM_TOL = 1e-12
ENDPOINT_SLACK = 1e-12
DENOM_TOL = 1e-12
ASSUMPTION_RTOL = 1e-12
INDIFFERENCE_TOL = 1e-9
ORACLE_TOL = 1e-9
PIVOT_TOL = 1e-10
ORACLE_MAX_DIM = 8

METHODS = ("auto", "simplified", "general", "matrix", "oracle")
METHOD_TAGS = {
    "simplified": "closed-form-simplified",
    "general": "closed-form-general",
    "matrix": "matrix-indifference",
    "oracle": "oracle",
}


class EquilibriumError(ValueError):
    name = "equilibrium-error"


class DimensionError(EquilibriumError):
    name = "dimension-error"


class ModeError(EquilibriumError):
    name = "mode-error"


class DegenerateDenominator(EquilibriumError):
    name = "degenerate-denominator"


class AssumptionViolated(EquilibriumError):
    name = "assumption-violated"


class SizeLimitExceeded(EquilibriumError):
    name = "size-limit-exceeded"


class ProbabilityOutOfRange(EquilibriumError):
    """The indifference solution is not an interior probability pair."""

    name = "probability-out-of-range"

    def __init__(self, pr_alpha1, pr_beta1):
        self.pr_alpha1 = pr_alpha1
        self.pr_beta1 = pr_beta1
        super().__init__(f"Pr(alpha_1)={pr_alpha1!r}, Pr(beta_1)={pr_beta1!r} not both in (0, 1)")


@dataclass(frozen=True)
class MixedProfile:
    alice: tuple[float, ...]
    bob: tuple[float, ...]

    def __post_init__(self):
        for who in ("alice", "bob"):
            probs = tuple(float(x) for x in getattr(self, who))
            object.__setattr__(self, who, probs)
            if not probs:
                raise ValueError(f"{who}: empty distribution")
            if any(not 0 <= x <= 1 for x in probs):
                raise ValueError(f"{who}: probabilities must lie in [0, 1]: {probs}")
            if abs(sum(probs) - 1) > PROB_SUM_TOL:
                raise ValueError(f"{who}: probabilities sum to {sum(probs)!r}")

    @classmethod
    def two_by_two(cls, pr_alpha1, pr_beta1) -> "MixedProfile":
        return cls((pr_alpha1, 1 - pr_alpha1), (pr_beta1, 1 - pr_beta1))

    @property
    def pr_alpha1(self) -> float:
        return self.alice[0]

    @property
    def pr_beta1(self) -> float:
        return self.bob[0]

    @property
    def is_pure(self) -> bool:
        return max(self.alice) == 1 and max(self.bob) == 1

    @property
    def is_totally_mixed(self) -> bool:
        return min(self.alice) > 0 and min(self.bob) > 0

    def close_to(self, other: "MixedProfile", tol: float) -> bool:
        if len(self.alice) != len(other.alice) or len(self.bob) != len(other.bob):
            return False
        a = np.abs(np.subtract(self.alice, other.alice)).max()
        b = np.abs(np.subtract(self.bob, other.bob)).max()
        return max(a, b) <= tol


@dataclass(frozen=True)
class PayoffDeltas:
    d_bob_2star: float
    d_bob_star1: float
    d_bob_star2: float
    d_alice_star2: float
    d_alice_1star: float
    d_alice_2star: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.d_bob_2star, self.d_bob_star1, self.d_bob_star2,
                self.d_alice_star2, self.d_alice_1star, self.d_alice_2star)


@dataclass(frozen=True)
class StructuralDeltas:
    d_r_star1: float
    d_r_star2: float
    d_r_1star: float
    d_r_2star: float
    d_alpha: float
    d_beta: float
    varrho: float
    rho: float

    @property
    def column_gap(self) -> float:
        """Change of the marking gap across attacks, ``d_r_star2 - d_r_star1``."""
        return self.d_r_star2 - self.d_r_star1

    @property
    def row_gap(self) -> float:
        """Change of the attack gap across models, ``d_r_2star - d_r_1star``.

        Algebraically equal to :attr:`column_gap`.
        """
        return self.d_r_2star - self.d_r_1star


@dataclass(frozen=True)
class EquilibriumReport:
    pure: tuple[tuple[int, int], ...]
    mixed: MixedProfile | None
    mixed_method: str | None
    residuals: tuple[float, float] | None
    feasibility: str
    diagnostics: tuple[str, ...] = ()
    oracle: tuple[MixedProfile, ...] = ()
    degenerate: bool = False
    warnings: tuple[str, ...] = field(default=())


# --- pure strategies ------------------------------------------------------

def best_responses(matrix: PayoffMatrix, player: str, opponent_index: int) -> set[int]:
    """All maximizers of ``player``'s payoff against a fixed opponent strategy."""
    n, m = matrix.shape
    if player == "alice":
        if not 0 <= opponent_index < m:
            raise IndexError(f"bob strategy {opponent_index} out of range")
        line = matrix.u_alice[:, opponent_index]
    elif player == "bob":
        if not 0 <= opponent_index < n:
            raise IndexError(f"alice strategy {opponent_index} out of range")
        line = matrix.u_bob[opponent_index, :]
    else:
        raise ValueError(f"unknown player {player!r}")
    best = line.max()
    return {int(k) for k in np.flatnonzero(line == best)}


def pure_equilibria(matrix: PayoffMatrix) -> list[tuple[int, int]]:
    n, m = matrix.shape
    alice_br = [best_responses(matrix, "alice", j) for j in range(m)]
    bob_br = [best_responses(matrix, "bob", i) for i in range(n)]
    return [(i, j) for i in range(n) for j in range(m)
            if i in alice_br[j] and j in bob_br[i]]


# --- 2x2 deltas -----------------------------------------------------------

def _require_2x2(shape):
    if tuple(shape) != (2, 2):
        raise DimensionError(f"closed forms need a 2x2 game, got {shape[0]}x{shape[1]}")


def payoff_deltas(matrix: PayoffMatrix) -> PayoffDeltas:
    _require_2x2(matrix.shape)
    A, B = matrix.u_alice, matrix.u_bob
    return PayoffDeltas(
        d_bob_2star=B[1, 0] - B[1, 1],
        d_bob_star1=B[0, 0] - B[1, 0],
        d_bob_star2=B[0, 1] - B[1, 1],
        d_alice_star2=A[0, 1] - A[1, 1],
        d_alice_1star=A[0, 0] - A[0, 1],
        d_alice_2star=A[1, 0] - A[1, 1],
    )


def _require_simplified(scenario: Scenario):
    _require_2x2(scenario.shape)
    if scenario.csr_mode != SIMPLIFIED:
        raise ModeError(f"closed form needs csr_mode={SIMPLIFIED!r}, got {scenario.csr_mode!r}")


def expansion_deltas(scenario: Scenario) -> PayoffDeltas:
    """The six payoff differences expanded in the scenario's parameters.

    Initial costs cancel and never appear.
    """
    _require_simplified(scenario)
    c = scenario.costs
    a1, a2 = scenario.alphas
    b1, b2 = scenario.betas
    (r11, r12), (r21, r22) = scenario.robustness
    k, lam = c.k, c.lam
    def_scale = c.r_def_plus + c.r_def_minus
    return PayoffDeltas(
        d_bob_2star=(b2 - b1) * c.o_att + (r22 - r21) * c.r_att_plus
        - (k * (b1 - b2) - (r22 - r21)) * c.r_att_minus,
        d_bob_star1=(r21 - r11) * c.r_att_plus - (k * (a1 - a2) - (r21 - r11)) * c.r_att_minus,
        d_bob_star2=(r22 - r12) * c.r_att_plus - (k * (a1 - a2) - (r22 - r12)) * c.r_att_minus,
        d_alice_star2=(a2 - a1) * c.o_def + k * (a2 - a1) * c.r_def_minus
        + (lam * (1 - b2) * (a2 - a1) + b2 * (r12 - r22)) * def_scale,
        d_alice_1star=k * (b2 - b1) * c.r_def_minus
        + ((b2 - b1) * (1 - lam * a1) + (b1 * r11 - b2 * r12)) * def_scale,
        d_alice_2star=k * (b2 - b1) * c.r_def_minus
        + ((b2 - b1) * (1 - lam * a2) + (b1 * r21 - b2 * r22)) * def_scale,
    )


def _structural(scenario: Scenario, num=float) -> StructuralDeltas:
    a1, a2 = map(num, scenario.alphas)
    b1, b2 = map(num, scenario.betas)
    (r11, r12), (r21, r22) = ((num(x) for x in row) for row in scenario.robustness)
    lam = num(scenario.costs.lam)
    d_r_star1 = r11 - r21
    d_r_star2 = r12 - r22
    d_alpha = a1 - a2
    d_beta = b1 - b2
    return StructuralDeltas(
        d_r_star1=d_r_star1,
        d_r_star2=d_r_star2,
        d_r_1star=r11 - r12,
        d_r_2star=r21 - r22,
        d_alpha=d_alpha,
        d_beta=d_beta,
        varrho=lam * d_alpha * (1 - b2) - b2 * d_r_star2,
        rho=lam * d_alpha * d_beta + b1 * d_r_star1 - b2 * d_r_star2,
    )


def structural_deltas(scenario: Scenario) -> StructuralDeltas:
    _require_2x2(scenario.shape)
    return _structural(scenario)


# --- mixed equilibria, 2x2 ------------------------------------------------

def _ratio(num, den, what):
    if abs(den) <= DENOM_TOL:
        raise DegenerateDenominator(f"{what} denominator {den!r} is (numerically) zero")
    return num / den


def _interior(pr_alpha1, pr_beta1) -> MixedProfile:
    lo, hi = ENDPOINT_SLACK, 1 - ENDPOINT_SLACK
    if not (lo < pr_alpha1 < hi and lo < pr_beta1 < hi):
        raise ProbabilityOutOfRange(pr_alpha1, pr_beta1)
    return MixedProfile.two_by_two(pr_alpha1, pr_beta1)


def matrix_probabilities(matrix: PayoffMatrix) -> tuple[float, float]:
    """Raw (Pr alpha_1, Pr beta_1) from the indifference conditions, unchecked."""
    d = payoff_deltas(matrix)
    pa = _ratio(-d.d_bob_2star, d.d_bob_star1 - d.d_bob_star2, "Pr(alpha_1)")
    pb = _ratio(-d.d_alice_star2, d.d_alice_1star - d.d_alice_2star, "Pr(beta_1)")
    return pa, pb


def mixed_2x2_from_matrix(matrix: PayoffMatrix) -> MixedProfile:
    return _interior(*matrix_probabilities(matrix))


def _ratio_exact(num, den, what) -> float:
    # num and den are exact rationals; one final rounding
    if abs(den) <= DENOM_TOL:
        raise DegenerateDenominator(f"{what} denominator {float(den)!r} is (numerically) zero")
    return float(num / den)


def closed_form_probabilities(scenario: Scenario) -> tuple[float, float]:
    """Raw (Pr alpha_1, Pr beta_1) from the general closed form, unchecked.

    Evaluated exactly on the (binary) inputs and rounded once, so the result
    stays accurate when the numerator cancels near the feasibility boundary.
    """
    _require_simplified(scenario)
    c = scenario.costs
    s = _structural(scenario, Fraction)
    k, o_att, o_def = Fraction(c.k), Fraction(c.o_att), Fraction(c.o_def)
    att_minus, def_minus = Fraction(c.r_att_minus), Fraction(c.r_def_minus)
    att_scale = Fraction(c.r_att_plus) + att_minus
    def_scale = Fraction(c.r_def_plus) + def_minus
    pa = _ratio_exact(
        s.d_beta * o_att + k * s.d_beta * att_minus + s.d_r_2star * att_scale,
        s.column_gap * att_scale,
        "Pr(alpha_1)",
    )
    pb = _ratio_exact(
        s.d_alpha * o_def + k * s.d_alpha * def_minus + s.varrho * def_scale,
        s.rho * def_scale,
        "Pr(beta_1)",
    )
    return pa, pb


def mixed_2x2_closed_form(scenario: Scenario) -> MixedProfile:
    return _interior(*closed_form_probabilities(scenario))


def _close_rel(x, y, rtol):
    return abs(x - y) <= rtol * max(abs(x), abs(y))


def ongoing_costs_tied(scenario: Scenario) -> bool:
    """Whether each ongoing cost equals ``k`` times that player's positive reward."""
    c = scenario.costs
    return (_close_rel(c.o_att, c.k * c.r_att_plus, ASSUMPTION_RTOL)
            and _close_rel(c.o_def, c.k * c.r_def_plus, ASSUMPTION_RTOL))


def simplified_probabilities(scenario: Scenario) -> tuple[float, float]:
    """Raw (Pr alpha_1, Pr beta_1) when ongoing costs are tied to rewards."""
    _require_simplified(scenario)
    if not ongoing_costs_tied(scenario):
        c = scenario.costs
        raise AssumptionViolated(
            f"need o_att == k*r_att_plus and o_def == k*r_def_plus; got "
            f"o_att={c.o_att!r} vs {c.k * c.r_att_plus!r}, o_def={c.o_def!r} vs {c.k * c.r_def_plus!r}")
    k = Fraction(scenario.costs.k)
    s = _structural(scenario, Fraction)
    pa = _ratio_exact(k * s.d_beta + s.d_r_2star, s.column_gap, "Pr(alpha_1)")
    pb = _ratio_exact(k * s.d_alpha + s.varrho, s.rho, "Pr(beta_1)")
    return pa, pb


def mixed_2x2_simplified(scenario: Scenario) -> MixedProfile:
    return _interior(*simplified_probabilities(scenario))


def indifference_residuals(matrix: PayoffMatrix, profile: MixedProfile) -> tuple[float, float]:
    """Signed gaps (Bob's column 1 minus column 2, Alice's row 1 minus row 2)
    in expected payoff under the opponent's mix."""
    _require_2x2(matrix.shape)
    if len(profile.alice) != 2 or len(profile.bob) != 2:
        raise DimensionError("profile does not match a 2x2 game")
    A, B = matrix.u_alice, matrix.u_bob
    x1, x2 = profile.alice
    y1, y2 = profile.bob
    bob_gap = x1 * B[0, 0] + x2 * B[1, 0] - x1 * B[0, 1] - x2 * B[1, 1]
    alice_gap = y1 * A[0, 0] + y2 * A[0, 1] - y1 * A[1, 0] - y2 * A[1, 1]
    return float(bob_gap), float(alice_gap)


# --- support enumeration --------------------------------------------------

def _solve(a: np.ndarray, b: np.ndarray):
    """Gaussian elimination with partial pivoting; None when a pivot is tiny."""
    a = a.astype(float)
    b = b.astype(float)
    n = len(b)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) < PIVOT_TOL:
            return None
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            f = a[row, col] / a[col, col]
            a[row, col:] -= f * a[col, col:]
            b[row] -= f * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


def _mix_making_indifferent(grid: np.ndarray, own: tuple[int, ...], other: tuple[int, ...]):
    """Distribution over ``own`` rows of ``grid`` equalizing payoffs on ``other``
    columns. Returns (weights, common value) or None."""
    k = len(own)
    sub = grid[np.ix_(own, other)]
    a = np.zeros((k + 1, k + 1))
    a[:k, :k] = sub.T
    a[:k, k] = -1.0
    a[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = _solve(a, rhs)
    if sol is None:
        return None
    return sol[:k], sol[k]


def _spread(values: np.ndarray) -> float:
    return float(values.max() - values.min()) if len(values) else 0.0


@dataclass(frozen=True)
class OracleResult:
    equilibria: tuple[tuple[MixedProfile, tuple[float, float]], ...]
    degenerate: bool


def enumerate_equilibria(matrix: PayoffMatrix, tol: float = ORACLE_TOL) -> OracleResult:
    """Every equilibrium supported on equal-size strategy subsets.

    Results come in support-lexicographic order: by support size, then
    Alice's support, then Bob's. ``degenerate`` is set when two supports
    produce the same profile (the game has a continuum or repeated vertex).
    """
    n, m = matrix.shape
    if n > ORACLE_MAX_DIM or m > ORACLE_MAX_DIM:
        raise SizeLimitExceeded(f"support enumeration limited to {ORACLE_MAX_DIM}x{ORACLE_MAX_DIM}")
    A, B = matrix.u_alice, matrix.u_bob
    found: list[tuple[MixedProfile, tuple[float, float]]] = []
    degenerate = False
    for size in range(1, min(n, m) + 1):
        for rows in itertools.combinations(range(n), size):
            for cols in itertools.combinations(range(m), size):
                xs = _mix_making_indifferent(B, rows, cols)
                ys = _mix_making_indifferent(A.T, cols, rows)
                if xs is None or ys is None:
                    continue
                (xw, _), (yw, _) = xs, ys
                if xw.min() < -tol or yw.min() < -tol:
                    continue
                x = np.zeros(n)
                y = np.zeros(m)
                x[list(rows)] = np.clip(xw, 0, None)
                y[list(cols)] = np.clip(yw, 0, None)
                x /= x.sum()
                y /= y.sum()
                alice_vals = A @ y
                bob_vals = x @ B
                if alice_vals.max() > alice_vals[list(rows)].min() + tol:
                    continue
                if bob_vals.max() > bob_vals[list(cols)].min() + tol:
                    continue
                profile = MixedProfile(tuple(x), tuple(y))
                if any(profile.close_to(p, tol) for p, _ in found):
                    degenerate = True
                    continue
                residuals = (_spread(bob_vals[list(cols)]), _spread(alice_vals[list(rows)]))
                found.append((profile, residuals))
    return OracleResult(tuple(found), degenerate)


def support_enumeration(matrix: PayoffMatrix, tol: float = ORACLE_TOL):
    return list(enumerate_equilibria(matrix, tol).equilibria)


# --- orchestration --------------------------------------------------------

def _feasibility(mixed: MixedProfile | None, shape, diagnostics) -> str:
    if mixed is not None and mixed.is_totally_mixed:
        return "mixed"
    if tuple(shape) == (2, 2) and any(d.startswith(DegenerateDenominator.name) for d in diagnostics):
        return "degenerate"
    return "pure-only"


def solve(scenario: Scenario, method: str = "auto") -> EquilibriumReport:
    """Pure equilibria plus a mixed equilibrium from the most specific route.

    ``auto`` tries the tied-cost closed form, the general closed form, the
    matrix indifference solution and finally support enumeration, moving on
    whenever a route raises. A named ``method`` runs that route alone and
    lets its error propagate.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    ensure_valid(scenario)
    warnings = validate_scenario(scenario).warnings
    matrix = build_payoff_matrix(scenario)
    pure = tuple(pure_equilibria(matrix))
    diagnostics: list[str] = []
    is_2x2 = scenario.shape == (2, 2)

    routes = {
        "simplified": lambda: mixed_2x2_simplified(scenario),
        "general": lambda: mixed_2x2_closed_form(scenario),
        "matrix": lambda: mixed_2x2_from_matrix(matrix),
    }
    order = ["simplified", "general", "matrix"] if method == "auto" else [method]
    if method == "auto" and not is_2x2:
        diagnostics.append(f"{DimensionError.name}: closed forms skipped for "
                           f"{scenario.shape[0]}x{scenario.shape[1]} game")
        order = []

    mixed, used = None, None
    for name in order:
        if name == "oracle":
            break
        try:
            mixed = routes[name]()
        except EquilibriumError as exc:
            if method != "auto":
                raise
            diagnostics.append(f"{exc.name}: [{name}] {exc}")
            continue
        used = METHOD_TAGS[name]
        break

    oracle: tuple[MixedProfile, ...] = ()
    degenerate = False
    residuals = None
    if mixed is None and (method in ("auto", "oracle")):
        result = enumerate_equilibria(matrix)
        oracle = tuple(p for p, _ in result.equilibria)
        degenerate = result.degenerate
        for prof, res in result.equilibria:
            if not prof.is_pure:
                mixed, used, residuals = prof, METHOD_TAGS["oracle"], res
                break
        if method == "oracle" and not result.equilibria:
            raise EquilibriumError("support enumeration found no equilibrium")

    if mixed is not None and residuals is None:
        residuals = indifference_residuals(matrix, mixed)

    return EquilibriumReport(
        pure=pure,
        mixed=mixed,
        mixed_method=used,
        residuals=residuals,
        feasibility=_feasibility(mixed, scenario.shape, diagnostics),
        diagnostics=tuple(diagnostics),
        oracle=oracle,
        degenerate=degenerate,
        warnings=tuple(warnings),
    )
