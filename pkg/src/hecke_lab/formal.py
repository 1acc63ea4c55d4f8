"""Integer formal sums of matrices, the weight-beta slash action, and checks
of the three-term functional equation.

A ``FormalSum`` is an element of the monoid ring Z[Mat*(2,Z)]; ``x @ g``
multiplies every matrix on the right.  Applying a seed function to a formal
sum means summing the slash transforms ``seed |_beta h`` with multiplicity.

Exact evaluation uses ``gmpy2.mpq``; floating evaluation uses Python complex
numbers with principal-branch powers on the plane cut along (-inf, 0].
"""
from __future__ import annotations

import cmath
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from gmpy2 import mpq

from .cosets import build_index_table
from .gl2 import DomainError, I, Mat2, T, T_INV, T_PRIME, T_PRIME_INV


class PoleError(ZeroDivisionError):
    pass


class SamplingError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# the monoid ring
# --------------------------------------------------------------------------

class FormalSum:
    """Finite integer combination of nonsingular integer matrices."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Mat2, int] | Iterable[tuple[Mat2, int]] = ()):
        acc: Counter = Counter()
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, k in items:
            if not isinstance(g, Mat2):
                g = Mat2(*g)
            if g.det == 0:
                raise DomainError(f"{g!r} is singular")
            acc[g] += int(k)
        self._terms = {g: acc[g] for g in sorted(acc) if acc[g] != 0}
        self._hash = None

    @classmethod
    def of(cls, *matrices: Mat2) -> FormalSum:
        """Sum of the given matrices, each with coefficient one."""
        return cls((g, 1) for g in matrices)

    @classmethod
    def one(cls) -> FormalSum:
        return cls.of(I)

    # -- container protocol ---------------------------------------------

    def items(self):
        return self._terms.items()

    def matrices(self) -> list[Mat2]:
        return list(self._terms)

    def coeff(self, g: Mat2) -> int:
        return self._terms.get(g, 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def term_count(self) -> int:
        """Number of matrices counted with multiplicity ``|coeff|``."""
        return sum(abs(k) for k in self._terms.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, FormalSum):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "FormalSum(0)"
        parts = [f"{k}*{g!r}" for g, k in self._terms.items()]
        return "FormalSum(" + " + ".join(parts) + ")"

    @property
    def is_positive(self) -> bool:
        """True iff every matrix has nonnegative entries and positive determinant."""
        return all(g.is_nonnegative() and g.det > 0 for g in self._terms)

    def as_counter(self) -> Counter:
        return Counter(self._terms)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other) -> FormalSum:
        if isinstance(other, Mat2):
            other = FormalSum.of(other)
        if not isinstance(other, FormalSum):
            return NotImplemented
        acc = Counter(self._terms)
        for g, k in other.items():
            acc[g] += k
        return FormalSum(acc)

    __radd__ = __add__

    def __neg__(self) -> FormalSum:
        return FormalSum((g, -k) for g, k in self.items())

    def __sub__(self, other) -> FormalSum:
        if isinstance(other, Mat2):
            other = FormalSum.of(other)
        return self + (-other)

    def __rsub__(self, other) -> FormalSum:
        return (-self) + other

    def __mul__(self, k) -> FormalSum:
        if isinstance(k, int):
            return FormalSum((g, k * c) for g, c in self.items())
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other) -> FormalSum:
        if isinstance(other, Mat2):
            return FormalSum((g @ other, k) for g, k in self.items())
        if isinstance(other, FormalSum):
            return FormalSum(
                (g @ h, k * c) for g, k in self.items() for h, c in other.items()
            )
        return NotImplemented

    def __rmatmul__(self, other) -> FormalSum:
        if isinstance(other, Mat2):
            return FormalSum((other @ g, k) for g, k in self.items())
        return NotImplemented

    def to_json(self) -> list[dict]:
        return [{"coeff": str(k), "matrix": g.to_json()} for g, k in self.items()]

    @classmethod
    def from_json(cls, data) -> FormalSum:
        return cls((Mat2.from_json(t["matrix"]), int(t["coeff"])) for t in data)


ZERO = FormalSum()
LEWIS_ELEMENT = FormalSum([(I, 1), (T, -1), (T_PRIME, -1)])


def total(sums: Iterable[FormalSum]) -> FormalSum:
    acc: Counter = Counter()
    for s in sums:
        for g, k in s.items():
            acc[g] += k
    return FormalSum(acc)


# --------------------------------------------------------------------------
# seed solutions of the scalar equation and the slash action
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedFunction:
    """``inversez`` is z -> 1/z at beta = 1; ``eisenstein`` is z -> 1 - z^(-2 beta)."""

    kind: str
    beta: object = 1

    def __post_init__(self):
        if self.kind not in ("inversez", "eisenstein", "constant"):
            raise DomainError(f"unknown seed {self.kind!r}")
        if self.kind == "inversez" and self.beta != 1:
            raise DomainError("the 1/z seed only has weight beta = 1")

    @classmethod
    def inverse_z(cls) -> SeedFunction:
        return cls("inversez", 1)

    @classmethod
    def eisenstein(cls, beta=1) -> SeedFunction:
        return cls("eisenstein", beta)

    @classmethod
    def constant(cls, beta=1) -> SeedFunction:
        """The constant function 1; not a solution for any beta."""
        return cls("constant", beta)

    def __call__(self, z):
        if self.kind == "inversez":
            return 1 / z
        if self.kind == "constant":
            return 1 + 0 * z
        return 1 - _power(z, -2 * self.beta)

    def has_pole_at_zero(self) -> bool:
        return self.kind != "constant"


def _is_exact(x) -> bool:
    return isinstance(x, (int, type(mpq(0)))) or type(x).__name__ == "Fraction"


def _power(x, e):
    if _is_exact(x) and isinstance(e, int):
        return mpq(x) ** e
    return cmath.exp(e * cmath.log(x))


def _check_exact_beta(beta) -> int:
    if isinstance(beta, bool) or not isinstance(beta, int) or beta < 1:
        raise DomainError(f"exact mode needs a positive integer beta, got {beta!r}")
    return beta


def slash_term_exact(seed: SeedFunction, h: Mat2, z, beta: int):
    a, b, c, d = h
    den = c * z + d
    num = a * z + b
    if den == 0 or (num == 0 and seed.has_pole_at_zero()):
        raise PoleError(f"z = {z} is a pole of seed | {h!r}")
    scale = mpq(abs(h.det)) ** beta / den ** (2 * beta)
    if seed.kind == "inversez":
        return scale * den / num
    if seed.kind == "constant":
        return scale
    return scale * (1 - (den / num) ** (2 * beta))


def slash_term_float(seed: SeedFunction, h: Mat2, z: complex, beta) -> complex:
    a, b, c, d = h
    den = c * z + d
    num = a * z + b
    if den == 0 or (num == 0 and seed.has_pole_at_zero()):
        raise PoleError(f"z = {z} is a pole of seed | {h!r}")
    w = num / den
    factor = abs(h.det) ** beta * _power(den, -2 * beta)
    if seed.kind == "inversez":
        return factor / w
    if seed.kind == "constant":
        return factor
    return factor * (1 - _power(w, -2 * beta))


def _on_cut(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0


def slash_eval(seed: SeedFunction, w: FormalSum | Mat2, z, beta=None):
    """``(seed |_beta w)(z)``: exact for rational z, complex otherwise."""
    beta = seed.beta if beta is None else beta
    if isinstance(w, Mat2):
        w = FormalSum.of(w)
    if _is_exact(z):
        _check_exact_beta(beta)
        z = mpq(z)
        return sum((k * slash_term_exact(seed, h, z, beta) for h, k in w.items()), mpq(0))
    z = complex(z)
    if _on_cut(z):
        raise DomainError(f"z = {z} lies on the branch cut")
    return sum((k * slash_term_float(seed, h, z, beta) for h, k in w.items()), 0j)


# --------------------------------------------------------------------------
# period vectors and the three-term residual
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodVector:
    """Component ``i`` is the function ``seed |_beta weights[i]`` at level ``n``."""

    n: int
    seed: SeedFunction
    weights: tuple[FormalSum, ...]

    def __post_init__(self):
        mu = build_index_table(self.n).mu
        if len(self.weights) != mu:
            raise DomainError(f"level {self.n} needs {mu} components, got {len(self.weights)}")

    @property
    def beta(self):
        return self.seed.beta

    def with_weights(self, weights) -> PeriodVector:
        return PeriodVector(self.n, self.seed, tuple(weights))

    def term_count(self) -> int:
        return sum(w.term_count() for w in self.weights)

    def evaluate(self, z) -> list:
        return [slash_eval(self.seed, w, z) for w in self.weights]


def constant_vector(n: int, seed: SeedFunction) -> PeriodVector:
    """The old solution with every component equal to the seed itself."""
    return PeriodVector(n, seed, (FormalSum.one(),) * build_index_table(n).mu)


def step_perms(n: int, rep: str = "rho_tilde") -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Permutations of the two inverse generators used in the three-term equation.

    ``rep="rho_tilde"`` (the default) indexes components by the upper-triangular
    matrices A_i, the indexing in which the K-orbit sums solve the equation.
    ``rep="rho"`` indexes them by coset representatives.  The two are
    conjugate through ``h_n``.
    """
    table = build_index_table(n)
    if rep == "rho_tilde":
        return table.rho_tilde_perm(T_INV), table.rho_tilde_perm(T_PRIME_INV)
    if rep == "rho":
        return table.rho_perm(T_INV), table.rho_perm(T_PRIME_INV)
    raise DomainError(f"unknown representation {rep!r}")


def lewis_residual(n: int, psi, rep: str = "rho_tilde") -> list[FormalSum]:
    """``psi_i - psi_{p(i)} T - psi_{p'(i)} T'`` for the permutations of ``step_perms``."""
    psi = list(psi)
    mu = build_index_table(n).mu
    if len(psi) != mu:
        raise DomainError(f"level {n} needs {mu} components, got {len(psi)}")
    p, pp = step_perms(n, rep)
    return [psi[i] - psi[p[i]] @ T - psi[pp[i]] @ T_PRIME for i in range(mu)]


# --------------------------------------------------------------------------
# membership in the ideal generated by 1 - T - T'
# --------------------------------------------------------------------------

@dataclass
class WitnessResult:
    found: bool
    witness: FormalSum | None
    closure_size: int
    reason: str = ""


def jplus_witness_search(residual: FormalSum, depth_cap: int = 10_000) -> WitnessResult:
    """Look for ``y`` with ``(1 - T - T') y == residual`` and nonnegative support.

    Candidates for the support of ``y`` are the matrices reachable from the
    support of ``residual`` by left multiplication with T^-1 or T'^-1 while
    entries stay nonnegative.  Each step lowers the entry sum, so ordering by
    entry sum makes the linear system triangular and its solution unique;
    the result is then checked against ``residual``.  ``depth_cap`` bounds
    the number of candidate matrices.
    """
    if not residual:
        return WitnessResult(True, ZERO, 0)
    seen = set()
    stack = [g for g in residual if g.is_nonnegative()]
    if len(stack) != len(residual):
        return WitnessResult(False, None, 0, "residual has a matrix with a negative entry")
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if len(seen) > depth_cap:
            return WitnessResult(False, None, len(seen), f"closure exceeds cap {depth_cap}")
        for step in (T_INV, T_PRIME_INV):
            x = step @ g
            if x.is_nonnegative() and x not in seen:
                stack.append(x)
    y: dict[Mat2, int] = {}
    for g in sorted(seen, key=lambda g: (sum(g), g)):
        val = residual.coeff(g)
        for step in (T_INV, T_PRIME_INV):
            val += y.get(step @ g, 0)
        if val:
            y[g] = val
    witness = FormalSum(y)
    if LEWIS_ELEMENT @ witness != residual:
        return WitnessResult(False, None, len(seen), "triangular solution does not reproduce the residual")
    return WitnessResult(True, witness, len(seen))


# --------------------------------------------------------------------------
# function-level check
# --------------------------------------------------------------------------

def pole_roots(w: FormalSum, seed: SeedFunction) -> dict:
    """Poles of ``seed | w`` with a bound on their order, keyed by location."""
    beta = seed.beta
    out: dict = {}
    for a, b, c, d in w:
        if c:
            r = mpq(-d, c)
            out[r] = max(out.get(r, 0), 2 * beta)
        if a and seed.has_pole_at_zero():
            r = mpq(-b, a)
            out[r] = max(out.get(r, 0), 2 * beta)
    return out


def exact_sample_points(w: FormalSum, seed: SeedFunction, extra: int = 5) -> list:
    """Enough pole-free rational points to decide whether ``seed | w`` vanishes.

    After clearing denominators the sum is a polynomial of degree at most the
    total pole order ``D``, so vanishing at ``D + 1`` points proves it is zero.
    ``D`` never exceeds ``4 * beta * term_count``.
    """
    roots = pole_roots(w, seed)
    need = sum(roots.values()) + extra
    pts = []
    k = 1
    while len(pts) < need:
        z = mpq(k, 1)
        if z not in roots:
            pts.append(z)
        k += 1
        if k > 10 * need + 100:
            raise SamplingError("could not find enough pole-free sample points")
    return pts


FLOAT_POINTS = tuple(
    complex(0.25 + 0.37 * k, (0.6 + 0.11 * k) * (-1) ** k) for k in range(25)
)


@dataclass
class ComponentStatus:
    index: int
    status: str
    fail_points: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": str(self.index),
            "status": self.status,
            "failPoints": [str(p) for p in self.fail_points],
        }


@dataclass
class LewisReport:
    n: int
    beta: object
    mode: str
    components: list[ComponentStatus]

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.components)

    def to_dict(self) -> dict:
        return {
            "n": str(self.n),
            "beta": str(self.beta),
            "mode": self.mode,
            "status": "pass" if self.passed else "fail",
            "components": [c.to_dict() for c in self.components],
        }


def nonzero_points_exact(seed: SeedFunction, w: FormalSum, points=None) -> list:
    """Sample points where ``seed | w`` is nonzero (empty means identically zero)."""
    if not w:
        return []
    pts = exact_sample_points(w, seed) if points is None else points
    beta = _check_exact_beta(seed.beta)
    bad = []
    for z in pts:
        if slash_eval(seed, w, z, beta) != 0:
            bad.append(z)
    return bad


def nonzero_points_float(seed: SeedFunction, w: FormalSum, points=FLOAT_POINTS, rtol: float = 1e-9) -> list:
    if not w:
        return []
    bad = []
    for z in points:
        terms = [k * slash_term_float(seed, h, z, seed.beta) for h, k in w.items()]
        scale = sum(abs(t) for t in terms)
        if abs(sum(terms)) > rtol * max(scale, 1e-300):
            bad.append(z)
    return bad


def lewis_check_function(n: int, v: PeriodVector, mode: str = "exact", rep: str = "rho_tilde") -> LewisReport:
    """Evaluate the three-term residual of ``v`` at sample points."""
    if v.n != n:
        raise DomainError(f"vector has level {v.n}, expected {n}")
    if mode not in ("exact", "float"):
        raise DomainError(f"unknown mode {mode!r}")
    residual = lewis_residual(n, v.weights, rep)
    comps = []
    for i, r in enumerate(residual):
        if mode == "exact":
            bad = nonzero_points_exact(v.seed, r)
        else:
            bad = nonzero_points_float(v.seed, r)
        comps.append(ComponentStatus(i, "fail" if bad else "pass", bad))
    return LewisReport(n, v.beta, mode, comps)


# --------------------------------------------------------------------------
# partial-fraction normal form
# --------------------------------------------------------------------------

def normal_form(seed: SeedFunction, w: FormalSum) -> dict:
    """Partial-fraction coefficients of ``seed | w``.

    Keys are shifts ``r`` for the terms ``(z + r)^(-2 beta)`` (``(z + r)^-1``
    for the 1/z seed) plus the key ``"const"``.  The function vanishes
    identically iff the dictionary is empty.
    """
    if seed.kind == "constant":
        raise DomainError("normal form is only implemented for the solution seeds")
    beta = 1 if seed.kind == "inversez" else _check_exact_beta(seed.beta)
    acc: Counter = Counter()
    for h, k in w.items():
        a, b, c, d = h
        det = h.det
        if seed.kind == "inversez":
            s = k if det > 0 else -k
            if a:
                acc[mpq(b, a)] += s
            if c:
                acc[mpq(d, c)] -= s
            continue
        scale = abs(det) ** beta
        if c:
            acc[mpq(d, c)] += mpq(k * scale, c ** (2 * beta))
        else:
            acc["const"] += mpq(k * scale, d ** (2 * beta))
        if a:
            acc[mpq(b, a)] -= mpq(k * scale, a ** (2 * beta))
        else:
            acc["const"] -= mpq(k * scale, b ** (2 * beta))
    return {r: v for r, v in acc.items() if v != 0}


def vanishes_identically(seed: SeedFunction, w: FormalSum) -> bool:
    return not normal_form(seed, w)


__all__ = [
    "ComponentStatus",
    "FLOAT_POINTS",
    "FormalSum",
    "LEWIS_ELEMENT",
    "LewisReport",
    "PeriodVector",
    "PoleError",
    "SamplingError",
    "SeedFunction",
    "WitnessResult",
    "ZERO",
    "constant_vector",
    "exact_sample_points",
    "jplus_witness_search",
    "lewis_check_function",
    "lewis_residual",
    "normal_form",
    "slash_eval",
    "step_perms",
    "total",
    "nonzero_points_exact",
    "nonzero_points_float",
    "vanishes_identically",
]
