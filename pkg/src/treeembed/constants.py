"""Constant schedule for the saturation embedder.

Two modes.  ``theoretical`` evaluates the full constant chain
exactly, in rationals; the values are far too small to drive a run but
they are what the correctness argument needs.  ``practical`` takes
desk-scale values and only insists on the inequalities the pair-embedding
arguments actually consume, reporting the others as informational checks.

The regularity lemma's cluster bound M(eps) has no closed form; we model it
as ``min(2**ceil(1/eps), M_cap)`` and take ``n0`` of the lemma to be
``ceil(M/eps)`` so that every cluster has at least ``1/eps`` vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import PreconditionError
from .regularity import as_fraction, ceil_frac

THEORETICAL = "theoretical"
PRACTICAL = "practical"

DEFAULT_M_CAP = 4096
PRACTICAL_DEFAULTS = {
    "d": Fraction(1, 10),
    "eps": Fraction(1, 10**4),
    "beta": Fraction(1, 50),
    "gamma": Fraction(1, 20),
}


def cluster_bound(eps: Fraction, cap: int = DEFAULT_M_CAP) -> int:
    """Model of the regularity lemma's M(eps), capped at ``cap``."""
    e = ceil_frac(1 / as_fraction(eps))
    if e >= cap.bit_length():
        return cap
    return min(1 << e, cap)


def _beta_pair(d: Fraction, eps: Fraction, M: int) -> Fraction:
    # size cap of a microtree that one regular pair can always host
    return eps / M


def _gamma_seeds(d: Fraction, eps: Fraction, beta: Fraction, M: int) -> Fraction:
    # degree cap on V2 under which the seeds fit in a quarter of d|v1|
    return beta * d / (2000 * M)


@dataclass
class ConstantSchedule:
    eta: Fraction
    r: Fraction
    d: Fraction
    eps: Fraction
    beta: Fraction
    gamma: Fraction
    M: int
    k0: Fraction
    n0: Fraction
    M_cap: int = DEFAULT_M_CAP
    mode: str = THEORETICAL
    checks: list[dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        def show(x):
            if isinstance(x, Fraction):
                return {"num": str(x.numerator), "den": str(x.denominator), "float": float(x)}
            return x

        return {
            "mode": self.mode,
            "eta": show(self.eta),
            "r": show(self.r),
            "d": show(self.d),
            "eps": show(self.eps),
            "beta": show(self.beta),
            "gamma": show(self.gamma),
            "M": self.M,
            "M_cap": self.M_cap,
            "k0": show(self.k0),
            "n0": show(self.n0),
            "checks": self.checks,
        }


def _check(name: str, ok: bool, lhs, rhs, required: bool) -> dict[str, Any]:
    return {"name": name, "ok": bool(ok), "lhs": float(lhs), "rhs": float(rhs), "required": required}


def derive_constants(eta, r, mode: str = THEORETICAL, *, M_cap: int = DEFAULT_M_CAP, **overrides) -> ConstantSchedule:
    """Build the constant schedule for skew ``r`` and slack ``eta``.

    In practical mode ``overrides`` may set any of d, eps, beta, gamma.
    """
    eta = as_fraction(eta)
    r = as_fraction(r)
    if not (0 < eta < 1):
        raise PreconditionError("eta must lie in (0, 1)")
    if r <= 0:
        raise PreconditionError("r must be positive")
    if mode == THEORETICAL:
        if overrides:
            raise PreconditionError("theoretical mode takes no overrides")
        d = (eta * r) ** 2 / 1000
        eps = (eta * r * d) ** 20 / Fraction(10) ** 15
        M = cluster_bound(eps, M_cap)
        beta = min(_beta_pair(d, eps, M), eta * d / (Fraction(10) ** 5 * M))
        gamma = _gamma_seeds(d, eps, beta, M)
        checks = []
    elif mode == PRACTICAL:
        unknown = set(overrides) - set(PRACTICAL_DEFAULTS)
        if unknown:
            raise PreconditionError(f"unknown constant override(s): {sorted(unknown)}")
        vals = {key: as_fraction(overrides.get(key, default)) for key, default in PRACTICAL_DEFAULTS.items()}
        d, eps, beta, gamma = vals["d"], vals["eps"], vals["beta"], vals["gamma"]
        for key, val in vals.items():
            if val <= 0:
                raise PreconditionError(f"{key} must be positive")
        if eps > d * d / 100:
            raise PreconditionError(f"eps <= d^2/100 violated: {float(eps)} > {float(d * d / 100)}")
        M = cluster_bound(eps, M_cap)
        checks = [
            _check("eps <= d^2/100", eps <= d * d / 100, eps, d * d / 100, True),
            _check("d < 1", d < 1, d, 1, True),
            _check("beta <= eps/M (pair embedding size cap)", beta <= _beta_pair(d, eps, M), beta,
                   _beta_pair(d, eps, M), False),
            _check("beta <= eta d/(1e5 M)", beta <= eta * d / (10**5 * M), beta, eta * d / (10**5 * M), False),
            _check("gamma <= beta d/(2000 M)", gamma <= _gamma_seeds(d, eps, beta, M), gamma,
                   _gamma_seeds(d, eps, beta, M), False),
            _check("16 eps < 1 (empty clusters are not full)", 16 * eps < 1, 16 * eps, 1, False),
        ]
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    k0 = 10 / gamma
    n0 = max(Fraction(ceil_frac(M / eps)), 2 / eta * k0)
    return ConstantSchedule(eta, r, d, eps, beta, gamma, M, k0, n0, M_cap, mode, checks)


def fourth_root_le(a, eps, b) -> bool:
    """a <= eps**(1/4) * b for non-negative a, b, compared exactly."""
    a, eps, b = as_fraction(a), as_fraction(eps), as_fraction(b)
    return a**4 <= eps * b**4


def sqrt_le(a, eps, b) -> bool:
    """a <= sqrt(eps) * b for non-negative a, b."""
    a, eps, b = as_fraction(a), as_fraction(eps), as_fraction(b)
    return a * a <= eps * b * b
