"""Minkowski/Randers norms on the tangent model space m = m0 + m1.

Three coset families share one parameter container:

* ``u_sphere``  -- S^(2n+1) with unitary symmetry; m0 = R, m1 = C^n,
  F(q, u) = sqrt(a q^2 + b |u|^2) + c q.
* ``sp_sphere`` -- S^(4n+3) with symplectic-circle symmetry; m0 = Im H
  (coordinates along i, j, k), m1 = H^n,
  F = sqrt(a1 l1^2 + a2 (l2^2 + l3^2) + b |u|^2) + c l1.
* ``su2``       -- S^3 as the group SU(2); m = su(2) with a distinguished
  axis (first basis coordinate), same (a, b, c) form as u_sphere.

The reference inner product <.,.>_eq is the a = b = 1 (resp.
a1 = a2 = b = 1) case; orbit centers and radii elsewhere in the package
are always measured in it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

U_SPHERE = "u_sphere"
SP_SPHERE = "sp_sphere"
SU2 = "su2"

_FAMILIES = (U_SPHERE, SP_SPHERE, SU2)


# --------------------------------------------------------------------------
# tangent vectors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TangentVector:
    """Element of m with an m0 part `q` and an m1 part `u`.

    Per family: u_sphere has scalar q and complex u of length n; sp_sphere
    has q = (l1, l2, l3) along (i, j, k) and quaternionic u as a complex
    pair; su2 has scalar q (distinguished-axis coordinate) and real u of
    length 2.
    """

    family: str
    q: object
    u: object

    def __add__(self, other):
        if self.family != other.family:
            raise InvalidInput("cannot add tangent vectors of different families")
        if self.family == SP_SPHERE:
            u = (self.u[0] + other.u[0], self.u[1] + other.u[1])
        else:
            u = self.u + other.u
        return TangentVector(self.family, self.q + other.q, u)

    def __mul__(self, s):
        s = float(s)
        if self.family == SP_SPHERE:
            u = (s * self.u[0], s * self.u[1])
        else:
            u = s * self.u
        return TangentVector(self.family, s * self.q, u)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def u_norm_sq(self):
        if self.family == SP_SPHERE:
            return float(np.sum(np.abs(self.u[0]) ** 2 + np.abs(self.u[1]) ** 2))
        return float(np.sum(np.abs(self.u) ** 2))

    def m0_norm_sq(self):
        if self.family == SP_SPHERE:
            return float(np.sum(np.asarray(self.q, dtype=float) ** 2))
        return float(self.q) ** 2


def u_tangent(q, u):
    """Tangent vector for the u_sphere family."""
    return TangentVector(U_SPHERE, float(q), np.asarray(u, dtype=complex))


def sp_tangent(lam, u1, u2):
    """Tangent vector for the sp_sphere family; `lam` = (l1, l2, l3)."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (3,):
        raise InvalidInput("sp_sphere m0 part must be a 3-vector")
    return TangentVector(SP_SPHERE, lam,
                         (np.asarray(u1, dtype=complex), np.asarray(u2, dtype=complex)))


def su2_tangent(y):
    """Tangent vector for the su2 family from su(2) coordinates (3,)."""
    y = np.asarray(y, dtype=float)
    if y.shape != (3,):
        raise InvalidInput("su2 tangent coordinates must be a 3-vector")
    return TangentVector(SU2, float(y[0]), y[1:].copy())


def eq_norm(y: TangentVector) -> float:
    """Reference norm <y, y>_eq^(1/2) (all metric coefficients set to 1)."""
    return math.sqrt(y.m0_norm_sq() + y.u_norm_sq())


# --------------------------------------------------------------------------
# metric parameter container
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RandersSpec:
    """Parameters of a homogeneous Randers metric on a model sphere.

    u_sphere / su2 use (a, b, c); sp_sphere uses (a1, a2, b, c).  Unused
    coefficients stay None.  `n` is the coset rank: S^(2n+1) for u_sphere,
    S^(4n+3) for sp_sphere, ignored for su2.
    """

    family: str
    n: int = 1
    a: float = None
    b: float = None
    c: float = 0.0
    a1: float = None
    a2: float = None


def round_spec(family=U_SPHERE, n=1):
    """The symmetric (round) metric of the given family."""
    if family == SP_SPHERE:
        return RandersSpec(SP_SPHERE, n=n, a1=1.0, a2=1.0, b=1.0, c=0.0)
    return RandersSpec(family, n=n, a=1.0, b=1.0, c=0.0)


def validate_spec(s: RandersSpec):
    """Return the list of violated invariants (empty list means valid).

    Each entry names the failed inequality.  For sp_sphere the full
    symplectic-circle symmetry additionally requires a2 != b, since a2 = b
    enlarges the symmetry to the unitary family.
    """
    violations = []
    if s.family not in _FAMILIES:
        return [f"unknown family {s.family!r}"]
    if s.family != SU2 and (not isinstance(s.n, int) or s.n < 1):
        violations.append("n >= 1")
    if s.family == SP_SPHERE:
        named = [("a1", s.a1), ("a2", s.a2), ("b", s.b)]
    else:
        named = [("a", s.a), ("b", s.b)]
    for name, value in named:
        if value is None or not np.isfinite(value):
            violations.append(f"{name} missing or non-finite")
        elif value <= 0:
            violations.append(f"{name} > 0")
    if s.c is None or not np.isfinite(s.c):
        violations.append("c missing or non-finite")
        return violations
    lead = s.a1 if s.family == SP_SPHERE else s.a
    if lead is not None and np.isfinite(lead) and lead > 0:
        bound = "sqrt(a1)" if s.family == SP_SPHERE else "sqrt(a)"
        if not abs(s.c) < math.sqrt(lead):
            violations.append(f"|c| < {bound}")
    if s.family == SP_SPHERE and s.a2 is not None and s.b is not None \
            and s.a2 == s.b:
        violations.append("a2 != b")
    return violations


def require_valid(s: RandersSpec):
    violations = validate_spec(s)
    if violations:
        raise InvalidInput("invalid Randers spec: " + "; ".join(violations))
    return s


# --------------------------------------------------------------------------
# norm evaluation
# --------------------------------------------------------------------------

def randers_norm(s: RandersSpec, y: TangentVector) -> float:
    """Evaluate F(y) = alpha(y) + beta(y).

    Positively homogeneous of degree one; F(0) = 0 by convention.  The
    one-form beta pairs y with the distinguished m0 axis, weighted by c.
    """
    require_valid(s)
    if y.family != s.family:
        raise InvalidInput(f"tangent family {y.family!r} != spec family {s.family!r}")
    usq = y.u_norm_sq()
    if s.family == SP_SPHERE:
        l1, l2, l3 = np.asarray(y.q, dtype=float)
        alpha_sq = s.a1 * l1 * l1 + s.a2 * (l2 * l2 + l3 * l3) + s.b * usq
        beta = s.c * l1
    else:
        q = float(y.q)
        alpha_sq = s.a * q * q + s.b * usq
        beta = s.c * q
    return math.sqrt(alpha_sq) + beta


def indicatrix_residual(s: RandersSpec, y: TangentVector) -> float:
    """F(y) - 1; vanishes exactly on the unit indicatrix of the metric."""
    return randers_norm(s, y) - 1.0


# --------------------------------------------------------------------------
# JSON wire format
# --------------------------------------------------------------------------

def spec_to_json(s: RandersSpec) -> str:
    """Serialize to the shared JSON schema."""
    doc = {"family": s.family, "n": s.n, "b": s.b, "c": s.c}
    if s.family == SP_SPHERE:
        doc["a1"] = s.a1
        doc["a2"] = s.a2
    else:
        doc["a"] = s.a
    return json.dumps(doc, sort_keys=True)


def spec_from_json(text: str) -> RandersSpec:
    """Parse the shared JSON schema; raises InvalidInput on malformed input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"malformed spec JSON: {exc}") from exc
    if not isinstance(doc, dict) or "family" not in doc:
        raise InvalidInput("spec JSON must be an object with a 'family' key")
    family = doc["family"]
    if family not in _FAMILIES:
        raise InvalidInput(f"unknown family {family!r}")
    try:
        if family == SP_SPHERE:
            return RandersSpec(family, n=int(doc.get("n", 1)),
                               a1=float(doc["a1"]), a2=float(doc["a2"]),
                               b=float(doc["b"]), c=float(doc.get("c", 0.0)))
        return RandersSpec(family, n=int(doc.get("n", 1)),
                           a=float(doc["a"]), b=float(doc["b"]),
                           c=float(doc.get("c", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad spec field: {exc}") from exc
