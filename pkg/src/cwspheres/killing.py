"""Constant-length Killing field analysis.

Centerpiece of the package: the closed-form metric solver for
two-eigenvalue generators on the unitary-family spheres, the quadratic
identity certifying constant length, the su2 construction with a round
off-center indicatrix, and the falsification harnesses showing that on
the symplectic-family spheres only central vectors work.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .cosets import (AlgebraElement, ModelSpace, align_imaginary_to_i,
                     orbit_projection_sample, project_to_m, space_for_spec,
                     sp_permutation, sp_unit_diag, u_algebra)
from .errors import InfeasibleParams, InvalidInput, NotApplicable, NotKvfAdmissible
from .matrixcore import QuaternionMatrix, RngStream, qmul, su2_inner
from .randers import (SP_SPHERE, SU2, U_SPHERE, RandersSpec, randers_norm,
                      require_valid)

CONSTANT_TOL_FACTOR = 1e-8


# --------------------------------------------------------------------------
# two-eigenvalue orbit parameters
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitParams:
    """Data of a two-eigenvalue skew generator on S^(2n+1), n+1 = l+m.

    The generator is i*(x1 I + x2 diag(-m I_l, l I_m)), with eigenvalue
    phases x1 - m x2 (multiplicity l) and x1 + l x2 (multiplicity m).
    Feasibility requires the two phases to have opposite signs:
    (x1 - m x2)(x1 + l x2) < 0.  L is the target constant length.
    """

    l: int
    m: int
    x1: float
    x2: float
    L: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.l, int) and isinstance(self.m, int)) \
                or self.l < 1 or self.m < 1:
            raise InfeasibleParams("l and m must be positive integers")
        if self.x2 == 0.0:
            raise InfeasibleParams("x2 != 0 is required")
        if not self.L > 0:
            raise InfeasibleParams("L > 0 is required")
        if not (self.x1 - self.m * self.x2) * (self.x1 + self.l * self.x2) < 0:
            raise InfeasibleParams(
                "(x1 - m*x2)*(x1 + l*x2) < 0 is required for opposite-sign phases")

    @property
    def n(self):
        return self.l + self.m - 1

    @property
    def center(self):
        """m0 coordinate of the projected orbit's center."""
        return 0.5 * (self.l - self.m) * self.x2 + self.x1

    @property
    def radius(self):
        """Radius of the projected orbit sphere in <.,.>_eq."""
        return 0.5 * (self.l + self.m) * abs(self.x2)

    @property
    def phases(self):
        """The two eigenvalue phases (low-block, high-block)."""
        return (self.x1 - self.m * self.x2, self.x1 + self.l * self.x2)


def orbit_generator(p: OrbitParams) -> AlgebraElement:
    """The skew matrix i*(x1 I + x2 diag(-m I_l, l I_m)) as an algebra element."""
    diag = np.concatenate([np.full(p.l, -p.m * p.x2), np.full(p.m, p.l * p.x2)])
    return u_algebra(1j * np.diag(p.x1 + diag))


# --------------------------------------------------------------------------
# closed-form solver and identities
# --------------------------------------------------------------------------

def solve_metric(p: OrbitParams) -> RandersSpec:
    """The unique (up to scale) metric triple making `p`'s generator a
    constant-length Killing field:

        b = L^2 / (R^2 - sigma^2),  c = -(b/L) sigma,  a = b + c^2,

    with sigma the orbit center and R the orbit radius.  The denominator
    is positive exactly when the opposite-sign phase condition holds.
    """
    denom = p.radius ** 2 - p.center ** 2
    if denom <= 0:
        raise InfeasibleParams("orbit sphere does not surround the origin")
    b = p.L ** 2 / denom
    c = -(b / p.L) * p.center
    a = b + c * c
    spec = RandersSpec(U_SPHERE, n=p.n, a=a, b=b, c=c)
    require_valid(spec)
    return spec


def f_poly(s: RandersSpec, p: OrbitParams):
    """Coefficients (k2, k1, k0) of the squared Riemannian part along the
    projected orbit, as a quadratic in the block-mixing parameter t:

        f(t) = (a-b) x2^2 t^2 + [(l-m) x2^2 b + 2 a x1 x2] t
               + (x2^2 b m l + a x1^2).
    """
    if s.family != U_SPHERE:
        raise InvalidInput("f_poly expects a u_sphere spec")
    require_valid(s)
    k2 = (s.a - s.b) * p.x2 ** 2
    k1 = (p.l - p.m) * p.x2 ** 2 * s.b + 2.0 * s.a * p.x1 * p.x2
    k0 = p.x2 ** 2 * s.b * p.m * p.l + s.a * p.x1 ** 2
    return (k2, k1, k0)


def constant_length_identity(s: RandersSpec, p: OrbitParams):
    """Coefficient-wise residuals of f(t) = (-c (x2 t + x1) + L)^2.

    All three residuals vanish exactly when the generator of `p` has
    constant length L for the metric `s`.
    """
    k2, k1, k0 = f_poly(s, p)
    r2 = s.c ** 2 * p.x2 ** 2
    r1 = 2.0 * s.c * p.x2 * (s.c * p.x1 - p.L)
    r0 = (p.L - s.c * p.x1) ** 2
    return (k2 - r2, k1 - r1, k0 - r0)


def eq_root_pair(s: RandersSpec, L):
    """The two solutions of sqrt(a)|x| + c x = L, as (positive, negative).

    Since |c| < sqrt(a) both branch denominators are positive.
    """
    if s.family == SP_SPHERE:
        raise InvalidInput("eq_root_pair expects a u_sphere or su2 spec")
    require_valid(s)
    L = float(L)
    sq = math.sqrt(s.a)
    return (L / (sq + s.c), -L / (sq - s.c))


def central_kvf_phases(s: RandersSpec, L):
    """The two eigenvalue phases of generators commuting with the central
    circle action: -Lc/b +- sqrt(L^2/b + L^2 c^2 / b^2).

    Requires the admissibility relation a = b + c^2 (round off-center
    indicatrix); then the pair coincides with eq_root_pair.
    """
    if s.family != U_SPHERE:
        raise InvalidInput("central_kvf_phases expects a u_sphere spec")
    require_valid(s)
    if abs(s.a - (s.b + s.c ** 2)) > 1e-10:
        raise NotKvfAdmissible(
            f"a = b + c^2 fails: a={s.a!r}, b + c^2={s.b + s.c ** 2!r}")
    L = float(L)
    root = math.sqrt(L ** 2 / s.b + (L * s.c / s.b) ** 2)
    return (-L * s.c / s.b + root, -L * s.c / s.b - root)


# --------------------------------------------------------------------------
# Monte-Carlo orbit certification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantLengthReport:
    """Statistics of metric values over sampled orbit projections."""

    min: float
    max: float
    mean: float
    stddev: float
    trials: int
    verdict: str            # "constant" | "non-constant"
    tolerance: float

    @property
    def spread(self):
        return self.max - self.min


def orbit_length_report(s: RandersSpec, e: AlgebraElement, L=None,
                        trials=1000, rng=None,
                        tol_factor=CONSTANT_TOL_FACTOR) -> ConstantLengthReport:
    """Sample adjoint-orbit projections of `e` and report the spread of
    their metric values.

    Verdict is "constant" iff max - min <= tol_factor * L, with L
    defaulting to the sample mean when not prescribed.
    """
    require_valid(s)
    trials = int(trials)
    if trials < 100:
        raise InvalidInput("at least 100 trials are required for a verdict")
    if rng is None:
        rng = RngStream(0)
    space = space_for_spec(s)
    values = np.array([randers_norm(s, y)
                       for y in orbit_projection_sample(space, e, trials, rng)])
    mean = float(values.mean())
    scale = float(L) if L is not None else abs(mean)
    tolerance = tol_factor * scale
    spread = float(values.max() - values.min())
    return ConstantLengthReport(
        min=float(values.min()), max=float(values.max()), mean=mean,
        stddev=float(values.std()), trials=trials,
        verdict="constant" if spread <= tolerance else "non-constant",
        tolerance=tolerance)


# --------------------------------------------------------------------------
# su2: metric with a prescribed round off-center indicatrix
# --------------------------------------------------------------------------

def su2_cw_spec(v, radius=1.0) -> RandersSpec:
    """Randers metric on S^3 = SU(2) whose unit indicatrix is the round
    <.,.>_eq sphere of the given radius centered at -V.

    `v` is the isotropy vector V: a 3-vector of su(2) coordinates, a 2x2
    su(2) matrix, or the scalar |V|.  Only |V| enters the coefficients;
    the metric axis is the first su(2) basis direction.  Solving the
    offset-sphere equation for the norm gives, with k = radius^2 - |V|^2:

        a = radius^2 / k^2,  b = 1/k,  c = |V| / k,

    which satisfies a = b + c^2 automatically.
    """
    if np.isscalar(v):
        vlen = abs(float(v))
    else:
        v = np.asarray(v)
        if v.shape == (2, 2):
            vlen = math.sqrt(max(su2_inner(v, v), 0.0))
        elif v.shape == (3,):
            vlen = float(np.linalg.norm(v))
        else:
            raise InvalidInput("V must be a scalar, 3-vector, or 2x2 su(2) matrix")
    radius = float(radius)
    if not radius > 0:
        raise InfeasibleParams("radius must be positive")
    if vlen >= radius:
        raise InfeasibleParams(
            "|V| < radius is required, else the indicatrix does not surround 0")
    k = radius ** 2 - vlen ** 2
    return RandersSpec(SU2, a=radius ** 2 / k ** 2, b=1.0 / k, c=vlen / k)


# --------------------------------------------------------------------------
# symplectic family: impossibility harnesses
# --------------------------------------------------------------------------

def _diagonal_entries(x: QuaternionMatrix, tol=1e-12):
    off1 = x.q1 - np.diag(np.diagonal(x.q1))
    off2 = x.q2 - np.diag(np.diagonal(x.q2))
    if max(np.max(np.abs(off1)), np.max(np.abs(off2))) > tol:
        raise InvalidInput("expected a diagonal quaternion matrix")
    return np.diagonal(x.q1), np.diagonal(x.q2)


def sp_witness_pair(x: QuaternionMatrix, s: RandersSpec):
    """Two conjugation images of a nonzero diagonal skew generator whose
    projections to m are opposite multiples of the metric axis.

    Returns (y1, y2, F(y1), F(y2)).  The metric values differ by exactly
    2|c| |d| with d the chosen diagonal entry, which rules out nonzero
    generators in the matrix algebra alone whenever c != 0.
    """
    if s.family != SP_SPHERE:
        raise InvalidInput("sp_witness_pair expects an sp_sphere spec")
    require_valid(s)
    if s.c == 0.0:
        raise NotApplicable("witness pair needs a non-reversible metric (c != 0)")
    d1, d2 = _diagonal_entries(x)
    mods = np.sqrt(np.abs(d1) ** 2 + np.abs(d2) ** 2)
    if np.max(mods) < 1e-14:
        raise InvalidInput("generator must be non-zero")
    idx = int(np.argmax(mods > 1e-14))
    d = (d1[idx], d2[idx])
    n1 = x.shape[0]
    perm = list(range(n1))
    perm[idx], perm[n1 - 1] = perm[n1 - 1], perm[idx]
    pmat = sp_permutation(perm)
    space = ModelSpace(SP_SPHERE, n=n1 - 1)
    out = []
    align = align_imaginary_to_i(d)
    for sign_flip in (False, True):
        rot = qmul(align, (np.complex128(0), np.complex128(1))) if sign_flip else align
        t = sp_unit_diag(n1, n1 - 1, rot)
        h = t.conj_t() @ pmat.conj_t()
        moved = h @ x @ h.conj_t()
        out.append(project_to_m(space, AlgebraElement(SP_SPHERE, moved, 0.0)))
    y1, y2 = out
    return (y1, y2, randers_norm(s, y1), randers_norm(s, y2))


@dataclass(frozen=True)
class ScanRow:
    candidate_id: str
    is_central: bool
    report: ConstantLengthReport


def sp_central_only_scan(s: RandersSpec, candidates, trials, rng) -> list:
    """Orbit-length report per candidate (X, x) on an sp_sphere metric with
    a2 != b.  Only candidates with X = 0 (the center of the algebra) can
    come back "constant"; anything else sweeps a sphere that is not a
    level set of the metric."""
    require_valid(s)
    rows = []
    for k, e in enumerate(candidates):
        if e.family != SP_SPHERE:
            raise InvalidInput("candidates must belong to the sp_sphere family")
        rep = orbit_length_report(s, e, L=None, trials=trials, rng=rng.split(k))
        central = e.x.max_abs() < 1e-14
        rows.append(ScanRow(candidate_id=f"cand{k}", is_central=central, report=rep))
    return rows


def scan_to_csv(rows) -> str:
    """Serialize scan rows to CSV (candidate_id, min, max, mean, stddev, verdict)."""
    buf = io.StringIO()
    buf.write("candidate_id,min,max,mean,stddev,verdict\n")
    for row in rows:
        r = row.report
        buf.write(f"{row.candidate_id},{r.min:.17g},{r.max:.17g},"
                  f"{r.mean:.17g},{r.stddev:.17g},{r.verdict}\n")
    return buf.getvalue()
