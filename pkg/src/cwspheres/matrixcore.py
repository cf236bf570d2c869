"""Dense complex and quaternion matrix algebra.

Covers the group-theoretic kernels used everywhere else: skew-Hermitian
matrix exponentials through eigendecomposition (so results are exactly
unitary), eigenvalue phase extraction on the principal branch, Haar
sampling on U(n) and Sp(n), and adjoint conjugation.  Quaternion matrices
are stored as complex pairs (Q1, Q2) meaning Q = Q1 + Q2*j; a 2n x 2n
complex embedding is provided as an independent cross-check only.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput

SKEW_TOL = 1e-12
UNITARY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10


# --------------------------------------------------------------------------
# deterministic RNG streams
# --------------------------------------------------------------------------

class RngStream:
    """Seeded random stream with deterministic, order-independent substreams.

    Substreams are derived from the root seed and a key path, so parallel
    trial loops can split the stream without coordinating call order.
    Identical seeds replay identical samples.
    """

    def __init__(self, seed, _key=()):
        self.seed = int(seed)
        self._key = tuple(_key)
        self.gen = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self._key))

    def split(self, k):
        """Return an independent child stream keyed by integer `k`."""
        return RngStream(self.seed, self._key + (int(k),))

    def ginibre(self, rows, cols=None):
        """Complex standard Gaussian matrix (Ginibre ensemble)."""
        cols = rows if cols is None else cols
        g = self.gen
        return (g.standard_normal((rows, cols))
                + 1j * g.standard_normal((rows, cols))) / np.sqrt(2.0)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, key={self._key})"


# --------------------------------------------------------------------------
# complex matrices: validation, exponential, phases, Haar sampling
# --------------------------------------------------------------------------

def _require_finite(a, what):
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{what} has non-finite entries")


def as_skew_hermitian(a, tol=SKEW_TOL):
    """Validate that `a` is square skew-Hermitian (A* = -A) and return it."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    _require_finite(a, "matrix")
    defect = np.max(np.abs(a + a.conj().T)) if a.size else 0.0
    if defect > tol:
        raise InvalidInput(f"matrix is not skew-Hermitian (defect {defect:.3e})")
    return a


def as_unitary(u, tol=UNITARY_TOL):
    """Validate that `u` is unitary (U*U = I) and return it."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {u.shape}")
    _require_finite(u, "matrix")
    defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if defect > tol:
        raise InvalidInput(f"matrix is not unitary (defect {defect:.3e})")
    return u


def expm_skew(a, t=1.0):
    """exp(t*A) for skew-Hermitian A, via eigendecomposition of the
    Hermitian matrix -iA.

    The result is assembled from an exactly unitary eigenvector matrix and
    unit-modulus phase factors, so it is unitary to machine precision.
    """
    a = as_skew_hermitian(a)
    if not np.isfinite(t):
        raise InvalidInput("flow time must be finite")
    w, v = np.linalg.eigh(-1j * a)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def unitary_phases(u, tol=UNITARY_TOL):
    """Eigenvalue phases of a unitary matrix, sorted ascending in (-pi, pi].

    The branch point is resolved toward +pi, so -1 reports phase +pi.
    """
    u = as_unitary(u, tol=tol)
    phases = np.angle(np.linalg.eigvals(u))
    phases = np.where(phases <= -np.pi, phases + 2.0 * np.pi, phases)
    return np.sort(phases)


def haar_unitary(n, rng):
    """Haar-distributed U(n) draw: QR of a complex Ginibre matrix with the
    standard phase correction on R's diagonal."""
    if n < 1:
        raise InvalidInput("dimension must be >= 1")
    q, r = np.linalg.qr(rng.ginibre(n))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_unitary_batch(n, count, rng):
    """Stacked Haar U(n) draws of shape (count, n, n)."""
    if n < 1 or count < 0:
        raise InvalidInput("dimension must be >= 1 and count >= 0")
    g = rng.gen
    z = (g.standard_normal((count, n, n))
         + 1j * g.standard_normal((count, n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[:, None, :]


# --------------------------------------------------------------------------
# quaternion matrices as complex pairs
# --------------------------------------------------------------------------
#
# Elementwise quaternion arrays are pairs (z1, z2) of equal-shape complex
# ndarrays encoding z1 + z2*j.  The identification i = sqrt(-1) is fixed
# throughout, so i*z = z*i for complex z while j*z = conj(z)*j.

def qmul(x, y):
    """Hamilton product of quaternion pairs, elementwise."""
    x1, x2 = x
    y1, y2 = y
    return (x1 * y1 - x2 * np.conj(y2), x1 * y2 + x2 * np.conj(y1))


def qconj(x):
    """Quaternion conjugate of a pair, elementwise."""
    return (np.conj(x[0]), -x[1])


def qabs(x):
    """Quaternion modulus, elementwise."""
    return np.sqrt(np.abs(x[0]) ** 2 + np.abs(x[1]) ** 2)


def qdot(x, y):
    """Hermitian inner product sum_a conj(x_a) * y_a of quaternion vectors."""
    x1, x2 = x
    y1, y2 = y
    return (np.sum(np.conj(x1) * y1 + x2 * np.conj(y2)),
            np.sum(np.conj(x1) * y2 - x2 * np.conj(y1)))


class QuaternionMatrix:
    """Quaternion matrix Q = Q1 + Q2*j as a pair of complex ndarrays."""

    __slots__ = ("q1", "q2")

    def __init__(self, q1, q2):
        q1 = np.asarray(q1, dtype=complex)
        q2 = np.asarray(q2, dtype=complex)
        if q1.shape != q2.shape or q1.ndim != 2:
            raise InvalidInput("Q1 and Q2 must be 2-d arrays of equal shape")
        _require_finite(q1, "Q1")
        _require_finite(q2, "Q2")
        self.q1 = q1
        self.q2 = q2

    @property
    def shape(self):
        return self.q1.shape

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex))

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols), dtype=complex),
                   np.zeros((rows, cols), dtype=complex))

    def __matmul__(self, other):
        a1, a2 = self.q1, self.q2
        b1, b2 = other.q1, other.q2
        return QuaternionMatrix(a1 @ b1 - a2 @ np.conj(b2),
                                a1 @ b2 + a2 @ np.conj(b1))

    def __add__(self, other):
        return QuaternionMatrix(self.q1 + other.q1, self.q2 + other.q2)

    def __sub__(self, other):
        return QuaternionMatrix(self.q1 - other.q1, self.q2 - other.q2)

    def __neg__(self):
        return QuaternionMatrix(-self.q1, -self.q2)

    def scale(self, s):
        """Multiply by a real scalar."""
        return QuaternionMatrix(s * self.q1, s * self.q2)

    def conj_t(self):
        """Quaternionic conjugate transpose: (Q1 + Q2 j)* = Q1* - Q2^T j."""
        return QuaternionMatrix(self.q1.conj().T, -self.q2.T)

    def apply(self, v):
        """Apply to a quaternion column vector given as a pair of (n,) arrays."""
        v1, v2 = v
        return (self.q1 @ v1 - self.q2 @ np.conj(v2),
                self.q1 @ v2 + self.q2 @ np.conj(v1))

    def to_complex(self):
        """2n x 2n complex embedding [[Q1, Q2], [-conj(Q2), conj(Q1)]].

        Kept as an independent oracle: quaternion products map to ordinary
        complex products under this embedding.
        """
        top = np.hstack([self.q1, self.q2])
        bot = np.hstack([-np.conj(self.q2), np.conj(self.q1)])
        return np.vstack([top, bot])

    def max_abs(self):
        return max(np.max(np.abs(self.q1)), np.max(np.abs(self.q2)))

    def __repr__(self):
        return f"QuaternionMatrix(shape={self.shape})"


def symplectic_defect(q):
    """Max-entry defect of the two Sp(n) membership conditions
    Q1*Q2 - Q2^T conj(Q1) = 0  and  Q1*Q1 + Q2^T conj(Q2) = I."""
    n = q.shape[0]
    gram = q.conj_t() @ q
    return max(np.max(np.abs(gram.q1 - np.eye(n))), np.max(np.abs(gram.q2)))


def as_symplectic(q, tol=SYMPLECTIC_TOL):
    """Validate Sp(n) membership of a QuaternionMatrix and return it."""
    if q.shape[0] != q.shape[1]:
        raise InvalidInput(f"expected square quaternion matrix, got {q.shape}")
    defect = symplectic_defect(q)
    if defect > tol:
        raise InvalidInput(f"matrix is not symplectic (defect {defect:.3e})")
    return q


def quaternion_skew_defect(x):
    """Max-entry defect of X* = -X for a QuaternionMatrix."""
    return (x + x.conj_t()).max_abs()


def as_quaternion_skew(x, tol=SKEW_TOL):
    """Validate quaternionic skew-Hermitian (X* = -X) and return it."""
    if quaternion_skew_defect(x) > tol:
        raise InvalidInput("quaternion matrix is not skew-Hermitian")
    return x


def haar_symplectic(n, rng):
    """Haar-distributed Sp(n) draw.

    QR over the quaternions in the (Q1, Q2) pair model: modified
    Gram-Schmidt on the columns of a quaternion Ginibre matrix, with
    right-side coefficients so columns span a right module.  The implicit
    R factor has positive real diagonal, which makes the Q factor Haar.
    """
    if n < 1:
        raise InvalidInput("dimension must be >= 1")
    g1 = rng.ginibre(n)
    g2 = rng.ginibre(n)
    cols = [(g1[:, a].copy(), g2[:, a].copy()) for a in range(n)]
    for _ in range(2):  # second pass tightens orthogonality
        for a in range(n):
            v1, v2 = cols[a]
            for b in range(a):
                u1, u2 = cols[b]
                c = qdot((u1, u2), (v1, v2))
                # v -= u * c   (scalar on the right)
                v1 = v1 - (u1 * c[0] - u2 * np.conj(c[1]))
                v2 = v2 - (u1 * c[1] + u2 * np.conj(c[0]))
            nrm = np.sqrt(np.sum(np.abs(v1) ** 2 + np.abs(v2) ** 2))
            cols[a] = (v1 / nrm, v2 / nrm)
    q1 = np.column_stack([c[0] for c in cols])
    q2 = np.column_stack([c[1] for c in cols])
    return as_symplectic(QuaternionMatrix(q1, q2))


# --------------------------------------------------------------------------
# adjoint action
# --------------------------------------------------------------------------

def conjugate(g, x):
    """Adjoint action g x g* for unitary g on ndarray x, or symplectic g on
    QuaternionMatrix x.  Skewness of x is preserved to machine precision."""
    if isinstance(g, QuaternionMatrix):
        if not isinstance(x, QuaternionMatrix) or g.shape != x.shape:
            raise InvalidInput("conjugation operands have incompatible shapes")
        return g @ x @ g.conj_t()
    g = np.asarray(g, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if g.shape != x.shape or g.ndim != 2:
        raise InvalidInput("conjugation operands have incompatible shapes")
    return g @ x @ g.conj().T


# --------------------------------------------------------------------------
# su(2) <-> quaternion dictionary
# --------------------------------------------------------------------------
#
# Unit quaternions (w, x, y, z) are identified with SU(2) matrices
# [[w + x i, y + z i], [-y + z i, w - x i]], so the imaginary units i, j, k
# correspond to the orthonormal basis below.  The bi-invariant inner
# product <A, B> = -tr(AB)/2 makes this basis orthonormal and gives unit
# vectors eigenvalues +-i, hence exp(pi X) = -I for |X| = 1.

SU2_BASIS = (
    np.array([[1j, 0], [0, -1j]]),
    np.array([[0.0 + 0j, 1.0], [-1.0, 0.0]]),
    np.array([[0, 1j], [1j, 0]]),
)


def su2_from_vec(v):
    """Traceless skew-Hermitian 2x2 matrix from coordinates in SU2_BASIS."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise InvalidInput("su(2) coordinate vector must have shape (3,)")
    return v[0] * SU2_BASIS[0] + v[1] * SU2_BASIS[1] + v[2] * SU2_BASIS[2]


def vec_from_su2(x):
    """Coordinates of an su(2) matrix in SU2_BASIS (inverse of su2_from_vec)."""
    x = as_skew_hermitian(np.asarray(x, dtype=complex))
    if x.shape != (2, 2) or abs(np.trace(x)) > 1e-10:
        raise InvalidInput("expected a traceless skew-Hermitian 2x2 matrix")
    return np.array([x[0, 0].imag,
                     x[0, 1].real,
                     x[0, 1].imag])


def su2_inner(x, y):
    """Bi-invariant inner product -tr(xy)/2 on su(2)."""
    return -np.trace(x @ y).real / 2.0


def quat_from_su2_matrix(g):
    """Unit quaternion (w, x, y, z) from an SU(2) matrix."""
    g = np.asarray(g, dtype=complex)
    return np.array([g[0, 0].real, g[0, 0].imag, g[0, 1].real, g[0, 1].imag])


def su2_matrix_from_quat(p):
    """SU(2) matrix from a unit quaternion (w, x, y, z)."""
    w, x, y, z = np.asarray(p, dtype=float)
    return np.array([[w + 1j * x, y + 1j * z],
                     [-y + 1j * z, w - 1j * x]])


def haar_su2(rng):
    """Haar draw from SU(2) (uniform unit quaternion)."""
    p = rng.gen.standard_normal(4)
    return su2_matrix_from_quat(p / np.linalg.norm(p))
