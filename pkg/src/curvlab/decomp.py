"""Model curvature tensors and irreducible curvature decompositions.

Models are normalized so the familiar closed forms hold exactly:

* sphere(n):        operator 2 * identity, scalar curvature 2n(n-1);
* const_hol(m):     the unique unitary-invariant tensor with the given
                    scalar curvature on R^{2m};
* hp(m):            symmetric-space operator with eigenvalues {4m, 4, 0},
                    squared operator norm 16m(5m+1), scalar 16m(m+2);
* grassmannian(p,q): plane-Grassmannian tensor, eigenvalues {p, q, 0};
* wolf(m):          grassmannian(m, 4) written on the quaternionic space,
                    restricted spectrum {m, 4, 0} over its holonomy algebra.

Each decomposition routine returns the orthogonal invariant pieces and is
paired with an independent route (explicit formula vs subtraction) that the
test suite plays against each other.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

import numpy as np

from .euclid import (
    EuclideanSpace,
    GeometryError,
    _pair_table,
    generic,
    kaehler as kaehler_space,
    quaternion_kaehler,
)
from .holonomy import HolonomyAlgebra, complement_mass, sp_sp1_algebra
from .tensor import (
    CurvatureTensor,
    _kn_array,
    _tensor_array_from_matrix,
    ricci,
    scalar,
    to_operator,
)


# ---------------------------------------------------------------------------
# model spaces


def sphere(n: int, radius: float = 2**-0.5) -> CurvatureTensor:
    """Round-sphere tensor; the default radius makes the operator 2 * id."""
    if n < 2:
        raise GeometryError("sphere models need dimension at least 2")
    if radius <= 0:
        raise GeometryError("radius must be positive")
    space = generic(n)
    g = np.eye(n)
    return CurvatureTensor(space, _kn_array(g, g) / (2 * radius**2))


def const_hol(m: int, scal: float | None = None) -> CurvatureTensor:
    """Constant-holomorphic-curvature tensor on the standard Kaehler R^{2m}.

    The default scalar curvature 4m(m+1) gives operator eigenvalues
    {2(m+1), 2, 0}.  The trace-free middle and Bochner parts vanish, which
    pins this model as the scalar piece of the unitary decomposition.
    """
    if m < 1:
        raise GeometryError("const_hol needs at least one complex plane")
    space = kaehler_space(m)
    if scal is None:
        scal = 4.0 * m * (m + 1)
    g = np.eye(2 * m)
    omega = space.J.T  # bilinear form of the parallel 2-form
    unit = (
        0.5 * _kn_array(g, g)
        + 0.5 * _kn_array(omega, omega)
        + 2.0 * np.einsum("xy,zw->xyzw", omega, omega)
    )
    return CurvatureTensor(space, (scal / (4.0 * m * (m + 1))) * unit)


def _conjugation_on_bivectors(space: EuclideanSpace, s: np.ndarray) -> np.ndarray:
    """Matrix of xi -> s mat(xi) s^T on the pair basis."""
    ii, jj = space.pair_rows, space.pair_cols
    # (s E_a s^T)[x, y] = s[x, jj_a] s[y, ii_a] - s[x, ii_a] s[y, jj_a]
    return s[np.ix_(jj, jj)] * s[np.ix_(ii, ii)] - s[np.ix_(jj, ii)] * s[np.ix_(ii, jj)]


def hp(m: int) -> CurvatureTensor:
    """Quaternionic projective model: identity plus the three structure
    conjugations plus twice the projections onto the parallel forms."""
    space = quaternion_kaehler(m)
    d = space.bivector_dim
    mat = np.eye(d)
    for s in (space.I, space.J, space.K):
        mat += _conjugation_on_bivectors(space, s)
    from .holonomy import quaternion_frame

    frame = quaternion_frame(space)
    for L in ("I", "J", "K"):
        w = frame.omega[L].coeffs
        mat += 2.0 * np.outer(w, w)
    return CurvatureTensor(space, _tensor_array_from_matrix(space, mat))


def grassmannian(p: int, q: int) -> CurvatureTensor:
    """Curvature tensor of the Grassmannian of p-planes in (p+q)-space.

    The tangent space is the q x p matrices with the trace metric; the basis
    matrix with a one in row i, column a sits at flat index i*p + a.
    """
    if p < 1 or q < 1:
        raise GeometryError("grassmannian needs positive plane dimensions")
    n = p * q
    iq = np.eye(q)
    ip = np.eye(p)
    t8 = (
        -np.einsum("kj,il,ab,cd->iajbkcld", iq, iq, ip, ip)
        + np.einsum("ki,jl,ab,cd->iajbkcld", iq, iq, ip, ip)
        - np.einsum("ij,kl,bc,ad->iajbkcld", iq, iq, ip, ip)
        + np.einsum("ij,kl,ac,bd->iajbkcld", iq, iq, ip, ip)
    )
    return CurvatureTensor(generic(n), t8.reshape(n, n, n, n))


def wolf(m: int) -> CurvatureTensor:
    """grassmannian(m, 4) transported onto the quaternion-Kaehler R^{4m}.

    Row i of a tangent matrix feeds the i-th member of the quadruple
    (f, If, Jf, Kf) of block j, so flat index i*m + j maps to coordinate
    4j + i.
    """
    if m < 2:
        raise GeometryError("the four-plane model needs m >= 2")
    base = grassmannian(m, 4).components
    n = 4 * m
    sigma = np.empty(n, dtype=np.intp)
    for i in range(4):
        for j in range(m):
            sigma[4 * j + i] = i * m + j
    space = quaternion_kaehler(m)
    return CurvatureTensor(space, base[np.ix_(sigma, sigma, sigma, sigma)])


# ---------------------------------------------------------------------------
# decompositions


@dataclass
class CurvatureDecomposition:
    """Orthogonal splitting of a curvature tensor into invariant parts."""

    source: CurvatureTensor
    kind: str
    parts: dict = field(default_factory=dict)
    coefficients: dict = field(default_factory=dict)

    def total(self) -> CurvatureTensor:
        arrays = [p.components for p in self.parts.values()]
        return CurvatureTensor(self.source.space, sum(arrays), validate=False)

    def residual(self) -> float:
        """Component-norm distance between the input and the sum of parts."""
        return float(np.linalg.norm(self.source.components - self.total().components))

    def max_cross_inner(self) -> float:
        """Largest pairwise component inner product between distinct parts."""
        vals = [0.0]
        items = list(self.parts.values())
        for a, b in itertools.combinations(items, 2):
            vals.append(abs(a.inner(b)))
        return max(vals)

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "coefficients": {k: float(v) for k, v in self.coefficients.items()},
            "part_norms_sq": {k: p.norm_sq() for k, p in self.parts.items()},
            "residual": self.residual(),
            "max_cross_inner": self.max_cross_inner(),
        }


def weyl_decompose(rm: CurvatureTensor) -> CurvatureDecomposition:
    """Scalar + traceless-Ricci + Weyl splitting; needs dimension >= 4."""
    n = rm.space.n
    if n < 4:
        raise GeometryError("the Weyl part only exists in dimension >= 4")
    g = np.eye(n)
    sc = scalar(rm)
    ric0 = ricci(rm) - (sc / n) * g
    scal_arr = (sc / (2.0 * n * (n - 1))) * _kn_array(g, g)
    ricci_arr = _kn_array(ric0, g) / (n - 2.0)
    weyl_arr = rm.components - scal_arr - ricci_arr
    space = rm.space
    return CurvatureDecomposition(
        source=rm,
        kind="generic",
        parts={
            "scalar_part": CurvatureTensor(space, scal_arr),
            "ric0_part": CurvatureTensor(space, ricci_arr),
            "weyl": CurvatureTensor(space, weyl_arr),
        },
        coefficients={"scalar": sc / (2.0 * n * (n - 1)), "ricci": 1.0 / (n - 2.0)},
    )


def _check_kaehler_invariance(rm: CurvatureTensor, rtol: float = 1e-9):
    j = rm.space.J
    conj = np.einsum("ax,by,abzw->xyzw", j, j, rm.components)
    scale = 1.0 + float(np.abs(rm.components).max(initial=0.0))
    if float(np.abs(rm.components - conj).max(initial=0.0)) > rtol * scale:
        raise GeometryError("tensor is not invariant under the complex structure")


def bochner_decompose(rm: CurvatureTensor) -> CurvatureDecomposition:
    """Unitary-invariant splitting on a Kaehler space.

    Parts: the constant-holomorphic piece carrying the scalar curvature, the
    traceless-Ricci piece, and the totally trace-free remainder.  Input must
    be invariant under the complex structure.
    """
    space = rm.space
    if space.kind != "kaehler":
        raise GeometryError("bochner_decompose needs a Kaehler space")
    _check_kaehler_invariance(rm)
    n, m = space.n, space.m
    g = np.eye(n)
    omega = space.J.T
    sc = scalar(rm)
    ric0 = ricci(rm) - (sc / n) * g
    rho0 = space.J.T @ ric0

    c1 = sc / (4.0 * m * (m + 1))
    c2 = 1.0 / (2.0 * (m + 2))
    unit = (
        0.5 * _kn_array(g, g)
        + 0.5 * _kn_array(omega, omega)
        + 2.0 * np.einsum("xy,zw->xyzw", omega, omega)
    )
    middle = c2 * (
        _kn_array(ric0, g)
        + _kn_array(rho0, omega)
        + 2.0 * np.einsum("xy,zw->xyzw", rho0, omega)
        + 2.0 * np.einsum("xy,zw->xyzw", omega, rho0)
    )
    scal_arr = c1 * unit
    bochner_arr = rm.components - scal_arr - middle
    return CurvatureDecomposition(
        source=rm,
        kind="kaehler",
        parts={
            "scalar_part": CurvatureTensor(space, scal_arr),
            "ric0_part": CurvatureTensor(space, middle),
            "bochner": CurvatureTensor(space, bochner_arr),
        },
        coefficients={"scalar": c1, "ricci": c2},
    )


def bochner_explicit(rm: CurvatureTensor) -> CurvatureTensor:
    """Trace-free part computed from the closed formula with full traces.

    Independent of bochner_decompose: uses the raw Ricci contraction and a
    different constant grouping; agreement of the two routes is a test
    invariant, not a code path.
    """
    space = rm.space
    if space.kind != "kaehler":
        raise GeometryError("bochner_explicit needs a Kaehler space")
    _check_kaehler_invariance(rm)
    n, m = space.n, space.m
    g = np.eye(n)
    omega = space.J.T
    sc = scalar(rm)
    ric = ricci(rm)
    rho = space.J.T @ ric
    c2 = 1.0 / (2.0 * (m + 2))
    c3 = sc / (4.0 * (m + 1) * (m + 2))
    arr = (
        rm.components
        - c2
        * (
            _kn_array(ric, g)
            + _kn_array(rho, omega)
            + 2.0 * np.einsum("xy,zw->xyzw", rho, omega)
            + 2.0 * np.einsum("xy,zw->xyzw", omega, rho)
        )
        + c3
        * (
            0.5 * _kn_array(g, g)
            + 0.5 * _kn_array(omega, omega)
            + 2.0 * np.einsum("xy,zw->xyzw", omega, omega)
        )
    )
    return CurvatureTensor(space, arr)


def qk_decompose(
    rm: CurvatureTensor, algebra: HolonomyAlgebra | None = None
) -> CurvatureDecomposition:
    """Split a quaternion-Kaehler tensor into the model multiple and the
    trace-free remainder.

    The operator must be supported on the quaternionic holonomy algebra;
    its complement mass is checked against 1e-8 relative.
    """
    space = rm.space
    if space.kind != "qk":
        raise GeometryError("qk_decompose needs a quaternion-Kaehler space")
    if algebra is None:
        algebra = sp_sp1_algebra(space)
    op = to_operator(rm)
    mass = complement_mass(op, algebra)
    if mass > 1e-8 * (1.0 + float(np.abs(op.matrix).max(initial=0.0))):
        raise GeometryError(
            f"operator leaks off the holonomy algebra (mass {mass:.2e})"
        )
    m = space.m
    model = hp(m)
    c = scalar(rm) / (16.0 * m * (m + 2))
    scal_part = c * model
    rest = rm - scal_part
    return CurvatureDecomposition(
        source=rm,
        kind="qk",
        parts={
            "hp_multiple": CurvatureTensor(space, scal_part.components),
            "hyperkaehler_part": CurvatureTensor(space, rest.components),
        },
        coefficients={"scalar": c},
    )


# ---------------------------------------------------------------------------
# random tensors supported on an algebra


_KERNEL_CACHE: dict = {}
_KERNEL_LOCK = threading.Lock()


def _bianchi_kernel_basis(algebra: HolonomyAlgebra) -> np.ndarray:
    """Orthonormal basis, shape (k, d, d), of the symmetric operators on the
    algebra whose full-space extension satisfies the Bianchi identity.

    The Bianchi sum of a pair-symmetric array is totally antisymmetric, so
    it vanishes iff it vanishes at strictly increasing index quadruples;
    each quadruple contributes one linear constraint on the operator.
    """
    space = algebra.space
    key = (space.kind, space.n, algebra.name)
    with _KERNEL_LOCK:
        hit = _KERNEL_CACHE.get(key)
    if hit is not None:
        return hit

    n, d = space.n, algebra.dim
    _, _, lookup = _pair_table(n)
    quads = list(itertools.combinations(range(n), 4))
    q_ij = np.array([lookup[(i, j)] for i, j, k, l in quads], dtype=np.intp)
    q_kl = np.array([lookup[(k, l)] for i, j, k, l in quads], dtype=np.intp)
    q_jk = np.array([lookup[(j, k)] for i, j, k, l in quads], dtype=np.intp)
    q_il = np.array([lookup[(i, l)] for i, j, k, l in quads], dtype=np.intp)
    q_ik = np.array([lookup[(i, k)] for i, j, k, l in quads], dtype=np.intp)
    q_jl = np.array([lookup[(j, l)] for i, j, k, l in quads], dtype=np.intp)

    c = algebra.coeff_matrix  # rows span the algebra inside the pair basis
    sym_pairs = [(a, b) for a in range(d) for b in range(a, d)]
    rows = np.zeros((len(sym_pairs), len(quads)))
    # full-space matrix of the sym basis element is c^T S c; evaluate the
    # Bianchi combination M[ij,kl] + M[jk,il] - M[ik,jl] by gathering columns
    g1, g2 = c[:, q_ij], c[:, q_kl]
    g3, g4 = c[:, q_jk], c[:, q_il]
    g5, g6 = c[:, q_ik], c[:, q_jl]
    for row, (a, b) in enumerate(sym_pairs):
        if a == b:
            rows[row] = g1[a] * g2[a] + g3[a] * g4[a] - g5[a] * g6[a]
        else:
            rows[row] = (
                g1[a] * g2[b] + g1[b] * g2[a]
                + g3[a] * g4[b] + g3[b] * g4[a]
                - g5[a] * g6[b] - g5[b] * g6[a]
            ) / np.sqrt(2)

    _, s, vh = np.linalg.svd(rows.T, full_matrices=True)
    rank = int(np.sum(s > 1e-8))
    coeff_basis = vh[rank:]

    basis = np.zeros((coeff_basis.shape[0], d, d))
    for kdx, vec in enumerate(coeff_basis):
        s_mat = np.zeros((d, d))
        for (a, b), val in zip(sym_pairs, vec):
            if a == b:
                s_mat[a, a] = val
            else:
                s_mat[a, b] = val / np.sqrt(2)
                s_mat[b, a] = val / np.sqrt(2)
        basis[kdx] = s_mat

    with _KERNEL_LOCK:
        _KERNEL_CACHE[key] = basis
    return basis


def curvature_space_dim(algebra: HolonomyAlgebra) -> int:
    """Dimension of the curvature tensors supported on the algebra."""
    return _bianchi_kernel_basis(algebra).shape[0]


def random_algebra_curvature(
    algebra: HolonomyAlgebra,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> CurvatureTensor:
    """Gaussian sample from the curvature tensors supported on the algebra."""
    if rng is None:
        rng = np.random.default_rng(seed)
    basis = _bianchi_kernel_basis(algebra)
    coeffs = rng.standard_normal(basis.shape[0])
    s = np.einsum("k,kab->ab", coeffs, basis)
    c = algebra.coeff_matrix
    full = c.T @ s @ c
    return CurvatureTensor(algebra.space, _tensor_array_from_matrix(algebra.space, full))
