"""Holonomy subalgebras of the rotation algebra and quaternionic frames.

Subalgebras are stored as orthonormal coefficient matrices over the
lexicographic bivector basis.  The unitary and symplectic cases are computed
as kernels of commutator maps with the parallel structures, so the
construction works for any admissible structure, not just the standard one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .euclid import Bivector, EuclideanSpace, GeometryError, wedge
from .tensor import CurvatureOperator, CurvatureTensor, to_operator

_KERNEL_TOL = 1e-8  # singular values below this count as zero


def _sign_fix(rows: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude entry is positive."""
    out = rows.copy()
    for k in range(out.shape[0]):
        lead = np.argmax(np.abs(out[k]))
        if out[k, lead] < 0:
            out[k] = -out[k]
    return out


def _kernel_rows(mapping: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as rows) of the kernel of a linear map."""
    _, s, vh = np.linalg.svd(mapping, full_matrices=True)
    rank = int(np.sum(s > _KERNEL_TOL))
    return _sign_fix(vh[rank:])


@dataclass(eq=False)
class HolonomyAlgebra:
    """Lie subalgebra of skew matrices, with an orthonormal bivector basis.

    coeff_matrix has one row per basis element; rows are orthonormal with
    respect to the bivector inner product.  Closure under the bracket is
    checked on construction.
    """

    space: EuclideanSpace
    name: str
    coeff_matrix: np.ndarray

    def __post_init__(self):
        self.coeff_matrix = np.asarray(self.coeff_matrix, dtype=float)
        d, cols = self.coeff_matrix.shape
        if cols != self.space.bivector_dim:
            raise GeometryError("coefficient rows must live on the bivector space")
        gram = self.coeff_matrix @ self.coeff_matrix.T
        if not np.allclose(gram, np.eye(d), atol=1e-9):
            raise GeometryError(f"basis of {self.name} is not orthonormal")
        defect = self.closure_defect()
        if defect > 1e-8:
            raise GeometryError(f"{self.name} is not closed under the bracket ({defect:.2e})")

    @property
    def dim(self) -> int:
        return self.coeff_matrix.shape[0]

    @cached_property
    def basis(self) -> list[Bivector]:
        return [Bivector(self.space, row) for row in self.coeff_matrix]

    @cached_property
    def matrices(self) -> np.ndarray:
        """Stack of the skew matrices of the basis, shape (dim, n, n)."""
        n = self.space.n
        ii, jj = self.space.pair_rows, self.space.pair_cols
        mats = np.zeros((self.dim, n, n))
        mats[:, jj, ii] = self.coeff_matrix
        mats[:, ii, jj] = -self.coeff_matrix
        return mats

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """c[a, b, g] = <[basis_a, basis_b], basis_g>."""
        ii, jj = self.space.pair_rows, self.space.pair_cols
        prod = np.einsum("aij,bjk->abik", self.matrices, self.matrices)
        comm = prod - prod.transpose(1, 0, 2, 3)
        comm_coeffs = comm[:, :, jj, ii]  # bracket stays skew, read off pairs
        return np.einsum("abp,gp->abg", comm_coeffs, self.coeff_matrix)

    def closure_defect(self) -> float:
        """Largest bivector-norm distance of a basis bracket from the span."""
        ii, jj = self.space.pair_rows, self.space.pair_cols
        prod = np.einsum("aij,bjk->abik", self.matrices, self.matrices)
        comm = prod - prod.transpose(1, 0, 2, 3)
        cc = comm[:, :, jj, ii]
        resid = cc - np.einsum("abg,gp->abp", np.einsum("abp,gp->abg", cc, self.coeff_matrix), self.coeff_matrix)
        return float(np.sqrt(np.sum(resid**2, axis=2)).max(initial=0.0))

    def coords_of(self, xi: Bivector) -> np.ndarray:
        return self.coeff_matrix @ xi.coeffs

    def embed(self, coords: np.ndarray) -> Bivector:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise GeometryError(f"expected {self.dim} coordinates")
        return Bivector(self.space, coords @ self.coeff_matrix)


# ---------------------------------------------------------------------------
# constructors


def so_algebra(space: EuclideanSpace) -> HolonomyAlgebra:
    """The full rotation algebra; the bivector basis itself."""
    d = space.bivector_dim
    return HolonomyAlgebra(space, f"so({space.n})", np.eye(d))


def _commutator_map(space: EuclideanSpace, structs: list[np.ndarray]) -> np.ndarray:
    """Matrix of xi -> ([mat(xi), S])_S, columns indexed by bivector pairs."""
    n = space.n
    ii, jj = space.pair_rows, space.pair_cols
    blocks = []
    for s in structs:
        # column a of the block is vec(mat(e_a) S - S mat(e_a))
        col = np.zeros((n * n, space.bivector_dim))
        for a in range(space.bivector_dim):
            e = np.zeros((n, n))
            e[jj[a], ii[a]] = 1.0
            e[ii[a], jj[a]] = -1.0
            col[:, a] = (e @ s - s @ e).reshape(-1)
        blocks.append(col)
    return np.vstack(blocks)


def u_algebra(space: EuclideanSpace) -> HolonomyAlgebra:
    """Bivectors commuting with the complex structure J; dimension (n/2)^2."""
    if space.structure.J is None:
        raise GeometryError("u_algebra needs a space with a complex structure")
    rows = _kernel_rows(_commutator_map(space, [space.J]))
    m = space.n // 2
    if rows.shape[0] != m * m:
        raise GeometryError(
            f"unitary algebra has dimension {rows.shape[0]}, expected {m * m}"
        )
    return HolonomyAlgebra(space, f"u({m})", rows)


def sp_sp1_algebra(space: EuclideanSpace) -> HolonomyAlgebra:
    """Symplectic algebra plus the quaternionic line, inside so(4m).

    The first block commutes with all of I, J, K; the last three rows are
    the normalized parallel 2-forms.  These are automatically orthogonal to
    the commuting block.
    """
    if space.kind != "qk":
        raise GeometryError("sp_sp1_algebra needs a quaternion-Kaehler space")
    m = space.m
    rows = _kernel_rows(_commutator_map(space, [space.I, space.J, space.K]))
    if rows.shape[0] != m * (2 * m + 1):
        raise GeometryError(
            f"symplectic block has dimension {rows.shape[0]}, expected {m * (2 * m + 1)}"
        )
    frame = quaternion_frame(space)
    omegas = np.stack(
        [frame.omega[L].coeffs / np.sqrt(2 * m) for L in ("I", "J", "K")]
    )
    return HolonomyAlgebra(space, f"sp({m})+sp(1)", np.vstack([rows, omegas]))


def by_name(space: EuclideanSpace, name: str) -> HolonomyAlgebra:
    """Dispatch on a short tag: so, u, or sp_sp1 (alias sp, qk)."""
    tag = name.lower()
    if tag in ("so", "generic"):
        return so_algebra(space)
    if tag in ("u", "kaehler"):
        return u_algebra(space)
    if tag in ("sp_sp1", "sp", "qk"):
        return sp_sp1_algebra(space)
    raise GeometryError(f"unknown holonomy tag {name!r}")


# ---------------------------------------------------------------------------
# restriction of operators


def project(op, algebra: HolonomyAlgebra) -> CurvatureOperator:
    """Restrict a full bivector operator (or tensor) to the subalgebra."""
    if isinstance(op, CurvatureTensor):
        op = to_operator(op)
    if op.algebra is not None:
        raise GeometryError("operator is already restricted")
    c = algebra.coeff_matrix
    return CurvatureOperator(op.space, c @ op.matrix @ c.T, algebra)


def complement_mass(op, algebra: HolonomyAlgebra) -> float:
    """Frobenius norm of the part of the operator not supported on the
    subalgebra; zero iff the algebra is invariant and the complement is
    annihilated."""
    if isinstance(op, CurvatureTensor):
        op = to_operator(op)
    c = algebra.coeff_matrix
    p = c.T @ c
    return float(np.linalg.norm(op.matrix - p @ op.matrix @ p))


# ---------------------------------------------------------------------------
# quaternionic frames


@dataclass(eq=False)
class QuaternionFrame:
    """Distinguished bivector families on a quaternion-Kaehler space.

    Indices run over the quaternionic blocks 0..m-1.  The families:

    * omega[L]: the parallel 2-form of the structure L, squared norm 2m;
    * omega_pm[(L, s)]: unit sums/differences of the two halves of omega[L];
    * w[(i, j)]: diagonal real pair rotations, i < j;
    * paired[(L, i, j)]: twisted pair rotations, i < j;
    * diagonal[(L, i)]: traceless single-block rotations;
    * tilde[(L, k)]: the orthonormal completion of the diagonal family
      orthogonal to omega[L], k = 0..m-2.

    w + paired + diagonal is an orthonormal basis of the commuting block of
    sp(m); the omega_pm carry the two sp(1) summands of the symmetric-space
    operator, w the middle eigenvalue, paired + tilde its kernel.
    """

    space: EuclideanSpace
    omega: dict
    omega_pm: dict
    w: dict
    paired: dict
    diagonal: dict
    tilde: dict

    def sp_basis(self) -> list[Bivector]:
        m = self.space.m
        out = [self.w[(i, j)] for i in range(m) for j in range(i + 1, m)]
        for L in ("I", "J", "K"):
            out += [self.paired[(L, i, j)] for i in range(m) for j in range(i + 1, m)]
        for L in ("I", "J", "K"):
            out += [self.diagonal[(L, i)] for i in range(m)]
        return out

    def full_basis(self) -> list[Bivector]:
        m = self.space.m
        return self.sp_basis() + [self.omega[L] / np.sqrt(2 * m) for L in ("I", "J", "K")]

    def symmetric_space_eigenbasis(self) -> list[tuple[Bivector, float]]:
        """Orthonormal eigenbasis, with eigenvalues, of the four-plane
        Grassmannian curvature operator restricted to this algebra."""
        m = self.space.m
        out = [(self.omega_pm[(L, s)], float(m)) for s in ("+", "-") for L in ("I", "J", "K")]
        out += [(self.w[(i, j)], 4.0) for i in range(m) for j in range(i + 1, m)]
        for L in ("I", "J", "K"):
            out += [(self.paired[(L, i, j)], 0.0) for i in range(m) for j in range(i + 1, m)]
        for L in ("I", "J", "K"):
            out += [(self.tilde[(L, k)], 0.0) for k in range(m - 1)]
        return out


def quaternion_frame(space: EuclideanSpace) -> QuaternionFrame:
    if space.kind != "qk":
        raise GeometryError("quaternion frames need a quaternion-Kaehler space")
    m = space.m
    n = space.n
    # cyclic companions: the L-form pairs e ^ Le with Ae ^ Be
    cyc = {"I": ("J", "K"), "J": ("K", "I"), "K": ("I", "J")}
    structs = {"I": space.I, "J": space.J, "K": space.K}

    def unit(i: int) -> np.ndarray:
        v = np.zeros(n)
        v[4 * i] = 1.0
        return v

    omega = {}
    omega_pm = {}
    diagonal = {}
    for L, (A, B) in cyc.items():
        SL, SA, SB = structs[L], structs[A], structs[B]
        first = [wedge(space, unit(i), SL @ unit(i)) for i in range(m)]
        second = [wedge(space, SA @ unit(i), SB @ unit(i)) for i in range(m)]
        total_first = sum(first[1:], first[0])
        total_second = sum(second[1:], second[0])
        omega[L] = total_first + total_second
        omega_pm[(L, "+")] = (total_first + total_second) / np.sqrt(2 * m)
        omega_pm[(L, "-")] = (total_first - total_second) / np.sqrt(2 * m)
        for i in range(m):
            diagonal[(L, i)] = (first[i] - second[i]) / np.sqrt(2)

    w = {}
    paired = {}
    for i in range(m):
        for j in range(i + 1, m):
            ei, ej = unit(i), unit(j)
            acc = wedge(space, ei, ej)
            for L in ("I", "J", "K"):
                acc = acc + wedge(space, structs[L] @ ei, structs[L] @ ej)
            w[(i, j)] = acc / 2
            for L, (A, B) in cyc.items():
                SL, SA, SB = structs[L], structs[A], structs[B]
                term = (
                    wedge(space, ei, SL @ ej)
                    + wedge(space, ej, SL @ ei)
                    - wedge(space, SA @ ei, SB @ ej)
                    - wedge(space, SA @ ej, SB @ ei)
                )
                paired[(L, i, j)] = term / 2

    # orthonormal completion of the diagonal family inside each L-slice:
    # combination of the first k+1 diagonal elements minus (k+1) times the next
    tilde = {}
    for L in ("I", "J", "K"):
        for k in range(m - 1):
            kk = k + 1
            acc = diagonal[(L, 0)]
            for j in range(1, kk):
                acc = acc + diagonal[(L, j)]
            tilde[(L, k)] = (acc - kk * diagonal[(L, kk)]) / np.sqrt(kk * kk + kk)
    return QuaternionFrame(
        space=space,
        omega=omega,
        omega_pm=omega_pm,
        w=w,
        paired=paired,
        diagonal=diagonal,
        tilde=tilde,
    )
