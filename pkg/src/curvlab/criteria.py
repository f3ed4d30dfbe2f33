"""Weighted spectral positivity criteria and curvature terms.

Everything here measures rank-four tensors through their bivector operators;
squared norms of hat components are one quarter of the component-array norms
used in the tensor module.  That choice makes the outputs commensurable with
operator Frobenius norms and with the closed-form model constants.  Rank-two
inputs are measured as plain arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import const_hol, hp, qk_decompose, sphere
from .euclid import GeometryError, symmetric_eigen
from .holonomy import HolonomyAlgebra, project, sp_sp1_algebra
from .tensor import CurvatureOperator, CurvatureTensor, t_hat, to_operator


def lambda_tripod(a: float, b: float, c: float) -> float:
    """Symmetric cubic weight of an eigenvalue triple.

    Vanishes when all three values agree; this is the coefficient with which
    a triple of eigenvalues enters the self curvature term.
    """
    return a * (b - c) ** 2 + b * (c - a) ** 2 + c * (a - b) ** 2


# ---------------------------------------------------------------------------
# hat components against an operator


def _resolve(op, algebra):
    """Normalize (operator, algebra) input combinations to a restricted op."""
    if isinstance(op, CurvatureTensor):
        op = to_operator(op)
    if not isinstance(op, CurvatureOperator):
        raise GeometryError("expected a curvature operator or tensor")
    if op.algebra is None:
        if algebra is None:
            raise GeometryError("an algebra is required to restrict the operator")
        return project(op, algebra), algebra
    if algebra is not None and algebra is not op.algebra:
        raise GeometryError("operator is already restricted to a different algebra")
    return op, op.algebra


def _hat_flat(t, algebra: HolonomyAlgebra) -> tuple[np.ndarray, float]:
    """Stacked, flattened hat components and the norm convention factor."""
    hats = t_hat(t, algebra)
    rank = hats[0].ndim
    factor = 0.25 if rank == 4 else 1.0
    return np.stack([h.reshape(-1) for h in hats]), factor


@dataclass
class CurvatureTerm:
    """Value of the curvature term computed along two independent routes."""

    eigen_route: float
    bilinear_route: float

    @property
    def value(self) -> float:
        return self.eigen_route

    @property
    def spread(self) -> float:
        return abs(self.eigen_route - self.bilinear_route)


def curvature_term(op, t, algebra: HolonomyAlgebra | None = None) -> CurvatureTerm:
    """Pairing of an operator with the hat components of a tensor.

    eigen route: rotate the hats into the operator eigenbasis and weight
    their squared norms by the eigenvalues.  bilinear route: contract the
    operator matrix against the Gram matrix of the hats directly, with no
    eigensolve.  For the identity operator the value is the squared hat norm
    of t in this module's convention.
    """
    op, algebra = _resolve(op, algebra)
    flat, factor = _hat_flat(t, algebra)
    gram = factor * (flat @ flat.T)
    bilinear = float(np.sum(op.matrix * gram))
    spec = symmetric_eigen(op.matrix)
    rotated = spec.vectors.T @ flat
    eigen = float(spec.values @ (factor * np.sum(rotated**2, axis=1)))
    return CurvatureTerm(eigen_route=eigen, bilinear_route=bilinear)


def hat_norm_direct(t, algebra: HolonomyAlgebra) -> float:
    """Brute-force squared hat norm, operator convention for rank four."""
    flat, factor = _hat_flat(t, algebra)
    return float(factor * np.sum(flat**2))


@dataclass
class HatNorm:
    """Squared hat norm of a curvature tensor from structure constants.

    per_component is indexed by the operator eigenbasis (ascending
    eigenvalues), not by the original algebra basis.
    """

    total: float
    per_component: np.ndarray
    eigenvalues: np.ndarray


def _rotated_structure(op, algebra):
    op, algebra = _resolve(op, algebra)
    spec = symmetric_eigen(op.matrix)
    q = spec.vectors
    cp = np.einsum(
        "ai,bj,gk,abg->ijk", q, q, q, algebra.structure_constants, optimize=True
    )
    return spec.values, cp


def hat_norm_formula(op, algebra: HolonomyAlgebra | None = None) -> HatNorm:
    """Squared hat norm of the tensor behind a restricted operator.

    Uses only the operator spectrum and the algebra structure constants:
    each eigenbasis generator contributes the squared eigenvalue differences
    it bridges, weighted by the squared structure constants.  Agrees with
    hat_norm_direct on tensors supported on the algebra.
    """
    lam, cp = _rotated_structure(op, algebra)
    diffs = (lam[:, None] - lam[None, :]) ** 2
    per = np.einsum("ab,gab->g", diffs, cp**2)
    return HatNorm(total=float(per.sum()), per_component=per, eigenvalues=lam)


def curvature_term_self(op, algebra: HolonomyAlgebra | None = None) -> float:
    """Curvature term of an operator paired with its own hat components,
    evaluated purely from the spectrum and structure constants."""
    lam, cp = _rotated_structure(op, algebra)
    diffs = (lam[:, None] - lam[None, :]) ** 2
    return float(np.einsum("g,ab,gab->", lam, diffs, cp**2))


def invariance_defect(t, algebra: HolonomyAlgebra) -> float:
    """Largest component-array norm among the hat components; zero iff the
    tensor is invariant under the algebra."""
    flat, _ = _hat_flat(t, algebra)
    return float(np.sqrt(np.sum(flat**2, axis=1)).max(initial=0.0))


# ---------------------------------------------------------------------------
# weighted spectral conditions


@dataclass(frozen=True)
class WeightedCriterion:
    """Condition: sum of the k smallest eigenvalues plus weight times the
    next one is nonnegative."""

    k: int
    weight: float
    label: str = ""

    def __post_init__(self):
        if self.k < 1:
            raise GeometryError("criterion needs k >= 1")
        if self.weight < 0:
            raise GeometryError("criterion weight must be nonnegative")


@dataclass
class CriterionResult:
    criterion: WeightedCriterion
    value: float
    satisfied: bool


def weighted_criterion(
    eigenvalues: np.ndarray, crit: WeightedCriterion, tol: float = 0.0
) -> CriterionResult:
    """Evaluate a weighted partial eigenvalue sum on an ascending spectrum."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    needed = crit.k + (1 if crit.weight else 0)
    if lam.shape[0] < needed:
        raise GeometryError(
            f"criterion needs at least {needed} eigenvalues, got {lam.shape[0]}"
        )
    value = float(lam[: crit.k].sum())
    if crit.weight:
        value += crit.weight * float(lam[crit.k])
    return CriterionResult(criterion=crit, value=value, satisfied=value >= -tol)


def k_nonnegative(eigenvalues: np.ndarray, k: int) -> bool:
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    if k < 1 or k > lam.shape[0]:
        raise GeometryError("k out of range for this spectrum")
    return bool(lam[:k].sum() >= 0.0)


def weyl_preset(n: int) -> WeightedCriterion:
    """Threshold for the trace-free part on generic spaces of dimension n."""
    if n < 4:
        raise GeometryError("generic preset needs dimension >= 4")
    return WeightedCriterion(
        k=(n - 1) // 2, weight=(1 + (-1) ** n) / 4, label=f"weyl({n})"
    )


def kaehler_preset(m: int) -> WeightedCriterion:
    """Threshold for the trace-free part on Kaehler spaces, m complex planes."""
    if m < 2:
        raise GeometryError("kaehler preset needs m >= 2")
    return WeightedCriterion(
        k=(m + 1) // 2, weight=(1 + (-1) ** m) / 4, label=f"kaehler({m})"
    )


def qk_preset(m: int) -> WeightedCriterion:
    """Threshold on quaternion-Kaehler spaces, m quaternionic planes."""
    if m < 2:
        raise GeometryError("qk preset needs m >= 2")
    return WeightedCriterion(
        k=(m + 1) // 2, weight=(5 + 3 * (-1) ** m) / 12, label=f"qk({m})"
    )


def preset_for(algebra: HolonomyAlgebra) -> WeightedCriterion:
    kind = algebra.space.kind
    if kind == "generic":
        return weyl_preset(algebra.space.n)
    if kind == "kaehler":
        return kaehler_preset(algebra.space.m)
    return qk_preset(algebra.space.m)


# ---------------------------------------------------------------------------
# quaternion-Kaehler hat ratio


@dataclass
class HatRatio:
    """Squared hat norm against the squared norm of the trace-free part."""

    hat_norm_sq: float
    trace_free_norm_sq: float
    ratio: float | None
    pure_multiple: bool


def hat_ratio_qk(
    rm: CurvatureTensor,
    algebra: HolonomyAlgebra | None = None,
    rtol: float = 1e-10,
) -> HatRatio:
    """Ratio |hat|^2 / |trace-free part|^2 for a quaternionic tensor.

    Operator-convention norms on both sides.  When the trace-free part
    degenerates the tensor is a pure model multiple and the ratio is
    undefined; a nonzero hat norm in that situation is impossible for
    tensors supported on the algebra and raises.
    """
    if algebra is None:
        algebra = sp_sp1_algebra(rm.space)
    hat_sq = hat_norm_direct(rm, algebra)
    dec = qk_decompose(rm, algebra)
    rest_sq = dec.parts["hyperkaehler_part"].norm_sq() / 4.0
    scale = max(1.0, rm.norm_sq() / 4.0)
    if rest_sq <= rtol * scale:
        if hat_sq > 1e-8 * scale:
            raise GeometryError(
                "degenerate trace-free part with nonvanishing hat components"
            )
        return HatRatio(hat_sq, rest_sq, None, True)
    return HatRatio(hat_sq, rest_sq, hat_sq / rest_sq, False)


# ---------------------------------------------------------------------------
# spectral repair and search


def _shift_model(space) -> CurvatureTensor:
    if space.kind == "generic":
        return sphere(space.n)
    if space.kind == "kaehler":
        return const_hol(space.m)
    return hp(space.m)


def two_nonnegative_shift(
    rm: CurvatureTensor, algebra: HolonomyAlgebra
) -> tuple[CurvatureTensor, float]:
    """Add the smallest model multiple making the restricted operator
    2-nonnegative.

    The model is picked by the space kind, so it is supported on the
    holonomy algebra and the shifted tensor stays in the sampled class.
    The two-smallest-eigenvalue sum is superadditive, which makes the
    straight-line shift sufficient.
    """
    if algebra.dim < 2:
        raise GeometryError("2-nonnegativity needs an algebra of dimension >= 2")
    model = _shift_model(rm.space)
    op = project(to_operator(rm), algebra)
    mop = project(to_operator(model), algebra)
    s = float(np.sort(op.spectrum().values)[:2].sum())
    gain = float(np.sort(mop.spectrum().values)[:2].sum())
    if gain <= 0:
        raise GeometryError("shift model is not strictly 2-positive on the algebra")
    t = max(0.0, -s / gain) * (1.0 + 1e-12)
    return rm + t * model, t


def negative_term_search(
    algebra: HolonomyAlgebra,
    trials: int = 100,
    seed: int = 0,
    shift: bool = False,
) -> dict | None:
    """Look for a sampled tensor whose self curvature term is negative.

    Returns the first witness as a dict with the trial index, term value and
    comparison scale, or None.  With shift=True every sample is first made
    2-nonnegative; the positivity theory says the search must then fail.
    """
    from .decomp import random_algebra_curvature

    for trial in range(trials):
        rng = np.random.default_rng(seed ^ trial)
        rm = random_algebra_curvature(algebra, rng=rng)
        if shift:
            rm, _ = two_nonnegative_shift(rm, algebra)
        op = project(to_operator(rm), algebra)
        lam, cp = _rotated_structure(op, None)
        diffs = (lam[:, None] - lam[None, :]) ** 2
        value = float(np.einsum("g,ab,gab->", lam, diffs, cp**2))
        scale = float(np.einsum("g,ab,gab->", np.abs(lam), diffs, cp**2))
        if value < -1e-9 * (1.0 + scale):
            return {"trial": trial, "value": value, "scale": scale}
    return None
