"""Dense complex linear algebra substrate: tensor legs, Schatten norms, slices,
flips and antilinear operators.

Conventions used throughout the package:

* Vectors on a tensor product of Hilbert spaces are flat 1-d complex arrays in
  row-major (big-endian) leg order: the basis vector ``e_a (x) e_b`` of
  ``C^m (x) C^n`` sits at index ``a * n + b``.
* Legs are numbered from 1, matching the subscript convention ``W_12`` used in
  operator formulas, so ``apply_leg(W, (1, 3), v, (n, n, n))`` applies ``W`` to
  legs 1 and 3 of a three-leg vector.
* The inner product ``<u, v>`` is linear in the first argument.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionCapError",
    "AntilinearOp",
    "max_tensor_entries",
    "kron",
    "dagger",
    "inner",
    "flip_matrix",
    "apply_leg",
    "sandwich_legs",
    "partial_trace",
    "trace_norm",
    "operator_norm",
    "unitarity_residual",
    "slice_first",
    "slice_second",
    "hs_inner",
    "span_basis",
    "projection_residual",
    "random_unit_vector",
    "normalize",
]

DEFAULT_MAX_TENSOR_ENTRIES = 12 ** 3


class DimensionCapError(ValueError):
    """Raised when a dense tensor object would exceed the configured size cap."""


def max_tensor_entries() -> int:
    """Largest allowed entry count for a dense multi-leg vector.

    Defaults to 12**3 and can be overridden with the QGLAB_MAX_DIM environment
    variable.
    """
    raw = os.environ.get("QGLAB_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_TENSOR_ENTRIES
    try:
        value = int(raw)
    except ValueError as exc:
        raise DimensionCapError(f"QGLAB_MAX_DIM must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise DimensionCapError(f"QGLAB_MAX_DIM must be positive, got {value}")
    return value


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of operators, ``(a (x) b)(v (x) w) = av (x) bw``."""
    out_rows = a.shape[0] * b.shape[0]
    cap = max_tensor_entries() ** 2
    if out_rows * a.shape[1] * b.shape[1] > cap:
        raise DimensionCapError(
            f"kron output {out_rows}x{a.shape[1] * b.shape[1]} exceeds the "
            f"dense cap ({cap} entries); raise QGLAB_MAX_DIM to override"
        )
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """``<u, v>``, linear in ``u``."""
    return complex(np.vdot(v, u))


def normalize(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / nrm


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(v)


def flip_matrix(dim_a: int, dim_b: int) -> np.ndarray:
    """Unitary implementing ``v (x) w -> w (x) v`` on ``C^a (x) C^b``."""
    d = dim_a * dim_b
    out = np.zeros((d, d))
    a = np.arange(dim_a).repeat(dim_b)
    b = np.tile(np.arange(dim_b), dim_a)
    out[b * dim_a + a, a * dim_b + b] = 1.0
    return out


def _split_legs(legs: tuple[int, ...], dims: tuple[int, ...]) -> tuple[list[int], list[int]]:
    nlegs = len(dims)
    if len(set(legs)) != len(legs):
        raise ValueError(f"repeated leg index in {legs}")
    for leg in legs:
        if not 1 <= leg <= nlegs:
            raise ValueError(f"leg {leg} out of range for {nlegs} legs")
    sel = [leg - 1 for leg in legs]
    rest = [i for i in range(nlegs) if i not in sel]
    return sel, rest


def apply_leg(
    op: np.ndarray,
    legs: tuple[int, ...],
    v: np.ndarray,
    dims: tuple[int, ...],
) -> np.ndarray:
    """Apply ``op`` to the selected legs of ``v``, identity on the others.

    ``v`` may be a flat vector of length ``prod(dims)`` or a matrix whose rows
    carry the leg structure (columns are treated as a batch).  The computation
    is a reshape-permute-contract; the full many-leg operator is never formed.
    """
    sel, rest = _split_legs(legs, dims)
    batched = v.ndim == 2
    shape = tuple(dims) + ((v.shape[1],) if batched else ())
    full = list(range(len(shape)))
    rest_axes = rest + ([len(dims)] if batched else [])
    sel_dim = int(np.prod([dims[i] for i in sel]))
    if op.shape != (sel_dim, sel_dim):
        raise ValueError(f"operator shape {op.shape} does not act on legs {legs} of dims {dims}")
    t = v.reshape(shape).transpose(sel + rest_axes)
    out = op @ t.reshape(sel_dim, -1)
    out = out.reshape([shape[i] for i in sel] + [shape[i] for i in rest_axes])
    inv = np.argsort(sel + rest_axes)
    out = out.transpose(inv)
    return out.reshape(v.shape[0], v.shape[1]) if batched else out.reshape(-1)


def sandwich_legs(
    op: np.ndarray,
    legs: tuple[int, ...],
    rho: np.ndarray,
    dims: tuple[int, ...],
) -> np.ndarray:
    """Conjugate a matrix on ``prod(dims)`` by ``op`` acting on the given legs:
    returns ``op_legs @ rho @ op_legs*``."""
    step = apply_leg(op, legs, rho, dims)
    return dagger(apply_leg(op, legs, dagger(step), dims))


def partial_trace(rho: np.ndarray, dims: tuple[int, ...], leg: int) -> np.ndarray:
    """Trace out one leg (1-based) of a matrix on ``prod(dims)``."""
    nlegs = len(dims)
    if not 1 <= leg <= nlegs:
        raise ValueError(f"leg {leg} out of range for {nlegs} legs")
    t = rho.reshape(tuple(dims) + tuple(dims))
    axis = leg - 1
    out = np.trace(t, axis1=axis, axis2=axis + nlegs)
    kept = int(np.prod([d for i, d in enumerate(dims) if i != axis]))
    return out.reshape(kept, kept)


def trace_norm(a: np.ndarray) -> float:
    """Schatten-1 norm (sum of singular values)."""
    return float(np.linalg.svd(a, compute_uv=False).sum())


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def unitarity_residual(a: np.ndarray) -> float:
    return operator_norm(dagger(a) @ a - np.eye(a.shape[0]))


def slice_first(x: np.ndarray, u: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """Slice away the first leg of an operator on ``H1 (x) H2``.

    Returns the matrix of ``(omega (x) id)(x)`` where ``omega(T) = <Tu, v>``
    (``v`` defaults to ``u``, the vector-state case):
    ``out[k, l] = <x (u (x) e_l), v (x) e_k>``.
    """
    if v is None:
        v = u
    d1 = u.shape[0]
    d2 = x.shape[0] // d1
    x4 = x.reshape(d1, d2, d1, d2)
    return np.einsum("a,abcd,c->bd", v.conj(), x4, u)


def slice_second(x: np.ndarray, u: np.ndarray, v: np.ndarray | None = None) -> np.ndarray:
    """Slice away the second leg: ``out[k, l] = <x (e_l (x) u), e_k (x) v>``."""
    if v is None:
        v = u
    d2 = u.shape[0]
    d1 = x.shape[0] // d2
    x4 = x.reshape(d1, d2, d1, d2)
    return np.einsum("b,abcd,d->ac", v.conj(), x4, u)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``Tr(b* a)``."""
    return complex(np.vdot(b, a))


def span_basis(mats: list[np.ndarray], tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of the span of the given matrices."""
    if not mats:
        raise ValueError("empty matrix list")
    stacked = np.stack([m.reshape(-1) for m in mats]).astype(complex)
    _, s, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int((s > tol * s[0]).sum()) if s.size else 0
    shape = mats[0].shape
    return [vh[i].reshape(shape) for i in range(rank)]


def projection_residual(ortho_basis: list[np.ndarray], x: np.ndarray) -> float:
    """Relative distance from ``x`` to the span of an orthonormal matrix family."""
    vec = x.reshape(-1).astype(complex)
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        return 0.0
    proj = np.zeros_like(vec)
    for b in ortho_basis:
        bvec = b.reshape(-1)
        proj += np.vdot(bvec, vec) * bvec
    return float(np.linalg.norm(vec - proj) / nrm)


@dataclass(frozen=True)
class AntilinearOp:
    """Antilinear operator ``v -> u @ conj(v)`` with unitary ``u``.

    Models modular conjugations.  Composing two antilinear operators yields a
    linear one; conjugating a linear operator by the same antilinear operator
    on both sides yields a linear operator.  Both case analyses are explicit
    here so that mixed products cannot silently drop a conjugation.
    """

    u: np.ndarray

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.u @ v.conj()

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        """The linear operator ``J a J`` (same antilinear ``J`` on both sides)."""
        return self.u @ a.conj() @ self.u.conj()

    def compose(self, other: "AntilinearOp") -> np.ndarray:
        """Matrix of the linear operator ``self o other``."""
        return self.u @ other.u.conj()

    def tensor(self, *others: "AntilinearOp") -> "AntilinearOp":
        u = self.u
        for op in others:
            u = np.kron(u, op.u)
        return AntilinearOp(u)

    def involution_residual(self) -> float:
        """``J^2 = 1`` holds iff ``u @ conj(u) = 1``."""
        return operator_norm(self.u @ self.u.conj() - np.eye(self.dim))

    def isometry_residual(self) -> float:
        return unitarity_residual(self.u)
