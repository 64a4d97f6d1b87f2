"""Dual-side machinery: the diagonal for the dual algebra, the exchange
identities between the multiplicative unitaries, and the quasi-central
approximate identity with its two certified bounds.

Three-leg identities are verified as vector residuals over random draws; the
dense three-leg operators are never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagonals import DiagonalCandidate, NetVector
from .funalg import Functional, convolve, tensor_vector_state
from .qgcore import FiniteQuantumGroup, derived_unitaries, dual, tensor_ortho_basis
from .tensorlin import (
    apply_leg,
    dagger,
    flip_matrix,
    inner,
    operator_norm,
    projection_residual,
    random_unit_vector,
)

__all__ = [
    "DualContext",
    "dual_context",
    "flip_relation_residuals",
    "dual_net_residuals",
    "build_dual_diagonal",
    "pentagonal_consequence_residuals",
    "quasicentral_exchange_residual",
    "identity_shift_exchange_residual",
    "QuasicentralIdentity",
    "build_approximate_identity",
    "slice_convention_residual",
    "IdentityBoundCertificate",
    "certify_identity_bound",
    "QuasicentralBoundCertificate",
    "certify_quasicentral_bound",
    "commutant_opposite_consistency",
]


@dataclass(frozen=True)
class DualContext:
    """A quantum group, its dual, and every unitary the dual-side checks need."""

    q: FiniteQuantumGroup
    qhat: FiniteQuantumGroup
    w: np.ndarray
    w_comm: np.ndarray        # commutant unitary W'
    w_op: np.ndarray          # opposite unitary W^op
    w_comm_op: np.ndarray     # opposite of the commutant W'^op
    w_dual: np.ndarray        # What
    w_dual_comm: np.ndarray   # commutant unitary of the dual
    w_op_dual: np.ndarray     # dual of the opposite

    @property
    def dim(self) -> int:
        return self.q.dim


def dual_context(q: FiniteQuantumGroup, tol: float = 1e-10) -> DualContext:
    """Assemble the unitary family and verify its closure relation
    (the commutant of the dual equals the dual of the opposite)."""
    if "dual_context" in q._cache:
        return q._cache["dual_context"]
    n = q.dim
    der = derived_unitaries(q)
    f = flip_matrix(n, n)
    k = q.J.compose(q.Jhat)  # the linear involution J Jhat
    kk = np.kron(k, k)
    ctx = DualContext(
        q=q,
        qhat=_cached_dual(q),
        w=q.W,
        w_comm=der.wprime,
        w_op=der.wop,
        w_comm_op=kk @ q.W @ kk,
        w_dual=der.what,
        w_dual_comm=q.Jhat.tensor(q.Jhat).conjugate(der.what),
        w_op_dual=f @ dagger(der.wop) @ f,
    )
    closure = operator_norm(ctx.w_dual_comm - ctx.w_op_dual)
    if closure > tol:
        raise ValueError(f"{q.name}: dual/opposite closure residual {closure:.3e} exceeds {tol:.1e}")
    q._cache["dual_context"] = ctx
    return ctx


def _cached_dual(q: FiniteQuantumGroup) -> FiniteQuantumGroup:
    if "dual" not in q._cache:
        q._cache["dual"] = dual(q)
    return q._cache["dual"]


def commutant_opposite_consistency(ctx: DualContext) -> float:
    """Residual between the two available expressions for the opposite of the
    commutant unitary: conjugation of ``W`` by ``J Jhat`` on both legs versus
    the adjoint of ``(1 (x) Jhat J) W' (1 (x) J Jhat)``."""
    n = ctx.dim
    k = ctx.q.J.compose(ctx.q.Jhat)
    k2 = ctx.q.Jhat.compose(ctx.q.J)
    one_k = np.kron(np.eye(n), k2)
    one_k_inv = np.kron(np.eye(n), k)
    alt = dagger(one_k @ ctx.w_comm @ one_k_inv)
    return operator_norm(ctx.w_comm_op - alt)


def flip_relation_residuals(
    ctx: DualContext, xi: np.ndarray, zeta: np.ndarray
) -> tuple[float, float]:
    """The two vector identities relating dual-side unitaries to flipped
    originals: ``What*(xi (x) zeta) = sigma(W(zeta (x) xi))`` and
    ``What'*(xi (x) zeta) = sigma(W_op(zeta (x) xi))``."""
    n = ctx.dim
    f = flip_matrix(n, n)
    v = np.kron(xi, zeta)
    w = np.kron(zeta, xi)
    r1 = float(np.linalg.norm(dagger(ctx.w_dual) @ v - f @ (ctx.w @ w)))
    r2 = float(np.linalg.norm(dagger(ctx.w_dual_comm) @ v - f @ (ctx.w_op @ w)))
    return r1, r2


def dual_net_residuals(
    ctx: DualContext, xi: np.ndarray, eta: np.ndarray, zeta: np.ndarray
) -> tuple[float, float, float, float]:
    """The four dual-diagonal hypothesis residuals: right/left invariance of the
    pair and the two opposite-unitary comparisons."""
    w, wop = ctx.w, ctx.w_op
    vzx = np.kron(zeta, xi)
    vez = np.kron(eta, zeta)
    vze = np.kron(zeta, eta)
    vxz = np.kron(xi, zeta)
    c1 = float(np.linalg.norm(w @ vzx - vzx))
    c2 = float(np.linalg.norm(w @ vez - vez))
    c3 = float(np.linalg.norm(w @ vze - wop @ vze))
    c4 = float(np.linalg.norm(w @ vxz - wop @ vxz))
    return c1, c2, c3, c4


def build_dual_diagonal(
    ctx: DualContext, xi: NetVector, eta: NetVector
) -> DiagonalCandidate:
    """Candidate diagonal for the dual algebra: the vector state of
    ``(W_op)^ * (xi (x) eta)``.

    The arguments play their dual roles: ``xi`` must be a right-invariance
    vector for the dual (a left-invariance vector for the original object) and
    ``eta`` the other way around; for exact function-algebra nets that means
    the point mass first and the uniform vector second.
    """
    v = dagger(ctx.w_op_dual) @ np.kron(xi.vector, eta.vector)
    return DiagonalCandidate(xi=xi, eta=eta, vector=v, bifunctional=tensor_vector_state(v))


def _random_three_leg(rng: np.random.Generator, n: int) -> np.ndarray:
    return random_unit_vector(rng, n ** 3)


def pentagonal_consequence_residuals(
    ctx: DualContext, rng: np.random.Generator, draws: int = 50
) -> tuple[float, float, float]:
    """Three unconditional exchange identities between ``W`` and ``W'`` (and the
    modular sandwich form of ``W*W*``), as max vector residuals over random
    three-leg draws."""
    n = ctx.dim
    dims = (n, n, n)
    w, wp = ctx.w, ctx.w_comm
    sandwich = ctx.q.Jhat.tensor(ctx.q.Jhat, ctx.q.J)
    r1 = r2 = r3 = 0.0
    for _ in range(draws):
        v = _random_three_leg(rng, n)
        lhs = apply_leg(w, (1, 2), apply_leg(dagger(wp), (2, 3), v, dims), dims)
        rhs = apply_leg(dagger(wp), (2, 3), apply_leg(w, (1, 3), apply_leg(w, (1, 2), v, dims), dims), dims)
        r1 = max(r1, float(np.linalg.norm(lhs - rhs)))

        lhs = apply_leg(w, (2, 3), apply_leg(dagger(wp), (1, 2), v, dims), dims)
        rhs = apply_leg(
            dagger(wp), (1, 2),
            apply_leg(dagger(wp), (1, 3), apply_leg(w, (2, 3), v, dims), dims),
            dims,
        )
        r2 = max(r2, float(np.linalg.norm(lhs - rhs)))

        lhs = apply_leg(dagger(w), (1, 3), apply_leg(dagger(w), (2, 3), v, dims), dims)
        inner_vec = apply_leg(w, (1, 3), apply_leg(w, (2, 3), sandwich.apply(v), dims), dims)
        rhs = sandwich.apply(inner_vec)
        r3 = max(r3, float(np.linalg.norm(lhs - rhs)))
    return r1, r2, r3


def quasicentral_exchange_residual(
    ctx: DualContext, rng: np.random.Generator, draws: int = 50
) -> tuple[float, float]:
    """The exchange identity behind the quasi-central bound, plus the
    commutation it relies on (``W'_13`` with ``W'^op*_23``); both as max
    vector residuals."""
    n = ctx.dim
    dims = (n, n, n)
    wp, wpo, w = ctx.w_comm, ctx.w_comm_op, ctx.w
    main = comm = 0.0
    for _ in range(draws):
        v = _random_three_leg(rng, n)
        lhs = apply_leg(
            dagger(wpo), (1, 3),
            apply_leg(wp, (1, 3), apply_leg(dagger(wpo), (2, 3), apply_leg(w, (2, 3), v, dims), dims), dims),
            dims,
        )
        t = apply_leg(w, (2, 3), v, dims)
        t = apply_leg(dagger(wp), (2, 3), t, dims)
        t = apply_leg(wp, (1, 2), t, dims)
        t = apply_leg(wp, (2, 3), t, dims)
        t = apply_leg(dagger(wpo), (2, 3), t, dims)
        rhs = apply_leg(dagger(wp), (1, 2), t, dims)
        main = max(main, float(np.linalg.norm(lhs - rhs)))

        ab = apply_leg(wp, (1, 3), apply_leg(dagger(wpo), (2, 3), v, dims), dims)
        ba = apply_leg(dagger(wpo), (2, 3), apply_leg(wp, (1, 3), v, dims), dims)
        comm = max(comm, float(np.linalg.norm(ab - ba)))
    return main, comm


def identity_shift_exchange_residual(
    ctx: DualContext, rng: np.random.Generator, draws: int = 50
) -> tuple[float, float]:
    """The exchange identity behind the approximate-identity bound, plus the
    first-leg commutation it relies on (``W_13`` with ``W'^op*_12``)."""
    n = ctx.dim
    dims = (n, n, n)
    w, wp, wpo = ctx.w, ctx.w_comm, ctx.w_comm_op
    main = comm = 0.0
    for _ in range(draws):
        v = _random_three_leg(rng, n)
        lhs = apply_leg(w, (2, 3), apply_leg(w, (1, 2), apply_leg(dagger(wpo), (1, 2), v, dims), dims), dims)
        t = apply_leg(dagger(wp), (1, 3), v, dims)
        t = apply_leg(w, (2, 3), t, dims)
        t = apply_leg(w, (1, 3), t, dims)
        t = apply_leg(dagger(wpo), (1, 2), t, dims)
        rhs = apply_leg(w, (1, 2), t, dims)
        main = max(main, float(np.linalg.norm(lhs - rhs)))

        # W_13 and W'^op*_12 share only the first leg, where their factors commute
        ab = apply_leg(w, (1, 3), apply_leg(dagger(wpo), (1, 2), v, dims), dims)
        ba = apply_leg(dagger(wpo), (1, 2), apply_leg(w, (1, 3), v, dims), dims)
        comm = max(comm, float(np.linalg.norm(ab - ba)))
    return main, comm


@dataclass(frozen=True)
class QuasicentralIdentity:
    """The approximate-identity functional built from a net pair: the second-leg
    slice of the vector state of ``W W'^op* (xi (x) eta)``."""

    xi: NetVector
    eta: NetVector
    vector: np.ndarray
    functional: Functional


def build_approximate_identity(
    ctx: DualContext, xi: NetVector, eta: NetVector
) -> QuasicentralIdentity:
    n = ctx.dim
    v = ctx.w @ dagger(ctx.w_comm_op) @ np.kron(xi.vector, eta.vector)
    rho = np.einsum("abad->bd", np.outer(v, v.conj()).reshape(n, n, n, n))
    return QuasicentralIdentity(xi=xi, eta=eta, vector=v, functional=Functional(rho))


def slice_convention_residual(
    ctx: DualContext,
    u: QuasicentralIdentity,
    zeta: np.ndarray,
    x: np.ndarray,
) -> float:
    """Consistency oracle for the slice convention: ``X(u * omega_zeta)``
    computed through pairing matrices must match the three-leg inner product
    ``<X_3 W_23 W_12 W'^op*_12 (xi (x) eta (x) zeta), same>``.

    A wrong reading of the second-leg slice fails this loudly.
    """
    n = ctx.dim
    dims = (n, n, n)
    conv = convolve(ctx.q, u.functional, Functional(np.outer(zeta, zeta.conj())))
    lhs = conv.value(x)
    t = np.kron(np.kron(u.xi.vector, u.eta.vector), zeta)
    t = apply_leg(dagger(ctx.w_comm_op), (1, 2), t, dims)
    t = apply_leg(ctx.w, (1, 2), t, dims)
    t = apply_leg(ctx.w, (2, 3), t, dims)
    rhs = inner(apply_leg(x, (3,), t, dims), t)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class IdentityBoundCertificate:
    """One certified instance of the approximate-identity bound with constant 2."""

    lhs: float
    term_pair: float
    term_triple: float
    bound: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound + self.slack


def certify_identity_bound(
    ctx: DualContext,
    u: QuasicentralIdentity,
    zeta: np.ndarray,
    x: np.ndarray,
    slack: float = 1e-9,
    membership_tol: float = 1e-8,
) -> IdentityBoundCertificate:
    """Certify ``|X(u * omega_zeta) - X(omega_zeta)| <= 2 ||X|| (t1 + t2)`` where
    ``t1 = ||W W'* (xi (x) zeta) - xi (x) zeta||`` and ``t2`` is the triple-leg
    left-invariance defect of ``eta`` against ``W'*_13``."""
    res = projection_residual(ctx.q.ortho_basis, x)
    if res > membership_tol:
        raise ValueError(f"X is not in the algebra (residual {res:.3e})")
    n = ctx.dim
    dims = (n, n, n)
    wz = Functional(np.outer(zeta, zeta.conj()))
    lhs = abs(convolve(ctx.q, u.functional, wz).value(x) - wz.value(x))
    pair = np.kron(u.xi.vector, zeta)
    t1 = float(np.linalg.norm(ctx.w @ (dagger(ctx.w_comm) @ pair) - pair))
    triple = np.kron(np.kron(u.xi.vector, u.eta.vector), zeta)
    base = apply_leg(dagger(ctx.w_comm), (1, 3), triple, dims)
    t2 = float(np.linalg.norm(apply_leg(ctx.w, (2, 3), base, dims) - base))
    bound = 2.0 * operator_norm(x) * (t1 + t2)
    return IdentityBoundCertificate(lhs=lhs, term_pair=t1, term_triple=t2, bound=bound, slack=slack)


@dataclass(frozen=True)
class QuasicentralBoundCertificate:
    """One certified instance of the quasi-central pairing bound with constant 2."""

    lhs: float
    terms: tuple[float, float, float]
    bound: float
    slack: float
    consistency: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound + self.slack


def certify_quasicentral_bound(
    ctx: DualContext,
    u: QuasicentralIdentity,
    zeta: np.ndarray,
    lam: np.ndarray,
    slack: float = 1e-9,
    membership_tol: float = 1e-8,
) -> QuasicentralBoundCertificate:
    """Certify the quasi-central pairing residual
    ``|(omega_zeta (x) u)(W'* W'^op Lam W'^op* W' - Lam)|`` against
    ``2 ||Lam|| (r1 + r2 + r3)`` built from the three invariance defects
    entering the estimate.

    The pairing is evaluated both definitionally (pairing matrices) and through
    the three-leg contraction; their agreement is reported as ``consistency``.
    """
    res = projection_residual(tensor_ortho_basis(ctx.q), lam)
    if res > membership_tol:
        raise ValueError(f"Lam is not in the doubled algebra (residual {res:.3e})")
    n = ctx.dim
    dims = (n, n, n)
    wp, wpo, w = ctx.w_comm, ctx.w_comm_op, ctx.w

    conj = dagger(wp) @ wpo @ lam @ dagger(wpo) @ wp
    rho = np.kron(np.outer(zeta, zeta.conj()), u.functional.rho)
    lhs_def = np.trace(rho @ (conj - lam))

    triple = np.kron(zeta, np.kron(u.xi.vector, u.eta.vector))
    base = apply_leg(w, (2, 3), apply_leg(dagger(wpo), (2, 3), triple, dims), dims)
    moved = apply_leg(dagger(wpo), (1, 3), apply_leg(wp, (1, 3), base, dims), dims)
    lhs_vec = inner(apply_leg(lam, (1, 3), moved, dims), moved) - inner(
        apply_leg(lam, (1, 3), base, dims), base
    )
    consistency = abs(lhs_def - lhs_vec)

    t = apply_leg(w, (2, 3), triple, dims)
    r1 = float(np.linalg.norm(apply_leg(dagger(wp), (2, 3), t, dims) - triple))
    r2 = float(np.linalg.norm(apply_leg(wp, (1, 2), triple, dims) - triple))
    t = apply_leg(wp, (2, 3), triple, dims)
    r3 = float(np.linalg.norm(apply_leg(dagger(w), (2, 3), t, dims) - triple))
    bound = 2.0 * operator_norm(lam) * (r1 + r2 + r3)
    return QuasicentralBoundCertificate(
        lhs=abs(lhs_def),
        terms=(r1, r2, r3),
        bound=bound,
        slack=slack,
        consistency=consistency,
    )
