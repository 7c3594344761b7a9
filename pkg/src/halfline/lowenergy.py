"""Zero-energy limit of the scattering matrix via the Jordan structure of J(0).

For real k != 0 the scattering matrix S(k) = -J(-k) J(k)^(-1) always
exists.  At k = 0 the Jost matrix may be singular (the exceptional case),
yet S(k) has a limit S(0), and that limit has a closed form assembled from
the Jordan decomposition of J(0):

1.  Decompose J(0) with a Jordan basis, zero-eigenvalue chains first.
    mu = geometric and nu = algebraic multiplicity of the eigenvalue 0,
    kappa = number of chains, Smat = basis columns, Sinv = Smat^(-1).
2.  Build permutations P1 (columns) and P2 (rows) that gather the nilpotent
    superdiagonal ones of the zero blocks into an identity block, so that
    P2 (Sinv J(0) Smat) P1 = diag(0_mu, I_(nu-mu), nonzero Jordan blocks).
3.  With R = f(0,a)^(-1) phi(0,a), the rescaled Jost matrix
    F(k) = f(0,a)' [f(-k*,a)']^(-1) J(k)  satisfies F(k) = J(0) - ik R + o(k),
    so the permuted similarity Z(k) = P2 Sinv F(k) Smat P1 has blocks
        Z = [[k A1 + o(k), k B1 + o(k)], [k C1 + o(k), D0 + O(k)]]
    split at row/column mu, where A1, B1, C1 are read off from
    -i P2 (Sinv R Smat) P1 and D0 = diag(I_(nu-mu), nonzero blocks).
    A1 and D0 are invertible: A1 is (-i times) the matrix of the bijection
    u -> R u from ker J(0) onto ker J(0)' in the chain bases.
4.  Then
        S(0) = Smat P2^(-1) [[I_mu, 0], [2 C1 A1^(-1), -I_(n-mu)]] P2 Sinv,
    an involution (S(0)^2 = I), and k J(k)^(-1) tends to the residue
        L_(-1) = Smat P1 [[A1^(-1), 0], [0, 0]] P2 Sinv.

Generic case mu = 0 gives S(0) = -I; the fully exceptional case mu = n
gives S(0) = I.

Two Jordan backends are provided.  The numeric backend clusters eigenvalues
at a relative radius and runs an SVD rank staircase; it reports failure
when the defective structure is ambiguous at the thresholds.  The exact
backend works over Gaussian rationals (entries must be exactly
representable); eigenvalue candidates are proposed numerically, snapped to
small-denominator rationals, and accepted only if the shifted matrix is
exactly singular.  Chain ordering is deterministic in both backends: zero
chains first, remaining eigenvalues by (Re, Im), and inside a cluster by
the pivot position of the chain eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import exactalg as xa
from .bc import BCPair
from .errors import JordanAmbiguityError, NumericalError, ValidationError
from .scattering import (
    COND_CAP,
    SMatrixEvaluation,
    jost_matrix,
    jost_matrix_zero,
    smatrix,
)
from .solver import (
    DEFAULT_CONFIG,
    Potential,
    SolverConfig,
    jost_solution,
    regular_solution,
)

__all__ = [
    "JordanData",
    "ExactJordan",
    "LowEnergyExpansion",
    "LowEnergyResult",
    "jordan_form",
    "build_permutations",
    "r_matrix",
    "z_blocks",
    "z_of_k",
    "schur_inverse",
    "s_zero",
    "zero_energy_pipeline",
    "exact_free_pipeline",
    "jost_inverse_asymptotics",
    "kernel_bijection",
    "kernel_characterization",
]

EPS_EIG = 1e-8
EPS_RANK = 1e-10
DEFAULT_PROBES = (1e-1, 1e-2, 1e-3)


# ---------------------------------------------------------------------------
# Jordan data containers.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactJordan:
    """Exact (Gaussian-rational) Jordan decomposition payload."""

    M: list
    Smat: list
    Sinv: list
    chains: Tuple[Tuple[xa.QC, int], ...]


@dataclass(frozen=True)
class JordanData:
    """Jordan decomposition of a matrix M with zero chains ordered first.

    Columns of Smat are the chain vectors in chain order (eigenvector
    first within each chain); rows of Sinv form the adjoint basis.
    ``chains`` lists (eigenvalue, length) per chain; mu/nu are the
    geometric/algebraic multiplicities of the eigenvalue zero and kappa
    the total number of chains.
    """

    M: np.ndarray
    Smat: np.ndarray
    Sinv: np.ndarray
    chains: Tuple[Tuple[complex, int], ...]
    mu: int
    nu: int
    kappa: int
    mode: str
    exact: Optional[ExactJordan] = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    def jordan_matrix(self) -> np.ndarray:
        """The block-diagonal Jordan form implied by ``chains``."""
        n = self.n
        J = np.zeros((n, n), dtype=complex)
        pos = 0
        for lam, length in self.chains:
            for i in range(length):
                J[pos + i, pos + i] = lam
                if i + 1 < length:
                    J[pos + i, pos + i + 1] = 1.0
            pos += length
        return J


@dataclass(frozen=True)
class LowEnergyExpansion:
    """Permutations, slope matrix R, extracted blocks, and S(0)."""

    P1: np.ndarray
    P2: np.ndarray
    R: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    C1: np.ndarray
    D0: np.ndarray
    S0: np.ndarray


@dataclass(frozen=True)
class LowEnergyResult:
    """Full output of the zero-energy pipeline for one configuration."""

    jordan: JordanData
    expansion: LowEnergyExpansion
    s0: SMatrixEvaluation
    involution_residual: float
    unitarity_residual: float
    continuity_probes: Tuple[Tuple[float, float], ...]
    exact_s0: Optional[list] = field(default=None, repr=False, compare=False)
    exact_blocks: Optional[dict] = field(default=None, repr=False, compare=False)


# ---------------------------------------------------------------------------
# Numeric Jordan backend.
# ---------------------------------------------------------------------------

def _null_basis(M: np.ndarray, rel_tol: float, floor: float = 0.0) -> np.ndarray:
    """Orthonormal kernel basis (columns) from singular values below a
    threshold relative to max(largest singular value, floor)."""
    _, s, Vh = np.linalg.svd(M)
    if s.size == 0:
        return np.zeros((M.shape[1], 0))
    tol = rel_tol * max(float(s[0]), floor, np.finfo(float).tiny)
    r = int(np.sum(s > tol))
    return Vh[r:].conj().T


def _cluster_eigenvalues(vals: np.ndarray, radius: float):
    """Transitive-closure clustering of eigenvalues at a given radius."""
    m = vals.size
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(vals[i] - vals[j]) <= radius:
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pi] = pj
    groups = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [np.array(idx, dtype=int) for idx in groups.values()]


def _numeric_jordan(M: np.ndarray, eps_eig: float, eps_rank: float) -> JordanData:
    # Thresholds are taken relative to max(||M||, 1): the inputs here are
    # O(1)-scaled Jost matrices, and a purely relative radius could never
    # classify an all-but-zero matrix (a tuned resonance) as exceptional.
    n = M.shape[0]
    scale = max(float(np.linalg.norm(M, 2)), 1.0)
    radius = eps_eig * scale
    vals = np.linalg.eigvals(M)
    clusters = _cluster_eigenvalues(vals, radius)
    centers = []
    for idx in clusters:
        c = complex(np.mean(vals[idx]))
        if abs(c) <= max(radius, np.finfo(float).tiny):
            c = 0.0 + 0.0j
        diam = max((abs(vals[i] - vals[j]) for i in idx for j in idx), default=0.0)
        centers.append((c, len(idx), diam))
    gaps = [
        abs(centers[i][0] - centers[j][0])
        for i in range(len(centers))
        for j in range(i + 1, len(centers))
    ]
    if any(g < 10 * radius for g in gaps):
        raise JordanAmbiguityError(
            "eigenvalue clusters are closer than 10x the clustering radius",
            gaps=sorted(gaps),
        )

    chains = []  # (eigenvalue, [vectors eigvec..top])
    for center, m_alg, diam in centers:
        if diam > 5 * radius:
            raise JordanAmbiguityError(
                f"cluster at {center:.6g} has diameter {diam:.3e} "
                f"above 5x the clustering radius", gaps=sorted(gaps),
            )
        N = M - center * np.eye(n)
        dims = [0]
        bases = [np.zeros((n, 0))]
        power = np.eye(n, dtype=complex)
        for j in range(1, n + 1):
            power = power @ N
            basis = _null_basis(power, eps_rank, floor=scale**j)
            dims.append(basis.shape[1])
            bases.append(basis)
            if dims[-1] == m_alg:
                break
            if dims[-1] == dims[-2]:
                raise JordanAmbiguityError(
                    f"rank staircase for eigenvalue {center:.6g} stalled at "
                    f"{dims[-1]} of {m_alg} directions", gaps=sorted(gaps),
                )
        p = len(dims) - 1
        if dims[p] != m_alg:
            raise JordanAmbiguityError(
                f"staircase for eigenvalue {center:.6g} reached {dims[p]} "
                f"directions, expected {m_alg}", gaps=sorted(gaps),
            )
        gens: List[Tuple[np.ndarray, int]] = []
        for j in range(p, 0, -1):
            want = dims[j] - dims[j - 1]
            carried = [
                np.linalg.matrix_power(N, L - j) @ w for w, L in gens if L > j
            ]
            need = want - len(carried)
            if need < 0:
                raise JordanAmbiguityError(
                    f"inconsistent staircase at level {j} for eigenvalue "
                    f"{center:.6g}", gaps=sorted(gaps),
                )
            if need == 0:
                continue
            obstruction = [bases[j - 1]] if bases[j - 1].shape[1] else []
            obstruction += [c.reshape(-1, 1) / np.linalg.norm(c) for c in carried]
            Q = (
                np.linalg.qr(np.hstack(obstruction))[0]
                if obstruction
                else np.zeros((n, 0))
            )
            accepted: List[np.ndarray] = []
            candidates = [bases[j][:, t] for t in range(bases[j].shape[1])]
            residuals = [
                (float(np.linalg.norm(cand - Q @ (Q.conj().T @ cand))), cand)
                for cand in candidates
            ]
            residuals.sort(key=lambda t: -t[0])
            for _, cand in residuals:
                r = cand - Q @ (Q.conj().T @ cand)
                for acc in accepted:
                    r = r - acc * (acc.conj() @ r)
                nr = float(np.linalg.norm(r))
                if nr > 1e-7:
                    accepted.append(r / nr)
                    if len(accepted) == need:
                        break
            if len(accepted) != need:
                raise JordanAmbiguityError(
                    f"could not extract {need} independent chain generators "
                    f"at level {j} for eigenvalue {center:.6g}",
                    gaps=sorted(gaps),
                )
            gens.extend((w, j) for w in accepted)
        for w, L in gens:
            vecs = [w]
            for _ in range(L - 1):
                vecs.append(N @ vecs[-1])
            vecs.reverse()  # eigenvector first
            eig = vecs[0]
            nrm = np.linalg.norm(eig)
            if nrm == 0:
                raise NumericalError("degenerate chain eigenvector")
            piv = int(np.argmax(np.abs(eig) > 1e-8 * np.max(np.abs(eig))))
            phase = eig[piv] / abs(eig[piv])
            vecs = [v / (nrm * phase) for v in vecs]
            chains.append((center, vecs, piv))

    chains.sort(key=_chain_sort_key)
    cols = [v for _, vecs, _ in chains for v in vecs]
    Smat = np.column_stack(cols)
    if np.linalg.cond(Smat) > COND_CAP:
        raise JordanAmbiguityError("Jordan basis is numerically singular")
    Sinv = np.linalg.inv(Smat)
    chain_info = tuple((complex(lam), len(vecs)) for lam, vecs, _ in chains)
    mu = sum(1 for lam, length in chain_info if lam == 0)
    nu = sum(length for lam, length in chain_info if lam == 0)
    return JordanData(
        M=np.array(M), Smat=Smat, Sinv=Sinv, chains=chain_info,
        mu=mu, nu=nu, kappa=len(chain_info), mode="numeric",
    )


def _chain_sort_key(chain):
    lam, vecs, piv = chain
    is_zero = 0 if lam == 0 else 1
    lam_key = (float(np.real(lam)), float(np.imag(lam)))
    return (is_zero, lam_key, piv, -len(vecs))


# ---------------------------------------------------------------------------
# Exact Jordan backend.
# ---------------------------------------------------------------------------

def _exact_rows(vectors: List[List[xa.QC]]) -> list:
    return [list(v) for v in vectors]


def _exact_independent(stack_rows: list, candidate: List[xa.QC]) -> bool:
    if not stack_rows:
        return any(candidate)
    base = xa.rank(stack_rows)
    return xa.rank(stack_rows + [list(candidate)]) > base


def _exact_jordan(Mq: list) -> Tuple[ExactJordan, Tuple, int, int, int]:
    n = len(Mq)
    Mc = xa.mat_to_complex(Mq)
    raw = np.linalg.eigvals(Mc)
    candidates: List[xa.QC] = []
    for v in raw:
        cand = xa.snap(complex(v))
        if all(cand != c for c in candidates):
            candidates.append(cand)

    verified = []
    total = 0
    for lam in candidates:
        N = xa.msub(Mq, xa.scalar_mul(lam, xa.identity(n)))
        if xa.rank(N) == n:
            continue
        dims = [0]
        powers = [xa.identity(n)]
        while True:
            powers.append(xa.matmul(powers[-1], N))
            d = n - xa.rank(powers[-1])
            if d == dims[-1]:
                break
            dims.append(d)
            if len(dims) > n + 1:
                break
        verified.append((lam, N, dims, powers))
        total += dims[-1]
    if total != n:
        raise NumericalError(
            "exact mode failed: eigenvalues are not Gaussian rationals "
            "within the snapping denominator (use numeric mode)"
        )

    chains = []
    for lam, N, dims, powers in verified:
        p = len(dims) - 1
        gens: List[Tuple[List[xa.QC], int]] = []
        for j in range(p, 0, -1):
            want = dims[j] - dims[j - 1]
            carried = []
            for w, L in gens:
                if L > j:
                    img = [[x] for x in w]
                    img = xa.matmul(powers[L - j], img)
                    carried.append([row[0] for row in img])
            need = want - len(carried)
            if need <= 0:
                continue
            lower = xa.nullspace(powers[j - 1]) if j > 1 else []
            obstruction = _exact_rows(lower + carried)
            picked = 0
            for cand in xa.nullspace(powers[j]):
                if picked == need:
                    break
                if _exact_independent(obstruction, cand):
                    obstruction.append(list(cand))
                    gens.append((cand, j))
                    picked += 1
            if picked != need:
                raise NumericalError(
                    "exact Jordan staircase failed to find enough generators"
                )
        for w, L in gens:
            vecs = [w]
            for _ in range(L - 1):
                img = xa.matmul(N, [[x] for x in vecs[-1]])
                vecs.append([row[0] for row in img])
            vecs.reverse()
            piv = next(i for i, x in enumerate(vecs[0]) if x)
            chains.append((lam, vecs, piv))

    chains.sort(key=lambda c: (
        0 if not c[0] else 1,
        (float(c[0].re), float(c[0].im)),
        c[2],
        -len(c[1]),
    ))
    cols = [v for _, vecs, _ in chains for v in vecs]
    Smat = [[cols[j][i] for j in range(n)] for i in range(n)]
    Sinv = xa.inverse(Smat)
    chain_info = tuple((lam, len(vecs)) for lam, vecs, _ in chains)
    mu = sum(1 for lam, length in chain_info if not lam)
    nu = sum(length for lam, length in chain_info if not lam)
    payload = ExactJordan(M=Mq, Smat=Smat, Sinv=Sinv, chains=chain_info)
    return payload, chain_info, mu, nu, len(chain_info)


def jordan_form(
    M,
    mode: str = "numeric",
    eps_eig: float = EPS_EIG,
    eps_rank: float = EPS_RANK,
) -> JordanData:
    """Jordan decomposition with zero chains first.

    ``mode`` selects the numeric backend (eigenvalue clustering at relative
    radius ``eps_eig`` plus SVD staircase at ``eps_rank``) or the exact
    Gaussian-rational backend (entries must be exactly representable).
    """
    if mode == "numeric":
        Mc = np.asarray(M, dtype=complex)
        if Mc.ndim != 2 or Mc.shape[0] != Mc.shape[1]:
            raise ValidationError("jordan_form needs a square matrix")
        return _numeric_jordan(Mc, eps_eig, eps_rank)
    if mode == "exact":
        if isinstance(M, np.ndarray):
            Mq = xa.mat([[xa.qc(complex(x)) for x in row] for row in M])
        else:
            Mq = xa.mat(M)
        payload, chain_info, mu, nu, kappa = _exact_jordan(Mq)
        return JordanData(
            M=xa.mat_to_complex(Mq),
            Smat=xa.mat_to_complex(payload.Smat),
            Sinv=xa.mat_to_complex(payload.Sinv),
            chains=tuple((complex(lam), length) for lam, length in chain_info),
            mu=mu, nu=nu, kappa=kappa, mode="exact", exact=payload,
        )
    raise ValidationError(f"unknown Jordan mode {mode!r}")


# ---------------------------------------------------------------------------
# Permutations.
# ---------------------------------------------------------------------------

def _perm_indices(lengths: Sequence[int]) -> Tuple[List[int], List[int]]:
    """1-based column targets q and row sources sigma for the zero block.

    q lists the basis positions of the chain eigenvectors, then of the
    generalized vectors; sigma lists the positions of the chain tails, then
    of the non-tail vectors.  Both follow the unique (chain, height) solution
    of the index equation for each slot.
    """
    mu = len(lengths)
    nu = sum(lengths)
    cum = [0]
    for L in lengths:
        cum.append(cum[-1] + L)
    q = [cum[tau - 1] + 1 for tau in range(1, mu + 1)]
    for tau in range(mu + 1, nu + 1):
        t = tau - mu
        hit = None
        for alpha in range(1, mu + 1):
            for j in range(2, lengths[alpha - 1] + 1):
                if cum[alpha - 1] - alpha + j == t:
                    hit = (alpha, j)
                    break
            if hit:
                break
        if hit is None:
            raise NumericalError("permutation index equation has no solution")
        q.append(t + hit[0])
    sigma = [cum[alpha] for alpha in range(1, mu + 1)]
    for alpha in range(mu + 1, nu + 1):
        t = alpha - mu
        hit = None
        for rho in range(1, mu + 1):
            for s in range(2, lengths[rho - 1] + 1):
                if cum[rho - 1] - rho + s == t:
                    hit = (rho, s)
                    break
            if hit:
                break
        if hit is None:
            raise NumericalError("permutation index equation has no solution")
        sigma.append(t + hit[0] - 1)
    return q, sigma


def build_permutations(jd: JordanData) -> Tuple[np.ndarray, np.ndarray]:
    """P1 (column permutation) and P2 (row permutation) gathering the
    nilpotent ones into an identity block; both act only on the first nu
    coordinates and restrict to diag(Pi, I) block form."""
    n = jd.n
    lengths = [length for lam, length in jd.chains if lam == 0]
    q, sigma = _perm_indices(lengths)
    nu = jd.nu
    P1 = np.zeros((n, n))
    P2 = np.zeros((n, n))
    for j, qj in enumerate(q):
        P1[qj - 1, j] = 1.0
    for i in range(nu, n):
        P1[i, i] = 1.0
    for i, si in enumerate(sigma):
        P2[i, si - 1] = 1.0
    for i in range(nu, n):
        P2[i, i] = 1.0
    return P1, P2


# ---------------------------------------------------------------------------
# Pipeline pieces.
# ---------------------------------------------------------------------------

def r_matrix(
    pot: Potential,
    bc: BCPair,
    a: Optional[float] = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """R = f(0, a)^(-1) phi(0, a), the slope of the rescaled Jost matrix.

    With the default a = x_max the outgoing factor is exactly the identity,
    so R = phi(0, x_max).
    """
    if a is None:
        a = cfg.resolve_a(pot)
    f0 = jost_solution(pot, 0.0, a, cfg)
    if np.linalg.cond(f0.value) > COND_CAP:
        raise NumericalError(f"f(0, {a:g}) is numerically singular; enlarge a")
    phi = regular_solution(pot, bc, 0.0, a, cfg)
    return np.linalg.solve(f0.value, phi.value)


def _nonzero_block(jd: JordanData) -> np.ndarray:
    """diag(I_(nu-mu), Jordan blocks of the nonzero eigenvalues)."""
    n, mu, nu = jd.n, jd.mu, jd.nu
    D0 = np.zeros((n - mu, n - mu), dtype=complex)
    m = nu - mu
    D0[:m, :m] = np.eye(m)
    pos = m
    for lam, length in jd.chains:
        if lam == 0:
            continue
        for i in range(length):
            D0[pos + i, pos + i] = lam
            if i + 1 < length:
                D0[pos + i, pos + i + 1] = 1.0
        pos += length
    return D0


def z_blocks(
    jd: JordanData, R: np.ndarray, P1: np.ndarray, P2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Linear-coefficient blocks A1, B1, C1 and constant block D0.

    The first three are minus i times the mu-split blocks of
    P2 (Sinv R Smat) P1; D0 is assembled from the chain structure.  A1 must
    be invertible (it represents the kernel bijection u -> R u); a singular
    A1 signals an inconsistent Jordan/R pairing upstream.
    """
    mu = jd.mu
    Mt = P2 @ jd.Sinv @ np.asarray(R, dtype=complex) @ jd.Smat @ P1
    A1 = -1j * Mt[:mu, :mu]
    B1 = -1j * Mt[:mu, mu:]
    C1 = -1j * Mt[mu:, :mu]
    D0 = _nonzero_block(jd)
    if mu and np.linalg.cond(A1) > COND_CAP:
        raise NumericalError(
            "kernel block A1 is numerically singular: Jordan data and R "
            "do not belong to the same configuration"
        )
    return A1, B1, C1, D0


def z_of_k(
    pot: Potential,
    bc: BCPair,
    k: complex,
    a: Optional[float],
    jd: JordanData,
    P1: np.ndarray,
    P2: np.ndarray,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Z(k) = P2 Sinv F(k) Smat P1 with F(k) the rescaled Jost matrix
    f(0,a)' [f(-k*,a)']^(-1) J(k)."""
    k = complex(k)
    if a is None:
        a = cfg.resolve_a(pot)
    J = jost_matrix(pot, bc, k, a, cfg).J
    f0 = jost_solution(pot, 0.0, a, cfg)
    fm = jost_solution(pot, -k.conjugate(), a, cfg)
    F = f0.value.conj().T @ np.linalg.solve(fm.value.conj().T, J)
    return P2 @ jd.Sinv @ F @ jd.Smat @ P1


def schur_inverse(A, B, C, D) -> np.ndarray:
    """Block inverse of [[A, B], [C, D]] through the Schur complement
    A - B D^(-1) C; requires both D and the complement to be invertible."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.asarray(B, dtype=complex).reshape(A.shape[0], -1)
    C = np.asarray(C, dtype=complex).reshape(-1, A.shape[1])
    D = np.atleast_2d(np.asarray(D, dtype=complex))
    p, q = A.shape[0], D.shape[0]
    if q and np.linalg.cond(D) > COND_CAP:
        raise NumericalError("block D is numerically singular")
    Dinv_C = np.linalg.solve(D, C) if q else np.zeros((0, p))
    schur = A - B @ Dinv_C
    if p and np.linalg.cond(schur) > COND_CAP:
        raise NumericalError("Schur complement is numerically singular")
    S_inv = np.linalg.inv(schur) if p else np.zeros((0, 0), dtype=complex)
    B_Dinv = np.linalg.solve(D.T, B.T).T if q else np.zeros((p, 0))
    out = np.zeros((p + q, p + q), dtype=complex)
    out[:p, :p] = S_inv
    out[:p, p:] = -S_inv @ B_Dinv
    out[p:, :p] = -Dinv_C @ S_inv
    out[p:, p:] = (np.linalg.inv(D) if q else D) + Dinv_C @ S_inv @ B_Dinv
    return out


def _snap_matrix(M: np.ndarray, name: str) -> list:
    """Float matrix to Gaussian rationals, absorbing roundoff below 1e-12.

    Entries must sit within 1e-12 of a denominator-<=10^6 rational in both
    components (so e.g. sin(pi) collapses to 0); anything else cannot be
    treated exactly.
    """
    out = []
    for row in M:
        exact_row = []
        for x in row:
            x = complex(x)
            q = xa.snap(x)
            if abs(complex(q) - x) > 1e-12 * max(1.0, abs(x)):
                raise ValidationError(
                    f"{name} entry {x} is not a small rational; use numeric mode"
                )
            exact_row.append(q)
        out.append(exact_row)
    return out


def _xc(exact_matrix: list, shape: Tuple[int, int]) -> np.ndarray:
    """Exact matrix to complex array, honoring zero-size shapes."""
    if shape[0] == 0 or shape[1] == 0:
        return np.zeros(shape, dtype=complex)
    return xa.mat_to_complex(exact_matrix)


def _assemble_s0(jd: JordanData, A1: np.ndarray, C1: np.ndarray) -> np.ndarray:
    n, mu = jd.n, jd.mu
    _, P2 = build_permutations(jd)
    mid = np.zeros((n, n), dtype=complex)
    mid[:mu, :mu] = np.eye(mu)
    mid[mu:, mu:] = -np.eye(n - mu)
    if mu:
        mid[mu:, :mu] = 2.0 * C1 @ np.linalg.inv(A1)
    return jd.Smat @ P2.T @ mid @ P2 @ jd.Sinv


def zero_energy_pipeline(
    pot: Potential,
    bc: BCPair,
    a: Optional[float] = None,
    mode: str = "numeric",
    cfg: SolverConfig = DEFAULT_CONFIG,
    probes: Sequence[float] = DEFAULT_PROBES,
    jordan_override: Optional[JordanData] = None,
) -> LowEnergyResult:
    """Run the full zero-energy construction and collect diagnostics.

    ``jordan_override`` substitutes a caller-provided Jordan decomposition
    of J(0) (used to exercise basis independence).  Exact mode requires the
    zero potential and exactly-representable boundary matrices.
    """
    if pot.n != bc.n:
        raise ValidationError("potential and boundary pair sizes differ")
    if a is None:
        a = cfg.resolve_a(pot)

    exact_s0 = None
    exact_blocks = None
    if mode == "exact":
        if pot.pieces:
            raise ValidationError("exact mode supports only the zero potential")
        Aq = _snap_matrix(bc.A, "A")
        Bq = _snap_matrix(bc.B, "B")
        a_exact = xa.qc(int(a)) if float(a).is_integer() else xa.snap(complex(a))
        exact = exact_free_pipeline(Aq, Bq, a=a_exact)
        jd = exact["jordan_data"]
        P1, P2 = build_permutations(jd)
        n, mu = bc.n, jd.mu
        R = xa.mat_to_complex(exact["R"])
        A1 = _xc(exact["A1"], (mu, mu))
        B1 = _xc(exact["B1"], (mu, n - mu))
        C1 = _xc(exact["C1"], (n - mu, mu))
        D0 = _xc(exact["D0"], (n - mu, n - mu))
        S0 = xa.mat_to_complex(exact["S0"])
        exact_s0 = exact["S0"]
        exact_blocks = exact
    else:
        J0 = jost_matrix_zero(pot, bc, cfg)
        jd = jordan_override if jordan_override is not None else jordan_form(J0, "numeric")
        P1, P2 = build_permutations(jd)
        R = r_matrix(pot, bc, a, cfg)
        A1, B1, C1, D0 = z_blocks(jd, R, P1, P2)
        S0 = _assemble_s0(jd, A1, C1)

    n = bc.n
    inv_resid = float(np.linalg.norm(S0 @ S0 - np.eye(n), 2))
    uni_resid = float(np.linalg.norm(S0.conj().T @ S0 - np.eye(n), 2))
    probe_list = []
    for kp in probes:
        Sk = smatrix(pot, bc, float(kp), a, cfg)
        probe_list.append((float(kp), float(np.linalg.norm(Sk.S - S0, 2))))
    expansion = LowEnergyExpansion(P1=P1, P2=P2, R=R, A1=A1, B1=B1, C1=C1, D0=D0, S0=S0)
    s0_eval = SMatrixEvaluation(k=0.0, S=S0, unitarity_residual=uni_resid)
    return LowEnergyResult(
        jordan=jd,
        expansion=expansion,
        s0=s0_eval,
        involution_residual=inv_resid,
        unitarity_residual=uni_resid,
        continuity_probes=tuple(probe_list),
        exact_s0=exact_s0,
        exact_blocks=exact_blocks,
    )


def s_zero(
    pot: Potential,
    bc: BCPair,
    a: Optional[float] = None,
    mode: str = "numeric",
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> SMatrixEvaluation:
    """The zero-energy scattering matrix S(0) (an involution)."""
    return zero_energy_pipeline(pot, bc, a=a, mode=mode, cfg=cfg).s0


# ---------------------------------------------------------------------------
# Exact free-potential pipeline.
# ---------------------------------------------------------------------------

def exact_free_pipeline(Aq: list, Bq: list, a=xa.QC(0)) -> dict:
    """Exact zero-energy pipeline for the zero potential.

    There J(k) = B - ikA exactly, J(0) = B, and the slope matrix is
    R = A + aB.  Everything downstream (Jordan data, permutations, blocks,
    S(0)) is carried out over Gaussian rationals; the returned dict also
    exposes closed forms for J(k) and Z(k) at exact rational k.
    """
    Aq = xa.mat(Aq)
    Bq = xa.mat(Bq)
    n = len(Aq)
    payload, chain_info, mu, nu, kappa = _exact_jordan(Bq)
    jd = JordanData(
        M=xa.mat_to_complex(Bq),
        Smat=xa.mat_to_complex(payload.Smat),
        Sinv=xa.mat_to_complex(payload.Sinv),
        chains=tuple((complex(lam), length) for lam, length in chain_info),
        mu=mu, nu=nu, kappa=kappa, mode="exact", exact=payload,
    )
    a = xa.qc(a)
    R = xa.madd(Aq, xa.scalar_mul(a, Bq))

    lengths = [length for lam, length in chain_info if not lam]
    q, sigma = _perm_indices(lengths)
    P1q = xa.zeros(n, n)
    P2q = xa.zeros(n, n)
    for j, qj in enumerate(q):
        P1q[qj - 1][j] = xa.QC(1)
    for i in range(nu, n):
        P1q[i][i] = xa.QC(1)
    for i, si in enumerate(sigma):
        P2q[i][si - 1] = xa.QC(1)
    for i in range(nu, n):
        P2q[i][i] = xa.QC(1)

    Mt = xa.matmul(xa.matmul(P2q, xa.matmul(payload.Sinv, xa.matmul(R, payload.Smat))), P1q)
    minus_i = xa.QC(0, -1)
    A1 = [[minus_i * Mt[i][j] for j in range(mu)] for i in range(mu)]
    B1 = [[minus_i * Mt[i][j] for j in range(mu, n)] for i in range(mu)]
    C1 = [[minus_i * Mt[i][j] for j in range(mu)] for i in range(mu, n)]

    D0 = xa.zeros(n - mu, n - mu)
    m = nu - mu
    for i in range(m):
        D0[i][i] = xa.QC(1)
    pos = m
    for lam, length in chain_info:
        if not lam:
            continue
        for i in range(length):
            D0[pos + i][pos + i] = lam
            if i + 1 < length:
                D0[pos + i][pos + i + 1] = xa.QC(1)
        pos += length

    mid = xa.zeros(n, n)
    for i in range(mu):
        mid[i][i] = xa.QC(1)
    for i in range(mu, n):
        mid[i][i] = xa.QC(-1)
    if 0 < mu < n:
        two_c1_a1inv = xa.scalar_mul(xa.QC(2), xa.matmul(C1, xa.inverse(A1)))
        for i in range(n - mu):
            for j in range(mu):
                mid[mu + i][j] = two_c1_a1inv[i][j]
    P2t = [[P2q[j][i] for j in range(n)] for i in range(n)]
    S0 = xa.matmul(
        xa.matmul(payload.Smat, P2t),
        xa.matmul(mid, xa.matmul(P2q, payload.Sinv)),
    )

    def jost_at(kq) -> list:
        kq = xa.qc(kq)
        return xa.msub(Bq, xa.scalar_mul(xa.QC(0, 1) * kq, Aq))

    def smatrix_at(kq) -> list:
        kq = xa.qc(kq)
        Jp = jost_at(kq)
        Jm = jost_at(-kq)
        return xa.scalar_mul(xa.QC(-1), xa.matmul(Jm, xa.inverse(Jp)))

    def z_at(kq) -> list:
        F = jost_at(kq)  # f is trivial for the zero potential
        return xa.matmul(
            xa.matmul(P2q, xa.matmul(payload.Sinv, xa.matmul(F, payload.Smat))), P1q
        )

    return {
        "jordan_data": jd,
        "R": R,
        "P1": P1q,
        "P2": P2q,
        "A1": A1,
        "B1": B1,
        "C1": C1,
        "D0": D0,
        "S0": S0,
        "jost_at": jost_at,
        "smatrix_at": smatrix_at,
        "z_at": z_at,
        "mu": mu,
        "nu": nu,
        "kappa": kappa,
    }


# ---------------------------------------------------------------------------
# Inverse asymptotics and kernel maps.
# ---------------------------------------------------------------------------

def jost_inverse_asymptotics(
    expansion: LowEnergyExpansion, jd: JordanData
) -> Tuple[np.ndarray, int]:
    """Leading term of J(k)^(-1) near k = 0.

    Exceptional case (mu >= 1): returns the 1/k residue
    Smat P1 diag(A1^(-1), 0) P2 Sinv with order 1, so k J(k)^(-1) tends to
    it.  Generic case: order 0 with leading J(0)^(-1).
    """
    n, mu = jd.n, jd.mu
    if mu == 0:
        return np.linalg.inv(jd.M), 0
    block = np.zeros((n, n), dtype=complex)
    block[:mu, :mu] = np.linalg.inv(expansion.A1)
    leading = jd.Smat @ expansion.P1 @ block @ expansion.P2 @ jd.Sinv
    return leading, 1


def kernel_bijection(
    pot: Potential,
    bc: BCPair,
    u,
    a: Optional[float] = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
    tol: float = 1e-8,
) -> np.ndarray:
    """Image xi = R u of a kernel vector of J(0); xi lies in ker J(0)'.

    The map is injective, so nonzero u gives nonzero xi, and the bounded
    zero-energy solutions match: phi(0, x) u = f(0, x) xi.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape[0] != bc.n:
        raise ValidationError("kernel vector has wrong length")
    J0 = jost_matrix_zero(pot, bc, cfg)
    nu = float(np.linalg.norm(u))
    if nu > 0 and np.linalg.norm(J0 @ u) > tol * max(1.0, np.linalg.norm(J0, 2)) * nu:
        raise ValidationError("u is not in the kernel of the zero-energy Jost matrix")
    R = r_matrix(pot, bc, a, cfg)
    return R @ u


def kernel_characterization(
    pot: Potential,
    bc: BCPair,
    u,
    cfg: SolverConfig = DEFAULT_CONFIG,
    tol: float = 1e-8,
) -> Tuple[bool, np.ndarray]:
    """Membership test for ker J(0) via the regular solution.

    u lies in the kernel exactly when the limit slope phi'(0, x_max) u
    vanishes, equivalently when phi(0, x) u stays bounded.  For compact
    support the limit is attained at x_max, so the returned slope vector is
    exact there.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape[0] != bc.n:
        raise ValidationError("vector has wrong length")
    phi = regular_solution(pot, bc, 0.0, pot.x_max, cfg)
    limit = phi.deriv @ u
    scale = max(np.linalg.norm(phi.deriv, 2) * max(np.linalg.norm(u), 1.0), 1.0)
    return bool(np.linalg.norm(limit) <= tol * scale), limit
