"""Analog and digital beamformer construction for the four transmit schemes.

All constructions read only the user channels H, never the eavesdropper
channels: the transmitter has no CSI of the overhearing links.
"""

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import (DegenerateChannelError, InfeasibleSelectionError,
                     MimosecError, SingularChannelError)

ZF_CONDITION_LIMIT = 1e10


@dataclass(frozen=True)
class SelectionResult:
    """Antenna indices driven by the RF chains (0-based, pairwise distinct).

    Chain order is scheme-defined: the per-user strongest-gain protocol
    returns entry k as the antenna assigned to user k, while greedy
    selection returns indices in ascending order (no user pairing).
    """

    indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        object.__setattr__(self, "indices", idx)
        if idx.ndim != 1 or idx.size == 0:
            raise InfeasibleSelectionError("selection must be a non-empty index vector")
        if len(np.unique(idx)) != idx.size:
            raise InfeasibleSelectionError("selected antenna indices must be distinct")

    def __len__(self) -> int:
        return self.indices.size


@dataclass(frozen=True)
class BeamformerSet:
    """Analog matrix F (M x L), digital matrix W (L x K), per-user powers.

    Every column of F and of W has unit norm (loss-less analog network,
    normalized digital beamformers) and the powers sum to at most the
    configured budget.
    """

    F: np.ndarray
    W: np.ndarray
    powers: np.ndarray


def select_antennas_protocol1(H: np.ndarray) -> SelectionResult:
    """Assign each user its strongest still-free antenna, in user order.

    Per user k the channel gains |H[m, k]|^2 are ranked in decreasing
    order; user 0 takes its top-ranked antenna, and each later user takes
    its best-ranked antenna among those not claimed by earlier users.
    Ties in gain are broken towards the smaller antenna index.

    Returns entry k of the selection as the antenna of user k.
    """
    H = np.asarray(H)
    M, K = H.shape
    if M < K:
        raise InfeasibleSelectionError(f"need M >= K antennas, got M={M}, K={K}")
    gains = np.abs(H) ** 2
    ranking = np.argsort(-gains, axis=0, kind="stable")  # (M, K), best first
    taken = np.zeros(M, dtype=bool)
    chosen = np.empty(K, dtype=int)
    for k in range(K):
        for antenna in ranking[:, k]:
            if not taken[antenna]:
                chosen[k] = antenna
                taken[antenna] = True
                break
    return SelectionResult(chosen)


def analog_selection_matrix(sel: SelectionResult, M: int) -> np.ndarray:
    """Switching-network analog matrix: column l is the basis vector of
    antenna ``sel.indices[l]``."""
    idx = sel.indices
    if np.any(idx < 0) or np.any(idx >= M):
        raise MimosecError(f"antenna index out of range [0, {M})")
    F = np.zeros((M, idx.size), dtype=complex)
    F[idx, np.arange(idx.size)] = 1.0
    return F


def digital_mrt_selected(H: np.ndarray, sel: SelectionResult) -> np.ndarray:
    """Single-tap matched filter per user over its assigned antenna.

    Column k of the returned K x K matrix has one unit-magnitude entry at
    row k whose phase conjugates H[sel.indices[k], k], so the cascade with
    the selection matrix delivers |H[sel.indices[k], k]| to user k.
    """
    H = np.asarray(H)
    K = H.shape[1]
    if len(sel) != K:
        raise MimosecError(f"selection size {len(sel)} != number of users {K}")
    coeff = H[sel.indices, np.arange(K)]
    if np.any(coeff == 0):
        raise DegenerateChannelError("zero channel coefficient on a selected antenna")
    W = np.zeros((K, K), dtype=complex)
    W[np.arange(K), np.arange(K)] = np.conj(coeff) / np.abs(coeff)
    return W


def mrt_effective(H_eff: np.ndarray) -> np.ndarray:
    """Maximum-ratio columns: conjugate of each effective channel, unit norm."""
    H_eff = np.asarray(H_eff)
    norms = np.linalg.norm(H_eff, axis=0)
    if np.any(norms == 0):
        raise DegenerateChannelError("zero effective channel column")
    return np.conj(H_eff) / norms


def analog_phase_match(H: np.ndarray) -> np.ndarray:
    """Phase-shifter analog matrix matched to the user channel phases.

    Entry (m, k) is conj(H[m, k]) / (sqrt(M) |H[m, k]|): constant modulus
    1/sqrt(M), column norms 1, and H[:, k]^T F[:, k] = ||H[:, k]||_1 / sqrt(M)
    real non-negative.
    """
    H = np.asarray(H)
    if np.any(H == 0):
        raise DegenerateChannelError("zero channel entry; phase undefined")
    M = H.shape[0]
    return np.conj(H) / (np.sqrt(M) * np.abs(H))


def quantize_phases(F: np.ndarray, bits: int) -> np.ndarray:
    """Round every entry's phase to the nearest point of the uniform
    2^bits grid {2*pi*n/2^bits}, keeping the modulus.

    Nearest is in wrapped angular distance, which on the unit circle is the
    least-squares choice.
    """
    if int(bits) != bits or bits <= 0:
        raise MimosecError(f"quantizer resolution must be a positive integer, got {bits}")
    F = np.asarray(F)
    step = 2.0 * np.pi / (1 << int(bits))
    q = np.round(np.angle(F) / step) * step
    return np.abs(F) * np.exp(1j * q)


def zf_effective(H_eff: np.ndarray) -> np.ndarray:
    """Zero-forcing columns over the effective channel, rescaled to unit norm.

    W0 = conj(H_eff) (H_eff^T conj(H_eff))^-1 satisfies H_eff^T W0 = I; the
    per-column rescale keeps the off-diagonal entries of H_eff^T W zero.
    Raises when the effective channel is ill-conditioned (condition number
    above ``ZF_CONDITION_LIMIT``), where the rescale would amplify noise
    past the interference tolerance.
    """
    H_eff = np.asarray(H_eff)
    L, K = H_eff.shape
    if L < K:
        raise MimosecError(f"zero forcing needs L >= K, got L={L}, K={K}")
    cond = np.linalg.cond(H_eff)
    if not np.isfinite(cond) or cond > ZF_CONDITION_LIMIT:
        raise SingularChannelError(f"effective channel condition number {cond:.3e} "
                                   f"exceeds {ZF_CONDITION_LIMIT:.0e}")
    C = np.conj(H_eff)
    A = H_eff.T @ C  # K x K Gram, full rank by the condition check
    W0 = np.linalg.solve(A.T, C.T).T
    return W0 / np.linalg.norm(W0, axis=0)


def power_uniform(K: int, total_power: float) -> np.ndarray:
    """Equal share total_power / K for each of the K users."""
    return np.full(K, total_power / K)


def stepwise_tas(H: np.ndarray, L: int, cfg: SystemConfig) -> SelectionResult:
    """Greedy antenna selection maximizing the weighted no-eavesdropper
    sum-rate under MRT digital precoding and uniform power.

    Starting from the empty set, each of the L steps adds the antenna whose
    inclusion maximizes sum_k q_k log2(1 + SINR_k) evaluated on the enlarged
    candidate set; ties go to the smallest antenna index.  Returns the
    selected indices in ascending order (MRT is order-invariant).
    """
    H = np.asarray(H)
    M, K = H.shape
    if not 1 <= L <= M:
        raise InfeasibleSelectionError(f"need 1 <= L <= M, got L={L}, M={M}")
    powers = power_uniform(K, cfg.total_power)
    q = cfg.weights
    betas = cfg.betas
    sigma2 = cfg.sigma2

    # Rank-1 Gram updates: adding antenna a to the set S changes the K x K
    # Gram H_S^H H_S by conj(H[a, :]) outer H[a, :].
    outer = np.conj(H)[:, :, None] * H[:, None, :]      # (M, K, K)
    gram = np.zeros((K, K), dtype=complex)
    available = np.ones(M, dtype=bool)
    selected = []
    diag = np.arange(K)
    for _ in range(L):
        cand = gram[None, :, :] + outer                 # (M, K, K)
        col_pow = cand[:, diag, diag].real              # (M, K): ||h_eff_k||^2
        safe_pow = np.maximum(col_pow, np.finfo(float).tiny)
        # interference on user k from stream i: P_i |gram[i, k]|^2 / ||h_eff_i||^2
        cross = (np.abs(cand) ** 2) / safe_pow[:, :, None]
        interference = np.einsum("aik,i->ak", cross, powers) - powers * col_pow
        interference = np.maximum(interference, 0.0)    # clip rounding residue
        sinr = powers * betas * col_pow / (sigma2 + betas * interference)
        utility = (q * np.log2(1.0 + sinr)).sum(axis=1)
        utility[~available] = -np.inf
        best = int(np.argmax(utility))                  # first max = smallest index
        selected.append(best)
        available[best] = False
        gram = gram + outer[best]
    return SelectionResult(np.sort(selected))
