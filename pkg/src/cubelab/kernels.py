"""The five samplers as single-step transitions and exact dense matrices.

Samplers
--------
* gibbs: damped single-flip resampling. With step h = exp(-2/eta), the
  chain flips coordinate i with probability h * sigma(-2 x_i g(x)_i) where
  g is the glauber score, and otherwise stays put. The matrix is literally
  I + h Q for the single-flip generator Q, which requires h <= 1/d so the
  stay probability is nonnegative.
* dula: every coordinate flips independently with probability
  sigma(-2/eta - x_i s(x)_i); the row is a product of two-point laws.
* dmala: a dula proposal followed by a Metropolis accept/reject against
  the target, with the proposal ratio evaluated coordinatewise in O(d).
* dups: two half-steps through an auxiliary state z. Stage one flips each
  coordinate with probability sigma(-2/eta) regardless of the target;
  stage two flips each coordinate of z with probability
  sigma(-2/eta - 2 z_i s(z)_i).
* dmaps: the dups stages followed by the stagewise Metropolis rule
  A_z(x'|x) = min{1, p(x')/p(x) * exp((x - x')^T s(z))}; rejected moves
  stay at x. The dense matrix sums over all 2^d auxiliary states exactly.

`prox_exact_matrix` is the score-free two-stage kernel whose second stage
draws from the target tilted toward z; it is reversible for the target and
serves as the small-step reference for dups.

Flip probabilities are computed directly through a numerically stable
sigmoid: eta = 0.05 already gives exp(-2/eta) ~ 4e-18, far below where
normalizing raw exponentials would underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import CapabilityError, ParameterError
from .models import TargetModel
from .scores import ScoreField, glauber_score, tabulate_scores
from .statespace import BitState, all_signs

# dense kernels hold 4^d doubles: d = 12 is ~134 MB and the practical top
MAX_MATRIX_DIM = 12

SAMPLER_IDS = ("gibbs", "dula", "dmala", "dups", "dmaps", "prox")


@dataclass(frozen=True)
class KernelMatrix:
    """Dense row-stochastic one-step law of a sampler at one step size."""

    probs: np.ndarray
    eta: float
    sampler: str
    score: str | None = None

    def __post_init__(self):
        p = self.probs
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("kernel matrix must be square")
        if p.min() < -1e-12:
            raise ValueError(f"kernel has a negative entry: {p.min()}")
        err = np.abs(p.sum(axis=1) - 1.0).max()
        if err > 1e-12:
            raise ValueError(f"kernel rows sum to 1 only within {err:.3e}")
        p.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.probs.shape[0].bit_length() - 1


@dataclass(frozen=True)
class GeneratorMatrix:
    """Dense rate matrix: nonnegative single-flip rates, zero row sums."""

    rates: np.ndarray

    def __post_init__(self):
        q = self.rates
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("generator matrix must be square")
        scale = max(1.0, float(np.abs(q).max()))
        if np.abs(q.sum(axis=1)).max() > 1e-12 * scale * q.shape[0]:
            raise ValueError("generator rows must sum to zero")
        q.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.rates.shape[0].bit_length() - 1


@dataclass(frozen=True)
class StepOutcome:
    """Result of one sampler step.

    `proposal` is the pre-adjustment move (equal to `next` for unadjusted
    samplers, whose `accepted` flag is always True); `auxiliary` carries the
    intermediate state of two-stage kernels.
    """

    next: BitState
    accepted: bool
    proposal: BitState
    auxiliary: BitState | None = None


def _check_eta(eta: float) -> None:
    if not (eta > 0.0) or not math.isfinite(eta):
        raise ParameterError(f"step size must be positive and finite, got {eta}")


def _check_matrix_dim(dim: int) -> None:
    if dim > MAX_MATRIX_DIM:
        raise CapabilityError(f"dense kernels capped at d <= {MAX_MATRIX_DIM}, got {dim}")


def _check_state(model: TargetModel, x: BitState) -> None:
    if x.dim != model.dim:
        raise ValueError(f"state dimension {x.dim} != model dimension {model.dim}")


def _pack_flips(flips: np.ndarray) -> int:
    word = 0
    for i in np.flatnonzero(flips):
        word |= 1 << int(i)
    return word


def _product_log_kernel(flip_probs: np.ndarray) -> np.ndarray:
    """Log of the row-wise product law for independent per-coordinate flips.

    flip_probs[k, i] is the probability that coordinate i flips when the
    chain sits at state k; entry (k, j) of the result sums log q or
    log(1 - q) according to which bits differ between k and j.
    """
    n, d = flip_probs.shape
    ks = np.arange(n)
    with np.errstate(divide="ignore"):
        logq = np.log(flip_probs)
        log1mq = np.log1p(-flip_probs)
    out = np.zeros((n, n))
    for i in range(d):
        differs = (((ks[:, None] ^ ks[None, :]) >> i) & 1).astype(bool)
        out += np.where(differs, logq[:, i][:, None], log1mq[:, i][:, None])
    return out


def _single_flip_matrix(rates: np.ndarray) -> np.ndarray:
    """Off-diagonal rates on hypercube edges, diagonal balancing rows to zero."""
    n, d = rates.shape
    ks = np.arange(n)
    q = np.zeros((n, n))
    for i in range(d):
        q[ks, ks ^ (1 << i)] = rates[:, i]
    q[ks, ks] = -q.sum(axis=1)
    return q


def _popcount_matrix(dim: int) -> np.ndarray:
    ks = np.arange(1 << dim, dtype=np.uint32)
    return np.bitwise_count(ks[:, None] ^ ks[None, :]).astype(np.int64)


# ---------------------------------------------------------------------------
# generators


def glauber_generator(model: TargetModel) -> GeneratorMatrix:
    """Single-flip rate matrix with rates sigma(-2 x_i g(x)_i)."""
    _check_matrix_dim(model.dim)
    tab = tabulate_scores(model, "glauber")
    signs = all_signs(model.dim).astype(np.float64)
    return GeneratorMatrix(_single_flip_matrix(expit(-2.0 * signs * tab)))


def dula_generator(score: ScoreField) -> GeneratorMatrix:
    """Single-flip rate matrix with rates exp(-x_i s(x)_i)."""
    _check_matrix_dim(score.model.dim)
    signs = all_signs(score.model.dim).astype(np.float64)
    return GeneratorMatrix(_single_flip_matrix(np.exp(-signs * score.table())))


def dups_generator(score: ScoreField) -> GeneratorMatrix:
    """Single-flip rate matrix with rates 1 + exp(-2 x_i s(x)_i)."""
    _check_matrix_dim(score.model.dim)
    signs = all_signs(score.model.dim).astype(np.float64)
    return GeneratorMatrix(_single_flip_matrix(1.0 + np.exp(-2.0 * signs * score.table())))


# ---------------------------------------------------------------------------
# damped single-flip resampling


def _gibbs_step_size(model: TargetModel, eta: float) -> float:
    _check_eta(eta)
    h = math.exp(-2.0 / eta)
    if h > 1.0 / model.dim:
        raise ParameterError(
            f"gibbs requires exp(-2/eta) <= 1/d: exp(-2/{eta}) = {h:.6g} > 1/{model.dim}")
    return h


def gibbs_step(model: TargetModel, x: BitState, eta: float,
               rng: np.random.Generator) -> StepOutcome:
    """One damped resampling step: flip at most one coordinate."""
    _check_state(model, x)
    h = _gibbs_step_size(model, eta)
    g = glauber_score(model, x)
    s = x.signs().astype(np.float64)
    probs = h * expit(-2.0 * s * g)
    u = rng.random()
    i = int(np.searchsorted(np.cumsum(probs), u, side="right"))
    nxt = x.flip(i) if i < model.dim else x
    return StepOutcome(nxt, True, nxt)


def gibbs_matrix(model: TargetModel, eta: float) -> KernelMatrix:
    """The damped single-flip kernel, built literally as I + h Q."""
    _check_matrix_dim(model.dim)
    h = _gibbs_step_size(model, eta)
    q = glauber_generator(model).rates
    return KernelMatrix(np.eye(q.shape[0]) + h * q, eta, "gibbs")


# ---------------------------------------------------------------------------
# independent-flip sampler and its Metropolis adjustment


def _dula_flip_probs(score: ScoreField, eta: float) -> np.ndarray:
    signs = all_signs(score.model.dim).astype(np.float64)
    return expit(-2.0 / eta - signs * score.table())


def dula_step(model: TargetModel, score: ScoreField, x: BitState, eta: float,
              rng: np.random.Generator) -> StepOutcome:
    """Flip every coordinate independently, tilted by the score."""
    _check_state(model, x)
    _check_eta(eta)
    s = x.signs().astype(np.float64)
    q = expit(-2.0 / eta - s * score(x))
    flips = rng.random(model.dim) < q
    nxt = BitState(x.bits ^ _pack_flips(flips), model.dim)
    return StepOutcome(nxt, True, nxt)


def dula_matrix(model: TargetModel, score: ScoreField, eta: float) -> KernelMatrix:
    _check_matrix_dim(model.dim)
    _check_eta(eta)
    probs = np.exp(_product_log_kernel(_dula_flip_probs(score, eta)))
    return KernelMatrix(probs, eta, "dula", score.kind)


def dmala_step(model: TargetModel, score: ScoreField, x: BitState, eta: float,
               rng: np.random.Generator) -> StepOutcome:
    """Independent-flip proposal, Metropolis-corrected toward the target.

    The acceptance ratio uses the factorized proposal, so one step costs
    O(d) score and log-weight evaluations, never a sum over states.
    """
    _check_state(model, x)
    _check_eta(eta)
    d = model.dim
    s = x.signs().astype(np.float64)
    q_fwd = expit(-2.0 / eta - s * score(x))
    flips = rng.random(d) < q_fwd
    prop = BitState(x.bits ^ _pack_flips(flips), d)
    if prop.bits == x.bits:
        return StepOutcome(x, True, prop)
    s_prop = prop.signs().astype(np.float64)
    q_rev = expit(-2.0 / eta - s_prop * score(prop))
    with np.errstate(divide="ignore"):
        log_fwd = np.where(flips, np.log(q_fwd), np.log1p(-q_fwd)).sum()
        log_rev = np.where(flips, np.log(q_rev), np.log1p(-q_rev)).sum()
    log_a = model.log_weight(prop) - model.log_weight(x) + log_rev - log_fwd
    accepted = log_a >= 0.0 or rng.random() < math.exp(log_a)
    return StepOutcome(prop if accepted else x, accepted, prop)


def dmala_matrix(model: TargetModel, score: ScoreField, eta: float) -> KernelMatrix:
    _check_matrix_dim(model.dim)
    _check_eta(eta)
    log_t = _product_log_kernel(_dula_flip_probs(score, eta))
    lw = model.log_weight_signs(all_signs(model.dim).astype(np.float64))
    log_a = (lw[None, :] - lw[:, None]) + (log_t.T - log_t)
    probs = np.exp(log_t) * np.exp(np.minimum(log_a, 0.0))
    n = probs.shape[0]
    probs[np.arange(n), np.arange(n)] += 1.0 - probs.sum(axis=1)
    return KernelMatrix(probs, eta, "dmala", score.kind)


# ---------------------------------------------------------------------------
# two-stage proximal samplers


def _stage_one_flip_prob(eta: float) -> float:
    return float(expit(-2.0 / eta))


def _stage_two_flip_probs(score: ScoreField, eta: float) -> np.ndarray:
    signs = all_signs(score.model.dim).astype(np.float64)
    return expit(-2.0 / eta - 2.0 * signs * score.table())


def _stage_one_log_kernel(dim: int, eta: float) -> np.ndarray:
    a = _stage_one_flip_prob(eta)
    ham = _popcount_matrix(dim)
    return ham * math.log(a) + (dim - ham) * math.log1p(-a)


def dups_step(model: TargetModel, score: ScoreField, x: BitState, eta: float,
              rng: np.random.Generator) -> StepOutcome:
    """Both half-steps of the unadjusted proximal sampler."""
    _check_state(model, x)
    _check_eta(eta)
    d = model.dim
    a = _stage_one_flip_prob(eta)
    z = BitState(x.bits ^ _pack_flips(rng.random(d) < a), d)
    sz = z.signs().astype(np.float64)
    q2 = expit(-2.0 / eta - 2.0 * sz * score(z))
    nxt = BitState(z.bits ^ _pack_flips(rng.random(d) < q2), d)
    return StepOutcome(nxt, True, nxt, auxiliary=z)


def dups_matrix(model: TargetModel, score: ScoreField, eta: float) -> KernelMatrix:
    _check_matrix_dim(model.dim)
    _check_eta(eta)
    stage1 = np.exp(_stage_one_log_kernel(model.dim, eta))
    stage2 = np.exp(_product_log_kernel(_stage_two_flip_probs(score, eta)))
    return KernelMatrix(stage1 @ stage2, eta, "dups", score.kind)


def dmaps_step(model: TargetModel, score: ScoreField, x: BitState, eta: float,
               rng: np.random.Generator) -> StepOutcome:
    """The dups stages plus the stagewise Metropolis accept/reject."""
    _check_state(model, x)
    _check_eta(eta)
    d = model.dim
    a = _stage_one_flip_prob(eta)
    z = BitState(x.bits ^ _pack_flips(rng.random(d) < a), d)
    sz = z.signs().astype(np.float64)
    q2 = expit(-2.0 / eta - 2.0 * sz * score(z))
    prop = BitState(z.bits ^ _pack_flips(rng.random(d) < q2), d)
    if prop.bits == x.bits:
        return StepOutcome(x, True, prop, auxiliary=z)
    moved = x.signs().astype(np.float64) - prop.signs().astype(np.float64)
    log_a = model.log_weight(prop) - model.log_weight(x) + float(moved @ score(z))
    accepted = log_a >= 0.0 or rng.random() < math.exp(log_a)
    return StepOutcome(prop if accepted else x, accepted, prop, auxiliary=z)


def _dmaps_flux(model: TargetModel, score: ScoreField, eta: float) -> np.ndarray:
    """Accepted flux of the adjusted two-stage kernel, before the rejected
    mass is folded onto the diagonal.

    For each z the acceptance factorizes through phi_z(y) = log w(y) - y^T s(z):
    A_z(x'|x) = min{1, exp(phi_z(x') - phi_z(x))}. The z loop keeps the cost
    at O(8^d) time but only O(4^d) memory.
    """
    _check_matrix_dim(model.dim)
    _check_eta(eta)
    n = 1 << model.dim
    signs = all_signs(model.dim).astype(np.float64)
    lw = model.log_weight_signs(signs)
    tab = score.table()
    stage1 = np.exp(_stage_one_log_kernel(model.dim, eta))
    stage2 = np.exp(_product_log_kernel(_stage_two_flip_probs(score, eta)))
    flux = np.zeros((n, n))
    for z in range(n):
        phi = lw - signs @ tab[z]
        accept = np.exp(np.minimum(phi[None, :] - phi[:, None], 0.0))
        flux += (stage1[:, z][:, None] * stage2[z][None, :]) * accept
    return flux


def dmaps_matrix(model: TargetModel, score: ScoreField, eta: float) -> KernelMatrix:
    """Exact adjusted two-stage kernel, summed over all auxiliary states.

    Rejected mass lands on the diagonal.
    """
    probs = _dmaps_flux(model, score, eta)
    n = probs.shape[0]
    probs[np.arange(n), np.arange(n)] += 1.0 - probs.sum(axis=1)
    return KernelMatrix(probs, eta, "dmaps", score.kind)


def prox_exact_matrix(model: TargetModel, eta: float) -> KernelMatrix:
    """The exact two-stage kernel whose second stage is target-tilted.

    Stage two draws x' with probability proportional to
    w(x') exp(z^T x' / eta), normalized per auxiliary state over all 2^d
    states, which is what caps the dimension.
    """
    _check_matrix_dim(model.dim)
    _check_eta(eta)
    lw = model.log_weight_signs(all_signs(model.dim).astype(np.float64))
    ham = _popcount_matrix(model.dim)
    # z^T x' = d - 2 * hamming(z, x') up to a per-row constant
    log_v = lw[None, :] - 2.0 * ham / eta
    log_v -= log_v.max(axis=1, keepdims=True)
    v = np.exp(log_v)
    v /= v.sum(axis=1, keepdims=True)
    stage1 = np.exp(_stage_one_log_kernel(model.dim, eta))
    return KernelMatrix(stage1 @ v, eta, "prox")
