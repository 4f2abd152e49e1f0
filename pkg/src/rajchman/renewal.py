"""Renewal first-hit simulation on the discrete contraction group and the
exact limit law it converges to.

In the discrete case every group element factors as h^m * n with h the
lattice generator and n in the finite kernel, so a walk state is just the
integer lattice height plus a kernel index; steps become table lookups and
the whole simulation vectorizes across sample paths.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import linalg
from .errors import ContractError, ResourceLimitError
from .group import GroupElement, _find_close

_MAX_TOTAL_STEPS = 10 ** 9


@dataclass(frozen=True)
class WalkConfig:
    """Weighted generators of the walk plus the lattice base element h
    (psi(h) = beta)."""

    generators: tuple      # (weight, GroupElement) pairs
    gamma_base: GroupElement

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ContractError("need at least one generator")
        total = sum(Fraction(w) if isinstance(w, (int, Fraction)) else Fraction(0)
                    for w, _ in gens)
        if all(isinstance(w, (int, Fraction)) for w, _ in gens):
            if total != 1:
                raise ContractError("weights must sum to 1")
        if any(float(w) <= 0 for w, _ in gens):
            raise ContractError("weights must be positive")
        if any(g.t <= 0 for _, g in gens):
            raise ContractError("generators must have positive psi")
        object.__setattr__(self, "generators", gens)

    @property
    def beta(self):
        return self.gamma_base.t

    def psi_values(self):
        return [g.t for _, g in self.generators]

    def drift(self):
        """lambda = mean psi step."""
        return sum(mp.mpf(float(w)) * g.t for w, g in self.generators)

    def exponents(self):
        """l_i = psi(g_i) / beta, validated integers."""
        out = []
        for _, g in self.generators:
            l = g.t / self.beta
            li = int(mp.nint(l))
            if abs(l - li) > 1e-9 or li < 1:
                raise ContractError("generator psi values are not positive "
                                    "lattice multiples of beta")
            out.append(li)
        return out


@dataclass(frozen=True)
class FirstHitSample:
    """One stopped walk: gamma_{-t} Y_{tau_t} summarized by its overshoot and
    the kernel part of its rotation."""

    overshoot: float
    kernel_index: int


@dataclass(frozen=True)
class LimitDistribution:
    """Exact limit law of the first-hit element over (kernel, overshoot
    level) pairs; masses are beta/(lambda |N|) times the tail weight."""

    support: tuple         # (kernel index, level j) pairs
    masses: tuple          # Fractions summing to exactly 1
    beta: object

    def mass(self, kernel_index, level):
        for (v, j), m in zip(self.support, self.masses):
            if v == kernel_index and j == level:
                return m
        return Fraction(0)


def _walk_tables(cfg, kernel_elements, tol=1e-9):
    """Integer step tables: kernel multiplication, conjugation by the lattice
    rotation, and each generator's kernel component."""
    h_u = linalg.to_numpy(cfg.gamma_base.U)
    d = cfg.gamma_base.U.rows
    h_u = h_u.reshape(d, d)
    els = [np.asarray(e if not isinstance(e, mp.matrix) else linalg.to_numpy(e)).reshape(d, d)
           for e in kernel_elements]
    size = len(els)
    mult = np.empty((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(size):
            hit = _find_close(els, els[i] @ els[j], tol)
            if hit is None:
                raise ContractError("kernel list is not closed under products")
            mult[i, j] = hit
    conj = np.empty(size, dtype=np.int64)
    for i in range(size):
        hit = _find_close(els, h_u.T @ els[i] @ h_u, tol)
        if hit is None:
            raise ContractError("kernel list is not conjugation-stable")
        conj[i] = hit
    exps = cfg.exponents()
    gen_kernel = []
    for (w, g), li in zip(cfg.generators, exps):
        u = linalg.to_numpy(g.U).reshape(d, d)
        v = np.linalg.matrix_power(h_u.T, li) @ u
        hit = _find_close(els, v, tol)
        if hit is None:
            raise ContractError("generator does not factor over the kernel")
        gen_kernel.append(hit)
    conj_pows = {}
    for li in set(exps):
        perm = np.arange(size, dtype=np.int64)
        for _ in range(li):
            perm = conj[perm]
        conj_pows[li] = perm
    return mult, conj_pows, np.array(gen_kernel, dtype=np.int64), np.array(exps, dtype=np.int64)


def simulate_first_hits(cfg, t, n_samples, seed, kernel_elements=None):
    """n_samples independent stopped walks at threshold t (a lattice point).

    Returns FirstHitSample summaries; with kernel_elements omitted the
    rotation kernel is taken to be trivial (all generators must then share
    rotation h^l)."""
    t = mp.mpf(t)
    if not t > 0:
        raise ContractError("threshold must be positive")
    target = t / cfg.beta
    target_int = int(mp.nint(target))
    if abs(target - target_int) > 1e-9:
        raise ContractError("threshold must lie on the psi lattice in the "
                            "discrete case")
    if kernel_elements is None:
        d = cfg.gamma_base.U.rows
        kernel_elements = (np.eye(d),)
    mult, conj_pows, gen_kernel, exps = _walk_tables(cfg, kernel_elements)
    weights = np.array([float(w) for w, _ in cfg.generators])
    weights = weights / weights.sum()
    rng = np.random.default_rng([int(seed), 0x5EED])

    n = int(n_samples)
    m = np.zeros(n, dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    total_steps = 0
    max_exp = int(exps.max())
    while active.any():
        idx = np.nonzero(active)[0]
        total_steps += len(idx)
        if total_steps > _MAX_TOTAL_STEPS:
            raise ResourceLimitError("walk exceeded the global step cap; "
                                     "check the generator psi values")
        draws = rng.choice(len(weights), size=len(idx), p=weights)
        for gi in range(len(weights)):
            sel = idx[draws == gi]
            if not len(sel):
                continue
            v[sel] = mult[conj_pows[int(exps[gi])][v[sel]], gen_kernel[gi]]
            m[sel] += exps[gi]
        active[idx] = m[idx] < target_int
    overshoot = (m - target_int).astype(float) * float(cfg.beta)
    assert overshoot.min() >= 0 and overshoot.max() < max_exp * float(cfg.beta)
    return [FirstHitSample(float(o), int(k)) for o, k in zip(overshoot, v)]


def theoretical_nu(cfg, kernel_size=1):
    """Exact limit masses: mass(kernel n, level j) = (beta/lambda) *
    P{psi X > j beta} / |N|, rational when the weights are rational."""
    exps = cfg.exponents()
    weights = [Fraction(w) for w, _ in cfg.generators]
    lam_over_beta = sum(w * l for w, l in zip(weights, exps))
    support, masses = [], []
    for j in range(max(exps)):
        tail = sum(w for w, l in zip(weights, exps) if l > j)
        if tail == 0:
            continue
        for v in range(kernel_size):
            support.append((v, j))
            masses.append(tail / (lam_over_beta * kernel_size))
    total = sum(masses)
    if total != 1:
        raise ContractError("limit masses failed to sum to 1 (got %s)" % total)
    return LimitDistribution(tuple(support), tuple(masses), cfg.beta)


@dataclass(frozen=True)
class PiecewiseDensity:
    """Piecewise-constant density on [0, max psi); pieces are
    (lower, upper, value) with mpf endpoints."""

    pieces: tuple

    def pdf(self, t):
        t = mp.mpf(t)
        for lo, hi, val in self.pieces:
            if lo <= t < hi:
                return val
        return mp.mpf(0)

    def integral(self):
        return mp.fsum((hi - lo) * val for lo, hi, val in self.pieces)


def psi_marginal_density(cfg):
    """Limit density of the overshoot's psi value: the upper-tail weight over
    lambda on each interval between consecutive sorted psi steps."""
    pairs = sorted(((g.t, float(w)) for w, g in cfg.generators), key=lambda x: x[0])
    lam = cfg.drift()
    pieces = []
    prev = mp.mpf(0)
    for b, _ in pairs:
        if b > prev:
            tail = mp.fsum(mp.mpf(w) for bb, w in pairs if bb > prev)
            pieces.append((prev, b, tail / lam))
            prev = b
    return PiecewiseDensity(tuple(pieces))


def tv_distance(samples, theory):
    """Half L1 distance between the empirical (kernel, level) histogram and
    the exact limit masses; samples outside the support count in full."""
    if not samples:
        raise ContractError("no samples")
    beta = float(theory.beta)
    counts = {}
    for s in samples:
        level = int(round(s.overshoot / beta))
        key = (s.kernel_index, level)
        counts[key] = counts.get(key, 0) + 1
    n = len(samples)
    keys = set(counts) | set(theory.support)
    acc = Fraction(0)
    for key in keys:
        emp = Fraction(counts.get(key, 0), n)
        acc += abs(emp - theory.mass(*key))
    return float(acc) / 2
