"""Fourier transform of self-similar measures: certified evaluation,
non-decay witness sequences, and Monte Carlo correlation diagnostics.

The certified evaluator unrolls the self-similarity relation
mu_hat(xi) = sum_i p_i e^{i<xi, a_i>} mu_hat(r_i U_i^{-1} xi) down to a
cut-set whose leaves are flat enough to replace the measure by a point mass
at its barycenter; the leaf error |eta| * radius is summed exactly through
the recursion.  Repeated frequencies are shared through a memo table, which
keeps lattice-type systems polynomial in log |xi| instead of exponential.
"""

from dataclasses import dataclass
from math import gcd

import mpmath as mp
import numpy as np

from . import linalg
from .algebra import DEFAULT_CTX, nearest_int_dist
from .errors import ContractError, PrecisionError, ResourceLimitError
from .ifs import chaos_game_sample, normalize_first_map


@dataclass(frozen=True)
class FourierValue:
    value: object          # mpc
    error_bound: object    # mpf, certified |value - mu_hat(xi)|

    def modulus_range(self):
        m = abs(self.value)
        return max(mp.mpf(0), m - self.error_bound), m + self.error_bound


class MuHatEvaluator:
    """Reusable evaluator for one (IFS, weights) pair.

    Holds the barycenter anchor, the certified attractor radius around it,
    and a frequency memo shared across evaluations.
    """

    def __init__(self, ifs, p, ctx=DEFAULT_CTX, max_nodes=10 ** 6):
        if not p.positive:
            raise ContractError("certified evaluation requires positive weights")
        self.ifs = ifs
        self.p = p
        self.ctx = ctx
        self.max_nodes = max_nodes
        with ctx.workprec():
            weights = p.as_mpf()
            d = ifs.dimension
            lin = mp.matrix(d, d)
            rhs = mp.matrix(d, 1)
            for w, m in zip(weights, ifs.maps):
                part = w * m.ratio * m.rotation
                for i in range(d):
                    rhs[i, 0] += w * m.translation[i, 0]
                    for j in range(d):
                        lin[i, j] += part[i, j]
            self.barycenter = mp.lu_solve(linalg.identity(d) - lin, rhs)
            rmax = max(m.ratio for m in ifs.maps)
            step = max(linalg.vec_norm(m(self.barycenter) - self.barycenter)
                       for m in ifs.maps)
            self.radius = step / (1 - rmax)
            self._weights = weights
            self._children = [(w, m.ratio, m.rotation.T,
                               m.translation) for w, m in zip(weights, ifs.maps)]
        self._memo = {}

    def required_bits(self, xi_norm):
        """Working precision needed to keep phases of magnitude
        |xi| * (radius + |barycenter|) accurate."""
        scale = float(xi_norm) * float(self.radius + linalg.vec_norm(self.barycenter) + 1)
        return int(max(0, mp.log(max(scale, 1), 2))) + 64

    def evaluate(self, xi, tol):
        """Certified mu_hat(xi): (value, error bound <= tol)."""
        tol = mp.mpf(tol)
        if not tol > 0:
            raise ContractError("tolerance must be positive")
        with self.ctx.workprec(16):
            if not isinstance(xi, mp.matrix):
                xi = linalg.mpvector(xi)
            norm = linalg.vec_norm(xi)
            if norm == 0:
                return FourierValue(mp.mpc(1), mp.mpf(0))
            need = self.required_bits(norm) + int(max(0, -mp.log(tol, 2)))
            if self.ctx.mantissa_bits < need - 64:
                raise PrecisionError(
                    "frequency magnitude needs about %d mantissa bits" % need,
                    required_bits=need)
            value, err = self._eval_rec(xi, tol)
            return FourierValue(value, err)

    def _eval_rec(self, xi, tol):
        b = self.barycenter
        radius = self.radius
        arith_eps = mp.mpf(2) ** (10 - mp.mp.prec)
        memo = self._memo
        sys_children = self._children

        def rec(eta, eta_norm):
            key = tuple(eta[i, 0] for i in range(eta.rows))
            hit = memo.get(key)
            if hit is not None and hit[2] <= tol:
                return hit[0], hit[1]
            leaf_err = eta_norm * radius
            if leaf_err <= tol:
                phase = mp.re(linalg.dot(eta, b))
                val = mp.exp(mp.mpc(0, phase))
                out = (val, leaf_err + arith_eps, tol)
                memo[key] = out
                return out[0], out[1]
            total = mp.mpc(0)
            err = arith_eps
            for w, ratio, rot_t, a in sys_children:
                child = ratio * (rot_t * eta)
                phase = linalg.dot(eta, a)
                cval, cerr = rec(child, ratio * eta_norm)
                total += w * mp.exp(mp.mpc(0, mp.re(phase))) * cval
                err += w * cerr
            if len(memo) >= self.max_nodes:
                raise ResourceLimitError(
                    "frequency memo exceeded %d nodes; raise tol, raise the cap, "
                    "or fall back to Monte Carlo estimation" % self.max_nodes)
            memo[key] = (total, err, tol)
            return total, err

        return rec(xi, linalg.vec_norm(xi))


def mu_hat(ifs, p, xi, tol, ctx=DEFAULT_CTX, max_nodes=10 ** 6):
    """One-shot certified evaluation of the measure transform at xi."""
    return MuHatEvaluator(ifs, p, ctx, max_nodes).evaluate(xi, tol)


def mu_hat_product_oracle(lam, xi, terms=None, ctx=DEFAULT_CTX):
    """prod_{n < terms} cos(lam^n xi) for the symmetric two-map system with
    contraction lam and translations +-1; the independent oracle for the
    certified evaluator.

    terms defaults to (and is validated against) the first index with
    lam^terms * |xi| < 1e-20.
    """
    with ctx.workprec():
        lam = mp.mpf(lam)
        xi = mp.mpf(xi)
        if not 0 < lam < 1:
            raise ContractError("contraction must lie in (0, 1)")
        if terms is None:
            terms = 1
            while lam ** terms * max(abs(xi), mp.mpf(1)) >= mp.mpf("1e-20"):
                terms += 1
        if lam ** terms * abs(xi) >= mp.mpf("1e-20"):
            raise ContractError("not enough terms for the requested truncation")
        acc = mp.mpf(1)
        power = xi
        for _ in range(terms):
            acc *= mp.cos(power)
            power *= lam
        return acc


def product_oracle_truncation_bound(lam, xi, terms):
    """Tail bound sum_{n >= terms} (lam^n |xi|)^2 / 2 for the cosine product."""
    lam = mp.mpf(lam)
    t = lam ** terms * abs(mp.mpf(xi))
    return t ** 2 / (2 * (1 - lam ** 2))


@dataclass(frozen=True)
class WitnessSequence:
    base_xi: object        # real vector, integer-pairing rescaling included
    B: object              # adjoint of the generator, contracting
    m: int
    values: tuple          # FourierValue at 2 pi B^{-m-n} xi, n = 0..n_max
    frequencies: tuple

    def min_modulus(self):
        return min(abs(v.value) for v in self.values)

    def min_certified_modulus(self):
        return min(v.modulus_range()[0] for v in self.values)


def witness_xi(cert2, ctx=DEFAULT_CTX):
    """Real witness direction: the sum of the certificate's eigenvectors,
    scaled by the lcm of the pairing-polynomial denominators so that the
    pairing values become integers."""
    with ctx.workprec():
        d = cert2.zetas[0].rows
        xi = mp.matrix(d, 1)
        for z in cert2.zetas:
            for i in range(d):
                xi[i, 0] += z[i, 0]
        worst_imag = max(abs(mp.im(xi[i, 0])) for i in range(d))
        if worst_imag > mp.mpf(2) ** (-ctx.mantissa_bits // 3):
            raise ContractError("eigenvector sum is not certifiably real "
                                "(imaginary residue %s)" % mp.nstr(worst_imag, 4))
        out = mp.matrix(d, 1)
        for i in range(d):
            out[i, 0] = mp.re(xi[i, 0]) * cert2.xi_scale
        return out


def witness_sequence(ifs, p, cert2, m, n_max, tol, cert1=None, generator=None,
                     ctx=DEFAULT_CTX, max_nodes=10 ** 6):
    """Evaluate mu_hat along the expanding frequency ladder 2 pi B^{-m-n} xi.

    The system must have its first translation exactly zero (apply
    normalize_first_map beforehand).  The working precision is raised
    automatically to cover the largest frequency.
    """
    if cert2.status != "holds":
        raise ContractError("witness construction needs a holding certificate")
    if any(x != 0 for x in ifs.maps[0].translation):
        raise ContractError("first translation must be exactly zero; apply "
                            "normalize_first_map first")
    if generator is None:
        if cert1 is None:
            raise ContractError("pass the generator matrix or the "
                                "condition-one certificate")
        generator = cert1.generator_A
    beta = -mp.log(linalg.operator_norm(generator), 2)
    need = int(float(beta) * (m + n_max)) + 96 + int(max(0, -mp.log(mp.mpf(tol), 2)))
    work_ctx = ctx if ctx.mantissa_bits >= need else type(ctx)(need, ctx.root_tolerance)
    with work_ctx.workprec():
        xi = witness_xi(cert2, work_ctx)
        b_mat = generator.T
        b_inv = mp.inverse(b_mat)
        evaluator = MuHatEvaluator(ifs, p, work_ctx, max_nodes)
        freq = xi.copy()
        for _ in range(m):
            freq = b_inv * freq
        values = []
        freqs = []
        for _ in range(n_max + 1):
            target = 2 * mp.pi * freq
            values.append(evaluator.evaluate(target, tol))
            freqs.append(target.copy())
            freq = b_inv * freq
        return WitnessSequence(xi, b_mat, m, tuple(values), tuple(freqs))


def dist_sum_diagnostic(b, matrix, xi, j_max, ctx=DEFAULT_CTX):
    """Partial sums S_J = sum_{j <= J} ||<b, M^j xi>||^2 with ||.|| the
    nearest-integer distance.

    Callers probing the non-decay dichotomy pass the expanding matrix (the
    inverse adjoint of the contracting generator): witness directions then
    plateau while generic directions grow linearly.
    """
    if j_max < 1:
        raise ContractError("need at least one term")
    with ctx.workprec():
        b = b if isinstance(b, mp.matrix) else linalg.mpvector(b)
        xi = xi if isinstance(xi, mp.matrix) else linalg.mpvector(xi)
        matrix = linalg.mpmatrix(matrix)
        sums = []
        acc = mp.mpf(0)
        vec = xi.copy()
        for _ in range(j_max + 1):
            acc += nearest_int_dist(mp.re(linalg.dot(b, vec))) ** 2
            sums.append(+acc)
            vec = matrix * vec
        return sums


@dataclass(frozen=True)
class CorrelationSample:
    """Differences x - y of independent samples of the measure."""

    differences: object    # numpy (n, d)

    def __len__(self):
        return len(self.differences)

    def negation_symmetry_statistic(self):
        """Mean coordinate-wise difference between the sample and its
        negation; near zero when the law is symmetric."""
        return float(np.max(np.abs(np.mean(self.differences, axis=0))))


def correlation_sample(ifs, p, n, seed):
    """n independent differences of chaos-game points (two independent
    streams derived from the seed)."""
    a = chaos_game_sample(ifs, p, n, seed=(int(seed) * 2 + 1))
    b = chaos_game_sample(ifs, p, n, seed=(int(seed) * 2 + 2))
    return CorrelationSample(a - b)


def curve_fourier_average(samples, curve, s, t_nodes=64):
    """Monte Carlo estimate of the correlation average of
    |int_0^1 e^{i s <c(t), x>} dt| with a composite-trapezoid inner
    quadrature; returns (estimate, standard error)."""
    if t_nodes < 2:
        raise ContractError("need at least two quadrature nodes")
    ts = np.linspace(0.0, 1.0, t_nodes)
    nodes = np.stack([np.atleast_1d(np.asarray(curve(t), dtype=float)) for t in ts])
    diffs = np.atleast_2d(samples.differences)
    phases = diffs @ nodes.T            # (n, t_nodes)
    integrand = np.exp(1j * float(s) * phases)
    weights = np.full(t_nodes, 1.0 / (t_nodes - 1))
    weights[0] *= 0.5
    weights[-1] *= 0.5
    inner = np.abs(integrand @ weights)
    return float(np.mean(inner)), float(np.std(inner) / np.sqrt(len(inner)))


def strip_mass_scan(samples, directions, delta, seed=0):
    """Max over sampled projective directions and a pitch-delta center grid
    of the empirical projected mass of a radius-delta ball."""
    if delta <= 0:
        raise ContractError("delta must be positive")
    diffs = np.atleast_2d(samples.differences)
    d = diffs.shape[1]
    if d == 1:
        dirs = np.array([[1.0]])
    else:
        rng = np.random.default_rng([int(seed), 0xD185])
        dirs = rng.normal(size=(int(directions), d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs = np.vstack([np.eye(d), dirs])
    worst = 0.0
    for u in dirs:
        proj = np.sort(diffs @ u)
        lo, hi = proj[0], proj[-1]
        centers = np.arange(lo, hi + delta, delta)
        left = np.searchsorted(proj, centers - delta, side="left")
        right = np.searchsorted(proj, centers + delta, side="right")
        if len(centers):
            worst = max(worst, float(np.max(right - left)) / len(proj))
    return worst
