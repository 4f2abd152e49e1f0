"""Self-similar iterated function systems on R^d.

Maps are contracting similarities x -> ratio * rotation @ x + translation.
All geometric data is held as mpmath matrices; Monte Carlo sampling converts
to float64 internally.  Words over the map alphabet are 0-based index tuples.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import linalg
from .algebra import DEFAULT_CTX, is_pv_tuple
from .errors import ContractError, ResourceLimitError


@dataclass(frozen=True)
class Similarity:
    """One contracting similarity: ratio in (0,1), orthogonal rotation,
    translation vector."""

    ratio: object
    rotation: object
    translation: object

    def __post_init__(self):
        # keep mpf inputs bit-exact; mp.mpf() would round to ambient precision
        r = self.ratio if isinstance(self.ratio, mp.mpf) else mp.mpf(self.ratio)
        if not 0 < r < 1:
            raise ContractError("ratio must lie in (0, 1)")
        u = linalg.mpmatrix(self.rotation)
        t = self.translation
        if not isinstance(t, mp.matrix):
            t = linalg.mpvector(t)
        if u.rows != u.cols or t.rows != u.rows or t.cols != 1:
            raise ContractError("rotation/translation dimensions disagree")
        defect = linalg.orthogonality_defect(u)
        if defect > 10 * mp.mpf(2) ** (-mp.mp.prec + 4) and defect > mp.mpf("1e-12"):
            raise ContractError("rotation is not orthogonal (defect %s)" % mp.nstr(defect, 5))
        object.__setattr__(self, "ratio", r)
        object.__setattr__(self, "rotation", u)
        object.__setattr__(self, "translation", t)

    @property
    def dimension(self):
        return self.rotation.rows

    def __call__(self, x):
        return self.ratio * (self.rotation * x) + self.translation

    def linear_part(self):
        return self.ratio * self.rotation

    def log_contraction(self):
        """log base 2 of the inverse contraction ratio."""
        return -mp.log(self.ratio, 2)


@dataclass(frozen=True)
class IFS:
    dimension: int
    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ContractError("an IFS needs at least one map")
        if any(m.dimension != self.dimension for m in maps):
            raise ContractError("all maps must share the IFS dimension")
        object.__setattr__(self, "maps", maps)

    def __len__(self):
        return len(self.maps)

    def log_contractions(self):
        return [m.log_contraction() for m in self.maps]


@dataclass(frozen=True)
class ProbabilityVector:
    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        if not w:
            raise ContractError("empty weight vector")
        if any(_as_float(x) < 0 for x in w):
            raise ContractError("weights must be nonnegative")
        total = sum(Fraction(x) if isinstance(x, (int, Fraction)) else Fraction(0) for x in w)
        if all(isinstance(x, (int, Fraction)) for x in w):
            if total != 1:
                raise ContractError("weights must sum to 1")
        elif abs(sum(_as_float(x) for x in w) - 1.0) > 1e-9:
            raise ContractError("weights must sum to 1 within tolerance")
        object.__setattr__(self, "weights", w)

    @property
    def positive(self):
        return all(_as_float(x) > 0 for x in self.weights)

    def as_fractions(self):
        return [Fraction(x) for x in self.weights]

    def as_floats(self):
        return np.array([_as_float(x) for x in self.weights])

    def as_mpf(self):
        return [mp.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mp.mpf(x)
                for x in self.weights]


def _as_float(x):
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def uniform_weights(n):
    return ProbabilityVector(tuple(Fraction(1, n) for _ in range(n)))


@dataclass(frozen=True)
class CutSet:
    """Prefix-free, complete set of words first reaching a log-contraction
    threshold."""

    words: tuple
    threshold: object

    def is_prefix_free(self):
        ws = sorted(self.words)
        for a, b in zip(ws, ws[1:]):
            if len(a) <= len(b) and b[:len(a)] == a:
                return False
        return True

    def is_complete(self, alphabet_size):
        """Exhaustive check: every branch of the tree leads into the set."""
        words = set(self.words)
        frontier = [()]
        while frontier:
            w = frontier.pop()
            if w in words:
                continue
            if len(w) > max((len(x) for x in words), default=0):
                return False
            frontier.extend(w + (i,) for i in range(alphabet_size))
        return True


def compose_pair(s1, s2):
    """s1 after s2."""
    return Similarity(s1.ratio * s2.ratio,
                      s1.rotation * s2.rotation,
                      s1.translation + s1.ratio * (s1.rotation * s2.translation))


def compose_word(ifs, word):
    """phi_w = phi_{i_1} o ... o phi_{i_n} for a nonempty word."""
    if not word:
        raise ContractError("empty word composes to the identity, which is not a "
                            "similarity with ratio < 1; handle it explicitly")
    out = ifs.maps[word[0]]
    for i in word[1:]:
        out = compose_pair(out, ifs.maps[i])
    return out


def fixed_point(s):
    """The unique x with s(x) = x, i.e. (I - ratio*rotation)^(-1) translation."""
    d = s.dimension
    m = linalg.identity(d) - s.linear_part()
    return linalg.solve(m, s.translation)


def cut_set(ifs, t, max_words=10 ** 7):
    """All words whose accumulated log-contraction first reaches t."""
    t = mp.mpf(t)
    if not t > 0:
        raise ContractError("threshold must be positive")
    logs = ifs.log_contractions()
    out = []
    stack = [((), mp.mpf(0))]
    while stack:
        word, psi = stack.pop()
        for i in reversed(range(len(ifs))):
            w2 = word + (i,)
            p2 = psi + logs[i]
            if p2 >= t:
                out.append(w2)
            else:
                stack.append((w2, p2))
            if len(out) + len(stack) > max_words:
                raise ResourceLimitError("cut-set exceeds %d words; lower the "
                                         "threshold or raise the cap" % max_words)
    out.sort()
    return CutSet(tuple(out), t)


def cut_set_weight(p, word):
    """Product of word-letter weights, exact over Fraction weights."""
    acc = Fraction(1)
    for i in word:
        acc *= Fraction(p.weights[i])
    return acc


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    rank: int
    dimension: int
    singular_values: tuple
    max_word_length: int


def is_affinely_irreducible(ifs, ctx=DEFAULT_CTX, rel_tol=1e-8, max_length=6):
    """Numerical affine-irreducibility: the fixed points of short words must
    affinely span R^d (rank of centered differences = d by singular values).

    Word length starts at 2 and doubles until the rank stabilizes for two
    rounds or the cap is reached.
    """
    d = ifs.dimension
    points = []

    def add_words(max_len):
        words = [()]
        for _ in range(max_len):
            words = [w + (i,) for w in words for i in range(len(ifs))]
            for w in words:
                points.append(linalg.to_numpy(fixed_point(compose_word(ifs, w))))

    def current_rank():
        arr = np.array([p if np.ndim(p) else [p] for p in points])
        base = arr[0]
        diffs = arr[1:] - base
        if len(diffs) == 0:
            return 0, ()
        sv = np.linalg.svd(diffs, compute_uv=False)
        scale = max(np.max(np.abs(diffs)), 1e-30)
        rank = int(np.sum(sv > rel_tol * scale))
        return rank, tuple(float(s) for s in sv[:d])

    length = 2
    add_words(length)
    rank, sv = current_rank()
    stable = 0
    while rank < d and stable < 2 and length < max_length:
        length = min(2 * length, max_length)
        points.clear()
        add_words(length)
        new_rank, sv = current_rank()
        stable = stable + 1 if new_rank == rank else 0
        rank = new_rank
    return IrreducibilityReport(rank == d, rank, d, sv, length)


def normalize_first_map(ifs, ctx=DEFAULT_CTX):
    """Conjugate by the translation moving the first map's fixed point to 0.

    The first output translation is set to exactly zero; linear parts are
    unchanged; idempotent when the first translation is already zero.
    """
    if all(x == 0 for x in ifs.maps[0].translation):
        return ifs
    with ctx.workprec():
        c = fixed_point(ifs.maps[0])
        new_maps = []
        for k, m in enumerate(ifs.maps):
            if k == 0:
                t = linalg.zeros_vector(ifs.dimension)
            else:
                t = m.translation + m.ratio * (m.rotation * c) - c
            new_maps.append(Similarity(m.ratio, m.rotation, t))
        return IFS(ifs.dimension, tuple(new_maps))


def project_ifs(ifs, basis, tol=1e-10):
    """Restrict to an invariant subspace spanned by orthonormal basis rows.

    basis: list of d-vectors; every rotation must map their span to itself
    within tol, else the residual is reported and the call rejected.
    """
    d = ifs.dimension
    rows = [linalg.mpvector(b) for b in basis]
    dp = len(rows)
    s = mp.matrix(dp, d)
    for i, b in enumerate(rows):
        for j in range(d):
            s[i, j] = b[j, 0]
    defect = linalg.orthogonality_defect(s.T) if dp == d else None
    gram = s * s.T
    for i in range(dp):
        for j in range(dp):
            target = 1 if i == j else 0
            if abs(gram[i, j] - target) > tol:
                raise ContractError("basis is not orthonormal")
    proj = s.T * s
    eye = linalg.identity(d)
    worst = mp.mpf(0)
    for m in ifs.maps:
        resid = (eye - proj) * m.rotation * s.T
        worst = max(worst, max(abs(resid[i, j]) for i in range(d) for j in range(dp)))
    if worst > tol:
        raise ContractError("subspace is not invariant under the rotations "
                            "(residual %s)" % mp.nstr(worst, 5))
    new_maps = [Similarity(m.ratio, s * m.rotation * s.T, s * m.translation)
                for m in ifs.maps]
    return IFS(dp, tuple(new_maps))


@dataclass(frozen=True)
class ConstructionWitness:
    matrix: object          # the shared contracting linear part
    thetas: tuple
    zetas: tuple            # eigenvectors of the inverse, conjugation-paired
    xi: object              # sum of the zetas, a real vector
    irreducibility: IrreducibilityReport


def construct_from_pv_tuple(tup, ctx=DEFAULT_CTX):
    """Build the canonical (k+1)-map affinely irreducible IFS on R^k whose
    shared linear part has the tuple's inverses as eigenvalues.

    Maps: x -> Ax and x -> Ax + A^{1-i} xi for i = 1..k, with xi the sum of a
    conjugation-paired orthonormal eigenvector family of A^{-1}.
    """
    cert = is_pv_tuple(tup, ctx)
    if cert.status != "pv":
        raise ContractError("tuple must be certified pv (got %s)" % cert.status)
    with ctx.workprec(32):
        moduli = [abs(t.value) for t in tup.thetas]
        spread = max(moduli) - min(moduli)
        radii = max(t.error_radius for t in tup.thetas)
        if spread > 2 * radii + mp.mpf(2) ** (-ctx.mantissa_bits // 2):
            raise ContractError("equal modulus required across the tuple")
        k = len(tup.thetas)
        ratio = 1 / moduli[0]

        reals, pairs, used = [], [], set()
        for i, t in enumerate(tup.thetas):
            if i in used:
                continue
            if abs(mp.im(t.value)) <= t.error_radius:
                reals.append(i)
                used.add(i)
            elif mp.im(t.value) > 0:
                slack = mp.mpf(2) ** (-ctx.mantissa_bits // 2)
                for j, u in enumerate(tup.thetas):
                    if j not in used and j != i and \
                            abs(mp.conj(t.value) - u.value) <= t.error_radius + u.error_radius + slack:
                        pairs.append((i, j))
                        used.update((i, j))
                        break
                else:
                    raise ContractError("tuple is not conjugation-closed")
        sqrt2 = mp.sqrt(2)

        blocks, zetas, thetas_ordered = [], [], []
        coord = 0
        for i in reals:
            theta = mp.re(tup.thetas[i].value)
            blocks.append(mp.matrix([[1 / theta]]))
            z = mp.matrix(k, 1)
            z[coord, 0] = mp.mpc(1)
            zetas.append(z)
            thetas_ordered.append(mp.mpc(theta))
            coord += 1
        for i, j in pairs:
            theta = tup.thetas[i].value
            alpha = mp.arg(theta)
            blocks.append(ratio * linalg.rotation_2d(-alpha))
            z = mp.matrix(k, 1)
            z[coord, 0] = mp.mpc(1) / sqrt2
            z[coord + 1, 0] = mp.mpc(0, -1) / sqrt2
            zetas.append(z)
            thetas_ordered.append(theta)
            zc = mp.matrix(k, 1)
            zc[coord, 0] = mp.mpc(1) / sqrt2
            zc[coord + 1, 0] = mp.mpc(0, 1) / sqrt2
            zetas.append(zc)
            thetas_ordered.append(mp.conj(theta))
            coord += 2

        a = linalg.block_diag(blocks)
        xi = mp.matrix(k, 1)
        for z in zetas:
            for c in range(k):
                xi[c, 0] += z[c, 0]
        xi = mp.matrix([[mp.re(xi[c, 0])] for c in range(k)])

        inv_a = mp.inverse(a)
        resid = mp.mpf(0)
        for theta, z in zip(thetas_ordered, zetas):
            v = inv_a * z - theta * z
            resid = max(resid, linalg.vec_norm(v))
        if resid > mp.mpf(2) ** (-ctx.mantissa_bits // 2):
            raise ContractError("eigenvector residual too large: %s" % mp.nstr(resid, 5))

        maps = [Similarity(ratio, (1 / ratio) * a, linalg.zeros_vector(k))]
        power = linalg.identity(k)
        for i in range(1, k + 1):
            maps.append(Similarity(ratio, (1 / ratio) * a, power * xi))
            power = power * inv_a
        system = IFS(k, tuple(maps))
        report = is_affinely_irreducible(system, ctx)
        if not report.irreducible:
            raise ContractError("constructed system failed the affine "
                                "irreducibility check")
        witness = ConstructionWitness(a, tuple(thetas_ordered), tuple(zetas), xi, report)
        return system, witness


def _float_system(ifs):
    d = ifs.dimension
    rots = np.stack([np.array([[float(m.rotation[i, j]) for j in range(d)]
                               for i in range(d)]) for m in ifs.maps])
    ratios = np.array([float(m.ratio) for m in ifs.maps])
    trans = np.stack([np.array([float(m.translation[i, 0]) for i in range(d)])
                      for m in ifs.maps])
    return ratios, rots, trans


def chaos_game_sample(ifs, p, n, seed, burn_in=64):
    """n points of the random-iteration chain, sharded into parallel chains.

    Deterministic per seed: chain s uses the generator seeded with
    [seed, s]; results are concatenated in shard order.
    """
    if not p.positive:
        raise ContractError("chaos game requires positive weights")
    d = ifs.dimension
    ratios, rots, trans = _float_system(ifs)
    weights = p.as_floats()
    weights = weights / weights.sum()
    shards = min(int(n), 1024) or 1
    per = -(-int(n) // shards)
    out = np.empty((shards * per, d))
    x = np.zeros((shards, d))
    rng = np.random.default_rng([int(seed), 0xC4A05])
    draws = rng.choice(len(ifs), size=(burn_in + per, shards), p=weights)
    for step in range(burn_in + per):
        idx = draws[step]
        x = np.einsum("sij,sj->si", rots[idx], x) * ratios[idx, None] + trans[idx]
        if step >= burn_in:
            out[step - burn_in::per] = x
    return out[:int(n)]


def slab_mass(samples, direction, center, delta):
    """Fraction of samples within distance delta of the affine hyperplane
    <x, direction> = center."""
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if abs(norm - 1.0) > 1e-9:
        raise ContractError("direction must be a unit vector")
    proj = np.atleast_2d(samples) @ direction
    return float(np.mean(np.abs(proj - center) <= delta))


def attractor_radius_bound(ifs, anchor):
    """Certified bound on sup_{x in attractor} |x - anchor|."""
    rmax = max(m.ratio for m in ifs.maps)
    step = max(linalg.vec_norm(m(anchor) - anchor) for m in ifs.maps)
    return step / (1 - rmax)
