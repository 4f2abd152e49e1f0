"""The group generated by (log 1/r_i, U_i): lattice detection, finite
rotation kernel, and the two-part cyclic-factorization / eigenvector
rationality decision procedure for self-similar systems.

Conventions: log base 2 throughout; the scalar part of a group element acts
on frequencies by 2^{-t} U^{-1} x.  Elements are (t, U) with U orthogonal.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath as mp
import numpy as np

from . import linalg
from .algebra import (DEFAULT_CTX, AlgebraicTuple, ComplexRoot, IntPolynomial,
                      certify_defining_poly, find_defining_poly, is_pv_tuple,
                      rational_reconstruct)
from .errors import ContractError, ResourceLimitError


@dataclass(frozen=True)
class GroupElement:
    """(t, U) with t the log_2 inverse-contraction and U orthogonal."""

    t: object
    U: object

    def __post_init__(self):
        t = self.t if isinstance(self.t, mp.mpf) else mp.mpf(self.t)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "U", linalg.mpmatrix(self.U))

    @property
    def dimension(self):
        return self.U.rows

    def __mul__(self, other):
        return GroupElement(self.t + other.t, self.U * other.U)

    def inverse(self):
        return GroupElement(-self.t, self.U.T)

    def act(self, x):
        """Right action on frequency vectors: x -> 2^{-t} U^{-1} x."""
        return mp.mpf(2) ** (-self.t) * (self.U.T * x)

    def scaled_matrix(self):
        return mp.mpf(2) ** (-self.t) * self.U.T


def identity_element(d):
    return GroupElement(0, linalg.identity(d))


def element_of_similarity(s):
    return GroupElement(s.log_contraction(), s.rotation)


def d_op_distance(g1, g2):
    """Operator-norm metric ||2^{-t1} U1^{-1} - 2^{-t2} U2^{-1}||."""
    if g1.dimension != g2.dimension:
        raise ContractError("elements live in different dimensions")
    return linalg.operator_norm(g1.scaled_matrix() - g2.scaled_matrix())


# ---------------------------------------------------------------------------
# lattice detection


@dataclass(frozen=True)
class PsiImage:
    kind: str              # "lattice" | "dense_candidate"
    beta: object = None
    exponents: tuple = ()
    residual: object = None

    @property
    def conclusive(self):
        # dense candidates are never certified: irrationality of log ratios
        # is not decidable numerically
        return self.kind == "lattice"


@dataclass(frozen=True)
class RotationKernel:
    kind: str              # "finite" | "exceeded_bound"
    elements: tuple = ()   # numpy orthogonal matrices, identity first
    words: tuple = ()      # per element: letters i (generator) / ~i (inverse)

    def order(self):
        return len(self.elements)

    def materialize(self, atoms):
        """High-precision kernel elements: evaluate each closure word over
        exact mpmath generator matrices."""
        d = atoms[0].rows if atoms else 1
        out = []
        for word in self.words:
            m = linalg.identity(d)
            for letter in word:
                m = m * (atoms[letter] if letter >= 0 else atoms[~letter].T)
            out.append(m)
        return tuple(out)


@dataclass(frozen=True)
class DiscretenessReport:
    psi_image: PsiImage
    rotation_kernel: RotationKernel


def log_lattice_detect(ratios, denom_bound=10 ** 6, ctx=DEFAULT_CTX):
    """Search for beta > 0 and coprime integers n_i with log2(1/r_i) = n_i beta.

    Uses continued-fraction reconstruction of pairwise log ratios; the
    acceptance residual scales with the working precision so that spurious
    convergents of irrational ratios are rejected.  Failure returns a
    dense-candidate tagged inconclusive, never a certified "dense".
    """
    if denom_bound < 1:
        raise ContractError("denom_bound must be at least 1")
    with ctx.workprec():
        logs = [-mp.log(mp.mpf(r), 2) for r in ratios]
        if any(x <= 0 for x in logs):
            raise ContractError("ratios must lie in (0, 1)")
        tol = mp.mpf(2) ** (-(ctx.mantissa_bits // 2))
        base = logs[0]
        fracs = []
        for x in logs:
            fr = rational_reconstruct(x / base, denom_bound, tol)
            if fr is None or fr <= 0:
                return PsiImage("dense_candidate")
            fracs.append(fr)
        denom_lcm = 1
        for fr in fracs:
            denom_lcm = denom_lcm * fr.denominator // gcd(denom_lcm, fr.denominator)
        ints = [int(fr * denom_lcm) for fr in fracs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        beta = base * g / denom_lcm
        residual = max(abs(x - n * beta) for x, n in zip(logs, ints))
        if residual > tol * max(logs):
            return PsiImage("dense_candidate")
        return PsiImage("lattice", beta, tuple(ints), residual)


# ---------------------------------------------------------------------------
# finite closure of rotation sets


def _op_norm_float(m):
    if m.shape[0] == 1:
        return abs(m[0, 0])
    return float(np.linalg.norm(m, 2))


class _MatrixStore:
    """Growing buffer of d x d matrices with vectorized near-duplicate lookup."""

    def __init__(self, d, capacity):
        self.d = d
        self.buf = np.empty((capacity, d, d))
        self.count = 0

    def find(self, m, tol):
        if self.count == 0:
            return None
        arr = self.buf[:self.count]
        fro = np.sqrt(np.sum((arr - m) ** 2, axis=(1, 2)))
        hit = int(np.argmin(fro))
        if fro[hit] < tol:                  # operator norm <= Frobenius
            return hit
        for j in np.nonzero(fro < np.sqrt(self.d) * tol)[0]:
            if _op_norm_float(arr[j] - m) < tol:
                return int(j)
        return None

    def add(self, m):
        if self.count == len(self.buf):
            self.buf = np.concatenate([self.buf, np.empty_like(self.buf)])
        self.buf[self.count] = m
        self.count += 1
        return self.count - 1

    def matrices(self):
        return tuple(self.buf[i].copy() for i in range(self.count))


def _find_close(elements, m, tol):
    if not len(elements):
        return None
    arr = np.asarray(elements)
    fro = np.sqrt(np.sum((arr - m) ** 2, axis=(1, 2)))
    hit = int(np.argmin(fro))
    if fro[hit] < tol:
        return hit
    for j in np.nonzero(fro < np.sqrt(m.shape[0]) * tol)[0]:
        if _op_norm_float(arr[j] - m) < tol:
            return int(j)
    return None


def rotation_closure(generators, max_elements=10 ** 4, tol=1e-10):
    """Breadth-first closure of orthogonal matrices under products and
    inverses, merging elements within d_op tolerance.

    Stabilizing returns the finite group (with a defining word over the
    generators per element, letter i for generators[i] and ~i for its
    inverse); overflowing the cap returns "exceeded_bound" (evidence, not
    proof, of nondiscreteness).
    """
    if max_elements < 1:
        raise ContractError("max_elements must be at least 1")
    gens = [np.asarray(linalg.to_numpy(g) if isinstance(g, mp.matrix) else g, dtype=float)
            for g in generators]
    gens = [g.reshape(1, 1) if g.ndim == 0 else np.atleast_2d(g) for g in gens]
    d = gens[0].shape[0]
    letters = list(range(len(gens))) + [~i for i in range(len(gens))]
    mats = gens + [g.T.copy() for g in gens]
    store = _MatrixStore(d, min(max_elements + 1, 1 << 12))
    store.add(np.eye(d))
    words = [()]
    head = 0
    while head < store.count:
        base = store.buf[head].copy()
        base_word = words[head]
        head += 1
        for letter, g in zip(letters, mats):
            cand = base @ g
            if store.find(cand, tol) is None:
                store.add(cand)
                words.append(base_word + (letter,))
                if store.count > max_elements:
                    return RotationKernel("exceeded_bound")
    return RotationKernel("finite", store.matrices(), tuple(words))


def closure_is_group(kernel, tol=1e-9):
    """Exhaustive product/inverse/identity check on a finite closure."""
    els = kernel.elements
    if not any(np.allclose(e, np.eye(e.shape[0]), atol=tol) for e in els):
        return False
    for a in els:
        if _find_close(list(els), a.T.copy(), tol) is None:
            return False
        for b in els:
            if _find_close(list(els), a @ b, tol) is None:
                return False
    return True


def _bezout_coefficients(ints):
    """Integer coefficients c with sum c_i * ints_i = gcd(ints)."""
    def ext_gcd(a, b):
        if b == 0:
            return a, 1, 0
        g, x, y = ext_gcd(b, a % b)
        return g, y, x - (a // b) * y

    coeffs = [1] + [0] * (len(ints) - 1)
    g = ints[0]
    for k in range(1, len(ints)):
        g2, x, y = ext_gcd(g, ints[k])
        coeffs = [c * x for c in coeffs]
        coeffs[k] = y
        g = g2
    return coeffs


@dataclass(frozen=True)
class KernelData:
    """Float kernel plus the exact-precision material to rebuild it."""

    kernel: RotationKernel
    atoms_mp: tuple
    u_a_mp: object
    elements_mp: tuple


def _mp_power(u, n):
    """u^n for orthogonal mpmath u, inverse via transpose."""
    if n == 0:
        return linalg.identity(u.rows)
    base = u if n > 0 else u.T
    out = base.copy()
    for _ in range(abs(n) - 1):
        out = out * base
    return out


def kernel_from_lattice(ifs, psi_image, max_elements=10 ** 4, tol=1e-10,
                        ctx=DEFAULT_CTX):
    """Rotation kernel of the group generated by the linear parts, given a
    certified lattice psi-image.

    Seeds the closure with U_i * U_A^{-n_i} (U_A a psi = beta rotation built
    from a Bezout word in the map rotations) and re-closes under conjugation
    by U_A until stable.  Kernel elements stay re-materializable at full
    precision through their closure words.
    """
    if psi_image.kind != "lattice":
        raise ContractError("kernel extraction requires a lattice psi-image")
    with ctx.workprec():
        rots_mp = [m.rotation for m in ifs.maps]
        n = list(psi_image.exponents)
        coeffs = _bezout_coefficients(n)
        d = ifs.dimension
        u_a_mp = linalg.identity(d)
        for c, u in zip(coeffs, rots_mp):
            u_a_mp = u_a_mp * _mp_power(u, c)
        atoms = [u * _mp_power(u_a_mp, -ni) for u, ni in zip(rots_mp, n)]
        for _ in range(8):
            kernel = rotation_closure(atoms, max_elements, tol)
            if kernel.kind != "finite":
                return KernelData(kernel, tuple(atoms), u_a_mp, ())
            u_a_f = linalg.to_numpy(u_a_mp).reshape(d, d)
            stable = all(
                _find_close(kernel.elements, u_a_f.T @ v @ u_a_f, tol) is not None
                for v in kernel.elements)
            if stable:
                return KernelData(kernel, tuple(atoms), u_a_mp,
                                  kernel.materialize(atoms))
            atoms = atoms + [u_a_mp.T * a * u_a_mp for a in atoms]
    raise ResourceLimitError("kernel closure did not stabilize under conjugation")


def discreteness_report(ifs, denom_bound=10 ** 6, max_elements=10 ** 4,
                        tol=1e-10, ctx=DEFAULT_CTX):
    """Lattice detection plus kernel closure; the entry point for stage two
    of the decision pipeline.  Returns (report, kernel data or None)."""
    psi = log_lattice_detect([m.ratio for m in ifs.maps], denom_bound, ctx)
    if psi.kind != "lattice":
        return DiscretenessReport(psi, RotationKernel("exceeded_bound")), None
    data = kernel_from_lattice(ifs, psi, max_elements, tol, ctx)
    return DiscretenessReport(psi, data.kernel), data


# ---------------------------------------------------------------------------
# condition one: finite kernel, cyclic quotient, coset factorization


@dataclass(frozen=True)
class ConditionOneCertificate:
    holds: bool
    beta: object
    N_elements: tuple            # mpmath orthogonal matrices
    generator_A: object          # mpmath matrix, contracting
    coset_exponents: tuple       # l_i with r_i U_i in A^{l_i} N
    kernel_indices: tuple        # index of V_i in N_elements per map
    residual: object
    generator_choice: str        # provenance of the choice of A


def _lex_key(m, digits=9):
    return tuple(round(float(m[i, j]), digits) for i in range(m.shape[0])
                 for j in range(m.shape[1]))


def check_condition_one(ifs, report, tol=1e-10, ctx=DEFAULT_CTX, kernel_data=None):
    """Verify the cyclic-factorization condition: every linear part r_i U_i
    factors as A^{l_i} V with V in the finite kernel, for a canonical
    contracting generator A of minimal positive log-contraction.

    The returned generator and kernel matrices are exact-precision products
    of the map rotations (materialized from closure words), so downstream
    eigen computations are limited only by the working precision.
    """
    psi = report.psi_image
    if psi.kind != "lattice" or report.rotation_kernel.kind != "finite":
        raise ContractError("condition one undecidable at this precision: "
                            "needs a lattice psi-image and a finite kernel")
    if kernel_data is None:
        kernel_data = kernel_from_lattice(ifs, psi, ctx=ctx)
    kernel = kernel_data.kernel
    elements_mp = kernel_data.elements_mp
    d = ifs.dimension

    with ctx.workprec():
        # canonical generator: lexicographically smallest matrix among the
        # psi = beta coset representatives U_A * V
        u_a_f = linalg.to_numpy(kernel_data.u_a_mp).reshape(d, d)
        candidates = [(u_a_f @ v) for v in kernel.elements]
        best = min(range(len(candidates)), key=lambda i: _lex_key(candidates[i]))
        u_gen_mp = kernel_data.u_a_mp * elements_mp[best]
        choice = ("min positive psi coset, lexicographically smallest matrix "
                  "(kernel index %d)" % best)

        beta = psi.beta
        a_mat = mp.mpf(2) ** (-beta) * u_gen_mp
        exps = psi.exponents
        kernel_idx = []
        residual = mp.mpf(0)
        for m, li in zip(ifs.maps, exps):
            v_mp = _mp_power(u_gen_mp, -li) * m.rotation
            hit = _find_close(kernel.elements,
                              linalg.to_numpy(v_mp).reshape(d, d), 10 * tol)
            if hit is None:
                return ConditionOneCertificate(False, beta, tuple(elements_mp),
                                               a_mat, tuple(exps), (), None,
                                               choice + "; factorization failed")
            residual = max(residual, linalg.operator_norm(elements_mp[hit] - v_mp))
            kernel_idx.append(hit)
        return ConditionOneCertificate(True, beta, tuple(elements_mp),
                                       a_mat, tuple(exps), tuple(kernel_idx),
                                       residual, choice)


def candidate_generators(cert1):
    """All psi = beta coset representatives A*V, the generators against which
    the eigenvector condition can be checked; deterministic order."""
    out = []
    for idx, v in enumerate(cert1.N_elements):
        out.append((idx, cert1.generator_A * v))
    return out


# ---------------------------------------------------------------------------
# eigenstructure


@dataclass(frozen=True)
class EigenStructure:
    thetas: tuple          # eigenvalues of A^{-1}, conjugation-paired order
    zetas: tuple           # unit eigenvectors, zeta of conj(theta) = conj(zeta)
    residuals: tuple       # certified Bauer-Fike radii (A is normal)
    repeated: bool


def eigen_structure(a, ctx=DEFAULT_CTX):
    """Eigenvalues/vectors of A^{-1} for a contracting orthogonal-scalar A.

    All eigenvalues share modulus 1/||A||; conjugate pairs are returned
    adjacently with conjugated eigenvectors; repeated eigenvalues are
    flagged.  Residual norms give certified eigenvalue radii since A is
    normal.
    """
    with ctx.workprec(32):
        a = linalg.mpmatrix(a)
        d = a.rows
        inv = mp.inverse(a)
        inv_c = mp.matrix(d, d)
        for i in range(d):
            for j in range(d):
                inv_c[i, j] = mp.mpc(inv[i, j])
        evals, evecs = mp.eig(inv_c)
        order = sorted(range(d), key=lambda i: (-mp.im(evals[i]), mp.re(evals[i])))
        sep = min((abs(evals[i] - evals[j]) for i in range(d) for j in range(d) if i < j),
                  default=mp.inf)
        repeated = sep < mp.mpf(2) ** (-ctx.mantissa_bits // 3)

        thetas, zetas, resids = [], [], []
        used = set()
        for i in order:
            if i in used:
                continue
            lam = evals[i]
            vec = mp.matrix([[evecs[r, i]] for r in range(d)])
            vec = vec / linalg.vec_norm(vec)
            # deterministic phase: first nonzero coordinate positive real
            for r in range(d):
                if abs(vec[r, 0]) > mp.mpf("1e-12"):
                    phase = vec[r, 0] / abs(vec[r, 0])
                    vec = vec * (1 / phase)
                    break
            res = linalg.vec_norm(inv_c * vec - lam * vec)
            if abs(mp.im(lam)) <= res + mp.mpf(2) ** (-ctx.mantissa_bits // 2):
                thetas.append(mp.mpc(mp.re(lam), 0))
                zetas.append(vec)
                resids.append(res)
                used.add(i)
            else:
                # find the conjugate partner among remaining eigenvalues
                partner = None
                for j in order:
                    if j not in used and j != i and \
                            abs(mp.conj(lam) - evals[j]) < mp.mpf(2) ** (-ctx.mantissa_bits // 3):
                        partner = j
                        break
                if partner is None:
                    raise ContractError("eigenvalues not closed under conjugation")
                thetas.extend([lam, mp.conj(lam)])
                vecc = mp.matrix([[mp.conj(vec[r, 0])] for r in range(d)])
                zetas.extend([vec, vecc])
                resids.extend([res, res])
                used.update((i, partner))
        return EigenStructure(tuple(thetas), tuple(zetas), tuple(resids), bool(repeated))


# ---------------------------------------------------------------------------
# condition two: P.V. eigenvalues with rational pairing polynomials


@dataclass(frozen=True)
class ConditionTwoCertificate:
    status: str            # "holds" | "fails" | "inconclusive"
    k: int = 0
    thetas: AlgebraicTuple = None
    zetas: tuple = ()
    polys: dict = None     # (map index, kernel index) -> tuple of Fractions
    reference: tuple = None
    failures: tuple = ()
    xi_scale: int = 1      # lcm of polynomial denominators


def _conjugation_closed_subsets(eig):
    """Units = real eigenvalues and conjugate pairs; nonempty unit subsets in
    canonical (size, lexicographic) order."""
    units = []
    i = 0
    while i < len(eig.thetas):
        if mp.im(eig.thetas[i]) == 0:
            units.append((i,))
            i += 1
        else:
            units.append((i, i + 1))
            i += 2
    subsets = []
    for size in range(1, len(units) + 1):
        for combo in itertools.combinations(range(len(units)), size):
            idx = tuple(j for u in combo for j in units[u])
            subsets.append(idx)
    subsets.sort(key=lambda s: (len(s), s))
    return subsets


def _pairing(vec, zeta):
    return linalg.dot(vec, zeta)


def _try_rational(x, denom_bound, scale_tol):
    if abs(mp.im(x)) > scale_tol:
        return None
    return rational_reconstruct(mp.re(x), denom_bound, scale_tol)


def check_condition_two(cert1, translations, ctx=DEFAULT_CTX,
                        denom_bound=10 ** 6, generator=None, force_k=None):
    """Decide the eigenvector-rationality condition for a generator A.

    Candidate theta-subsets are conjugation-closed subsets of the eigenvalues
    of A^{-1}; for each, a monic integer defining polynomial is recovered and
    certified pv, eigenvectors are normalized by a reference pairing, and the
    Vandermonde-interpolated pairing coefficients must all be rational with
    denominator <= denom_bound.  First success in canonical order wins.

    Repeated-eigenvalue fallback: for a repeated real integer eigenvalue with
    rational translations, a rational-pairing eigenvector is searched
    directly; anything else repeated is inconclusive.
    """
    if not cert1.holds:
        raise ContractError("condition two requires a holding condition-one certificate")
    a = cert1.generator_A if generator is None else generator
    with ctx.workprec(32):
        eig = eigen_structure(a, ctx)
        kernel = cert1.N_elements
        trans = [t if isinstance(t, mp.matrix) else linalg.mpvector(t)
                 for t in translations]
        pair_vectors = []
        for i, t in enumerate(trans):
            for vi, v in enumerate(kernel):
                pair_vectors.append((i, vi, v * t))

        if eig.repeated:
            return _repeated_eigenvalue_fallback(eig, pair_vectors, denom_bound,
                                                 ctx, force_k)

        scale_tol = mp.mpf(10) ** (-12) * max(mp.mpf(1),
                                              max(linalg.vec_norm(t) for t in trans))
        failures = []
        for subset in _conjugation_closed_subsets(eig):
            k = len(subset)
            if force_k is not None and k != force_k:
                continue
            thetas = [eig.thetas[j] for j in subset]
            zetas = [eig.zetas[j] for j in subset]
            resids = [eig.residuals[j] for j in subset]
            label = "subset " + ",".join(str(j) for j in subset)

            poly = find_defining_poly(thetas, resids, ctx)
            if poly is None:
                failures.append(label + ": no certified integer defining polynomial")
                continue
            refined = certify_defining_poly(poly, thetas, resids, ctx)
            if refined is None:
                failures.append(label + ": defining polynomial certification failed")
                continue
            tup = AlgebraicTuple(tuple(refined[0]), poly)
            cert = is_pv_tuple(tup, ctx)
            if cert.status != "pv":
                failures.append(label + ": tuple not certified pv (%s)" % cert.status)
                continue
            theta_vals = [r.value for r in refined[0]]

            # reference pairing with maximal minimum modulus across the subset
            best_ref, best_score = None, mp.mpf(-1)
            for (i, vi, vec) in pair_vectors:
                score = min(abs(_pairing(vec, z)) for z in zetas)
                if score > best_score:
                    best_ref, best_score = (i, vi), score
            if best_score <= scale_tol:
                failures.append(label + ": every pairing vanishes on some eigenvector")
                continue
            ref_vec = next(v for (i, vi, v) in pair_vectors if (i, vi) == best_ref)
            zhat = [z / mp.conj(_pairing(ref_vec, z)) for z in zetas]

            # Vandermonde solve per (map, kernel element); all coefficients rational
            vand = mp.matrix(k, k)
            for r in range(k):
                for c in range(k):
                    vand[r, c] = theta_vals[r] ** c
            polys = {}
            ok = True
            for (i, vi, vec) in pair_vectors:
                rhs = mp.matrix([[_pairing(vec, z)] for z in zhat])
                coeffs = mp.lu_solve(vand, rhs)
                rat = []
                for c in range(k):
                    fr = _try_rational(coeffs[c, 0], denom_bound, scale_tol)
                    if fr is None:
                        ok = False
                        failures.append(label + ": map %d kernel %d coefficient %d "
                                        "not rational" % (i, vi, c))
                        break
                    rat.append(fr)
                if not ok:
                    break
                polys[(i, vi)] = tuple(rat)
            if not ok:
                continue
            xi_scale = 1
            for fr_tuple in polys.values():
                for fr in fr_tuple:
                    xi_scale = xi_scale * fr.denominator // gcd(xi_scale, fr.denominator)
            return ConditionTwoCertificate("holds", k, tup, tuple(zhat), polys,
                                           best_ref, tuple(failures), xi_scale)
        if force_k is not None and not failures:
            failures.append("no conjugation-closed eigenvalue subset of size %d "
                            "(conjugate pairs are inseparable)" % force_k)
        return ConditionTwoCertificate("fails", failures=tuple(failures))


def _repeated_eigenvalue_fallback(eig, pair_vectors, denom_bound, ctx, force_k):
    """Repeated real integer eigenvalue: search an eigenvector with rational
    pairings directly (exact when translations are rational)."""
    if force_k is not None and force_k != 1:
        return ConditionTwoCertificate("inconclusive",
                                       failures=("repeated eigenvalue with k != 1 forced",))
    lam = eig.thetas[0]
    if any(abs(t - lam) > mp.mpf(2) ** (-ctx.mantissa_bits // 3) for t in eig.thetas):
        return ConditionTwoCertificate(
            "inconclusive", failures=("mixed repeated eigenvalues are unsupported",))
    if abs(mp.im(lam)) > mp.mpf(2) ** (-ctx.mantissa_bits // 3):
        return ConditionTwoCertificate(
            "inconclusive", failures=("repeated nonreal eigenvalue",))
    nearest = mp.nint(mp.re(lam))
    if abs(mp.re(lam) - nearest) > mp.mpf(2) ** (-ctx.mantissa_bits // 3) or abs(nearest) < 2:
        return ConditionTwoCertificate(
            "inconclusive", failures=("repeated eigenvalue is not an integer of "
                                      "modulus at least 2",))
    theta_int = int(nearest)
    d = eig.zetas[0].rows
    scale_tol = mp.mpf(10) ** (-12)

    candidates = []
    for r in range(d):
        z = mp.matrix(d, 1)
        z[r, 0] = mp.mpc(1)
        candidates.append(z)
    candidates.extend(v for (_, _, v) in pair_vectors)
    failures = []
    for z in candidates:
        nz = linalg.vec_norm(z)
        if nz == 0:
            continue
        polys = {}
        ok = True
        for (i, vi, vec) in pair_vectors:
            fr = _try_rational(_pairing(vec, z), denom_bound,
                               scale_tol * max(1, float(nz)))
            if fr is None:
                ok = False
                break
            polys[(i, vi)] = (fr,)
        if ok:
            poly = IntPolynomial((-theta_int, 1))
            root = ComplexRoot(mp.mpc(theta_int), mp.mpf(0))
            tup = AlgebraicTuple((root,), poly)
            xi_scale = 1
            for fr_tuple in polys.values():
                xi_scale = xi_scale * fr_tuple[0].denominator // gcd(
                    xi_scale, fr_tuple[0].denominator)
            return ConditionTwoCertificate("holds", 1, tup, (z,), polys, None,
                                           tuple(failures), xi_scale)
        failures.append("candidate eigenvector with irrational pairings")
    return ConditionTwoCertificate("inconclusive", failures=tuple(failures) or
                                   ("no rational-pairing eigenvector found",))


def reverify_condition_two(cert1, cert2, translations, ctx=DEFAULT_CTX,
                           generator=None, tol=1e-10):
    """Independent re-check: recompute eigen data and confirm
    |<V a_i, zeta_j> - P_{i,V}(theta_j)| <= 10 tol for every triple."""
    if cert2.status != "holds":
        raise ContractError("re-verification needs a holding certificate")
    a = cert1.generator_A if generator is None else generator
    with ctx.workprec(32):
        trans = [t if isinstance(t, mp.matrix) else linalg.mpvector(t)
                 for t in translations]
        kernel = cert1.N_elements
        worst = mp.mpf(0)
        thetas = [t.value for t in cert2.thetas.thetas]
        for (i, vi), coeffs in cert2.polys.items():
            vec = kernel[vi] * trans[i]
            for theta, z in zip(thetas, cert2.zetas):
                val = _pairing(vec, z)
                pred = mp.mpc(0)
                for c in reversed(coeffs):
                    pred = pred * theta + mp.mpf(c.numerator) / c.denominator
                worst = max(worst, abs(val - pred))
        return worst <= 10 * mp.mpf(tol), worst


def find_commuting_power(elements, h, bound=512, kernel=None, tol=1e-9):
    """Smallest b <= bound making the first element's b-th power central
    enough: g_1^b = h^{b l_1}, g_1^b commutes with every g_j, g_l^b commutes
    with g_1, and h^b commutes with the kernel."""
    if not elements:
        raise ContractError("need at least one element")
    l1 = elements[0].t / h.t
    l1_int = int(mp.nint(l1))
    if abs(l1 - l1_int) > 1e-9:
        raise ContractError("psi values are not lattice multiples")
    g1, gl = elements[0], elements[-1]
    for b in range(1, bound + 1):
        g1b = GroupElement(b * g1.t, linalg.matrix_power(g1.U, b))
        hb = GroupElement(b * l1_int * h.t, linalg.matrix_power(h.U, b * l1_int))
        if d_op_distance(g1b, hb) > tol:
            continue
        if any(d_op_distance(g1b * gj, gj * g1b) > tol for gj in elements):
            continue
        glb = GroupElement(b * gl.t, linalg.matrix_power(gl.U, b))
        if d_op_distance(glb * g1, g1 * glb) > tol:
            continue
        if kernel is not None:
            hpow = linalg.matrix_power(h.U, b)
            bad = False
            for v in kernel:
                vm = v if isinstance(v, mp.matrix) else linalg.from_numpy(v)
                if linalg.operator_norm(hpow * vm - vm * hpow) > tol:
                    bad = True
                    break
            if bad:
                continue
        return b
    raise ResourceLimitError("no commuting power within bound %d; the kernel "
                             "certification is suspect" % bound)
