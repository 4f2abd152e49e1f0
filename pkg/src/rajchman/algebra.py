"""Exact integer polynomials, certified complex roots, and P.V. tuples.

The certification style throughout: approximate data is produced by floating
iteration at a working precision, then wrapped in a posteriori error radii
(Weierstrass disks for roots, propagated interval bounds for derived
quantities).  Every yes/no answer is backed by such a radius; when the radii
straddle a decision boundary the answer is "inconclusive", never a guess.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .errors import ContractError, PrecisionError


# ---------------------------------------------------------------------------
# precision plumbing


@dataclass(frozen=True)
class PrecisionContext:
    """Controls every extended-precision computation.

    mantissa_bits is the binary working precision; root_tolerance is the
    largest acceptable certified error radius for isolated roots.
    """

    mantissa_bits: int = 256
    root_tolerance: float = None

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ContractError("mantissa_bits must be at least 64")
        if self.root_tolerance is None:
            object.__setattr__(self, "root_tolerance",
                               mp.mpf(2) ** (-self.mantissa_bits // 2))
        elif not self.root_tolerance > 0:
            raise ContractError("root_tolerance must be positive")

    def workprec(self, extra=0):
        return mp.workprec(self.mantissa_bits + extra)


DEFAULT_CTX = PrecisionContext()


def mpf_fraction(x):
    """Exact dyadic Fraction of an mpf (mpf values are binary rationals)."""
    x = mp.mpf(x)
    if hasattr(x, "as_integer_ratio"):
        p, q = x.as_integer_ratio()
        return Fraction(int(p), int(q))
    sign, man, exp, _ = x._mpf_
    man = -int(man) if sign else int(man)
    exp = int(exp)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def rational_reconstruct(x, denom_bound, tol):
    """Best rational p/q with q <= denom_bound via continued fractions.

    Returns a Fraction when it matches x within tol, else None.
    """
    fr = mpf_fraction(x).limit_denominator(int(denom_bound))
    if abs(mp.mpf(fr.numerator) / fr.denominator - mp.mpf(x)) <= tol:
        return fr
    return None


# ---------------------------------------------------------------------------
# integer polynomials


@dataclass(frozen=True)
class IntPolynomial:
    """Monic-or-not integer polynomial, coefficients ascending by degree."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if not coeffs or coeffs[-1] == 0:
            raise ContractError("leading coefficient must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def monic(self):
        return self.coefficients[-1] == 1

    def __call__(self, x):
        acc = mp.mpmathify(0) * x if not isinstance(x, (int, Fraction)) else 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self):
        if self.degree == 0:
            raise ContractError("derivative of a constant is the zero polynomial")
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coefficients) if i > 0))

    def abs_coefficients(self):
        return IntPolynomial(tuple(abs(c) for c in self.coefficients))

    def reciprocal_flip(self):
        """X^n P(1/X) as an integer polynomial."""
        return IntPolynomial(tuple(reversed(self.coefficients)))

    def is_reciprocal(self):
        return self.coefficients == tuple(reversed(self.coefficients))

    def __mul__(self, other):
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def to_text(self):
        return " ".join(str(c) for c in self.coefficients)

    @classmethod
    def from_text(cls, text):
        parts = text.replace(",", " ").split()
        if not parts:
            raise ContractError("empty polynomial text")
        return cls(tuple(int(p) for p in parts))


def _frac_poly(p):
    return [Fraction(c) for c in p.coefficients]


def _frac_trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c if c else [Fraction(0)]


def _frac_is_zero(c):
    return len(c) == 1 and c[0] == 0


def _frac_monic(c):
    lead = c[-1]
    return [x / lead for x in c]


def _frac_sub(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _frac_trim([x - y for x, y in zip(a, b)])


def _frac_divmod(a, b):
    a = _frac_trim(a)
    b = _frac_trim(b)
    if _frac_is_zero(b):
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = a[:]
    while len(r) >= len(b) and not _frac_is_zero(r):
        shift = len(r) - len(b)
        factor = r[-1] / b[-1]
        q[shift] += factor
        for i, bc in enumerate(b):
            r[shift + i] -= factor * bc
        r = _frac_trim(r[:-1])
    return _frac_trim(q), r


def _frac_gcd(a, b):
    a, b = _frac_trim(a), _frac_trim(b)
    while not _frac_is_zero(b):
        _, r = _frac_divmod(a, b)
        a, b = b, r
    return _frac_monic(a)


def _frac_derivative(c):
    d = [i * x for i, x in enumerate(c)][1:]
    return _frac_trim(d) if d else [Fraction(0)]


def _frac_to_primitive_int_poly(c):
    """Scale a rational polynomial to primitive integer coefficients
    (same roots)."""
    from math import gcd, lcm
    denom = lcm(*[x.denominator for x in c]) if len(c) > 1 else c[0].denominator
    nums = [int(x * denom) for x in c]
    g = 0
    for x in nums:
        g = gcd(g, abs(x))
    g = g or 1
    if nums[-1] < 0:
        g = -g
    return IntPolynomial(tuple(x // g for x in nums))


def squarefree_decomposition(p):
    """Yun's algorithm over Q; returns [(factor, multiplicity)] with the
    factors primitive integer polynomials sharing p's roots."""
    if p.degree == 0:
        raise ContractError("degree must be at least 1")
    f = _frac_monic(_frac_poly(p))
    df = _frac_derivative(f)
    a0 = _frac_gcd(f, df)
    if len(a0) == 1:
        return [(p, 1)]
    factors = []
    b, _ = _frac_divmod(f, a0)
    c, _ = _frac_divmod(df, a0)
    d = _frac_sub(c, _frac_derivative(b))
    i = 1
    while len(b) > 1:
        a_i = _frac_gcd(b, d)
        if len(a_i) > 1:
            factors.append((_frac_to_primitive_int_poly(a_i), i))
        b, _ = _frac_divmod(b, a_i)
        c, _ = _frac_divmod(d, a_i)
        d = _frac_sub(c, _frac_derivative(b))
        i += 1
    return factors


# ---------------------------------------------------------------------------
# certified roots


@dataclass(frozen=True)
class ComplexRoot:
    """Approximate root with a certified radius to a true root."""

    value: object
    error_radius: object

    def interval_modulus(self):
        # eps covers the rounding of abs() at the ambient precision
        m = abs(self.value)
        eps = m * mp.mpf(2) ** (3 - mp.mp.prec)
        lo = m - self.error_radius - eps
        if lo < 0:
            lo = mp.mpf(0)
        return lo, m + self.error_radius + eps

    def certified_outside_unit(self):
        return self.interval_modulus()[0] > 1

    def certified_inside_unit(self):
        return self.interval_modulus()[1] < 1


def nearest_int_dist(x):
    """Distance from x to the nearest integer, via exact floor of the mpf."""
    x = mp.mpf(x)
    frac = x - mp.floor(x)
    return min(frac, 1 - frac)


def _weierstrass_radii(coeffs_desc, roots):
    """Certified per-root disks: each disk |z - z_i| <= n*|w_i| (w_i the
    Weierstrass correction) contains a true root, and pairwise-disjoint disks
    isolate them."""
    n = len(roots)
    lead = coeffs_desc[0]
    maxc = max(abs(c) for c in coeffs_desc)
    radii = []
    for i, z in enumerate(roots):
        num = mp.polyval(coeffs_desc, z)
        # floor for the floating evaluation error of polyval itself
        eval_eps = (n + 1) * maxc * max(mp.mpf(1), abs(z)) ** n * mp.mpf(2) ** (4 - mp.mp.prec)
        den = lead
        for j, zj in enumerate(roots):
            if j != i:
                den *= z - zj
        if den == 0:
            return None
        radii.append(n * (abs(num) + eval_eps) / abs(den))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= radii[i] + radii[j]:
                return None
    return radii


def _conjugation_symmetrize(roots, radii):
    """Pair each disk with the disk holding the conjugate root; snap
    self-paired roots to the real axis. Keeps radii valid."""
    n = len(roots)
    paired = [None] * n
    for i in range(n):
        zc = mp.conj(roots[i])
        j = min(range(n), key=lambda k: abs(zc - roots[k]))
        if abs(zc - roots[j]) > radii[i] + radii[j]:
            return None
        paired[i] = j
    out_roots = list(roots)
    done = set()
    for i in range(n):
        if i in done:
            continue
        j = paired[i]
        if j == i:
            out_roots[i] = mp.mpc(mp.re(roots[i]), 0)
        else:
            rep = roots[i] if mp.im(roots[i]) > 0 else roots[j]
            hi, lo = (i, j) if mp.im(roots[i]) > 0 else (j, i)
            out_roots[hi] = rep
            out_roots[lo] = mp.conj(rep)
            r = max(radii[i], radii[j])
            radii[i] = radii[j] = r
            done.add(j)
        done.add(i)
    return out_roots, radii


def _roots_squarefree(p, ctx):
    n = p.degree
    if n == 1:
        c0, c1 = p.coefficients
        fr = Fraction(-c0, c1)
        with mp.workprec(ctx.mantissa_bits):
            val = mp.mpc(mp.mpf(fr.numerator) / fr.denominator)
            exact = fr.denominator & (fr.denominator - 1) == 0
            rad = mp.mpf(0) if exact else abs(val) * mp.mpf(2) ** (2 - ctx.mantissa_bits)
        return [ComplexRoot(val, rad)]
    for extra in (64, 128, 256, 512):
        with mp.workprec(ctx.mantissa_bits + extra):
            desc = [mp.mpf(c) for c in reversed(p.coefficients)]
            try:
                approx = mp.polyroots(desc, maxsteps=400, extraprec=extra)
            except Exception:
                continue
            roots = [mp.mpc(r) for r in approx]
            radii = _weierstrass_radii(desc, roots)
            if radii is None:
                continue
            sym = _conjugation_symmetrize(roots, radii)
            if sym is None:
                continue
            roots, radii = sym
            if max(radii) <= ctx.root_tolerance:
                with mp.workprec(ctx.mantissa_bits):
                    # rounding values to ctx precision widens the disks
                    ulp = mp.mpf(2) ** (2 - ctx.mantissa_bits)
                    return [ComplexRoot(+z, +r + abs(z) * ulp)
                            for z, r in zip(roots, radii)]
    raise PrecisionError("root isolation did not converge; increase mantissa_bits",
                         required_bits=2 * ctx.mantissa_bits)


def poly_roots(p, ctx=DEFAULT_CTX):
    """All complex roots of an integer polynomial with certified radii.

    The returned multiset (repeated per multiplicity) is closed under complex
    conjugation, and the product of (X - root) reconstructs the monic part of
    p within the certified bounds.
    """
    if p.degree < 1:
        raise ContractError("degree must be at least 1")
    out = []
    for factor, mult in squarefree_decomposition(p):
        for root in _roots_squarefree(factor, ctx):
            out.extend([root] * mult)
    out.sort(key=lambda r: (mp.re(r.value), mp.im(r.value)))
    return out


# ---------------------------------------------------------------------------
# P.V. tuples


@dataclass(frozen=True)
class AlgebraicTuple:
    """Distinct certified roots of one defining integer polynomial."""

    thetas: tuple
    defining_poly: IntPolynomial

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(self.thetas))
        if not self.thetas:
            raise ContractError("tuple must be nonempty")

    def check_invariants(self, ctx=DEFAULT_CTX):
        """Returns a list of violated-invariant descriptions (empty if clean)."""
        issues = []
        with ctx.workprec(32):
            for i, a in enumerate(self.thetas):
                for b in self.thetas[i + 1:]:
                    if abs(a.value - b.value) <= a.error_radius + b.error_radius:
                        issues.append("tuple elements not distinct beyond radii")
                residual = abs(self.defining_poly(a.value))
                dbound = self.defining_poly.abs_coefficients().derivative()(
                    abs(a.value) + a.error_radius)
                slack = mp.mpf(2) ** (-ctx.mantissa_bits // 4)
                if residual > a.error_radius * dbound + slack:
                    issues.append("defining polynomial residual exceeds certified bound")
                conj = mp.conj(a.value)
                if not any(abs(conj - b.value) <= a.error_radius + b.error_radius + slack
                           for b in self.thetas):
                    issues.append("tuple not closed under conjugation")
        return issues


@dataclass(frozen=True)
class PVCertificate:
    status: str                     # "pv" | "not_pv" | "inconclusive"
    inside_margin: object
    witness_poly: IntPolynomial
    excluded_roots: tuple = ()


@dataclass(frozen=True)
class DecayBound:
    """Constants (C, delta) with nearest_int_dist(sum Q(theta) theta^n) <= C delta^n.

    Degenerate tuples exhausting all roots report C = 0, delta = 0 (the sums
    are then exactly integer).
    """

    C: object
    delta: object


def match_roots(thetas, roots, slack):
    """Injective matching of tuple elements onto certified roots within
    combined radii (+ slack). Returns (indices, excluded) or None."""
    used = set()
    idx = []
    for t in thetas:
        best, best_d = None, None
        for j, r in enumerate(roots):
            if j in used:
                continue
            d = abs(t.value - r.value)
            if d <= t.error_radius + r.error_radius + slack and (best is None or d < best_d):
                best, best_d = j, d
        if best is None:
            return None
        used.add(best)
        idx.append(best)
    excluded = [roots[j] for j in range(len(roots)) if j not in used]
    return idx, excluded


def is_pv_tuple(tup, ctx=DEFAULT_CTX):
    """Decide the P.V. property: every tuple element certified outside the
    unit circle, every other root of the defining polynomial certified
    inside. Modulus comparisons straddling 1 yield "inconclusive"."""
    if not tup.defining_poly.monic():
        raise ContractError("algebraic integers required: defining polynomial must be monic")
    with ctx.workprec():
        roots = poly_roots(tup.defining_poly, ctx)
        slack = mp.mpf(2) ** (-ctx.mantissa_bits // 4)
        matched = match_roots(tup.thetas, roots, slack)
        if matched is None:
            raise ContractError("tuple element is not a root of the defining polynomial")
        idx, excluded = matched
        tuple_roots = [roots[j] for j in idx]

        status = "pv"
        for r in tuple_roots:
            if r.certified_inside_unit():
                status = "not_pv"
            elif not r.certified_outside_unit():
                status = "inconclusive" if status == "pv" else status
        for r in excluded:
            if r.certified_outside_unit():
                status = "not_pv"
            elif not r.certified_inside_unit():
                status = "inconclusive" if status == "pv" else status

        if excluded:
            margin = 1 - max(r.interval_modulus()[1] for r in excluded)
        else:
            margin = mp.mpf(1)
        return PVCertificate(status, margin, tup.defining_poly, tuple(excluded))


def power_sums(p, n_max):
    """s_n = sum over all roots of theta^n, exactly, via Newton's identities."""
    if not p.monic():
        raise ContractError("power sums require a monic polynomial")
    n = p.degree
    c = p.coefficients
    e = [0] * (n + 1)
    for k in range(1, n + 1):
        e[k] = (-1) ** k * c[n - k]
    s = [n]
    for k in range(1, n_max + 1):
        acc = 0
        for i in range(1, min(k, n) + 1):
            if i == k:
                acc += (-1) ** (k - 1) * k * e[k]
            else:
                acc += (-1) ** (i - 1) * e[i] * s[k - i]
        s.append(acc)
    return s


def decay_bound(tup, q, ctx=DEFAULT_CTX):
    """Certified (C, delta) for the nearest-integer decay of
    sum_j q(theta_j) theta_j^n over a P.V. tuple."""
    cert = is_pv_tuple(tup, ctx)
    if cert.status != "pv":
        raise ContractError("decay_bound requires a tuple certified pv (got %s)" % cert.status)
    with ctx.workprec():
        if not cert.excluded_roots:
            return DecayBound(mp.mpf(0), mp.mpf(0))
        delta = max(r.interval_modulus()[1] for r in cert.excluded_roots)
        qabs = q.abs_coefficients()
        total = mp.mpf(0)
        for r in cert.excluded_roots:
            bound = abs(q(r.value))
            if q.degree > 0:
                bound += r.error_radius * qabs.derivative()(abs(r.value) + r.error_radius)
            total += bound
        return DecayBound(total, delta)


# ---------------------------------------------------------------------------
# Salem-product tuples


def _expand_linear_factors(values, radii):
    """Expand prod (X - v_k) tracking a per-coefficient error bound."""
    eps = mp.mpf(2) ** (-mp.mp.prec + 8)
    coeffs = [mp.mpc(1)]
    bounds = [mp.mpf(0)]
    for v, rad in zip(values, radii):
        nc = [mp.mpc(0)] * (len(coeffs) + 1)
        nb = [mp.mpf(0)] * (len(coeffs) + 1)
        for k, (a, b) in enumerate(zip(coeffs, bounds)):
            nc[k + 1] += a
            nb[k + 1] += b
            nc[k] -= v * a
            nb[k] += abs(v) * b + rad * abs(a) + rad * b + eps * (abs(v) * abs(a) + 1)
        coeffs, bounds = nc, nb
    return coeffs, bounds


def pv_tuple_from_salem_products(p_salem, ctx=DEFAULT_CTX):
    """P.V. tuple of Salem-root products.

    For a Salem polynomial of degree 2m with Salem root z_1 and upper-circle
    roots z_2..z_m, the products prod_{j in J} z_j * prod_{j not in J} z_j^-1
    over subsets J containing 1 form a P.V. 2^{m-1}-tuple; the defining
    polynomial is the integer polynomial whose roots are the products over
    all 2^m subsets, recovered by certified rounding of its coefficients.
    """
    if not p_salem.monic():
        raise ContractError("Salem polynomial must be monic")
    if p_salem.degree < 4 or p_salem.degree % 2 != 0:
        raise ContractError("Salem polynomial must have even degree at least 4")
    if not p_salem.is_reciprocal():
        raise ContractError("Salem polynomial must be reciprocal")
    with ctx.workprec(64):
        roots = poly_roots(p_salem, ctx)
        outside = [r for r in roots if r.certified_outside_unit()]
        inside = [r for r in roots if r.certified_inside_unit()]
        if len(outside) != 1 or len(inside) != 1:
            raise ContractError("not a Salem polynomial: expected exactly one root "
                                "outside and one inside the unit circle")
        salem = outside[0]
        if abs(mp.im(salem.value)) > salem.error_radius or mp.re(salem.value) <= 1:
            raise ContractError("Salem root must be real and greater than 1")
        uppers = [r for r in roots
                  if r not in outside and r not in inside and mp.im(r.value) > r.error_radius]
        m = p_salem.degree // 2
        if len(uppers) != m - 1:
            raise ContractError("not a Salem polynomial: expected %d upper-circle roots, "
                                "found %d" % (m - 1, len(uppers)))

        base = [salem] + uppers
        rel = [r.error_radius / (abs(r.value) - r.error_radius) for r in base]
        products, prod_radii, selected = [], [], []
        for mask in range(2 ** m):
            val = mp.mpc(1)
            relsum = mp.mpf(0)
            for j in range(m):
                z = base[j].value
                val *= z if (mask >> j) & 1 else 1 / z
                relsum += 2 * rel[j]
            products.append(val)
            prod_radii.append(abs(val) * relsum)
            if mask & 1:
                selected.append(len(products) - 1)

        coeffs, bounds = _expand_linear_factors(products, prod_radii)
        int_coeffs = []
        for a, b in zip(coeffs, bounds):
            if abs(mp.im(a)) > b:
                raise PrecisionError("nonreal symmetric-function coefficient; increase precision")
            nearest = mp.nint(mp.re(a))
            if abs(mp.re(a) - nearest) + b >= mp.mpf("0.5"):
                raise PrecisionError("coefficient rounding residual not certified below 1/2; "
                                     "increase precision")
            int_coeffs.append(int(nearest))
        defining = IntPolynomial(tuple(int_coeffs))

        certified = poly_roots(defining, ctx)
        slack = mp.mpf(2) ** (-ctx.mantissa_bits // 4)
        approx = [ComplexRoot(products[i], prod_radii[i]) for i in selected]
        matched = match_roots(approx, certified, slack)
        if matched is None:
            raise PrecisionError("product values did not match the rounded polynomial's "
                                 "roots; increase precision")
        idx, _ = matched
        thetas = tuple(certified[j] for j in idx)
        return AlgebraicTuple(thetas, defining)


# ---------------------------------------------------------------------------
# integer defining polynomials from power-sum tails


def berlekamp_massey(seq):
    """Minimal linear recurrence of seq over Q.

    Returns connection coefficients c with seq[n] = sum_{i=1..L} c[i]*seq[n-i]
    (c[0] == 1), or None when no recurrence shorter than the window exists.
    """
    s = [Fraction(x) for x in seq]
    c = [Fraction(1)]
    b = [Fraction(1)]
    L, m, bb = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n]
        for i in range(1, L + 1):
            d += c[i] * s[n - i]
        if d == 0:
            m += 1
        elif 2 * L <= n:
            t = c[:]
            coef = d / bb
            c = c + [Fraction(0)] * (len(b) + m - len(c))
            for j in range(len(b)):
                c[j + m] -= coef * b[j]
            L, b, bb, m = n + 1 - L, t, d, 1
        else:
            coef = d / bb
            c = c + [Fraction(0)] * max(0, len(b) + m - len(c))
            for j in range(len(b)):
                c[j + m] -= coef * b[j]
            m += 1
    if 2 * L > len(s) - 2:
        return None
    return [-x for x in c[1:L + 1]]


def certify_defining_poly(candidate, thetas, radii, ctx):
    """Check that each theta matches a distinct certified root of candidate.

    Returns (matched ComplexRoots in theta order, excluded roots) or None.
    """
    try:
        roots = poly_roots(candidate, ctx)
    except PrecisionError:
        return None
    slack = mp.mpf(2) ** (-ctx.mantissa_bits // 3)
    approx = [ComplexRoot(t, r) for t, r in zip(thetas, radii)]
    matched = match_roots(approx, roots, slack)
    if matched is None:
        return None
    idx, excluded = matched
    return [roots[j] for j in idx], excluded


def find_defining_poly(thetas, radii, ctx=DEFAULT_CTX, max_degree=32):
    """Monic integer polynomial vanishing on a conjugation-closed collection
    of approximate algebraic integers, or None.

    Tries direct rounding of prod (X - theta) first; otherwise rounds the
    power-sum tail to integers and recovers the minimal recurrence (valid
    whenever the collection extends to a P.V.-style tuple, since then the
    excluded-root contribution to the power sums decays below 1/2).
    Candidates are always certified against fresh isolated roots before
    being returned.
    """
    with ctx.workprec(64):
        coeffs, bounds = _expand_linear_factors(list(thetas),
                                                [mp.mpf(r) for r in radii])
        direct = []
        for a, b in zip(coeffs, bounds):
            if abs(mp.im(a)) > b + mp.mpf(2) ** (-ctx.mantissa_bits // 3):
                direct = None
                break
            nearest = mp.nint(mp.re(a))
            if abs(mp.re(a) - nearest) + b >= mp.mpf("0.25"):
                direct = None
                break
            direct.append(int(nearest))
        if direct is not None:
            cand = IntPolynomial(tuple(direct))
            cert = certify_defining_poly(cand, thetas, radii, ctx)
            if cert is not None:
                return cand

        seen = set()
        best = None
        window = 2 * max_degree + 12
        top = 48 + window
        powers = []
        acc = [mp.mpc(1)] * len(thetas)
        for _ in range(top + 1):
            powers.append(mp.fsum(acc))
            acc = [a * t for a, t in zip(acc, thetas)]
        for n0 in (0, 4, 8, 16, 28, 48):
            tail = powers[n0:n0 + window]
            ints = []
            ok = True
            for s in tail:
                if abs(mp.im(s)) > mp.mpf("0.25"):
                    ok = False
                    break
                ints.append(int(mp.nint(mp.re(s))))
            if not ok:
                continue
            rec = berlekamp_massey(ints)
            if rec is None or not rec or len(rec) > max_degree:
                continue
            if any(x.denominator != 1 for x in rec):
                continue
            cand_coeffs = tuple(int(-rec[len(rec) - 1 - i]) for i in range(len(rec))) + (1,)
            if cand_coeffs in seen:
                continue
            seen.add(cand_coeffs)
            try:
                cand = IntPolynomial(cand_coeffs)
            except ContractError:
                continue
            if best is not None and cand.degree >= best.degree:
                continue
            if certify_defining_poly(cand, thetas, radii, ctx) is not None:
                best = cand
        return best


def algebraic_tuple_from_poly(p, ctx=DEFAULT_CTX, select="outside"):
    """Build an AlgebraicTuple from selected roots of p.

    select: "outside" keeps roots certified outside the unit circle;
    a list of 0-based indices (into the deterministic root order) keeps those.
    """
    roots = poly_roots(p, ctx)
    if select == "outside":
        chosen = [r for r in roots if r.certified_outside_unit()]
    else:
        chosen = [roots[i] for i in select]
    if not chosen:
        raise ContractError("no roots selected")
    return AlgebraicTuple(tuple(chosen), p)
