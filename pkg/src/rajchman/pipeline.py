"""Decision pipeline orchestration and report assembly.

The stages mirror the structure of the underlying characterization:
affine irreducibility, discreteness of the contraction group (lattice
psi-image plus finite rotation kernel), the cyclic factorization condition,
the eigenvector-rationality condition per candidate generator, and an
optional empirical witness run along the expanding frequency ladder.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import linalg
from .algebra import PrecisionContext
from .errors import ContractError, PrecisionError, ResourceLimitError
from .fourier import MuHatEvaluator, witness_sequence
from .group import (candidate_generators, check_condition_one,
                    check_condition_two, discreteness_report,
                    reverify_condition_two)
from .ifs import is_affinely_irreducible, normalize_first_map, uniform_weights


@dataclass
class RunConfig:
    """Knobs shared by the pipeline commands."""

    precision_bits: int = 256
    tol: float = 1e-9
    seed: int = 0
    out_dir: str = "."
    max_words: int = 10 ** 7
    max_closure: int = 10 ** 4
    denom_bound: int = 10 ** 6
    witness: bool = False
    witness_m: int = 4
    witness_n_max: int = 25
    witness_floor: float = 1e-4
    force_k: int = None
    plots: bool = True

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ContractError("precision must be at least 64 bits")
        for cap in (self.max_words, self.max_closure, self.denom_bound):
            if cap < 1:
                raise ContractError("caps must be positive")

    def ctx(self):
        return PrecisionContext(self.precision_bits)


@dataclass
class DecisionReport:
    """Verdict plus per-stage evidence and reproducibility provenance."""

    verdict: str           # non-rajchman-witnessed | conditions-hold |
                           # conditions-fail | inconclusive
    stages: list = field(default_factory=list)
    condition_one: object = None
    condition_two: dict = field(default_factory=dict)
    witness: object = None
    provenance: dict = field(default_factory=dict)

    def add_stage(self, name, **info):
        self.stages.append((name, info))

    @property
    def exit_code(self):
        return {"non-rajchman-witnessed": 0, "conditions-hold": 0,
                "conditions-fail": 0, "inconclusive": 2}[self.verdict]


DENSE_NOTE = ("log-contraction ratios admit no detected integer relation; "
              "irrationality is not certifiable numerically, but if the "
              "contraction group is genuinely non-cyclic then every positive "
              "weight vector yields a measure with vanishing Fourier tail, "
              "so this verdict is conditional, not a certificate")


def run_check(ifs, p, run):
    """The full decision pipeline; returns a DecisionReport."""
    ctx = run.ctx()
    report = DecisionReport("inconclusive")
    report.provenance = {
        "precision-bits": run.precision_bits,
        "tol": run.tol,
        "seed": run.seed,
        "max-words": run.max_words,
        "max-closure": run.max_closure,
        "denom-bound": run.denom_bound,
    }
    if p is None:
        p = uniform_weights(len(ifs.maps))

    irr = is_affinely_irreducible(ifs, ctx)
    report.add_stage("irreducibility", irreducible=irr.irreducible, rank=irr.rank,
                     dimension=irr.dimension, max_word_length=irr.max_word_length)
    if not irr.irreducible:
        report.add_stage("verdict-note", note=(
            "system is affinely reducible: its measures charge a proper "
            "affine subspace and trivially fail Fourier decay; the algebraic "
            "decision procedure assumes irreducibility"))
        report.verdict = "inconclusive"
        return report

    disc, kernel_data = discreteness_report(ifs, run.denom_bound,
                                            run.max_closure, run.tol, ctx)
    psi = disc.psi_image
    if psi.kind != "lattice":
        report.add_stage("discreteness", psi_image="dense-candidate")
        report.add_stage("verdict-note", note=DENSE_NOTE)
        report.verdict = "inconclusive"
        return report
    report.add_stage("discreteness", psi_image="lattice",
                     beta=mp.nstr(psi.beta, 20), exponents=psi.exponents,
                     kernel=disc.rotation_kernel.kind,
                     kernel_order=disc.rotation_kernel.order())
    if disc.rotation_kernel.kind != "finite":
        report.add_stage("verdict-note", note=(
            "rotation closure exceeded the configured cap; the kernel may be "
            "infinite (nondiscrete group), which is outside the certified path"))
        report.verdict = "inconclusive"
        return report

    cert1 = check_condition_one(ifs, disc, run.tol, ctx, kernel_data)
    report.condition_one = cert1
    report.add_stage("condition-one", holds=cert1.holds,
                     kernel_order=len(cert1.N_elements),
                     exponents=cert1.coset_exponents,
                     generator_choice=cert1.generator_choice,
                     residual=mp.nstr(cert1.residual, 5) if cert1.residual is not None else "n/a")
    if not cert1.holds:
        report.verdict = "conditions-fail"
        return report

    translations = [m.translation for m in ifs.maps]
    statuses = []
    for idx, gen in candidate_generators(cert1):
        cert2 = check_condition_two(cert1, translations, ctx, run.denom_bound,
                                    generator=gen, force_k=run.force_k)
        report.condition_two[idx] = cert2
        info = {"status": cert2.status, "k": cert2.k}
        if cert2.status == "holds":
            info["thetas"] = [mp.nstr(t.value, 16) for t in cert2.thetas.thetas]
            info["defining-poly"] = cert2.thetas.defining_poly.to_text()
            ok, worst = reverify_condition_two(cert1, cert2, translations, ctx,
                                               generator=gen, tol=run.tol)
            info["reverified"] = ok
            info["reverify-residual"] = mp.nstr(worst, 5)
        else:
            info["failures"] = "; ".join(cert2.failures)
        report.add_stage("condition-two generator-%d" % idx, **info)
        statuses.append(cert2.status)

    if any(s == "holds" for s in statuses):
        report.verdict = "conditions-hold"
    elif all(s == "fails" for s in statuses):
        report.verdict = "conditions-fail"
        return report
    else:
        report.verdict = "inconclusive"
        return report

    if run.witness:
        held = next(idx for idx, s in zip(report.condition_two, statuses)
                    if report.condition_two[idx].status == "holds")
        cert2 = report.condition_two[held]
        gen = dict(candidate_generators(cert1))[held]
        normalized = normalize_first_map(ifs, ctx)
        try:
            ws = witness_sequence(normalized, p, cert2, run.witness_m,
                                  run.witness_n_max, run.tol, cert1=cert1,
                                  generator=gen, ctx=ctx, max_nodes=run.max_words)
        except (PrecisionError, ResourceLimitError) as exc:
            report.add_stage("witness", error=str(exc))
            return report
        report.witness = ws
        floor = mp.mpf(run.witness_floor)
        certified_min = ws.min_certified_modulus()
        report.add_stage("witness", generator=held, m=run.witness_m,
                         n_max=run.witness_n_max,
                         base_xi=[mp.nstr(ws.base_xi[i, 0], 16)
                                  for i in range(ws.base_xi.rows)],
                         min_modulus=mp.nstr(ws.min_modulus(), 10),
                         certified_min=mp.nstr(certified_min, 10),
                         floor=mp.nstr(floor, 5))
        if certified_min > floor:
            report.verdict = "non-rajchman-witnessed"
    return report


def render_report(report):
    """Deterministic key-value text with matrix blocks."""
    lines = ["rajchman-report", "verdict %s" % report.verdict,
             "exit-code %d" % report.exit_code, ""]
    lines.append("[provenance]")
    for key in sorted(report.provenance):
        lines.append("%s %s" % (key, report.provenance[key]))
    lines.append("")
    for name, info in report.stages:
        lines.append("[stage %s]" % name)
        for key, value in info.items():
            if isinstance(value, (list, tuple)):
                value = " ".join(str(v) for v in value)
            lines.append("%s %s" % (key, value))
        lines.append("")
    if report.condition_one is not None and report.condition_one.holds:
        cert = report.condition_one
        lines.append("[certificate condition-one]")
        lines.append("beta %s" % mp.nstr(cert.beta, 20))
        lines.append("kernel-order %d" % len(cert.N_elements))
        lines.append("exponents " + " ".join(str(x) for x in cert.coset_exponents))
        lines.append("generator-A")
        lines.extend(_matrix_block(cert.generator_A))
        lines.append("")
    for idx, cert2 in report.condition_two.items():
        if cert2.status != "holds":
            continue
        lines.append("[certificate condition-two generator-%d]" % idx)
        lines.append("k %d" % cert2.k)
        lines.append("defining-poly %s" % cert2.thetas.defining_poly.to_text())
        for j, t in enumerate(cert2.thetas.thetas):
            lines.append("theta-%d %s %s" % (j, mp.nstr(mp.re(t.value), 20),
                                             mp.nstr(mp.im(t.value), 20)))
        for j, z in enumerate(cert2.zetas):
            lines.append("zeta-%d " % j + " ".join(
                "(%s %s)" % (mp.nstr(mp.re(z[i, 0]), 16), mp.nstr(mp.im(z[i, 0]), 16))
                for i in range(z.rows)))
        for (i, vi) in sorted(cert2.polys):
            coeffs = cert2.polys[(i, vi)]
            lines.append("poly map-%d kernel-%d " % (i, vi) +
                         " ".join(str(c) for c in coeffs))
        lines.append("xi-scale %d" % cert2.xi_scale)
        lines.append("")
    return "\n".join(lines)


def _matrix_block(m, digits=20):
    return ["  " + " ".join(mp.nstr(m[i, j], digits) for j in range(m.cols))
            for i in range(m.rows)]
