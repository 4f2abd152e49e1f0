"""Line-oriented IFS configuration files.

Format::

    # comment
    dimension 2
    weights 1/2 1/2          # optional, one entry per map

    map
    ratio 1/2                # rational p/q or decimal
    rotation 1 0 0 1         # row-major d*d entries, or:
    # angles 0.5             # planar rotation angles in units of pi
    translation 1 0

Rationals keep lattice detection exact; decimals are read at the active
precision context.  Numbers are emitted with enough digits to round-trip.
"""

from fractions import Fraction

import mpmath as mp

from . import linalg
from .algebra import DEFAULT_CTX
from .errors import ConfigError
from .ifs import IFS, ProbabilityVector, Similarity


def _parse_number(tok, line):
    try:
        if "/" in tok:
            fr = Fraction(tok)
            return mp.mpf(fr.numerator) / fr.denominator, fr
        return mp.mpf(tok), None
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("bad number %r (%s)" % (tok, exc), line)


def _rotation_from_angles(angles, d, line):
    if len(angles) != d // 2:
        raise ConfigError("expected %d rotation angles for dimension %d"
                          % (d // 2, d), line)
    blocks = [linalg.rotation_2d(a * mp.pi) for a in angles]
    if d % 2 == 1:
        blocks.append(mp.matrix([[1]]))
    return linalg.block_diag(blocks)


def parse_ifs_config(text, ctx=DEFAULT_CTX):
    """Parse a config file body; returns (IFS, weights or None).

    Raises ConfigError with a line number on malformed input.
    """
    with ctx.workprec():
        dimension = None
        weights = None
        weight_fracs = None
        maps = []
        current = None
        current_line = None

        def flush():
            if current is None:
                return
            missing = [k for k in ("ratio", "rotation", "translation")
                       if k not in current]
            if missing:
                raise ConfigError("map block is missing %s" % ", ".join(missing),
                                  current_line)
            try:
                maps.append(Similarity(current["ratio"], current["rotation"],
                                       current["translation"]))
            except Exception as exc:
                raise ConfigError(str(exc), current_line)

        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            key, args = parts[0], parts[1:]
            if key == "dimension":
                if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                    raise ConfigError("dimension must be a positive integer", lineno)
                dimension = int(args[0])
            elif key == "weights":
                parsed = [_parse_number(a, lineno) for a in args]
                weights = [v for v, _ in parsed]
                weight_fracs = [fr for _, fr in parsed]
            elif key == "map":
                flush()
                current = {}
                current_line = lineno
            elif key in ("ratio", "rotation", "translation", "angles"):
                if current is None:
                    raise ConfigError("%r outside a map block" % key, lineno)
                if dimension is None:
                    raise ConfigError("dimension must be declared before maps", lineno)
                vals = [_parse_number(a, lineno)[0] for a in args]
                if key == "ratio":
                    if len(vals) != 1:
                        raise ConfigError("ratio takes one value", lineno)
                    current["ratio"] = vals[0]
                elif key == "rotation":
                    if len(vals) != dimension * dimension:
                        raise ConfigError("rotation needs %d row-major entries"
                                          % (dimension * dimension), lineno)
                    current["rotation"] = [vals[i * dimension:(i + 1) * dimension]
                                           for i in range(dimension)]
                elif key == "angles":
                    current["rotation"] = _rotation_from_angles(vals, dimension, lineno)
                else:
                    if len(vals) != dimension:
                        raise ConfigError("translation needs %d entries" % dimension,
                                          lineno)
                    current["translation"] = vals
            else:
                raise ConfigError("unknown directive %r" % key, lineno)
        flush()
        if dimension is None or not maps:
            raise ConfigError("config needs a dimension and at least one map")
        system = IFS(dimension, tuple(maps))
        p = None
        if weights is not None:
            if len(weights) != len(maps):
                raise ConfigError("got %d weights for %d maps"
                                  % (len(weights), len(maps)))
            if all(fr is not None for fr in weight_fracs):
                p = ProbabilityVector(tuple(weight_fracs))
            else:
                p = ProbabilityVector(tuple(weights))
        return system, p


def _fmt(x, digits):
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator)
    return mp.nstr(mp.mpf(x), digits)


def emit_ifs_config(ifs, p=None, digits=None, header=""):
    """Config text that parses back to the same system (to the emitted
    digits)."""
    if digits is None:
        digits = max(30, mp.mp.prec // 3)
    lines = []
    if header:
        lines.extend("# " + h for h in header.splitlines())
    lines.append("dimension %d" % ifs.dimension)
    if p is not None:
        lines.append("weights " + " ".join(_fmt(w, digits) for w in p.weights))
    for m in ifs.maps:
        lines.append("")
        lines.append("map")
        lines.append("ratio " + _fmt(m.ratio, digits))
        flat = [m.rotation[i, j] for i in range(ifs.dimension)
                for j in range(ifs.dimension)]
        lines.append("rotation " + " ".join(_fmt(x, digits) for x in flat))
        lines.append("translation " + " ".join(
            _fmt(m.translation[i, 0], digits) for i in range(ifs.dimension)))
    return "\n".join(lines) + "\n"
