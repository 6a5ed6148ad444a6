"""Configuration ingestion, analysis orchestration and report/CSV emission.

Configs are single-file TOML trees (line-oriented, diff-friendly); reports
are JSON with a stable key order and 12-significant-digit float formatting,
so identical configs produce byte-identical reports.  Exit codes: 0 when the
analysis ran (whatever the verdict), 2 for an invalid config, 3 for I/O
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__, fourier, moran, residue, spectrum
from .moran import (
    ConsecutiveFamily,
    EmptyTail,
    MoranSequence,
    PeriodicTail,
    SequenceError,
    ShiftedTopFamily,
    parse_formula,
)
from .residue import DigitSet, NotCRS


class ParseError(ValueError):
    def __init__(self, line: Optional[int], reason: str):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{reason}")


class ValidationError(ValueError):
    def __init__(self, field_name: str, reason: str):
        self.field = field_name
        self.reason = reason
        super().__init__(f"{field_name}: {reason}")


_ANALYSIS_KEYS = ("udz", "rbc", "pcc", "admissible", "verdict", "qsum", "decompose")
_TAIL_KINDS = ("empty", "periodic", "consecutive", "shifted_top")


@dataclass(frozen=True)
class AnalysisConfig:
    """Validated analysis job: sequence description, toggles, numeric knobs."""

    label: str = ""
    prefix: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    tail_kind: str = "empty"
    tail_period: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    tail_M: Optional[str] = None
    tail_N: Optional[str] = None
    tail_n: Optional[str] = None
    analysis: Tuple[Tuple[str, bool], ...] = tuple((k, True) for k in _ANALYSIS_KEYS)
    depth: int = 12
    spectrum_depth: int = 4
    samples: int = 64
    window: float = 1.0

    def enabled(self, key: str) -> bool:
        return dict(self.analysis).get(key, True)


def _pair_list(raw, field_name: str) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    if not isinstance(raw, list):
        raise ValidationError(field_name, "expected a list of [N, [digits...]] pairs")
    out = []
    for i, item in enumerate(raw):
        ok = (
            isinstance(item, list) and len(item) == 2
            and isinstance(item[0], int) and isinstance(item[1], list)
            and all(isinstance(b, int) for b in item[1])
        )
        if not ok:
            raise ValidationError(f"{field_name}[{i}]", "expected [N, [digits...]]")
        out.append((item[0], tuple(item[1])))
    return tuple(out)


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a TOML config; raises ParseError / ValidationError."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        msg = str(e)
        line = None
        if "line " in msg:
            try:
                line = int(msg.split("line ")[1].split(",")[0].split(")")[0])
            except (ValueError, IndexError):
                line = None
        raise ParseError(line, msg) from None

    label = data.get("label", "")
    if not isinstance(label, str):
        raise ValidationError("label", "must be a string")
    prefix = _pair_list(data.get("prefix", []), "prefix")

    tail = data.get("tail", {})
    if not isinstance(tail, dict):
        raise ValidationError("tail", "expected a table")
    kind = tail.get("kind", "empty")
    if kind not in _TAIL_KINDS:
        raise ValidationError("tail.kind", f"must be one of {', '.join(_TAIL_KINDS)}")
    period = _pair_list(tail.get("period", []), "tail.period")
    if kind == "periodic" and not period:
        raise ValidationError("tail.period", "periodic tail needs at least one pair")

    def formula_text(key: str, required: bool) -> Optional[str]:
        raw = tail.get(key)
        if raw is None:
            if required:
                raise ValidationError(f"tail.{key}", f"{kind} tail needs a formula")
            return None
        if not isinstance(raw, str):
            raise ValidationError(f"tail.{key}", "formula must be a string")
        try:
            return parse_formula(raw).text()
        except ValueError as e:
            raise ValidationError(f"tail.{key}", str(e)) from None

    family = kind in ("consecutive", "shifted_top")
    tail_M = formula_text("M", required=family) if family else None
    tail_N = formula_text("N", required=family) if family else None
    tail_n = formula_text("n", required=False) if kind == "shifted_top" else None

    analysis_raw = data.get("analysis", {})
    if not isinstance(analysis_raw, dict):
        raise ValidationError("analysis", "expected a table of booleans")
    for k, v in analysis_raw.items():
        if k not in _ANALYSIS_KEYS:
            raise ValidationError(f"analysis.{k}", "unknown toggle")
        if not isinstance(v, bool):
            raise ValidationError(f"analysis.{k}", "must be true or false")
    analysis = tuple((k, bool(analysis_raw.get(k, True))) for k in _ANALYSIS_KEYS)

    numeric = data.get("numeric", {})
    if not isinstance(numeric, dict):
        raise ValidationError("numeric", "expected a table")

    def knob(key: str, default, kindf, positive=True):
        raw = numeric.get(key, default)
        try:
            val = kindf(raw)
        except (TypeError, ValueError):
            raise ValidationError(f"numeric.{key}", "bad value") from None
        if positive and val <= 0:
            raise ValidationError(f"numeric.{key}", "must be positive")
        return val

    cfg = AnalysisConfig(
        label=label,
        prefix=prefix,
        tail_kind=kind,
        tail_period=period,
        tail_M=tail_M,
        tail_N=tail_N,
        tail_n=tail_n,
        analysis=analysis,
        depth=knob("depth", 12, int),
        spectrum_depth=knob("spectrum_depth", 4, int),
        samples=knob("samples", 64, int),
        window=knob("window", 1.0, float),
    )
    build_sequence(cfg)  # surface digit-set and scale problems at parse time
    return cfg


def build_sequence(cfg: AnalysisConfig) -> MoranSequence:
    """Construct the sequence a config describes (ValidationError on problems)."""
    try:
        if cfg.tail_kind == "empty":
            if not cfg.prefix:
                raise ValidationError("prefix", "an empty tail needs at least one pair")
            tail = EmptyTail()
        elif cfg.tail_kind == "periodic":
            tail = PeriodicTail(tuple((N, DigitSet.of(bs)) for N, bs in cfg.tail_period))
        elif cfg.tail_kind == "consecutive":
            tail = ConsecutiveFamily(parse_formula(cfg.tail_M), parse_formula(cfg.tail_N))
        else:
            top = parse_formula(cfg.tail_n) if cfg.tail_n is not None else None
            tail = ShiftedTopFamily(parse_formula(cfg.tail_M), parse_formula(cfg.tail_N), top)
        return MoranSequence.of(cfg.prefix, tail)
    except (NotCRS, SequenceError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError("sequence", str(e)) from None


def serialize_config(cfg: AnalysisConfig) -> str:
    """Canonical TOML text; parse_config(serialize_config(c)) == c."""
    out = io.StringIO()
    if cfg.label:
        out.write(f'label = "{cfg.label}"\n')
    out.write("prefix = " + _pairs_toml(cfg.prefix) + "\n\n")
    out.write("[tail]\n")
    out.write(f'kind = "{cfg.tail_kind}"\n')
    if cfg.tail_kind == "periodic":
        out.write("period = " + _pairs_toml(cfg.tail_period) + "\n")
    for key, val in (("M", cfg.tail_M), ("N", cfg.tail_N), ("n", cfg.tail_n)):
        if val is not None:
            out.write(f'{key} = "{val}"\n')
    out.write("\n[analysis]\n")
    for key, val in cfg.analysis:
        out.write(f"{key} = {'true' if val else 'false'}\n")
    out.write("\n[numeric]\n")
    out.write(f"depth = {cfg.depth}\n")
    out.write(f"spectrum_depth = {cfg.spectrum_depth}\n")
    out.write(f"samples = {cfg.samples}\n")
    out.write(f"window = {_g12(cfg.window)}\n")
    return out.getvalue()


def _pairs_toml(pairs) -> str:
    return "[" + ", ".join(f"[{N}, [{', '.join(str(b) for b in bs)}]]" for N, bs in pairs) + "]"


def _g12(x: float) -> str:
    s = f"{float(x):.12g}"
    return s if any(c in s for c in ".einf") else s + ".0"


def _f12(x) -> float:
    return float(f"{float(x):.12g}")


def _frac_str(q) -> str:
    return str(Fraction(q))


# --------------------------------------------------------------------------
# report assembly
# --------------------------------------------------------------------------

_LEVEL_DISPLAY_CAP = 8
_DIGITS_DISPLAY_CAP = 40


def _digits_json(B: DigitSet):
    if B.size <= _DIGITS_DISPLAY_CAP:
        return list(B.elements)
    return {
        "count": B.size,
        "first": list(B.elements[:6]),
        "top": B.elements[-1],
    }


def _level_udz(seq: MoranSequence, k: int):
    B = moran.normalized_digits(seq, k)
    shape, n = moran._shape_of(B)
    if shape == "consecutive":
        return True, None
    if shape == "shifted_top":
        if moran._udz_structural_shifted_top(B.size, n):
            return True, None
    if B.elements[-1] - B.elements[0] > moran._EXACT_UDZ_DEGREE_CAP:
        return None, None
    ok, witness = residue.satisfies_udz(B)
    return ok, witness


def _level_hadamard(N: int, B: DigitSet, search_cap: int = 512):
    if residue.is_complete_residue_system(B) and N % B.size == 0:
        return list(moran.structural_hadamard_L(N, B.size))
    if N <= search_cap:
        t = moran.find_hadamard_L(N, B)
        return list(t.L) if t is not None else None
    return None


def _effective_depth(seq: MoranSequence, requested: int) -> int:
    length = moran.sequence_length(seq)
    return requested if length is None else min(requested, length)


def _spectrum_for(seq: MoranSequence, cfg: AnalysisConfig):
    """Canonical spectrum truncation, falling back to best-effort frequency
    sets when some level has no full one.  Returns (truncation, full?)."""
    depth = _effective_depth(seq, cfg.spectrum_depth)
    triples = spectrum.level_triples(seq, depth)
    if triples is not None:
        return spectrum.canonical_spectrum(triples, depth), True
    fake = []
    for k in range(1, depth + 1):
        N, B = moran.materialize(seq, k)
        if N > 512:
            return None, False
        L = moran.largest_orthogonal_frequencies(N, B)
        fake.append((N, L))
    values = [Fraction(0)]
    weight = Fraction(1)
    for N, L in fake:
        values = [v + weight * l for v in values for l in L]
        weight *= N
    elems = sorted(set(values))
    return spectrum.SpectrumTruncation(tuple(elems), depth, "canonical"), False


def run_analysis(cfg: AnalysisConfig) -> Dict:
    """Execute the enabled analyses in dependency order.

    Structural facts always come first and are never suppressed by numeric
    failures; those surface as per-section error strings instead.
    """
    seq = build_sequence(cfg)
    errors: Dict[str, str] = {}

    report: Dict = {
        "schema_version": 1,
        "tool": {"name": "moranspec", "version": __version__},
        "label": cfg.label,
        "config": json.loads(json.dumps({
            "prefix": [[N, list(bs)] for N, bs in cfg.prefix],
            "tail": {
                "kind": cfg.tail_kind,
                **({"period": [[N, list(bs)] for N, bs in cfg.tail_period]}
                   if cfg.tail_kind == "periodic" else {}),
                **({"M": cfg.tail_M} if cfg.tail_M else {}),
                **({"N": cfg.tail_N} if cfg.tail_N else {}),
                **({"n": cfg.tail_n} if cfg.tail_n else {}),
            },
            "analysis": {k: v for k, v in cfg.analysis},
            "numeric": {
                "depth": cfg.depth,
                "spectrum_depth": cfg.spectrum_depth,
                "samples": cfg.samples,
                "window": _f12(cfg.window),
            },
        })),
    }

    # ---- structural facts ----
    levels = []
    shown = min(cfg.depth, _LEVEL_DISPLAY_CAP)
    for k in range(1, shown + 1):
        try:
            N, B = moran.materialize(seq, k)
        except moran.OutOfRange:
            break
        entry = {
            "k": k,
            "N": N,
            "modulus": B.size,
            "digits": _digits_json(B),
            "crs": residue.is_complete_residue_system(B),
            "divides": N % B.size == 0,
        }
        if cfg.enabled("udz"):
            try:
                ok, witness = _level_udz(seq, k)
                entry["udz"] = ok
                entry["udz_witness"] = _frac_str(witness) if witness is not None else None
            except Exception as e:  # noqa: BLE001 - recorded, never fatal
                errors[f"udz[k={k}]"] = str(e)
        if cfg.enabled("admissible"):
            try:
                L = _level_hadamard(N, B)
                entry["hadamard_L"] = L
            except Exception as e:  # noqa: BLE001
                errors[f"admissible[k={k}]"] = str(e)
        levels.append(entry)
    report["sequence"] = {
        "digit_scale": seq.digit_scale,
        "length": moran.sequence_length(seq),
        "levels": levels,
    }

    # ---- conditions ----
    conditions: Dict = {}
    if cfg.enabled("rbc"):
        try:
            rbc = moran.check_rbc(seq, horizon=cfg.depth)
            conditions["rbc"] = {
                "status": rbc.status,
                "partial_sum": _frac_str(rbc.partial_sum),
                "partial_sum_float": _f12(rbc.partial_sum),
                "certificate": rbc.certificate,
            }
        except Exception as e:  # noqa: BLE001
            errors["rbc"] = str(e)
    if cfg.enabled("pcc"):
        try:
            pcc = moran.check_pcc(seq, Fraction(1, 2), horizon=cfg.depth)
            conditions["pcc"] = {
                "l": "1/2",
                "status": pcc.status,
                "rule": pcc.rule,
                "constant": _frac_str(pcc.constant) if pcc.constant is not None else None,
                "detail": pcc.detail,
            }
        except Exception as e:  # noqa: BLE001
            errors["pcc"] = str(e)
    report["conditions"] = conditions

    # ---- verdict ----
    if cfg.enabled("verdict"):
        try:
            v = moran.decide_spectrality(seq)
            report["verdict"] = {
                "outcome": v.outcome,
                "rule": v.rule,
                "checked_preconditions": [[name, ok] for name, ok in v.checked_preconditions],
                "notes": v.notes,
            }
        except Exception as e:  # noqa: BLE001
            errors["verdict"] = str(e)
            report["verdict"] = None
    else:
        report["verdict"] = None

    # ---- numerics ----
    numerics: Dict = {}
    rbc_holds = conditions.get("rbc", {}).get("status") == "holds"
    if rbc_holds:
        try:
            numerics["tail_epsilon"] = _f12(
                fourier.tail_bound(seq, _effective_depth(seq, cfg.depth), cfg.window))
        except Exception as e:  # noqa: BLE001
            errors["tail_bound"] = str(e)
    if cfg.enabled("qsum"):
        try:
            trunc, full = _spectrum_for(seq, cfg)
            if trunc is None:
                errors["qsum"] = "no usable frequency sets at this scale"
            else:
                plan = fourier.TruncationPlan(
                    _effective_depth(seq, cfg.depth), xi_window=cfg.window)
                orth = fourier.orthogonality_check(seq, plan, trunc.elements)
                numerics["spectrum"] = {
                    "depth": trunc.depth,
                    "size": trunc.size,
                    "full_frequency_sets": full,
                    "elements": [_frac_str(e) for e in trunc.elements[:64]],
                }
                numerics["orthogonality"] = {
                    "max_abs": _f12(orth.max_abs),
                    "certified_pairs": orth.certified_pairs,
                    "total_pairs": orth.total_pairs,
                    "violating_pair": (
                        [_frac_str(orth.violating_pair[0]), _frac_str(orth.violating_pair[1])]
                        if orth.violating_pair else None
                    ),
                }
                qr = fourier.q_partial(
                    seq, plan, trunc.elements,
                    fourier.golden_ratio_samples(cfg.samples, cfg.window),
                )
                qvals = np.array(qr.q_values)
                numerics["q"] = {
                    "samples": len(qr.xi_samples),
                    "window": _f12(cfg.window),
                    "lambda_size": qr.lambda_size,
                    "max_deviation_from_one": _f12(qr.max_deviation_from_one),
                    "mean": _f12(qvals.mean()),
                    "min": _f12(qvals.min()),
                    "max": _f12(qvals.max()),
                }
        except Exception as e:  # noqa: BLE001
            errors["qsum"] = str(e)
    if cfg.enabled("decompose"):
        try:
            numerics["decomposition"] = _decomposition_section(seq, cfg)
        except Exception as e:  # noqa: BLE001
            errors["decompose"] = str(e)
    report["numerics"] = numerics
    report["errors"] = errors
    return report


def _decomposition_section(seq: MoranSequence, cfg: AnalysisConfig) -> Dict:
    trunc, _ = _spectrum_for(seq, cfg)
    if trunc is None:
        raise RuntimeError("no spectrum truncation to decompose")
    N1, B1 = moran.materialize(seq, 1)
    g0 = spectrum.gamma0(N1, B1.size)
    classes = spectrum.inhabited_classes(trunc, N1, B1.size)
    projections = [
        {"gamma": _frac_str(c), "size": len(spectrum.project_P(trunc, c, N1))}
        for c in classes
    ]
    choice = list(classes)          # base representative of each class
    result = spectrum.decompose_lambda(trunc, N1, B1.size, choice)
    plan = fourier.TruncationPlan(_effective_depth(seq, cfg.depth), xi_window=cfg.window)
    xi = fourier.golden_ratio_samples(1, cfg.window)[0]
    realized = sorted(
        {Fraction(l) % N1 for l in trunc.elements},
        key=lambda q: (q.denominator, q.numerator),
    )
    total = 0.0
    for gam in realized:
        p, q = spectrum.pq_profile(seq, plan, trunc, gam, xi)
        total += p * q
    qr = fourier.q_partial(seq, plan, trunc.elements, [xi])
    return {
        "gamma0": [_frac_str(g) for g in g0],
        "classes": [_frac_str(c) for c in classes],
        "projections": projections,
        "choice": [_frac_str(c) for c in choice],
        "result_size": result.size,
        "pq_identity_residual": _f12(abs(total - qr.q_values[0])),
    }


def render_text(report: Dict) -> str:
    """Short human-readable rendering of a report."""
    lines = []
    label = report.get("label") or "(unnamed)"
    lines.append(f"analysis of {label}")
    seqinfo = report["sequence"]
    if seqinfo["digit_scale"] != 1:
        lines.append(f"  digits rescaled by {seqinfo['digit_scale']} for the algebraic checks")
    for lv in seqinfo["levels"]:
        udz = lv.get("udz")
        udz_s = "yes" if udz else ("no" if udz is False else "?")
        lines.append(
            f"  k={lv['k']}: N={lv['N']} M={lv['modulus']} crs={'y' if lv['crs'] else 'n'}"
            f" M|N={'y' if lv['divides'] else 'n'} udz={udz_s}"
        )
    for name in ("rbc", "pcc"):
        sec = report["conditions"].get(name)
        if sec:
            lines.append(f"  {name}: {sec['status']}")
    v = report.get("verdict")
    if v:
        lines.append(f"  verdict: {v['outcome']}" + (f" [{v['rule']}]" if v["rule"] else ""))
    num = report.get("numerics", {})
    if "orthogonality" in num:
        o = num["orthogonality"]
        lines.append(
            f"  orthogonality: {o['certified_pairs']}/{o['total_pairs']} pairs certified,"
            f" residual {o['max_abs']}"
        )
    if "q" in num:
        q = num["q"]
        lines.append(f"  Q: mean {q['mean']}, max deviation {q['max_deviation_from_one']}")
    for k, msg in report.get("errors", {}).items():
        lines.append(f"  [{k}] {msg}")
    return "\n".join(lines) + "\n"


def export_samples(cfg: AnalysisConfig, what: str, out) -> None:
    """Write a CSV sample grid: transform values or Q-function values."""
    seq = build_sequence(cfg)
    w = csv.writer(out, lineterminator="\n")
    if what == "mu_hat":
        grid = np.linspace(-cfg.window, cfg.window, cfg.samples)
        vals = fourier.mu_hat_grid(seq, _effective_depth(seq, cfg.depth), grid)
        w.writerow(["xi", "re", "im", "abs"])
        for x, v in zip(grid, vals):
            w.writerow([f"{x:.12g}", f"{v.real:.12g}", f"{v.imag:.12g}", f"{abs(v):.12g}"])
        return
    if what == "qsum":
        trunc, _ = _spectrum_for(seq, cfg)
        if trunc is None:
            raise RuntimeError("no usable frequency sets at this scale")
        plan = fourier.TruncationPlan(
            _effective_depth(seq, cfg.depth), xi_window=cfg.window)
        samples = fourier.golden_ratio_samples(cfg.samples, cfg.window)
        qr = fourier.q_partial(seq, plan, trunc.elements, samples)
        w.writerow(["xi", "q"])
        for x, q in zip(qr.xi_samples, qr.q_values):
            w.writerow([f"{x:.12g}", f"{q:.12g}"])
        return
    raise ValueError(f"unknown export kind {what!r}")


# --------------------------------------------------------------------------
# gallery
# --------------------------------------------------------------------------

def gallery_names() -> List[str]:
    from importlib import resources

    root = resources.files("moranspec") / "gallery"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def gallery_text(name: str) -> str:
    from importlib import resources

    path = resources.files("moranspec") / "gallery" / f"{name}.toml"
    if not path.is_file():
        raise KeyError(f"no gallery entry {name!r}; available: {', '.join(gallery_names())}")
    return path.read_text(encoding="utf-8")


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _apply_overrides(cfg: AnalysisConfig, args) -> AnalysisConfig:
    updates = {}
    if args.depth is not None:
        updates["depth"] = args.depth
    if args.spectrum_depth is not None:
        updates["spectrum_depth"] = args.spectrum_depth
    if args.samples is not None:
        updates["samples"] = args.samples
    if args.window is not None:
        updates["window"] = args.window
    if not updates:
        return cfg
    from dataclasses import replace

    return replace(cfg, **updates)


def _add_knob_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=None, help="product truncation depth")
    p.add_argument("--spectrum-depth", dest="spectrum_depth", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--window", type=float, default=None)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="moranspec",
        description="spectrality analysis of infinite convolutions of digit sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="run the full analysis for a config")
    p_an.add_argument("config", help="path to a TOML config")
    p_an.add_argument("--json", dest="json_out", default=None, help="write the JSON report here")
    p_an.add_argument("--text", action="store_true", help="print the text rendering")
    _add_knob_flags(p_an)

    p_ex = sub.add_parser("export", help="export a CSV sample grid")
    p_ex.add_argument("config")
    p_ex.add_argument("--what", choices=("mu_hat", "qsum"), required=True)
    p_ex.add_argument("--out", required=True)
    _add_knob_flags(p_ex)

    p_ga = sub.add_parser("gallery", help="print a bundled example config")
    p_ga.add_argument("name", nargs="?", default=None)
    p_ga.add_argument("--list", action="store_true", dest="list_all")
    p_ga.add_argument("--out", default=None)

    args = parser.parse_args(argv)

    if args.command == "gallery":
        if args.list_all or args.name is None:
            print("\n".join(gallery_names()))
            return 0
        try:
            text = gallery_text(args.name)
        except KeyError as e:
            print(str(e), file=sys.stderr)
            return 2
        if args.out:
            try:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as e:
                print(f"cannot write {args.out}: {e}", file=sys.stderr)
                return 3
        else:
            sys.stdout.write(text)
        return 0

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as e:
        print(f"cannot read {args.config}: {e}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError) as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return 2
    try:
        cfg = _apply_overrides(cfg, args)
    except (ParseError, ValidationError) as e:
        print(f"invalid override: {e}", file=sys.stderr)
        return 2

    if args.command == "analyze":
        report = run_analysis(cfg)
        payload = json.dumps(report, indent=2, sort_keys=False)
        if args.json_out:
            try:
                with open(args.json_out, "w", encoding="utf-8") as fh:
                    fh.write(payload + "\n")
            except OSError as e:
                print(f"cannot write {args.json_out}: {e}", file=sys.stderr)
                return 3
        if args.text or not args.json_out:
            sys.stdout.write(render_text(report))
        return 0

    if args.command == "export":
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                export_samples(cfg, args.what, fh)
        except OSError as e:
            print(f"cannot write {args.out}: {e}", file=sys.stderr)
            return 3
        return 0

    return 2  # pragma: no cover


if __name__ == "__main__":
    raise SystemExit(main())
