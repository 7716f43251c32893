"""Set families, experiment grids, exponent fits and report files.

Randomness: every random draw comes from ``numpy.random.default_rng``
(PCG64) seeded with a 64-bit integer, which gives the same stream on every
platform. A grid cell's seed is derived from the master seed and the cell
index by :func:`derive_seed`, so a cell's output does not depend on which
cells ran before it.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import median
from typing import Any, Callable

import numpy as np

from growth_lab import characters, extremal, incidence, proof_lab
from growth_lab.errors import AuditFailure
from growth_lab.field_core import find_primitive_root, is_prime
from growth_lab.set_arith import FpSet, PairRelation

SCHEMA_VERSION = 1
FP_KINDS = ("random", "interval", "ap", "gp", "extremal")
RATIONAL_KINDS = ("random", "ap", "gp")
DEFAULT_RATIONAL_HIGH = 10 ** 6


def derive_seed(master: int, *path: int) -> int:
    """64-bit seed for a sub-stream: ``SeedSequence([master, *path])``'s first word."""
    seq = np.random.SeedSequence([int(master) % (1 << 64), *(int(k) for k in path)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class FamilySpec:
    """How to generate one input set.

    ``p`` is None for rational families. ``exclude`` lists residues (or
    rationals) the set must avoid; they are skipped during generation.
    ``params`` may hold ``start``, ``step``, ``ratio`` and ``high``.
    """

    kind: str
    size: int
    p: int | None = None
    seed: int = 0
    exclude: tuple = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds = FP_KINDS if self.p is not None else RATIONAL_KINDS
        if self.kind not in kinds:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {kinds}")
        if self.size < 1:
            raise ValueError("family size must be positive")
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")


def _progression(first, advance, size, excluded, limit, name):
    out, seen = [], set()
    value = first
    for _ in range(limit):
        if value not in excluded and value not in seen:
            seen.add(value)
            out.append(value)
            if len(out) == size:
                return out
        value = advance(value)
    raise ValueError(f"{name} progression cannot supply {size} admissible elements")


def generate_family(spec: FamilySpec):
    """An :class:`FpSet` for finite-field specs, a sorted tuple of Fractions otherwise."""
    if spec.p is None:
        return _rational_family(spec)
    p, size = spec.p, spec.size
    excluded = {int(e) % p for e in spec.exclude}
    prm = spec.params
    if spec.kind == "extremal":
        result = extremal.build_extremal_set(p, size)
        A = result.A
        if excluded & set(A):
            raise ValueError("extremal set meets an excluded element")
        return A
    if size > p - len(excluded):
        raise ValueError(f"cannot choose {size} elements of F_{p} avoiding {sorted(excluded)}")
    if spec.kind == "random":
        pool = np.setdiff1d(np.arange(p, dtype=np.int64), np.array(sorted(excluded), dtype=np.int64))
        rng = np.random.default_rng(spec.seed)
        return FpSet(p, rng.choice(pool, size=size, replace=False))
    if spec.kind == "interval":
        start = int(prm.get("start", 1))
        return FpSet(p, _progression(start % p, lambda v: (v + 1) % p, size, excluded, p, "interval"))
    if spec.kind == "ap":
        start, step = int(prm.get("start", 1)), int(prm.get("step", 1))
        return FpSet(p, _progression(start % p, lambda v: (v + step) % p, size, excluded, p, "ap"))
    ratio = int(prm.get("ratio", find_primitive_root(p)))
    start = int(prm.get("start", 1))
    return FpSet(p, _progression(start % p, lambda v: v * ratio % p, size, excluded, p, "gp"))


def _rational_family(spec: FamilySpec) -> tuple[Fraction, ...]:
    size, prm = spec.size, spec.params
    excluded = {Fraction(e) for e in spec.exclude}
    if spec.kind == "random":
        high = int(prm.get("high", DEFAULT_RATIONAL_HIGH))
        low = int(prm.get("low", 1))
        allowed = high - low + 1 - sum(1 for e in excluded if e.denominator == 1 and low <= e <= high)
        if size > allowed:
            raise ValueError(f"cannot choose {size} integers in [{low}, {high}]")
        rng = np.random.default_rng(spec.seed)
        out: set[int] = set()
        while len(out) < size:
            draw = rng.integers(low, high, size=size - len(out), endpoint=True)
            out.update(int(v) for v in draw if Fraction(int(v)) not in excluded)
            if len(out) > size:
                out = set(sorted(out)[:size])
        return tuple(sorted(Fraction(v) for v in out))
    start = Fraction(prm.get("start", 1))
    if spec.kind == "ap":
        step = Fraction(prm.get("step", 1))
        if step == 0:
            raise ValueError("ap step must be nonzero")
        seq = _progression(start, lambda v: v + step, size, excluded, size + len(excluded) + 1, "ap")
    else:
        ratio = Fraction(prm.get("ratio", 2))
        if ratio in (0, 1, -1) or start == 0:
            raise ValueError("gp needs a nonzero start and a ratio other than 0, 1, -1")
        seq = _progression(start, lambda v: v * ratio, size, excluded, size + len(excluded) + 1, "gp")
    return tuple(sorted(seq))


def fit_exponent(pairs) -> tuple[float, float]:
    """Least-squares slope of ln v against ln n, with its R^2."""
    pairs = [(float(n), float(v)) for n, v in pairs]
    if len(pairs) < 2:
        raise ValueError("need at least two points")
    ns = [n for n, _ in pairs]
    if len(set(ns)) != len(ns):
        raise ValueError("repeated n values")
    if any(n <= 0 or v <= 0 for n, v in pairs):
        raise ValueError("n and v must be positive")
    x = np.log(ns)
    y = np.log([v for _, v in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((residual ** 2).sum()) / ss_tot
    return float(slope), r2


# -- reports ----------------------------------------------------------------

def _round_ratio(lhs, rhs) -> float:
    return float(f"{lhs / rhs:.12g}")


@dataclass
class Bound:
    name: str
    lhs: int | float
    rhs: int | float
    ratio: float = field(init=False)

    def __post_init__(self):
        self.ratio = _round_ratio(self.lhs, self.rhs)


@dataclass
class ExperimentReport:
    run_id: str
    audit: str
    family: str
    p: int | None
    size: int
    seed: int
    sizes: dict[str, int] = field(default_factory=dict)
    bounds: list[Bound] = field(default_factory=list)
    flags: dict[str, bool] = field(default_factory=dict)
    info: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def bound(self, name: str) -> Bound:
        for b in self.bounds:
            if b.name == name:
                return b
        raise KeyError(name)

    def ratios_consistent(self, rtol: float = 1e-11) -> bool:
        return all(math.isclose(b.ratio, b.lhs / b.rhs, rel_tol=rtol) for b in self.bounds)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "run_id": self.run_id,
            "audit": self.audit,
            "family": self.family,
            "p": self.p,
            "size": self.size,
            "seed": self.seed,
            "passed": self.passed,
            "wall_time": self.wall_time,
            "sizes": dict(self.sizes),
            "bounds": [asdict(b) for b in self.bounds],
            "flags": dict(self.flags),
            "info": dict(self.info),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentReport":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        report = cls(data["run_id"], data["audit"], data["family"], data["p"], data["size"],
                     data["seed"], dict(data["sizes"]), [], dict(data["flags"]),
                     dict(data["info"]), data["wall_time"])
        for b in data["bounds"]:
            bound = Bound(b["name"], b["lhs"], b["rhs"])
            if bound.ratio != b["ratio"]:
                raise ValueError(f"ratio of bound {b['name']!r} does not match lhs/rhs")
            report.bounds.append(bound)
        return report


REPORT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["schema", "run_id", "audit", "family", "p", "size", "seed", "passed",
                     "wall_time", "sizes", "bounds", "flags", "info"],
        "additionalProperties": False,
        "properties": {
            "schema": {"const": SCHEMA_VERSION},
            "run_id": {"type": "string"},
            "audit": {"type": "string"},
            "family": {"type": "string"},
            "p": {"type": ["integer", "null"]},
            "size": {"type": "integer"},
            "seed": {"type": "integer"},
            "passed": {"type": "boolean"},
            "wall_time": {"type": "number"},
            "sizes": {"type": "object", "additionalProperties": {"type": "integer"}},
            "bounds": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "lhs", "rhs", "ratio"],
                    "additionalProperties": False,
                    "properties": {
                        "name": {"type": "string"},
                        "lhs": {"type": "number"},
                        "rhs": {"type": "number"},
                        "ratio": {"type": "number"},
                    },
                },
            },
            "flags": {"type": "object", "additionalProperties": {"type": "boolean"}},
            "info": {"type": "object"},
        },
    },
}


def validate_report_json(data) -> None:
    """Raise ``jsonschema.ValidationError`` if ``data`` is not a valid report array."""
    import jsonschema

    jsonschema.validate(data, REPORT_SCHEMA)


CSV_HEADER = ["schema", "run_id", "audit", "family", "p", "size", "seed", "passed",
              "wall_time", "kind", "name", "value", "lhs", "rhs", "ratio"]


def _cell(value) -> str:
    return json.dumps(value)


def reports_to_csv(reports) -> str:
    """Long format: one ``report`` row per report, then one row per size, bound, flag, info."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        head = [SCHEMA_VERSION, r.run_id, r.audit, r.family, _cell(r.p), r.size, r.seed,
                _cell(r.passed), _cell(r.wall_time)]
        writer.writerow(head + ["report", "", "", "", "", ""])
        for name, v in r.sizes.items():
            writer.writerow(head + ["size", name, _cell(v), "", "", ""])
        for b in r.bounds:
            writer.writerow(head + ["bound", b.name, "", _cell(b.lhs), _cell(b.rhs), _cell(b.ratio)])
        for name, v in r.flags.items():
            writer.writerow(head + ["flag", name, _cell(v), "", "", ""])
        for name, v in r.info.items():
            writer.writerow(head + ["info", name, _cell(v), "", "", ""])
    return buf.getvalue()


def reports_from_csv(text: str) -> list[ExperimentReport]:
    rows = list(csv.DictReader(io.StringIO(text)))
    reports: list[ExperimentReport] = []
    for row in rows:
        if int(row["schema"]) != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {row['schema']!r}")
        kind = row["kind"]
        if kind == "report":
            reports.append(ExperimentReport(
                row["run_id"], row["audit"], row["family"], json.loads(row["p"]),
                int(row["size"]), int(row["seed"]), wall_time=json.loads(row["wall_time"])))
            continue
        r = reports[-1]
        if kind == "size":
            r.sizes[row["name"]] = json.loads(row["value"])
        elif kind == "bound":
            b = Bound(row["name"], json.loads(row["lhs"]), json.loads(row["rhs"]))
            if b.ratio != json.loads(row["ratio"]):
                raise ValueError(f"ratio of bound {row['name']!r} does not match lhs/rhs")
            r.bounds.append(b)
        elif kind == "flag":
            r.flags[row["name"]] = json.loads(row["value"])
        elif kind == "info":
            r.info[row["name"]] = json.loads(row["value"])
        else:
            raise ValueError(f"unknown row kind {kind!r}")
    return reports


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def reports_from_json(text: str) -> list[ExperimentReport]:
    data = json.loads(text)
    validate_report_json(data)
    return [ExperimentReport.from_dict(d) for d in data]


def emit_report(reports, fmt: str, path) -> Path:
    reports = list(reports)
    bad = [r.run_id for r in reports if not r.ratios_consistent()]
    if bad:
        raise ValueError(f"reports with inconsistent ratios: {bad}")
    if fmt == "json":
        text = reports_to_json(reports)
    elif fmt == "csv":
        text = reports_to_csv(reports)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path


# -- audits as report producers ---------------------------------------------

FP_EXCLUDE = {
    "thm1": (),
    "lemma2": (),
    "ruzsa": (0, -1),
    "anchor": (0, -1),
    "levels": (0, -1),
    "injection": (0, -1),
    "bsg": (),
    "thm2": (0, -1),
}


def _sub_spec(spec: FamilySpec, k: int, **changes) -> FamilySpec:
    fields = dict(kind=spec.kind, size=spec.size, p=spec.p, seed=derive_seed(spec.seed, k),
                  exclude=spec.exclude, params=spec.params)
    fields.update(changes)
    return FamilySpec(**fields)


def _with_exclusions(audit: str, spec: FamilySpec) -> FamilySpec:
    need = FP_EXCLUDE.get(audit, ())
    if spec.p is None or not need:
        return spec
    merged = tuple(sorted({int(e) % spec.p for e in spec.exclude + need}))
    return _sub_spec(spec, 0, seed=spec.seed, exclude=merged)


def _audit_thm1(spec, report):
    A = generate_family(spec)
    r = proof_lab.theorem1_exponent(A)
    report.sizes.update(A=A.card, shifted_product=r["card_shifted_product"])
    report.bounds += [Bound("beta", math.log(r["card_shifted_product"]), math.log(A.card)),
                      Bound("K", r["card_shifted_product"], A.card)]
    report.flags["beta_at_least_106_105"] = r["beta_pass"]


def _audit_lemma2(spec, report):
    A = generate_family(spec)
    r = proof_lab.lemma2_audit(A)
    ln = math.log(A.card)
    report.sizes.update(A=A.card, diff=r["card_diff"], two_a_minus_two_a=r["card_2a2a"],
                        shifted_product=r["card_shifted_product"])
    report.bounds += [
        Bound("lemma2_exponent", 8 * math.log(r["card_diff"]) + 4 * math.log(r["card_shifted_product"]), ln),
        Bound("sketch_exponent", 5 * math.log(r["card_diff"]) + math.log(r["card_2a2a"])
              + 4 * math.log(r["card_shifted_product"]), ln),
    ]
    report.flags["lemma2_exponent_at_least_13"] = r["exponent_pass"]
    report.info["sketch_exponent_at_least_11"] = r["sketch_pass"]


def _audit_ruzsa(spec, report):
    A = generate_family(spec)
    r = proof_lab.ruzsa_mult_audit(A)
    report.sizes.update(A=A.card, AA=r["card_AA"], shifted_product=r["card_shifted_product"])
    report.bounds.append(Bound("ruzsa", r["lhs"], r["rhs"]))
    report.flags["ruzsa_holds"] = r["lhs"] <= r["rhs"]


def _audit_machinery(spec, report):
    A = generate_family(spec)
    r = proof_lab.lemma2_machinery(A)
    report.sizes.update(A=A.card, shifted_product=r["card_shifted_product"], A1=r["card_A1"],
                        S=r["card_S"], domain=r["domain_size"], image=r["image_size"])
    report.bounds += [
        Bound("anchor", r["anchor_lhs"], r["anchor_rhs"]),
        Bound("pigeonhole", r["pigeonhole_lhs"], r["pigeonhole_rhs"]),
        Bound("injection_counting", r["counting_lhs"], r["counting_rhs"]),
    ]
    report.flags.update(anchor_holds=r["anchor_lhs"] >= r["anchor_rhs"],
                        injective=r["injective"],
                        counting_holds=r["counting_lhs"] <= r["counting_rhs"])
    report.info.update(b0=r["b0"], N=r["N"], class_count=r["class_count"], branch=r["branch"],
                       quadruple=r["quadruple"], pigeonhole_exact=r["pigeonhole_exact"],
                       log2_form_holds=r["log2_form_holds"], injection_ratio=r["injection_ratio"])


def _audit_anchor(spec, report):
    A = generate_family(spec)
    b0, total = proof_lab.popular_anchor(A)
    n_shift = proof_lab.shifted_product(A).card
    report.sizes.update(A=A.card, shifted_product=n_shift)
    report.bounds.append(Bound("anchor", total * n_shift, A.card ** 3))
    report.flags["anchor_holds"] = total * n_shift >= A.card ** 3
    report.info.update(b0=b0, total=total)


def _audit_levels(spec, report):
    A = generate_family(spec)
    dec = proof_lab.dyadic_levels(A)
    report.sizes.update(A=A.card, A1=dec.A1.card)
    report.bounds += [Bound("pigeonhole", dec.N * dec.A1.card * dec.class_count, dec.total),
                      Bound("pigeonhole_strict", 2 * dec.N * dec.A1.card * dec.class_count, dec.total)]
    report.flags["pigeonhole_strict"] = dec.pigeonhole_strict
    report.info.update(b0=dec.b0, N=dec.N, class_count=dec.class_count,
                       pigeonhole_exact=dec.pigeonhole_exact)


def _random_relation(A: FpSet, B: FpSet, seed: int) -> PairRelation:
    rng = np.random.default_rng(seed)
    pairs = [(a, b) for a in A for b in B]
    need = math.ceil(len(pairs) / 2)
    k = int(rng.integers(need, len(pairs), endpoint=True))
    chosen = sorted(rng.choice(len(pairs), size=k, replace=False).tolist())
    return PairRelation(A, B, tuple(pairs[i] for i in chosen))


def _audit_bsg(spec, report):
    A = generate_family(_sub_spec(spec, 1))
    B = generate_family(_sub_spec(spec, 2))
    E = _random_relation(A, B, derive_seed(spec.seed, 3))
    K = Fraction(A.card * B.card, len(E))
    witness = proof_lab.bsg_witness_search(A, B, E)
    d_E = proof_lab.restricted_difference(E).card
    lhs = d_E ** 4 * 10 ** 4 * K.numerator ** 5
    rhs = proof_lab.difference_set(witness, witness).card * A.card * B.card ** 2 * K.denominator ** 5
    report.sizes.update(A=A.card, B=B.card, E=len(E), restricted_difference=d_E,
                        witness=witness.card)
    report.bounds.append(Bound("bsg", lhs, rhs))
    report.flags["witness_found"] = lhs >= rhs
    report.info.update(K=str(K), witness=witness.tolist())


def _audit_thm2(spec, report):
    A, B, C = (generate_family(_sub_spec(spec, k)) for k in (1, 2, 3))
    audit = characters.theorem2_audit(A, B, C)
    report.sizes.update(A=A.card, B=B.card, C=C.card, AB=audit.AB.card, T=audit.T.card, J=audit.J)
    report.bounds += [
        Bound("J_lower", audit.J, audit.lower),
        Bound("J_upper", audit.J, audit.upper),
        Bound("weil", audit.char_worst, audit.weil_bound),
        Bound("product", audit.AB.card * audit.T.card, audit.min_bound),
    ]
    report.flags.update(J_lower_holds=audit.J >= audit.lower,
                        J_upper_holds=audit.J <= audit.upper * (1 + characters.BOUND_RTOL),
                        weil_holds=audit.char_worst <= audit.weil_bound + characters.WEIL_ATOL)


def _audit_thm3(spec, report, c_st=incidence.DEFAULT_C_ST):
    if spec.p is not None:
        raise ValueError("thm3 works over the rationals; leave p unset")
    A = generate_family(_sub_spec(spec, 1, exclude=tuple(spec.exclude) + (0, -1)))
    B = generate_family(_sub_spec(spec, 2, exclude=tuple(spec.exclude) + (0,)))
    C = generate_family(_sub_spec(spec, 3, exclude=tuple(spec.exclude) + (0,)))
    r = incidence.theorem3_audit(A, B, C, c_st=c_st)
    report.sizes.update(A=r["card_A"], B=r["card_B"], C=r["card_C"], AB=r["card_AB"],
                        T=r["card_T"], points=r["n_points"], lines=r["n_lines"],
                        incidences=r["incidences"])
    report.bounds += [
        Bound("incidences_lower", r["incidences"], r["lower"]),
        Bound("product", r["product_lhs"], r["product_rhs"]),
        Bound("szemeredi_trotter", r["incidences"], r["st_rhs"]),
    ]
    report.flags.update(incidences_lower_holds=r["incidences"] >= r["lower"],
                        lines_carry_A=r["min_line_witnesses"] >= r["card_A"],
                        constant_one_holds=r["constant_one_holds"])
    report.info.update(st_holds=r["st_holds"], c_st=c_st, methods=r["methods"])


def _audit_extremal(spec, report):
    result = extremal.build_extremal_set(spec.p, spec.size)
    v = extremal.verify_extremal(result)
    report.sizes.update(A=v["card_A"], shifted_product=v["card_shifted_product"], M=v["M"],
                        L=v["L"], g=v["g"], N=v["N"])
    report.bounds += [
        Bound("shifted_vs_2M", v["card_shifted_product"], v["two_M"]),
        Bound("shifted_vs_sqrt_pA", v["card_shifted_product"], math.sqrt(spec.p * v["card_A"])),
        Bound("A_vs_N", v["card_A"], v["N"]),
    ]
    report.flags.update(within_2M=v["card_shifted_product"] <= v["two_M"],
                        within_4_sqrt_pA=v["card_shifted_product"] ** 2 <= 16 * spec.p * v["card_A"],
                        size_reached=v["card_A"] >= v["N"])


AUDITS: dict[str, Callable] = {
    "thm1": _audit_thm1,
    "lemma2": _audit_lemma2,
    "ruzsa": _audit_ruzsa,
    "anchor": _audit_anchor,
    "levels": _audit_levels,
    "injection": _audit_machinery,
    "bsg": _audit_bsg,
    "thm2": _audit_thm2,
    "thm3": _audit_thm3,
    "extremal": _audit_extremal,
}


def run_cell(audit: str, spec: FamilySpec, run_id: str | None = None, **options) -> ExperimentReport:
    if audit not in AUDITS:
        raise ValueError(f"unknown audit {audit!r}; expected one of {sorted(AUDITS)}")
    spec = _with_exclusions(audit, spec)
    report = ExperimentReport(run_id or f"{audit}-{spec.seed}", audit, spec.kind, spec.p,
                              spec.size, spec.seed)
    start = time.perf_counter()
    AUDITS[audit](spec, report, **options)
    report.wall_time = time.perf_counter() - start
    return report


def _run_indexed(args):
    i, audit, spec, options = args
    try:
        return run_cell(audit, spec, f"{audit}-{i:04d}", **options)
    except AuditFailure as exc:
        exc.diagnostics.update(cell=i, audit=audit, family=spec.kind, seed=spec.seed)
        raise
    except ValueError as exc:
        raise ValueError(f"cell {i} ({audit}, {spec.kind}, size={spec.size}): {exc}") from exc


def run_grid(plan, master_seed: int | None = None, workers: int = 1,
             **options) -> list[ExperimentReport]:
    """Run ``(audit, FamilySpec)`` cells and return reports in plan order.

    With ``master_seed`` set, cell i gets ``derive_seed(master_seed, i)``
    in place of its own seed. Errors are re-raised naming the cell. With
    ``workers > 1`` cells run in a process pool; the first failing cell in
    plan order is the one reported.
    """
    jobs = []
    for i, (audit, spec) in enumerate(plan):
        if master_seed is not None:
            spec = _sub_spec(spec, 0, seed=derive_seed(master_seed, i))
        jobs.append((i, audit, spec, options))
    if workers <= 1 or len(jobs) <= 1:
        return [_run_indexed(job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_indexed, jobs))


def summarize(reports) -> dict[str, dict]:
    """Per audit kind: count, pass count, and min/median ratio of every bound."""
    out: dict[str, dict] = {}
    for r in reports:
        entry = out.setdefault(r.audit, {"runs": 0, "passed": 0, "ratios": {}})
        entry["runs"] += 1
        entry["passed"] += r.passed
        for b in r.bounds:
            entry["ratios"].setdefault(b.name, []).append(b.ratio)
    for entry in out.values():
        entry["ratios"] = {name: {"min": min(v), "median": median(v)}
                           for name, v in entry["ratios"].items()}
    return out
