"""Command line front end: ``qforms <kind> <file> [options]``.

Exit codes: 0 when every check passes, 2 for a failed check or invalid
input structure, 3 for engine errors, 4 for malformed input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .algebroids import build_differential, jacobi_witness
from .cartan import cartan_suite, random_vector_field
from .cohomology import BettiTable, ComplexSpec, basic_spec, betti, representatives
from .derivations import Derivation, conjugate, is_homological, square_witness
from .errors import EngineError, ParseError, QFormsError, ValidationError
from .models import bialgebra_double, brst, cartan_model, ginzburg, mqk, mqk_pair, weil
from .schema import KINDS, JobSpec, load, parse_window
from .simplicial import (
    FiniteGroupoid,
    PolyActionGroupoid,
    VanEst,
    cup,
    delta,
    normalized_betti,
    random_cochain,
    simplicial_identities,
)

EXIT_OK, EXIT_FAIL, EXIT_ENGINE, EXIT_PARSE = 0, 2, 3, 4


@dataclass
class Check:
    name: str
    passed: bool
    detail: str | None = None


@dataclass
class Report:
    kind: str
    subject: str
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, BettiTable] = field(default_factory=dict)
    reps: dict[str, dict[int, list[str]]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed: bool, detail: str | None = None) -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "subject": self.subject,
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "betti": {k: t.to_records() for k, t in self.tables.items()},
            "representatives": {k: {str(n): v for n, v in r.items()} for k, r in self.reps.items()},
            "notes": self.notes,
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"{self.kind}: {self.subject}"]
        lines += self.notes
        for c in self.checks:
            line = f"{c.name}: {'PASS' if c.passed else 'FAIL'}"
            if c.detail:
                line += f" ({c.detail})"
            lines.append(line)
        for label, table in self.tables.items():
            lines.append("")
            lines.append(f"[{label}]")
            lines.append(table.to_text())
            for n, elems in sorted(self.reps.get(label, {}).items()):
                for e in elems:
                    lines.append(f"  H^{n}: {e}")
        return "\n".join(lines)


def _window(job: JobSpec) -> tuple[int, int]:
    if job.window is None:
        raise ParseError("missing degree window (set job.window or pass --window a..b)", "$.job.window")
    return job.window


def _derivation_witness(lhs: Derivation, rhs: Derivation) -> str | None:
    diff = lhs - rhs
    for name, img in zip(diff.table.names, diff.images):
        if img:
            return f"differs on {name} by {img}"
    return None


def _weight_for(job: JobSpec, weights: dict | None):
    """Resolve the job weight into ``(assignment, value)`` or None."""
    w = job.weight
    if w is None or isinstance(w, tuple):
        return w
    if weights is None:
        raise ParseError("a bare weight needs a model with natural weights; give {assignment, value}", "$.job.weight")
    return (weights, w)


def _add_table(report: Report, label: str, spec: ComplexSpec | None, table: BettiTable, want_reps: bool) -> None:
    report.tables[label] = table
    if want_reps and spec is not None:
        reps = {}
        for row in table.rows:
            if row.h:
                reps[row.degree] = [str(e) for e in representatives(spec, row.degree)]
        report.reps[label] = reps


# job runners


def _run_check(job: JobSpec, report: Report) -> None:
    p, pk = job.payload, job.payload_kind
    seed = int(job.options.get("seed", 0))
    if pk in ("lie_algebra", "algebroid"):
        report.check("jacobi", jacobi_witness(p) is None)
        D = build_differential(p)
        report.check("d_A squares to zero", is_homological(D) or D.is_zero())
    elif pk == "action":
        report.check("action is a Lie algebra homomorphism", True)
        b = brst(p.g, p.base, p.fields)
        report.check("BRST differential squares to zero", is_homological(b.D_B))
    elif pk == "bialgebra":
        _run_double(job, report)
    elif pk == "ginzburg":
        _run_ginzburg(job, report)
    elif pk == "fields":
        _run_cartan_suite(job, report)
    elif pk == "groupoid":
        report.check("groupoid axioms", True)
        ids = simplicial_identities(p, 3)
        bad = [label for label, ok in ids if not ok]
        report.check("simplicial identities", not bad, f"{len(ids) - len(bad)}/{len(ids)}" + (f"; first failure {bad[0]}" if bad else ""))
        rng = random.Random(seed)
        samples = int(job.options.get("samples", 20))
        passed = 0
        for k in range(samples):
            f = random_cochain(p, k % 3, rng, normalized=False)
            passed += delta(delta(f)).is_zero()
        report.check("delta squared is zero", passed == samples, f"{passed}/{samples} samples")
        if isinstance(p, PolyActionGroupoid):
            _note_constants(p, report)
    else:
        raise ParseError(f"check does not apply to {pk}")


def _note_constants(gpd: PolyActionGroupoid, report: Report) -> None:
    report.check("left-invariant frame closes", True)
    for (a, b, e), c in sorted(gpd.constants.items()):
        if a < b:
            report.notes.append(f"c[{gpd.group[a]},{gpd.group[b]}]^{gpd.group[e]} = {c}")


def _run_betti(job: JobSpec, report: Report, basic: bool = False) -> None:
    p, pk = job.payload, job.payload_kind
    want_reps = bool(job.options.get("reps"))
    if pk == "groupoid":
        if not isinstance(p, FiniteGroupoid) or basic:
            raise ParseError("groupoid cohomology is computed for finite groupoids", "$.groupoid.mode")
        report.tables["normalized cochains"] = normalized_betti(p, _window(job))
        return
    window = _window(job)
    cx = job.complex
    if pk in ("lie_algebra", "algebroid"):
        cx = cx or ("weil" if basic else "ce")
        if cx == "ce":
            if basic:
                raise ParseError("basic cohomology is defined for the weil complex", "$.job.complex")
            spec = ComplexSpec(p.table, build_differential(p), window, _weight_for(job, None))
            _add_table(report, "ce", spec, betti(spec), want_reps)
        elif cx == "weil" and pk == "lie_algebra":
            W = weil(p)
            spec = W.spec(window)
            if basic:
                spec = basic_spec(spec, W.contractions)
            label = "weil basic" if basic else "weil"
            _add_table(report, label, spec, betti(spec), want_reps)
        else:
            raise ParseError(f"complex {cx!r} does not apply to {pk}", "$.job.complex")
    elif pk == "action":
        b = brst(p.g, p.base, p.fields)
        cx = cx or ("cartan" if basic else "brst")
        if isinstance(job.weight, tuple):
            raise ParseError("actions use their natural weights; give a bare integer", "$.job.weight")
        suffix = "" if job.weight is None else f" weight {job.weight}"
        if cx == "brst":
            spec = b.spec(window, job.weight)
            if basic:
                spec = basic_spec(spec, b.contractions)
            label = ("brst basic" if basic else "brst") + suffix
        elif cx == "cartan":
            spec = cartan_model(b, window, job.weight)
            label = "cartan" + suffix
        else:
            raise ParseError(f"complex {cx!r} does not apply to an action", "$.job.complex")
        _add_table(report, label, spec, betti(spec), want_reps)
    elif pk == "ginzburg":
        G = _build_ginzburg(p)
        spec = G.basic(window, _weight_for(job, None))
        _add_table(report, "ginzburg basic", spec, betti(spec), want_reps)
    else:
        raise ParseError(f"cohomology does not apply to {pk}")


def _run_mqk(job: JobSpec, report: Report) -> None:
    p, pk = job.payload, job.payload_kind
    if pk == "action":
        lhs, rhs = mqk(brst(p.g, p.base, p.fields))
    elif pk in ("lie_algebra", "algebroid"):
        lhs, rhs = mqk_pair(build_differential(p))
    else:
        raise ParseError(f"the conjugation identity does not apply to {pk}")
    w = _derivation_witness(lhs, rhs)
    report.check("conjugation identity", w is None, w)


def _run_double(job: JobSpec, report: Report) -> None:
    if job.payload_kind != "bialgebra":
        raise ParseError("double needs a bialgebra payload")
    D = bialgebra_double(job.payload.c, job.payload.gamma)
    report.check("compatibility [d, Xi] = 0", D.compatible, D.witness)
    report.check("(d + Xi)^2 = 0", D.homological, None if D.homological else str(square_witness(D.total)))


def _build_ginzburg(p):
    return ginzburg(p.algebroid, p.g, p.premoment)


def _run_ginzburg(job: JobSpec, report: Report) -> None:
    if job.payload_kind != "ginzburg":
        raise ParseError("ginzburg needs a ginzburg payload")
    G = _build_ginzburg(job.payload)
    report.check("algebroid differential squares to zero", True)
    report.check("total differential squares to zero", True)
    w = _derivation_witness(conjugate(G.d_A + G.d_K, G.Q), G.total)
    report.check("exp(Q) conjugates d_A + d_K to the total differential", w is None, w)
    if job.window is not None:
        spec = G.basic(job.window, _weight_for(job, None))
        try:
            table = betti(spec)
            report.check("d_C squares to zero on the basic subalgebra", True)
        except ValidationError as exc:
            report.check("d_C squares to zero on the basic subalgebra", False, str(exc))
            return
        _add_table(report, "ginzburg basic", spec, table, bool(job.options.get("reps")))


def _run_vanest(job: JobSpec, report: Report) -> None:
    gpd = job.payload
    if not isinstance(gpd, PolyActionGroupoid):
        raise ParseError("van Est needs a poly_action groupoid", "$.groupoid.mode")
    seed = int(job.options.get("seed", 0))
    samples = int(job.options.get("samples", 25))
    max_level = 2
    _note_constants(gpd, report)
    V = VanEst(gpd)
    rng = random.Random(seed)
    chain = ring = 0
    first_chain = first_ring = None
    for k in range(samples):
        f = random_cochain(gpd, k % (max_level + 1), rng)
        lhs, rhs = V(delta(f)), V.d_A(V(f))
        if lhs == rhs:
            chain += 1
        elif first_chain is None:
            first_chain = f"f = {f}"
        q = rng.randint(0, max_level)
        f = random_cochain(gpd, q, rng)
        g = random_cochain(gpd, rng.randint(0, max_level - q), rng)
        if V(cup(f, g)) == V(f) * V(g):
            ring += 1
        elif first_ring is None:
            first_ring = f"f = {f}, g = {g}"
    report.check("chain property", chain == samples, f"{chain}/{samples} samples" + (f"; {first_chain}" if first_chain else ""))
    report.check("ring property", ring == samples, f"{ring}/{samples} samples" + (f"; {first_ring}" if first_ring else ""))


def _run_cartan_suite(job: JobSpec, report: Report) -> None:
    if job.payload_kind != "fields":
        raise ParseError("cartan-suite needs a fields payload")
    table = job.payload["table"]
    pairs = list(job.payload["pairs"])
    if not pairs:
        rng = random.Random(int(job.options.get("seed", 0)))
        samples = int(job.options.get("samples", 50))
        pairs = [(random_vector_field(table, rng), random_vector_field(table, rng)) for _ in range(samples)]
    counts: dict[str, int] = {}
    witness: dict[str, str] = {}
    for X, Y in pairs:
        for r in cartan_suite(X, Y):
            counts[r.relation] = counts.get(r.relation, 0) + r.passed
            if not r.passed and r.relation not in witness:
                witness[r.relation] = r.witness
    for rel, n in counts.items():
        detail = f"{n}/{len(pairs)} pairs"
        if rel in witness:
            detail += f"; {witness[rel]}"
        report.check(rel, n == len(pairs), detail)


RUNNERS = {
    "check": _run_check,
    "betti": _run_betti,
    "basic": lambda job, rep: _run_betti(job, rep, basic=True),
    "mqk": _run_mqk,
    "double": _run_double,
    "ginzburg": _run_ginzburg,
    "vanest": _run_vanest,
    "cartan-suite": _run_cartan_suite,
}


def run(job: JobSpec) -> Report:
    report = Report(job.kind, job.payload_kind + (f" ({job.complex})" if job.complex else ""))
    RUNNERS[job.kind](job, report)
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qforms", description="Exact computations with graded algebras and their differentials.")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("file")
    ap.add_argument("--window", help="degree window a..b")
    ap.add_argument("--weight", type=int, help="weight value for models with natural weights")
    ap.add_argument("--json", action="store_true", help="emit JSON")
    ap.add_argument("--reps", action="store_true", help="print cocycle representatives")
    ap.add_argument("--seed", type=int, help="seed for randomized checks")
    ap.add_argument("--samples", type=int, help="number of random samples")
    ap.add_argument("--complex", choices=("ce", "weil", "brst", "cartan"), help="which complex to use")
    return ap


def _error(msg: str, as_json: bool, category: str) -> None:
    if as_json:
        print(json.dumps({"ok": False, "error": category, "message": msg}, sort_keys=True))
    else:
        print(f"error ({category}): {msg}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    as_json = args.json
    try:
        job = load(args.file, args.kind)
        job.kind = args.kind
        if args.window:
            job.window = parse_window(args.window, "--window")
        if args.weight is not None:
            job.weight = args.weight
        if args.complex:
            job.complex = args.complex
        for opt in ("seed", "samples"):
            if getattr(args, opt) is not None:
                job.options[opt] = getattr(args, opt)
        if args.reps:
            job.options["reps"] = True
        as_json = as_json or job.format == "json"
        report = run(job)
    except ParseError as exc:
        _error(str(exc), as_json, "parse")
        return EXIT_PARSE
    except ValidationError as exc:
        _error(str(exc), as_json, f"validation: {exc.invariant}")
        return EXIT_FAIL
    except (EngineError, QFormsError, KeyError, ValueError) as exc:
        _error(str(exc), as_json, "engine")
        return EXIT_ENGINE
    print(report.to_json() if as_json else report.to_text())
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
