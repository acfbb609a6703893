"""
Command-line front door.

Subcommands: enumerate, covariance, fock, simulate, oracle, compare,
plotdata. Inputs are JSON files (schema in the README); exact scalars print
as "a/b". Exit codes: 0 success / all comparisons pass, 1 comparison
mismatch, 2 bad input or guard violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import fock, rmt, theory
from .algebra import GramSpace, Mat, MatrixAlgebra, Vec
from .annular import (
    AnnulusProfile,
    enumerate_nc2,
    enumerate_nc_annular_partitions,
    enumerate_nc_disc,
    enumerate_snc,
)
from .exact import Scalar, parse_scalar, scalar_to_json


class InputError(Exception):
    pass


def _parse_profile(text: str) -> AnnulusProfile:
    try:
        return AnnulusProfile(tuple(int(x) for x in text.split(",")))
    except Exception as exc:
        raise InputError(f"bad profile {text!r}: {exc}") from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from exc


def _require(obj: dict, field: str):
    if field not in obj:
        raise InputError(f"missing required field {field!r}")
    return obj[field]


class GaussianRequest:
    def __init__(self, obj: dict):
        try:
            self.space = GramSpace.from_json(_require(obj, "gram"))
        except ValueError as exc:
            raise InputError(f"field 'gram': {exc}") from exc
        self.left = self._word(obj, "left")
        self.right = self._word(obj, "right") if "right" in obj else None

    def _word(self, obj, field) -> list[Vec]:
        word = _require(obj, field)
        out = []
        for entry in word:
            if isinstance(entry, int):
                if not 0 <= entry < self.space.dim:
                    raise InputError(f"field {field!r}: basis index {entry} out of range")
                out.append(self.space.basis(entry))
            elif isinstance(entry, list):
                out.append(Vec(self.space, tuple(parse_scalar(x) for x in entry)))
            else:
                raise InputError(f"field {field!r}: entries are basis indices or coordinate lists")
        if not out:
            raise InputError(f"field {field!r}: words must be nonempty")
        return out


class WishartRequest:
    def __init__(self, obj: dict):
        elements = _require(obj, "elements")
        if not isinstance(elements, dict) or not elements:
            raise InputError("field 'elements' must be a nonempty object of named matrices")
        dims = {len(rows) for rows in elements.values()}
        if len(dims) != 1:
            raise InputError("all elements must share one matrix size")
        try:
            self.algebra = MatrixAlgebra(dims.pop())
            self.elements = {name: self.algebra.from_json(rows) for name, rows in elements.items()}
        except ValueError as exc:
            raise InputError(f"field 'elements': {exc}") from exc
        self.left = self._word(obj, "left")
        self.right = self._word(obj, "right") if "right" in obj else None

    def _word(self, obj, field) -> list[Mat]:
        word = _require(obj, field)
        out = []
        for name in word:
            if name not in self.elements:
                raise InputError(f"field {field!r}: unknown element {name!r}")
            out.append(self.elements[name])
        if not out:
            raise InputError(f"field {field!r}: words must be nonempty")
        return out


def _load_request(path: str):
    obj = _load_json(path)
    flavor = _require(obj, "flavor")
    if flavor == "gaussian":
        return "gaussian", GaussianRequest(obj), obj
    if flavor == "wishart":
        return "wishart", WishartRequest(obj), obj
    raise InputError(f"unknown flavor {flavor!r}")


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    profile = _parse_profile(args.profile)
    if args.kind == "pairings":
        items = [list(map(list, p.pairs)) for p in enumerate_nc2(profile)]
    elif args.kind == "permutations":
        items = [ap.perm.cycle_string() for ap in enumerate_snc(profile)]
    elif args.kind == "partitions":
        if profile.circles == 1:
            items = [[list(b) for b in p.blocks] for p in enumerate_nc_disc(profile.total)]
        elif profile.circles == 2:
            items = [
                [list(b) for b in ap.partition.blocks]
                for ap in enumerate_nc_annular_partitions(*profile.sizes)
            ]
        else:
            raise InputError("partition enumeration supports one or two circles only")
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown kind {args.kind}")
    report = {"profile": list(profile.sizes), "kind": args.kind, "count": len(items)}
    if args.list:
        report["elements"] = items
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def _covariance_value(flavor: str, req) -> Scalar:
    if req.right is None:
        raise InputError("covariance needs both 'left' and 'right' words")
    if flavor == "gaussian":
        return theory.gauss_cov(req.space, req.left, req.right)
    return theory.wishart_cov(req.algebra, req.left, req.right)


def cmd_covariance(args) -> int:
    flavor, req, _ = _load_request(args.input)
    if args.flavor and args.flavor != flavor:
        raise InputError(f"--flavor {args.flavor} contradicts input flavor {flavor}")
    value = _covariance_value(flavor, req)
    _emit(json.dumps({"flavor": flavor, "covariance": scalar_to_json(value)}, indent=2) + "\n", args.out)
    return 0


def cmd_fock(args) -> int:
    flavor, req, obj = _load_request(args.input)
    report: dict = {"flavor": flavor}
    if req.right is not None:
        if flavor == "gaussian":
            space = fock.SemicircularSpace(req.space)
            value = fock.fluct_gauss_fock(space, req.left, req.right)
        else:
            space = fock.PoissonSpace(req.algebra)
            value = fock.fluct_poisson_fock(space, req.left, req.right)
        report["fluctuation"] = scalar_to_json(value)
    if obj.get("cyc_of"):
        if flavor == "gaussian":
            space = fock.SemicircularSpace(req.space)
            word = GaussianRequest({"gram": obj["gram"], "left": obj["cyc_of"]}).left
        else:
            space = fock.PoissonSpace(req.algebra)
            word = [req.elements[name] for name in obj["cyc_of"]]
        vec = fock.apply_word(space, word, fock.FockVector.vacuum(space))
        report["cyc_expansion"] = repr(fock.cyc(vec))
    if len(report) == 1:
        raise InputError("fock needs 'left'+'right' words or a 'cyc_of' word")
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def _study(flavor, req, args) -> list[dict]:
    if req.right is None:
        raise InputError("simulation needs both 'left' and 'right' words")
    n_list = tuple(int(x) for x in args.N.split(","))
    request = rmt.ConvergenceRequest(
        flavor=flavor,
        left=tuple(req.left),
        right=tuple(req.right),
        n_list=n_list,
        samples=args.samples,
        seed=args.seed,
    )
    model = req.space if flavor == "gaussian" else req.algebra
    return rmt.convergence_study(request, model)


CSV_COLUMNS = ["N", "statistic", "k1", "k1_se", "k2", "k2_se", "k3", "k3_se", "oracle_k2", "theory_limit"]


def cmd_simulate(args) -> int:
    flavor, req, _ = _load_request(args.input)
    rows = _study(flavor, req, args)
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                "" if row[c] is None else (str(row[c]) if c in ("N", "statistic") else repr(float(row[c])))
                for c in CSV_COLUMNS
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_oracle(args) -> int:
    flavor, req, _ = _load_request(args.input)
    if req.right is None:
        raise InputError("oracle needs both 'left' and 'right' words")
    n_list = [int(x) for x in args.N.split(",")]
    values = {}
    for N in n_list:
        try:
            if flavor == "gaussian":
                v = rmt.exact_gue_cumulant(req.space, [req.left, req.right], N)
            else:
                v = rmt.exact_wishart_cumulant(req.algebra, [req.left, req.right], N)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        values[N] = v
    report = {
        "flavor": flavor,
        "statistic": "k2",
        "values": {str(n): scalar_to_json(v) for n, v in values.items()},
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def cmd_compare(args) -> int:
    flavor, req, obj = _load_request(args.input)
    if req.right is None:
        raise InputError("compare needs both 'left' and 'right' words")
    comparisons = []

    def record(name_a, val_a, name_b, val_b):
        verdict = "EXACT-EQUAL" if val_a == val_b else "MISMATCH"
        comparisons.append(
            {
                "engines": [name_a, name_b],
                "values": [scalar_to_json(val_a), scalar_to_json(val_b)],
                "verdict": verdict,
            }
        )

    if flavor == "gaussian":
        comb = theory.gauss_cov(req.space, req.left, req.right)
        fk = fock.fluct_gauss_fock(fock.SemicircularSpace(req.space), req.left, req.right)
        record("combinatorial", comb, "fock", fk)
    else:
        comb = theory.wishart_cov(req.algebra, req.left, req.right)
        fk = fock.fluct_poisson_fock(fock.PoissonSpace(req.algebra), req.left, req.right)
        record("combinatorial", comb, "fock", fk)
        total = len(req.left) + len(req.right)
        if total <= theory.PSICHECK_GUARD:
            pc = theory.psicheck_sum(req.algebra, req.left, req.right)
            record("combinatorial", comb, "psicheck", pc)

    sim = obj.get("simulate")
    if sim:
        for field in ("N", "samples", "seed"):
            if field not in sim:
                raise InputError(f"simulate block requires field {field!r}")
        model = req.space if flavor == "gaussian" else req.algebra
        if flavor == "gaussian":
            batch = rmt.gaussian_trace_batch(model, [req.left, req.right], sim["N"], sim["samples"], sim["seed"])
        else:
            batch = rmt.wishart_trace_batch(model, [req.left, req.right], sim["N"], sim["samples"], sim["seed"])
        est, se = batch.covariance(batch.labels[0], batch.labels[1])
        try:
            if flavor == "gaussian":
                target = rmt.exact_gue_cumulant(model, [req.left, req.right], sim["N"]).to_complex().real
            else:
                target = rmt.exact_wishart_cumulant(model, [req.left, req.right], sim["N"]).to_complex().real
        except ValueError:
            target = comb.to_complex().real  # out of oracle guards: compare against the limit
        within = abs(est - target) <= 4 * se
        comparisons.append(
            {
                "engines": ["monte-carlo", "oracle-k2"],
                "values": [est, target],
                "se": se,
                "verdict": "WITHIN-SE" if within else "MISMATCH",
            }
        )

    ok = all(c["verdict"] in ("EXACT-EQUAL", "WITHIN-SE") for c in comparisons)
    report = {"flavor": flavor, "comparisons": comparisons, "overall": "PASS" if ok else "FAIL"}
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0 if ok else 1


def cmd_plotdata(args) -> int:
    try:
        with open(args.table) as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read table {args.table}: {exc}") from exc
    if not rows:
        raise InputError("empty convergence table")
    residual_lines = ["N,residual"]
    k3_lines = ["N,abs_k3"]
    for row in rows:
        try:
            n = int(row["N"])
            residual = float(row["k2"]) - float(row["theory_limit"])
            k3 = abs(float(row["k3"]))
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed table row {row}: {exc}") from exc
        residual_lines.append(f"{n},{residual!r}")
        k3_lines.append(f"{n},{k3!r}")
    with open(args.out + "_residual.csv", "w") as fh:
        fh.write("\n".join(residual_lines) + "\n")
    with open(args.out + "_k3.csv", "w") as fh:
        fh.write("\n".join(k3_lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracefluct",
        description="Second-order trace-fluctuation workbench: enumeration, exact covariances, Fock-side evaluation, simulation, and cross-engine comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="count/list annular non-crossing objects")
    p.add_argument("--profile", required=True, help="comma-separated circle sizes, e.g. 2,1")
    p.add_argument("--kind", required=True, choices=["pairings", "partitions", "permutations"])
    p.add_argument("--list", action="store_true", help="include the full element list")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("covariance", help="exact limit covariance of two trace words")
    p.add_argument("--flavor", choices=["gaussian", "wishart"])
    p.add_argument("--input", required=True, help="JSON request file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_covariance)

    p = sub.add_parser("fock", help="cyclic-Fock-side evaluation of the fluctuation")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_fock)

    p = sub.add_parser("simulate", help="Monte Carlo convergence table (CSV)")
    p.add_argument("--input", required=True)
    p.add_argument("--N", required=True, help="comma-separated matrix sizes")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("oracle", help="exact finite-N k2 values")
    p.add_argument("--input", required=True)
    p.add_argument("--N", required=True, help="comma-separated matrix sizes")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("compare", help="cross-engine comparison report")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("plotdata", help="emit (N, residual) and (N, |k3|) series from a simulate CSV")
    p.add_argument("--table", required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(fn=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
