"""``metasum`` command line: single sums, verification sweeps, tables and crystal data.

Exit codes: 0 on success, 1 when a comparison or sweep finds a
counterexample, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import sys
from collections.abc import Sequence
from dataclasses import dataclass

from metasum import sweeps
from metasum.charsums import PrimeContext
from metasum.crystal import (
    GL4_WORD,
    LusztigDatum,
    lusztig_to_string,
    pattern_from_string,
)
from metasum.cyclotomic import CycNum
from metasum.expsum import (
    IllDefinedSumError,
    SumSpec,
    brute_force_H,
    gl4_brute_force,
    gl4_closed_form,
    phifun_closed_form,
)
from metasum.root_system import ParabolicData, build_parabolic, build_root_datum

__all__ = ["SweepConfig", "build_parser", "main"]

USAGE_ERROR = 2


@dataclass(frozen=True)
class SweepConfig:
    """Everything a sweep or table needs, validated once."""

    p: int
    n: int
    cartan_type: str
    rank: int
    node: int
    ell_max: int
    m_values: tuple[tuple[int, ...], ...]
    output_format: str = "csv"
    workers: int = 1
    digits: int = 12

    def __post_init__(self) -> None:
        if self.ell_max < 0:
            raise ValueError("--ell-max must be nonnegative")
        if any(x < 0 for m in self.m_values for x in m):
            raise ValueError("m entries must be nonnegative")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")

    @property
    def context(self) -> PrimeContext:
        return PrimeContext(self.p, self.n)

    @property
    def parabolic(self) -> ParabolicData:
        return build_parabolic(build_root_datum(self.cartan_type, self.rank), self.node)


class UsageError(Exception):
    pass


def _int_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--p", type=int, default=7, help="prime with 2n | p - 1 (default 7)")
    sub.add_argument("--n", type=int, default=3, help="cover degree (default 3)")
    sub.add_argument("--type", dest="cartan_type", default="A", help="Cartan type (default A)")
    sub.add_argument("--rank", type=int, default=3, help="rank of the root system (default 3)")
    sub.add_argument("--node", type=int, default=2, help="omitted simple root (default 2)")
    sub.add_argument("--digits", type=int, default=12, help="digits in approximate output")
    sub.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metasum",
        description="Exact metaplectic exponential sums, their Gauss-sum evaluations and checks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("sum", help="evaluate one sum S_{l,m}")
    _add_common(s)
    s.add_argument("--ell", type=_int_vector, required=True, help="l vector, e.g. 1,0,2,1")
    s.add_argument("--m", type=_int_vector, help="m vector (default all zeros)")
    s.add_argument("--method", choices=("brute", "closed", "both"), default="brute")

    v = subs.add_parser("verify", help="run an exhaustive check of one statement")
    _add_common(v)
    v.add_argument("theorem", nargs="?", help="statement name: " + ", ".join(sweeps.THEOREMS))
    v.add_argument("--theorem", dest="theorem_flag", help="same as the positional name")
    v.add_argument("--ell-max", type=int, default=2, help="bound on every l entry")
    v.add_argument("--m", type=_int_vector, help="a single m vector")
    v.add_argument("--m-max", type=int, default=1, help="bound on m entries when --m is absent")
    v.add_argument("--k-max", type=int, default=6, help="largest weight for cancel")
    v.add_argument("--primes", type=_int_vector, default=(7, 13), help="two primes for twisted checks")
    v.add_argument("--samples", type=int, default=200, help="sampled splits for twisted checks")
    v.add_argument("--data-max", type=int, default=2, help="data bound for transition-inverse")
    v.add_argument("--format", dest="output_format", choices=("csv", "jsonl"), default="jsonl")

    t = subs.add_parser("table", help="emit S_{l,m} over a grid, grouped by total weight")
    _add_common(t)
    t.add_argument("--ell-max", type=int, default=1, help="bound on every l entry")
    t.add_argument("--m", type=_int_vector, help="m vector (default all zeros)")
    t.add_argument("--weight", type=int, help="only rows with sum(l) equal to this")
    t.add_argument("--format", dest="output_format", choices=("csv", "jsonl"), default="csv")

    c = subs.add_parser("crystal", help="string data and BZL pattern from JSON {word, data}")
    c.add_argument("--input", help="JSON text or @file; stdin when omitted")
    c.add_argument("--m", type=_int_vector, default=(0, 0, 0), help="highest weight for the GL(4) pattern")

    r = subs.add_parser("root-system", help="dump parabolic data as JSON")
    r.add_argument("--type", dest="cartan_type", default="A")
    r.add_argument("--rank", type=int, default=3)
    r.add_argument("--node", type=int, default=2)
    r.add_argument("--q", type=_int_vector, help="quadratic-form values on simple coroots")
    return parser


# -- helpers -------------------------------------------------------------------------


def _context(args) -> PrimeContext:
    try:
        return PrimeContext(args.p, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parabolic(args) -> ParabolicData:
    try:
        return build_parabolic(build_root_datum(args.cartan_type, args.rank), args.node)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _is_gl4(pd: ParabolicData) -> bool:
    return (pd.datum.cartan_type, pd.rank, pd.omitted_node) == ("A", 3, 2)


def _m_vector(args, pd: ParabolicData) -> tuple[int, ...]:
    m = tuple(args.m) if args.m is not None else (0,) * pd.rank
    if len(m) != pd.rank:
        raise UsageError(f"--m needs {pd.rank} entries")
    if min(m, default=0) < 0:
        raise UsageError("--m entries must be nonnegative")
    return m


def _value_record(value: CycNum, digits: int) -> dict:
    z = value.to_complex(digits)
    return {
        "value": value.to_json(digits),
        "approx_re": float(f"{z.real:.{digits}g}"),
        "approx_im": float(f"{z.imag:.{digits}g}"),
    }


def _evaluate(pd: ParabolicData, ctx: PrimeContext, ell, m, method: str):
    """(value, label) for one point; label names the closed-form case when known."""
    if method == "closed":
        if _is_gl4(pd):
            return gl4_closed_form(ctx, ell, m)
        closed = phifun_closed_form(SumSpec(pd, ctx, ell, m))
        if closed is None:
            raise UsageError("no closed form applies at this point for this parabolic")
        return closed, "phifun"
    if _is_gl4(pd):
        return gl4_brute_force(ctx, ell, m), gl4_closed_form(ctx, ell, m)[1]
    return brute_force_H(SumSpec(pd, ctx, ell, m)), "brute"


# -- subcommands -----------------------------------------------------------------------


def cmd_sum(args) -> int:
    ctx = _context(args)
    pd = _parabolic(args)
    ell = tuple(args.ell)
    if len(ell) != pd.size or min(ell, default=0) < 0:
        raise UsageError(f"--ell needs {pd.size} nonnegative entries")
    m = _m_vector(args, pd)
    methods = ("brute", "closed") if args.method == "both" else (args.method,)
    out = {"p": ctx.p, "n": ctx.n, "ell": list(ell), "m": list(m)}
    values = {}
    for method in methods:
        value, label = _evaluate(pd, ctx, ell, m, method)
        values[method] = value
        out[method] = {**_value_record(value, args.digits), "case_label": label}
    status = 0
    if args.method == "both":
        out["match"] = values["brute"].equals(values["closed"])
        status = 0 if out["match"] else 1
    print(json.dumps(out, sort_keys=True))
    return status


def _ms_for(args, rank: int) -> list[tuple[int, ...]]:
    if args.m is not None:
        if len(args.m) != rank:
            raise UsageError(f"--m needs {rank} entries")
        return [tuple(args.m)]
    return sweeps.box(args.m_max, rank)


def _run_sweep(name: str, args) -> sweeps.SweepResult:
    if name in ("pairing-nonneg", "dmod-identity", "structure"):
        fn = {
            "pairing-nonneg": sweeps.sweep_pairing_nonneg,
            "dmod-identity": sweeps.sweep_dmod_identity,
            "structure": sweeps.sweep_structure,
        }[name]
        return fn(args.rank)
    if name == "polytope-equiv":
        return sweeps.sweep_polytope_equiv(args.m_max)
    if name == "transition-inverse":
        return sweeps.sweep_transition_inverse(args.rank, args.data_max)
    if name == "gauss":
        return sweeps.sweep_gauss_identities([_context(args)])
    if name in ("twistmult-d", "twistmult-t"):
        if len(args.primes) != 2:
            raise UsageError("--primes needs exactly two primes")
        try:
            contexts = {q: PrimeContext(q, args.n) for q in args.primes}
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        fn = sweeps.sweep_twisted_d if name == "twistmult-d" else sweeps.sweep_twisted_t
        return fn(_parabolic(args), contexts, args.samples)
    ctx = _context(args)
    pd = _parabolic(args)
    ms = _ms_for(args, pd.rank)
    if name in ("phifun", "vanish"):
        fn = sweeps.sweep_phifun if name == "phifun" else sweeps.sweep_vanish
        return fn(pd, ctx, args.ell_max, ms)
    if not _is_gl4(pd):
        raise UsageError(f"{name} is specific to type A rank 3 node 2")
    if name == "cancel":
        return sweeps.sweep_cancel(ctx, ms, args.k_max)
    matrix = sweeps.GL4Matrix.compute(ctx, args.ell_max, ms, args.workers)
    return {
        "support": sweeps.sweep_support,
        "closed-form": sweeps.sweep_closed_form,
        "region-b": sweeps.sweep_region_b,
        "stringmatch": sweeps.sweep_stringmatch,
    }[name](matrix)


def cmd_verify(args) -> int:
    name = args.theorem_flag or args.theorem
    if not name:
        raise UsageError("name a statement to verify")
    if name not in sweeps.THEOREMS:
        raise UsageError(f"unknown statement {name!r}; choose from {', '.join(sweeps.THEOREMS)}")
    result = _run_sweep(name, args)
    if args.output_format == "jsonl":
        for point in result.counterexamples:
            print(json.dumps({"counterexample": point}, sort_keys=True))
        print(json.dumps({"theorem": name, "checked": result.checked,
                          "counterexamples": len(result.counterexamples),
                          "report": result.report}, sort_keys=True, default=str))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["theorem", "checked", "counterexamples"])
        writer.writerow([name, result.checked, len(result.counterexamples)])
        for point in result.counterexamples:
            writer.writerow(["counterexample", json.dumps(point, sort_keys=True)])
    return 0 if result.ok else 1


def _table_row(ell, ctx: PrimeContext, pd: ParabolicData, m) -> tuple[CycNum, str]:
    try:
        return _evaluate(pd, ctx, ell, m, "brute")
    except IllDefinedSumError:
        return CycNum.from_int(0), "ill-defined"


def table_rows(config: SweepConfig, weight: int | None = None):
    """Yield row dicts (and one total per weight group) in emission order."""
    pd = config.parabolic
    ctx = config.context
    N, r = pd.size, pd.rank
    ells = sweeps.box(config.ell_max, N)
    if weight is not None:
        ells = [e for e in ells if sum(e) == weight]
    ells.sort(key=lambda e: (sum(e), e))
    for m in config.m_values:
        results = sweeps.parallel_map(
            functools.partial(_table_row, ctx=ctx, pd=pd, m=m), ells, config.workers
        )
        group, total = None, CycNum.from_int(0)
        for ell, (value, label) in zip(ells, results):
            if group is not None and sum(ell) != group:
                yield _total_row(N, r, m, group, total, config.digits)
                total = CycNum.from_int(0)
            group = sum(ell)
            total = total + value
            yield _row(ell, m, label, value, config.digits)
        if group is not None:
            yield _total_row(N, r, m, group, total, config.digits)


def _row(ell, m, label, value: CycNum, digits: int) -> dict:
    rec = _value_record(value, digits)
    row = {f"ell{i + 1}": x for i, x in enumerate(ell)}
    row.update({f"m{j + 1}": x for j, x in enumerate(m)})
    row.update(case_label=label, value_json=json.dumps(rec["value"], sort_keys=True),
               approx_re=rec["approx_re"], approx_im=rec["approx_im"])
    return row


def _total_row(N: int, r: int, m, weight: int, total: CycNum, digits: int) -> dict:
    row = _row([""] * N, m, f"total:weight={weight}", total, digits)
    row["weight"] = weight
    return row


def cmd_table(args) -> int:
    pd = _parabolic(args)
    ctx = _context(args)
    try:
        config = SweepConfig(ctx.p, ctx.n, args.cartan_type, args.rank, args.node, args.ell_max,
                             (_m_vector(args, pd),), args.output_format, args.workers, args.digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    columns = [f"ell{i + 1}" for i in range(pd.size)] + [f"m{j + 1}" for j in range(pd.rank)]
    columns += ["case_label", "value_json", "approx_re", "approx_im"]
    if config.output_format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in table_rows(config, args.weight):
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        for row in table_rows(config, args.weight):
            rec = dict(row)
            rec["value"] = json.loads(rec.pop("value_json"))
            if "weight" in rec:
                rec = {k: v for k, v in rec.items() if not k.startswith("ell")}
                rec["group_total"] = True
            print(json.dumps(rec, sort_keys=True))
    return 0


def _read_json(source: str | None) -> dict:
    if source is None:
        text = sys.stdin.read()
    elif source.startswith("@"):
        with open(source[1:], encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input is not valid JSON: {exc}") from exc


def cmd_crystal(args) -> int:
    payload = _read_json(args.input)
    try:
        word, data = tuple(payload["word"]), tuple(payload["data"])
        string = lusztig_to_string(LusztigDatum(word, data))
    except (KeyError, TypeError) as exc:
        raise UsageError("input must be an object with 'word' and 'data' lists") from exc
    except (ValueError, NotImplementedError) as exc:
        raise UsageError(str(exc)) from exc
    out: dict = {"word": list(word), "string_data": list(string.data),
                 "pattern": None, "decorations": None, "bounds": None}
    if word == GL4_WORD:
        if len(args.m) != 3:
            raise UsageError("--m needs 3 entries")
        pattern = pattern_from_string(string.data[2:], args.m)
        out.update(pattern=list(pattern.entries), decorations=list(pattern.decorations),
                   bounds=[list(b) for b in pattern.bounds], in_polytope=pattern.valid)
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_rootsystem(args) -> int:
    try:
        datum = build_root_datum(args.cartan_type, args.rank)
        pd = build_parabolic(datum, args.node, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = pd.to_json()
    out["positive_roots"] = [list(r) for r in datum.positive_roots]
    out["highest_root"] = list(datum.highest_root)
    print(json.dumps(out, sort_keys=True))
    return 0


COMMANDS = {
    "sum": cmd_sum,
    "verify": cmd_verify,
    "table": cmd_table,
    "crystal": cmd_crystal,
    "root-system": cmd_rootsystem,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"metasum: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
