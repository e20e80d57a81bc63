"""Command-line front end.

Parameter files are UTF-8 text, one declaration per line, ``#`` starts a
comment::

    cuspidal rho d=1 kind=orth
    group hasse=+ rG=sym2 star=orth
    block rho a=5 b=3
    block rho A=3/2 B=1/2 zeta=-
    point 1+ 0-
    target rho a0=5 s0=3/2

Exit codes: 0 success, 1 parse error, 2 precondition error, 3 verification
failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .certio import to_json, to_text
from .halfint import HalfInt
from .lfactor import contribution_table, order_at, r_of_psi
from .packet import PacketPoint, enumerate_packet
from .params import (
    CuspidalLabel,
    GroupType,
    JordanBlock,
    ParameterError,
    PsiParameter,
    bad_parity_blocks,
    block_from_ab,
    canonical_order,
    is_discrete_diagonal,
    measures,
    order_violations,
)
from .reduce import (
    ReductionError,
    Target,
    certificate_problems,
    make_target,
    run_reduction,
)

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass
class ParamFile:
    group: GroupType = field(default_factory=GroupType)
    cuspidals: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)
    point: Optional[PacketPoint] = None
    target: Optional[tuple] = None   # (rho0, a0, s0)

    def psi(self, sort: bool = False) -> PsiParameter:
        blocks = canonical_order(self.blocks) if sort else tuple(self.blocks)
        return PsiParameter(blocks, self.group, check_order=False)

    def sorted_point(self) -> Optional[PacketPoint]:
        if self.point is None:
            return None
        order = sorted(range(len(self.blocks)), key=lambda i: (
            self.blocks[i].B, self.blocks[i].A, self.blocks[i].zeta, self.blocks[i].rho.id))
        return PacketPoint([self.point.t[i] for i in order], [self.point.eta[i] for i in order])


def _sign(tok: str, lineno: int) -> int:
    if tok in ("+", "+1", "1"):
        return 1
    if tok in ("-", "-1"):
        return -1
    raise ParseError(lineno, f"expected a sign, got {tok!r}")


def _kv(tokens, lineno: int) -> dict:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or not val:
            raise ParseError(lineno, f"expected key=value, got {tok!r}")
        out[key] = val
    return out


def _int(val: str, lineno: int, what: str) -> int:
    try:
        return int(val)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {val!r}") from None


def _half(val: str, lineno: int, what: str) -> HalfInt:
    try:
        return HalfInt(val)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"{what} must be a half-integer, got {val!r}") from None


def _point_entry(tok: str, lineno: int) -> tuple:
    if len(tok) < 2 or tok[-1] not in "+-?":
        raise ParseError(lineno, f"point entries look like 1+ or 0-, got {tok!r}")
    t = None if tok[:-1] == "?" else _int(tok[:-1], lineno, "t")
    e = None if tok[-1] == "?" else (1 if tok[-1] == "+" else -1)
    return t, e


def parse_param_text(text: str) -> ParamFile:
    pf = ParamFile()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "cuspidal":
                if not rest:
                    raise ParseError(lineno, "cuspidal needs an id")
                kv = _kv(rest[1:], lineno)
                if rest[0] in pf.cuspidals:
                    raise ParseError(lineno, f"label {rest[0]!r} declared twice")
                pf.cuspidals[rest[0]] = CuspidalLabel(rest[0], _int(kv.get("d", "1"), lineno, "d"),
                                                      kv.get("kind", "orth"))
            elif head == "group":
                kv = _kv(rest, lineno)
                pf.group = GroupType(_sign(kv.get("hasse", "+"), lineno), kv.get("rG", "sym2"),
                                     kv.get("star", "orth"))
            elif head == "block":
                if not rest:
                    raise ParseError(lineno, "block needs a label")
                rho = _label(pf, rest[0], lineno)
                kv = _kv(rest[1:], lineno)
                if set(kv) == {"a", "b"}:
                    blk = block_from_ab(rho, _int(kv["a"], lineno, "a"), _int(kv["b"], lineno, "b"))
                elif set(kv) in ({"A", "B", "zeta"}, {"A", "B"}):
                    blk = JordanBlock(rho, _half(kv["A"], lineno, "A"), _half(kv["B"], lineno, "B"),
                                      _sign(kv.get("zeta", "+"), lineno))
                else:
                    raise ParseError(lineno, "block takes a= b= or A= B= zeta=")
                pf.blocks.append(blk)
            elif head == "point":
                entries = [_point_entry(tok, lineno) for tok in rest]
                pf.point = PacketPoint([e[0] for e in entries], [e[1] for e in entries])
            elif head == "target":
                if not rest:
                    raise ParseError(lineno, "target needs a label")
                rho0 = _label(pf, rest[0], lineno)
                kv = _kv(rest[1:], lineno)
                if "a0" not in kv or "s0" not in kv:
                    raise ParseError(lineno, "target needs a0= and s0=")
                pf.target = (rho0, _int(kv["a0"], lineno, "a0"), _half(kv["s0"], lineno, "s0"))
            else:
                raise ParseError(lineno, f"unknown declaration {head!r}")
        except ParseError:
            raise
        except ParameterError as exc:
            raise ParseError(lineno, str(exc)) from None
    if pf.point is not None and len(pf.point) != len(pf.blocks):
        raise ParseError(0, f"point has {len(pf.point)} entries for {len(pf.blocks)} blocks")
    return pf


def _label(pf: ParamFile, ident: str, lineno: int) -> CuspidalLabel:
    if ident not in pf.cuspidals:
        pf.cuspidals[ident] = CuspidalLabel(ident)
    return pf.cuspidals[ident]


def format_param_text(psi: PsiParameter, point=None, target=None) -> str:
    """Inverse of :func:`parse_param_text` for a parameter, point and target."""
    labels = {b.rho.id: b.rho for b in psi.blocks}
    if target is not None:
        labels.setdefault(target[0].id, target[0])
    g = psi.group
    lines = [f"cuspidal {lab.id} d={lab.d_rho} kind={lab.kind}" for lab in labels.values()]
    lines.append(f"group hasse={'+' if g.hasse_sign > 0 else '-'} rG={g.rG_kind} star={g.star_kind}")
    for b in psi.blocks:
        lines.append(f"block {b.rho.id} a={b.a} b={b.b}")
    if point is not None:
        lines.append("point " + " ".join(str(point).strip("[]").split()))
    if target is not None:
        lines.append(f"target {target[0].id} a0={target[1]} s0={target[2]}")
    return "\n".join(lines) + "\n"


# -- commands ---------------------------------------------------------------------------

class Precondition(Exception):
    pass


def _load(path: str, sort: bool) -> ParamFile:
    return parse_param_text(Path(path).read_text(encoding="utf-8"))


def _psi_checked(pf: ParamFile, sort: bool) -> tuple:
    psi = pf.psi(sort)
    bad = order_violations(psi.blocks)
    if bad:
        i, j = bad[0]
        raise Precondition(f"order violates (P): block {i} {psi[i].ab_str()} must come after "
                           f"block {j} {psi[j].ab_str()} (use --sort to reorder)")
    point = pf.sorted_point() if sort else pf.point
    return PsiParameter(psi.blocks, psi.group), point


def _target(pf: ParamFile, sort: bool, s0=None) -> Target:
    if pf.target is None:
        raise Precondition("no target line in the file")
    psi, point = _psi_checked(pf, sort)
    rho0, a0, fs0 = pf.target
    return make_target(psi, point, rho0, a0, fs0 if s0 is None else s0)


def cmd_validate(pf: ParamFile, args) -> tuple:
    psi = pf.psi(args.sort)
    bad_order = order_violations(psi.blocks)
    bad_par = bad_parity_blocks(psi)
    m = measures(psi)
    report = {
        "blocks": [b.ab_str() for b in psi.blocks],
        "order_ok": not bad_order,
        "order_violations": [[i, j] for i, j in bad_order],
        "bad_parity": bad_par,
        "discrete_diagonal": is_discrete_diagonal(psi),
        "measures": {"ell_plus": m.ell_plus, "ell_minus": m.ell_minus, "n_minus": m.n_minus},
    }
    lines = []
    if bad_order:
        i, j = bad_order[0]
        lines.append(f"order (P) violated: block {i} {psi[i].ab_str()} must come after block {j} {psi[j].ab_str()}")
    for i in bad_par:
        lines.append(f"bad parity: block {i} {psi[i].ab_str()}")
    if not bad_order:
        lines.append("OK")
    lines.append(f"discrete diagonal: {'yes' if report['discrete_diagonal'] else 'no'}")
    lines.append(f"ell(+)={m.ell_plus} ell(-)={m.ell_minus} n(-)={m.n_minus}")
    return report, lines, EXIT_OK if not bad_order else EXIT_PRECONDITION


def cmd_packet(pf: ParamFile, args) -> tuple:
    psi, _ = _psi_checked(pf, args.sort)
    if not is_discrete_diagonal(psi):
        raise Precondition("restriction to the diagonal has multiplicity; enumerate a dominating "
                           "parameter (build_dominant) and descend with jac_psi_descent")
    rows = enumerate_packet(psi)
    sgn = lambda e: "+" if e > 0 else "-"  # noqa: E731
    report = {"count": len(rows), "points": [
        {"point": str(r.point), "epsilon": [sgn(e) for e in r.epsilons],
         "center": sgn(r.center), "epsilon_s_psi": sgn(r.epsilon_s_psi)} for r in rows]}
    lines = [f"{len(rows)} point(s)"]
    for r in rows:
        lines.append(f"{r.point}  eps={''.join(sgn(e) for e in r.epsilons) or '-'}  "
                     f"center={sgn(r.center)}  eps(s_psi)={sgn(r.epsilon_s_psi)}")
    return report, lines, EXIT_OK


def cmd_order(pf: ParamFile, args) -> tuple:
    s0 = HalfInt(args.s0) if args.s0 is not None else None
    t = _target(pf, args.sort, s0)
    r = r_of_psi(t.psi, t.rho0, t.a0)
    res = order_at(r, t.s0)
    terms = [f"{term}^{e}" for term, e in res.contributing_terms]
    report = {"s0": str(t.s0), "order": res.lo if res.exact else None,
              "interval": [res.lo, res.hi], "contributing_terms": terms, "table": []}
    lines = [f"order of r(s,psi) at s0={t.s0}: {res}"]
    if t.s0 == 0:
        lines.append("s0 = 0: the L(rho0, r_G, 2s) term may or may not have a pole; order is an interval")
    lines += [f"  {x}" for x in terms]
    if t.b0 >= 2:
        for b in t.psi.blocks:
            cell = contribution_table(b, t.a0, t.b0, t.rho0)
            report["table"].append({"block": b.ab_str(), "pole": cell})
            lines.append(f"  table {b.ab_str()}: {'pole' if cell else '-'}")
    return report, lines, EXIT_OK


def cmd_table(pf: ParamFile, args) -> tuple:
    t = _target(pf, args.sort)
    if t.b0 < 2:
        raise Precondition("the table needs s0 > 0")
    rows, lines = [], [f"a0={t.a0} b0={t.b0} A0={t.A0} B0={t.B0} zeta0={'+' if t.zeta0 > 0 else '-'}"]
    for b in t.psi.blocks:
        cell = contribution_table(b, t.a0, t.b0, t.rho0)
        order = order_at(r_of_psi([b], t.rho0, t.a0, with_rg=False), t.s0).order
        rows.append({"block": b.ab_str(), "pole": cell, "order": order})
        lines.append(f"{b.ab_str():>16}  {str(b):>26}  table={'pole' if cell else '-':>4}  order={order}")
    return {"rows": rows}, lines, EXIT_OK


def _reduce_one(t: Target) -> tuple:
    cert = run_reduction(t)
    return cert, certificate_problems(cert)


def cmd_reduce(pf: Optional[ParamFile], args) -> tuple:
    if args.selftest:
        return _selftest(args.selftest, args.seed)
    t = _target(pf, args.sort)
    cert, problems = _reduce_one(t)
    tags = {}
    for s in cert.steps:
        tags[s.case_tag] = tags.get(s.case_tag, 0) + 1
    out = args.out or str(Path(args.file).with_suffix(""))
    Path(out + ".cert.txt").write_text(to_text(cert), encoding="utf-8")
    Path(out + ".cert.json").write_text(to_json(cert, indent=1), encoding="utf-8")
    report = {"verified": not problems, "problems": problems, "nodes": len(cert.nodes()),
              "steps": len(cert.steps), "leaves": len(cert.leaves()), "depth": cert.depth(),
              "cases": dict(sorted(tags.items())), "files": [out + ".cert.txt", out + ".cert.json"]}
    lines = [f"target {t}",
             f"{len(cert.nodes())} node(s), {len(cert.steps)} step(s), {len(cert.leaves())} leaf step(s), depth {cert.depth()}",
             "cases: " + ", ".join(f"{k}={v}" for k, v in sorted(tags.items())),
             f"wrote {out}.cert.txt and {out}.cert.json",
             "verified" if not problems else "VERIFICATION FAILED"]
    lines += problems
    return report, lines, EXIT_OK if not problems else EXIT_VERIFY


def _selftest(n: int, seed: int) -> tuple:
    from .sampling import random_target
    rng = random.Random(seed)
    start = time.perf_counter()
    failures = []
    for k in range(n):
        t = random_target(rng)
        try:
            _, problems = _reduce_one(t)
        except ParameterError as exc:
            problems = [f"reduction failed: {exc}"]
        if problems:
            failures.append({"index": k, "target": t.text(), "problems": problems[:3]})
    elapsed = time.perf_counter() - start
    report = {"targets": n, "seed": seed, "failures": failures, "seconds": round(elapsed, 3)}
    lines = [f"{n - len(failures)}/{n} random targets verified in {elapsed:.2f}s (seed {seed})"]
    for f in failures[:10]:
        lines.append(f"  #{f['index']} {f['target']}: {f['problems'][0]}")
    return report, lines, EXIT_OK if not failures else EXIT_VERIFY


def cmd_selftest(pf, args) -> tuple:
    return _selftest(args.n, args.seed)


COMMANDS = {"validate": cmd_validate, "packet": cmd_packet, "order": cmd_order,
            "table": cmd_table, "reduce": cmd_reduce, "selftest": cmd_selftest}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apacket", description="Arthur packet bookkeeping and reduction certificates")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, help_, optional=False):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", nargs="?" if optional else None)
        sp.add_argument("--sort", action="store_true", help="reorder blocks canonically instead of rejecting")
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    with_file("validate", "parity, order, discreteness and measures")
    with_file("packet", "list the packet points")
    sp = with_file("order", "order of r(s,psi) at s0")
    sp.add_argument("--s0", help="override the target's s0")
    with_file("table", "pole contribution table for each block")
    sp = with_file("reduce", "build and verify a reduction certificate", optional=True)
    sp.add_argument("--out", help="output prefix for the certificate files")
    sp.add_argument("--selftest", type=int, metavar="N", help="verify N random targets instead")
    sp.add_argument("--seed", type=int, default=0)
    sp = sub.add_parser("selftest", help="verify certificates for random targets")
    sp.add_argument("n", type=int, nargs="?", default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command]
    needs_file = args.command not in ("selftest",) and not getattr(args, "selftest", None)
    try:
        pf = None
        if needs_file:
            if not args.file:
                raise Precondition("a parameter file is required")
            pf = _load(args.file, args.sort)
        report, lines, code = fn(pf, args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Precondition, ReductionError, ParameterError) as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.json:
        print(json.dumps(report, indent=1, sort_keys=True, default=str))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
