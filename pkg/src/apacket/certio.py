"""Deterministic serialization of certificates: line-oriented text and JSON.

Text layout (version 1)::

    apacket-certificate 1
    label <id> <d_rho> <kind>
    group <hasse> <rG> <star>
    node <n> psi=<rho:A:B:zeta,...> point=<t:eta,...> rho0=<id> a0=<a0> s0=<s0>
    step <n>.<k> <tag> before=<digest> point=... pos=... extra=... after=<m|-> seg=... L=...

Nodes are listed parents first; a step's ``after`` names the child node.
Ledger entries are ``kind:role:expected:label:terms`` with the label
percent-encoded and terms ``kind~rho~rho2~shift~exponent``.
"""

from __future__ import annotations

import json
from urllib.parse import quote, unquote

from .halfint import HalfInt
from .lfactor import LFormalProduct, LTerm
from .multiseg import LadderMatrix
from .packet import PacketPoint
from .params import CuspidalLabel, GroupType, JordanBlock, ParameterError, PsiParameter
from .reduce import Certificate, CertNode, LedgerEntry, ReductionStep, Target

FORMAT = "apacket-certificate"
VERSION = 1


class CertificateFormatError(ParameterError):
    """Malformed certificate text or JSON."""


# -- small encoders ---------------------------------------------------------------

def _sign(e) -> str:
    return "?" if e is None else ("+" if e > 0 else "-")


def _unsign(s: str):
    return None if s == "?" else (1 if s == "+" else -1)


def _opt_int(s: str):
    return None if s == "?" else int(s)


def _h(s: str) -> HalfInt:
    return HalfInt(s)


def _enc_point(p: PacketPoint) -> str:
    return ",".join(f"{'?' if t is None else t}:{_sign(e)}" for t, e in zip(p.t, p.eta))


def _dec_point(s: str) -> PacketPoint:
    if not s:
        return PacketPoint((), ())
    pairs = [tok.split(":") for tok in s.split(",")]
    return PacketPoint([_opt_int(t) for t, _ in pairs], [_unsign(e) for _, e in pairs])


def _enc_blocks(psi: PsiParameter) -> str:
    return ",".join(f"{b.rho.id}:{b.A}:{b.B}:{_sign(b.zeta)}" for b in psi.blocks)


def _enc_segment(seg: LadderMatrix) -> str:
    rows = ":".join(f"{s}:{e}" for s, e in seg.rows)
    return f"{seg.rho.id}:{seg.d}:{rows}"


def _enc_product(prod: LFormalProduct) -> str:
    return ",".join(f"{t.kind}~{t.rho.id}~{t.rho2.id}~{t.shift}~{e}" for t, e in prod.items())


def _enc_expected(x) -> str:
    return f"{x[0]}..{x[1]}" if isinstance(x, tuple) else str(x)


def _dec_expected(s: str):
    if ".." in s:
        lo, hi_ = s.split("..")
        return (int(lo), int(hi_))
    return int(s)


def _enc_entry(e: LedgerEntry) -> str:
    return f"{e.kind}:{e.role}:{_enc_expected(e.expected)}:{quote(e.label, safe='')}:{_enc_product(e.product)}"


class _Context:
    def __init__(self, labels: dict, group: GroupType):
        self.labels = labels
        self.group = group

    def label(self, ident: str) -> CuspidalLabel:
        try:
            return self.labels[ident]
        except KeyError:
            raise CertificateFormatError(f"undeclared label {ident!r}") from None

    def blocks(self, s: str) -> list:
        out = []
        for tok in filter(None, s.split(",")):
            rho, A, B, z = tok.split(":")
            out.append(JordanBlock(self.label(rho), _h(A), _h(B), _unsign(z)))
        return out

    def segment(self, s: str) -> LadderMatrix:
        parts = s.split(":")
        rho, d, vals = parts[0], int(parts[1]), parts[2:]
        rows = [(_h(vals[i]), _h(vals[i + 1])) for i in range(0, len(vals), 2)]
        return LadderMatrix(self.label(rho), rows, d)

    def product(self, s: str) -> LFormalProduct:
        terms = []
        for tok in filter(None, s.split(",")):
            kind, r1, r2, shift, e = tok.split("~")
            terms.append((LTerm(self.label(r1), self.label(r2), _h(shift), kind), int(e)))
        return LFormalProduct(terms)

    def entry(self, s: str) -> LedgerEntry:
        kind, role, expected, label, terms = s.split(":", 4)
        return LedgerEntry(kind, role, unquote(label), self.product(terms), _dec_expected(expected))


def _collect(cert: Certificate):
    nodes = cert.nodes()
    index = {id(n): i for i, n in enumerate(nodes)}
    labels, groups = {}, set()
    for n in nodes:
        t = n.target
        groups.add(t.psi.group)
        labels[t.rho0.id] = t.rho0
        for b in t.psi.blocks:
            labels[b.rho.id] = b.rho
    if len(groups) > 1:
        raise CertificateFormatError("all targets in a certificate must share the group")
    group = groups.pop() if groups else GroupType()
    return nodes, index, dict(sorted(labels.items())), group


# -- text ------------------------------------------------------------------------------

def _enc_target(t: Target) -> str:
    return (f"psi={_enc_blocks(t.psi)} point={_enc_point(t.point)} "
            f"rho0={t.rho0.id} a0={t.a0} s0={t.s0}")


def to_text(cert: Certificate) -> str:
    nodes, index, labels, group = _collect(cert)
    lines = [f"{FORMAT} {VERSION}"]
    for lab in labels.values():
        lines.append(f"label {lab.id} {lab.d_rho} {lab.kind}")
    lines.append(f"group {_sign(group.hasse_sign)} {group.rG_kind} {group.star_kind}")
    for i, n in enumerate(nodes):
        lines.append(f"node {i} {_enc_target(n.target)}")
    for i, n in enumerate(nodes):
        for k, (step, child) in enumerate(zip(n.steps, n.children)):
            after = "-" if child is None else str(index[id(child)])
            parts = [f"step {i}.{k} {step.case_tag}",
                     f"before={step.before.digest()}",
                     f"point={_enc_point(step.before.point)}",
                     f"pos={','.join(map(str, step.pos))}",
                     f"extra={','.join(map(str, step.extra))}",
                     f"after={after}"]
            parts += [f"seg={_enc_segment(s)}" for s in step.segments]
            parts += [f"L={_enc_entry(e)}" for e in step.ledger]
            lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _fields(tokens) -> list:
    out = []
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise CertificateFormatError(f"expected key=value, got {tok!r}")
        out.append((key, val))
    return out


def _extra_value(s: str):
    return int(s) if s.lstrip("-").isdigit() else _h(s)


def from_text(text: str) -> Certificate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != [FORMAT, str(VERSION)]:
        raise CertificateFormatError("missing or unsupported header")
    labels, group = {}, GroupType()
    targets, raw_steps = [], []
    for ln in lines[1:]:
        head, *rest = ln.split()
        if head == "label":
            ident, d, kind = rest
            labels[ident] = CuspidalLabel(ident, int(d), kind)
        elif head == "group":
            group = GroupType(_unsign(rest[0]), rest[1], rest[2])
        elif head == "node":
            targets.append(dict(_fields(rest[1:])))
        elif head == "step":
            raw_steps.append(rest)
        else:
            raise CertificateFormatError(f"unknown line kind {head!r}")
    ctx = _Context(labels, group)

    def target(f: dict, point=None) -> Target:
        psi = PsiParameter(ctx.blocks(f["psi"]), group, check_order=False)
        return Target(psi, _dec_point(point if point is not None else f["point"]),
                      ctx.label(f["rho0"]), int(f["a0"]), _h(f["s0"]))

    nodes = [CertNode(target(f)) for f in targets]
    for rest in raw_steps:
        ref, tag, *kv = rest
        i, _ = (int(x) for x in ref.split("."))
        node = nodes[i]
        segs, ledger, f = [], [], {}
        for key, val in _fields(kv):
            if key == "seg":
                segs.append(ctx.segment(val))
            elif key == "L":
                ledger.append(ctx.entry(val))
            else:
                f[key] = val
        before = node.target.with_point(_dec_point(f["point"]))
        if before.digest() != f["before"]:
            raise CertificateFormatError(f"step {ref}: before digest mismatch")
        child = None if f["after"] == "-" else nodes[int(f["after"])]
        pos = tuple(int(x) for x in filter(None, f["pos"].split(",")))
        extra = tuple(_extra_value(x) for x in filter(None, f["extra"].split(",")))
        step = ReductionStep(tag, before, None if child is None else child.target,
                             tuple(segs), tuple(ledger), pos, extra)
        node.steps.append(step)
        node.children.append(child)
    if not nodes:
        raise CertificateFormatError("no nodes")
    return Certificate(nodes[0].target, nodes[0])


# -- JSON ------------------------------------------------------------------------------

def _target_json(t: Target) -> dict:
    return {"psi": _enc_blocks(t.psi), "point": _enc_point(t.point), "rho0": t.rho0.id,
            "a0": t.a0, "s0": str(t.s0), "digest": t.digest()}


def to_json(cert: Certificate, indent=None) -> str:
    nodes, index, labels, group = _collect(cert)
    data = {
        "format": FORMAT,
        "version": VERSION,
        "labels": [{"id": lab.id, "d_rho": lab.d_rho, "kind": lab.kind} for lab in labels.values()],
        "group": {"hasse": group.hasse_sign, "rG": group.rG_kind, "star": group.star_kind},
        "nodes": [],
    }
    for n in nodes:
        steps = []
        for step, child in zip(n.steps, n.children):
            steps.append({
                "tag": step.case_tag,
                "point": _enc_point(step.before.point),
                "pos": list(step.pos),
                "extra": [str(x) for x in step.extra],
                "after": None if child is None else index[id(child)],
                "segments": [_enc_segment(s) for s in step.segments],
                "ledger": [{"kind": e.kind, "role": e.role, "label": e.label,
                            "expected": list(e.expected) if isinstance(e.expected, tuple) else e.expected,
                            "terms": _enc_product(e.product)} for e in step.ledger],
            })
        data["nodes"].append({"target": _target_json(n.target), "steps": steps})
    return json.dumps(data, indent=indent, sort_keys=True)


def from_json(text: str) -> Certificate:
    data = json.loads(text)
    if data.get("format") != FORMAT or data.get("version") != VERSION:
        raise CertificateFormatError("missing or unsupported format/version")
    labels = {d["id"]: CuspidalLabel(d["id"], d["d_rho"], d["kind"]) for d in data["labels"]}
    g = data["group"]
    group = GroupType(g["hasse"], g["rG"], g["star"])
    ctx = _Context(labels, group)

    def target(f: dict) -> Target:
        psi = PsiParameter(ctx.blocks(f["psi"]), group, check_order=False)
        return Target(psi, _dec_point(f["point"]), ctx.label(f["rho0"]), int(f["a0"]), _h(f["s0"]))

    nodes = [CertNode(target(n["target"])) for n in data["nodes"]]
    for node, raw in zip(nodes, data["nodes"]):
        for s in raw["steps"]:
            child = None if s["after"] is None else nodes[s["after"]]
            ledger = tuple(
                LedgerEntry(e["kind"], e["role"], e["label"], ctx.product(e["terms"]),
                            tuple(e["expected"]) if isinstance(e["expected"], list) else e["expected"])
                for e in s["ledger"])
            step = ReductionStep(
                s["tag"], node.target.with_point(_dec_point(s["point"])),
                None if child is None else child.target,
                tuple(ctx.segment(x) for x in s["segments"]), ledger,
                tuple(s["pos"]), tuple(_extra_value(x) for x in s["extra"]))
            node.steps.append(step)
            node.children.append(child)
    if not nodes:
        raise CertificateFormatError("no nodes")
    return Certificate(nodes[0].target, nodes[0])
