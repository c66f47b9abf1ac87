"""Execution-path variants from if/else resolution.

Resolving an ``if`` to its true branch splices the then-body into the
enclosing statement list and drops the else-body; the false branch does the
opposite. Statements keep their recorded lines, so a rendered variant lines up
with the original file and removed code leaves blank lines.

Variants are produced by repeatedly resolving the first remaining targeted
``if`` in document order, true branch first, which is why an ``if`` nested in
a discarded branch never contributes a decision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .catalog import Catalog, default_catalog
from .frontend.nodes import If, MethodDecl, Program, Transformer, find_ifs, walk
from .taint.index import TOP, ProgramIndex
from .taint.trace import Tracer

MODES = ("whole_program", "per_method", "flow_affecting")
DEFAULT_CAP = 12


class CapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int, mode: str = "whole_program"):
        super().__init__(f"{count} if-statements to resolve in {mode} mode exceeds the cap of {cap}")
        self.count = count
        self.cap = cap
        self.mode = mode


class UnknownIf(KeyError):
    def __init__(self, ref):
        super().__init__(f"no if-statement at {ref}")
        self.ref = ref


@dataclass(frozen=True)
class PathConfig:
    mode: str = "flow_affecting"
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown path mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.cap < 1:
            raise ValueError("path cap must be positive")


@dataclass(frozen=True)
class PathVariant:
    id: str  # one T/F per resolved if, in resolution order
    program: Program = field(compare=False, repr=False)

    @property
    def label(self) -> str:
        return self.id or "-"


@dataclass(frozen=True)
class IfStats:
    total_ifs: int
    max_ifs_per_method: int
    flow_affecting_ifs: int


class _Resolve(Transformer):
    def __init__(self, refs: dict):
        self.refs = refs  # if ref -> True/False
        self.hit: set = set()

    def visit_If(self, node: If):
        branch = self.refs.get(node.ref)
        if branch is None:
            return self.generic_visit(node)
        self.hit.add(node.ref)
        body = node.then_body if branch else node.else_body
        return list(self.visit_tuple(body))


def resolve_ifs(p: Program, choices: dict) -> Program:
    """Resolve every ``if`` whose ref is a key of ``choices`` to the given branch."""
    t = _Resolve(choices)
    out = t.visit(p)
    missing = set(choices) - t.hit
    if missing:
        raise UnknownIf(min(missing))
    return out


def true_path(p: Program, if_ref) -> Program:
    return resolve_ifs(p, {if_ref: True})


def false_path(p: Program, if_ref) -> Program:
    return resolve_ifs(p, {if_ref: False})


# --------------------------------------------------------------------------
# target selection

def _ifs_by_scope(p: Program) -> dict:
    out: dict = {}
    for item in p.items:
        scope = item.name if isinstance(item, MethodDecl) else TOP
        out.setdefault(scope, []).extend(n.ref for n in find_ifs(item))
    return out


def flow_affecting_refs(p: Program, cat: Optional[Catalog] = None, index: Optional[ProgramIndex] = None) -> set:
    """Refs of ifs that contain a statement marked by the core analysis."""
    cat = cat or default_catalog()
    ix = index or ProgramIndex.build(p)
    tracer = Tracer(p, cat, ix)
    m = tracer.trace(tracer.mark_sinks())
    sids = set()
    for site in m.sites:
        if site.kind in ("stmt", "arg"):
            sids.add(site.ref[0])
        elif site.kind == "bind":
            sids.add(ix.closures[site.ref[0]].stmt)
    refs = set()
    for sid in sids:
        parent = ix.stmts[sid].parent
        while parent is not None:
            node = ix.stmts[parent].node
            if isinstance(node, If):
                refs.add(node.ref)
            parent = ix.stmts[parent].parent
    return refs


def if_stats(p: Program, cat: Optional[Catalog] = None) -> IfStats:
    per_scope = _ifs_by_scope(p)
    total = sum(len(v) for v in per_scope.values())
    return IfStats(total, max((len(v) for v in per_scope.values()), default=0), len(flow_affecting_refs(p, cat)))


# --------------------------------------------------------------------------
# enumeration

def _first_targets(p: Program, targets: Optional[set], per_method: bool) -> list:
    """Refs to resolve next: the first targeted if overall, or of every scope."""
    out = []
    for item in p.items:
        for n in walk(item):
            if isinstance(n, If) and (targets is None or n.ref in targets):
                out.append(n.ref)
                break
        if out and not per_method:
            break
    return out


def enumerate_paths(p: Program, cfg: PathConfig = PathConfig(), cat: Optional[Catalog] = None) -> list:
    """All path variants of ``p`` under ``cfg``, T-branches first."""
    if cfg.mode == "flow_affecting":
        targets: Optional[set] = flow_affecting_refs(p, cat)
        count = len(targets)
    elif cfg.mode == "per_method":
        targets = None
        count = max((len(v) for v in _ifs_by_scope(p).values()), default=0)
    else:
        targets = None
        count = sum(len(v) for v in _ifs_by_scope(p).values())
    if count > cfg.cap:
        raise CapExceeded(count, cfg.cap, cfg.mode)
    per_method = cfg.mode == "per_method"
    out: list = []
    stack = [("", p)]
    while stack:
        decisions, prog = stack.pop()
        refs = _first_targets(prog, targets, per_method)
        if not refs:
            out.append(PathVariant(decisions, prog))
            continue
        # pushed in reverse so the true branch is expanded first
        stack.append((decisions + "F", resolve_ifs(prog, {r: False for r in refs})))
        stack.append((decisions + "T", resolve_ifs(prog, {r: True for r in refs})))
    return out
