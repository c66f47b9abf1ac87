"""Sink names and source-classification rules.

Catalog files are line oriented::

    # comment
    sinks:
        exfiltrate        # add a sink
        -httpHead         # drop a default sink
    source_kinds:
        -state_variable
    sources:
        sensitiveData     # extra identifiers treated as sources

Entries adjust the defaults; an omitted section keeps them unchanged.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .frontend.nodes import (
    Identifier, Index, InputDecl, Literal, MethodCall, Param, Program, PropertyAccess, StringLiteral,
    Subscribe, walk,
)

DEFAULT_SINKS = frozenset({
    "httpDelete", "httpGet", "httpHead", "httpPost", "httpPostJson", "httpPut",
    "sendSms", "sendSmsMessage", "sendNotificationEvent", "sendNotification",
    "sendNotificationToContacts", "sendPush", "sendPushMessage",
})

SOURCE_KINDS = ("user_input", "state_variable", "device_state", "device_info", "location", "event_param")
# identifiers listed under ``sources:`` are always sources, under this kind
DECLARED = "declared"

# positional argument holding a phone number / contact list rather than message text
RECIPIENT_ARG = {"sendSms": 0, "sendSmsMessage": 0, "sendNotificationToContacts": 1}

STATE_OBJECTS = {"state", "atomicState"}
DEVICE_INFO_MEMBERS = {
    "displayName", "name", "label", "id", "deviceNetworkId", "manufacturerName", "modelName",
    "typeName", "hub", "zigbeeId", "getDisplayName", "getName", "getLabel", "getId",
}

_IDENT = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")
_SECTIONS = ("sinks", "source_kinds", "sources")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Catalog:
    sink_names: frozenset = DEFAULT_SINKS
    source_kinds: frozenset = frozenset(SOURCE_KINDS)
    extra_source_idents: frozenset = frozenset()

    def is_sink(self, name: str) -> bool:
        return name in self.sink_names

    def enabled(self, kind: Optional[str]) -> Optional[str]:
        if kind is None:
            return None
        return kind if kind == DECLARED or kind in self.source_kinds else None

    def with_sinks(self, *names: str) -> "Catalog":
        return Catalog(self.sink_names | set(names), self.source_kinds, self.extra_source_idents)


def default_catalog() -> Catalog:
    return Catalog()


def load_catalog(config_text: str) -> Catalog:
    """Parse catalog text; see the module docstring for the format."""
    base = default_catalog()
    sets = {
        "sinks": set(base.sink_names),
        "source_kinds": set(base.source_kinds),
        "sources": set(base.extra_source_idents),
    }
    section = None
    for lineno, raw in enumerate(config_text.splitlines(), 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if text.endswith(":"):
            key = text[:-1].strip()
            if key not in _SECTIONS:
                raise ConfigError(f"unknown section {key!r}", lineno)
            section = key
            continue
        if section is None:
            raise ConfigError(f"entry {text!r} outside any section", lineno)
        remove = text.startswith("-")
        name = text[1:].strip() if remove else text.lstrip("+").strip()
        if not _IDENT.match(name):
            raise ConfigError(f"malformed entry {text!r}", lineno)
        if section == "source_kinds" and name not in SOURCE_KINDS:
            raise ConfigError(f"unknown source kind {name!r}", lineno)
        (sets[section].discard if remove else sets[section].add)(name)
    return Catalog(frozenset(sets["sinks"]), frozenset(sets["source_kinds"]), frozenset(sets["sources"]))


def read_catalog(path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return load_catalog(fh.read())


def render_catalog(cat: Catalog) -> str:
    """Catalog text that ``load_catalog`` maps back to ``cat``."""
    base = default_catalog()
    out = []
    for key, have, default in (
        ("sinks", cat.sink_names, base.sink_names),
        ("source_kinds", cat.source_kinds, base.source_kinds),
        ("sources", cat.extra_source_idents, base.extra_source_idents),
    ):
        out.append(f"{key}:")
        out.extend(f"    {n}" for n in sorted(have))
        out.extend(f"    -{n}" for n in sorted(default - have))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class SourceContext:
    """Program facts needed to classify identifiers."""
    inputs: frozenset = frozenset()
    devices: frozenset = frozenset()  # inputs whose capability denotes a device
    handler_params: frozenset = frozenset()  # (method, param) pairs fed by subscribe

    @classmethod
    def of(cls, p: Program) -> "SourceContext":
        decls: list[InputDecl] = p.inputs
        inputs = frozenset(d.name for d in decls)
        devices = frozenset(d.name for d in decls if d.capability and _is_device_type(d.capability))
        handlers = set()
        for n in walk(p):
            if isinstance(n, Subscribe) and n.handler:
                m = p.method(n.handler)
                if m is not None and m.params:
                    handlers.add((m.name, m.params[0].name))
        return cls(inputs, devices, frozenset(handlers))


def _is_device_type(capability: str) -> bool:
    c = capability.lower()
    return c.startswith(("capability.", "device.")) or c in ("hub",)


def _root(e):
    while isinstance(e, (PropertyAccess, Index)) or isinstance(e, MethodCall) and e.receiver is not None:
        e = e.base if isinstance(e, (PropertyAccess, Index)) else e.receiver
    return e


def classify(node, cat: Catalog, ctx: SourceContext = SourceContext(), method: Optional[str] = None,
             local_names: Iterable[str] = ()) -> Optional[str]:
    """Source kind of an expression or declaration, or None.

    ``method`` and ``local_names`` describe the scope of the node, so that a
    local variable named like an input is not mistaken for it.
    """
    return cat.enabled(_kind(node, cat, ctx, method, local_names))


def _kind(node, cat: Catalog, ctx: SourceContext, method, local_names) -> Optional[str]:
    if isinstance(node, (StringLiteral, Literal)):
        return None
    if isinstance(node, InputDecl):
        return "user_input"
    if isinstance(node, Param):
        return "event_param" if (method, node.name) in ctx.handler_params else None
    if isinstance(node, Identifier):
        name = node.name
        if name in local_names:
            return None
        if name in cat.extra_source_idents:
            return DECLARED
        if name in STATE_OBJECTS:
            return "state_variable"
        if name == "location":
            return "location"
        if name == "settings" or name in ctx.inputs:
            return "user_input"
        return None
    if isinstance(node, (PropertyAccess, Index, MethodCall)) and not (
            isinstance(node, MethodCall) and node.receiver is None):
        root = _root(node)
        if not isinstance(root, Identifier) or root.name in local_names:
            return None
        name = root.name
        if name in cat.extra_source_idents:
            return DECLARED
        if name in STATE_OBJECTS:
            return "state_variable"
        if name == "location":
            return "location"
        if name == "settings":
            return "user_input"
        if name in ctx.devices:
            member = _first_member(node)
            return "device_info" if member in DEVICE_INFO_MEMBERS else "device_state"
        if name in ctx.inputs:
            return "user_input"
    return None


def _first_member(node) -> Optional[str]:
    """Member applied directly to the root identifier (``dev.currentSwitch`` -> currentSwitch)."""
    prev = None
    e = node
    while isinstance(e, (PropertyAccess, Index)) or isinstance(e, MethodCall) and e.receiver is not None:
        prev = e
        e = e.base if isinstance(e, (PropertyAccess, Index)) else e.receiver
    if isinstance(prev, PropertyAccess):
        return prev.member
    if isinstance(prev, MethodCall):
        return prev.name
    return None
