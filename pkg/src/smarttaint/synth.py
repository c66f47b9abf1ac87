"""Deterministic synthetic SmartApps for benchmarks and batch tests.

Apps follow the usual layout (definition, preferences, lifecycle methods,
event handlers, helpers) and mix sources, local data flow, helper calls,
branches, loops, closures and sink calls. The same seed always yields the
same text.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

CAPABILITIES = [
    ("capability.switch", "switch"), ("capability.motionSensor", "motion"),
    ("capability.contactSensor", "contact"), ("capability.temperatureMeasurement", "temperature"),
    ("capability.lock", "lock"), ("capability.presenceSensor", "presence"),
]
SINKS = ["sendPush", "sendNotification", "sendNotificationEvent", "sendPushMessage"]


@dataclass(frozen=True)
class SynthConfig:
    target_lines: int = 300
    devices: int = 4
    max_ifs_per_method: int = 2
    helpers: int = 3


class _App:
    def __init__(self, seed: int, cfg: SynthConfig):
        self.rng = random.Random(seed)
        self.cfg = cfg
        self.lines: list = []
        self.seed = seed

    def emit(self, text: str = "", depth: int = 0) -> None:
        self.lines.append("    " * depth + text)

    def header(self) -> list:
        devices = []
        self.emit("definition(")
        self.emit(f'name: "Synthetic App {self.seed}",', 1)
        self.emit('namespace: "synth",', 1)
        self.emit('author: "generator",', 1)
        self.emit('description: "Generated for benchmarking",', 1)
        self.emit('category: "Convenience"', 1)
        self.emit(")")
        self.emit()
        self.emit("preferences {")
        self.emit('section("Devices") {', 1)
        for i in range(self.cfg.devices):
            cap, attr = self.rng.choice(CAPABILITIES)
            name = f"{attr}{i}"
            devices.append((name, attr))
            self.emit(f'input "{name}", "{cap}", title: "Device {i}"', 2)
        self.emit('input "threshold", "number", title: "Threshold"', 2)
        self.emit("}", 1)
        self.emit("}")
        self.emit()
        return devices

    def lifecycle(self, handlers: list) -> None:
        self.emit("def installed() {")
        self.emit("initialize()", 1)
        self.emit("}")
        self.emit()
        self.emit("def updated() {")
        self.emit("unsubscribe()", 1)
        self.emit("initialize()", 1)
        self.emit("}")
        self.emit()
        self.emit("def initialize() {")
        for dev, attr, handler in handlers:
            self.emit(f'subscribe({dev}, "{attr}", {handler})', 1)
        self.emit("}")
        self.emit()

    def value(self, locals_: list, devices: list, helpers: list) -> str:
        r = self.rng.random()
        if r < 0.2 or not locals_:
            dev, attr = self.rng.choice(devices)
            return self.rng.choice([
                "evt.value", f"{dev}.current{attr.capitalize()}", f"{dev}.displayName",
                "location.name", "state.lastValue", f'"{attr} changed"', "threshold",
            ])
        if r < 0.45:
            return f'"Value: ${{{self.rng.choice(locals_)}}}"'
        if r < 0.6 and helpers:
            return f"{self.rng.choice(helpers)}({self.rng.choice(locals_)})"
        if r < 0.8:
            return f"{self.rng.choice(locals_)} + \" and more\""
        return f'"constant {self.rng.randint(0, 99)}"'

    def statements(self, depth: int, budget: int, locals_: list, devices: list, helpers: list,
                   ifs_left: list) -> None:
        while budget > 0:
            r = self.rng.random()
            if r < 0.35:
                name = f"v{len(locals_)}"
                self.emit(f"def {name} = {self.value(locals_, devices, helpers)}", depth)
                locals_.append(name)
                budget -= 1
            elif r < 0.5 and locals_:
                self.emit(f"{self.rng.choice(locals_)} = {self.value(locals_, devices, helpers)}", depth)
                budget -= 1
            elif r < 0.62 and ifs_left[0] > 0 and budget > 4:
                ifs_left[0] -= 1
                self.emit(f"if (evt.value == \"{self.rng.choice(['on', 'open', 'active'])}\") {{", depth)
                inner = self.rng.randint(1, 3)
                self.statements(depth + 1, inner, locals_, devices, helpers, [0])
                if self.rng.random() < 0.5:
                    self.emit("} else {", depth)
                    self.statements(depth + 1, 1, locals_, devices, helpers, [0])
                self.emit("}", depth)
                budget -= inner + 2
            elif r < 0.7 and locals_:
                self.emit(f"{self.rng.choice(SINKS)}({self.rng.choice(locals_)})", depth)
                budget -= 1
            elif r < 0.78 and locals_:
                self.emit(f"[1, 2, 3].each {{ log.debug \"item $it of ${{{self.rng.choice(locals_)}}}\" }}", depth)
                budget -= 1
            elif r < 0.84 and locals_:
                acc = f"acc{len(locals_)}"
                self.emit(f'def {acc} = ""', depth)
                self.emit(f"for (def s in [{self.rng.choice(locals_)}, \"x\"]) {{", depth)
                self.emit(f"{acc} = {acc} + s", depth + 1)
                self.emit("}", depth)
                locals_.append(acc)
                budget -= 4
            elif r < 0.9:
                self.emit(f'state.lastValue = "{self.rng.randint(0, 9)}"', depth)
                budget -= 1
            else:
                self.emit(f"log.debug \"handler step {self.rng.randint(0, 999)}\"", depth)
                budget -= 1

    def build(self) -> str:
        devices = self.header()
        helpers = [f"helper{i}" for i in range(self.cfg.helpers)]
        handler_count = max(1, (self.cfg.target_lines - 40) // 30)
        handlers = [(dev, attr, f"on{dev.capitalize()}Event{i}")
                    for i, (dev, attr) in ((i, self.rng.choice(devices)) for i in range(handler_count))]
        self.lifecycle(handlers)
        per_handler = max(4, (self.cfg.target_lines - len(self.lines) - 5 * len(helpers)) // handler_count - 3)
        for _, _, h in handlers:
            self.emit(f"def {h}(evt) {{")
            self.statements(1, per_handler, [], devices, helpers, [self.cfg.max_ifs_per_method])
            self.emit("}")
            self.emit()
        for name in helpers:
            self.emit(f"def {name}(x) {{")
            self.emit('def prefix = "helper"', 1)
            self.emit('return "$prefix: $x"', 1)
            self.emit("}")
            self.emit()
        return "\n".join(self.lines) + "\n"


def synth_app(seed: int, cfg: SynthConfig = SynthConfig()) -> str:
    """Source text of one synthetic app."""
    return _App(seed, cfg).build()


def write_corpus(out, count: int = 100, cfg: SynthConfig = SynthConfig(), first_seed: int = 0) -> list:
    """Write ``count`` apps named ``app_<seed>.groovy``; returns the paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for seed in range(first_seed, first_seed + count):
        p = out / f"app_{seed:03d}.groovy"
        p.write_text(synth_app(seed, cfg), encoding="utf-8")
        paths.append(p)
    return paths
