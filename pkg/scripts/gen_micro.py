"""Write the labeled micro mutation suite to corpus/micro.

Each pattern comes as a leaking/benign pair built from one SmartApp skeleton.
The benign half is a mutation that the flow-insensitive, path-insensitive,
context-insensitive core still reports, so the suite measures what each
sensitivity buys.
"""
from __future__ import annotations

import argparse
from pathlib import Path

SKELETON = '''definition(
    name: "{title}",
    namespace: "micro",
    author: "micro",
    description: "{pattern} mutant",
    category: "Convenience"
)

preferences {{
    section("Devices") {{
        input "sensor", "capability.temperatureMeasurement", title: "Sensor"
        input "door", "capability.lock", title: "Door"
        input "phone", "phone", title: "Phone", required: false
        input "enabled", "bool", title: "Enabled"
    }}
}}

def installed() {{
    initialize()
}}

def updated() {{
    unsubscribe()
    initialize()
}}

def initialize() {{
    subscribe(sensor, "temperature", onEvent)
    subscribe(door, "lock", onLock)
}}

{body}
'''

# pattern name -> (leaking body, benign body)
PAIRS = {
    # reassignment before the sink: only flow sensitivity separates the pair
    "flow_overwrite": (
        '''def onEvent(evt) {
    def msg = "Temperature is ${evt.value}"
    sendPush(msg)
    msg = "Temperature changed"
}''',
        '''def onEvent(evt) {
    def msg = "Temperature is ${evt.value}"
    msg = "Temperature changed"
    sendPush(msg)
}'''),
    "flow_sms_location": (
        '''def onEvent(evt) {
    def text = "Home: ${location.name}"
    sendSms(phone, text)
    text = "Home event"
}''',
        '''def onEvent(evt) {
    def text = "Home: ${location.name}"
    text = "Home event"
    sendSms(phone, text)
}'''),
    "flow_http_body": (
        '''def onEvent(evt) {
    def payload = [reading: sensor.currentTemperature]
    httpPost(uri: "https://example.com/log", body: payload)
    payload = [reading: 0]
}''',
        '''def onEvent(evt) {
    def payload = [reading: sensor.currentTemperature]
    payload = [reading: 0]
    httpPost(uri: "https://example.com/log", body: payload)
}'''),
    "flow_state": (
        '''def onLock(evt) {
    def code = state.lockCode
    sendNotification(code)
    code = "****"
}''',
        '''def onLock(evt) {
    def code = state.lockCode
    code = "****"
    sendNotification(code)
}'''),
    "flow_copy_chain": (
        '''def onLock(evt) {
    def a = settings.enabled
    def b = "Lock: $a"
    sendPush(b)
    b = "Lock changed"
}''',
        '''def onLock(evt) {
    def a = settings.enabled
    def b = "Lock: $a"
    b = "Lock changed"
    sendPush(b)
}'''),
    "flow_compound": (
        '''def onEvent(evt) {
    def text = "Mode: "
    text += location.mode
    sendPushMessage(text)
}''',
        '''def onEvent(evt) {
    def text = location.mode
    text = "Mode changed"
    text += " now"
    sendPushMessage(text)
}'''),
    "flow_device_info": (
        '''def onLock(evt) {
    def who = door.displayName
    def note = "Unlocked by $who"
    sendNotificationEvent(note)
}''',
        '''def onLock(evt) {
    def who = door.displayName
    who = "someone"
    def note = "Unlocked by $who"
    sendNotificationEvent(note)
}'''),
    # branch-guarded leaks: only path (or flow) sensitivity separates the pair
    "path_else_sink": (
        '''def onEvent(evt) {
    def report = "Sensor event"
    if (evt.value == "high") {
        report = sensor.displayName
    } else {
        report = "Sensor normal"
    }
    sendPush(report)
}''',
        '''def onEvent(evt) {
    def report = "Sensor event"
    if (evt.value == "high") {
        report = sensor.displayName
    } else {
        report = "Sensor normal"
        sendPush(report)
    }
}'''),
    "path_global_else": (
        '''def onLock(evt) {
    if (enabled) {
        status = door.currentLock
    } else {
        status = "unknown"
    }
    sendSms(phone, status)
}''',
        '''def onLock(evt) {
    if (enabled) {
        status = door.currentLock
    } else {
        sendSms(phone, status)
    }
}'''),
    "path_nested": (
        '''def onEvent(evt) {
    def m = "none"
    if (enabled) {
        if (evt.value > 30) {
            m = "Hot: ${evt.value}"
        }
        sendPush(m)
    }
}''',
        '''def onEvent(evt) {
    def m = "none"
    if (enabled) {
        if (evt.value > 30) {
            m = "Hot: ${evt.value}"
        } else {
            sendPush(m)
        }
    }
}'''),
    "path_two_ifs": (
        '''def onLock(evt) {
    def m = "Door"
    if (enabled) {
        m = "Door ${door.currentLock}"
    }
    if (evt.value == "unlocked") {
        sendNotification(m)
    }
}''',
        '''def onLock(evt) {
    def m = "Door"
    if (enabled) {
        m = "Door ${door.currentLock}"
    } else {
        if (evt.value == "unlocked") {
            sendNotification(m)
        }
    }
}'''),
    # benign/tainted call-site pairs: only context sensitivity separates the pair
    "ctx_identity": (
        '''def onEvent(evt) {
    def a = same("hello")
    def b = same(evt.value)
    sendPush(b)
}

def same(x) {
    return x
}''',
        '''def onEvent(evt) {
    def a = same("hello")
    def b = same(evt.value)
    sendPush(a)
}

def same(x) {
    return x
}'''),
    "ctx_format": (
        '''def onEvent(evt) {
    def shown = label("Reading", sensor.currentTemperature)
    def plain = label("Status", "ok")
    sendSms(phone, shown)
}

def label(name, v) {
    return "$name: $v"
}''',
        '''def onEvent(evt) {
    def shown = label("Reading", sensor.currentTemperature)
    def plain = label("Status", "ok")
    sendSms(phone, plain)
}

def label(name, v) {
    return "$name: $v"
}'''),
    "ctx_two_handlers": (
        '''def onEvent(evt) {
    def t = describe(location.name)
    log.debug t
}

def onLock(evt) {
    def d = describe(door.currentLock)
    sendPush(d)
}

def describe(s) {
    return "Event at $s"
}''',
        '''def onEvent(evt) {
    def t = describe(location.name)
    log.debug t
}

def onLock(evt) {
    def d = describe("the front door")
    sendPush(d)
}

def describe(s) {
    return "Event at $s"
}'''),
    "ctx_nested_helpers": (
        '''def onLock(evt) {
    def x = outer(state.pin)
    def y = outer("fixed")
    sendNotification(x)
}

def outer(v) {
    return inner(v)
}

def inner(w) {
    return w
}''',
        '''def onLock(evt) {
    def x = outer(state.pin)
    def y = outer("fixed")
    sendNotification(y)
}

def outer(v) {
    return inner(v)
}

def inner(w) {
    return w
}'''),
    "ctx_implicit_return": (
        '''def onEvent(evt) {
    def hot = tag(evt.value)
    def cold = tag("cold")
    sendPush(hot)
}

def tag(v) {
    "Temp " + v
}''',
        '''def onEvent(evt) {
    def hot = tag(evt.value)
    def cold = tag("cold")
    sendPush(cold)
}

def tag(v) {
    "Temp " + v
}'''),
}


def write(out: Path) -> list:
    out.mkdir(parents=True, exist_ok=True)
    labels = []
    for pattern, (leaking, benign) in PAIRS.items():
        for label, body in (("leaking", leaking), ("benign", benign)):
            name = f"{pattern}_{label}.groovy"
            text = SKELETON.format(title=f"{pattern} {label}", pattern=pattern, body=body)
            (out / name).write_text(text, encoding="utf-8")
            labels.append(f"{name},{label}")
    (out / "labels.csv").write_text("\n".join(labels) + "\n", encoding="utf-8")
    return labels


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "corpus" / "micro"))
    args = ap.parse_args()
    labels = write(Path(args.out))
    print(f"wrote {len(labels)} programs to {args.out}")


if __name__ == "__main__":
    main()
