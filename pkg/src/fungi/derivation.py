"""Derivation trees shared by the checker and the evaluator, plus JSON export."""
from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = "fungi-derivation/1"


@dataclass
class Deriv:
    rule: str
    input: object = None
    output: object = None
    children: list = field(default_factory=list)
    ctx: object = None

    def size(self):
        return 1 + sum(c.size() for c in self.children)

    def rules(self):
        yield self.rule
        for c in self.children:
            yield from c.rules()

    def to_json(self, show=str):
        out = {"rule": self.rule}
        if self.ctx is not None:
            out["ctx"] = show(self.ctx)
        out["input"] = show(self.input)
        out["output"] = show(self.output)
        out["children"] = [c.to_json(show) for c in self.children]
        return out


def document(kind, roots, show=str):
    """Wrap one or more derivation roots in a versioned JSON document."""
    return {"schema": SCHEMA_VERSION, "kind": kind,
            "derivations": [r.to_json(show) for r in roots]}


class Recorder:
    """Builds a derivation tree while a judgment runs; no-op when disabled."""

    def __init__(self, enabled=False):
        self.enabled = enabled
        self.roots = []
        self._stack = []

    def open(self, rule, subject, ctx=None):
        if not self.enabled:
            return None
        d = Deriv(rule, subject, None, [], ctx)
        (self._stack[-1].children if self._stack else self.roots).append(d)
        self._stack.append(d)
        return d

    def close(self, d, output, rule=None):
        if d is None:
            return
        d.output = output
        if rule:
            d.rule = rule
        while self._stack and self._stack[-1] is not d:
            self._stack.pop()
        if self._stack:
            self._stack.pop()

    def reset(self):
        self._stack = []
