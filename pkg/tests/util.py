"""Small helpers shared by the test modules."""
from fungi import relations as R
from fungi.parser import parse_obligation


def obligation(line):
    o = parse_obligation(line)
    return R.Obligation(R.relctx_of_sorts(o.sorts), o.kind, o.lhs, o.rhs, o.sort, o.props), o.sorts


def decide(line, **kw):
    ob, sorts = obligation(line)
    return R.decide(ob, sorts=sorts, **kw)


def lines(text):
    return [l for l in text.splitlines() if l.strip() and not l.strip().startswith("--")]
