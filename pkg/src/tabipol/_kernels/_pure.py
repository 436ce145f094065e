"""Pure-Python term kernels: dereferencing, unification, matching.

Bindings are dicts from variable name to term.  ``unify`` records every
binding it makes on ``trail`` so callers can undo with :func:`undo`.
"""

from __future__ import annotations

from ..logic import Fn, Var

BACKEND = "python"


def deref(t, b):
    while type(t) is Var:
        nxt = b.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def resolve(t, b):
    t = deref(t, b)
    if type(t) is Var or not t.args:
        return t
    args = t.args
    new = tuple([resolve(a, b) for a in args])
    for x, y in zip(args, new):
        if x is not y:
            return Fn(t.name, new)
    return t


def occurs(name, t, b):
    t = deref(t, b)
    if type(t) is Var:
        return t.name == name
    for a in t.args:
        if occurs(name, a, b):
            return True
    return False


def unify(s, t, b, trail):
    s = deref(s, b)
    t = deref(t, b)
    if s is t:
        return True
    if type(s) is Var:
        if type(t) is Var and t.name == s.name:
            return True
        if occurs(s.name, t, b):
            return False
        b[s.name] = t
        trail.append(s.name)
        return True
    if type(t) is Var:
        if occurs(t.name, s, b):
            return False
        b[t.name] = s
        trail.append(t.name)
        return True
    if s.name != t.name or len(s.args) != len(t.args):
        return False
    for x, y in zip(s.args, t.args):
        if not unify(x, y, b, trail):
            return False
    return True


def unify_args(xs, ys, b, trail):
    if len(xs) != len(ys):
        return False
    for x, y in zip(xs, ys):
        if not unify(x, y, b, trail):
            return False
    return True


def undo(b, trail, mark):
    while len(trail) > mark:
        del b[trail.pop()]


def match(p, t, b):
    """One-way matching: bind variables of ``p`` so that p == t; t is never dereferenced."""
    if type(p) is Var:
        cur = b.get(p.name)
        if cur is None:
            b[p.name] = t
            return True
        return cur == t
    if type(t) is not Fn or p.name != t.name or len(p.args) != len(t.args):
        return False
    for x, y in zip(p.args, t.args):
        if not match(x, y, b):
            return False
    return True


def match_args(ps, ts, b):
    if len(ps) != len(ts):
        return False
    for x, y in zip(ps, ts):
        if not match(x, y, b):
            return False
    return True
