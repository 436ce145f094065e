# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_pure``; same API, same semantics."""

from tabipol.logic import Fn, Var

BACKEND = "cython"

cdef object _Var = Var
cdef object _Fn = Fn


cdef inline object _deref(object t, dict b):
    cdef object nxt
    while type(t) is _Var:
        nxt = b.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def deref(t, dict b):
    return _deref(t, b)


cdef object _resolve(object t, dict b):
    t = _deref(t, b)
    if type(t) is _Var:
        return t
    cdef tuple args = t.args
    cdef Py_ssize_t n = len(args), i
    if n == 0:
        return t
    cdef list new = [None] * n
    cdef bint changed = False
    for i in range(n):
        new[i] = _resolve(args[i], b)
        if new[i] is not args[i]:
            changed = True
    if not changed:
        return t
    return _Fn(t.name, tuple(new))


def resolve(t, dict b):
    return _resolve(t, b)


cdef bint _occurs(str name, object t, dict b):
    t = _deref(t, b)
    if type(t) is _Var:
        return t.name == name
    cdef object a
    for a in t.args:
        if _occurs(name, a, b):
            return True
    return False


def occurs(str name, t, dict b):
    return _occurs(name, t, b)


cdef bint _unify(object s, object t, dict b, list trail):
    s = _deref(s, b)
    t = _deref(t, b)
    if s is t:
        return True
    if type(s) is _Var:
        if type(t) is _Var and t.name == s.name:
            return True
        if _occurs(s.name, t, b):
            return False
        b[s.name] = t
        trail.append(s.name)
        return True
    if type(t) is _Var:
        if _occurs(t.name, s, b):
            return False
        b[t.name] = s
        trail.append(t.name)
        return True
    cdef tuple sa = s.args, ta = t.args
    cdef Py_ssize_t n = len(sa), i
    if n != len(ta) or s.name != t.name:
        return False
    for i in range(n):
        if not _unify(sa[i], ta[i], b, trail):
            return False
    return True


def unify(s, t, dict b, list trail):
    return _unify(s, t, b, trail)


def unify_args(tuple xs, tuple ys, dict b, list trail):
    cdef Py_ssize_t n = len(xs), i
    if n != len(ys):
        return False
    for i in range(n):
        if not _unify(xs[i], ys[i], b, trail):
            return False
    return True


def undo(dict b, list trail, Py_ssize_t mark):
    while len(trail) > mark:
        del b[trail.pop()]


cdef bint _match(object p, object t, dict b):
    cdef object cur
    if type(p) is _Var:
        cur = b.get(p.name)
        if cur is None:
            b[p.name] = t
            return True
        return cur == t
    if type(t) is not _Fn:
        return False
    cdef tuple pa = p.args, ta = t.args
    cdef Py_ssize_t n = len(pa), i
    if n != len(ta) or p.name != t.name:
        return False
    for i in range(n):
        if not _match(pa[i], ta[i], b):
            return False
    return True


def match(p, t, dict b):
    return _match(p, t, b)


def match_args(tuple ps, tuple ts, dict b):
    cdef Py_ssize_t n = len(ps), i
    if n != len(ts):
        return False
    for i in range(n):
        if not _match(ps[i], ts[i], b):
            return False
    return True
