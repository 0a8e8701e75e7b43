"""Symbolic scalar expressions over a coordinate chart.

Expressions are immutable, hash-consed trees: two structurally equal trees
are the same Python object, so ``a is b`` is structural equality and
derivatives / simplifications can be memoised by node identity.  Because
subtrees are shared, repeated differentiation grows a DAG rather than a
tree, which keeps 4th-order derivatives of a generating function tractable.

Two families of constructors exist:

* the node classes (``Add``, ``Mul``, ``Pow``, ``Neg``, ``Div``, ``Func``)
  build raw trees exactly as written; the parser uses them;
* the lower-case builders (``add``, ``mul``, ``power``, ``func``) build the
  canonical form: constants folded, 0/1 identities removed, nested sums and
  products flattened, like terms and like powers collected.  Arithmetic
  operators on ``Expr`` go through these.

Numeric evaluation is vectorised over an array of points; a domain failure
at one point (x/0, ln of a non-positive number, sqrt of a negative number,
overflow) yields NaN at that point only.
"""

from __future__ import annotations

import math
import re
import threading
import zlib
from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCS = ("sin", "cos", "exp", "ln", "sqrt")
_FUNC_CODE = {name: i for i, name in enumerate(FUNCS)}


# --------------------------------------------------------------------------
# chart
# --------------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Chart:
    """Local coordinates u = (x^1..x^n, y^1..y^m) split into h- and v-names."""

    h_names: tuple = ("x1", "x2")
    v_names: tuple = ("y3", "y4")
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "h_names", tuple(self.h_names))
        object.__setattr__(self, "v_names", tuple(self.v_names))
        names = self.h_names + self.v_names
        if not self.h_names or not self.v_names:
            raise ValueError("a chart needs at least one h- and one v-coordinate")
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be distinct: {names}")
        for name in names:
            if not _IDENT.match(name) or name in FUNCS:
                raise ValueError(f"invalid coordinate name {name!r}")
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})

    @property
    def n(self):
        return len(self.h_names)

    @property
    def m(self):
        return len(self.v_names)

    @property
    def dim(self):
        return self.n + self.m

    @property
    def names(self):
        return self.h_names + self.v_names

    def index(self, name):
        return self._index[name]

    def __contains__(self, name):
        return name in self._index

    def var(self, i):
        """Coordinate function u^i as an expression (0-based position or name)."""
        if isinstance(i, str):
            self._index[i]
            return Var(i)
        return Var(self.names[i])


# --------------------------------------------------------------------------
# nodes
# --------------------------------------------------------------------------

_TABLE = {}
_LOCK = threading.Lock()


class Expr:
    """Base node.  Never instantiate directly."""

    __slots__ = ("args", "payload", "key", "digest", "fv", "canonical")
    kind = "expr"
    code = 0

    @classmethod
    def _intern(cls, args, payload):
        k = (cls.kind, payload, tuple(id(a) for a in args))
        node = _TABLE.get(k)
        if node is not None:
            return node
        with _LOCK:
            node = _TABLE.get(k)
            if node is not None:
                return node
            node = object.__new__(cls)
            node.args = args
            node.payload = payload
            node.canonical = False
            fv = frozenset()
            for a in args:
                fv = fv | a.fv
            if cls.kind == "var":
                fv = frozenset((payload,))
            node.fv = fv
            node.digest = cls._digest(args, payload)
            node.key = node._sort_key()
            _TABLE[k] = node
            return node

    @classmethod
    def _digest(cls, args, payload):
        # only ints and floats are hashed: stable across processes (hash(None) is address based)
        return hash((cls.code, -1 if payload is None else payload, *(a.digest for a in args)))

    def _sort_key(self):
        return (5 + self.code, "", 0, self.digest)

    # -- arithmetic (canonical) --------------------------------------------
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(-1.0, other))

    def __rsub__(self, other):
        return add(other, mul(-1.0, self))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, power(other, -1))

    def __rtruediv__(self, other):
        return mul(other, power(self, -1))

    def __pow__(self, n):
        return power(self, n)

    def __neg__(self):
        return mul(-1.0, self)

    def __pos__(self):
        return self

    def __bool__(self):
        raise TypeError("truth value of an expression is ambiguous; use is_zero()")

    def __repr__(self):
        return to_string(self)

    __str__ = __repr__

    def __reduce__(self):
        return (_rebuild, (to_string(self), self.canonical))


class Const(Expr):
    __slots__ = ()
    kind = "const"
    code = 1

    def __new__(cls, value):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite literal {value}")
        if value == 0.0:
            value = 0.0
        return cls._intern((), value)

    @classmethod
    def _digest(cls, args, payload):
        return hash((1, payload))

    def _sort_key(self):
        return (0, "", self.payload, 0)

    @property
    def value(self):
        return self.payload


class Var(Expr):
    __slots__ = ()
    kind = "var"
    code = 2

    def __new__(cls, name):
        return cls._intern((), str(name))

    @classmethod
    def _digest(cls, args, payload):
        return zlib.crc32(payload.encode())

    def _sort_key(self):
        return (1, self.payload, 1, 0)

    @property
    def name(self):
        return self.payload


class Add(Expr):
    __slots__ = ()
    kind = "add"
    code = 3

    def __new__(cls, *terms):
        if len(terms) < 2:
            raise ValueError("Add needs at least two terms")
        return cls._intern(tuple(terms), None)


class Mul(Expr):
    __slots__ = ()
    kind = "mul"
    code = 4

    def __new__(cls, *factors):
        if len(factors) < 2:
            raise ValueError("Mul needs at least two factors")
        return cls._intern(tuple(factors), None)


class Pow(Expr):
    __slots__ = ()
    kind = "pow"
    code = 5

    def __new__(cls, base, n):
        if int(n) != n:
            raise ValueError("only integer exponents are supported")
        return cls._intern((base,), int(n))

    def _sort_key(self):
        base = self.args[0]
        if base.kind == "var":
            return (1, base.payload, self.payload, 0)
        return (5 + self.code, "", self.payload, self.digest)

    @property
    def base(self):
        return self.args[0]

    @property
    def n(self):
        return self.payload


class Neg(Expr):
    __slots__ = ()
    kind = "neg"
    code = 6

    def __new__(cls, arg):
        return cls._intern((arg,), None)


class Div(Expr):
    __slots__ = ()
    kind = "div"
    code = 7

    def __new__(cls, num, den):
        return cls._intern((num, den), None)


class Func(Expr):
    __slots__ = ()
    kind = "func"
    code = 8

    def __new__(cls, name, arg):
        if name not in _FUNC_CODE:
            raise ValueError(f"unknown function {name!r}")
        return cls._intern((arg,), name)

    @classmethod
    def _digest(cls, args, payload):
        return hash((8, _FUNC_CODE[payload], args[0].digest))

    def _sort_key(self):
        return (2, self.payload, 0, self.digest)

    @property
    def name(self):
        return self.payload


ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, (Real, np.floating, np.integer)):
        return Const(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def is_zero(e):
    return as_expr(e) is ZERO


def is_const(e):
    return as_expr(e).kind == "const"


def free_vars(e):
    return as_expr(e).fv


# --------------------------------------------------------------------------
# canonical builders
# --------------------------------------------------------------------------


def _mark(node):
    node.canonical = True
    return node


def _canon(x):
    x = as_expr(x)
    return x if x.canonical else simplify(x)


def _split_coeff(x):
    """x == c * rest with c numeric and rest free of a numeric factor."""
    if x.kind == "mul" and x.args[0].kind == "const":
        rest = x.args[1:]
        return x.args[0].payload, (rest[0] if len(rest) == 1 else _mark(Mul(*rest)))
    return 1.0, x


def _scale(c, rest):
    if c == 1.0:
        return rest
    if rest.kind == "mul":
        return _mark(Mul(Const(c), *rest.args))
    if rest.kind == "add":
        return add(*(mul(c, t) for t in rest.args))
    return _mark(Mul(Const(c), rest))


def add(*xs):
    """Canonical sum."""
    const = 0.0
    acc = {}
    stack = [_canon(x) for x in reversed(xs)]
    while stack:
        x = stack.pop()
        if x.kind == "add":
            stack.extend(reversed(x.args))
        elif x.kind == "const":
            const += x.payload
        else:
            c, rest = _split_coeff(x)
            slot = acc.get(id(rest))
            if slot is None:
                acc[id(rest)] = [rest, c]
            else:
                slot[1] += c
    terms = [_scale(c, rest) for rest, c in acc.values() if c != 0.0]
    if const != 0.0:
        terms.append(Const(const))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return _mark(terms[0])
    flat = []
    for t in terms:
        # _scale may distribute into a sum
        flat.extend(t.args if t.kind == "add" else (t,))
    if len(flat) != len(terms):
        return add(*flat)
    flat.sort(key=lambda t: t.key)
    return _mark(Add(*flat))


def mul(*xs):
    """Canonical product."""
    coeff = 1.0
    acc = {}
    stack = [_canon(x) for x in reversed(xs)]
    while stack:
        x = stack.pop()
        if x.kind == "mul":
            stack.extend(reversed(x.args))
        elif x.kind == "const":
            coeff *= x.payload
        else:
            base, n = (x.args[0], x.payload) if x.kind == "pow" else (x, 1)
            slot = acc.get(id(base))
            if slot is None:
                acc[id(base)] = [base, n]
            else:
                slot[1] += n
    if coeff == 0.0:
        return ZERO
    factors = []
    exps = []
    needs_recollect = False
    for base, n in acc.values():
        if n == 0:
            continue
        if base.kind == "func" and base.payload == "exp":
            exps.append(mul(n, base.args[0]))
            continue
        f = base if n == 1 else power(base, n)
        if f.kind in ("mul", "const", "add") and not (f.kind == "add" and n == 1):
            needs_recollect = True
        factors.append(f)
    if len(exps) > 1:
        factors.append(func("exp", add(*exps)))
        needs_recollect = True
    elif exps:
        factors.append(func("exp", exps[0]))
        if factors[-1].kind != "func":
            needs_recollect = True
    if needs_recollect:
        return mul(coeff, *factors)
    if not factors:
        return Const(coeff)
    factors.sort(key=lambda f: f.key)
    if len(factors) == 1:
        f = factors[0]
        if coeff == 1.0:
            return _mark(f)
        if f.kind == "add":
            return add(*(mul(coeff, t) for t in f.args))
        return _mark(Mul(Const(coeff), f))
    if coeff != 1.0:
        factors.insert(0, Const(coeff))
    return _mark(Mul(*factors))


def power(b, n):
    """Canonical integer power b^n."""
    if int(n) != n:
        raise ValueError("only integer exponents are supported")
    n = int(n)
    b = _canon(b)
    if n == 0:
        return ONE
    if n == 1:
        return b
    if b.kind == "const":
        if b.payload == 0.0 and n < 0:
            return _mark(Pow(b, n))
        try:
            v = b.payload ** n
        except OverflowError:
            return _mark(Pow(b, n))
        return Const(v) if math.isfinite(v) else _mark(Pow(b, n))
    if b.kind == "pow":
        return power(b.args[0], b.payload * n)
    if b.kind == "mul":
        return mul(*(power(f, n) for f in b.args))
    if b.kind == "func":
        if b.payload == "exp":
            return func("exp", mul(n, b.args[0]))
        if b.payload == "sqrt" and n % 2 == 0:
            return power(b.args[0], n // 2)
    return _mark(Pow(b, n))


_NUMERIC = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


def func(name, u):
    """Canonical elementary function application."""
    u = _canon(u)
    if u.kind == "const":
        try:
            v = _NUMERIC[name](u.payload)
        except (ValueError, OverflowError):
            v = None
        if v is not None and math.isfinite(v):
            return Const(v)
        return _mark(Func(name, u))
    if name == "ln" and u.kind == "func" and u.payload == "exp":
        return u.args[0]
    if name == "exp" and u.kind == "func" and u.payload == "ln":
        return u.args[0]
    return _mark(Func(name, u))


def sin(u):
    return func("sin", u)


def cos(u):
    return func("cos", u)


def exp(u):
    return func("exp", u)


def ln(u):
    return func("ln", u)


def sqrt(u):
    return func("sqrt", u)


_SIMPLIFIED = {}


def simplify(e):
    """Canonical form of ``e`` (constant folding, identities, flattening,
    collection of like terms and powers).  Idempotent."""
    e = as_expr(e)
    if e.canonical:
        return e
    hit = _SIMPLIFIED.get(id(e))
    if hit is not None:
        return hit
    k = e.kind
    if k in ("const", "var"):
        out = _mark(e)
    elif k == "add":
        out = add(*(simplify(a) for a in e.args))
    elif k == "mul":
        out = mul(*(simplify(a) for a in e.args))
    elif k == "pow":
        out = power(simplify(e.args[0]), e.payload)
    elif k == "neg":
        out = mul(-1.0, simplify(e.args[0]))
    elif k == "div":
        out = mul(simplify(e.args[0]), power(simplify(e.args[1]), -1))
    elif k == "func":
        out = func(e.payload, simplify(e.args[0]))
    else:  # pragma: no cover
        raise TypeError(k)
    _SIMPLIFIED[id(e)] = out
    return out


# --------------------------------------------------------------------------
# differentiation
# --------------------------------------------------------------------------

_DERIVS = {}


def _var_name(var):
    return var.payload if isinstance(var, Var) else str(var)


def deriv(e, var):
    """Exact partial derivative of ``e`` with respect to coordinate ``var``."""
    e = _canon(e)
    name = _var_name(var)
    if name not in e.fv:
        return ZERO
    k = (id(e), name)
    hit = _DERIVS.get(k)
    if hit is not None:
        return hit
    kind = e.kind
    if kind == "var":
        out = ONE
    elif kind == "add":
        out = add(*(deriv(t, name) for t in e.args))
    elif kind == "mul":
        terms = []
        for i, f in enumerate(e.args):
            df = deriv(f, name)
            if df is not ZERO:
                terms.append(mul(df, *e.args[:i], *e.args[i + 1:]))
        out = add(*terms)
    elif kind == "pow":
        b, n = e.args[0], e.payload
        out = mul(n, power(b, n - 1), deriv(b, name))
    elif kind == "func":
        u = e.args[0]
        du = deriv(u, name)
        fn = e.payload
        if fn == "sin":
            out = mul(cos(u), du)
        elif fn == "cos":
            out = mul(-1.0, sin(u), du)
        elif fn == "exp":
            out = mul(e, du)
        elif fn == "ln":
            out = mul(du, power(u, -1))
        else:  # sqrt
            out = mul(0.5, du, power(e, -1))
    else:  # pragma: no cover - canonical trees hold no other kinds
        raise TypeError(kind)
    _DERIVS[k] = out
    return out


def gradient(e, chart):
    return [deriv(e, name) for name in chart.names]


# --------------------------------------------------------------------------
# numeric evaluation
# --------------------------------------------------------------------------


def _topo(roots):
    """Nodes reachable from ``roots`` in post-order (children first)."""
    order = []
    seen = set()
    for root in roots:
        if id(root) in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for a in node.args:
                if id(a) not in seen:
                    stack.append((a, False))
    return order


_UFUNC = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "ln": np.log, "sqrt": np.sqrt}


def _evaluate(roots, chart, pts, origins=None):
    k = pts.shape[0]
    val = {}
    bad = {}
    with np.errstate(all="ignore"):
        for node in _topo(roots):
            kind = node.kind
            own = None
            if kind == "const":
                v = np.full(k, node.payload)
            elif kind == "var":
                v = pts[:, chart.index(node.payload)]
            else:
                args = [val[id(a)] for a in node.args]
                if kind == "add":
                    v = args[0].copy()
                    for a in args[1:]:
                        v += a
                elif kind == "mul":
                    v = args[0].copy()
                    for a in args[1:]:
                        v *= a
                elif kind == "pow":
                    n = node.payload
                    if n < 0:
                        own = args[0] == 0.0
                    v = np.power(args[0], float(n))
                elif kind == "neg":
                    v = -args[0]
                elif kind == "div":
                    own = args[1] == 0.0
                    v = args[0] / args[1]
                else:
                    fn = node.payload
                    a = args[0]
                    if fn == "ln":
                        own = a <= 0.0
                    elif fn == "sqrt":
                        own = a < 0.0
                    v = _UFUNC[fn](a)
                if own is None:
                    own = ~np.isfinite(v)
                else:
                    own = own | ~np.isfinite(v)
                if not own.any():
                    own = None
                elif origins is not None:
                    origins.append(node)
            inherited = None
            for a in node.args:
                b = bad.get(id(a))
                if b is not None:
                    inherited = b if inherited is None else (inherited | b)
            if own is not None:
                inherited = own if inherited is None else (inherited | own)
            if inherited is not None:
                bad[id(node)] = inherited
            val[id(node)] = v
    out = []
    for root in roots:
        v = np.array(val[id(root)], dtype=float, copy=True)
        b = bad.get(id(root))
        if b is not None:
            v[b] = np.nan
        out.append(v)
    return out


def _as_points(chart, points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != chart.dim:
        raise ValueError(f"points must have {chart.dim} coordinates, got {pts.shape[1]}")
    return pts


def evaluate_many(exprs, chart, points):
    """Evaluate several expressions at many points, sharing common subexpressions.

    Returns a list of 1-D arrays (one value per point); NaN marks points where
    the expression is undefined.
    """
    pts = _as_points(chart, points)
    roots = [as_expr(e) for e in exprs]
    return _evaluate(roots, chart, pts)


def evaluate(e, chart, points):
    return evaluate_many([as_expr(e)], chart, points)[0]


def evaluate_array(arr, chart, points):
    """Evaluate an object array of expressions; result shape (npoints, *arr.shape)."""
    arr = np.asarray(arr, dtype=object)
    pts = _as_points(chart, points)
    flat = [as_expr(e) for e in arr.ravel()]
    vals = _evaluate(flat, chart, pts) if flat else []
    out = np.empty((pts.shape[0], len(flat)))
    for j, v in enumerate(vals):
        out[:, j] = v
    return out.reshape((pts.shape[0],) + arr.shape)


def eval_at(e, chart, point):
    """Value of ``e`` at a single point; raises DomainError off the domain."""
    e = as_expr(e)
    pts = _as_points(chart, point)
    origins = []
    v = _evaluate([e], chart, pts[:1], origins)[0][0]
    if not math.isfinite(v):
        culprit = origins[0] if origins else e
        raise DomainError(to_string(culprit), tuple(float(x) for x in pts[0]))
    return float(v)


def fd_derivative(e, chart, var, point, h):
    """Central difference (e(p+h) - e(p-h)) / 2h along coordinate ``var``."""
    p = np.asarray(point, dtype=float)
    i = chart.index(_var_name(var))
    plus, minus = p.copy(), p.copy()
    plus[i] += h
    minus[i] -= h
    return (eval_at(e, chart, plus) - eval_at(e, chart, minus)) / (2.0 * h)


def fd_residual(e, chart, var, point, h=1e-5):
    """|central difference - symbolic derivative| at ``point``."""
    if not h > 0:
        raise ValueError("step must be positive")
    return abs(fd_derivative(e, chart, var, point, h) - eval_at(deriv(e, var), chart, point))


# --------------------------------------------------------------------------
# printing
# --------------------------------------------------------------------------

_PREC = {"add": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4, "var": 5, "func": 5}


def _fmt_num(v):
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(e):
    if e.kind == "const":
        return 3 if e.payload < 0 else 5
    if e.kind == "mul" and e.args[0].kind == "const" and e.args[0].payload < 0:
        return 2
    return _PREC[e.kind]


def _wrap(s, cond):
    return f"({s})" if cond else s


def _negated_term(t):
    """For canonical terms with a negative numeric coefficient, the term with
    the sign stripped; otherwise None."""
    if t.kind == "const" and t.payload < 0:
        return Const(-t.payload)
    if t.kind == "mul" and t.args[0].kind == "const" and t.args[0].payload < 0:
        c = -t.args[0].payload
        rest = t.args[1:]
        if c == 1.0:
            return rest[0] if len(rest) == 1 else Mul(*rest)
        return Mul(Const(c), *rest)
    return None


def to_string(e):
    """Render ``e`` in the input grammar; parse_expr(to_string(e)) rebuilds
    a raw tree structurally equal to ``e`` (and simplify() of it equals
    simplify(e))."""
    e = as_expr(e)
    k = e.kind
    if k == "const":
        return _fmt_num(e.payload)
    if k == "var":
        return e.payload
    if k == "func":
        return f"{e.payload}({to_string(e.args[0])})"
    if k == "pow":
        b = e.args[0]
        return f"{_wrap(to_string(b), _prec(b) < 5)}^{e.payload}"
    if k == "neg":
        a = e.args[0]
        return "-" + _wrap(to_string(a), _prec(a) < 3 or a.kind == "const" and a.payload < 0)
    if k == "div":
        num, den = e.args
        return (_wrap(to_string(num), _prec(num) < 2) + "/"
                + _wrap(to_string(den), _prec(den) <= 2))
    if k == "mul":
        parts = []
        first = e.args[0]
        lead = ""
        rest = e.args
        if first.kind == "const" and first.payload == -1.0 and len(e.args) > 1:
            lead = "-"
            rest = e.args[1:]
        for i, f in enumerate(rest):
            if i == 0:
                cond = _prec(f) < 2 or f.kind == "mul" or (lead and _prec(f) < 3)
                if lead and f.kind == "const":
                    cond = True
            else:
                cond = _prec(f) <= 2 or (f.kind == "const" and f.payload < 0)
            parts.append(_wrap(to_string(f), cond))
        return lead + "*".join(parts)
    if k == "add":
        out = []
        for i, t in enumerate(e.args):
            if t.kind == "neg" and i > 0:
                a = t.args[0]
                out.append(" - " + _wrap(to_string(a), _prec(a) < 2))
                continue
            stripped = _negated_term(t) if i > 0 else None
            if stripped is not None:
                out.append(" - " + _wrap(to_string(stripped), _prec(stripped) < 2))
                continue
            s = _wrap(to_string(t), t.kind == "add")
            out.append(s if i == 0 else " + " + s)
        return "".join(out)
    raise TypeError(k)  # pragma: no cover


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src):
    pos = 0
    toks = []
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        start = m.start(m.lastgroup)
        toks.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src, names):
        self.src = src
        self.names = names
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ExprSyntaxError(f"expected {op!r}, found {t[1] or 'end of input'!r}", self.src, t[2])

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected token {t[1]!r}", self.src, t[2])
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else Neg(t))
        return terms[0] if len(terms) == 1 else Add(*terms)

    def term(self):
        pending = [self.unary()]
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            f = self.unary()
            if op == "*":
                pending.append(f)
            else:
                num = pending[0] if len(pending) == 1 else Mul(*pending)
                pending = [Div(num, f)]
        return pending[0] if len(pending) == 1 else Mul(*pending)

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.factor()

    def factor(self):
        b = self.base()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            return Pow(b, self.exponent())
        return b

    def exponent(self):
        paren = False
        t = self.peek()
        if t[0] == "op" and t[1] == "(":
            self.take()
            paren = True
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        t = self.take()
        if t[0] != "num" or not t[1].isdigit():
            raise ExprSyntaxError("exponent must be an integer", self.src, t[2])
        if paren:
            self.expect(")")
        return sign * int(t[1])

    def base(self):
        t = self.take()
        kind, text, pos = t
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if text in _FUNC_CODE:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            if self.names is not None and text not in self.names:
                raise UnknownIdentifier(f"unknown identifier {text!r}", self.src, pos)
            return Var(text)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", self.src, pos)


def parse_expr(source, chart=None):
    """Parse ``source`` into a raw expression tree.

    Identifiers must be coordinate names of ``chart`` (any identifier is
    accepted when ``chart`` is None).  Use ``simplify`` for canonical form.
    """
    names = None if chart is None else set(chart.names)
    return _Parser(source, names).parse()


def _rebuild(source, canonical):
    e = parse_expr(source)
    return simplify(e) if canonical else e


def parse(source, chart=None):
    """Parse and simplify."""
    return simplify(parse_expr(source, chart))
