"""Gate-level sequential circuits in AIGER terms, plus an ASCII AIGER
(`aag`) reader/writer and the FIFO model generator.

Literal convention follows AIGER: variable v is literal 2*v, its
negation 2*v+1; literal 0 is the constant false, 1 the constant true.
Latch init values are 0, 1 or None (unconstrained).
"""

from dataclasses import dataclass, field


@dataclass
class Circuit:
    maxvar: int
    inputs: list  # even literals
    latches: list  # (latch literal, next-state literal, init)
    outputs: list
    ands: list  # (lhs literal, rhs0, rhs1)
    input_names: list = field(default_factory=list)
    latch_names: list = field(default_factory=list)

    def __post_init__(self):
        if not self.input_names:
            self.input_names = ["i%d" % k for k in range(len(self.inputs))]
        if not self.latch_names:
            self.latch_names = ["l%d" % k for k in range(len(self.latches))]


def neg(lit):
    return lit ^ 1


def topo_ands(c: Circuit):
    """AND gates in dependency order; raises on a combinational cycle."""
    defs = {a[0] >> 1: a for a in c.ands}
    order = []
    state = {}  # var -> 1 visiting, 2 done
    for a in c.ands:
        stack = [a[0] >> 1]
        while stack:
            v = stack[-1]
            if state.get(v) == 2 or v not in defs:
                stack.pop()
                continue
            if state.get(v) == 1:
                state[v] = 2
                order.append(defs[v])
                stack.pop()
                continue
            state[v] = 1
            for r in defs[v][1:]:
                rv = r >> 1
                if rv in defs and state.get(rv) != 2:
                    if state.get(rv) == 1:
                        raise ValueError("cyclic netlist at variable %d" % rv)
                    stack.append(rv)
    return order


class Builder:
    """Incremental netlist construction with constant folding and
    structural hashing of AND gates."""

    def __init__(self):
        self.maxvar = 0
        self.inputs = []
        self.latches = []
        self.outputs = []
        self.ands = []
        self.input_names = []
        self.latch_names = []
        self._cache = {}

    @classmethod
    def wrap(cls, c: Circuit):
        """Builder extending an existing circuit (for augmentation)."""
        b = cls()
        b.maxvar = c.maxvar
        b.inputs = list(c.inputs)
        b.latches = [list(l) for l in c.latches]
        b.outputs = list(c.outputs)
        b.ands = list(c.ands)
        b.input_names = list(c.input_names)
        b.latch_names = list(c.latch_names)
        return b

    def _fresh(self):
        self.maxvar += 1
        return 2 * self.maxvar

    def add_input(self, name=None):
        lit = self._fresh()
        self.inputs.append(lit)
        self.input_names.append(name or "i%d" % (len(self.inputs) - 1))
        return lit

    def add_latch(self, init, name=None):
        lit = self._fresh()
        self.latches.append([lit, None, init])
        self.latch_names.append(name or "l%d" % (len(self.latches) - 1))
        return lit

    def set_next(self, latch_lit, next_lit):
        for l in self.latches:
            if l[0] == latch_lit:
                l[1] = next_lit
                return
        raise ValueError("unknown latch literal %d" % latch_lit)

    def and_(self, a, b):
        if a == 0 or b == 0 or a == neg(b):
            return 0
        if a == 1:
            return b
        if b == 1 or a == b:
            return a
        key = (a, b) if a < b else (b, a)
        if key in self._cache:
            return self._cache[key]
        lit = self._fresh()
        self.ands.append((lit, key[0], key[1]))
        self._cache[key] = lit
        return lit

    def or_(self, a, b):
        return neg(self.and_(neg(a), neg(b)))

    def xor_(self, a, b):
        return self.or_(self.and_(a, neg(b)), self.and_(neg(a), b))

    def mux(self, sel, a, b):
        """sel ? a : b"""
        return self.or_(self.and_(sel, a), self.and_(neg(sel), b))

    def eq_const(self, bits, value):
        """AND over bit literals matching the little-endian constant."""
        acc = 1
        for j, lit in enumerate(bits):
            want = (value >> j) & 1
            acc = self.and_(acc, lit if want else neg(lit))
        return acc

    def inc_mod(self, bits, modulus):
        """bits + 1 mod modulus, little-endian; wraps to 0 at modulus-1."""
        out = []
        carry = 1
        for lit in bits:
            out.append(self.xor_(lit, carry))
            carry = self.and_(lit, carry)
        if modulus != 1 << len(bits):
            wrap = self.eq_const(bits, modulus - 1)
            out = [self.and_(neg(wrap), o) for o in out]
        return out

    def circuit(self) -> Circuit:
        for l in self.latches:
            if l[1] is None:
                raise ValueError("latch %d has no next-state function" % l[0])
        return Circuit(maxvar=self.maxvar, inputs=self.inputs,
                       latches=[tuple(l) for l in self.latches],
                       outputs=list(self.outputs), ands=list(self.ands),
                       input_names=list(self.input_names),
                       latch_names=list(self.latch_names))


def build_fifo(n: int, p: int, val: int, buggy: bool = False) -> Circuit:
    """Circular FIFO buffer with n data words of p bits plus write and
    read pointers. Inputs: push, pop, dataIn[p]. The buggy variant
    silently ignores a push whenever dataIn equals val, so val can never
    enter the buffer."""
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    if not 1 <= val < (1 << p):
        raise ValueError("need 1 <= val < 2^p")
    b = Builder()
    push = b.add_input("push")
    pop = b.add_input("pop")
    din = [b.add_input("dataIn%d" % j) for j in range(p)]
    data = [[b.add_latch(0, "data%d_%d" % (i, j)) for j in range(p)]
            for i in range(n)]
    pbits = max(1, (n - 1).bit_length())
    wptr = [b.add_latch(0, "wptr%d" % j) for j in range(pbits)]
    rptr = [b.add_latch(0, "rptr%d" % j) for j in range(pbits)]

    blocked = b.eq_const(din, val) if buggy else 0
    do_push = b.and_(push, neg(blocked))
    for i in range(n):
        sel = b.and_(do_push, b.eq_const(wptr, i))
        for j in range(p):
            b.set_next(data[i][j], b.mux(sel, din[j], data[i][j]))
    winc = b.inc_mod(wptr, n)
    for j in range(pbits):
        b.set_next(wptr[j], b.mux(do_push, winc[j], wptr[j]))
    rinc = b.inc_mod(rptr, n)
    for j in range(pbits):
        b.set_next(rptr[j], b.mux(pop, rinc[j], rptr[j]))
    return b.circuit()


def add_stutter(c: Circuit) -> Circuit:
    """Augment with a global stutter input that freezes every latch,
    making the transition relation reflexive."""
    b = Builder.wrap(c)
    st = b.add_input("stutter")
    for lit, nxt, _ in list(b.latches):
        b.set_next(lit, b.mux(st, lit, nxt))
    return b.circuit()


def write_aag(c: Circuit) -> str:
    """Serialize in canonical aag form: inputs first, then latches, then
    AND gates in topological order, variables renumbered accordingly."""
    remap = {0: 0}
    nxt = [1]

    def assign(lit):
        remap[lit >> 1] = nxt[0]
        nxt[0] += 1

    for lit in c.inputs:
        assign(lit)
    for lit, _, _ in c.latches:
        assign(lit)
    order = topo_ands(c)
    for a in order:
        assign(a[0])

    def m(lit):
        return 2 * remap[lit >> 1] + (lit & 1)

    lines = ["aag %d %d %d %d %d" % (nxt[0] - 1, len(c.inputs),
                                     len(c.latches), len(c.outputs),
                                     len(order))]
    for lit in c.inputs:
        lines.append(str(m(lit)))
    for lit, nlit, init in c.latches:
        if init is None:
            lines.append("%d %d %d" % (m(lit), m(nlit), m(lit)))
        elif init == 1:
            lines.append("%d %d 1" % (m(lit), m(nlit)))
        else:
            lines.append("%d %d" % (m(lit), m(nlit)))
    for lit in c.outputs:
        lines.append(str(m(lit)))
    for lhs, a, b in order:
        lines.append("%d %d %d" % (m(lhs), m(a), m(b)))
    for k, name in enumerate(c.input_names):
        lines.append("i%d %s" % (k, name))
    for k, name in enumerate(c.latch_names):
        lines.append("l%d %s" % (k, name))
    return "\n".join(lines) + "\n"


def read_aag(text: str) -> Circuit:
    lines = [l.strip() for l in text.splitlines() if l.strip()]
    if not lines or not lines[0].startswith("aag "):
        raise ValueError("not an ASCII AIGER (aag) file")
    try:
        m_, i_, l_, o_, a_ = (int(t) for t in lines[0].split()[1:6])
    except ValueError:
        raise ValueError("bad aag header: %r" % lines[0])
    body = lines[1:]
    if len(body) < i_ + l_ + o_ + a_:
        raise ValueError("truncated aag file")
    pos = 0
    inputs = [int(body[pos + k]) for k in range(i_)]
    pos += i_
    latches = []
    for k in range(l_):
        f = [int(t) for t in body[pos + k].split()]
        if len(f) == 2:
            latches.append((f[0], f[1], 0))
        elif len(f) == 3:
            init = None if f[2] == f[0] else f[2]
            if init not in (0, 1, None):
                raise ValueError("bad latch init %d" % f[2])
            latches.append((f[0], f[1], init))
        else:
            raise ValueError("bad latch line: %r" % body[pos + k])
    pos += l_
    outputs = [int(body[pos + k]) for k in range(o_)]
    pos += o_
    ands = []
    for k in range(a_):
        f = [int(t) for t in body[pos + k].split()]
        if len(f) != 3:
            raise ValueError("bad and line: %r" % body[pos + k])
        ands.append(tuple(f))
    pos += a_
    input_names = ["i%d" % k for k in range(i_)]
    latch_names = ["l%d" % k for k in range(l_)]
    for line in body[pos:]:
        if line.startswith("c"):
            break
        kind, rest = line[0], line[1:].split(None, 1)
        if len(rest) == 2 and kind in "il" and rest[0].isdigit():
            idx = int(rest[0])
            if kind == "i" and idx < i_:
                input_names[idx] = rest[1]
            elif kind == "l" and idx < l_:
                latch_names[idx] = rest[1]
    return Circuit(maxvar=m_, inputs=inputs, latches=latches,
                   outputs=outputs, ands=ands,
                   input_names=input_names, latch_names=latch_names)
