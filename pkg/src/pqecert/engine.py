"""Single-target PQE solver based on certificate clauses.

Takes F1 out of the scope of quantifiers in exists-X [F1 and F2] by
proving the quantified clauses of F1 redundant one at a time. Redundancy
of the current target clause is established by a CDCL-style search that
learns certificate clauses implying the target in subspaces:

  * conflict certificates are implied by the formula, get added to it
    (to F1 when the target participated in their derivation, else F2);
  * non-conflict certificates are only equisatisfiability-preserving,
    are stored temporarily and never added.

Backtracking is triggered not just by conflicts but also when the target
is implied by a clause that became unit, or when the target is blocked
at a quantified variable. A unit target that is not trivially blocked
opens a nested level of target clauses that are proved redundant
recursively.
"""

import time

from .formula import QuantFormula, clause_vars, normalize_clause, resolve

CONFLICT = "conflict"
NONCONFLICT = "nonconflict"

SOLVED = "solved"
UNSAT = "unsat"
TIMEDOUT = "timedout"


class PqeTimeout(Exception):
    pass


def _clause_of(litset):
    """Tuple form of a literal set known to be clash- and
    duplicate-free (cheaper than normalize_clause)."""
    return tuple(sorted(litset, key=abs))


class _DuplicateClause(Exception):
    """A learned quantified clause duplicates one currently proved
    redundant; unwinds to the primary activation. Carries the assignment
    to the free variables at the time the duplicate was learned, since
    unwinding discards decisions made inside recursive activations."""

    def __init__(self, lits, y_snapshot):
        super().__init__(str(lits))
        self.lits = lits
        self.y_snapshot = y_snapshot


class Certificate:
    """A clause proving the target redundant in a subspace.

    The conditional holds the literals not shared with the target; the
    certificate implies the target exactly where its conditional is
    falsified.
    """

    __slots__ = ("clause", "kind", "target", "_conditional", "rec", "tainted")

    def __init__(self, clause, kind, target, rec=None, tainted=False):
        self.clause = tuple(clause)
        self.kind = kind
        self.target = tuple(target)
        self._conditional = None
        self.rec = rec
        self.tainted = tainted

    @property
    def conditional(self):
        # computed on demand: many certificates are resolved away before
        # anything looks at their conditional
        if self._conditional is None:
            tset = set(self.target)
            self._conditional = tuple([l for l in self.clause
                                       if l not in tset])
        return self._conditional

    def __repr__(self):
        return "Certificate(%s, %s)" % (list(self.clause), self.kind)


class _Clause:
    __slots__ = ("lits", "cid", "alive", "in_f1", "tainted")

    def __init__(self, lits, cid, in_f1, tainted=False):
        self.lits = lits
        self.cid = cid
        self.alive = True
        self.in_f1 = in_f1
        self.tainted = tainted

    def __repr__(self):
        return "C%d%s" % (self.cid, list(self.lits))


class _Entry:
    __slots__ = ("var", "val", "lit", "level", "antecedent", "decision", "pos")

    def __init__(self, var, val, level, antecedent, decision, pos):
        self.var = var
        self.val = val
        self.lit = var if val else -var
        self.level = level
        self.antecedent = antecedent
        self.decision = decision
        self.pos = pos


class _Reason:
    """Backtracking condition identified by BCP."""

    __slots__ = ("type", "rec", "cert")

    def __init__(self, type, rec=None, cert=None):
        self.type = type  # 'conflict' | 'implied' | 'blocked' | 'conflict_cert'
        self.rec = rec
        self.cert = cert


class _Ctx:
    """One activation of the redundancy-proving procedure."""

    __slots__ = ("target", "depth", "base_len", "base_levels", "active_certs")

    def __init__(self, target, depth, base_len, base_levels):
        self.target = target
        self.depth = depth
        self.base_len = base_len
        self.base_levels = base_levels
        self.active_certs = []


class Solution:
    def __init__(self, status, clauses, stats=None):
        self.status = status
        self.clauses = list(clauses)
        self.stats = stats or {}

    def __repr__(self):
        return "Solution(%s, %d clauses)" % (self.status, len(self.clauses))


class Solver:
    """Solves one PQE instance; single-threaded, single-use per call of
    take_out(). Set record=True to log certificates, clause additions
    and blocked-target events for inspection by tests."""

    def __init__(self, qf: QuantFormula, time_limit=None, record=False,
                 x_order=None):
        """x_order optionally fixes the decision order of the quantified
        variables (still deterministic); callers that know the formula's
        structure, like the unroller, pick orders under which most
        assignments propagate instead of being decided."""
        self.qf = qf
        self.record = record
        self.events = []
        self.time_limit = time_limit
        self._deadline = None

        self.db = []
        self.occ = {}
        for lits in qf.f1:
            self._new_clause(lits, in_f1=True)
        for lits in qf.f2:
            self._new_clause(lits, in_f1=False)
        self._is_free = [False] * (qf.nvars + 1)
        for v in qf.y:
            self._is_free[v] = True
        self._yvars = sorted(qf.y)
        if x_order is None:
            self._xvars = sorted(qf.x)
        else:
            given = [v for v in x_order if v in qf.x]
            if len(given) != len(set(given)):
                raise ValueError("duplicate variables in x_order")
            rest = sorted(qf.x - set(given))
            self._xvars = given + rest

        self.assign = {}
        self.trail = []
        self.levels = [0]
        self.var2entry = {}
        self.qhead = 0

        self._primary = None
        self._stack_targets = []     # lits of targets of active activations
        self._removed_lits = set()   # temporarily removed level members
        self._proved = set()         # targets proved in this run
        self._fresh = []             # clauses added during the current proof
        self._fresh_dirty = False
        self._f2_added = []
        self._need_full_scan = True
        self.stats = {"targets": 0, "decisions": 0, "propagations": 0,
                      "conflict_certs": 0, "special_clauses": 0,
                      "blocked_events": 0, "duplicates": 0}

    # ------------------------------------------------------------------
    # clause database

    def _new_clause(self, lits, in_f1, tainted=False):
        rec = _Clause(tuple(lits), len(self.db), in_f1, tainted)
        self.db.append(rec)
        for l in rec.lits:
            self.occ.setdefault(l, []).append(rec)
        return rec

    def _alive_clauses(self):
        return [r for r in self.db if r.alive]

    def _find_alive(self, lits):
        for l in lits:
            for rec in self.occ.get(l, ()):
                if rec.alive and rec.lits == lits:
                    return rec
            break
        return None

    def _is_quantified(self, lits):
        return any(not self._is_free[abs(l)] for l in lits)

    def _add_to_f(self, lits, tainted):
        """Add a learned clause (conflict certificate or special clause).

        Raises _DuplicateClause when the clause duplicates a quantified
        clause currently proved redundant; returns the existing record
        when the clause is already alive in F.
        """
        lits = normalize_clause(lits)
        if self._is_quantified(lits):
            # duplicating a clause whose redundancy proof is in progress
            # (or which is temporarily removed) would be circular, and
            # re-adding a clause already proved in this run would loop
            if lits in self._removed_lits or lits in self._stack_targets \
                    or lits in self._proved:
                snap = [(e.var, e.val) for e in self.trail
                        if self._is_free[e.var]]
                raise _DuplicateClause(lits, snap)
        existing = self._find_alive(lits) if lits else None
        if existing is not None:
            return existing
        rec = self._new_clause(lits, in_f1=tainted, tainted=tainted)
        self._fresh.append(rec)
        self._fresh_dirty = True
        if not tainted:
            self._f2_added.append(rec)
        self.stats["conflict_certs"] += 1
        if self.record:
            self.events.append(("added", lits, "F1" if tainted else "F2"))
        return rec

    # ------------------------------------------------------------------
    # trail

    def _lit_val(self, lit):
        val = self.assign.get(abs(lit))
        if val is None:
            return None
        return val if lit > 0 else not val

    def _push(self, var, val, antecedent, decision):
        assert var not in self.assign
        e = _Entry(var, val, len(self.levels) - 1, antecedent, decision,
                   len(self.trail))
        self.assign[var] = val
        self.var2entry[var] = e
        self.trail.append(e)
        return e

    def _new_level(self):
        self.levels.append(len(self.trail))

    def _pop_to_len(self, n):
        self._fresh_dirty = True
        while len(self.trail) > n:
            e = self.trail.pop()
            del self.assign[e.var]
            del self.var2entry[e.var]
        while len(self.levels) > 1 and self.levels[-1] >= len(self.trail) + 1:
            self.levels.pop()
        # a level whose decision was popped but whose start equals the new
        # trail length is dead as well
        while len(self.levels) > 1 and self.levels[-1] == len(self.trail):
            self.levels.pop()
        self.qhead = min(self.qhead, len(self.trail))

    def _pop_to_level(self, level, floor):
        if level + 1 < len(self.levels):
            self._fresh_dirty = True
            n = max(self.levels[level + 1], floor)
            while len(self.trail) > n:
                e = self.trail.pop()
                del self.assign[e.var]
                del self.var2entry[e.var]
            del self.levels[level + 1:]
            self.qhead = min(self.qhead, len(self.trail))

    def _restore(self, ctx):
        self._pop_to_len(ctx.base_len)
        del self.levels[ctx.base_levels:]
        if not self.levels:
            self.levels.append(0)

    # ------------------------------------------------------------------
    # main loop

    def take_out(self):
        """Prove the quantified clauses of F1 redundant one by one and
        return the remaining F1 (free clauses only) as the solution."""
        if self.time_limit is not None:
            self._deadline = time.monotonic() + self.time_limit
        try:
            while True:
                target = None
                for rec in self.db:
                    if rec.alive and rec.in_f1 and self._is_quantified(rec.lits):
                        target = rec
                        break
                if target is None:
                    break
                self.stats["targets"] += 1
                self._primary = target
                self._fresh = []
                self._fresh_dirty = False
                self._f2_added = []
                self._need_full_scan = True
                self._pop_to_len(0)
                self.levels = [0]
                cert = self._prv_red(target, depth=0)
                if self.record:
                    self.events.append(("final_cert", target.lits, cert.clause,
                                        cert.kind))
                if not cert.clause:
                    return Solution(UNSAT, [()], dict(self.stats))
                target.alive = False
                self._proved.add(target.lits)
                for rec in self._f2_added:
                    rec.alive = False
                self._pop_to_len(0)
        except PqeTimeout:
            partial = [r.lits for r in self.db
                       if r.alive and r.in_f1 and not self._is_quantified(r.lits)]
            return Solution(TIMEDOUT, partial, dict(self.stats))
        sol = [r.lits for r in self.db if r.alive and r.in_f1]
        assert all(not self._is_quantified(c) for c in sol)
        return Solution(SOLVED, sol, dict(self.stats))

    def _check_time(self):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise PqeTimeout()

    # ------------------------------------------------------------------
    # redundancy proof for one target

    def _prv_red(self, target, depth):
        ctx = _Ctx(target, depth, len(self.trail), len(self.levels))
        assert target.alive
        assert not any(self._lit_val(l) is True for l in target.lits), \
            "target satisfied at activation entry"
        self._stack_targets.append(target.lits)
        pending = None
        dup = None
        try:
            while True:
                self._check_time()
                try:
                    if dup is not None:
                        cert = self._duplicate_fallback(ctx, dup)
                        dup = None
                    else:
                        if pending is not None:
                            reason, pending = pending, None
                        else:
                            reason = self._bcp(ctx)
                            if reason is None:
                                self._decide(ctx)
                                continue
                        cert, adds = self._lrn(reason, ctx)
                        for lits, tainted in adds:
                            rec = self._add_to_f(lits, tainted)
                            if cert.kind == CONFLICT and lits == cert.clause:
                                cert.rec = rec
                    step, payload = self._backtrack_with(cert, ctx)
                except _DuplicateClause as d:
                    if depth > 0:
                        raise
                    dup = d
                    pending = None
                    continue
                if step == "done":
                    return payload
                if step == "reason":
                    pending = payload
        finally:
            self._stack_targets.pop()

    def _decide(self, ctx):
        # free vars before quantified ones; within the free vars, those
        # outside the target first, so that a conflict triggered by
        # falsifying a target literal finds the free vars fully assigned
        tvars = clause_vars(ctx.target.lits)
        var = None
        for v in self._yvars:
            if v not in self.assign and v not in tvars:
                var = v
                break
        if var is None:
            for v in self._yvars:
                if v not in self.assign:
                    var = v
                    break
        if var is None:
            for v in self._xvars:
                if v not in self.assign:
                    var = v
                    break
        if var is None:
            raise RuntimeError("no backtracking condition on a full assignment")
        val = False
        for l in ctx.target.lits:
            if abs(l) == var:
                val = l < 0  # falsify the target's literal
                break
        self._new_level()
        self._push(var, val, antecedent=None, decision=True)
        self.stats["decisions"] += 1

    # ------------------------------------------------------------------
    # BCP and its three backtracking conditions

    def _clause_state(self, rec):
        """-> ('sat', None) | ('conflict', None) | ('unit', lit) | ('open', n)"""
        assign = self.assign
        unassigned = None
        n = 0
        for l in rec.lits:
            v = assign.get(l if l > 0 else -l)
            if v is not None:
                if v == (l > 0):
                    return ("sat", None)
            else:
                unassigned = l
                n += 1
        if n == 0:
            return ("conflict", None)
        if n == 1:
            return ("unit", unassigned)
        return ("open", n)

    def _handle_unit(self, rec, ulit, ctx):
        if ulit in ctx.target.lits:
            return _Reason("implied", rec=rec)  # condition (b)
        self._push(abs(ulit), ulit > 0, antecedent=rec, decision=False)
        self.stats["propagations"] += 1
        return None

    def _scan(self, recs, ctx):
        for rec in recs:
            if not rec.alive or rec is ctx.target:
                continue
            st, data = self._clause_state(rec)
            if st == "conflict":
                return _Reason("conflict", rec=rec)
            if st == "unit":
                r = self._handle_unit(rec, data, ctx)
                if r is not None:
                    return r
        return None

    def _propagate(self, ctx):
        if self._need_full_scan:
            self._need_full_scan = False
            r = self._scan(self.db, ctx)
            if r is not None:
                return r
        if self._fresh_dirty:
            # fresh clauses can turn unit again after backtracking with
            # all their falsified literals below qhead, so they need a
            # rescan after every pop (and when first added); in between,
            # the occurrence walk below covers them
            r = self._scan(self._fresh, ctx)
            if r is not None:
                return r
            self._fresh_dirty = False
        while self.qhead < len(self.trail):
            e = self.trail[self.qhead]
            self.qhead += 1
            for rec in self.occ.get(-e.lit, ()):
                if not rec.alive or rec is ctx.target:
                    continue
                st, data = self._clause_state(rec)
                if st == "conflict":
                    return _Reason("conflict", rec=rec)
                if st == "unit":
                    r = self._handle_unit(rec, data, ctx)
                    if r is not None:
                        return r
        return None

    def _bcp(self, ctx):
        while True:
            reason = self._propagate(ctx)
            if reason is not None:
                return reason
            st, data = self._clause_state(ctx.target)
            if st == "conflict":
                return _Reason("conflict", rec=ctx.target)
            assert st != "sat", "target satisfied without condition (b)"
            if st == "unit" and not self._is_free[abs(data)]:
                return self._on_target_unit(ctx, abs(data))
            if self._derive_from_certs(ctx):
                continue
            reason = self._blocked_scan(ctx)
            if reason is not None:
                return reason
            return None

    def _derive_from_certs(self, ctx):
        assign = self.assign
        for cert in ctx.active_certs:
            unassigned = None
            n = 0
            ok = True
            for l in cert.conditional:
                v = assign.get(l if l > 0 else -l)
                if v is not None:
                    if v == (l > 0):
                        ok = False
                        break
                else:
                    unassigned = l
                    n += 1
            if ok and n == 1:
                self._push(abs(unassigned), unassigned > 0,
                           antecedent=cert, decision=False)
                self.stats["propagations"] += 1
                return True
        return False

    def _target_cofactor_lits(self, target):
        return [l for l in target.lits if self._lit_val(l) is None]

    def _resolvable_in_cofactor(self, rec, trg_lits, w):
        """Is rec (unsatisfied) resolvable with the target cofactor on w?
        Unresolvable when their cofactors have opposite literals of some
        other variable."""
        trg = set(trg_lits)
        for m in rec.lits:
            if abs(m) == w:
                continue
            if self._lit_val(m) is None and -m in trg:
                return False
        return True

    def _blocked_scan(self, ctx):
        trg_lits = self._target_cofactor_lits(ctx.target)
        for l in trg_lits:
            w = abs(l)
            if self._is_free[w]:
                continue
            blocked = True
            for rec in self.occ.get(-l, ()):
                if not rec.alive or rec is ctx.target:
                    continue
                st, _ = self._clause_state(rec)
                if st == "sat":
                    continue
                if self._resolvable_in_cofactor(rec, trg_lits, w):
                    blocked = False
                    break
            if blocked:
                return _Reason("blocked",
                               cert=self._build_blocked_cert(ctx, w))
        return None

    def _build_blocked_cert(self, ctx, w):
        """K' or K'': the longest clause falsified by the current
        assignment, extended with the target's literal of w plus enough
        target literals to stay unresolvable with whatever the target
        cofactor is unresolvable with."""
        target = ctx.target
        l_w = next(l for l in target.lits if abs(l) == w)
        k1 = [-e.lit for e in self.trail]
        trg_lits = self._target_cofactor_lits(target)
        k2 = {l_w}
        for rec in self.occ.get(-l_w, ()):
            if not rec.alive or rec is target:
                continue
            st, _ = self._clause_state(rec)
            if st == "sat":
                continue
            if not self._resolvable_in_cofactor(rec, trg_lits, w):
                for m in rec.lits:
                    if abs(m) != w and self._lit_val(m) is None and -m in trg_lits:
                        k2.add(-m)
        cert = Certificate(_clause_of(k1 + sorted(k2)), NONCONFLICT,
                           target.lits)
        self.stats["blocked_events"] += 1
        if self.record:
            self.events.append(
                ("blocked", target.lits, w, dict(self.assign), cert.clause,
                 [r.lits for r in self.db if r.alive]))
        return cert

    def _on_target_unit(self, ctx, x):
        """The target became unit on quantified variable x: open a new
        level of target clauses (those resolvable with the target on x),
        prove them redundant in the subspace satisfying the target, then
        report the target blocked at x (or propagate a conflict)."""
        target = ctx.target
        l_x = next(l for l in target.lits if abs(l) == x)

        def pending():
            out = [rec for rec in self.occ.get(-l_x, ())
                   if rec.alive and rec is not target
                   and self._clause_state(rec)[0] != "sat"]
            out.sort(key=lambda r: r.cid)
            return out

        abort = None
        if pending():
            push_pos = len(self.trail)
            self._push(x, l_x > 0, antecedent=target, decision=False)
            removed = []
            try:
                # proofs may add new clauses containing -l_x, so keep
                # re-collecting the level until it is exhausted
                while abort is None:
                    batch = pending()
                    if not batch:
                        break
                    for rec in batch:
                        self._check_time()
                        if not rec.alive or self._clause_state(rec)[0] == "sat":
                            continue
                        kcert = self._prv_red(rec, ctx.depth + 1)
                        rec.alive = False
                        self._removed_lits.add(rec.lits)
                        removed.append(rec)
                        if self._falsified_below(kcert.clause, push_pos):
                            abort = kcert
                            break
            finally:
                for rec in removed:
                    rec.alive = True
                    self._removed_lits.discard(rec.lits)
                self._pop_to_len(push_pos)
        if abort is not None:
            if abort.kind == CONFLICT and abort.rec is not None:
                return _Reason("conflict", rec=abort.rec)
            return _Reason("conflict_cert", cert=abort)
        return _Reason("blocked", cert=self._build_blocked_cert(ctx, x))

    def _falsified_below(self, lits, pos):
        for l in lits:
            e = self.var2entry.get(abs(l))
            if e is None or e.lit != -l or e.pos >= pos:
                return False
        return True

    # ------------------------------------------------------------------
    # learning

    def _lrn(self, reason, ctx):
        """Turn the backtracking reason into a certificate by resolving
        out the non-decision assignments of the current level."""
        target = ctx.target
        if reason.type == "conflict" and reason.rec is target:
            return self._lrn_target_conflict(ctx)
        if reason.type == "blocked":
            k = reason.cert.clause
            used_cert, tainted = False, False
        elif reason.type == "conflict_cert":
            k = reason.cert.clause
            used_cert, tainted = True, False
        else:
            k = reason.rec.lits
            used_cert = False
            tainted = reason.rec.tainted or reason.rec is self._primary
        if self.record:
            self.events.append(("kbct", reason.type, tuple(k)))
        k, used_cert, tainted = self._resolve_level(k, used_cert, tainted,
                                                    target.lits)
        kind = CONFLICT if reason.type == "conflict" and not used_cert \
            else NONCONFLICT
        cert = Certificate(k, kind, target.lits, tainted=tainted)
        adds = [(k, tainted)] if kind == CONFLICT else []
        if self.record:
            self.events.append(("learned", cert.clause, cert.kind))
        return cert, adds

    def _cert_resolvable(self, cert, pivot, target_lits):
        """Resolving with a certificate is only useful while every one of
        its literals (except the pivot's) is falsified or shared with the
        current target; a satisfied literal would leak into the
        conditional. Skipped resolutions just leave a falsified literal
        in the conditional, which is weaker but still sound."""
        assign = self.assign
        tset = set(target_lits)
        for l in cert.clause:
            v = abs(l)
            if v == pivot:
                continue
            a = assign.get(v)
            if a is None:
                if l not in tset:
                    return False
            elif a == (l > 0):
                return False
        return True

    def _resolve_level(self, k, used_cert, tainted, target_lits):
        # incremental set-based resolution: non-pivot literals on this
        # path are falsified or target-shared, so clashes cannot occur
        # and the union equals the resolvent
        kset = set(k)
        start = self.levels[-1]
        for pos in range(len(self.trail) - 1, start - 1, -1):
            e = self.trail[pos]
            if e.decision or -e.lit not in kset:
                continue
            ante = e.antecedent
            if isinstance(ante, Certificate):
                if not self._cert_resolvable(ante, e.var, target_lits):
                    continue
                used_cert = True
                other = ante.clause
            else:
                other = ante.lits
                tainted = tainted or ante.tainted or ante is self._primary
            kset.discard(-e.lit)
            for m in other:
                if abs(m) != e.var:
                    kset.add(m)
        return _clause_of(kset), used_cert, tainted

    def _lrn_target_conflict(self, ctx):
        """The falsified clause is the target itself. Resolve with the
        clause antecedents of the current level; if an assignment derived
        from a non-conflict certificate is reached, freeze the special
        clause (added to F in place of the target) and continue from it."""
        target = ctx.target
        if self.record:
            self.events.append(("kbct", "conflict_target", target.lits))
        kset = set(target.lits)
        start = self.levels[-1]
        special = None
        used_cert = False
        for pos in range(len(self.trail) - 1, start - 1, -1):
            e = self.trail[pos]
            if e.decision or -e.lit not in kset:
                continue
            ante = e.antecedent
            if isinstance(ante, Certificate):
                if not self._cert_resolvable(ante, e.var, target.lits):
                    continue
                if not used_cert:
                    special = _clause_of(kset)
                    self.stats["special_clauses"] += 1
                used_cert = True
                other = ante.clause
            else:
                other = ante.lits
            kset.discard(-e.lit)
            for m in other:
                if abs(m) != e.var:
                    kset.add(m)
        k = _clause_of(kset)
        if used_cert:
            cert = Certificate(k, NONCONFLICT, target.lits, tainted=True)
            adds = [(special, True)]
            if self.record:
                self.events.append(("special", special))
        else:
            cert = Certificate(k, CONFLICT, target.lits, tainted=True)
            adds = [(k, True)]
        if self.record:
            self.events.append(("learned", cert.clause, cert.kind))
        return cert, adds

    # ------------------------------------------------------------------
    # backtracking

    def _backtrack_with(self, cert, ctx):
        """Backtrack to the smallest level (not below the activation's
        entry point) where the certificate's conditional is unit and
        derive an assignment from it. Returns the certificate when the
        target is proved redundant in the whole entry subspace."""
        k = cert
        var2entry = self.var2entry
        while True:
            u = k.clause if k.kind == CONFLICT else k.conditional
            # trail levels grow with position, so tracking the two
            # deepest entries is enough to know the backjump level
            e1 = e2 = None
            for l in u:
                e = var2entry[l if l > 0 else -l]
                if e.pos >= ctx.base_len:
                    if e1 is None or e.pos > e1.pos:
                        e1, e2 = e, e1
                    elif e2 is None or e.pos > e2.pos:
                        e2 = e
            if e1 is None:
                self._restore(ctx)
                return ("done", k)
            l_deep = -e1.lit
            l1 = e1.level
            l2 = ctx.base_levels - 1
            if e2 is not None and e2.level > l2:
                l2 = e2.level
            if l2 < l1:
                break
            # no level where the conditional is unit: resolve out the
            # deepest non-decision entry and retry
            ext = sorted((en for en in
                          (var2entry[l if l > 0 else -l] for l in u)
                          if en.pos >= ctx.base_len),
                         key=lambda en: en.pos)
            cand = None
            for e in reversed(ext):
                if e.decision:
                    continue
                if isinstance(e.antecedent, Certificate) and \
                        not self._cert_resolvable(e.antecedent, e.var,
                                                  k.target):
                    continue
                cand = e
                break
            if cand is None:
                raise RuntimeError("cannot backjump on certificate %r" % (k,))
            ante = cand.antecedent
            if isinstance(ante, Certificate):
                newkind = NONCONFLICT
                other = ante.clause
            else:
                newkind = k.kind
                other = ante.lits
            ns = set(k.clause)
            ns.discard(-cand.lit)
            for m in other:
                if abs(m) != cand.var:
                    ns.add(m)
            newclause = _clause_of(ns)
            tainted = k.tainted or (not isinstance(ante, Certificate) and
                                    (ante.tainted or ante is self._primary))
            k = Certificate(newclause, newkind, k.target, tainted=tainted)
            if k.kind == CONFLICT:
                try:
                    k.rec = self._add_to_f(k.clause, tainted)
                except _DuplicateClause:
                    # cannot re-add the clause, but being implied it is
                    # still fine as a (weaker) non-conflict certificate
                    k = Certificate(newclause, NONCONFLICT, k.target,
                                    tainted=tainted)
        self._pop_to_level(l2, ctx.base_len)
        ctx.active_certs = [c for c in ctx.active_certs
                            if self._unassigned_count(c.conditional) < 2]
        if k.kind == NONCONFLICT:
            ctx.active_certs.append(k)
            ante = k
        else:
            assert k.rec is not None
            if l_deep in set(k.target):
                # the certificate's unit literal is shared with the
                # target: asserting it would satisfy the target, so this
                # is really backtracking condition (b)
                return ("reason", _Reason("implied", rec=k.rec))
            ante = k.rec
        self._push(abs(l_deep), l_deep > 0, antecedent=ante, decision=False)
        return ("continue", None)

    def _unassigned_count(self, lits):
        return sum(1 for l in lits if abs(l) not in self.assign)

    # ------------------------------------------------------------------
    # duplicate-clause fallback

    def _duplicate_fallback(self, ctx, dup):
        """A learned quantified clause duplicated one currently proved
        redundant. Discard it, fall back to a plain SAT check of the
        formula under the assignment to the free variables (as it was
        when the duplicate was learned), and continue with the
        certificate this yields."""
        self.stats["duplicates"] += 1
        for var, val in dup.y_snapshot:
            if var not in self.assign:
                self._new_level()
                self._push(var, val, antecedent=None, decision=True)
        y_entries = [e for e in self.trail if self._is_free[e.var]]
        y_assn = {e.var: e.val for e in y_entries}
        clauses = [r.lits for r in self.db if r.alive]
        model = _mini_sat(clauses, y_assn)
        b = normalize_clause([-e.lit for e in y_entries])
        if model is None:
            # the formula is unsatisfiable under the free-var assignment,
            # so its negation is implied (sound even when the assignment
            # is partial)
            cert = Certificate(b, CONFLICT, ctx.target.lits, tainted=True)
            cert.rec = self._add_to_f(b, tainted=True)
        else:
            # the non-conflict certificate below pins a single point of
            # the free-var space, so decide any remaining free vars to
            # the model's values (vars the model does not mention are
            # don't-cares)
            for v in self._yvars:
                if v not in self.assign:
                    val = model.get(v, False)
                    model[v] = val
                    self._new_level()
                    self._push(v, val, antecedent=None, decision=True)
            y_entries = [e for e in self.trail if self._is_free[e.var]]
            b = normalize_clause([-e.lit for e in y_entries])
            l_w = None
            for l in ctx.target.lits:
                v = abs(l)
                if not self._is_free[v] and model.get(v) == (l > 0):
                    l_w = l
                    break
            if l_w is None:
                # the model satisfies the target through a free literal;
                # the certificate reduces to true in this subspace, which
                # is just as good
                for l in ctx.target.lits:
                    if self._is_free[abs(l)] and model.get(abs(l)) == (l > 0):
                        l_w = l
                        break
            assert l_w is not None, "model does not satisfy the target"
            cert = Certificate(normalize_clause(b + (l_w,)), NONCONFLICT,
                               ctx.target.lits)
        if self.record:
            self.events.append(("duplicate_fallback", cert.clause, cert.kind))
        return cert


def _mini_sat(clauses, assumptions):
    """Self-contained DPLL with two watched literals, used by the
    duplicate fallback (kept separate from the oracle module, which must
    stay an independent checker). Returns a var -> bool model or None."""
    cls = []
    units = []
    for c in clauses:
        if not c:
            return None
        if len(c) == 1:
            units.append(c[0])
        else:
            cls.append(list(c))
    watches = {}
    for ci, c in enumerate(cls):
        watches.setdefault(c[0], []).append(ci)
        watches.setdefault(c[1], []).append(ci)

    assign = {}
    trail = []

    def value(l):
        v = assign.get(abs(l))
        if v is None:
            return None
        return v if l > 0 else not v

    def enqueue(l):
        v = value(l)
        if v is False:
            return False
        if v is None:
            assign[abs(l)] = l > 0
            trail.append(l)
        return True

    for v, val in assumptions.items():
        if not enqueue(v if val else -v):
            return None
    for l in units:
        if not enqueue(l):
            return None

    qhead = 0

    def propagate():
        nonlocal qhead
        while qhead < len(trail):
            fl = -trail[qhead]
            qhead += 1
            ws = watches.get(fl)
            if not ws:
                continue
            kept = []
            conflict = False
            for ci in ws:
                if conflict:
                    kept.append(ci)
                    continue
                c = cls[ci]
                if c[0] == fl:
                    c[0], c[1] = c[1], c[0]
                if value(c[0]) is True:
                    kept.append(ci)
                    continue
                moved = False
                for j in range(2, len(c)):
                    if value(c[j]) is not False:
                        c[1], c[j] = c[j], c[1]
                        watches.setdefault(c[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if not enqueue(c[0]):
                    conflict = True
            watches[fl] = kept
            if conflict:
                return False
        return True

    allvars = sorted(set(abs(l) for c in cls for l in c)
                     | set(abs(l) for l in units) | set(assumptions))
    stack = []  # (trail length, qhead, var index, var, tried both)
    vi = 0
    while True:
        if propagate():
            while vi < len(allvars) and allvars[vi] in assign:
                vi += 1
            if vi == len(allvars):
                return dict(assign)
            v = allvars[vi]
            stack.append((len(trail), qhead, vi, v, False))
            enqueue(v)
        else:
            while stack:
                tl, qh, svi, v, tried = stack.pop()
                for l in trail[tl:]:
                    del assign[abs(l)]
                del trail[tl:]
                qhead = qh
                if not tried:
                    stack.append((tl, qh, svi, v, True))
                    vi = svi
                    enqueue(-v)
                    break
            else:
                return None


def take_out(qf, time_limit=None, record=False, x_order=None):
    """Convenience wrapper: solve the PQE problem for qf."""
    solver = Solver(qf, time_limit=time_limit, record=record,
                    x_order=x_order)
    return solver.take_out(), solver


def sat_via_pqe(clauses, nvars, time_limit=None):
    """SAT via PQE: take the clauses falsified by the all-false
    assignment out of a fully quantified formula. An empty solution
    means satisfiable, the empty clause means unsatisfiable."""
    clauses = [normalize_clause(c) for c in clauses]
    h = [c for c in clauses if all(l > 0 for l in c)]
    if not h:
        return "SAT"
    rest = [c for c in clauses if not all(l > 0 for l in c)]
    qf = QuantFormula(nvars=nvars, f1=h, f2=rest, y=frozenset())
    sol, _ = take_out(qf, time_limit=time_limit)
    if sol.status == TIMEDOUT:
        raise PqeTimeout()
    if sol.clauses and () in sol.clauses:
        return "UNSAT"
    assert not sol.clauses
    return "SAT"
