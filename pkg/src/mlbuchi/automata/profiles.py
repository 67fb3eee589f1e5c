"""Transition profiles, the profile monoid and Ramsey-style complementation.

A profile of a nonempty word ``u`` is the pair ``(I, J)`` where ``I`` holds
the state pairs ``(p, q)`` with a run ``p -u-> q`` and ``J ⊆ I`` the pairs
with such a run visiting an accepting state.  Endpoints count as visited.
Relations are stored row-wise as bitmasks: ``I[p]`` has bit ``q`` set iff
``(p, q) ∈ I``.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor

from ..errors import ProfileLimitExceeded
from ..formula import disj
from .base import merge_parallel
from .buechi import (
    SymbolicBuechi, buechi_intersect, buechi_is_empty, buechi_union, concat,
    empty_buechi, omega_power, prune,
)
from .nfa import SymbolicNFA, epsilon_nfa

#: default ceiling on the number of profiles explored
MAX_PROFILES = 50000


class TransitionProfile:
    __slots__ = ("I", "J", "_hash")

    def __init__(self, I, J):
        self.I = tuple(I)
        self.J = tuple(J)
        self._hash = hash((self.I, self.J))

    @classmethod
    def from_pairs(cls, n, I, J):
        rows_i = [0] * n
        rows_j = [0] * n
        for p, q in I:
            rows_i[p] |= 1 << q
        for p, q in J:
            rows_j[p] |= 1 << q
        return cls(rows_i, rows_j)

    @classmethod
    def identity(cls, n, accepting):
        return cls([1 << p for p in range(n)],
                   [(1 << p) if p in accepting else 0 for p in range(n)])

    @property
    def n(self):
        return len(self.I)

    def pairs(self, rows):
        return frozenset((p, q) for p, r in enumerate(rows) for q in _bits(r))

    @property
    def I_pairs(self):
        return self.pairs(self.I)

    @property
    def J_pairs(self):
        return self.pairs(self.J)

    def __mul__(self, other):
        I1, J1, I2, J2 = self.I, self.J, other.I, other.J
        I, J = [], []
        for p in range(len(I1)):
            ri = rj = 0
            for q in _bits(I1[p]):
                ri |= I2[q]
                rj |= J2[q]
            for q in _bits(J1[p]):
                rj |= I2[q]
            I.append(ri)
            J.append(rj)
        return TransitionProfile(I, J)

    def is_idempotent(self):
        return self * self == self

    def __eq__(self, other):
        return isinstance(other, TransitionProfile) and self.I == other.I and self.J == other.J

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"TP(I={sorted(self.I_pairs)}, J={sorted(self.J_pairs)})"


def _bits(r):
    while r:
        low = r & -r
        yield low.bit_length() - 1
        r ^= low


def letter_profile(A, chosen):
    """Profile of any letter satisfying exactly the labels in ``chosen``."""
    n = A.n_states
    fmask = 0
    for q in A.accepting:
        fmask |= 1 << q
    I = [0] * n
    for p, f, q in A.transitions:
        if f in chosen:
            I[p] |= 1 << q
    J = [I[p] if p in A.accepting else I[p] & fmask for p in range(n)]
    return TransitionProfile(I, J)


def word_profile(A, w):
    """Profile of a concrete nonempty word by direct simulation."""
    from .base import letter_env

    prof = None
    for letter in w:
        env = letter_env(A.arity, letter)
        chosen = {f for _, f, _ in A.transitions if A.theory.evaluate(f, env)}
        g = letter_profile(A, chosen)
        prof = g if prof is None else prof * g
    if prof is None:
        return TransitionProfile.identity(A.n_states, A.accepting)
    return prof


def _star(rows):
    """Reflexive-transitive closure of a row-bitmask relation."""
    n = len(rows)
    out = [r | (1 << p) for p, r in enumerate(rows)]
    for k in range(n):
        bk = 1 << k
        rk = out[k]
        for p in range(n):
            if out[p] & bk:
                out[p] |= rk
    return out


class ProfileMonoid:
    """Reachable profiles of nonempty words, generated by letter classes.

    Attributes
    ----------
    automaton : the Büchi automaton the profiles describe
    classes : list of ``(label, profile)``; labels partition ``M^n`` and all
        letters of one class share the profile
    profiles : list of distinct profiles of nonempty words (BFS order)
    epsilon : profile of the empty word
    """

    def __init__(self, A, max_profiles=MAX_PROFILES):
        self.automaton = A
        theory = A.theory
        labels = list(dict.fromkeys(f for _, f, _ in A.transitions))
        grouped = {}
        for J, psi in theory.mintermize(labels):
            chosen = {labels[j - 1] for j in J}
            grouped.setdefault(letter_profile(A, chosen), []).append(psi)
        self.classes = [(theory.simplify(disj(psis)), g) for g, psis in grouped.items()]
        self.epsilon = TransitionProfile.identity(A.n_states, A.accepting)
        self.generators = [g for _, g in self.classes]
        index = {}
        order = []
        queue = deque()
        for g in self.generators:
            if g not in index:
                index[g] = len(order)
                order.append(g)
                queue.append(g)
        while queue:
            s = queue.popleft()
            for g in self.generators:
                t = s * g
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                    queue.append(t)
                    if len(order) > max_profiles:
                        raise ProfileLimitExceeded(
                            f"more than {max_profiles} transition profiles")
        self.profiles = order
        self.index = index

    def __len__(self):
        return len(self.profiles)

    def __iter__(self):
        return iter(self.profiles)

    def label_of(self, profile):
        return disj([f for f, g in self.classes if g == profile])

    def dfa(self, accepting=()):
        """Deterministic automaton tracking the profile of the input read so far.

        State 0 stands for the empty word; state ``i + 1`` for
        ``profiles[i]``.  ``accepting`` is a collection of profiles (the
        empty-word profile may be passed as :attr:`epsilon`).
        """
        A = self.automaton
        trans = []
        for s, sigma in enumerate([None] + self.profiles):
            for f, g in self.classes:
                t = g if sigma is None else sigma * g
                trans.append((s, f, self.index[t] + 1))
        acc = {0 if tau is self.epsilon else self.index[tau] + 1 for tau in accepting}
        names = ["ε"] + [f"τ{i}" for i in range(len(self.profiles))]
        return SymbolicNFA(A.theory, A.arity, len(self.profiles) + 1, 0, acc, trans, names=names)

    def class_automaton(self, tau):
        """``U_τ``: the words whose profile is ``tau``."""
        if tau is self.epsilon:
            return epsilon_nfa(self.automaton.theory, self.automaton.arity)
        return self.dfa([tau])

    def lasso_class_accepted(self, tau0, tau):
        """Whether every word of ``U_τ0 · U_τ^ω`` is accepted.

        By saturation the class is either contained in the language or
        disjoint from it.  A run exists iff, from the states reachable
        after the prefix, some ``J_τ`` edge ``(a, b)`` lies on an
        ``I_τ``-cycle.
        """
        A = self.automaton
        if tau0 is self.epsilon:
            start = 1 << A.initial
        else:
            start = tau0.I[A.initial]
        star = _star(tau.I)
        reach = 0
        for s in _bits(start):
            reach |= star[s]
        for a in _bits(reach):
            for b in _bits(tau.J[a]):
                if star[b] >> a & 1:
                    return True
        return False

    def pairs(self, restrict="idempotent"):
        """Candidate ``(τ0, τ)`` pairs; ``τ0`` may be :attr:`epsilon`."""
        prefixes = [self.epsilon] + self.profiles
        if restrict == "all":
            return [(t0, t) for t0 in prefixes for t in self.profiles]
        if restrict != "idempotent":
            raise ValueError(f"unknown pair restriction {restrict!r}")
        idem = [t for t in self.profiles if t.is_idempotent()]
        out = []
        for t in idem:
            out.append((self.epsilon, t))
            for t0 in self.profiles:
                if t0 * t == t0:
                    out.append((t0, t))
        return out


def compute_profiles(A, max_profiles=MAX_PROFILES):
    return ProfileMonoid(prune(A), max_profiles=max_profiles)


def _ntp_by_automata(monoid, pair):
    tau0, tau = pair
    A = monoid.automaton
    K = concat(monoid.class_automaton(tau0), omega_power(monoid.class_automaton(tau)))
    return buechi_is_empty(buechi_intersect(K, A))


def ntp_pairs(monoid, restrict="idempotent", method="graph", jobs=1):
    """Pairs ``(τ0, τ)`` whose class ``U_τ0 · U_τ^ω`` avoids the language."""
    candidates = monoid.pairs(restrict)
    if method == "graph":
        return [p for p in candidates if not monoid.lasso_class_accepted(*p)]
    if method != "automata":
        raise ValueError(f"unknown NTP method {method!r}")
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(lambda p: _ntp_by_automata(monoid, p), candidates))
    else:
        verdicts = [_ntp_by_automata(monoid, p) for p in candidates]
    return [p for p, empty in zip(candidates, verdicts) if empty]


def _shared_complement(monoid, ntp):
    """One prefix tracker shared by per-τ copies of ``U_τ^ω``."""
    A = monoid.automaton
    classes = monoid.classes
    targets = {}
    for tau0, tau in ntp:
        targets.setdefault(tau0, []).append(tau)
    START = None
    index = {}
    order = []
    trans = []

    def sid(s):
        if s not in index:
            index[s] = len(order)
            order.append(s)
            queue.append(s)
        return index[s]

    back = {}
    for sigma in monoid.profiles:
        for g in monoid.generators:
            back.setdefault(sigma * g, set()).add(sigma)
    live = {}

    def coreach(tau):
        # profiles from which tau can still be completed
        if tau not in live:
            seen = {tau}
            stack = [tau]
            while stack:
                for s in back.get(stack.pop(), ()):
                    if s not in seen:
                        seen.add(s)
                        stack.append(s)
            live[tau] = seen
        return live[tau]

    def cycle_moves(tau, sigma):
        # moves of the ω-power of U_τ from its state sigma (START = the
        # isolated, accepting initial state); dead profiles are skipped
        ok = coreach(tau)
        for f, g in classes:
            t = g if sigma is START else sigma * g
            if t in ok:
                yield f, ("C", tau, t)
            if t == tau:
                yield f, ("C", tau, START)

    queue = deque()
    sid(("P", monoid.epsilon))
    while queue:
        s = queue.popleft()
        i = index[s]
        if s[0] == "P":
            sigma = s[1]
            for f, g in classes:
                t = g if sigma is monoid.epsilon else sigma * g
                trans.append((i, f, sid(("P", t))))
            for tau in targets.get(sigma, ()):
                for f, t in cycle_moves(tau, START):
                    trans.append((i, f, sid(t)))
        else:
            _, tau, sigma = s
            for f, t in cycle_moves(tau, sigma):
                trans.append((i, f, sid(t)))
    acc = [i for i, s in enumerate(order) if s[0] == "C" and s[2] is START]
    names = []
    pid = {t: k for k, t in enumerate(monoid.profiles)}
    for s in order:
        if s[0] == "P":
            names.append("P" + ("ε" if s[1] is monoid.epsilon else str(pid[s[1]])))
        else:
            names.append(f"C{pid[s[1]]}." + ("s" if s[2] is START else str(pid[s[2]])))
    return SymbolicBuechi(A.theory, A.arity, len(order), 0, acc,
                          merge_parallel(A.theory, trans), names=names)


def _union_complement(monoid, ntp):
    A = monoid.automaton
    out = empty_buechi(A.theory, A.arity)
    for tau0, tau in ntp:
        K = concat(monoid.class_automaton(tau0), omega_power(monoid.class_automaton(tau)))
        out = buechi_union(out, K)
    return out


def buechi_complement(A, restrict="idempotent", ntp="graph", construction="shared",
                      reduce=True, jobs=1, max_profiles=MAX_PROFILES):
    """Büchi automaton for the complement of ``L(A)`` over ``M^n``.

    Parameters
    ----------
    restrict : "idempotent" (default) keeps pairs with ``τ`` idempotent and
        ``τ0·τ = τ0`` (plus the empty prefix); "all" keeps every pair
    ntp : "graph" decides each class by the profile graph; "automata"
        intersects ``U_τ0 · U_τ^ω`` with ``A`` and tests emptiness
    construction : "shared" or "union" (literal union of the class automata)
    reduce : trim and merge bisimilar states in the result
    """
    from .reduce import reduce as _reduce

    monoid = compute_profiles(A, max_profiles=max_profiles)
    bad = ntp_pairs(monoid, restrict=restrict, method=ntp, jobs=jobs)
    if not bad:
        return empty_buechi(A.theory, A.arity)
    if construction == "shared":
        C = _shared_complement(monoid, bad)
    elif construction == "union":
        C = _union_complement(monoid, bad)
    else:
        raise ValueError(f"unknown construction {construction!r}")
    return _reduce(C) if reduce else prune(C)


def buechi_included(A, B, witness=False, **kw):
    """``L(A) ⊆ L(B)``; with ``witness=True`` also a lasso in ``L(A) \\ L(B)``."""
    from .base import check_compatible

    check_compatible(A, B)
    D = buechi_intersect(A, buechi_complement(B, **kw))
    if not witness:
        return buechi_is_empty(D)
    empty, lasso = buechi_is_empty(D, witness=True)
    return empty, lasso


def buechi_equivalent(A, B, witness=False, **kw):
    """Mutual inclusion; the witness lies in the symmetric difference."""
    ok, lasso = buechi_included(A, B, witness=True, **kw)
    if not ok:
        return (False, lasso) if witness else False
    ok, lasso = buechi_included(B, A, witness=True, **kw)
    if witness:
        return ok, lasso
    return ok


__all__ = [
    "TransitionProfile", "ProfileMonoid", "compute_profiles", "letter_profile",
    "word_profile", "ntp_pairs", "buechi_complement", "buechi_included",
    "buechi_equivalent", "MAX_PROFILES",
]
