"""Group actions on trees: amalgams of cyclic groups and free groups.

For Gamma = A *_C B with A = Z/a = <x>, B = Z/b = <y> and C = Z/c embedded as
<x^{a/c}> = <y^{b/c}> =: <z>, the subgroup C is central, so every element has
the normal form z^e s_1 ... s_k with alternating syllables s_i = x^i
(0 < i < a/c) or y^j (0 < j < b/c).  Vertices of the Bass-Serre tree are the
cosets gA, gB and edges the cosets gC (joining gA to gB).  For the free group
the tree is the Cayley tree of the standard generators.

Words are strings over single-letter generators with optional integer powers,
e.g. "a b^-1 a^2" or "abAB" (upper case = inverse).  Amalgams use a for the
generator of A and b for the generator of B; free groups use a, b, c, ...
"""
from __future__ import annotations

import itertools
import re
import string
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

_TOKEN = re.compile(r"([A-Za-z])(?:\^(-?\d+))?")


def parse_word(word: str) -> list[tuple[str, int]]:
    """'a b^-1 A' -> [('a', 1), ('b', -1), ('a', -1)]."""
    s = re.sub(r"[\s*·]", "", word or "")
    if s in ("", "1", "e"):
        return []
    out, pos = [], 0
    for m in _TOKEN.finditer(s):
        if m.start() != pos:
            raise ValueError(f"cannot parse word {word!r}")
        pos = m.end()
        letter, exp = m.group(1), int(m.group(2)) if m.group(2) else 1
        if letter.isupper():
            letter, exp = letter.lower(), -exp
        out.append((letter, exp))
    if pos != len(s):
        raise ValueError(f"cannot parse word {word!r}")
    return out


@dataclass(frozen=True)
class AmalgamSpec:
    """kind 'amalgam' (orders a, c, b) or 'free' (rank k)."""

    kind: str
    a: int = 0
    c: int = 0
    b: int = 0
    k: int = 0

    def __post_init__(self):
        if self.kind == "amalgam":
            if self.a < 2 or self.b < 2 or self.c < 1:
                raise ValueError("factor orders must be at least 2 and the shared order positive")
            if self.a % self.c or self.b % self.c:
                raise ValueError("shared order must divide both factor orders")
            if self.a == self.c or self.b == self.c:
                raise ValueError("shared subgroup must be proper in both factors")
        elif self.kind == "free":
            if self.k < 1:
                raise ValueError("free rank must be positive")
            if self.k > 26:
                raise ValueError("free rank at most 26")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def parse(cls, s: str) -> "AmalgamSpec":
        """'a,c,b' for Z/a *_{Z/c} Z/b or 'free:k'."""
        s = s.strip().lower()
        m = re.fullmatch(r"free:(\d+)", s)
        if m:
            return cls("free", k=int(m.group(1)))
        parts = [p.strip() for p in s.split(",")]
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise ValueError(f"amalgam spec must be 'a,c,b' or 'free:k', got {s!r}")
        a, c, b = (int(p) for p in parts)
        return cls("amalgam", a=a, c=c, b=b)

    def __str__(self):
        return f"free:{self.k}" if self.kind == "free" else f"{self.a},{self.c},{self.b}"

    @property
    def letters(self) -> tuple[str, ...]:
        return ("a", "b") if self.kind == "amalgam" else tuple(string.ascii_lowercase[: self.k])

    # group law on normal forms -------------------------------------------------

    def identity(self):
        return () if self.kind == "free" else (0, ())

    def letter(self, name: str, exp: int = 1):
        if name not in self.letters:
            raise ValueError(f"unknown generator {name!r} for {self}")
        if self.kind == "free":
            i = self.letters.index(name) + 1
            return tuple([i if exp > 0 else -i] * abs(exp))
        factor = 0 if name == "a" else 1
        return self._syllables(0, [(factor, exp)])

    def _syllables(self, e, sylls):
        # merge adjacent same-factor syllables, pushing central z-powers into e
        out = []
        for f, i in sylls:
            step = (self.a if f == 0 else self.b) // self.c
            if out and out[-1][0] == f:
                i += out.pop()[1]
            q, r = divmod(i, step)
            e += q
            if r:
                out.append((f, r))
            # a vanished syllable may let its neighbours merge
            while len(out) >= 2 and out[-1][0] == out[-2][0]:
                f2, i2 = out.pop()
                f1, i1 = out.pop()
                step2 = (self.a if f1 == 0 else self.b) // self.c
                q2, r2 = divmod(i1 + i2, step2)
                e += q2
                if r2:
                    out.append((f1, r2))
        return (e % self.c, tuple(out))

    def mul(self, g, h):
        if self.kind == "free":
            out = list(g)
            for s in h:
                if out and out[-1] == -s:
                    out.pop()
                else:
                    out.append(s)
            return tuple(out)
        return self._syllables(g[0] + h[0], list(g[1]) + list(h[1]))

    def inv(self, g):
        if self.kind == "free":
            return tuple(-s for s in reversed(g))
        return self._syllables(-g[0], [(f, -i) for f, i in reversed(g[1])])

    def element(self, word):
        """Normal form of a word (string or parsed list)."""
        toks = parse_word(word) if isinstance(word, str) else list(word)
        g = self.identity()
        for name, exp in toks:
            g = self.mul(g, self.letter(name, exp))
        return g

    def format(self, g) -> str:
        if self.kind == "free":
            return " ".join(self.letters[abs(s) - 1] + ("" if s > 0 else "^-1") for s in g) or "1"
        parts = [f"{'a' if f == 0 else 'b'}^{i}" for f, i in g[1]]
        if g[0]:
            parts.insert(0, f"z^{g[0]}")
        return " ".join(parts) or "1"

    # tree --------------------------------------------------------------------

    def vertex(self, g, kind: int = 0):
        """Vertex g.x_kind: the coset gA (kind 0) or gB (kind 1); free group: g itself."""
        if self.kind == "free":
            return ("v", g)
        sylls = g[1]
        if sylls and sylls[-1][0] == kind:
            sylls = sylls[:-1]
        return (kind, (0, sylls))

    def act(self, g, v):
        """g applied to a vertex."""
        if self.kind == "free":
            return ("v", self.mul(g, v[1]))
        return self.vertex(self.mul(g, v[1]), v[0])

    def base_vertex(self):
        return self.vertex(self.identity(), 0)

    def _prefix_graph(self, g):
        # vertices and edges met along the syllable prefixes of g
        adj = {}

        def link(u, v):
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)

        if self.kind == "free":
            h = ()
            adj[self.vertex(h)] = set()
            for s in g:
                nxt = self.mul(h, (s,))
                link(self.vertex(h), self.vertex(nxt))
                h = nxt
            return adj
        h = (g[0], ())
        link(self.vertex(h, 0), self.vertex(h, 1))
        for syl in g[1]:
            h = self.mul(h, (0, (syl,)))
            link(self.vertex(h, 0), self.vertex(h, 1))
        return adj

    def geodesic(self, g) -> list:
        """Vertices on the tree geodesic from x0 to g.x0, found by BFS."""
        adj = self._prefix_graph(g)
        src, dst = self.base_vertex(), self.act(g, self.base_vertex())
        prev = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if u == dst:
                break
            for v in sorted(adj.get(u, ()), key=repr):
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if dst not in prev:
            raise RuntimeError("target vertex not reached: inconsistent normal form")
        path = [dst]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        return path[::-1]


def _as_element(spec: AmalgamSpec, gamma):
    if isinstance(gamma, (str, list)):
        return spec.element(gamma)
    return gamma


@lru_cache(maxsize=100_000)
def _geodesic(spec: AmalgamSpec, g) -> tuple:
    return tuple(spec.geodesic(g))


def tree_distance(spec: AmalgamSpec, gamma) -> int:
    """d_T(gamma.x0, x0) for a word or normal form gamma."""
    return len(_geodesic(spec, _as_element(spec, gamma))) - 1


@dataclass(frozen=True)
class WallCocycleValue:
    gamma: str
    norm_sq: int
    support: dict            # oriented edge (tail, head) -> +1 / -1

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "norm_sq": self.norm_sq}


def wall_cocycle(spec: AmalgamSpec, gamma) -> dict:
    """1_{E(gamma x0)} - 1_{E(x0)} on oriented edges; E(x) = edges pointing towards x."""
    path = _geodesic(spec, _as_element(spec, gamma))
    f = {}
    for u, v in zip(path, path[1:]):
        f[(u, v)] = 1
        f[(v, u)] = -1
    return f


def wall_cocycle_norm(spec: AmalgamSpec, gamma) -> WallCocycleValue:
    g = _as_element(spec, gamma)
    f = wall_cocycle(spec, g)
    return WallCocycleValue(spec.format(g), int(sum(v * v for v in f.values())), f)


def translate(spec: AmalgamSpec, g, f: dict) -> dict:
    """(g.f)(e) = f(g^-1 e): move the support of f by g."""
    return {(spec.act(g, u), spec.act(g, v)): val for (u, v), val in f.items()}


def _add(f, h):
    out = dict(f)
    for k, v in h.items():
        out[k] = out.get(k, 0) + v
        if out[k] == 0:
            del out[k]
    return out


def cocycle_defect(spec: AmalgamSpec, gamma, eta) -> dict:
    """b(gamma eta) - b(gamma) - gamma.b(eta); empty exactly when the law holds."""
    return dict(_defect(spec, _as_element(spec, gamma), _as_element(spec, eta)))


@lru_cache(maxsize=200_000)
def _defect(spec, g, h):
    lhs = wall_cocycle(spec, spec.mul(g, h))
    rhs = _add(wall_cocycle(spec, g), translate(spec, g, wall_cocycle(spec, h)))
    return tuple(sorted(_add(lhs, {k: -v for k, v in rhs.items()}).items(), key=repr))


def words(spec: AmalgamSpec, max_len: int):
    """All words of length <= max_len in the generators and their inverses, as strings."""
    alphabet = list(spec.letters) + [x.upper() for x in spec.letters]
    for L in range(max_len + 1):
        for tup in itertools.product(alphabet, repeat=L):
            yield "".join(tup)


def word_elements(spec: AmalgamSpec, max_len: int) -> dict:
    """Map every word of length <= max_len (as in ``words``) to its normal form,
    building each word from its prefix."""
    alphabet = list(spec.letters) + [x.upper() for x in spec.letters]
    gens = {x: spec.element(x) for x in alphabet}
    out = {"": spec.identity()}
    layer = [""]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            g = out[w]
            for x in alphabet:
                out[w + x] = spec.mul(g, gens[x])
                nxt.append(w + x)
        layer = nxt
    return out


@dataclass
class WallsReport:
    spec: str
    words_checked: int
    norm_failures: list
    pairs_checked: int
    cocycle_failures: list

    @property
    def ok(self) -> bool:
        return not self.norm_failures and not self.cocycle_failures

    def to_json(self) -> dict:
        return {"spec": self.spec, "ok": self.ok, "words_checked": self.words_checked,
                "norm_failures": self.norm_failures[:20], "pairs_checked": self.pairs_checked,
                "cocycle_failures": self.cocycle_failures[:20]}


def walls_suite(spec: AmalgamSpec, max_len: int = 6, pair_len: int = 4) -> WallsReport:
    """norm_sq = 2 d_T on all words of length <= max_len and the cocycle law
    on all pairs of words of length <= pair_len."""
    elems = word_elements(spec, max(max_len, pair_len))
    bad_norm = []
    n_words = 0
    for w, g in elems.items():
        if len(w) > max_len:
            continue
        n_words += 1
        if wall_cocycle_norm(spec, g).norm_sq != 2 * tree_distance(spec, g):
            bad_norm.append(w)
    short = [(w, g) for w, g in elems.items() if len(w) <= pair_len]
    bad_law = []
    for (u, g), (v, h) in itertools.product(short, repeat=2):
        if _defect(spec, g, h):
            bad_law.append((u, v))
    return WallsReport(str(spec), n_words, bad_norm, len(short) ** 2, bad_law)


@dataclass
class FixedPointProbe:
    verdict: str             # bounded_orbit | unbounded | inconclusive
    vertex: str | None = None
    edge: tuple | None = None
    witness: str | None = None
    distances: list | None = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "vertex": self.vertex,
                "edge": None if self.edge is None else list(self.edge),
                "witness": self.witness, "distances": self.distances}


def _vertex_label(spec, v):
    if spec.kind == "free":
        return spec.format(v[1])
    return f"{spec.format(v[1])}.{'A' if v[0] == 0 else 'B'}"


def fixed_point_probe(spec: AmalgamSpec, cap: int = 12, generators=None) -> FixedPointProbe:
    """Look for a hyperbolic element among words of length <= cap in the
    generators (unbounded orbits), else for a vertex or edge fixed by all
    generators near the base vertex (bounded orbit)."""
    if cap < 4:
        raise ValueError("cap must be at least 4")
    gens = [spec.element(w) for w in (generators or spec.letters)]
    names = list(generators or spec.letters)
    x0 = spec.base_vertex()
    # hyperbolic witness: d(g^k x0, x0) grows by a constant positive step for k <= 4
    seen = set()
    for L in range(1, cap + 1):
        found = None
        for idx in itertools.product(range(len(gens)), repeat=L):
            g = spec.identity()
            for i in idx:
                g = spec.mul(g, gens[i])
            if g in seen:
                continue
            seen.add(g)
            ds, h = [], spec.identity()
            for _ in range(4):
                h = spec.mul(h, g)
                ds.append(tree_distance(spec, h))
            steps = {b - a for a, b in zip(ds, ds[1:])}
            if len(steps) == 1 and steps.pop() > 0:
                found = (" ".join(names[i] for i in idx), ds)
                break
        if found:
            return FixedPointProbe("unbounded", witness=found[0], distances=found[1])
        if len(seen) > 20000:
            break
    # common fixed vertex or edge among vertices near x0
    cands = []
    for w in words(spec, 2):
        g = spec.element(w)
        for kind in ((0,) if spec.kind == "free" else (0, 1)):
            v = spec.vertex(g, kind)
            if v not in cands:
                cands.append(v)
    for v in cands:
        if all(spec.act(g, v) == v for g in gens):
            return FixedPointProbe("bounded_orbit", vertex=_vertex_label(spec, v))
    if spec.kind == "amalgam":
        for w in words(spec, 2):
            g = spec.element(w)
            e = (spec.vertex(g, 0), spec.vertex(g, 1))
            if all({spec.act(h, e[0]), spec.act(h, e[1])} == set(e) for h in gens):
                return FixedPointProbe("bounded_orbit",
                                       edge=tuple(_vertex_label(spec, v) for v in e))
    return FixedPointProbe("inconclusive")


BUNDLED_TREES = {"modular": "4,2,6", "free2": "free:2"}
