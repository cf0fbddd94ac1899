"""Product tables of the dual algebra and module structures for resolutions.

The dual algebra of a presentation has the monomial-dual basis.  In it,
tau raises (cohomological) weight by one, and every structure constant is
tau^k with k forced by weights, so tables only store F2 bit patterns.
"""
from __future__ import annotations

from ..hopf import HopfPresentation, Comodule, coproduct, monomial_basis, Monomial, tau_gen, xi_gen


class DualAlgebra:
    def __init__(self, p: HopfPresentation, t_max: int):
        self.p = p
        self.t_max = t_max
        self.basis = [monomial_basis(p, t) for t in range(t_max + 1)]
        self.index = [{m: i for i, m in enumerate(b)} for b in self.basis]
        self.weights = [[m.w for m in b] for b in self.basis]
        self.dims = [len(b) for b in self.basis]
        # prod[ta][tb][i][j]: bitset over basis[ta+tb]
        self.prod = [[None] * (t_max + 1 - ta) for ta in range(t_max + 1)]
        for ta in range(t_max + 1):
            for tb in range(t_max + 1 - ta):
                self.prod[ta][tb] = [[0] * self.dims[tb] for _ in range(self.dims[ta])]
        for t in range(t_max + 1):
            for im, m in enumerate(self.basis[t]):
                bit = 1 << im
                for (a, b), _k in coproduct(p, m):
                    row = self.prod[a.t][b.t][self.index[a.t][a]]
                    row[self.index[b.t][b]] ^= bit

    def mul(self, ta, ia, tb, ib) -> int:
        return self.prod[ta][tb][ia][ib]

    def element_index(self, m: Monomial):
        return m.t, self.index[m.t][m]

    def hi_index(self, i: int):
        """(degree, index) of the dual of tau_0 (i=0) or xi_1^{2^(i-1)}."""
        m = tau_gen(0) if i == 0 else xi_gen(1, 2 ** (i - 1))
        if m.t > self.t_max or m not in self.index[m.t]:
            return None
        return m.t, self.index[m.t][m]


class ModuleData:
    """Left module over the dual algebra obtained by dualizing a comodule.

    Basis at degree t: comodule generators of internal degree t.  A term
    (k, a, y) in the coaction of x gives a*.y* = tau^k x*.
    """

    def __init__(self, M: Comodule, alg: DualAlgebra):
        self.comodule = M
        self.names = [g for g, _ in M.generators]
        self.by_t = {}
        self.weight = {}
        for g, d in M.generators:
            self.by_t.setdefault(d.t, []).append(g)
            self.weight[g] = d.w
        self.pos = {g: (d.t, self.by_t[d.t].index(g)) for g, d in M.generators}
        # act[(ta, ia, y)] -> bitset over by_t[t_y + ta]
        self.act = {}
        for x, d in M.generators:
            for k, a, y in M.coaction.get(x, []):
                if a.t > alg.t_max:
                    continue
                key = (a.t, alg.index[a.t][a], y)
                self.act[key] = self.act.get(key, 0) ^ (1 << self.pos[x][1])

    def basis(self, t):
        return self.by_t.get(t, [])

    def weights(self, t):
        return [self.weight[g] for g in self.basis(t)]

    @property
    def top_degree(self):
        return max(self.by_t, default=-1)
