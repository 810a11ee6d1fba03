"""Exact-rational phase-1 simplex: find a basic feasible point of a linear system."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from utils.logger import setup_logger

logger = setup_logger(__name__)

LE, GE, EQ = "<=", ">=", "="


@dataclass
class LinearConstraint:
    """sum(coeffs[v] * x_v) `relation` rhs over free variables."""
    coeffs: Dict[str, Fraction]
    relation: str
    rhs: Fraction = Fraction(0)
    label: str = field(default="", compare=False)


class PhaseOneSimplex:
    """
    Dense tableau over Fractions with Bland's rule, so it never cycles.

    Free variables are split as x = p - q with p, q >= 0.
    """

    def __init__(self, variables: Sequence[str], constraints: Sequence[LinearConstraint]):
        self.variables = list(variables)
        self.constraints = list(constraints)
        self.iterations = 0

    @staticmethod
    def _pivot(T: List[List[Fraction]], z: List[Fraction], row: int, col: int) -> None:
        piv = T[row][col]
        T[row] = [a / piv for a in T[row]]
        pivot_row = T[row]
        for r in range(len(T)):
            if r != row and T[r][col] != 0:
                factor = T[r][col]
                T[r] = [a - factor * b for a, b in zip(T[r], pivot_row)]
        if z[col] != 0:
            factor = z[col]
            z[:] = [a - factor * b for a, b in zip(z, pivot_row)]

    @staticmethod
    def _enter(z: List[Fraction]) -> int:
        # Bland: leftmost negative reduced cost
        for j, value in enumerate(z[:-1]):
            if value < 0:
                return j
        return -1

    @staticmethod
    def _leave(T: List[List[Fraction]], basis: List[int], col: int) -> int:
        best = None
        for i, row in enumerate(T):
            a = row[col]
            if a > 0:
                key = (row[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        return -1 if best is None else best[1]

    def _tableau(self):
        n = len(self.variables)
        index = {v: i for i, v in enumerate(self.variables)}
        rows = []
        for c in self.constraints:
            coeffs = [Fraction(0)] * (2 * n)
            for v, a in c.coeffs.items():
                coeffs[index[v]] += a
                coeffs[n + index[v]] -= a
            relation, rhs = c.relation, Fraction(c.rhs)
            if rhs < 0:
                coeffs = [-a for a in coeffs]
                rhs = -rhs
                relation = {LE: GE, GE: LE, EQ: EQ}[relation]
            rows.append((coeffs, relation, rhs))

        num_s = sum(1 for _, rel, _ in rows if rel == LE)
        num_t = sum(1 for _, rel, _ in rows if rel == GE)
        num_a = sum(1 for _, rel, _ in rows if rel in (EQ, GE))
        sbase, tbase = 2 * n, 2 * n + num_s
        abase = tbase + num_t
        total = abase + num_a

        T: List[List[Fraction]] = []
        basis: List[int] = []
        si = ti = ai = 0
        for coeffs, rel, rhs in rows:
            row = coeffs + [Fraction(0)] * (total - 2 * n) + [rhs]
            if rel == LE:
                row[sbase + si] = Fraction(1)
                basis.append(sbase + si)
                si += 1
            else:
                if rel == GE:
                    row[tbase + ti] = Fraction(-1)
                    ti += 1
                row[abase + ai] = Fraction(1)
                basis.append(abase + ai)
                ai += 1
            T.append(row)

        # minimise the sum of artificials, priced out against the initial basis
        z = [Fraction(0)] * (total + 1)
        for j in range(abase, total):
            z[j] = Fraction(1)
        for r, bc in enumerate(basis):
            if bc >= abase:
                z = [a - b for a, b in zip(z, T[r])]
        return T, z, basis, abase

    def solve(self) -> Optional[Dict[str, Fraction]]:
        """
        Returns:
            A basic feasible point as variable -> value, or None if infeasible.
        """
        n = len(self.variables)
        T, z, basis, abase = self._tableau()
        while True:
            col = self._enter(z)
            if col == -1:
                break
            row = self._leave(T, basis, col)
            if row == -1:
                # phase-1 objective is bounded below by zero
                raise ArithmeticError("phase-1 simplex reported an unbounded direction")
            self._pivot(T, z, row, col)
            basis[row] = col
            self.iterations += 1

        residual = sum((T[r][-1] for r, bc in enumerate(basis) if bc >= abase), Fraction(0))
        if residual > 0:
            logger.debug(f"Phase 1 infeasible after {self.iterations} pivots, residual {residual}")
            return None

        values = [Fraction(0)] * (2 * n)
        for r, bc in enumerate(basis):
            if bc < 2 * n:
                values[bc] = T[r][-1]
        logger.debug(f"Phase 1 feasible after {self.iterations} pivots")
        return {v: values[i] - values[n + i] for i, v in enumerate(self.variables)}


def find_basic_feasible_point(variables: Sequence[str],
                              constraints: Sequence[LinearConstraint]) -> Optional[Dict[str, Fraction]]:
    return PhaseOneSimplex(variables, constraints).solve()
