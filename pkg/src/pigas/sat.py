"""SAT to damping graph reduction and the coloring-driven SAT solver.

A CNF formula becomes a damping graph with one undamped base node, an
undamped plus/minus pair bridged by a damped node per variable, and a damped
node per clause tied to the base and to its literal nodes.  Richly balanced
colorings of that graph correspond exactly to satisfying assignments, which
is what makes the coloring decision NP-hard and gives a two-way validation
target for the decider.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cnc import cnc_decide
from .coloring import BLACK, BLUE, RED, Color, Coloring, is_richly_balanced, swap_red_blue
from .graphs import DampingGraph, build_graph
from .verdict import Verdict


class DimacsError(ValueError):
    pass


class MalformedHeaderError(DimacsError):
    pass


class LiteralOutOfRangeError(DimacsError):
    pass


class EmptyClauseError(DimacsError):
    pass


class NotRichlyBalancedError(ValueError):
    pass


class UnexpectedBlackVariableNodeError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """Conjunction of disjunctive clauses; literals are signed 1-based ids."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def evaluate(self, assignment: tuple[bool, ...]) -> bool:
        return all(
            any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause)
            for clause in self.clauses
        )


@dataclass(frozen=True)
class ReductionMap:
    """Node roles of the reduction graph."""

    graph: DampingGraph
    base: int
    var_neg: tuple[int, ...]
    var_zero: tuple[int, ...]
    var_pos: tuple[int, ...]
    clause_nodes: tuple[int, ...]


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; comments and blank lines are skipped, clauses may
    span lines, duplicate literals inside a clause are dropped."""
    num_vars: int | None = None
    declared_clauses: int | None = None
    tokens: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise MalformedHeaderError("duplicate problem line")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeaderError(f"bad problem line: {line!r}")
            try:
                num_vars = int(parts[2])
                declared_clauses = int(parts[3])
            except ValueError as exc:
                raise MalformedHeaderError(f"bad problem line: {line!r}") from exc
            if num_vars < 0 or declared_clauses < 0:
                raise MalformedHeaderError(f"negative counts in problem line: {line!r}")
            continue
        tokens.extend(line.split())
    if num_vars is None:
        raise MalformedHeaderError("missing 'p cnf' problem line")
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for tok in tokens:
        try:
            lit = int(tok)
        except ValueError as exc:
            raise MalformedHeaderError(f"non-integer token {tok!r}") from exc
        if lit == 0:
            if not current:
                raise EmptyClauseError(f"clause {len(clauses) + 1} is empty")
            clauses.append(tuple(dict.fromkeys(current)))
            current = []
            continue
        if abs(lit) > num_vars:
            raise LiteralOutOfRangeError(
                f"literal {lit} exceeds declared variable count {num_vars}"
            )
        current.append(lit)
    if current:
        raise MalformedHeaderError("last clause is not 0-terminated")
    return CnfFormula(num_vars=num_vars, clauses=tuple(clauses))


def cnf_to_damping_graph(f: CnfFormula) -> tuple[DampingGraph, ReductionMap]:
    """Build the reduction graph: base node, variable triples chained
    together, and clause nodes wired to the base and their literal nodes."""
    if not f.clauses:
        raise ValueError("reduction needs at least one clause")
    n = f.num_vars
    base = 0
    var_neg = tuple(1 + 3 * i for i in range(n))
    var_zero = tuple(2 + 3 * i for i in range(n))
    var_pos = tuple(3 + 3 * i for i in range(n))
    clause_nodes = tuple(1 + 3 * n + j for j in range(len(f.clauses)))
    edges: list[tuple[int, int]] = []
    if n:
        edges.append((base, var_neg[0]))
    for i in range(n):
        edges.append((var_neg[i], var_zero[i]))
        edges.append((var_zero[i], var_pos[i]))
        if i + 1 < n:
            edges.append((var_pos[i], var_neg[i + 1]))
    for j, clause in enumerate(f.clauses):
        edges.append((base, clause_nodes[j]))
        for lit in clause:
            target = var_pos[abs(lit) - 1] if lit > 0 else var_neg[abs(lit) - 1]
            edges.append((clause_nodes[j], target))
    damped = set(var_zero) | set(clause_nodes)
    g = build_graph(1 + 3 * n + len(f.clauses), damped, edges)
    return g, ReductionMap(
        graph=g,
        base=base,
        var_neg=var_neg,
        var_zero=var_zero,
        var_pos=var_pos,
        clause_nodes=clause_nodes,
    )


def coloring_to_assignment(rmap: ReductionMap, c: Coloring) -> tuple[bool, ...]:
    """Boolean assignment read off a richly balanced coloring of the
    reduction graph.

    Red/blue symmetry is normalized so the base node is red; a variable is
    true exactly when its plus node is blue.  A black base or variable node
    means the degenerate all-undamped-black coloring, which contradicts rich
    balance and is rejected.
    """
    if not is_richly_balanced(rmap.graph, c):
        raise NotRichlyBalancedError("coloring is not richly balanced on the reduction graph")
    if c[rmap.base] is BLACK:
        raise UnexpectedBlackVariableNodeError("base node is black")
    if c[rmap.base] is BLUE:
        c = swap_red_blue(c)
    assignment = []
    for i in range(len(rmap.var_pos)):
        pos, neg = c[rmap.var_pos[i]], c[rmap.var_neg[i]]
        if BLACK in (pos, neg):
            raise UnexpectedBlackVariableNodeError(
                f"variable {i + 1} has a black plus/minus node"
            )
        assignment.append(pos is BLUE)
    return tuple(assignment)


def formula_from_reduction(rmap: ReductionMap) -> CnfFormula:
    """Reconstruct the formula encoded by a reduction graph (for round trips)."""
    g = rmap.graph
    pos_index = {node: i + 1 for i, node in enumerate(rmap.var_pos)}
    neg_index = {node: i + 1 for i, node in enumerate(rmap.var_neg)}
    clauses = []
    for cn in rmap.clause_nodes:
        clause = []
        for nb in g.neighbors[cn]:
            if nb == rmap.base:
                continue
            if nb in pos_index:
                clause.append(pos_index[nb])
            elif nb in neg_index:
                clause.append(-neg_index[nb])
        clauses.append(tuple(sorted(clause, key=abs)))
    return CnfFormula(num_vars=len(rmap.var_pos), clauses=tuple(clauses))


MAX_LITERALS = 64


def sat_solve_via_rbc(
    f: CnfFormula, jobs: int = 1, max_literals: int = MAX_LITERALS
) -> tuple[bool, ...] | None:
    """Solve a small CNF instance through the coloring decider.

    Returns a satisfying assignment (verified against the formula) or None
    when the reduction graph is PI-GAS, i.e. the formula is unsatisfiable.
    Formulas without clauses are trivially satisfiable and short-circuit.
    """
    if not f.clauses:
        return tuple(False for _ in range(f.num_vars))
    total_literals = sum(len(c) for c in f.clauses)
    if total_literals > max_literals:
        raise ValueError(
            f"{total_literals} literals exceeds the size guard ({max_literals}); "
            "the reduction search space grows with the literal count"
        )
    g, rmap = cnf_to_damping_graph(f)
    verdict: Verdict = cnc_decide(g, jobs=jobs)
    if verdict.is_pigas:
        return None
    assert verdict.coloring is not None
    assignment = coloring_to_assignment(rmap, verdict.coloring)
    assert f.evaluate(assignment), "reduction returned a non-satisfying assignment"
    return assignment
