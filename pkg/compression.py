"""
Ontological compression: fewer ontic states, same table.

Method 1 permutes one measurement's outcomes among the equal-weight states of a preparation
block and merges states that end up identical. Method 2 moves mass between four cells of a
product-model grid without touching any marginal, then deletes emptied states.
"""

import math
import random
from collections import Counter
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from errors import ResourceError, StructuralError
from factorization import indicator_columns, require_verified, outcome_tuple
from logging_config import get_logger
from models import BlockUniformOF, CompressionParams, DataTable, GridDistribution, OntFactorization
from table_core import rank

logger = get_logger("ontfactor.compression")

ZERO = Fraction(0)

Configuration = List[List[List[int]]]
RestartRunner = Callable[[DataTable, BlockUniformOF, CompressionParams], List[OntFactorization]]


# --------------------------------------------------------------------------- dedupe


def _merge_identical(factorization: OntFactorization) -> OntFactorization:
    order: List[Tuple] = []
    rows: Dict[Tuple, List[Fraction]] = {}
    for j in range(factorization.omega):
        key = factorization.m_column(j)
        if key not in rows:
            order.append(key)
            rows[key] = list(factorization.P[j])
        else:
            rows[key] = [a + b for a, b in zip(rows[key], factorization.P[j])]
    if len(order) == factorization.omega:
        return factorization
    M = tuple(tuple(key[r] for key in order) for r in range(len(factorization.M)))
    return OntFactorization.build(M, [rows[key] for key in order])


def dedupe(table: DataTable, factorization: OntFactorization) -> OntFactorization:
    """Merge identical M columns, summing their P rows (first appearance order)."""
    merged = _merge_identical(factorization)
    if merged.omega != factorization.omega:
        logger.debug("dedupe: omega %d -> %d", factorization.omega, merged.omega)
    return merged


# --------------------------------------------------------------------------- block-uniform factorizations


def block_uniform(table: DataTable, factorization: OntFactorization) -> BlockUniformOF:
    """Partition a deterministic factorization into per-preparation blocks of equal weight."""
    if not factorization.deterministic:
        raise StructuralError("block-uniform compression needs a deterministic factorization")
    require_verified(table, factorization)
    blocks: List[List[int]] = [[] for _ in range(table.s)]
    for j, row in enumerate(factorization.P):
        owners = [k for k, v in enumerate(row) if v]
        if len(owners) != 1:
            raise StructuralError(f"ontic state {j} carries weight in {len(owners)} preparations, expected 1")
        blocks[owners[0]].append(j)
    for k, block in enumerate(blocks):
        weights = {factorization.P[j][k] for j in block}
        if len(weights) != 1:
            raise StructuralError(f"preparation {k} has non-uniform weights {sorted(weights)}")
    return BlockUniformOF(base=factorization, blocks=tuple(tuple(b) for b in blocks))


def _configuration(table: DataTable, uniform: BlockUniformOF) -> Configuration:
    d, m = table.d, table.m
    return [[list(outcome_tuple(uniform.base, j, d, m)) for j in block] for block in uniform.blocks]


def _check_uniform(table: DataTable, uniform: BlockUniformOF) -> None:
    base = uniform.base
    if not base.deterministic:
        raise StructuralError("block-uniform factorization must be deterministic")
    if len(uniform.blocks) != table.s:
        raise StructuralError(f"{len(uniform.blocks)} blocks for {table.s} preparations")
    seen = sorted(j for block in uniform.blocks for j in block)
    if seen != list(range(base.omega)):
        raise StructuralError("blocks do not partition the ontic states")
    for k, block in enumerate(uniform.blocks):
        for j in block:
            row = base.P[j]
            if row[k] != Fraction(1, len(block)) or any(v for c, v in enumerate(row) if c != k):
                raise StructuralError(f"ontic state {j} does not carry weight 1/{len(block)} in preparation {k} only")


def _configuration_factorization(layout: Sequence[Sequence[Sequence[int]]], d: int, m: int) -> OntFactorization:
    s = len(layout)
    order: List[Tuple[int, ...]] = []
    weights: Dict[Tuple[int, ...], List[Fraction]] = {}
    for k, block in enumerate(layout):
        share = Fraction(1, len(block))
        for state in block:
            key = tuple(state)
            if key not in weights:
                order.append(key)
                weights[key] = [ZERO] * s
            weights[key][k] += share
    return OntFactorization.build(indicator_columns(order, d, m), [weights[key] for key in order])


# --------------------------------------------------------------------------- Method 1, exhaustive


def _block_candidates(block: Sequence[Sequence[int]], m: int) -> List[Counter]:
    """Distinct tuple sets reachable by permuting measurements 1..m-1 within one block.

    Measurement 0 stays fixed: relabelling states does not change the block's multiset.
    Only the first multiset for each distinct set is kept.
    """
    columns = [[state[x] for state in block] for x in range(m)]
    orderings = [sorted(set(permutations(columns[x]))) for x in range(1, m)]
    seen = {}
    for choice in product(*orderings):
        states = [
            tuple([columns[0][r]] + [choice[x - 1][r] for x in range(1, m)])
            for r in range(len(block))
        ]
        counts = Counter(states)
        key = frozenset(counts)
        if key not in seen:
            seen[key] = counts
    return list(seen.values())


def exhaustive_method1(table: DataTable, uniform: BlockUniformOF, params: Optional[CompressionParams] = None) -> OntFactorization:
    """Global minimum of distinct columns over every per-(block, measurement) permutation."""
    params = params or CompressionParams()
    _check_uniform(table, uniform)
    require_verified(table, uniform.base)
    d, m = table.d, table.m

    total = 1
    for block in uniform.blocks:
        total *= math.factorial(len(block)) ** m
        if total > params.exhaustive_cap:
            raise ResourceError(
                f"exhaustive search needs more than {params.exhaustive_cap} configurations "
                "(exhaustive_cap); use compress_method1"
            )

    floor = rank(table)
    candidates = [_block_candidates(block, m) for block in _configuration(table, uniform)]
    best, best_choice = None, None
    for choice in product(*candidates):
        distinct = len(set().union(*choice))
        if best is None or distinct < best:
            best, best_choice = distinct, choice
            if best <= floor:
                break

    layout = [list(counts.elements()) for counts in best_choice]
    result = _configuration_factorization(layout, d, m)
    logger.info("exhaustive method 1: omega %d -> %d over %d configurations", uniform.base.omega, result.omega, total)
    return result


# --------------------------------------------------------------------------- Method 1, hill climbing


class _Climber:
    """Mutable configuration with an incremental count of distinct tuples."""

    def __init__(self, layout: Configuration, rng: random.Random):
        self.layout = layout
        self.rng = rng
        self.counts = Counter(tuple(state) for block in layout for state in block)
        self.distinct = len(self.counts)
        self.owners = [(k, r) for k, block in enumerate(layout) for r in range(len(block))]

    def _remove(self, key: Tuple[int, ...]) -> None:
        self.counts[key] -= 1
        if self.counts[key] == 0:
            del self.counts[key]
            self.distinct -= 1

    def _add(self, key: Tuple[int, ...]) -> None:
        if key not in self.counts:
            self.distinct += 1
        self.counts[key] += 1

    def swap(self, k: int, a: int, b: int, x: int) -> None:
        block = self.layout[k]
        self._remove(tuple(block[a]))
        self._remove(tuple(block[b]))
        block[a][x], block[b][x] = block[b][x], block[a][x]
        self._add(tuple(block[a]))
        self._add(tuple(block[b]))

    def try_merge(self) -> Optional[List[Tuple[int, int, int, int]]]:
        """Rewrite one random state into another state's tuple by swaps inside its block.

        Returns the swaps applied, or None (nothing applied) when the target is out of reach.
        """
        k, a = self.rng.choice(self.owners)
        ck, c = self.rng.choice(self.owners)
        block = self.layout[k]
        target = self.layout[ck][c]
        if target == block[a] or len(block) < 2:
            return None
        target = list(target)
        swaps = []
        for x in range(len(target)):
            if block[a][x] == target[x]:
                continue
            mates = [b for b in range(len(block)) if b != a and block[b][x] == target[x]]
            if not mates:
                self.undo(swaps)
                return None
            singles = [b for b in mates if self.counts[tuple(block[b])] == 1]
            b = self.rng.choice(singles or mates)
            self.swap(k, a, b, x)
            swaps.append((k, a, b, x))
        return swaps

    def undo(self, swaps: Sequence[Tuple[int, int, int, int]]) -> None:
        for k, a, b, x in reversed(swaps):
            self.swap(k, a, b, x)

    def shuffle(self) -> None:
        for k, block in enumerate(self.layout):
            for x in range(len(block[0])):
                values = [state[x] for state in block]
                self.rng.shuffle(values)
                for state, v in zip(block, values):
                    state[x] = v
        self.counts = Counter(tuple(state) for block in self.layout for state in block)
        self.distinct = len(self.counts)

    def snapshot(self) -> Configuration:
        return [[list(state) for state in block] for block in self.layout]


def method1_restart(
    table: DataTable,
    uniform: BlockUniformOF,
    params: CompressionParams,
    restart: int,
    floor: Optional[int] = None,
) -> OntFactorization:
    """One seeded hill-climbing run. Restart 0 starts from the given configuration, later
    restarts from an independent shuffle of every (block, measurement)."""
    _check_uniform(table, uniform)
    d, m = table.d, table.m
    floor = rank(table) if floor is None else floor
    climber = _Climber(_configuration(table, uniform), random.Random(params.seed ^ restart))
    if restart:
        climber.shuffle()

    best, best_config = climber.distinct, climber.snapshot()
    plateau_budget = max(1, params.iterations // 10)
    sideways = 0
    for _ in range(params.iterations):
        if best <= floor:
            break
        before = climber.distinct
        swaps = climber.try_merge()
        if not swaps:
            continue
        delta = climber.distinct - before
        if delta < 0:
            sideways = 0
            if climber.distinct < best:
                best, best_config = climber.distinct, climber.snapshot()
        elif delta == 0:
            if sideways >= plateau_budget:
                climber.undo(swaps)
                break
            sideways += 1
        else:
            climber.undo(swaps)

    logger.debug("method 1 restart %d: %d distinct states", restart, best)
    return _configuration_factorization(best_config, d, m)


def local_restart_runner(table: DataTable, uniform: BlockUniformOF, params: CompressionParams) -> List[OntFactorization]:
    floor = rank(table)
    return [method1_restart(table, uniform, params, r, floor=floor) for r in range(params.restarts)]


def compress_method1(
    table: DataTable,
    uniform: BlockUniformOF,
    params: Optional[CompressionParams] = None,
    runner: Optional[RestartRunner] = None,
) -> OntFactorization:
    """Best of params.restarts hill climbs; ties go to the lowest restart index."""
    params = params or CompressionParams()
    _check_uniform(table, uniform)
    require_verified(table, uniform.base)
    results = (runner or local_restart_runner)(table, uniform, params)
    winner = min(range(len(results)), key=lambda r: (results[r].omega, r))
    result = results[winner]
    logger.info(
        "method 1: omega %d -> %d (restart %d of %d, seed %d)",
        uniform.base.omega, result.omega, winner, len(results), params.seed,
    )
    return result


# --------------------------------------------------------------------------- Method 2


def grid_distribution(factorization: OntFactorization, k: int, d: int, m: int) -> GridDistribution:
    if factorization.tuple_index is None:
        raise StructuralError("grid compression needs a tuple-indexed (model 2) factorization")
    return GridDistribution(
        d=d,
        m=m,
        preparation=k,
        mass={cell: factorization.P[j][k] for j, cell in enumerate(factorization.tuple_index)},
    )


def grid_marginal(grid: GridDistribution, axis: int) -> List[Fraction]:
    return grid.marginal(axis)


def _with(cell: Tuple[int, ...], axis: int, value: int) -> Tuple[int, ...]:
    return cell[:axis] + (value,) + cell[axis + 1:]


def grid_move(grid: GridDistribution, cell: Tuple[int, ...], x: int, y: int, i2: int, j2: int) -> Fraction:
    """Move all of cell's mass v: cell and its opposite corner lose v, the two adjacent
    corners gain v. Every axis marginal is unchanged."""
    if x == y or i2 == cell[x] or j2 == cell[y]:
        raise StructuralError("a grid move needs two distinct axes and two alternate indices")
    adjacent_x = _with(cell, x, i2)
    adjacent_y = _with(cell, y, j2)
    opposite = _with(adjacent_x, y, j2)
    mass = grid.mass
    for corner in (cell, adjacent_x, adjacent_y, opposite):
        if corner not in mass:
            raise StructuralError(f"grid move touches removed cell {corner}")
    v = mass[cell]
    if mass[opposite] < v:
        raise StructuralError(f"opposite cell {opposite} holds {mass[opposite]} < {v}")

    before = [grid.marginal(axis) for axis in range(grid.m)]
    mass[cell] -= v
    mass[adjacent_x] += v
    mass[adjacent_y] += v
    mass[opposite] -= v
    if [grid.marginal(axis) for axis in range(grid.m)] != before:
        raise StructuralError(f"grid move at {cell} changed a marginal")
    return v


def _find_move(grid: GridDistribution, cell: Tuple[int, ...]) -> Optional[Tuple[int, int, int, int]]:
    v = grid.mass[cell]
    for x in range(grid.m):
        for y in range(grid.m):
            if x == y:
                continue
            for i2 in range(grid.d):
                if i2 == cell[x]:
                    continue
                for j2 in range(grid.d):
                    if j2 == cell[y]:
                        continue
                    corners = (_with(cell, x, i2), _with(cell, y, j2), _with(_with(cell, x, i2), y, j2))
                    if all(c in grid.mass for c in corners) and grid.mass[corners[2]] >= v:
                        return x, y, i2, j2
    return None


def compress_method2(table: DataTable, factorization: OntFactorization, params: Optional[CompressionParams] = None) -> OntFactorization:
    """Greedy deletion of product-model states: the state with the fewest supporting
    preparations (then least total mass) is emptied by one grid move per preparation,
    or left alone if any preparation has no legal move."""
    params = params or CompressionParams()
    if factorization.tuple_index is None:
        raise StructuralError("method 2 needs a tuple-indexed (model 2) factorization")
    require_verified(table, factorization)
    d, m, s = table.d, table.m, table.s
    grids = [grid_distribution(factorization, k, d, m) for k in range(s)]
    cells = list(factorization.tuple_index)

    def attempt(cell: Tuple[int, ...]) -> bool:
        saved = [dict(grid.mass) for grid in grids]
        for grid in grids:
            if not grid.mass[cell]:
                continue
            move = _find_move(grid, cell)
            if move is None:
                for g, mass in zip(grids, saved):
                    g.mass = mass
                return False
            grid_move(grid, cell, *move)
        return True

    for _ in range(params.iterations):
        live = list(grids[0].mass) if grids else []
        live.sort(key=lambda c: (
            sum(1 for g in grids if g.mass[c] > 0),
            sum((g.mass[c] for g in grids), ZERO),
            c,
        ))
        progress = False
        for cell in live:
            if attempt(cell):
                for grid in grids:
                    del grid.mass[cell]
                progress = True
                break
        if not progress:
            break

    kept = [cell for cell in cells if not grids or cell in grids[0].mass]
    P = [[grid.mass[cell] for grid in grids] for cell in kept]
    logger.info("method 2: omega %d -> %d", factorization.omega, len(kept))
    return OntFactorization.build(indicator_columns(kept, d, m), P, tuple_index=kept)
